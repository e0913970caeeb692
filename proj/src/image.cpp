#include "kde_edge/image.hpp"

#include <algorithm>
#include <random>
#include <stdexcept>
#include <string>

namespace kde_edge {

namespace {

void check_geometry(int width, int height, std::size_t buffer,
                    const char* context) {
    if (width <= 0 || height <= 0)
        throw std::invalid_argument(std::string(context) +
                                    ": dimensions must be positive");
    if (buffer != static_cast<std::size_t>(width) * height)
        throw std::invalid_argument(std::string(context) +
                                    ": buffer size does not match dimensions");
}

void check_gray_range(int value, const char* context) {
    if (value < 0 || value > 255)
        throw std::invalid_argument(std::string(context) +
                                    ": gray value outside [0, 255]");
}

}  // namespace

std::size_t EdgeMap::edge_count() const {
    return static_cast<std::size_t>(
        std::count_if(labels.begin(), labels.end(),
                      [](std::uint8_t v) { return v != 0; }));
}

void require_valid(const GrayImage& image, const char* context) {
    check_geometry(image.width, image.height, image.pixels.size(), context);
}

void require_valid(const EdgeMap& map, const char* context) {
    check_geometry(map.width, map.height, map.labels.size(), context);
    for (std::uint8_t v : map.labels)
        if (v > 1)
            throw std::invalid_argument(std::string(context) +
                                        ": edge labels must be 0 or 1");
}

GroundTruthSet::GroundTruthSet(std::vector<EdgeMap> maps)
    : members(std::move(maps)) {
    if (members.empty())
        throw std::invalid_argument("ground truth set must not be empty");
    for (const EdgeMap& m : members) require_valid(m, "ground truth");
    for (const EdgeMap& m : members)
        if (m.width != members[0].width || m.height != members[0].height)
            throw std::invalid_argument("ground truth dimensions differ");
}

GrayImage make_step(int width, int height, int low, int high, int split_col) {
    check_geometry(width, height, static_cast<std::size_t>(width) * height,
                   "make_step");
    check_gray_range(low, "make_step");
    check_gray_range(high, "make_step");
    if (split_col < 0 || split_col > width)
        throw std::invalid_argument("make_step: split column outside image");
    GrayImage img{width, height, {}};
    img.pixels.resize(static_cast<std::size_t>(width) * height);
    for (int y = 0; y < height; ++y)
        for (int x = 0; x < width; ++x)
            img.at(x, y) = static_cast<std::uint8_t>(x < split_col ? low : high);
    return img;
}

GrayImage make_constant(int width, int height, int value) {
    check_geometry(width, height, static_cast<std::size_t>(width) * height,
                   "make_constant");
    check_gray_range(value, "make_constant");
    GrayImage img{width, height, {}};
    img.pixels.assign(static_cast<std::size_t>(width) * height,
                      static_cast<std::uint8_t>(value));
    return img;
}

GrayImage make_checkerboard(int width, int height, int tile, int low, int high) {
    check_geometry(width, height, static_cast<std::size_t>(width) * height,
                   "make_checkerboard");
    check_gray_range(low, "make_checkerboard");
    check_gray_range(high, "make_checkerboard");
    if (tile <= 0)
        throw std::invalid_argument("make_checkerboard: tile must be positive");
    GrayImage img{width, height, {}};
    img.pixels.resize(static_cast<std::size_t>(width) * height);
    for (int y = 0; y < height; ++y)
        for (int x = 0; x < width; ++x) {
            const bool even = ((x / tile) + (y / tile)) % 2 == 0;
            img.at(x, y) = static_cast<std::uint8_t>(even ? low : high);
        }
    return img;
}

GrayImage make_noise(int width, int height, std::uint32_t seed) {
    check_geometry(width, height, static_cast<std::size_t>(width) * height,
                   "make_noise");
    GrayImage img{width, height, {}};
    img.pixels.resize(static_cast<std::size_t>(width) * height);
    // Low byte of the raw engine output; distribution adapters are not
    // pinned down by the standard, the engine sequence is.
    std::mt19937 gen(seed);
    for (auto& p : img.pixels) p = static_cast<std::uint8_t>(gen() & 0xFFu);
    return img;
}

GrayImage make_disk(int width, int height, double cx, double cy, double radius,
                    int low, int high) {
    check_geometry(width, height, static_cast<std::size_t>(width) * height,
                   "make_disk");
    check_gray_range(low, "make_disk");
    check_gray_range(high, "make_disk");
    if (radius < 0)
        throw std::invalid_argument("make_disk: radius must be non-negative");
    GrayImage img{width, height, {}};
    img.pixels.resize(static_cast<std::size_t>(width) * height);
    const double r2 = radius * radius;
    for (int y = 0; y < height; ++y)
        for (int x = 0; x < width; ++x) {
            const double dx = x - cx;
            const double dy = y - cy;
            img.at(x, y) =
                static_cast<std::uint8_t>(dx * dx + dy * dy <= r2 ? high : low);
        }
    return img;
}

EdgeMap to_edge_map(const GrayImage& image) {
    require_valid(image, "to_edge_map");
    EdgeMap map{image.width, image.height, {}};
    map.labels.resize(image.pixels.size());
    for (std::size_t i = 0; i < image.pixels.size(); ++i)
        map.labels[i] = image.pixels[i] != 0 ? 1 : 0;
    return map;
}

GrayImage to_gray(const EdgeMap& map) {
    require_valid(map, "to_gray");
    GrayImage img{map.width, map.height, {}};
    img.pixels.resize(map.labels.size());
    for (std::size_t i = 0; i < map.labels.size(); ++i)
        img.pixels[i] = map.labels[i] ? 255 : 0;
    return img;
}

}  // namespace kde_edge
