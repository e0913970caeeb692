#pragma once

#include <cstddef>
#include <cstdint>
#include <vector>

namespace kde_edge {

/// 8-bit grayscale image, row-major, top-left origin.
struct GrayImage {
    int width = 0;
    int height = 0;
    std::vector<std::uint8_t> pixels;

    std::uint8_t at(int x, int y) const {
        return pixels[static_cast<std::size_t>(y) * width + x];
    }
    std::uint8_t& at(int x, int y) {
        return pixels[static_cast<std::size_t>(y) * width + x];
    }
    std::size_t pixel_count() const { return pixels.size(); }
    bool in_bounds(int x, int y) const {
        return x >= 0 && x < width && y >= 0 && y < height;
    }
};

/// Binary per-pixel edge labeling sharing GrayImage geometry. 1 = edge.
struct EdgeMap {
    int width = 0;
    int height = 0;
    std::vector<std::uint8_t> labels;

    bool at(int x, int y) const {
        return labels[static_cast<std::size_t>(y) * width + x] != 0;
    }
    void set(int x, int y, bool edge) {
        labels[static_cast<std::size_t>(y) * width + x] = edge ? 1 : 0;
    }
    std::size_t edge_count() const;
};

/// Non-empty ordered set of human edge maps, all with identical dimensions.
struct GroundTruthSet {
    std::vector<EdgeMap> members;

    explicit GroundTruthSet(std::vector<EdgeMap> maps);
    std::size_t size() const { return members.size(); }
    const EdgeMap& operator[](std::size_t i) const { return members[i]; }
};

void require_valid(const GrayImage& image, const char* context);
void require_valid(const EdgeMap& map, const char* context);

/// Vertical step: columns < split_col take `low`, the rest take `high`.
GrayImage make_step(int width, int height, int low, int high, int split_col);
GrayImage make_constant(int width, int height, int value);
GrayImage make_checkerboard(int width, int height, int tile, int low, int high);
/// Uniform pixel noise from a seeded PRNG; identical seed, identical image.
GrayImage make_noise(int width, int height, std::uint32_t seed);
/// Filled disk of value `high` on a `low` background.
GrayImage make_disk(int width, int height, double cx, double cy, double radius,
                    int low, int high);

/// Any nonzero gray value counts as an edge.
EdgeMap to_edge_map(const GrayImage& image);
/// Renders edges as 255 on a 0 background.
GrayImage to_gray(const EdgeMap& map);

}  // namespace kde_edge
