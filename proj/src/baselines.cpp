#include "kde_edge/baselines.hpp"

#include <algorithm>
#include <cmath>
#include <queue>
#include <stdexcept>

namespace kde_edge {

Mask sobel_x_mask() {
    return {3, 3, {-1, 0, 1, -2, 0, 2, -1, 0, 1}, 1, 1};
}
Mask sobel_y_mask() {
    return {3, 3, {-1, -2, -1, 0, 0, 0, 1, 2, 1}, 1, 1};
}
Mask prewitt_x_mask() {
    return {3, 3, {-1, 0, 1, -1, 0, 1, -1, 0, 1}, 1, 1};
}
Mask prewitt_y_mask() {
    return {3, 3, {-1, -1, -1, 0, 0, 0, 1, 1, 1}, 1, 1};
}
Mask roberts_x_mask() {
    return {2, 2, {1, 0, 0, -1}, 0, 0};
}
Mask roberts_y_mask() {
    return {2, 2, {0, 1, -1, 0}, 0, 0};
}

namespace {

int clamp_coord(int v, int hi) { return v < 0 ? 0 : (v > hi ? hi : v); }

void check_mask(const Mask& mask) {
    if (mask.width <= 0 || mask.height <= 0 || mask.weights.empty())
        throw std::invalid_argument("baselines: empty mask");
    if (mask.weights.size() !=
        static_cast<std::size_t>(mask.width) * mask.height)
        throw std::invalid_argument("baselines: mask size mismatch");
    if (mask.anchor_x < 0 || mask.anchor_x >= mask.width || mask.anchor_y < 0 ||
        mask.anchor_y >= mask.height)
        throw std::invalid_argument("baselines: mask anchor outside mask");
}

// Signed mask response over a double-valued raster, replicate border.
std::vector<double> correlate(const std::vector<double>& src, int width,
                              int height, const Mask& mask) {
    std::vector<double> out(src.size());
    for (int y = 0; y < height; ++y)
        for (int x = 0; x < width; ++x) {
            double acc = 0.0;
            for (int my = 0; my < mask.height; ++my) {
                const int sy = clamp_coord(y + my - mask.anchor_y, height - 1);
                for (int mx = 0; mx < mask.width; ++mx) {
                    const int sx = clamp_coord(x + mx - mask.anchor_x, width - 1);
                    acc += mask.weights[static_cast<std::size_t>(my) * mask.width +
                                        mx] *
                           src[static_cast<std::size_t>(sy) * width + sx];
                }
            }
            out[static_cast<std::size_t>(y) * width + x] = acc;
        }
    return out;
}

std::vector<double> to_doubles(const GrayImage& image) {
    std::vector<double> out(image.pixels.size());
    for (std::size_t i = 0; i < image.pixels.size(); ++i)
        out[i] = image.pixels[i];
    return out;
}

GradientImage gradient_from(const std::vector<double>& src, int width,
                            int height, const Mask& mx, const Mask& my) {
    GradientImage g{width, height, {}, {}, {}};
    g.gx = correlate(src, width, height, mx);
    g.gy = correlate(src, width, height, my);
    g.magnitude.resize(src.size());
    for (std::size_t i = 0; i < src.size(); ++i)
        g.magnitude[i] = std::sqrt(g.gx[i] * g.gx[i] + g.gy[i] * g.gy[i]);
    return g;
}

void operator_masks(GradientOperator op, Mask& mx, Mask& my) {
    switch (op) {
        case GradientOperator::Sobel:
            mx = sobel_x_mask();
            my = sobel_y_mask();
            return;
        case GradientOperator::Prewitt:
            mx = prewitt_x_mask();
            my = prewitt_y_mask();
            return;
        case GradientOperator::Roberts:
            mx = roberts_x_mask();
            my = roberts_y_mask();
            return;
    }
    throw std::invalid_argument("baselines: unknown operator");
}

}  // namespace

std::vector<double> convolve_mask(const GrayImage& image, const Mask& mask) {
    require_valid(image, "baselines");
    check_mask(mask);
    return correlate(to_doubles(image), image.width, image.height, mask);
}

GradientImage gradient_response(const GrayImage& image, GradientOperator op) {
    require_valid(image, "baselines");
    Mask mx, my;
    operator_masks(op, mx, my);
    return gradient_from(to_doubles(image), image.width, image.height, mx, my);
}

EdgeMap gradient_detector(const GrayImage& image, GradientOperator op,
                          double threshold_fraction) {
    if (!(threshold_fraction > 0.0 && threshold_fraction <= 1.0))
        throw std::invalid_argument(
            "baselines: threshold fraction must lie in (0, 1]");
    const GradientImage g = gradient_response(image, op);
    const double maxmag =
        *std::max_element(g.magnitude.begin(), g.magnitude.end());
    const double u = threshold_fraction * maxmag;
    EdgeMap map{image.width, image.height, {}};
    map.labels.resize(g.magnitude.size());
    for (std::size_t i = 0; i < g.magnitude.size(); ++i)
        map.labels[i] = g.magnitude[i] > u ? 1 : 0;
    return map;
}

namespace {

// Separable Gaussian blur, replicate border, truncated at ceil(3 sigma).
std::vector<double> gaussian_smooth(const std::vector<double>& src, int width,
                                    int height, double sigma) {
    const int radius = std::max(1, static_cast<int>(std::ceil(3.0 * sigma)));
    std::vector<double> kernel(static_cast<std::size_t>(2 * radius + 1));
    double sum = 0.0;
    for (int i = -radius; i <= radius; ++i) {
        kernel[i + radius] = std::exp(-(static_cast<double>(i) * i) /
                                      (2.0 * sigma * sigma));
        sum += kernel[i + radius];
    }
    for (double& k : kernel) k /= sum;

    std::vector<double> tmp(src.size());
    for (int y = 0; y < height; ++y)
        for (int x = 0; x < width; ++x) {
            double acc = 0.0;
            for (int i = -radius; i <= radius; ++i)
                acc += kernel[i + radius] *
                       src[static_cast<std::size_t>(y) * width +
                           clamp_coord(x + i, width - 1)];
            tmp[static_cast<std::size_t>(y) * width + x] = acc;
        }
    std::vector<double> out(src.size());
    for (int y = 0; y < height; ++y)
        for (int x = 0; x < width; ++x) {
            double acc = 0.0;
            for (int i = -radius; i <= radius; ++i)
                acc += kernel[i + radius] *
                       tmp[static_cast<std::size_t>(clamp_coord(y + i, height - 1)) *
                               width +
                           x];
            out[static_cast<std::size_t>(y) * width + x] = acc;
        }
    return out;
}

struct Offset {
    int dx;
    int dy;
};

// Canonical neighbor step for each quantized gradient direction.
Offset direction_offset(double gx, double gy) {
    double deg = std::atan2(gy, gx) * 180.0 / 3.14159265358979323846;
    if (deg < 0) deg += 180.0;
    if (deg >= 180.0) deg -= 180.0;
    if (deg < 22.5 || deg >= 157.5) return {1, 0};
    if (deg < 67.5) return {1, 1};
    if (deg < 112.5) return {0, 1};
    return {1, -1};
}

}  // namespace

EdgeMap canny(const GrayImage& image, const CannyParams& params) {
    require_valid(image, "canny");
    if (!(params.sigma > 0))
        throw std::invalid_argument("canny: sigma must be positive");
    if (!(params.low_fraction > 0 &&
          params.low_fraction < params.high_fraction &&
          params.high_fraction <= 1.0))
        throw std::invalid_argument(
            "canny: need 0 < low fraction < high fraction <= 1");

    const int width = image.width;
    const int height = image.height;
    const std::vector<double> smoothed =
        gaussian_smooth(to_doubles(image), width, height, params.sigma);
    const GradientImage g =
        gradient_from(smoothed, width, height, sobel_x_mask(), sobel_y_mask());

    const auto [min_it, max_it] =
        std::minmax_element(g.magnitude.begin(), g.magnitude.end());
    const double maxmag = *max_it;
    // A perfectly flat magnitude field has no local maxima to keep. Smoothing
    // a constant image can leave a uniform sub-ulp residue instead of exact
    // zeros, and without this cut the residue would survive suppression at
    // the border, where out-of-range neighbors compare as zero.
    if (*min_it == maxmag) {
        EdgeMap empty{width, height, {}};
        empty.labels.assign(g.magnitude.size(), 0);
        return empty;
    }

    // Non-maximum suppression along the quantized gradient direction. On an
    // exact two-way tie the forward comparison is strict and the backward
    // one is not, so exactly one of two equal ridge neighbors survives.
    std::vector<std::uint8_t> surviving(g.magnitude.size(), 0);
    const auto mag_at = [&](int x, int y) {
        if (x < 0 || x >= width || y < 0 || y >= height) return 0.0;
        return g.magnitude[static_cast<std::size_t>(y) * width + x];
    };
    for (int y = 0; y < height; ++y)
        for (int x = 0; x < width; ++x) {
            const std::size_t i = static_cast<std::size_t>(y) * width + x;
            const double m = g.magnitude[i];
            if (m <= 0.0) continue;
            const Offset d = direction_offset(g.gx[i], g.gy[i]);
            if (m > mag_at(x + d.dx, y + d.dy) &&
                m >= mag_at(x - d.dx, y - d.dy))
                surviving[i] = 1;
        }

    const double high = params.high_fraction * maxmag;
    const double low = params.low_fraction * maxmag;

    EdgeMap map{width, height, {}};
    map.labels.assign(g.magnitude.size(), 0);
    std::queue<std::pair<int, int>> frontier;
    for (int y = 0; y < height; ++y)
        for (int x = 0; x < width; ++x) {
            const std::size_t i = static_cast<std::size_t>(y) * width + x;
            if (surviving[i] && g.magnitude[i] > high) {
                map.labels[i] = 1;
                frontier.emplace(x, y);
            }
        }
    while (!frontier.empty()) {
        const auto [x, y] = frontier.front();
        frontier.pop();
        for (int dy = -1; dy <= 1; ++dy)
            for (int dx = -1; dx <= 1; ++dx) {
                if (dx == 0 && dy == 0) continue;
                const int nx = x + dx;
                const int ny = y + dy;
                if (nx < 0 || nx >= width || ny < 0 || ny >= height) continue;
                const std::size_t ni = static_cast<std::size_t>(ny) * width + nx;
                if (map.labels[ni] || !surviving[ni]) continue;
                if (g.magnitude[ni] > low) {
                    map.labels[ni] = 1;
                    frontier.emplace(nx, ny);
                }
            }
    }
    return map;
}

}  // namespace kde_edge
