#pragma once

#include <filesystem>
#include <vector>

#include "kde_edge/image.hpp"

namespace kde_edge {

/// Radially symmetric kernel profile k(t) over squared normalized distance.
/// Both kinds satisfy k(0) = 1, are non-increasing, and map into [0, 1].
enum class KernelProfile {
    Uniform,   ///< unit-ball indicator: 1 for t <= 1, else 0
    Gaussian,  ///< exp(-t)
};

/// Kernel scales: spatial in pixels, range in gray levels. Both > 0.
struct Bandwidths {
    double spatial = 1.0;
    double range = 15.0;
};

/// Per-pixel density estimate in [0, 1]; same geometry as the source image.
struct DensityImage {
    int width = 0;
    int height = 0;
    std::vector<double> values;

    double at(int x, int y) const {
        return values[static_cast<std::size_t>(y) * width + x];
    }
    double& at(int x, int y) {
        return values[static_cast<std::size_t>(y) * width + x];
    }
};

/// Evaluates the profile at squared normalized distance t >= 0.
double profile_eval(KernelProfile profile, double t);

/// Half-width of the square support window: ceil(h_s) for Uniform,
/// ceil(3 h_s) for Gaussian, never below 1.
int window_radius(KernelProfile spatial_profile, double spatial_bandwidth);

/// Joint spatial/range density at one pixel. The window is the square of
/// window_radius clipped to the image; the sum of spatial-by-range kernel
/// products is normalized by the in-window spatial weight, so a window with
/// no gray-level variation scores exactly 1.
double density_at(const GrayImage& image, int x, int y,
                  const Bandwidths& bandwidths, KernelProfile spatial_kernel,
                  KernelProfile range_kernel);

/// density_at over every pixel. Deterministic for any thread count:
/// each output value is written by exactly one worker and the per-pixel
/// computation does not depend on evaluation order. threads <= 0 = auto.
DensityImage density_image(const GrayImage& image, const Bandwidths& bandwidths,
                           KernelProfile spatial_kernel,
                           KernelProfile range_kernel, int threads = 0);

/// 16-bit PGM export: sample = round(density * 65535).
void save_density_pgm16(const DensityImage& density,
                        const std::filesystem::path& path);

/// One CSV line per image row; values use the shortest decimal
/// representation that round-trips to the same double.
void write_density_csv(const DensityImage& density,
                       const std::filesystem::path& path);

}  // namespace kde_edge
