#include "kde_edge/kde.hpp"

#include <array>
#include <cmath>
#include <cstdlib>
#include <stdexcept>
#include <string>

#include "io_util.hpp"
#include "kde_edge/parallel.hpp"
#include "kde_edge/pgm.hpp"

namespace kde_edge {

double profile_eval(KernelProfile profile, double t) {
    if (t < 0) throw std::invalid_argument("kde: profile argument must be >= 0");
    switch (profile) {
        case KernelProfile::Uniform: return t <= 1.0 ? 1.0 : 0.0;
        case KernelProfile::Gaussian: return std::exp(-t);
    }
    throw std::invalid_argument("kde: unknown kernel profile");
}

int window_radius(KernelProfile spatial_profile, double spatial_bandwidth) {
    if (!(spatial_bandwidth > 0))
        throw std::invalid_argument("kde: spatial bandwidth must be positive");
    const double reach = spatial_profile == KernelProfile::Uniform
                             ? spatial_bandwidth
                             : 3.0 * spatial_bandwidth;
    const int r = static_cast<int>(std::ceil(reach));
    return r < 1 ? 1 : r;
}

namespace {

// Shift-invariant per-offset spatial weights plus a per-|Δgray| range
// table. The table entries are the same doubles direct evaluation would
// produce, so tabulated and untabulated paths agree bitwise.
struct KdeTables {
    int radius = 0;
    std::vector<double> spatial;       // (2r+1)^2, row-major over (dy, dx)
    std::array<double, 256> range{};   // indexed by |gray difference|
};

KdeTables build_tables(const Bandwidths& bw, KernelProfile spatial_kernel,
                       KernelProfile range_kernel, int radius_cap) {
    if (!(bw.range > 0))
        throw std::invalid_argument("kde: range bandwidth must be positive");
    KdeTables t;
    t.radius = window_radius(spatial_kernel, bw.spatial);
    // Offsets beyond the image span can never land in a clipped window, so
    // capping the table there changes nothing but the allocation.
    if (radius_cap > 0 && t.radius > radius_cap) t.radius = radius_cap;
    const int side = 2 * t.radius + 1;
    t.spatial.resize(static_cast<std::size_t>(side) * side);
    for (int dy = -t.radius; dy <= t.radius; ++dy)
        for (int dx = -t.radius; dx <= t.radius; ++dx) {
            const double d2 = static_cast<double>(dx) * dx +
                              static_cast<double>(dy) * dy;
            t.spatial[static_cast<std::size_t>(dy + t.radius) * side +
                      (dx + t.radius)] =
                profile_eval(spatial_kernel, d2 / (bw.spatial * bw.spatial));
        }
    for (int d = 0; d < 256; ++d)
        t.range[d] =
            profile_eval(range_kernel, static_cast<double>(d) * d /
                                           (bw.range * bw.range));
    return t;
}

// Weighted kernel sum over the clipped square window, normalized by the
// in-window spatial mass. A window with one gray level accumulates
// identical numerator and denominator terms, so the quotient is exactly 1.
double density_from_tables(const GrayImage& image, int x, int y,
                           const KdeTables& t) {
    const int r = t.radius;
    const int side = 2 * r + 1;
    const int y0 = y - r < 0 ? 0 : y - r;
    const int y1 = y + r >= image.height ? image.height - 1 : y + r;
    const int x0 = x - r < 0 ? 0 : x - r;
    const int x1 = x + r >= image.width ? image.width - 1 : x + r;
    const int center = image.at(x, y);
    double num = 0.0;
    double wsum = 0.0;
    for (int yi = y0; yi <= y1; ++yi) {
        const double* wrow =
            &t.spatial[static_cast<std::size_t>(yi - y + r) * side + (x0 - x + r)];
        const std::uint8_t* prow = &image.pixels[static_cast<std::size_t>(yi) *
                                                 image.width + x0];
        for (int xi = x0; xi <= x1; ++xi) {
            const double w = wrow[xi - x0];
            if (w == 0.0) continue;
            num += w * t.range[std::abs(center - prow[xi - x0])];
            wsum += w;
        }
    }
    return num / wsum;
}

}  // namespace

namespace {

int span_cap(const GrayImage& image) {
    return image.width > image.height ? image.width - 1 : image.height - 1;
}

}  // namespace

double density_at(const GrayImage& image, int x, int y,
                  const Bandwidths& bandwidths, KernelProfile spatial_kernel,
                  KernelProfile range_kernel) {
    require_valid(image, "kde");
    if (!image.in_bounds(x, y))
        throw std::invalid_argument("kde: pixel out of bounds");
    const KdeTables t =
        build_tables(bandwidths, spatial_kernel, range_kernel, span_cap(image));
    return density_from_tables(image, x, y, t);
}

DensityImage density_image(const GrayImage& image, const Bandwidths& bandwidths,
                           KernelProfile spatial_kernel,
                           KernelProfile range_kernel, int threads) {
    require_valid(image, "kde");
    const KdeTables t =
        build_tables(bandwidths, spatial_kernel, range_kernel, span_cap(image));
    DensityImage out{image.width, image.height, {}};
    out.values.resize(image.pixels.size());
    parallel_for_rows(image.height, threads, [&](int row_begin, int row_end) {
        for (int y = row_begin; y < row_end; ++y)
            for (int x = 0; x < image.width; ++x)
                out.at(x, y) = density_from_tables(image, x, y, t);
    });
    return out;
}

void save_density_pgm16(const DensityImage& density,
                        const std::filesystem::path& path) {
    Gray16 img{density.width, density.height, {}};
    img.samples.resize(density.values.size());
    for (std::size_t i = 0; i < density.values.size(); ++i) {
        const double v = density.values[i];
        if (!(v >= 0.0 && v <= 1.0))
            throw std::invalid_argument("kde: density value outside [0, 1]");
        img.samples[i] = static_cast<std::uint16_t>(std::lround(v * 65535.0));
    }
    save_pgm16(img, path);
}

void write_density_csv(const DensityImage& density,
                       const std::filesystem::path& path) {
    std::string out;
    for (int y = 0; y < density.height; ++y) {
        for (int x = 0; x < density.width; ++x) {
            if (x) out += ',';
            out += detail::format_shortest(density.at(x, y));
        }
        out += '\n';
    }
    detail::write_file_atomic(path, out);
}

}  // namespace kde_edge
