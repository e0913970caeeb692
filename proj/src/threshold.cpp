#include "kde_edge/threshold.hpp"

#include <cmath>
#include <stdexcept>

#include "io_util.hpp"

namespace kde_edge {

namespace {

void check_policy(const ThresholdPolicy& policy) {
    if (policy.bin_count < 1)
        throw std::invalid_argument("threshold: bin count must be positive");
    if (!(policy.beta > 0.0 && policy.beta < 1.0))
        throw std::invalid_argument("threshold: beta must lie in (0, 1)");
}

EdgeMap apply_threshold(const DensityImage& density, double u) {
    EdgeMap map{density.width, density.height, {}};
    map.labels.resize(density.values.size());
    for (std::size_t i = 0; i < density.values.size(); ++i)
        map.labels[i] = density.values[i] < u ? 1 : 0;
    return map;
}

}  // namespace

Histogram build_histogram(const DensityImage& density, int bin_count) {
    if (bin_count < 1)
        throw std::invalid_argument("threshold: bin count must be positive");
    if (density.width <= 0 || density.height <= 0 ||
        density.values.size() !=
            static_cast<std::size_t>(density.width) * density.height)
        throw std::invalid_argument("threshold: invalid density image");
    Histogram h;
    h.bin_count = bin_count;
    h.counts.assign(static_cast<std::size_t>(bin_count), 0);
    for (double v : density.values) {
        if (!(v >= 0.0 && v <= 1.0))
            throw std::invalid_argument("threshold: density value outside [0, 1]");
        int bin = static_cast<int>(v * bin_count);
        if (bin >= bin_count) bin = bin_count - 1;
        ++h.counts[bin];
    }
    return h;
}

double select_threshold(const Histogram& histogram,
                        const ThresholdPolicy& policy) {
    check_policy(policy);
    if (histogram.bin_count < 1 ||
        histogram.counts.size() != static_cast<std::size_t>(histogram.bin_count))
        throw std::invalid_argument("threshold: invalid histogram");

    std::uint64_t total = 0;
    int mode = 0;
    for (int i = 0; i < histogram.bin_count; ++i) {
        total += histogram.counts[i];
        if (histogram.counts[i] >= histogram.counts[mode]) mode = i;
    }
    if (total == 0)
        throw std::invalid_argument("threshold: empty histogram");

    if (policy.mode == ThresholdMode::ValleyBelowMode) {
        for (int i = mode - 1; i >= 0; --i) {
            const bool below_left =
                i == 0 || histogram.counts[i] < histogram.counts[i - 1];
            const bool below_right = histogram.counts[i] < histogram.counts[i + 1];
            if (below_left && below_right) return histogram.bin_left(i);
        }
        // No valley below the mode; fall back to the fixed-fraction rule.
        return 0.9 * histogram.bin_center(mode);
    }
    return policy.beta * histogram.bin_center(mode);
}

EdgeMap detect_edges(const DensityImage& density, const ThresholdPolicy& policy) {
    const Histogram h = build_histogram(density, policy.bin_count);
    return apply_threshold(density, select_threshold(h, policy));
}

PipelineResult edd_pipeline(const GrayImage& image, const Bandwidths& bandwidths,
                            KernelProfile spatial_kernel,
                            KernelProfile range_kernel,
                            const ThresholdPolicy& policy, int threads) {
    PipelineResult result;
    result.density =
        density_image(image, bandwidths, spatial_kernel, range_kernel, threads);
    const Histogram h = build_histogram(result.density, policy.bin_count);
    result.threshold = select_threshold(h, policy);
    result.edges = apply_threshold(result.density, result.threshold);
    return result;
}

void write_histogram_csv(const Histogram& histogram,
                         const std::filesystem::path& path) {
    std::string out = "bin_center,count\n";
    for (int i = 0; i < histogram.bin_count; ++i) {
        out += detail::format_shortest(histogram.bin_center(i));
        out += ',';
        out += std::to_string(histogram.counts[i]);
        out += '\n';
    }
    detail::write_file_atomic(path, out);
}

}  // namespace kde_edge
