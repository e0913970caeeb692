#pragma once

#include <cstdint>
#include <filesystem>
#include <vector>

#include "kde_edge/image.hpp"
#include "kde_edge/kde.hpp"

namespace kde_edge {

/// Equal-width frequency table over [lo, hi].
struct Histogram {
    int bin_count = 0;
    double lo = 0.0;
    double hi = 1.0;
    std::vector<std::uint64_t> counts;

    double bin_left(int i) const {
        return lo + (hi - lo) * i / bin_count;
    }
    double bin_center(int i) const {
        return lo + (hi - lo) * (i + 0.5) / bin_count;
    }
};

/// How the density threshold is anchored to the histogram mode.
///
/// Both policies are deterministic heuristics; the method itself only asks
/// for a cut "around" the high-density mode, so the exact rule is a
/// user-selectable choice.
enum class ThresholdMode {
    /// Walk down from the mode bin and cut at the first strict local
    /// minimum of the counts; with no strict minimum, fall back to
    /// FractionOfMode with beta = 0.9.
    ValleyBelowMode,
    /// Cut at beta times the mode bin's center value.
    FractionOfMode,
};

struct ThresholdPolicy {
    ThresholdMode mode = ThresholdMode::ValleyBelowMode;
    double beta = 0.9;   ///< FractionOfMode factor, strictly in (0, 1)
    int bin_count = 256;
};

/// Bins density values over [0, 1]: value v lands in
/// min(floor(v * bin_count), bin_count - 1).
Histogram build_histogram(const DensityImage& density, int bin_count);

/// Picks the density threshold u in [0, 1] from the histogram under the
/// policy. Mode ties break toward the higher-density bin. Rejects an
/// all-zero histogram.
double select_threshold(const Histogram& histogram,
                        const ThresholdPolicy& policy);

/// Labels a pixel as edge iff its density is strictly below the selected
/// threshold. An all-equal density image yields an empty edge map.
EdgeMap detect_edges(const DensityImage& density, const ThresholdPolicy& policy);

struct PipelineResult {
    DensityImage density;
    double threshold = 0.0;
    EdgeMap edges;
};

/// Full density -> threshold -> edge-map run, returning all intermediates.
PipelineResult edd_pipeline(const GrayImage& image, const Bandwidths& bandwidths,
                            KernelProfile spatial_kernel,
                            KernelProfile range_kernel,
                            const ThresholdPolicy& policy, int threads = 0);

/// Two-column CSV: bin_center, count.
void write_histogram_csv(const Histogram& histogram,
                         const std::filesystem::path& path);

}  // namespace kde_edge
