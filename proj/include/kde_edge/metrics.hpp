#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "kde_edge/image.hpp"

namespace kde_edge {

/// Region labeling over the image lattice; an EdgeMap is the binary case.
struct Labeling {
    int width = 0;
    int height = 0;
    std::vector<int> labels;

    std::size_t size() const { return labels.size(); }
};

Labeling to_labeling(const EdgeMap& map);

/// Pixel-pair agreement counts between two labelings of n elements:
/// a = same label in both, b = different in both, c = same only in the
/// first, d = same only in the second. a + b + c + d = n(n-1)/2.
struct PairCounts {
    std::uint64_t same_both = 0;
    std::uint64_t diff_both = 0;
    std::uint64_t same_first_only = 0;
    std::uint64_t same_second_only = 0;
    std::uint64_t n = 0;
};

/// Closed-form pair counts from the label co-occurrence table; no pair
/// enumeration.
PairCounts pair_counts(const Labeling& x, const Labeling& y);

/// Fraction of pixel pairs on whose same/different status the two
/// labelings agree. Requires matching dimensions and n >= 2.
double rand_index(const Labeling& x, const Labeling& y);

/// Pairwise agreement with a set of reference labelings: each pair
/// contributes c*p + (1-c)*(1-p), where c marks co-labeling in s and p is
/// the fraction of references co-labeling the pair. Computed by grouping
/// pixels on their (s label, reference label vector) signature, never by
/// pair enumeration.
double pri(const Labeling& s, const std::vector<Labeling>& truths);

/// Literal O(n^2) evaluation of the same average, kept as the testing
/// oracle for the closed form. Guarded to n <= 4096.
double pri_bruteforce(const Labeling& s, const std::vector<Labeling>& truths);

/// pri rescaled so chance-level agreement maps to 0 and perfect agreement
/// to 1. The chance baseline pairs pixels at random while preserving s's
/// label marginals. Rejects the degenerate case where the baseline itself
/// is 1 (both sides effectively single-label).
double npri(const Labeling& s, const std::vector<Labeling>& truths);

/// Entropy distance between two images: the Z_256 difference image is
/// histogrammed over 256 symbols and its Shannon entropy (base 2) is
/// normalized by 8 to land in [0, 1]. Zero for identical images; symmetric
/// because negation mod 256 permutes the difference histogram.
double ned(const GrayImage& a, const GrayImage& b);

struct MetricReport {
    double ri = 0.0;
    double pri = 0.0;
    double npri = 0.0;
    double ned = 0.0;
    std::vector<double> ned_per_truth;
};

/// Scores a detected edge map against ground truth: RI and NED against the
/// first truth (per-truth NED retained), PRI/NPRI against the full set.
MetricReport evaluate(const EdgeMap& detected, const GroundTruthSet& truths);

/// CSV row (image-id, detector, truth-id, ri, pri, npri, ned), metrics at
/// 6 decimal places.
std::string metric_csv_row(const std::string& image_id,
                           const std::string& detector,
                           const std::string& truth_id, double ri, double pri,
                           double npri, double ned);

}  // namespace kde_edge
