#include "kde_edge/metrics.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <map>
#include <stdexcept>
#include <utility>

#include "io_util.hpp"

namespace kde_edge {

namespace {

void check_labeling(const Labeling& l, const char* context) {
    if (l.width <= 0 || l.height <= 0)
        throw std::invalid_argument(std::string(context) +
                                    ": dimensions must be positive");
    if (l.labels.size() != static_cast<std::size_t>(l.width) * l.height)
        throw std::invalid_argument(std::string(context) +
                                    ": label buffer size does not match");
}

void check_same_shape(const Labeling& x, const Labeling& y,
                      const char* context) {
    if (x.width != y.width || x.height != y.height)
        throw std::invalid_argument(std::string(context) +
                                    ": dimension mismatch");
}

std::uint64_t choose2(std::uint64_t k) { return k * (k - 1) / 2; }

std::vector<Labeling> check_truths(const Labeling& s,
                                   const std::vector<Labeling>& truths,
                                   const char* context) {
    if (truths.empty())
        throw std::invalid_argument(std::string(context) +
                                    ": truth set must not be empty");
    check_labeling(s, context);
    for (const Labeling& t : truths) {
        check_labeling(t, context);
        check_same_shape(s, t, context);
    }
    if (s.labels.size() < 2)
        throw std::invalid_argument(std::string(context) +
                                    ": need at least two pixels");
    return truths;
}

// Pixels sharing a (s label, truth label vector) signature are
// indistinguishable to every pairwise term, so pair sums reduce to group
// counts. std::map keys keep the iteration order deterministic.
std::map<std::vector<int>, std::uint64_t> signature_groups(
    const Labeling& s, const std::vector<Labeling>& truths) {
    const std::size_t k = truths.size();
    std::map<std::vector<int>, std::uint64_t> groups;
    std::vector<int> sig(k + 1);
    for (std::size_t i = 0; i < s.labels.size(); ++i) {
        sig[0] = s.labels[i];
        for (std::size_t t = 0; t < k; ++t) sig[t + 1] = truths[t].labels[i];
        ++groups[sig];
    }
    return groups;
}

}  // namespace

Labeling to_labeling(const EdgeMap& map) {
    require_valid(map, "to_labeling");
    Labeling l{map.width, map.height, {}};
    l.labels.assign(map.labels.begin(), map.labels.end());
    return l;
}

PairCounts pair_counts(const Labeling& x, const Labeling& y) {
    check_labeling(x, "pair_counts");
    check_labeling(y, "pair_counts");
    check_same_shape(x, y, "pair_counts");
    if (x.labels.size() < 2)
        throw std::invalid_argument("pair_counts: need at least two pixels");

    std::map<std::pair<int, int>, std::uint64_t> joint;
    std::map<int, std::uint64_t> rows;
    std::map<int, std::uint64_t> cols;
    for (std::size_t i = 0; i < x.labels.size(); ++i) {
        ++joint[{x.labels[i], y.labels[i]}];
        ++rows[x.labels[i]];
        ++cols[y.labels[i]];
    }

    PairCounts pc;
    pc.n = x.labels.size();
    std::uint64_t same_x = 0;
    std::uint64_t same_y = 0;
    for (const auto& [label, count] : rows) same_x += choose2(count);
    for (const auto& [label, count] : cols) same_y += choose2(count);
    for (const auto& [labels, count] : joint) pc.same_both += choose2(count);
    pc.same_first_only = same_x - pc.same_both;
    pc.same_second_only = same_y - pc.same_both;
    pc.diff_both = choose2(pc.n) - pc.same_both - pc.same_first_only -
                   pc.same_second_only;
    return pc;
}

double rand_index(const Labeling& x, const Labeling& y) {
    const PairCounts pc = pair_counts(x, y);
    return static_cast<double>(pc.same_both + pc.diff_both) /
           static_cast<double>(choose2(pc.n));
}

double pri(const Labeling& s, const std::vector<Labeling>& truths) {
    check_truths(s, truths, "pri");
    const double k = static_cast<double>(truths.size());

    const auto groups = signature_groups(s, truths);
    std::vector<std::pair<const std::vector<int>*, std::uint64_t>> flat;
    flat.reserve(groups.size());
    for (const auto& [sig, count] : groups) flat.emplace_back(&sig, count);

    double total = 0.0;
    for (std::size_t u = 0; u < flat.size(); ++u) {
        // Same signature: co-labeled in s and in every truth, agreement 1.
        total += static_cast<double>(choose2(flat[u].second));
        for (std::size_t v = u + 1; v < flat.size(); ++v) {
            const std::vector<int>& a = *flat[u].first;
            const std::vector<int>& b = *flat[v].first;
            int equal_truths = 0;
            for (std::size_t t = 1; t < a.size(); ++t)
                if (a[t] == b[t]) ++equal_truths;
            const double p = equal_truths / k;
            const double agree = a[0] == b[0] ? p : 1.0 - p;
            total += static_cast<double>(flat[u].second) *
                     static_cast<double>(flat[v].second) * agree;
        }
    }
    return total / static_cast<double>(choose2(s.labels.size()));
}

double pri_bruteforce(const Labeling& s, const std::vector<Labeling>& truths) {
    check_truths(s, truths, "pri_bruteforce");
    const std::size_t n = s.labels.size();
    if (n > 4096)
        throw std::invalid_argument("pri_bruteforce: more than 4096 elements");
    const double k = static_cast<double>(truths.size());

    double total = 0.0;
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = i + 1; j < n; ++j) {
            int equal_truths = 0;
            for (const Labeling& t : truths)
                if (t.labels[i] == t.labels[j]) ++equal_truths;
            const double p = equal_truths / k;
            total += s.labels[i] == s.labels[j] ? p : 1.0 - p;
        }
    return total / static_cast<double>(choose2(n));
}

double npri(const Labeling& s, const std::vector<Labeling>& truths) {
    check_truths(s, truths, "npri");
    const std::uint64_t n = s.labels.size();
    const double t_pairs = static_cast<double>(choose2(n));

    std::map<int, std::uint64_t> s_classes;
    for (int label : s.labels) ++s_classes[label];
    double same_s_pairs = 0.0;
    for (const auto& [label, count] : s_classes)
        same_s_pairs += static_cast<double>(choose2(count));
    // Probability that a random pixel pair is co-labeled in s.
    const double p_prime = same_s_pairs / t_pairs;

    // Sum over pairs of p_ij, via per-truth co-labeled pair counts.
    double p_sum = 0.0;
    for (const Labeling& t : truths) {
        std::map<int, std::uint64_t> classes;
        for (int label : t.labels) ++classes[label];
        for (const auto& [label, count] : classes)
            p_sum += static_cast<double>(choose2(count));
    }
    p_sum /= static_cast<double>(truths.size());

    const double expected =
        (p_prime * p_sum + (1.0 - p_prime) * (t_pairs - p_sum)) / t_pairs;
    if (expected >= 1.0)
        throw std::domain_error("npri: expected index is 1, NPRI undefined");
    return (pri(s, truths) - expected) / (1.0 - expected);
}

double ned(const GrayImage& a, const GrayImage& b) {
    require_valid(a, "ned");
    require_valid(b, "ned");
    if (a.width != b.width || a.height != b.height)
        throw std::invalid_argument("ned: dimension mismatch");

    std::array<std::uint64_t, 256> counts{};
    for (std::size_t i = 0; i < a.pixels.size(); ++i)
        ++counts[static_cast<std::uint8_t>(a.pixels[i] - b.pixels[i])];

    // Swapping the arguments negates every difference mod 256, which only
    // permutes the histogram; summing in sorted order makes the two
    // entropies bitwise identical, not merely equal in exact arithmetic.
    std::sort(counts.begin(), counts.end());
    const double n = static_cast<double>(a.pixels.size());
    double entropy = 0.0;
    for (std::uint64_t c : counts) {
        if (c == 0) continue;
        const double p = static_cast<double>(c) / n;
        entropy -= p * std::log2(p);
    }
    return entropy / 8.0;
}

MetricReport evaluate(const EdgeMap& detected, const GroundTruthSet& truths) {
    require_valid(detected, "evaluate");
    if (detected.width != truths[0].width || detected.height != truths[0].height)
        throw std::invalid_argument("evaluate: dimension mismatch");

    const Labeling det = to_labeling(detected);
    std::vector<Labeling> truth_labelings;
    truth_labelings.reserve(truths.size());
    for (std::size_t i = 0; i < truths.size(); ++i)
        truth_labelings.push_back(to_labeling(truths[i]));

    MetricReport report;
    report.ri = rand_index(det, truth_labelings[0]);
    report.pri = pri(det, truth_labelings);
    report.npri = npri(det, truth_labelings);
    const GrayImage det_gray = to_gray(detected);
    report.ned_per_truth.reserve(truths.size());
    for (std::size_t i = 0; i < truths.size(); ++i)
        report.ned_per_truth.push_back(ned(det_gray, to_gray(truths[i])));
    report.ned = report.ned_per_truth[0];
    return report;
}

namespace {

std::string csv_field(const std::string& value) {
    if (value.find_first_of(",\"\n") == std::string::npos) return value;
    std::string quoted = "\"";
    for (char c : value) {
        if (c == '"') quoted += '"';
        quoted += c;
    }
    quoted += '"';
    return quoted;
}

}  // namespace

std::string metric_csv_row(const std::string& image_id,
                           const std::string& detector,
                           const std::string& truth_id, double ri, double pri,
                           double npri, double ned) {
    return csv_field(image_id) + "," + csv_field(detector) + "," +
           csv_field(truth_id) + "," + detail::format_fixed6(ri) + "," +
           detail::format_fixed6(pri) + "," + detail::format_fixed6(npri) + "," +
           detail::format_fixed6(ned);
}

}  // namespace kde_edge
