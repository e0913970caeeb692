#include <charconv>
#include <cstdio>
#include <exception>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "kde_edge/baselines.hpp"
#include "kde_edge/image.hpp"
#include "kde_edge/kde.hpp"
#include "kde_edge/metrics.hpp"
#include "kde_edge/pgm.hpp"
#include "kde_edge/threshold.hpp"

namespace fs = std::filesystem;
using namespace kde_edge;

namespace {

constexpr const char* kCsvHeader = "image-id,detector,truth-id,ri,pri,npri,ned";

// Shortest decimal form that parses back to the same double (mirrors the
// library's CSV formatting).
std::string format_shortest(double value) {
    char buf[64];
    auto [end, ec] = std::to_chars(buf, buf + sizeof buf, value);
    if (ec != std::errc{}) throw std::runtime_error("number formatting failed");
    return std::string(buf, end);
}

void write_text_atomic(const fs::path& path, const std::string& content) {
    const fs::path parent = path.parent_path();
    if (!parent.empty()) fs::create_directories(parent);
    const fs::path tmp = path.string() + ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out)
            throw std::runtime_error("cannot write '" + tmp.string() + "'");
        out.write(content.data(), static_cast<std::streamsize>(content.size()));
        if (!out)
            throw std::runtime_error("short write to '" + tmp.string() + "'");
    }
    fs::rename(tmp, path);
}

KernelProfile parse_profile(const std::string& name) {
    if (name == "uniform") return KernelProfile::Uniform;
    if (name == "gaussian") return KernelProfile::Gaussian;
    throw std::runtime_error("unknown kernel profile '" + name + "'");
}

ThresholdMode parse_threshold(const std::string& name) {
    if (name == "valley") return ThresholdMode::ValleyBelowMode;
    if (name == "fraction") return ThresholdMode::FractionOfMode;
    throw std::runtime_error("unknown threshold policy '" + name + "'");
}

fs::path default_out(const fs::path& input, const char* suffix) {
    return input.parent_path() / (input.stem().string() + suffix);
}

fs::path sibling_artifact(const fs::path& out, const char* suffix) {
    fs::path base = out;
    base.replace_extension();
    return fs::path(base.string() + suffix);
}

// Everything a detector run can depend on; bench shares one instance
// across all detectors.
struct DetectorParams {
    Bandwidths bw;
    KernelProfile spatial = KernelProfile::Uniform;
    KernelProfile range = KernelProfile::Gaussian;
    ThresholdPolicy policy;
    int threads = 0;
    double frac = 0.25;
    CannyParams canny_params;
};

EdgeMap run_detector(const std::string& name, const GrayImage& image,
                     const DetectorParams& p) {
    if (name == "edd")
        return edd_pipeline(image, p.bw, p.spatial, p.range, p.policy, p.threads)
            .edges;
    if (name == "sobel")
        return gradient_detector(image, GradientOperator::Sobel, p.frac);
    if (name == "prewitt")
        return gradient_detector(image, GradientOperator::Prewitt, p.frac);
    if (name == "roberts")
        return gradient_detector(image, GradientOperator::Roberts, p.frac);
    if (name == "canny") return canny(image, p.canny_params);
    throw std::runtime_error("unknown detector '" + name + "'");
}

GroundTruthSet load_truths(const std::vector<fs::path>& paths) {
    std::vector<EdgeMap> maps;
    maps.reserve(paths.size());
    for (const fs::path& p : paths) maps.push_back(to_edge_map(load_pgm(p)));
    return GroundTruthSet(std::move(maps));
}

// One row per truth when per_truth, else only the first-truth row (the
// bench table shape: image x detector). PRI/NPRI always score the full
// truth set; RI and NED are pairwise against the row's truth.
std::string evaluation_rows(const std::string& image_id,
                            const std::string& detector, const EdgeMap& detected,
                            const GroundTruthSet& truths, bool per_truth) {
    const Labeling det = to_labeling(detected);
    std::vector<Labeling> truth_labelings;
    truth_labelings.reserve(truths.size());
    for (std::size_t i = 0; i < truths.size(); ++i)
        truth_labelings.push_back(to_labeling(truths[i]));

    const double pri_value = pri(det, truth_labelings);
    const double npri_value = npri(det, truth_labelings);
    const GrayImage det_gray = to_gray(detected);

    const std::size_t rows_wanted = per_truth ? truths.size() : 1;
    std::string rows;
    for (std::size_t i = 0; i < rows_wanted; ++i) {
        const double ri_value = rand_index(det, truth_labelings[i]);
        const double ned_value = ned(det_gray, to_gray(truths[i]));
        rows += metric_csv_row(image_id, detector, std::to_string(i + 1),
                               ri_value, pri_value, npri_value, ned_value);
        rows += '\n';
    }
    return rows;
}

struct ManifestEntry {
    fs::path image;
    std::vector<fs::path> truths;
};

// One entry per line: image path, then one or more truth paths, comma
// separated. Relative paths resolve against the manifest's directory.
// Blank lines and lines starting with '#' are skipped.
std::vector<ManifestEntry> load_manifest(const fs::path& path) {
    std::ifstream in(path);
    if (!in)
        throw std::runtime_error("cannot open manifest '" + path.string() + "'");
    const fs::path base = path.parent_path();
    const auto resolve = [&](std::string field) {
        const auto first = field.find_first_not_of(" \t\r");
        if (first == std::string::npos) return fs::path();
        const auto last = field.find_last_not_of(" \t\r");
        field = field.substr(first, last - first + 1);
        fs::path p(field);
        return p.is_absolute() || base.empty() ? p : base / p;
    };

    std::vector<ManifestEntry> entries;
    std::string line;
    while (std::getline(in, line)) {
        if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
        if (line[line.find_first_not_of(" \t\r")] == '#') continue;
        ManifestEntry entry;
        std::stringstream fields(line);
        std::string field;
        while (std::getline(fields, field, ',')) {
            const fs::path p = resolve(field);
            if (p.empty())
                throw std::runtime_error("manifest '" + path.string() +
                                         "': empty field");
            if (entry.image.empty())
                entry.image = p;
            else
                entry.truths.push_back(p);
        }
        if (entry.truths.empty())
            throw std::runtime_error("manifest '" + path.string() +
                                     "': line needs an image and one or more "
                                     "ground truths");
        entries.push_back(std::move(entry));
    }
    return entries;
}

int cmd_detect(const fs::path& input, fs::path out,
               const DetectorParams& params,
               const std::vector<std::string>& emits) {
    const GrayImage image = load_pgm(input);
    if (out.empty()) out = default_out(input, "_edges.pgm");

    const PipelineResult result = edd_pipeline(
        image, params.bw, params.spatial, params.range, params.policy,
        params.threads);
    save_pgm(result.edges, out);

    for (const std::string& emit : emits) {
        if (emit == "density")
            save_density_pgm16(result.density, sibling_artifact(out, ".density.pgm"));
        else if (emit == "density-csv")
            write_density_csv(result.density, sibling_artifact(out, ".density.csv"));
        else if (emit == "histogram")
            write_histogram_csv(
                build_histogram(result.density, params.policy.bin_count),
                sibling_artifact(out, ".hist.csv"));
    }

    std::cout << "u=" << format_shortest(result.threshold)
              << " edges=" << result.edges.edge_count()
              << " pixels=" << result.edges.labels.size() << "\n";
    return 0;
}

int cmd_baseline(const fs::path& input, fs::path out, const std::string& op,
                 const DetectorParams& params) {
    const GrayImage image = load_pgm(input);
    if (out.empty()) out = default_out(input, "_edges.pgm");

    const EdgeMap edges = run_detector(op, image, params);
    save_pgm(edges, out);

    std::cout << "edges=" << edges.edge_count()
              << " pixels=" << edges.labels.size() << "\n";
    return 0;
}

int cmd_evaluate(const fs::path& detected_path,
                 const std::vector<fs::path>& truth_paths, fs::path out,
                 std::string image_id, const std::string& detector) {
    const EdgeMap detected = to_edge_map(load_pgm(detected_path));
    const GroundTruthSet truths = load_truths(truth_paths);
    if (detected.width != truths[0].width ||
        detected.height != truths[0].height)
        throw std::runtime_error("dimension mismatch between '" +
                                 detected_path.string() + "' and '" +
                                 truth_paths[0].string() + "'");
    if (out.empty()) out = default_out(detected_path, "_metrics.csv");
    if (image_id.empty()) image_id = detected_path.stem().string();

    std::string csv = std::string(kCsvHeader) + "\n";
    csv += evaluation_rows(image_id, detector, detected, truths, true);
    write_text_atomic(out, csv);
    return 0;
}

int cmd_bench(const fs::path& manifest_path, fs::path out,
              const std::vector<std::string>& detectors,
              const DetectorParams& params) {
    const std::vector<ManifestEntry> entries = load_manifest(manifest_path);
    if (out.empty()) out = default_out(manifest_path, "_bench.csv");

    std::string csv = std::string(kCsvHeader) + "\n";
    std::size_t data_rows = 0;
    std::size_t error_rows = 0;
    for (const ManifestEntry& entry : entries) {
        const std::string image_id = entry.image.stem().string();
        GrayImage image;
        std::optional<GroundTruthSet> truths;
        try {
            image = load_pgm(entry.image);
            truths = load_truths(entry.truths);
            if (image.width != (*truths)[0].width ||
                image.height != (*truths)[0].height)
                throw std::runtime_error("dimension mismatch for '" +
                                         entry.image.string() + "'");
        } catch (const std::exception& e) {
            truths.reset();
            std::cerr << "kde-edge: bench: " << e.what() << "\n";
        }
        for (const std::string& detector : detectors) {
            if (truths) {
                try {
                    const EdgeMap edges = run_detector(detector, image, params);
                    csv += evaluation_rows(image_id, detector, edges, *truths,
                                           false);
                    ++data_rows;
                    continue;
                } catch (const std::exception& e) {
                    std::cerr << "kde-edge: bench: " << image_id << "/"
                              << detector << ": " << e.what() << "\n";
                }
            }
            csv += image_id + "," + detector + ",error,,,,\n";
            ++error_rows;
        }
    }
    write_text_atomic(out, csv);
    std::cout << "rows=" << data_rows << " errors=" << error_rows << "\n";
    return error_rows == 0 ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Edge detection by kernel density estimation, with classical "
                 "baselines and evaluation metrics"};
    app.require_subcommand(1);

    DetectorParams params;
    std::string spatial_name = "uniform";
    std::string range_name = "gaussian";
    std::string threshold_name = "valley";

    const auto add_edd_flags = [&](CLI::App* cmd) {
        cmd->add_option("--hs", params.bw.spatial,
                        "Spatial bandwidth, pixels")
            ->capture_default_str();
        cmd->add_option("--hr", params.bw.range,
                        "Range bandwidth, gray levels")
            ->capture_default_str();
        cmd->add_option("--spatial", spatial_name, "Spatial kernel profile")
            ->check(CLI::IsMember({"uniform", "gaussian"}))
            ->capture_default_str();
        cmd->add_option("--range", range_name, "Range kernel profile")
            ->check(CLI::IsMember({"uniform", "gaussian"}))
            ->capture_default_str();
        cmd->add_option("--threshold", threshold_name,
                        "Threshold policy: valley (first strict count minimum "
                        "below the histogram mode) or fraction (beta times the "
                        "mode bin center)")
            ->check(CLI::IsMember({"valley", "fraction"}))
            ->capture_default_str();
        cmd->add_option("--beta", params.policy.beta,
                        "Fraction policy factor, in (0, 1)")
            ->capture_default_str();
        cmd->add_option("--bins", params.policy.bin_count,
                        "Density histogram bin count")
            ->capture_default_str();
        cmd->add_option("--threads", params.threads,
                        "Worker threads, 0 = hardware concurrency")
            ->capture_default_str();
    };
    const auto add_baseline_flags = [&](CLI::App* cmd) {
        cmd->add_option("--frac", params.frac,
                        "Gradient threshold, fraction of max magnitude")
            ->capture_default_str();
        cmd->add_option("--sigma", params.canny_params.sigma,
                        "Canny Gaussian smoothing std-dev")
            ->capture_default_str();
        cmd->add_option("--low", params.canny_params.low_fraction,
                        "Canny low hysteresis fraction")
            ->capture_default_str();
        cmd->add_option("--high", params.canny_params.high_fraction,
                        "Canny high hysteresis fraction")
            ->capture_default_str();
    };

    // detect
    auto* detect = app.add_subcommand(
        "detect", "Density-based edge detection on one image");
    fs::path detect_input;
    fs::path detect_out;
    std::vector<std::string> emits;
    detect->add_option("input", detect_input, "Input PGM")
        ->required()
        ->check(CLI::ExistingFile);
    detect->add_option("--out", detect_out,
                       "Edge map PGM path (default: <input>_edges.pgm)");
    add_edd_flags(detect);
    detect
        ->add_option("--emit", emits,
                     "Extra artifacts: density (16-bit PGM), density-csv, "
                     "histogram")
        ->delimiter(',')
        ->check(CLI::IsMember({"density", "density-csv", "histogram"}));

    // baseline
    auto* baseline =
        app.add_subcommand("baseline", "Classical edge detector on one image");
    fs::path baseline_input;
    fs::path baseline_out;
    std::string op;
    baseline->add_option("input", baseline_input, "Input PGM")
        ->required()
        ->check(CLI::ExistingFile);
    baseline->add_option("--op", op, "Detector")
        ->required()
        ->check(CLI::IsMember({"sobel", "prewitt", "roberts", "canny"}));
    baseline->add_option("--out", baseline_out,
                         "Edge map PGM path (default: <input>_edges.pgm)");
    add_baseline_flags(baseline);

    // evaluate
    auto* evaluate_cmd = app.add_subcommand(
        "evaluate", "Score a detected edge map against ground truths");
    fs::path eval_input;
    fs::path eval_out;
    std::vector<fs::path> truth_paths;
    std::string image_id;
    std::string detector_id = "edges";
    evaluate_cmd->add_option("detected", eval_input, "Detected edge map PGM")
        ->required()
        ->check(CLI::ExistingFile);
    evaluate_cmd->add_option("--truth", truth_paths, "Ground truth PGM (repeat)")
        ->required()
        ->check(CLI::ExistingFile);
    evaluate_cmd->add_option("--out", eval_out,
                             "Metrics CSV path (default: <detected>_metrics.csv)");
    evaluate_cmd->add_option("--image-id", image_id,
                             "CSV image id (default: detected file stem)");
    evaluate_cmd->add_option("--detector", detector_id, "CSV detector id")
        ->capture_default_str();

    // bench
    auto* bench = app.add_subcommand(
        "bench", "Run detectors over a manifest of images and score them");
    fs::path manifest_path;
    fs::path bench_out;
    std::vector<std::string> detectors = {"edd", "sobel", "prewitt", "roberts",
                                          "canny"};
    bench
        ->add_option("--manifest", manifest_path,
                     "CSV manifest: image,truth1[,truth2,...] per line, paths "
                     "relative to the manifest")
        ->required()
        ->check(CLI::ExistingFile);
    bench->add_option("--out", bench_out,
                      "Results CSV path (default: <manifest>_bench.csv)");
    bench
        ->add_option("--detectors", detectors,
                     "Detectors to run, comma separated")
        ->delimiter(',')
        ->check(CLI::IsMember({"edd", "sobel", "prewitt", "roberts", "canny"}));
    add_edd_flags(bench);
    add_baseline_flags(bench);

    CLI11_PARSE(app, argc, argv);

    try {
        params.spatial = parse_profile(spatial_name);
        params.range = parse_profile(range_name);
        params.policy.mode = parse_threshold(threshold_name);

        if (*detect) return cmd_detect(detect_input, detect_out, params, emits);
        if (*baseline) return cmd_baseline(baseline_input, baseline_out, op, params);
        if (*evaluate_cmd)
            return cmd_evaluate(eval_input, truth_paths, eval_out, image_id,
                                detector_id);
        if (*bench) return cmd_bench(manifest_path, bench_out, detectors, params);
    } catch (const std::exception& e) {
        std::cerr << "kde-edge: " << e.what() << "\n";
        return 1;
    }
    return 0;
}
