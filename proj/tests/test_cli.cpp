#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <sys/wait.h>

#include <cmath>
#include <cstdlib>
#include <initializer_list>
#include <string>
#include <vector>

#include "doctest.h"
#include "kde_edge/baselines.hpp"
#include "kde_edge/image.hpp"
#include "kde_edge/kde.hpp"
#include "kde_edge/metrics.hpp"
#include "kde_edge/pgm.hpp"
#include "kde_edge/threshold.hpp"
#include "test_util.hpp"

using namespace kde_edge;
namespace fs = std::filesystem;

namespace {

struct RunResult {
    int status = -1;
    std::string out;
    std::string err;
};

std::string quoted(const fs::path& p) { return "\"" + p.string() + "\""; }

RunResult run_cli(const std::string& args, const fs::path& dir) {
    const fs::path out_file = dir / "stdout.txt";
    const fs::path err_file = dir / "stderr.txt";
    const std::string cmd = std::string(KDE_EDGE_CLI_PATH) + " " + args +
                            " > " + quoted(out_file) + " 2> " +
                            quoted(err_file);
    const int raw = std::system(cmd.c_str());
    RunResult r;
    r.status = (raw != -1 && WIFEXITED(raw)) ? WEXITSTATUS(raw) : -1;
    r.out = testing_util::read_file(out_file);
    r.err = testing_util::read_file(err_file);
    return r;
}

GrayImage step8() { return make_step(8, 8, 0, 255, 4); }

EdgeMap columns_map(int width, int height, std::initializer_list<int> cols) {
    EdgeMap m{width, height, std::vector<std::uint8_t>(
                                 static_cast<std::size_t>(width) * height, 0)};
    for (int y = 0; y < height; ++y)
        for (int c : cols) m.set(c, y, true);
    return m;
}

PipelineResult default_pipeline(const GrayImage& image) {
    return edd_pipeline(image, Bandwidths{}, KernelProfile::Uniform,
                        KernelProfile::Gaussian, ThresholdPolicy{});
}

}  // namespace

TEST_CASE("detect writes the edge map and prints the run summary") {
    const fs::path dir = testing_util::fresh_dir("kde_edge_cli_detect");
    save_pgm(step8(), dir / "step8.pgm");

    const RunResult r =
        run_cli("detect " + quoted(dir / "step8.pgm") + " --out " +
                quoted(dir / "edges.pgm"),
                dir);
    CHECK(r.status == 0);
    CHECK(r.out == "u=0.8982421875000001 edges=16 pixels=64\n");
    CHECK(r.err.empty());

    const EdgeMap written = to_edge_map(load_pgm(dir / "edges.pgm"));
    const EdgeMap expected = default_pipeline(step8()).edges;
    CHECK(written.labels == expected.labels);
    CHECK(written.labels == columns_map(8, 8, {3, 4}).labels);
}

TEST_CASE("detect defaults the output path next to the input") {
    const fs::path dir = testing_util::fresh_dir("kde_edge_cli_defaultout");
    save_pgm(step8(), dir / "step8.pgm");

    const RunResult r = run_cli("detect " + quoted(dir / "step8.pgm"), dir);
    CHECK(r.status == 0);
    CHECK(fs::exists(dir / "step8_edges.pgm"));
}

TEST_CASE("detect artifacts are byte-stable and parse back exactly") {
    const fs::path dir = testing_util::fresh_dir("kde_edge_cli_artifacts");
    save_pgm(step8(), dir / "step8.pgm");

    const std::string emit = " --emit density,density-csv,histogram";
    const RunResult a =
        run_cli("detect " + quoted(dir / "step8.pgm") + " --out " +
                quoted(dir / "a" / "edges.pgm") + emit,
                dir);
    const RunResult b =
        run_cli("detect " + quoted(dir / "step8.pgm") + " --out " +
                quoted(dir / "b" / "edges.pgm") + emit + " --threads 3",
                dir);
    REQUIRE(a.status == 0);
    REQUIRE(b.status == 0);
    CHECK(a.out == b.out);

    for (const char* name :
         {"edges.pgm", "edges.density.pgm", "edges.density.csv",
          "edges.hist.csv"}) {
        CAPTURE(name);
        const std::string first = testing_util::read_file(dir / "a" / name);
        CHECK(!first.empty());
        CHECK(first == testing_util::read_file(dir / "b" / name));
    }

    const DensityImage density = default_pipeline(step8()).density;

    // CSV values round-trip to the exact doubles the library computed.
    const std::string csv =
        testing_util::read_file(dir / "a" / "edges.density.csv");
    std::vector<double> parsed;
    const char* p = csv.c_str();
    while (*p) {
        char* end = nullptr;
        parsed.push_back(std::strtod(p, &end));
        REQUIRE(end != p);
        p = end;
        while (*p == ',' || *p == '\n') ++p;
    }
    REQUIRE(parsed.size() == density.values.size());
    for (std::size_t i = 0; i < parsed.size(); ++i) {
        CAPTURE(i);
        CHECK(parsed[i] == density.values[i]);
    }

    const Gray16 quantized = load_pgm16(dir / "a" / "edges.density.pgm");
    REQUIRE(quantized.samples.size() == density.values.size());
    for (std::size_t i = 0; i < quantized.samples.size(); ++i)
        CHECK(quantized.samples[i] ==
              static_cast<std::uint16_t>(std::lround(density.values[i] * 65535.0)));

    const std::string hist =
        testing_util::read_file(dir / "a" / "edges.hist.csv");
    CHECK(hist.rfind("bin_center,count\n", 0) == 0);
}

TEST_CASE("baseline runs the named operator and reports the count") {
    const fs::path dir = testing_util::fresh_dir("kde_edge_cli_baseline");
    save_pgm(step8(), dir / "step8.pgm");

    const RunResult sobel =
        run_cli("baseline " + quoted(dir / "step8.pgm") + " --op sobel" +
                " --frac 0.5 --out " + quoted(dir / "sobel.pgm"),
                dir);
    CHECK(sobel.status == 0);
    CHECK(sobel.out == "edges=16 pixels=64\n");
    CHECK(to_edge_map(load_pgm(dir / "sobel.pgm")).labels ==
          gradient_detector(step8(), GradientOperator::Sobel, 0.5).labels);

    const EdgeMap canny_expected = canny(step8(), CannyParams{});
    const RunResult canny_run =
        run_cli("baseline " + quoted(dir / "step8.pgm") + " --op canny" +
                " --out " + quoted(dir / "canny.pgm"),
                dir);
    CHECK(canny_run.status == 0);
    CHECK(canny_run.out == "edges=" +
                               std::to_string(canny_expected.edge_count()) +
                               " pixels=64\n");
    CHECK(to_edge_map(load_pgm(dir / "canny.pgm")).labels ==
          canny_expected.labels);
}

TEST_CASE("baseline rejects an unknown operator") {
    const fs::path dir = testing_util::fresh_dir("kde_edge_cli_badop");
    save_pgm(step8(), dir / "step8.pgm");

    const RunResult r = run_cli(
        "baseline " + quoted(dir / "step8.pgm") + " --op laplace", dir);
    CHECK(r.status != 0);
    CHECK(!r.err.empty());
}

TEST_CASE("evaluate emits one row per ground truth") {
    const fs::path dir = testing_util::fresh_dir("kde_edge_cli_evaluate");
    const EdgeMap detected = columns_map(8, 8, {3, 4});
    const EdgeMap truth2 = columns_map(8, 8, {2, 3});
    save_pgm(detected, dir / "edges.pgm");
    save_pgm(truth2, dir / "truth2.pgm");

    const RunResult r = run_cli(
        "evaluate " + quoted(dir / "edges.pgm") + " --truth " +
            quoted(dir / "edges.pgm") + " --truth " +
            quoted(dir / "truth2.pgm") + " --out " + quoted(dir / "m.csv") +
            " --image-id step8 --detector edd",
        dir);
    CHECK(r.status == 0);

    const Labeling det = to_labeling(detected);
    const std::vector<Labeling> truths = {to_labeling(detected),
                                          to_labeling(truth2)};
    const double pri_value = pri(det, truths);
    const double npri_value = npri(det, truths);
    std::string expected = "image-id,detector,truth-id,ri,pri,npri,ned\n";
    expected += metric_csv_row("step8", "edd", "1", rand_index(det, truths[0]),
                               pri_value, npri_value,
                               ned(to_gray(detected), to_gray(detected))) +
                "\n";
    expected += metric_csv_row("step8", "edd", "2", rand_index(det, truths[1]),
                               pri_value, npri_value,
                               ned(to_gray(detected), to_gray(truth2))) +
                "\n";
    CHECK(testing_util::read_file(dir / "m.csv") == expected);
}

TEST_CASE("evaluate fills id defaults from the detected file") {
    const fs::path dir = testing_util::fresh_dir("kde_edge_cli_evaldefault");
    save_pgm(columns_map(8, 8, {3, 4}), dir / "edges.pgm");

    const RunResult r = run_cli("evaluate " + quoted(dir / "edges.pgm") +
                                    " --truth " + quoted(dir / "edges.pgm"),
                                dir);
    CHECK(r.status == 0);
    const std::string csv = testing_util::read_file(dir / "edges_metrics.csv");
    CHECK(csv ==
          "image-id,detector,truth-id,ri,pri,npri,ned\n"
          "edges,edges,1,1.000000,1.000000,1.000000,0.000000\n");
}

TEST_CASE("evaluate reports missing files and dimension mismatches") {
    const fs::path dir = testing_util::fresh_dir("kde_edge_cli_evalerrors");
    save_pgm(columns_map(8, 8, {3, 4}), dir / "edges.pgm");
    save_pgm(columns_map(4, 4, {1}), dir / "small.pgm");

    const RunResult missing =
        run_cli("evaluate " + quoted(dir / "edges.pgm") + " --truth " +
                    quoted(dir / "nope.pgm"),
                dir);
    CHECK(missing.status != 0);
    CHECK(!missing.err.empty());

    const RunResult mismatch =
        run_cli("evaluate " + quoted(dir / "edges.pgm") + " --truth " +
                    quoted(dir / "small.pgm"),
                dir);
    CHECK(mismatch.status == 1);
    CHECK(mismatch.err.find("kde-edge:") != std::string::npos);
    CHECK(mismatch.err.find("dimension mismatch") != std::string::npos);
}

TEST_CASE("bench scores every manifest entry with every detector") {
    const fs::path dir = testing_util::fresh_dir("kde_edge_cli_bench");
    save_pgm(step8(), dir / "step8.pgm");
    save_pgm(make_step(8, 8, 0, 200, 5), dir / "step5.pgm");
    save_pgm(columns_map(8, 8, {3, 4}), dir / "t1.pgm");
    testing_util::write_file(dir / "manifest.csv",
                             "# image, then ground truths\n"
                             "step8.pgm, t1.pgm\n"
                             "\n"
                             "step5.pgm, t1.pgm\n");

    const RunResult r =
        run_cli("bench --manifest " + quoted(dir / "manifest.csv") +
                    " --out " + quoted(dir / "bench.csv"),
                dir);
    CHECK(r.status == 0);
    CHECK(r.out == "rows=10 errors=0\n");

    const std::string csv = testing_util::read_file(dir / "bench.csv");
    std::vector<std::string> lines;
    std::size_t start = 0;
    while (start < csv.size()) {
        const std::size_t nl = csv.find('\n', start);
        if (nl == std::string::npos) {
            lines.push_back(csv.substr(start));
            break;
        }
        lines.push_back(csv.substr(start, nl - start));
        start = nl + 1;
    }
    REQUIRE(lines.size() == 11);
    CHECK(lines[0] == "image-id,detector,truth-id,ri,pri,npri,ned");
    const std::vector<std::string> detectors = {"edd", "sobel", "prewitt",
                                                "roberts", "canny"};
    for (std::size_t i = 1; i < lines.size(); ++i) {
        CAPTURE(lines[i]);
        const std::string image = i <= 5 ? "step8" : "step5";
        const std::string detector = detectors[(i - 1) % 5];
        CHECK(lines[i].rfind(image + "," + detector + ",1,", 0) == 0);
    }

    const RunResult again =
        run_cli("bench --manifest " + quoted(dir / "manifest.csv") +
                    " --out " + quoted(dir / "bench2.csv"),
                dir);
    CHECK(again.status == 0);
    CHECK(testing_util::read_file(dir / "bench2.csv") == csv);

    const RunResult subset =
        run_cli("bench --manifest " + quoted(dir / "manifest.csv") +
                    " --detectors sobel,roberts --out " +
                    quoted(dir / "sub.csv"),
                dir);
    CHECK(subset.status == 0);
    CHECK(subset.out == "rows=4 errors=0\n");
}

TEST_CASE("bench keeps going after a broken entry and exits nonzero") {
    const fs::path dir = testing_util::fresh_dir("kde_edge_cli_bencherr");
    save_pgm(step8(), dir / "step8.pgm");
    save_pgm(columns_map(8, 8, {3, 4}), dir / "t1.pgm");
    testing_util::write_file(dir / "manifest.csv",
                             "step8.pgm,t1.pgm\n"
                             "missing.pgm,t1.pgm\n");

    const RunResult r =
        run_cli("bench --manifest " + quoted(dir / "manifest.csv") +
                    " --out " + quoted(dir / "bench.csv"),
                dir);
    CHECK(r.status == 1);
    CHECK(r.out == "rows=5 errors=5\n");
    CHECK(!r.err.empty());

    const std::string csv = testing_util::read_file(dir / "bench.csv");
    CHECK(csv.find("missing,edd,error,,,,\n") != std::string::npos);
    CHECK(csv.find("missing,canny,error,,,,\n") != std::string::npos);
}

TEST_CASE("a missing input file fails before any work") {
    const fs::path dir = testing_util::fresh_dir("kde_edge_cli_noinput");
    const RunResult r = run_cli("detect " + quoted(dir / "absent.pgm"), dir);
    CHECK(r.status != 0);
    CHECK(!r.err.empty());
}
