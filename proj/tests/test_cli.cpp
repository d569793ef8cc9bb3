// End-to-end command-line checks; RRMM_BIN points at the built binary.

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <string>

#include <doctest.h>

#include "rr/csv.hpp"
#include "rr/eval.hpp"

namespace fs = std::filesystem;

namespace {

std::string binary() {
    const char* bin = std::getenv("RRMM_BIN");
    REQUIRE_MESSAGE(bin != nullptr, "RRMM_BIN must point at the rrmm binary");
    return bin;
}

int run(const std::string& args) {
    const std::string cmd = binary() + " " + args + " > /dev/null 2>&1";
    const int status = std::system(cmd.c_str());
    return WEXITSTATUS(status);
}

std::string read_file(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

struct Workspace {
    fs::path dir;
    Workspace() {
        dir = fs::temp_directory_path() / "rrmm_cli";
        fs::remove_all(dir);
        fs::create_directories(dir);
    }
    std::string path(const std::string& name) const { return (dir / name).string(); }
};

} // namespace

TEST_SUITE("cli") {

TEST_CASE("synth / estimate / eval chain") {
    Workspace ws;
    rr::csv::write_text(ws.path("spec.txt"),
                        "width=48\nheight=48\nfps=30\nduration_s=40\nnoise_sigma=0.01\n"
                        "region=8,8,32,32,gabor,0.25,1.0\n");

    CHECK(run("synth " + ws.path("spec.txt") + " --seed 7 --out " + ws.path("v.y8") +
              " --window-s 20 --rho 0.75") == 0);
    CHECK(fs::exists(ws.path("v.y8")));
    CHECK(fs::exists(ws.path("v.y8.meta")));
    CHECK(fs::exists(ws.path("v.y8.truth.csv")));

    const std::string est = "estimate " + ws.path("v.y8") + " --method phase --no-roi" +
                            " --levels 3 --window-s 20 --rho 0.75 --eta 0" +
                            " --dump-signals " + ws.path("signals.csv") + " --out ";
    CHECK(run(est + ws.path("r.csv")) == 0);
    CHECK(fs::exists(ws.path("r.csv")));
    CHECK(fs::exists(ws.path("r.csv.config"))); // resolved-config echo
    CHECK(fs::exists(ws.path("signals.csv")));
    CHECK(rr::csv::read_lines(ws.path("signals.csv")).front() == "n,t_s,m,comp,value");

    const auto rows = rr::read_estimates_csv(ws.path("r.csv"));
    CHECK(rows.size() >= 4);
    bool has_rr = false;
    for (const auto& r : rows)
        if (!r.warmup && r.rr_bpm > 14.0 && r.rr_bpm < 16.0) has_rr = true;
    CHECK(has_rr);

    // byte-identical on a second run
    CHECK(run(est + ws.path("r2.csv")) == 0);
    CHECK(read_file(ws.path("r.csv")) == read_file(ws.path("r2.csv")));

    CHECK(run("eval " + ws.path("r.csv") + " " + ws.path("v.y8.truth.csv") + " --out " +
              ws.path("report")) == 0);
    CHECK(fs::exists(ws.path("report.csv")));
    CHECK(fs::exists(ws.path("report.txt")));
    const std::string summary = read_file(ws.path("report.txt"));
    CHECK(summary.find("rmse_db=") != std::string::npos);
    CHECK(summary.find("in_band_fraction=") != std::string::npos);
}

TEST_CASE("amplitude method with genie eval") {
    Workspace ws;
    rr::csv::write_text(ws.path("spec.txt"),
                        "width=48\nheight=48\nfps=30\nduration_s=40\nnoise_sigma=0.005\n"
                        "region=8,8,32,32,gabor,0.25,1.0\n");
    CHECK(run("synth " + ws.path("spec.txt") + " --seed 3 --out " + ws.path("v.y8") +
              " --window-s 20 --rho 0.75") == 0);
    CHECK(run("estimate " + ws.path("v.y8") + " --method amplitude --no-roi --levels 3 " +
              "--window-s 20 --rho 0.75 --eta 0 --out " + ws.path("r.csv")) == 0);
    CHECK(run("eval " + ws.path("r.csv") + " " + ws.path("v.y8.truth.csv") + " --genie --out " +
              ws.path("report")) == 0);
    const std::string summary = read_file(ws.path("report.txt"));
    CHECK(summary.find("genie=1") != std::string::npos);
}

TEST_CASE("roi subcommand writes a manifest and heatmap") {
    Workspace ws;
    rr::csv::write_text(ws.path("spec.txt"),
                        "width=96\nheight=64\nfps=30\nduration_s=20\nnoise_sigma=0.003\n"
                        "region=8,16,28,28,gabor,0.25,1.5\n"
                        "region=58,16,28,28,gabor,0.25,1.5\n");
    CHECK(run("synth " + ws.path("spec.txt") + " --seed 5 --out " + ws.path("v.y8")) == 0);
    CHECK(run("roi " + ws.path("v.y8") + " --rois 2 --roi-size 21 --downsample 4 " +
              "--calib-frames 300 --out " + ws.path("rois.txt") + " --heatmap " +
              ws.path("amp.pgm")) == 0);
    CHECK(fs::exists(ws.path("rois.txt")));
    CHECK(fs::exists(ws.path("amp.pgm")));
    const auto lines = rr::csv::read_lines(ws.path("rois.txt"));
    CHECK(lines.size() == 2);

    // manifest reuse in estimate
    CHECK(run("estimate " + ws.path("v.y8") + " --method phase --levels 3 --roi-manifest " +
              ws.path("rois.txt") + " --window-s 10 --rho 0.5 --eta 0 --out " +
              ws.path("r.csv")) == 0);
}

TEST_CASE("error paths exit with code 1") {
    Workspace ws;
    CHECK(run("estimate " + ws.path("missing.y8") + " --out " + ws.path("r.csv")) == 1);

    rr::csv::write_text(ws.path("bad_spec.txt"), "width=8\n");
    CHECK(run("synth " + ws.path("bad_spec.txt") + " --out " + ws.path("v.y8")) == 1);

    rr::csv::write_text(ws.path("spec.txt"),
                        "width=32\nheight=32\nfps=30\nduration_s=12\nnoise_sigma=0.01\n"
                        "region=4,4,24,24,gabor,0.25,1.0\n");
    CHECK(run("synth " + ws.path("spec.txt") + " --window-s 10 --out " + ws.path("v.y8")) == 0);
    // ROI box larger than the frame
    CHECK(run("estimate " + ws.path("v.y8") + " --roi-size 41 --window-s 10 --out " +
              ws.path("r.csv")) == 1);
    // bad flag
    CHECK(run("estimate " + ws.path("v.y8") + " --definitely-not-a-flag 1") != 0);
    // a zero gate threshold trips on every window: exit code 2
    CHECK(run("estimate " + ws.path("v.y8") + " --levels 3 --rois 1 --roi-size 15 " +
              "--window-s 10 --gamma-bin 0.0001 --gamma-th 0 --eta 0 --out " +
              ws.path("gated.csv")) == 2);
}

}
