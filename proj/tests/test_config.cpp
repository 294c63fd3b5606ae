#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include <json.hpp>

#include "chiralgate/experiment.hpp"

using nlohmann::json;
using namespace chiralgate::experiment;
namespace fs = std::filesystem;

namespace {

struct TempDir {
    fs::path path;
    explicit TempDir(const std::string& tag) {
        path = fs::temp_directory_path() / ("chiralgate_" + tag);
        fs::remove_all(path);
        fs::create_directories(path);
    }
    ~TempDir() { fs::remove_all(path); }
};

RunOptions options_for(const TempDir& dir) {
    RunOptions opt;
    opt.out_dir = dir.path.string();
    opt.timestamp = false;
    return opt;
}

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

json tiny_map_config() {
    return json{{"experiment", "two-photon-map"},
                {"method", "both"},
                {"chain", {{"n_emitters", 1}}},
                {"pulse", {{"width", 0.2}}},
                {"map", {{"points", 33}, {"span_sigmas", 4.0}}}};
}

}  // namespace

TEST_CASE("overrides follow dotted paths and parse JSON values") {
    json config = json::object();
    apply_override(config, "chain.n_emitters", "8");
    apply_override(config, "method", "exact");
    apply_override(config, "pulse.width", "0.25");
    apply_override(config, "disorder.position_jitter", "true");
    CHECK(config["chain"]["n_emitters"] == 8);
    CHECK(config["method"] == "exact");
    CHECK(config["pulse"]["width"] == 0.25);
    CHECK(config["disorder"]["position_jitter"] == true);
}

TEST_CASE("config errors name the offending field") {
    TempDir dir("cfg_errors");
    const auto opt = options_for(dir);

    auto expect_error = [&](json config, const std::string& needle) {
        const auto report = run_experiment(std::move(config), opt);
        CHECK(report.exit_code == 2);
        INFO(report.error);
        CHECK(report.error.find(needle) != std::string::npos);
        CHECK(fs::is_empty(dir.path));
    };

    expect_error(json{{"experiment", "no-such-thing"}}, "config.experiment");
    expect_error(json{{"experiment", "two-photon-map"}, {"chian", json::object()}},
                 "config.chian");
    expect_error(json{{"experiment", "fidelity-vs-width"}}, "config.width");
    expect_error(json{{"experiment", "delay-sweep"}, {"method", "analytic"}},
                 "config.method");
    expect_error(json{{"experiment", "two-photon-map"},
                      {"chain", {{"gamma_b", 0.1}, {"gamma_b_tot", 0.1}}}},
                 "config.chain");
    expect_error(json{{"experiment", "two-photon-map"},
                      {"chain", {{"n_emitters", 0}}}},
                 "n_emitters");
    expect_error(json{{"experiment", "two-photon-map"}, {"pulse", {{"width", "x"}}}},
                 "config.pulse.width");
    expect_error(json{{"experiment", "phase-sweep"},
                      {"alpha_over_pi", {{"min", 0.2}, {"max", 1.0}}}},
                 "alpha_over_pi.points");
}

TEST_CASE("a small map experiment runs end to end") {
    TempDir dir("map_run");
    const auto report = run_experiment(tiny_map_config(), options_for(dir));
    REQUIRE(report.exit_code == 0);
    REQUIRE(report.files_written.size() == 3);  // exact, analytic, summary

    const fs::path exact_csv = dir.path / "two_photon_map_exact.csv";
    REQUIRE(fs::exists(exact_csv));
    const std::string content = slurp(exact_csv);
    CHECK(content.rfind("# chiralgate ", 0) == 0);
    CHECK(content.find("# config: {") != std::string::npos);
    CHECK(content.find("omega1,omega2,re,im") != std::string::npos);
    // 4 comment lines + 1 header + 33*33 rows
    CHECK(std::count(content.begin(), content.end(), '\n') == 4 + 1 + 33 * 33);

    const json summary = json::parse(slurp(dir.path / "two_photon_map_summary.json"));
    CHECK(summary["experiment"] == "two-photon-map");
    CHECK(summary["results"].contains("map_difference_rel_l2"));
    CHECK(summary["results"]["norm_exact"].get<double>() <
          summary["results"]["input_norm"].get<double>());
}

TEST_CASE("reruns without timestamps are byte identical") {
    TempDir a("rerun_a"), b("rerun_b");
    const auto ra = run_experiment(tiny_map_config(), options_for(a));
    const auto rb = run_experiment(tiny_map_config(), options_for(b));
    REQUIRE(ra.exit_code == 0);
    REQUIRE(rb.exit_code == 0);
    for (const char* name :
         {"two_photon_map_exact.csv", "two_photon_map_analytic.csv",
          "two_photon_map_summary.json"}) {
        CHECK(slurp(a.path / name) == slurp(b.path / name));
    }
}

TEST_CASE("seed flows from the command line into outputs") {
    TempDir dir("seeded");
    auto opt = options_for(dir);
    opt.seed_override = 7;
    const auto report = run_experiment(tiny_map_config(), opt);
    REQUIRE(report.exit_code == 0);
    CHECK(report.summary["seed"] == 7);
    CHECK(slurp(dir.path / "two_photon_map_exact.csv").find("# seed: 7") !=
          std::string::npos);
}

TEST_CASE("numeric failures remove partial outputs") {
    TempDir dir("numeric");
    json config{{"experiment", "fidelity-vs-width"},
                {"method", "analytic"},
                {"width", {0.05}},
                {"grid", {{"points", 9}}}};
    const auto report = run_experiment(config, options_for(dir));
    CHECK(report.exit_code == 3);
    CHECK_FALSE(report.error.empty());
    CHECK(fs::is_empty(dir.path));
}

TEST_CASE("spectrum config round trip through a file") {
    TempDir dir("file_cfg");
    const fs::path cfg = dir.path / "cfg.json";
    {
        std::ofstream out(cfg);
        out << R"({"experiment": "single-photon-spectrum",
                   "spectrum": {"min": -1.0, "max": 1.0, "points": 11}})";
    }
    auto opt = options_for(dir);
    const auto report = run_config_file(cfg.string(), opt);
    REQUIRE(report.exit_code == 0);
    // default single emitter transmits through a perfect dip: t(0) = -1
    CHECK(report.summary["results"]["t_right_at_zero"]["re"].get<double>() ==
          doctest::Approx(-1.0));
    CHECK(report.summary["results"]["t_right_at_zero"]["abs"].get<double>() ==
          doctest::Approx(1.0));

    const auto missing = run_config_file((dir.path / "nope.json").string(), opt);
    CHECK(missing.exit_code == 2);

    const fs::path broken = dir.path / "broken.json";
    { std::ofstream out(broken); out << "{nope"; }
    CHECK(run_config_file(broken.string(), opt).exit_code == 2);
}
