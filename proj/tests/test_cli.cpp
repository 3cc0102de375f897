#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include "dynlab/io.hpp"
#include "dynlab/runner.hpp"

using namespace dynlab;
namespace fs = std::filesystem;

namespace {

const char* kShbfConfig = R"json({
  "problem": {"name": "quadratic", "spectrum": [1.0, 4.0], "minimizer": [0.0, 0.0]},
  "system": {
    "variant": "shbf", "lambda": 1.0,
    "b": {"family": "power", "coeff": 1.0, "exponent": 2.0},
    "t_start": 4.0, "horizon": 8.0,
    "initial_position": [1.0, -1.0], "initial_companion": [0.0, 0.0]
  },
  "diffusion": {"multiplier": {"family": "power", "coeff": 0.5, "exponent": -1.1}},
  "integrator": {"step": 0.001, "stride": 10},
  "seeds": {"base": 42, "count": 8},
  "fits": [{"metric": "suboptimality", "statistic": "mean",
            "window": [6.0, 12.0], "target": 0.0, "tolerance": 0.5}]
})json";

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

fs::path fresh_dir(const std::string& name) {
    const fs::path dir = fs::temp_directory_path() / "dynlab_test" / name;
    fs::remove_all(dir);
    fs::create_directories(dir);
    return dir;
}

} // namespace

TEST_CASE("parse_config accepts a minimal shbf experiment") {
    const auto result = parse_config(kShbfConfig);
    REQUIRE(result.ok());
    CHECK(result.config->system->variant == SystemVariant::shbf);
    CHECK(result.config->step == 0.001);
    CHECK(result.config->stride == 10);
    CHECK(result.config->seed_count == 8);
    CHECK(result.config->fits.size() == 1);
    CHECK(result.config->warnings.empty());

    const auto spec = result.config->build_system();
    CHECK(spec.variant == SystemVariant::shbf);
    CHECK(spec.b->value(2.0) == 4.0);
}

TEST_CASE("parse_config reports schema errors with JSON paths") {
    // negative step
    std::string bad = kShbfConfig;
    bad.replace(bad.find("0.001"), 5, "-0.01"); // step
    const auto result = parse_config(bad);
    CHECK_FALSE(result.ok());
    bool found = false;
    for (const auto& issue : result.errors)
        found = found || issue.path == ".integrator.step";
    CHECK(found);

    // unknown field
    const auto unknown = parse_config(R"json({
      "problem": {"name": "rotation", "frobnicate": 1},
      "integrator": {"step": 0.1}
    })json");
    CHECK_FALSE(unknown.ok());
    bool found_unknown = false;
    for (const auto& issue : unknown.errors)
        found_unknown = found_unknown || (issue.path == ".problem.frobnicate" &&
                                          issue.message == "unknown field");
    CHECK(found_unknown);

    // missing required field
    const auto missing = parse_config(R"json({"problem": {"name": "rotation"}})json");
    CHECK_FALSE(missing.ok());
    bool found_missing = false;
    for (const auto& issue : missing.errors)
        found_missing = found_missing || issue.path == ".integrator";
    CHECK(found_missing);

    // malformed JSON
    CHECK_FALSE(parse_config("{ not json").ok());
}

TEST_CASE("alpha at the rate threshold parses with a warning") {
    const auto result = parse_config(R"json({
      "problem": {"name": "rotation"},
      "system": {
        "variant": "sfogda_alt", "alpha": 2.0, "beta": 1.0,
        "t_start": 1.0, "horizon": 9.0,
        "initial_position": [1.0, 0.0], "initial_companion": [0.0, 0.0]
      },
      "integrator": {"step": 0.001}
    })json");
    REQUIRE(result.ok());
    REQUIRE(result.config->warnings.size() == 1);
    const auto spec = result.config->build_system();
    CHECK(spec.warnings.size() == 1);
}

TEST_CASE("validate command writes verdicts and exit status") {
    const auto result = parse_config(kShbfConfig);
    REQUIRE(result.ok());
    const auto dir = fresh_dir("validate");
    const auto outcome = run_experiment(*result.config, Command::validate, dir);
    CHECK(outcome.exit_code == 0);
    const std::string doc = slurp(dir / "validate.json");
    CHECK(doc.find("\"pass\": true") != std::string::npos);
    CHECK(doc.find("shbf_friction_dominates_b") != std::string::npos);

    // failing gate: savd with alpha = 2.5
    const auto savd = parse_config(R"json({
      "problem": {"name": "quadratic", "spectrum": [1.0], "minimizer": [0.0]},
      "system": {"variant": "savd", "alpha": 2.5, "t_start": 1.0, "horizon": 9.0,
                 "initial_position": [1.0], "initial_companion": [0.0]},
      "integrator": {"step": 0.001}
    })json");
    REQUIRE(savd.ok());
    CHECK(savd.config->warnings.size() == 1);
    const auto dir2 = fresh_dir("validate_fail");
    const auto outcome2 = run_experiment(*savd.config, Command::validate, dir2);
    CHECK(outcome2.exit_code == 1);
}

TEST_CASE("simulate from the solution writes all-zero metrics") {
    const auto result = parse_config(R"json({
      "problem": {"name": "quadratic", "spectrum": [1.0, 4.0], "minimizer": [0.5, -0.5]},
      "system": {
        "variant": "shbf", "lambda": 1.0,
        "b": {"family": "constant", "coeff": 1.0},
        "t_start": 0.0, "horizon": 1.0,
        "initial_position": [0.5, -0.5], "initial_companion": [0.0, 0.0]
      },
      "integrator": {"step": 0.01},
      "seeds": {"base": 1, "count": 1}
    })json");
    REQUIRE(result.ok());
    const auto dir = fresh_dir("simulate_zero");
    const auto outcome = run_experiment(*result.config, Command::simulate, dir);
    CHECK(outcome.exit_code == 0);
    const auto series = read_metrics_csv(dir / "metrics.csv");
    for (const auto& [name, values] : series.values)
        for (double v : values) CHECK(v == 0.0);
    CHECK(slurp(dir / "trajectory.csv").substr(0, 14) == "t,y_1,y_2,c_1,");
}

TEST_CASE("artifacts are byte-identical across re-runs") {
    const auto result = parse_config(kShbfConfig);
    REQUIRE(result.ok());
    const auto dir_a = fresh_dir("repro_a");
    const auto dir_b = fresh_dir("repro_b");
    CHECK(run_experiment(*result.config, Command::simulate, dir_a).exit_code == 0);
    CHECK(run_experiment(*result.config, Command::simulate, dir_b).exit_code == 0);
    CHECK(slurp(dir_a / "trajectory.csv") == slurp(dir_b / "trajectory.csv"));
    CHECK(slurp(dir_a / "metrics.csv") == slurp(dir_b / "metrics.csv"));

    CHECK(run_experiment(*result.config, Command::ensemble, dir_a).exit_code == 0);
    CHECK(run_experiment(*result.config, Command::ensemble, dir_b).exit_code == 0);
    CHECK(slurp(dir_a / "ensemble.csv") == slurp(dir_b / "ensemble.csv"));
    CHECK(slurp(dir_a / "ratefit.json") == slurp(dir_b / "ratefit.json"));

    // a different seed offset changes stochastic artifacts
    const auto dir_c = fresh_dir("repro_c");
    CHECK(run_experiment(*result.config, Command::simulate, dir_c, 1).exit_code == 0);
    CHECK(slurp(dir_a / "trajectory.csv") != slurp(dir_c / "trajectory.csv"));
}

TEST_CASE("rates command fits existing CSV artifacts") {
    const auto result = parse_config(kShbfConfig);
    REQUIRE(result.ok());
    const auto dir = fresh_dir("rates");
    REQUIRE(run_experiment(*result.config, Command::ensemble, dir).exit_code == 0);

    auto cfg = *result.config;
    cfg.fits[0].statistic = "mean";
    const auto outcome = run_experiment(cfg, Command::rates, dir);
    CHECK(outcome.exit_code == 0);
    const std::string doc = slurp(dir / "ratefit.json");
    CHECK(doc.find("\"metric\": \"suboptimality\"") != std::string::npos);
}

TEST_CASE("equivalence command produces a passing report") {
    const auto result = parse_config(R"json({
      "problem": {"name": "quadratic", "spectrum": [1.0, 4.0], "minimizer": [0.0, 0.0]},
      "integrator": {"step": 0.001},
      "seeds": {"base": 7, "count": 1},
      "equivalence": {
        "kind": "opt", "alpha": 4.0, "t0": 0.0, "s0": 1.0,
        "s_horizon": 19.0, "base_step": 0.001,
        "initial_position": [1.0, -0.5], "initial_companion": [0.0, 0.0]
      }
    })json");
    REQUIRE(result.ok());
    const auto dir = fresh_dir("equivalence");
    const auto outcome = run_experiment(*result.config, Command::equivalence, dir);
    CHECK(outcome.exit_code == 0);
    const std::string doc = slurp(dir / "equivalence.json");
    CHECK(doc.find("\"pass\": true") != std::string::npos);
    CHECK(fs::exists(dir / "equivalence_errors.csv"));
}

TEST_CASE("execution errors leave a .failed marker") {
    const auto result = parse_config(R"json({
      "problem": {"name": "quadratic", "spectrum": [100.0], "minimizer": [0.0]},
      "system": {"variant": "shbf", "lambda": 1.0,
                 "b": {"family": "constant", "coeff": 1000.0},
                 "t_start": 0.0, "horizon": 50.0,
                 "initial_position": [1.0], "initial_companion": [0.0]},
      "integrator": {"step": 1.0},
      "seeds": {"base": 1, "count": 1}
    })json");
    REQUIRE(result.ok());
    const auto dir = fresh_dir("failed");
    const auto outcome = run_experiment(*result.config, Command::simulate, dir);
    CHECK(outcome.exit_code == 3);
    CHECK(fs::exists(dir / "simulate.failed"));
}
