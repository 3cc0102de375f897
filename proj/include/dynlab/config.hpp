#pragma once

#include <optional>
#include <string>
#include <vector>

#include "dynlab/rescale.hpp"

namespace dynlab {

struct ScheduleConfig {
    ScheduleFamily family{};
    double coeff = 1.0;
    double shape = 0.0; // exponent (power families) / rate (exponential)
    std::optional<double> domain_start;

    ScalarSchedule build(double default_start) const;
};

struct ProblemConfig {
    std::string name; // quadratic | rotation | saddle | quadratic_gradient
    Vec spectrum;
    Vec minimizer;
    Mat coupling;

    Problem build() const;
};

struct SystemConfig {
    SystemVariant variant{};
    double lambda = 0.0;
    double alpha = 0.0;
    double beta = 0.0;
    std::optional<ScheduleConfig> b, mu, gamma;
    double t_start = 0.0;
    double horizon = 0.0;
    Vec initial_position;
    Vec initial_companion;
};

struct DiffusionConfig {
    std::optional<ScheduleConfig> multiplier; // absent = zero
    std::optional<Mat> op;

    DiffusionSchedule build(double default_start) const;
};

struct FitConfig {
    std::string metric;
    std::string statistic = "path"; // path | mean
    double window_lo = 0.0;
    double window_hi = 0.0;
    double target = 0.0;
    double tolerance = 0.0;
};

struct EquivalenceConfig {
    TimeMapKind kind{};
    double alpha = 0.0;
    double beta = 1.0; // op kind
    double t0 = 0.0;
    double s0 = 1.0;
    double s_horizon = 0.0;
    double base_step = 0.0;
    int levels = 1; // step-halvings for the stochastic study
    bool stochastic = false;
    double position_tolerance = 1e-6; // deterministic verdict
    double min_slope = 0.4;           // stochastic verdict
    Vec initial_position;
    Vec initial_companion;
};

struct ExperimentConfig {
    ProblemConfig problem;
    std::optional<SystemConfig> system;
    DiffusionConfig diffusion;
    double step = 0.0;
    std::size_t stride = 1;
    std::uint64_t seed_base = 0;
    int seed_count = 1;
    std::vector<FitConfig> fits;
    std::optional<EquivalenceConfig> equivalence;
    std::string output_directory;
    std::vector<std::string> warnings;

    // Builders resolve the config into runnable objects; system() requires
    // the system section, equivalence_pair() the equivalence section.
    SystemSpec build_system() const;
    EquivalencePair build_equivalence_pair() const;
};

struct SchemaIssue {
    std::string path; // JSON pointer-ish, e.g. ".integrator.step"
    std::string message;
};

struct ParseResult {
    std::optional<ExperimentConfig> config;
    std::vector<SchemaIssue> errors;

    bool ok() const { return config.has_value(); }
};

// Validates the JSON text against the experiment schema: unknown fields,
// missing required fields and out-of-range values are reported with their
// JSON paths. A valid config may still carry warnings (e.g. alpha at or
// below the rate-guarantee thresholds).
ParseResult parse_config(const std::string& text);

} // namespace dynlab
