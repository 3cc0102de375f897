#pragma once

#include <cstdint>

#include "dynlab/metrics.hpp"

namespace dynlab {

struct MetricStats {
    std::vector<double> mean, sd, ci_lo, ci_hi;
};

// Cross-seed statistics on a shared grid. Paths integrate with seeds
// base_seed + 0 .. base_seed + n_paths - 1; divergent paths are excluded and
// listed. Aggregation runs in seed order, so the result is independent of
// worker scheduling.
struct EnsembleStats {
    int n_paths = 0;
    std::vector<std::uint64_t> seeds;
    std::vector<std::uint64_t> diverged_seeds;
    std::vector<double> grid; // strided
    std::map<std::string, MetricStats> metrics;
    bool ci_defined = false; // needs >= 2 effective paths

    const MetricStats& at(const std::string& name) const { return metrics.at(name); }
};

// Streaming Euler-Maruyama ensemble: increments are drawn per step from the
// same Gaussian sequence sample_brownian would materialize, so paths never
// hold the full increment array. Throws EnsembleFailureError when more than
// 10% of paths diverge. DYNLAB_THREADS caps worker count (0/unset = auto).
EnsembleStats run_ensemble(const SystemSpec& spec, int n_paths,
                           std::uint64_t base_seed, double step,
                           std::size_t stride = 1);

// Zero-mean check of the discrete noise integral
//   N = sum_i < eta (Y_i - y*) + X_i, sigma(t_i) dW_i >
// accumulated along shbf paths; passes iff |mean| <= 3 stderr across seeds.
struct MartingaleReport {
    int n_paths = 0;
    double mean = 0.0;
    double stderr_mean = 0.0;
    bool pass = false;
    std::vector<std::uint64_t> diverged_seeds;
};

MartingaleReport martingale_mean_check(const SystemSpec& spec, int n_paths,
                                       std::uint64_t base_seed, double step,
                                       double eta, const Vec& y_star);

int resolve_thread_count();

// Single streaming path: metrics on the strided grid, identical in value to
// integrate_em + compute_metrics on the materialized path with the same seed.
struct PathRun {
    MetricSeries metrics;
    std::vector<double> states; // strided x 2*dim when requested, else empty
    bool diverged = false;
    std::size_t divergence_index = 0;
    double martingale_end = 0.0;
};

struct MartingaleProbe {
    double eta = 0.0;
    Vec y_star;
};

PathRun run_path(const SystemSpec& spec, std::uint64_t seed, double step,
                 std::size_t stride, const MartingaleProbe* probe = nullptr,
                 bool record_states = false);

} // namespace dynlab
