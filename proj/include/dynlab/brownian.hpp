#pragma once

#include <cstdint>
#include <random>

#include "dynlab/vec.hpp"

namespace dynlab {

// Deterministic stream of standard normals. Both the materialized
// BrownianPath and the streaming ensemble integrator draw from this exact
// sequence, so the two routes produce bit-identical increments for the same
// (seed, grid, dim).
class GaussianStream {
  public:
    explicit GaussianStream(std::uint64_t seed) : rng_(seed) {}
    double next() { return gauss_(rng_); }

  private:
    std::mt19937_64 rng_;
    std::normal_distribution<double> gauss_{0.0, 1.0};
};

// Grid of Gaussian increments: row i ~ N(0, (t_{i+1} - t_i) I_d), rows and
// coordinates independent, reproducible from (seed, grid, dim).
struct BrownianPath {
    std::uint64_t seed = 0;
    std::vector<double> grid;       // N+1 strictly increasing time points
    std::vector<double> increments; // N x dim, row-major
    int dim = 0;

    std::size_t steps() const { return grid.empty() ? 0 : grid.size() - 1; }
    std::span<const double> increment(std::size_t i) const {
        return {increments.data() + i * static_cast<std::size_t>(dim),
                static_cast<std::size_t>(dim)};
    }
};

BrownianPath sample_brownian(std::uint64_t seed, std::vector<double> grid, int dim);

// Merge groups of `factor` consecutive increments; requires a uniform grid
// and factor | N. Couples resolutions for strong-convergence studies.
BrownianPath coarsen_path(const BrownianPath& path, int factor);

// t_i = t_start + i * step for i = 0..n_steps. Throws InvalidGridError when
// step does not evenly divide the horizon.
std::vector<double> uniform_grid(double t_start, double horizon, double step);
std::size_t uniform_step_count(double horizon, double step);

bool grid_is_uniform(std::span<const double> grid, double rel_tol = 1e-9);

} // namespace dynlab
