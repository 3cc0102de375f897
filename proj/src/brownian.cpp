#include "dynlab/brownian.hpp"

#include <cmath>
#include <limits>

namespace dynlab {

BrownianPath sample_brownian(std::uint64_t seed, std::vector<double> grid, int dim) {
    if (dim < 1) throw InvalidGridError("sample_brownian: dim >= 1 required");
    if (grid.size() < 2)
        throw InvalidGridError("sample_brownian: grid needs at least two points");
    for (std::size_t i = 0; i + 1 < grid.size(); ++i)
        if (!(grid[i] < grid[i + 1]))
            throw InvalidGridError("sample_brownian: grid must be strictly increasing");

    BrownianPath path;
    path.seed = seed;
    path.dim = dim;
    const std::size_t n = grid.size() - 1;
    path.increments.resize(n * static_cast<std::size_t>(dim));
    GaussianStream stream(seed);
    for (std::size_t i = 0; i < n; ++i) {
        const double sdt = std::sqrt(grid[i + 1] - grid[i]);
        double* row = path.increments.data() + i * static_cast<std::size_t>(dim);
        for (int k = 0; k < dim; ++k) row[k] = sdt * stream.next();
    }
    path.grid = std::move(grid);
    return path;
}

BrownianPath coarsen_path(const BrownianPath& path, int factor) {
    if (factor < 1) throw InvalidInputError("coarsen_path: factor >= 1 required");
    const std::size_t n = path.steps();
    if (factor == 1) return path;
    if (n % static_cast<std::size_t>(factor) != 0)
        throw InvalidInputError("coarsen_path: factor must divide the step count");
    if (!grid_is_uniform(path.grid))
        throw InvalidInputError("coarsen_path: uniform grid required");

    BrownianPath coarse;
    coarse.seed = path.seed;
    coarse.dim = path.dim;
    const std::size_t m = n / static_cast<std::size_t>(factor);
    const std::size_t d = static_cast<std::size_t>(path.dim);
    coarse.grid.resize(m + 1);
    for (std::size_t j = 0; j <= m; ++j)
        coarse.grid[j] = path.grid[j * static_cast<std::size_t>(factor)];
    coarse.increments.assign(m * d, 0.0);
    for (std::size_t i = 0; i < n; ++i) {
        const std::size_t j = i / static_cast<std::size_t>(factor);
        const double* src = path.increments.data() + i * d;
        double* dst = coarse.increments.data() + j * d;
        for (std::size_t k = 0; k < d; ++k) dst[k] += src[k];
    }
    return coarse;
}

std::size_t uniform_step_count(double horizon, double step) {
    if (!(step > 0.0)) throw InvalidGridError("uniform_grid: step > 0 required");
    if (!(horizon > 0.0)) throw InvalidGridError("uniform_grid: horizon > 0 required");
    const double n_real = horizon / step;
    const auto n = static_cast<std::size_t>(std::llround(n_real));
    if (n < 1 || std::abs(n_real - static_cast<double>(n)) > 1e-6)
        throw InvalidGridError("uniform_grid: step must divide the horizon");
    return n;
}

std::vector<double> uniform_grid(double t_start, double horizon, double step) {
    const std::size_t n = uniform_step_count(horizon, step);
    std::vector<double> grid(n + 1);
    for (std::size_t i = 0; i <= n; ++i)
        grid[i] = t_start + static_cast<double>(i) * step;
    return grid;
}

bool grid_is_uniform(std::span<const double> grid, double rel_tol) {
    if (grid.size() < 2) return false;
    const double h = grid[1] - grid[0];
    // Absolute slack covers rounding of t_start + i*step at large |t|.
    const double tol = std::max(rel_tol * h,
                                8.0 * std::numeric_limits<double>::epsilon() *
                                    std::max(std::abs(grid.front()), std::abs(grid.back())));
    for (std::size_t i = 1; i + 1 < grid.size(); ++i)
        if (std::abs((grid[i + 1] - grid[i]) - h) > tol) return false;
    return true;
}

} // namespace dynlab
