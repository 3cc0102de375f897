#pragma once

#include "dynlab/brownian.hpp"
#include "dynlab/systems.hpp"

namespace dynlab {

// Divergence threshold, far above any legitimate trajectory scale here.
inline constexpr double kDivergenceThreshold = 1e12;

struct Trajectory {
    SystemVariant variant{};
    int dim = 0;
    std::vector<double> grid;   // N+1
    std::vector<double> states; // (N+1) x 2*dim, row-major [position | companion]
    SystemSpec spec;
    bool stability_warning = false;

    std::span<const double> position(std::size_t i) const {
        const std::size_t d = static_cast<std::size_t>(dim);
        return {states.data() + i * 2 * d, d};
    }
    std::span<const double> companion(std::size_t i) const {
        const std::size_t d = static_cast<std::size_t>(dim);
        return {states.data() + i * 2 * d + d, d};
    }
};

// Explicit Euler-Maruyama over the path's grid:
//   state_{i+1} = state_i + drift(t_i, state_i) dt_i + sigma(t_i) dW_i,
// noise on the companion block only. Deterministic given (spec, path).
// Throws DivergenceError at the first non-finite or oversized state.
Trajectory integrate_em(const SystemSpec& spec, const BrownianPath& path);

// Classical 4th-order one-step integration of the drift ODE; requires an
// identically-zero diffusion. Deterministic oracle for the underlying ODEs.
Trajectory integrate_rk4(const SystemSpec& spec, std::vector<double> grid);

} // namespace dynlab
