#include "dynlab/integrate.hpp"

#include <cmath>
#include <string>

namespace dynlab {

namespace {

void check_grid_matches_spec(const SystemSpec& spec, std::span<const double> grid,
                             int path_dim) {
    if (path_dim != spec.dim())
        throw InvalidInputError("integrate: path dimension does not match problem");
    if (grid.size() < 2) throw InvalidGridError("integrate: grid needs two points");
    const double span_tol = 1e-9 * std::max(1.0, std::abs(spec.horizon));
    if (std::abs(grid.front() - spec.t_start) > span_tol ||
        std::abs(grid.back() - (spec.t_start + spec.horizon)) > span_tol)
        throw InvalidGridError("integrate: grid does not span [t_start, t_start+horizon]");
}

bool state_ok(std::span<const double> pos, std::span<const double> comp) {
    double n2 = 0.0;
    for (double v : pos) n2 += v * v;
    for (double v : comp) n2 += v * v;
    return std::isfinite(n2) && n2 <= kDivergenceThreshold * kDivergenceThreshold;
}

[[noreturn]] void throw_divergence(std::size_t index) {
    throw DivergenceError(index, "trajectory diverged at grid index " +
                                     std::to_string(index));
}

Trajectory make_empty(const SystemSpec& spec, std::vector<double> grid) {
    Trajectory traj;
    traj.variant = spec.variant;
    traj.dim = spec.dim();
    traj.grid = std::move(grid);
    traj.states.assign(traj.grid.size() * 2 * static_cast<std::size_t>(traj.dim), 0.0);
    traj.spec = spec;
    return traj;
}

} // namespace

Trajectory integrate_em(const SystemSpec& spec, const BrownianPath& path) {
    check_grid_matches_spec(spec, path.grid, path.dim);

    Trajectory traj = make_empty(spec, path.grid);
    const std::size_t d = static_cast<std::size_t>(traj.dim);
    const std::size_t n = traj.grid.size() - 1;

    double min_dt = traj.grid[1] - traj.grid[0];
    for (std::size_t i = 1; i < n; ++i)
        min_dt = std::min(min_dt, traj.grid[i + 1] - traj.grid[i]);
    traj.stability_warning = min_dt > spec.stable_step_hint();

    Vec pos(spec.initial_position), comp(spec.initial_companion);
    Vec dpos(d), dcomp(d), noise(d);
    const bool has_noise = !spec.diffusion.is_zero();
    const bool has_op = spec.diffusion.has_operator();

    double* out = traj.states.data();
    for (std::size_t k = 0; k < d; ++k) {
        out[k] = pos[k];
        out[d + k] = comp[k];
    }
    if (!state_ok(pos, comp)) throw_divergence(0);

    for (std::size_t i = 0; i < n; ++i) {
        const double t = traj.grid[i];
        const double dt = traj.grid[i + 1] - t;
        spec.drift(t, pos, comp, dpos, dcomp);
        for (std::size_t k = 0; k < d; ++k) {
            pos[k] += dt * dpos[k];
            comp[k] += dt * dcomp[k];
        }
        if (has_noise) {
            const double m = spec.diffusion.multiplier->value(t);
            const auto dw = path.increment(i);
            if (has_op) {
                spec.diffusion.op.apply(dw, noise);
                for (std::size_t k = 0; k < d; ++k) comp[k] += m * noise[k];
            } else {
                for (std::size_t k = 0; k < d; ++k) comp[k] += m * dw[k];
            }
        }
        if (!state_ok(pos, comp)) throw_divergence(i + 1);
        out = traj.states.data() + (i + 1) * 2 * d;
        for (std::size_t k = 0; k < d; ++k) {
            out[k] = pos[k];
            out[d + k] = comp[k];
        }
    }
    return traj;
}

Trajectory integrate_rk4(const SystemSpec& spec, std::vector<double> grid) {
    if (!spec.diffusion.is_zero())
        throw InvalidInputError("integrate_rk4: diffusion must be identically zero");
    check_grid_matches_spec(spec, grid, spec.dim());

    Trajectory traj = make_empty(spec, std::move(grid));
    const std::size_t d = static_cast<std::size_t>(traj.dim);
    const std::size_t n = traj.grid.size() - 1;

    Vec pos(spec.initial_position), comp(spec.initial_companion);
    Vec p1(d), c1(d), p2(d), c2(d), p3(d), c3(d), p4(d), c4(d);
    Vec tp(d), tc(d);

    double* out = traj.states.data();
    for (std::size_t k = 0; k < d; ++k) {
        out[k] = pos[k];
        out[d + k] = comp[k];
    }
    if (!state_ok(pos, comp)) throw_divergence(0);

    for (std::size_t i = 0; i < n; ++i) {
        const double t = traj.grid[i];
        const double h = traj.grid[i + 1] - t;

        spec.drift(t, pos, comp, p1, c1);
        for (std::size_t k = 0; k < d; ++k) {
            tp[k] = pos[k] + 0.5 * h * p1[k];
            tc[k] = comp[k] + 0.5 * h * c1[k];
        }
        spec.drift(t + 0.5 * h, tp, tc, p2, c2);
        for (std::size_t k = 0; k < d; ++k) {
            tp[k] = pos[k] + 0.5 * h * p2[k];
            tc[k] = comp[k] + 0.5 * h * c2[k];
        }
        spec.drift(t + 0.5 * h, tp, tc, p3, c3);
        for (std::size_t k = 0; k < d; ++k) {
            tp[k] = pos[k] + h * p3[k];
            tc[k] = comp[k] + h * c3[k];
        }
        spec.drift(t + h, tp, tc, p4, c4);
        for (std::size_t k = 0; k < d; ++k) {
            pos[k] += h / 6.0 * (p1[k] + 2.0 * p2[k] + 2.0 * p3[k] + p4[k]);
            comp[k] += h / 6.0 * (c1[k] + 2.0 * c2[k] + 2.0 * c3[k] + c4[k]);
        }
        if (!state_ok(pos, comp)) throw_divergence(i + 1);
        out = traj.states.data() + (i + 1) * 2 * d;
        for (std::size_t k = 0; k < d; ++k) {
            out[k] = pos[k];
            out[d + k] = comp[k];
        }
    }
    return traj;
}

} // namespace dynlab
