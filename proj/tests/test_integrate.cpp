#include <doctest.h>

#include <cmath>

#include "dynlab/integrate.hpp"

using namespace dynlab;

namespace {

// Closed form of y'' + y' + y = 0, y(0)=1, y'(0)=0.
double oscillator_y(double t) {
    const double w = std::sqrt(3.0) / 2.0;
    return std::exp(-0.5 * t) * (std::cos(w * t) + std::sin(w * t) / std::sqrt(3.0));
}

double oscillator_v(double t) {
    const double w = std::sqrt(3.0) / 2.0;
    return -2.0 / std::sqrt(3.0) * std::exp(-0.5 * t) * std::sin(w * t);
}

SystemSpec oscillator_spec(double horizon) {
    return build_shbf(1.0, ScalarSchedule::constant(1.0), DiffusionSchedule::zero(),
                      make_quadratic({1.0}, {0.0}), {1.0}, {0.0}, 0.0, horizon);
}

double sup_error_vs_oracle(const Trajectory& traj) {
    double sup = 0.0;
    for (std::size_t i = 0; i < traj.grid.size(); ++i)
        sup = std::max(sup, std::abs(traj.position(i)[0] - oscillator_y(traj.grid[i])));
    return sup;
}

} // namespace

TEST_CASE("stationary start stays fixed under explicit stepping") {
    const auto quad = make_quadratic({1.0, 4.0}, {0.5, -2.0});
    auto spec = build_shbf(1.0, ScalarSchedule::constant(1.0), DiffusionSchedule::zero(),
                           quad, quad.minimizer, {0.0, 0.0}, 0.0, 10.0);
    const auto path = sample_brownian(1, uniform_grid(0.0, 10.0, 0.01), 2);
    const auto traj = integrate_em(spec, path);
    for (std::size_t i = 0; i < traj.grid.size(); ++i) {
        CHECK(traj.position(i)[0] == quad.minimizer[0]);
        CHECK(traj.position(i)[1] == quad.minimizer[1]);
        CHECK(traj.companion(i)[0] == 0.0);
        CHECK(traj.companion(i)[1] == 0.0);
    }
}

TEST_CASE("EM matches the damped-oscillator closed form at order-one accuracy") {
    auto spec = oscillator_spec(5.0);
    const auto path = sample_brownian(1, uniform_grid(0.0, 5.0, 1e-4), 1);
    const auto traj = integrate_em(spec, path);
    CHECK(sup_error_vs_oracle(traj) <= 1e-3);
    // velocity too
    double sup_v = 0.0;
    for (std::size_t i = 0; i < traj.grid.size(); ++i)
        sup_v = std::max(sup_v, std::abs(traj.companion(i)[0] - oscillator_v(traj.grid[i])));
    CHECK(sup_v <= 1e-3);
}

TEST_CASE("RK4 matches the closed form to 1e-9 and refines at fourth order") {
    auto spec = oscillator_spec(5.0);
    const auto traj = integrate_rk4(spec, uniform_grid(0.0, 5.0, 1e-3));
    CHECK(sup_error_vs_oracle(traj) <= 1e-9);

    // step-halving reduces the error ~16x: slope 4 +- 0.3 on log-log
    std::vector<double> steps, errors;
    for (double h : {4e-2, 2e-2, 1e-2, 5e-3}) {
        const auto t = integrate_rk4(spec, uniform_grid(0.0, 5.0, h));
        steps.push_back(h);
        errors.push_back(sup_error_vs_oracle(t));
    }
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    for (std::size_t i = 0; i < steps.size(); ++i) {
        const double lx = std::log(steps[i]), ly = std::log(errors[i]);
        sx += lx;
        sy += ly;
        sxx += lx * lx;
        sxy += lx * ly;
    }
    const double n = static_cast<double>(steps.size());
    const double slope = (sxy - sx * sy / n) / (sxx - sx * sx / n);
    CHECK(slope == doctest::Approx(4.0).epsilon(0.075));

    // stationary start is constant under RK4 as well
    const auto quad = make_quadratic({2.0}, {1.0});
    auto st = build_shbf(1.0, ScalarSchedule::constant(1.0), DiffusionSchedule::zero(),
                         quad, quad.minimizer, {0.0}, 0.0, 2.0);
    const auto traj2 = integrate_rk4(st, uniform_grid(0.0, 2.0, 0.01));
    for (std::size_t i = 0; i < traj2.grid.size(); ++i)
        CHECK(traj2.position(i)[0] == 1.0);
}

TEST_CASE("same seed gives bit-identical stochastic trajectories") {
    auto spec = build_shbf(1.0, ScalarSchedule::constant(1.0), DiffusionSchedule::zero(),
                           make_quadratic({1.0}, {0.0}), {1.0}, {0.0}, 0.0, 2.0);
    spec.diffusion = DiffusionSchedule::scalar(ScalarSchedule::constant(0.1));
    const auto path = sample_brownian(99, uniform_grid(0.0, 2.0, 1e-3), 1);
    const auto a = integrate_em(spec, path);
    const auto b = integrate_em(spec, path);
    CHECK(a.states == b.states);
}

TEST_CASE("strong-convergence sanity across coupled refinements") {
    auto spec = build_shbf(1.0, ScalarSchedule::constant(1.0), DiffusionSchedule::zero(),
                           make_quadratic({1.0}, {0.0}), {1.0}, {0.0}, 0.0, 2.0);
    spec.diffusion = DiffusionSchedule::scalar(ScalarSchedule::constant(0.5));

    const std::size_t n_fine = 1 << 13;
    const auto fine_grid = uniform_grid(0.0, 2.0, 2.0 / static_cast<double>(n_fine));
    const auto fine = sample_brownian(5, fine_grid, 1);

    // |EM(dt) - EM(dt/2)| at the final time over 4 refinements
    std::vector<double> steps, diffs;
    for (int level = 4; level >= 1; --level) {
        const auto coarse = coarsen_path(fine, 1 << level);
        const auto finer = coarsen_path(fine, 1 << (level - 1));
        const auto a = integrate_em(spec, coarse);
        const auto b = integrate_em(spec, finer);
        const double ya = a.position(a.grid.size() - 1)[0];
        const double yb = b.position(b.grid.size() - 1)[0];
        steps.push_back(coarse.grid[1] - coarse.grid[0]);
        diffs.push_back(std::abs(ya - yb) + 1e-300);
    }
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    for (std::size_t i = 0; i < steps.size(); ++i) {
        const double lx = std::log(steps[i]), ly = std::log(diffs[i]);
        sx += lx;
        sy += ly;
        sxx += lx * lx;
        sxy += lx * ly;
    }
    const double n = static_cast<double>(steps.size());
    const double slope = (sxy - sx * sy / n) / (sxx - sx * sx / n);
    CHECK(slope >= 0.4);
}

TEST_CASE("zero-noise EM agrees with RK4 within first order") {
    const auto quad = make_quadratic({1.0, 4.0}, {0.0, 0.0});
    const auto rot = make_rotation();
    const SystemSpec specs[] = {
        build_shbf(1.0, ScalarSchedule::power(1.0, 2.0, 4.0), DiffusionSchedule::zero(),
                   quad, {1.0, 1.0}, {0.0, 0.0}, 4.0, 2.0),
        build_savd(4.0, DiffusionSchedule::zero(), quad, {1.0, 1.0}, {0.0, 0.0}, 1.0,
                   2.0),
        build_shbfop_alt(2.0, ScalarSchedule::constant(1.0), ScalarSchedule::constant(1.0),
                         DiffusionSchedule::zero(), rot, {1.0, 0.0}, {0.0, 0.0}, 0.0,
                         2.0),
        build_sfogda_alt(4.0, 1.0, DiffusionSchedule::zero(), rot, {1.0, 0.0},
                         {0.0, 0.0}, 1.0, 2.0),
    };
    for (const auto& spec : specs) {
        double prev_err = 0.0;
        for (int k = 0; k < 2; ++k) {
            const double h = k == 0 ? 1e-3 : 5e-4;
            const auto grid = uniform_grid(spec.t_start, spec.horizon, h);
            const auto em = integrate_em(spec, sample_brownian(1, grid, spec.dim()));
            const auto rk = integrate_rk4(spec, grid);
            double sup = 0.0;
            for (std::size_t i = 0; i < grid.size(); ++i)
                for (int c = 0; c < spec.dim(); ++c)
                    sup = std::max(sup, std::abs(em.position(i)[c] - rk.position(i)[c]));
            CHECK(sup <= 0.05 * h / 1e-3); // C * dt with a shared constant
            if (k == 1) CHECK(sup <= 0.75 * prev_err); // roughly halves with dt
            prev_err = sup;
        }
    }
}

TEST_CASE("divergence raises instead of propagating junk") {
    // Explicit stepping on a stiff quadratic with a huge step blows up fast.
    const auto quad = make_quadratic({100.0}, {0.0});
    auto spec = build_shbf(1.0, ScalarSchedule::constant(1000.0), DiffusionSchedule::zero(),
                           quad, {1.0}, {0.0}, 0.0, 100.0);
    const auto path = sample_brownian(1, uniform_grid(0.0, 100.0, 1.0), 1);
    CHECK_THROWS_AS(integrate_em(spec, path), DivergenceError);
    try {
        integrate_em(spec, path);
    } catch (const DivergenceError& e) {
        CHECK(e.step_index > 0);
        CHECK(e.step_index < 100);
    }
}

TEST_CASE("rk4 refuses nonzero diffusion, em validates grid span") {
    auto spec = oscillator_spec(1.0);
    spec.diffusion = DiffusionSchedule::scalar(ScalarSchedule::constant(0.1));
    CHECK_THROWS_AS(integrate_rk4(spec, uniform_grid(0.0, 1.0, 0.1)), InvalidInputError);

    auto clean = oscillator_spec(1.0);
    const auto bad_grid = uniform_grid(0.0, 2.0, 0.1); // spans beyond horizon
    CHECK_THROWS_AS(integrate_em(clean, sample_brownian(1, bad_grid, 1)),
                    InvalidGridError);
    CHECK_THROWS_AS(integrate_em(clean, sample_brownian(1, uniform_grid(0.0, 1.0, 0.1), 2)),
                    InvalidInputError);
}

TEST_CASE("stability hint flags oversized steps") {
    // dt <= 0.5 / sqrt(b(t_end) L): b=1, L=4 -> hint 0.25
    const auto quad = make_quadratic({4.0}, {0.0});
    auto spec = build_shbf(1.0, ScalarSchedule::constant(1.0), DiffusionSchedule::zero(),
                           quad, {1.0}, {0.0}, 0.0, 1.0);
    CHECK(spec.stable_step_hint() == doctest::Approx(0.25));
    const auto coarse = integrate_em(spec, sample_brownian(1, uniform_grid(0.0, 1.0, 0.5), 1));
    CHECK(coarse.stability_warning);
    const auto fine = integrate_em(spec, sample_brownian(1, uniform_grid(0.0, 1.0, 0.1), 1));
    CHECK_FALSE(fine.stability_warning);
}
