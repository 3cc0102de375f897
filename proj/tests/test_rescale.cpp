#include <doctest.h>

#include <cmath>

#include "dynlab/rescale.hpp"

using namespace dynlab;

TEST_CASE("time map formulas and bijection") {
    const auto opt = make_time_map(TimeMapKind::opt, 4.0, 0.0, 1.0);
    CHECK(opt.tau(std::exp(1.0)) == doctest::Approx(3.0).epsilon(1e-14));
    CHECK(opt.kappa(3.0) == doctest::Approx(std::exp(1.0)).epsilon(1e-14));

    const auto op = make_time_map(TimeMapKind::op, 4.0, 0.0, 1.0);
    CHECK(op.tau_dot(2.0) == doctest::Approx(1.0));

    CHECK_THROWS_AS(make_time_map(TimeMapKind::opt, 4.0, 0.0, 0.0),
                    InvalidParameterError);
    CHECK_THROWS_AS(make_time_map(TimeMapKind::opt, 1.0, 0.0, 1.0),
                    InvalidParameterError);

    // kappa(tau(s)) = s and tau'(s) kappa'(tau(s)) = 1 on log-spaced points
    for (const auto& map : {opt, op}) {
        for (int i = 0; i < 1000; ++i) {
            const double s = std::pow(10.0, -0.5 + 3.5 * i / 999.0);
            CHECK(std::abs(map.kappa(map.tau(s)) - s) <= 1e-12 * s);
            const double t = map.tau(s);
            CHECK(std::abs(map.tau(map.kappa(t)) - t) <= 1e-12 * std::max(1.0, std::abs(t)));
            CHECK(map.tau_dot(s) * map.kappa_dot(map.tau(s)) ==
                  doctest::Approx(1.0).epsilon(1e-12));
        }
    }
}

TEST_CASE("exponential image satisfies b(tau(s)) = s^2/(alpha-1)^2") {
    const double alpha = 4.0;
    const auto quad = make_quadratic({1.0}, {0.0});
    const auto pair = build_objective_equivalence(alpha, 0.5, 2.0, quad, {1.0}, {0.0},
                                                  18.0, DiffusionSchedule::zero());
    for (double s : {2.0, 3.0, 7.0, 20.0}) {
        const double expect = s * s / ((alpha - 1.0) * (alpha - 1.0));
        CHECK(pair.spec_t.b->value(pair.map.tau(s)) ==
              doctest::Approx(expect).epsilon(1e-12));
    }
}

TEST_CASE("diffusion transform: closed-form image and round trip") {
    const auto map = make_time_map(TimeMapKind::opt, 4.0, 0.0, 1.0);

    // constant c on the t side maps to c (3/s)^{3/2}
    const auto sigma_y = DiffusionSchedule::scalar(ScalarSchedule::constant(2.0));
    const auto sigma_z = transform_diffusion(map, sigma_y, TransformDirection::t_to_s);
    REQUIRE_FALSE(sigma_z.is_zero());
    CHECK(sigma_z.multiplier->family() == ScheduleFamily::power);
    for (double s : {1.0, 2.0, 8.0})
        CHECK(sigma_z.multiplier->value(s) ==
              doctest::Approx(2.0 * std::pow(3.0 / s, 1.5)).epsilon(1e-12));

    // round trip s -> t -> s reproduces the multiplier
    const auto back = transform_diffusion(map, sigma_z, TransformDirection::s_to_t);
    CHECK(back.multiplier->family() == ScheduleFamily::constant);
    CHECK(back.multiplier->value(5.0) == doctest::Approx(2.0).epsilon(1e-12));

    // square-integrability transfer: int |sigma_Y|^2 dt < inf iff
    // int s^2 |sigma_Z|^2 ds < inf
    const auto decaying = DiffusionSchedule::scalar(ScalarSchedule::exponential(1.0, -0.1));
    const auto decaying_z = transform_diffusion(map, decaying, TransformDirection::t_to_s);
    CHECK(decaying.square_integrable());
    CHECK(decaying_z.weighted_square_integrable(2.0));
    const auto flat_z = transform_diffusion(map, sigma_y, TransformDirection::t_to_s);
    CHECK_FALSE(sigma_y.square_integrable());
    CHECK_FALSE(flat_z.weighted_square_integrable(2.0));

    // family closure violations are reported
    const auto power_t = DiffusionSchedule::scalar(ScalarSchedule::power(1.0, -1.0, 1.0));
    CHECK_THROWS_AS(transform_diffusion(map, power_t, TransformDirection::t_to_s),
                    UnsupportedCompositionError);
    const auto exp_s = DiffusionSchedule::scalar(ScalarSchedule::exponential(1.0, -1.0));
    CHECK_THROWS_AS(transform_diffusion(map, exp_s, TransformDirection::s_to_t),
                    UnsupportedCompositionError);

    CHECK(transform_diffusion(map, DiffusionSchedule::zero(), TransformDirection::t_to_s)
              .is_zero());
}

TEST_CASE("coupled increments: zero map, variance, linearity") {
    const auto map = make_time_map(TimeMapKind::opt, 4.0, 0.0, 1.0);

    // zero path maps to zero path
    BrownianPath zero;
    zero.seed = 0;
    zero.dim = 1;
    zero.grid = uniform_grid(1.0, 1.0, 0.1);
    zero.increments.assign(10, 0.0);
    const auto mapped = couple_increments(zero, map);
    for (double v : mapped.increments) CHECK(v == 0.0);
    for (std::size_t i = 0; i < mapped.grid.size(); ++i)
        CHECK(mapped.grid[i] == doctest::Approx(map.tau(zero.grid[i])));

    // linearity: doubling s-side increments doubles the t-side
    auto doubled = zero;
    const auto base = sample_brownian(3, zero.grid, 1);
    doubled.increments = base.increments;
    for (auto& v : doubled.increments) v *= 2.0;
    const auto mapped_base = couple_increments(base, map);
    const auto mapped_doubled = couple_increments(doubled, map);
    for (std::size_t i = 0; i < mapped_base.increments.size(); ++i)
        CHECK(mapped_doubled.increments[i] ==
              doctest::Approx(2.0 * mapped_base.increments[i]));

    // neither uniform nor log-uniform s-grids are rejected
    BrownianPath crooked;
    crooked.seed = 0;
    crooked.dim = 1;
    crooked.grid = {1.0, 1.5, 1.7, 3.0};
    crooked.increments.assign(3, 0.0);
    CHECK_THROWS_AS(couple_increments(crooked, map), InvalidGridError);

    // log-uniform grids are accepted
    BrownianPath logu;
    logu.seed = 0;
    logu.dim = 1;
    for (int i = 0; i <= 8; ++i) logu.grid.push_back(std::pow(2.0, i * 0.25));
    logu.increments.assign(8, 0.0);
    CHECK_NOTHROW(couple_increments(logu, map));

    // variance ratio Var(dW_t)/dt averaged over 1e5 draws -> 1 +- 0.03
    const auto s_grid = uniform_grid(1.0, 2.0, 0.1);
    double sum_ratio = 0.0;
    std::size_t count = 0;
    for (int rep = 0; rep < 5000; ++rep) {
        const auto p = sample_brownian(1000 + rep, s_grid, 1);
        const auto m = couple_increments(p, map);
        for (std::size_t i = 0; i < m.steps(); ++i) {
            const double dt = m.grid[i + 1] - m.grid[i];
            sum_ratio += m.increments[i] * m.increments[i] / dt;
            ++count;
        }
    }
    CHECK(count == 100000);
    CHECK(sum_ratio / static_cast<double>(count) == doctest::Approx(1.0).epsilon(0.03));
}

TEST_CASE("deterministic objective equivalence via RK4") {
    const auto quad = make_quadratic({1.0, 4.0}, {0.0, 0.0});
    const auto pair = build_objective_equivalence(4.0, 0.0, 1.0, quad, {1.0, -0.5},
                                                  {0.0, 0.0}, 19.0,
                                                  DiffusionSchedule::zero());
    const auto grid = uniform_grid(1.0, 19.0, 1e-3);
    const auto path = sample_brownian(1, grid, 2);
    const auto report = check_equivalence(pair.spec_t, pair.spec_s, pair.map, path,
                                          VelocityRule::objective);
    CHECK(report.sup_position_error <= 1e-6);
    CHECK(report.sup_velocity_error <= 1e-5);
}

TEST_CASE("deterministic operator equivalence via RK4") {
    const auto rot = make_rotation();
    const auto pair = build_operator_equivalence(4.0, 1.0, 0.0, 1.0, rot, {1.0, 0.0},
                                                 {0.0, 0.0}, 19.0,
                                                 DiffusionSchedule::zero());
    const auto grid = uniform_grid(1.0, 19.0, 1e-3);
    const auto path = sample_brownian(1, grid, 2);
    const auto report = check_equivalence(pair.spec_t, pair.spec_s, pair.map, path,
                                          VelocityRule::operator_eq);
    CHECK(report.sup_position_error <= 1e-6);
    CHECK(report.sup_velocity_error <= 1e-5);
}

TEST_CASE("pairing validation rejects off-theorem specs") {
    const auto quad = make_quadratic({1.0}, {0.0});
    auto pair = build_objective_equivalence(4.0, 0.0, 1.0, quad, {1.0}, {0.0}, 9.0,
                                            DiffusionSchedule::zero());
    const auto path = sample_brownian(1, uniform_grid(1.0, 9.0, 1e-2), 1);

    auto tampered = pair.spec_t;
    tampered.lambda = 2.0;
    CHECK_THROWS_AS(check_equivalence(tampered, pair.spec_s, pair.map, path,
                                      VelocityRule::objective),
                    InvalidPairingError);
    try {
        check_equivalence(tampered, pair.spec_s, pair.map, path, VelocityRule::objective);
    } catch (const InvalidPairingError& e) {
        CHECK(e.field == "lambda");
    }

    auto bad_sigma = pair.spec_t;
    bad_sigma.diffusion = DiffusionSchedule::scalar(ScalarSchedule::constant(0.1));
    CHECK_THROWS_AS(check_equivalence(bad_sigma, pair.spec_s, pair.map, path,
                                      VelocityRule::objective),
                    InvalidPairingError);
}

TEST_CASE("deterministic refinement study shows fourth-order decay") {
    const auto quad = make_quadratic({1.0}, {0.0});
    const auto pair = build_objective_equivalence(4.0, 0.0, 1.0, quad, {1.0}, {0.0}, 7.0,
                                                  DiffusionSchedule::zero());
    const auto finest = sample_brownian(1, uniform_grid(1.0, 7.0, 0.4375 / 16.0), 1);
    const auto report = run_equivalence_study(pair, finest, 5, VelocityRule::objective);
    REQUIRE(report.study.has_value());
    for (std::size_t i = 0; i + 1 < report.study->errors.size(); ++i)
        CHECK(report.study->errors[i + 1] < report.study->errors[i]);
    CHECK(report.study->slope == doctest::Approx(4.0).epsilon(0.2));
}

TEST_CASE("stochastic coupled refinement study decays with slope >= 0.4") {
    const auto quad = make_quadratic({1.0, 2.0}, {0.0, 0.0});
    const auto sigma_s = DiffusionSchedule::scalar(ScalarSchedule::power(0.5, -1.6, 1.0));
    const auto pair =
        build_objective_equivalence(4.0, 0.0, 1.0, quad, {1.0, -1.0}, {0.0, 0.0}, 15.0,
                                    sigma_s);
    const auto finest = sample_brownian(17, uniform_grid(1.0, 15.0, 0.12 / 16.0), 2);
    const auto report = run_equivalence_study(pair, finest, 5, VelocityRule::objective);
    REQUIRE(report.study.has_value());
    for (std::size_t i = 0; i + 1 < report.study->errors.size(); ++i)
        CHECK(report.study->errors[i + 1] < report.study->errors[i]);
    CHECK(report.study->slope >= 0.4);
}
