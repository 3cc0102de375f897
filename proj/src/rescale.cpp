#include "dynlab/rescale.hpp"

#include <cmath>

#include "dynlab/metrics.hpp"

namespace dynlab {

TimeMap make_time_map(TimeMapKind kind, double alpha, double t0, double s0) {
    if (!(s0 > 0.0)) throw InvalidParameterError("time map: s0 > 0 required");
    if (kind == TimeMapKind::opt && !(alpha > 1.0))
        throw InvalidParameterError("time map (opt): alpha > 1 required");
    if (kind == TimeMapKind::op && !(alpha > 0.0))
        throw InvalidParameterError("time map (op): alpha > 0 required");
    return {kind, alpha, t0, s0};
}

DiffusionSchedule transform_diffusion(const TimeMap& map,
                                      const DiffusionSchedule& source,
                                      TransformDirection direction) {
    if (source.is_zero()) return source;
    const ScalarSchedule& m = *source.multiplier;
    const double rho = map.rho();
    DiffusionSchedule out;
    out.op = source.op;

    if (direction == TransformDirection::t_to_s) {
        // sigma_Z(s) = (rho/s)^{3/2} sigma_Y(t0 + rho log(s/s0))
        switch (m.family()) {
            case ScheduleFamily::constant:
                out.multiplier = ScalarSchedule::power(
                    m.coeff() * std::pow(rho, 1.5), -1.5, map.s0);
                return out;
            case ScheduleFamily::exponential: {
                // c e^{a tau(s)} = c e^{a t0} (s/s0)^{a rho}
                const double a = m.shape();
                const double coeff = m.coeff() * std::exp(a * map.t0) *
                                     std::pow(map.s0, -a * rho) * std::pow(rho, 1.5);
                const double r = a * rho - 1.5;
                if (r == 0.0) {
                    out.multiplier = ScalarSchedule::constant(coeff, map.s0);
                } else {
                    out.multiplier = ScalarSchedule::power(coeff, r, map.s0);
                }
                return out;
            }
            default:
                throw UnsupportedCompositionError(
                    "transform_diffusion: t-side family does not stay closed under "
                    "the log time change");
        }
    }
    // s_to_t: sigma_Y(t) = kappa'(t)^{3/2} sigma_Z(kappa(t)),
    // kappa(t) = s0 e^{(t-t0)/rho}, kappa'(t) = kappa(t)/rho.
    switch (m.family()) {
        case ScheduleFamily::constant:
        case ScheduleFamily::power: {
            const double r = m.family() == ScheduleFamily::power ? m.shape() : 0.0;
            // c kappa(t)^r (kappa(t)/rho)^{3/2} = C e^{(r+3/2)(t-t0)/rho}
            const double a = (r + 1.5) / rho;
            const double coeff = m.coeff() * std::pow(map.s0, r + 1.5) *
                                 std::pow(rho, -1.5) * std::exp(-a * map.t0);
            out.multiplier = ScalarSchedule::exponential(coeff, a, map.t0);
            return out;
        }
        default:
            throw UnsupportedCompositionError(
                "transform_diffusion: s-side family does not stay closed under "
                "the exponential time change");
    }
}

BrownianPath couple_increments(const BrownianPath& path_s, const TimeMap& map) {
    const std::size_t n = path_s.steps();
    if (n == 0) throw InvalidGridError("couple_increments: empty path");
    // Uniform or log-uniform s-grids keep the induced t-grid well behaved.
    bool log_uniform = true;
    {
        const double ratio0 = path_s.grid[1] / path_s.grid[0];
        for (std::size_t i = 1; i < n && log_uniform; ++i)
            log_uniform = std::abs(path_s.grid[i + 1] / path_s.grid[i] - ratio0) <=
                          1e-9 * ratio0;
    }
    if (!grid_is_uniform(path_s.grid) && !log_uniform)
        throw InvalidGridError("couple_increments: s-grid must be uniform or log-uniform");

    BrownianPath path_t;
    path_t.seed = path_s.seed;
    path_t.dim = path_s.dim;
    path_t.grid.resize(path_s.grid.size());
    for (std::size_t i = 0; i < path_s.grid.size(); ++i)
        path_t.grid[i] = map.tau(path_s.grid[i]);
    path_t.increments.resize(path_s.increments.size());
    const std::size_t d = static_cast<std::size_t>(path_s.dim);
    for (std::size_t i = 0; i < n; ++i) {
        const double scale = std::sqrt(map.tau_dot(path_s.grid[i]));
        const double* src = path_s.increments.data() + i * d;
        double* dst = path_t.increments.data() + i * d;
        for (std::size_t k = 0; k < d; ++k) dst[k] = scale * src[k];
    }
    return path_t;
}

namespace {

constexpr double kPairTol = 1e-9;

bool close(double a, double b, double tol = kPairTol) {
    return std::abs(a - b) <= tol * std::max({1.0, std::abs(a), std::abs(b)});
}

void check_schedule_image(const ScalarSchedule& have, double want_coeff,
                          double want_rate, const char* field) {
    if (have.family() != ScheduleFamily::exponential || !close(have.shape(), want_rate) ||
        !close(have.coeff(), want_coeff))
        throw InvalidPairingError(field,
                                  std::string("check_equivalence: ") + field +
                                      " is not the exponential image of the s-side "
                                      "system");
}

void check_diffusion_image(const TimeMap& map, const DiffusionSchedule& sigma_t,
                           const DiffusionSchedule& sigma_s) {
    const DiffusionSchedule expect =
        transform_diffusion(map, sigma_s, TransformDirection::s_to_t);
    if (expect.is_zero() != sigma_t.is_zero())
        throw InvalidPairingError("diffusion", "check_equivalence: diffusions are not "
                                               "related by the (tau')^{3/2} transform");
    if (expect.is_zero()) return;
    const auto& a = *sigma_t.multiplier;
    const auto& b = *expect.multiplier;
    if (a.family() != b.family() || !close(a.coeff(), b.coeff()) ||
        !close(a.shape(), b.shape()) || !(sigma_t.op == sigma_s.op))
        throw InvalidPairingError("diffusion", "check_equivalence: diffusions are not "
                                               "related by the (tau')^{3/2} transform");
}

void check_pairing(const SystemSpec& spec_t, const SystemSpec& spec_s,
                   const TimeMap& map, VelocityRule rule) {
    const double alpha = map.alpha;
    const double rho = map.rho();
    if (!close(spec_s.t_start, map.s0))
        throw InvalidPairingError("s_start", "check_equivalence: s-side start != s0");
    if (!close(spec_t.t_start, map.t0))
        throw InvalidPairingError("t_start", "check_equivalence: t-side start != t0");
    const double s_end = spec_s.t_start + spec_s.horizon;
    if (!close(spec_t.t_start + spec_t.horizon, map.tau(s_end), 1e-7))
        throw InvalidPairingError("horizon",
                                  "check_equivalence: t-side horizon is not the tau "
                                  "image of the s-side horizon");

    if (rule == VelocityRule::objective) {
        if (map.kind != TimeMapKind::opt)
            throw InvalidPairingError("kind", "check_equivalence: objective rule needs "
                                              "an opt-kind map");
        if (spec_s.variant != SystemVariant::savd)
            throw InvalidPairingError("variant", "check_equivalence: s-side must be savd");
        if (spec_t.variant != SystemVariant::shbf)
            throw InvalidPairingError("variant", "check_equivalence: t-side must be shbf");
        if (!close(spec_s.alpha, alpha))
            throw InvalidPairingError("alpha", "check_equivalence: alpha mismatch");
        if (!close(spec_t.lambda, 1.0))
            throw InvalidPairingError("lambda", "check_equivalence: lambda must be 1");
        // b(t) = (s0/(alpha-1))^2 exp(2(t-t0)/(alpha-1))
        const double rate = 2.0 / rho;
        const double coeff =
            std::pow(map.s0 / rho, 2.0) * std::exp(-rate * map.t0);
        check_schedule_image(*spec_t.b, coeff, rate, "b");
        // X0 = kappa'(t0) Q0 = (s0/(alpha-1)) Q0
        for (std::size_t k = 0; k < spec_t.initial_position.size(); ++k) {
            if (!close(spec_t.initial_position[k], spec_s.initial_position[k], 1e-12))
                throw InvalidPairingError("initial_position",
                                          "check_equivalence: Y0 != Z0");
            if (!close(spec_t.initial_companion[k],
                       map.s0 / rho * spec_s.initial_companion[k], 1e-12))
                throw InvalidPairingError("initial_companion",
                                          "check_equivalence: X0 != (s0/(alpha-1)) Q0");
        }
    } else {
        if (map.kind != TimeMapKind::op)
            throw InvalidPairingError("kind", "check_equivalence: operator rule needs "
                                              "an op-kind map");
        if (spec_s.variant != SystemVariant::sfogda_alt)
            throw InvalidPairingError("variant",
                                      "check_equivalence: s-side must be sfogda_alt");
        if (spec_t.variant != SystemVariant::shbfop_alt)
            throw InvalidPairingError("variant",
                                      "check_equivalence: t-side must be shbfop_alt");
        if (!close(spec_s.alpha, alpha))
            throw InvalidPairingError("alpha", "check_equivalence: alpha mismatch");
        if (!close(spec_t.lambda, 2.0 * (alpha - 1.0) / alpha))
            throw InvalidPairingError("lambda",
                                      "check_equivalence: lambda must be 2(alpha-1)/alpha");
        // mu = gamma = (2 beta s0 / alpha) exp(2(t-t0)/alpha)
        const double rate = 2.0 / alpha;
        const double coeff =
            2.0 * spec_s.beta * map.s0 / alpha * std::exp(-rate * map.t0);
        check_schedule_image(*spec_t.mu, coeff, rate, "mu");
        check_schedule_image(*spec_t.gamma, coeff, rate, "gamma");
        // Y0 = Z0 and companion Zc0 = (2 s0/alpha) R0
        const double factor = 2.0 * map.s0 / alpha;
        for (std::size_t k = 0; k < spec_t.initial_position.size(); ++k) {
            if (!close(spec_t.initial_position[k], spec_s.initial_position[k], 1e-12))
                throw InvalidPairingError("initial_position",
                                          "check_equivalence: Y0 != Z0");
            if (!close(spec_t.initial_companion[k],
                       factor * spec_s.initial_companion[k], 1e-12))
                throw InvalidPairingError("initial_companion",
                                          "check_equivalence: companion is not the "
                                          "(2 s0/alpha) image");
        }
    }
    check_diffusion_image(map, spec_t.diffusion, spec_s.diffusion);
}

} // namespace

EquivalenceReport check_equivalence(const SystemSpec& spec_t, const SystemSpec& spec_s,
                                    const TimeMap& map, const BrownianPath& path_s,
                                    VelocityRule rule) {
    check_pairing(spec_t, spec_s, map, rule);
    if (path_s.dim != spec_s.dim())
        throw InvalidInputError("check_equivalence: path dimension mismatch");

    const bool deterministic = spec_s.diffusion.is_zero() && spec_t.diffusion.is_zero();

    Trajectory traj_s, traj_t;
    if (deterministic) {
        traj_s = integrate_rk4(spec_s, path_s.grid);
        std::vector<double> grid_t(path_s.grid.size());
        for (std::size_t i = 0; i < grid_t.size(); ++i)
            grid_t[i] = map.tau(path_s.grid[i]);
        traj_t = integrate_rk4(spec_t, std::move(grid_t));
    } else {
        traj_s = integrate_em(spec_s, path_s);
        traj_t = integrate_em(spec_t, couple_increments(path_s, map));
    }

    EquivalenceReport report;
    report.kind = map.kind;
    report.alpha = map.alpha;
    report.s_grid = path_s.grid;
    report.step_s = path_s.grid[1] - path_s.grid[0];
    report.steps = path_s.steps();
    report.position_error.resize(path_s.grid.size());
    report.velocity_error.resize(path_s.grid.size());

    const std::size_t d = static_cast<std::size_t>(spec_s.dim());
    Vec vel_s(d), vel_t(d), v(d);
    const MonotoneProblem* mono =
        rule == VelocityRule::operator_eq ? &std::get<MonotoneProblem>(spec_s.problem)
                                          : nullptr;
    for (std::size_t i = 0; i < path_s.grid.size(); ++i) {
        const double s = path_s.grid[i];
        const auto zs = traj_s.position(i);
        const auto yt = traj_t.position(i);
        double perr = 0.0;
        for (std::size_t k = 0; k < d; ++k) {
            const double dk = zs[k] - yt[k];
            perr += dk * dk;
        }
        report.position_error[i] = std::sqrt(perr);

        // Velocities: objective companions are Q resp. X directly; operator
        // companions are reduced and need Q = R - beta V(Z), X = Zc - mu V(Y).
        const auto cs = traj_s.companion(i);
        const auto ct = traj_t.companion(i);
        if (mono) {
            mono->eval(zs, v);
            for (std::size_t k = 0; k < d; ++k) vel_s[k] = cs[k] - spec_s.beta * v[k];
            mono->eval(yt, v);
            const double mu_t = spec_t.mu->value(traj_t.grid[i]);
            for (std::size_t k = 0; k < d; ++k) vel_t[k] = ct[k] - mu_t * v[k];
        } else {
            for (std::size_t k = 0; k < d; ++k) {
                vel_s[k] = cs[k];
                vel_t[k] = ct[k];
            }
        }
        const double factor = map.rho() / s;
        double verr = 0.0;
        for (std::size_t k = 0; k < d; ++k) {
            const double dk = vel_s[k] - factor * vel_t[k];
            verr += dk * dk;
        }
        report.velocity_error[i] = std::sqrt(verr);
    }
    for (double e : report.position_error)
        report.sup_position_error = std::max(report.sup_position_error, e);
    for (double e : report.velocity_error)
        report.sup_velocity_error = std::max(report.sup_velocity_error, e);
    return report;
}

EquivalencePair build_objective_equivalence(double alpha, double t0, double s0,
                                            const ObjectiveProblem& problem, Vec z0,
                                            Vec q0, double s_horizon,
                                            const DiffusionSchedule& sigma_s) {
    TimeMap map = make_time_map(TimeMapKind::opt, alpha, t0, s0);
    const double rho = map.rho();

    SystemSpec spec_s = build_savd(alpha, sigma_s, problem, z0, q0, s0, s_horizon);

    const double rate = 2.0 / rho;
    auto b = ScalarSchedule::exponential(std::pow(s0 / rho, 2.0) * std::exp(-rate * t0),
                                         rate, t0);
    Vec x0(q0.size());
    for (std::size_t k = 0; k < q0.size(); ++k) x0[k] = s0 / rho * q0[k];
    const double t_horizon = map.tau(s0 + s_horizon) - t0;
    SystemSpec spec_t = build_shbf(
        1.0, std::move(b), transform_diffusion(map, sigma_s, TransformDirection::s_to_t),
        problem, std::move(z0), std::move(x0), t0, t_horizon);
    return {std::move(spec_s), std::move(spec_t), map};
}

EquivalencePair build_operator_equivalence(double alpha, double beta, double t0,
                                           double s0, const MonotoneProblem& problem,
                                           Vec z0, Vec q0, double s_horizon,
                                           const DiffusionSchedule& sigma_s) {
    TimeMap map = make_time_map(TimeMapKind::op, alpha, t0, s0);

    SystemSpec spec_s =
        build_sfogda_alt(alpha, beta, sigma_s, problem, z0, q0, s0, s_horizon);

    const double rate = 2.0 / alpha;
    const double coeff = 2.0 * beta * s0 / alpha * std::exp(-rate * t0);
    auto mu = ScalarSchedule::exponential(coeff, rate, t0);
    auto gamma = mu;
    const double lambda = 2.0 * (alpha - 1.0) / alpha;
    Vec x0(q0.size());
    for (std::size_t k = 0; k < q0.size(); ++k) x0[k] = 2.0 * s0 / alpha * q0[k];
    const double t_horizon = map.tau(s0 + s_horizon) - t0;
    SystemSpec spec_t = build_shbfop_alt(
        lambda, std::move(mu), std::move(gamma),
        transform_diffusion(map, sigma_s, TransformDirection::s_to_t), problem,
        std::move(z0), std::move(x0), t0, t_horizon);
    return {std::move(spec_s), std::move(spec_t), map};
}

EquivalenceReport run_equivalence_study(const EquivalencePair& pair,
                                        const BrownianPath& finest_path, int levels,
                                        VelocityRule rule) {
    if (levels < 2)
        throw InvalidInputError("run_equivalence_study: at least 2 levels required");

    RefinementStudy study;
    EquivalenceReport finest_report;
    for (int level = levels - 1; level >= 0; --level) {
        const int factor = 1 << level;
        const BrownianPath path = coarsen_path(finest_path, factor);
        EquivalenceReport rep =
            check_equivalence(pair.spec_t, pair.spec_s, pair.map, path, rule);
        study.steps.push_back(rep.step_s);
        study.errors.push_back(rep.sup_position_error);
        if (level == 0) finest_report = std::move(rep);
    }
    // slope of log error against log step (decay exponent under refinement)
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    const double n = static_cast<double>(study.steps.size());
    for (std::size_t i = 0; i < study.steps.size(); ++i) {
        const double lx = std::log(study.steps[i]);
        const double ly = std::log(std::max(study.errors[i], 1e-300));
        sx += lx;
        sy += ly;
        sxx += lx * lx;
        sxy += lx * ly;
    }
    study.slope = (sxy - sx * sy / n) / (sxx - sx * sx / n);
    finest_report.study = std::move(study);
    return finest_report;
}

} // namespace dynlab
