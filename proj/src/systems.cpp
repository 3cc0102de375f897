#include "dynlab/systems.hpp"

#include <cmath>

#include "dynlab/integrate.hpp"

namespace dynlab {

std::string to_string(SystemVariant v) {
    switch (v) {
        case SystemVariant::shbf: return "shbf";
        case SystemVariant::savd: return "savd";
        case SystemVariant::shbfop_alt: return "shbfop_alt";
        case SystemVariant::sfogda_alt: return "sfogda_alt";
    }
    return "?";
}

void SystemSpec::drift(double t, std::span<const double> position,
                       std::span<const double> companion, std::span<double> d_pos,
                       std::span<double> d_comp) const {
    const std::size_t d = position.size();
    switch (variant) {
        case SystemVariant::shbf: {
            const auto& f = std::get<ObjectiveProblem>(problem);
            f.grad(position, d_comp); // d_comp holds grad f(y)
            const double bt = b->value(t);
            for (std::size_t i = 0; i < d; ++i) {
                d_pos[i] = companion[i];
                d_comp[i] = -lambda * companion[i] - bt * d_comp[i];
            }
            break;
        }
        case SystemVariant::savd: {
            const auto& f = std::get<ObjectiveProblem>(problem);
            f.grad(position, d_comp);
            const double damping = alpha / t;
            for (std::size_t i = 0; i < d; ++i) {
                d_pos[i] = companion[i];
                d_comp[i] = -damping * companion[i] - d_comp[i];
            }
            break;
        }
        case SystemVariant::shbfop_alt: {
            const auto& v = std::get<MonotoneProblem>(problem);
            v.eval(position, d_pos); // d_pos holds V(y)
            const double mu_t = mu->value(t);
            const double coef = lambda * mu_t - gamma->value(t) + mu->derivative(t);
            for (std::size_t i = 0; i < d; ++i) {
                const double vy = d_pos[i];
                d_pos[i] = companion[i] - mu_t * vy;
                d_comp[i] = -lambda * companion[i] + coef * vy;
            }
            break;
        }
        case SystemVariant::sfogda_alt: {
            const auto& v = std::get<MonotoneProblem>(problem);
            v.eval(position, d_pos);
            const double damping = alpha / t;
            const double coef = 0.5 * alpha * beta / t;
            for (std::size_t i = 0; i < d; ++i) {
                const double vz = d_pos[i];
                d_pos[i] = companion[i] - beta * vz;
                d_comp[i] = -damping * companion[i] + coef * vz;
            }
            break;
        }
    }
}

double SystemSpec::stable_step_hint() const {
    const double t_end = t_start + horizon;
    double coef = 1.0;
    double lip = 1.0;
    switch (variant) {
        case SystemVariant::shbf:
            coef = b->value(t_end);
            lip = std::get<ObjectiveProblem>(problem).lipschitz_grad;
            break;
        case SystemVariant::savd:
            coef = 1.0;
            lip = std::get<ObjectiveProblem>(problem).lipschitz_grad;
            break;
        case SystemVariant::shbfop_alt:
            coef = std::max(mu->value(t_end), gamma->value(t_end));
            lip = std::get<MonotoneProblem>(problem).lipschitz;
            break;
        case SystemVariant::sfogda_alt:
            coef = std::max(beta, 0.5 * alpha * beta / t_start);
            lip = std::get<MonotoneProblem>(problem).lipschitz;
            break;
    }
    return 0.5 / std::sqrt(std::max(coef * lip, 1e-300));
}

namespace {

void check_initial(const Vec& pos, const Vec& comp, int dim) {
    if (pos.size() != static_cast<std::size_t>(dim) ||
        comp.size() != static_cast<std::size_t>(dim))
        throw InvalidInputError("initial state dimension mismatch");
    if (!all_finite(pos) || !all_finite(comp))
        throw InvalidInputError("initial state must be finite");
}

} // namespace

SystemSpec build_shbf(double lambda, ScalarSchedule b, DiffusionSchedule diffusion,
                      ObjectiveProblem problem, Vec y0, Vec x0, double t_start,
                      double horizon) {
    if (!(lambda > 0.0)) throw InvalidParameterError("shbf: lambda > 0 required");
    if (!b.nondecreasing())
        throw InvalidScheduleError("shbf: b must be nondecreasing on [t_start, inf)");
    if (t_start < b.domain_start())
        throw InvalidScheduleError("shbf: t_start below schedule domain");
    check_initial(y0, x0, problem.dim);

    SystemSpec spec;
    spec.variant = SystemVariant::shbf;
    spec.lambda = lambda;
    spec.b = std::move(b);
    spec.diffusion = std::move(diffusion);
    spec.problem = std::move(problem);
    spec.t_start = t_start;
    spec.horizon = horizon;
    spec.initial_position = std::move(y0);
    spec.initial_companion = std::move(x0);
    return spec;
}

SystemSpec build_savd(double alpha, DiffusionSchedule diffusion,
                      ObjectiveProblem problem, Vec z0, Vec q0, double s_start,
                      double horizon) {
    if (!(s_start > 0.0)) throw InvalidStartError("savd: s_start > 0 required");
    check_initial(z0, q0, problem.dim);

    SystemSpec spec;
    spec.variant = SystemVariant::savd;
    spec.alpha = alpha;
    spec.diffusion = std::move(diffusion);
    spec.problem = std::move(problem);
    spec.t_start = s_start;
    spec.horizon = horizon;
    spec.initial_position = std::move(z0);
    spec.initial_companion = std::move(q0);
    if (alpha <= 3.0)
        spec.warnings.push_back(
            "savd: alpha <= 3, the o(1/s^2) rate guarantees do not apply");
    return spec;
}

SystemSpec build_shbfop_alt(double lambda, ScalarSchedule mu, ScalarSchedule gamma,
                            DiffusionSchedule diffusion, MonotoneProblem problem,
                            Vec y0, Vec x0, double t_start, double horizon) {
    if (!(lambda > 0.0)) throw InvalidParameterError("shbfop: lambda > 0 required");
    if (!mu.nondecreasing())
        throw InvalidScheduleError("shbfop: mu must be nondecreasing");
    if (t_start < mu.domain_start() || t_start < gamma.domain_start())
        throw InvalidScheduleError("shbfop: t_start below schedule domain");
    check_initial(y0, x0, problem.dim);

    Vec z0(x0.size());
    problem.eval(y0, z0);
    const double mu0 = mu.value(t_start);
    for (std::size_t i = 0; i < z0.size(); ++i) z0[i] = x0[i] + mu0 * z0[i];

    SystemSpec spec;
    spec.variant = SystemVariant::shbfop_alt;
    spec.lambda = lambda;
    spec.mu = std::move(mu);
    spec.gamma = std::move(gamma);
    spec.diffusion = std::move(diffusion);
    spec.problem = std::move(problem);
    spec.t_start = t_start;
    spec.horizon = horizon;
    spec.initial_position = std::move(y0);
    spec.initial_companion = std::move(z0);
    return spec;
}

SystemSpec build_sfogda_alt(double alpha, double beta, DiffusionSchedule diffusion,
                            MonotoneProblem problem, Vec z0, Vec q0, double s_start,
                            double horizon) {
    if (!(s_start > 0.0)) throw InvalidStartError("sfogda: s_start > 0 required");
    if (!(beta > 0.0)) throw InvalidParameterError("sfogda: beta > 0 required");
    check_initial(z0, q0, problem.dim);

    Vec r0(q0.size());
    problem.eval(z0, r0);
    for (std::size_t i = 0; i < r0.size(); ++i) r0[i] = q0[i] + beta * r0[i];

    SystemSpec spec;
    spec.variant = SystemVariant::sfogda_alt;
    spec.alpha = alpha;
    spec.beta = beta;
    spec.diffusion = std::move(diffusion);
    spec.problem = std::move(problem);
    spec.t_start = s_start;
    spec.horizon = horizon;
    spec.initial_position = std::move(z0);
    spec.initial_companion = std::move(r0);
    if (alpha <= 2.0)
        spec.warnings.push_back(
            "sfogda: alpha <= 2, the o(1/s) rate guarantees do not apply");
    return spec;
}

ShbfAssumptionReport validate_shbf_assumption(double lambda, const ScalarSchedule& b) {
    ShbfAssumptionReport r;
    r.lambda = lambda;
    r.sup_ratio = b.sup_log_derivative();
    r.margin = lambda - r.sup_ratio;
    r.pass = r.sup_ratio < lambda;
    return r;
}

OperatorAssumptionReport validate_operator_assumptions(double lambda,
                                                       const ScalarSchedule& mu,
                                                       const ScalarSchedule& gamma) {
    OperatorAssumptionReport r;
    r.ell = limit_ratio(gamma, mu);
    if (!std::isfinite(r.ell)) {
        r.pass = false;
        r.diagnostic = "gamma/mu has no finite limit";
        return r;
    }
    if (!(r.ell > 0.0)) {
        r.pass = false;
        r.diagnostic = "lim gamma/mu must be > 0";
        return r;
    }
    // sup mu'/gamma = (mu/gamma) * sup mu'/mu needs mu/gamma constant in t;
    // constant mu (mu' = 0) is fine against any gamma.
    if (proportional(mu, gamma) || mu.family() == ScheduleFamily::constant) {
        const double scale =
            mu.family() == ScheduleFamily::constant ? 0.0 : mu.coeff() / gamma.coeff();
        r.sup_mu_dot_over_gamma = scale * mu.sup_log_derivative();
    } else {
        r.pass = false;
        r.diagnostic = "sup mu'/gamma unsupported for non-proportional schedule pair";
        return r;
    }
    r.inf_mu_dot_over_mu = mu.inf_log_derivative();
    r.positivity = 2.0 * lambda - 3.0 * r.ell + r.inf_mu_dot_over_mu;
    r.admissible_from = std::max(mu.domain_start(), gamma.domain_start());
    r.pass = r.sup_mu_dot_over_gamma < 1.0 && r.positivity > 0.0;
    return r;
}

QuadraticFormSign quadratic_form_sign(double a, double b, double c) {
    if (a == 0.0) throw InvalidInputError("quadratic_form_sign: A must be nonzero");
    const double disc = b * b - a * c;
    if (disc <= 0.0)
        return a > 0.0 ? QuadraticFormSign::nonnegative : QuadraticFormSign::nonpositive;
    return QuadraticFormSign::indefinite;
}

std::vector<Vec> recover_velocity(const Trajectory& traj) {
    if (traj.variant != SystemVariant::shbfop_alt &&
        traj.variant != SystemVariant::sfogda_alt)
        throw InvalidInputError("recover_velocity: operator-variant trajectory required");
    const auto& problem = std::get<MonotoneProblem>(traj.spec.problem);
    const std::size_t d = static_cast<std::size_t>(traj.dim);
    std::vector<Vec> xs(traj.grid.size(), Vec(d));
    Vec v(d);
    for (std::size_t i = 0; i < traj.grid.size(); ++i) {
        const auto y = traj.position(i);
        const auto z = traj.companion(i);
        problem.eval(y, v);
        const double mu_t = traj.variant == SystemVariant::sfogda_alt
                                ? traj.spec.beta
                                : traj.spec.mu->value(traj.grid[i]);
        for (std::size_t k = 0; k < d; ++k) xs[i][k] = z[k] - mu_t * v[k];
    }
    return xs;
}

} // namespace dynlab
