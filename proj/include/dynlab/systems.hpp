#pragma once

#include <optional>
#include <string>
#include <vector>

#include "dynlab/problems.hpp"
#include "dynlab/schedule.hpp"

namespace dynlab {

// The four integrated systems. Operator systems are kept in first-order
// reduced coordinates (companion Z = X + mu V(Y) resp. R = Q + beta V(Z)) so
// that no Jacobian of V is ever needed and merely-Lipschitz operators remain
// admissible.
enum class SystemVariant { shbf, savd, shbfop_alt, sfogda_alt };

std::string to_string(SystemVariant v);

struct SystemSpec {
    SystemVariant variant{};
    double lambda = 0.0; // friction (shbf, shbfop_alt)
    double alpha = 0.0;  // damping exponent (savd, sfogda_alt)
    double beta = 0.0;   // operator coefficient (sfogda_alt)
    std::optional<ScalarSchedule> b;     // shbf
    std::optional<ScalarSchedule> mu;    // shbfop_alt
    std::optional<ScalarSchedule> gamma; // shbfop_alt
    DiffusionSchedule diffusion;
    Problem problem;
    double t_start = 0.0;
    double horizon = 0.0;
    Vec initial_position;
    Vec initial_companion; // X | Q | Z-companion | R depending on variant
    std::vector<std::string> warnings;

    int dim() const { return problem_dim(problem); }
    bool objective() const { return std::holds_alternative<ObjectiveProblem>(problem); }

    // Right-hand side of the drift at time t; noise acts on the companion
    // block only.
    void drift(double t, std::span<const double> position,
               std::span<const double> companion, std::span<double> d_pos,
               std::span<double> d_comp) const;

    // Explicit-scheme step-size hint dt <= 0.5 / sqrt(coef(t_end) * L); the
    // engine warns (does not fail) when the integration step exceeds it.
    double stable_step_hint() const;
};

SystemSpec build_shbf(double lambda, ScalarSchedule b, DiffusionSchedule diffusion,
                      ObjectiveProblem problem, Vec y0, Vec x0, double t_start,
                      double horizon);

SystemSpec build_savd(double alpha, DiffusionSchedule diffusion,
                      ObjectiveProblem problem, Vec z0, Vec q0, double s_start,
                      double horizon);

// Builder takes the second-order initial data (Y0, X0); the stored companion
// is Z0 = X0 + mu(t0) V(Y0).
SystemSpec build_shbfop_alt(double lambda, ScalarSchedule mu, ScalarSchedule gamma,
                            DiffusionSchedule diffusion, MonotoneProblem problem,
                            Vec y0, Vec x0, double t_start, double horizon);

// Builder takes (Z0, Q0); the stored companion is R0 = Q0 + beta V(Z0).
SystemSpec build_sfogda_alt(double alpha, double beta, DiffusionSchedule diffusion,
                            MonotoneProblem problem, Vec z0, Vec q0, double s_start,
                            double horizon);

// sup_{t >= t0} b'(t)/b(t) < lambda, the standing assumption of the
// constant-friction objective system.
struct ShbfAssumptionReport {
    double sup_ratio = 0.0;
    double lambda = 0.0;
    double margin = 0.0; // lambda - sup_ratio
    bool pass = false;
};

ShbfAssumptionReport validate_shbf_assumption(double lambda, const ScalarSchedule& b);

// ell = lim gamma/mu > 0, sup mu'/gamma < 1, 2 lambda - 3 ell + inf mu'/mu > 0.
struct OperatorAssumptionReport {
    double ell = 0.0;
    double sup_mu_dot_over_gamma = 0.0;
    double inf_mu_dot_over_mu = 0.0;
    double positivity = 0.0; // 2 lambda - 3 ell + inf mu'/mu
    // Time from which the gamma/mu ratio sits at ell; schedules validated
    // here are exactly proportional, so this is the domain start.
    double admissible_from = 0.0;
    bool pass = false;
    std::string diagnostic;
};

OperatorAssumptionReport validate_operator_assumptions(double lambda,
                                                       const ScalarSchedule& mu,
                                                       const ScalarSchedule& gamma);

// Sign classification of (P,Q) -> A|P|^2 + 2B<P,Q> + C|Q|^2.
enum class QuadraticFormSign { nonnegative, nonpositive, indefinite };

QuadraticFormSign quadratic_form_sign(double a, double b, double c);

struct Trajectory; // integrate.hpp

// X(t_i) = Z(t_i) - mu(t_i) V(Y(t_i)) on the trajectory grid; for
// sfogda_alt, mu is the constant beta. Only meaningful for the operator
// variants.
std::vector<Vec> recover_velocity(const Trajectory& traj);

} // namespace dynlab
