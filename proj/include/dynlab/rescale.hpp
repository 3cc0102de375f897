#pragma once

#include "dynlab/integrate.hpp"

namespace dynlab {

// Bijection between the constant-friction time axis t and the vanishing-
// damping axis s:
//   opt:  tau(s) = t0 + (alpha-1) log(s/s0),   kappa(t) = s0 exp((t-t0)/(alpha-1))
//   op:   tau(s) = t0 + (alpha/2) log(s/s0),   kappa(t) = s0 exp(2(t-t0)/alpha)
enum class TimeMapKind { opt, op };

struct TimeMap {
    TimeMapKind kind{};
    double alpha = 0.0;
    double t0 = 0.0;
    double s0 = 0.0;

    // tau'(s) = rho/s with rho = alpha-1 (opt) resp. alpha/2 (op).
    double rho() const { return kind == TimeMapKind::opt ? alpha - 1.0 : 0.5 * alpha; }
    double tau(double s) const { return t0 + rho() * std::log(s / s0); }
    double kappa(double t) const { return s0 * std::exp((t - t0) / rho()); }
    double tau_dot(double s) const { return rho() / s; }
    double kappa_dot(double t) const { return kappa(t) / rho(); }
};

TimeMap make_time_map(TimeMapKind kind, double alpha, double t0, double s0);

enum class TransformDirection { t_to_s, s_to_t };

// Diffusion transform of the time-rescaling equivalence, exponent 3/2 on the
// time-derivative factor:
//   sigma_Z(s) = tau'(s)^{3/2} sigma_Y(tau(s)),
//   sigma_Y(t) = kappa'(t)^{3/2} sigma_Z(kappa(t)).
// Stays within the closed-form families only for constant/exponential
// sources (t -> s) and constant/power sources (s -> t); anything else is an
// unsupported composition.
DiffusionSchedule transform_diffusion(const TimeMap& map,
                                      const DiffusionSchedule& source,
                                      TransformDirection direction);

// Push s-side increments to the image grid t_i = tau(s_i) via
// dW_t = sqrt(tau'(s_i)) dW_s; variances match dt_i to first order in the step.
BrownianPath couple_increments(const BrownianPath& path_s, const TimeMap& map);

enum class VelocityRule { objective, operator_eq };

// Pathwise discrepancy between an s-side trajectory and its rescaled t-side
// counterpart: sup |Z(s_i) - Y(tau(s_i))| and sup |Q(s_i) - rho/s_i X(tau(s_i))|
// (velocities recovered from the companions for operator systems).
struct RefinementStudy {
    std::vector<double> steps;  // s-side step per level
    std::vector<double> errors; // sup position error per level
    double slope = 0.0;         // log-log decay exponent of error vs step
};

struct EquivalenceReport {
    TimeMapKind kind{};
    double alpha = 0.0;
    std::vector<double> s_grid;
    std::vector<double> position_error;
    std::vector<double> velocity_error;
    double sup_position_error = 0.0;
    double sup_velocity_error = 0.0;
    double step_s = 0.0;
    std::size_t steps = 0;
    std::optional<RefinementStudy> study;
};

EquivalenceReport check_equivalence(const SystemSpec& spec_t, const SystemSpec& spec_s,
                                    const TimeMap& map, const BrownianPath& path_s,
                                    VelocityRule rule);

// Image pair construction: the s-side system plus its exponential-
// schedule t-side image and the connecting map.
struct EquivalencePair {
    SystemSpec spec_s;
    SystemSpec spec_t;
    TimeMap map;
};

EquivalencePair build_objective_equivalence(double alpha, double t0, double s0,
                                            const ObjectiveProblem& problem, Vec z0,
                                            Vec q0, double s_horizon,
                                            const DiffusionSchedule& sigma_s);

EquivalencePair build_operator_equivalence(double alpha, double beta, double t0,
                                           double s0, const MonotoneProblem& problem,
                                           Vec z0, Vec q0, double s_horizon,
                                           const DiffusionSchedule& sigma_s);

// Equivalence error across coupled step-halvings of the same Brownian path
// (levels = number of halvings; the finest path is coarsened 2^k-fold).
EquivalenceReport run_equivalence_study(const EquivalencePair& pair,
                                        const BrownianPath& finest_path, int levels,
                                        VelocityRule rule);

} // namespace dynlab
