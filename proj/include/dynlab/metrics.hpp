#pragma once

#include <map>
#include <string>

#include "dynlab/integrate.hpp"

namespace dynlab {

// Per-time performance metrics, keyed by canonical name. Objective variants
// carry suboptimality/velocity/distance; operator variants carry
// residual/residual_sq/gap/velocity/distance (velocity via the companion
// reduction X = Z - mu V(Y)).
struct MetricSeries {
    std::vector<double> grid;
    std::map<std::string, std::vector<double>> values;

    bool has(const std::string& name) const { return values.count(name) != 0; }
    const std::vector<double>& at(const std::string& name) const {
        return values.at(name);
    }
};

// stride > 1 evaluates every stride-th grid point (the final point is always
// included); keeps ensemble aggregation at desk scale for fine grids.
MetricSeries compute_metrics(const Trajectory& traj, const Problem& problem,
                             std::size_t stride = 1);

// Shared metric-row evaluation for trajectory-based and streaming callers.
class MetricEvaluator {
  public:
    MetricEvaluator(const SystemSpec& spec);
    std::vector<std::string> names() const;
    // Appends one value per metric (in names() order) for the given state.
    void row(double t, std::span<const double> position,
             std::span<const double> companion, std::span<double> out);

  private:
    const SystemSpec& spec_;
    Vec v_, diff_;
};

std::vector<std::size_t> strided_indices(std::size_t n_points, std::size_t stride);

// Energy of the constant-friction objective system, valid for 0 < eta < lambda:
//   E = b(t)(f(y) - inf f) + 1/2 |eta (y - y*) + x|^2
//       + 1/2 eta (lambda - eta) |y - y*|^2.
double energy_shbf(double eta, std::span<const double> y_star, double t,
                   std::span<const double> y, std::span<const double> x,
                   const ScalarSchedule& b, const ObjectiveProblem& problem,
                   double lambda);

// Four-term energy of the operator system (v = V(y) supplied by the caller):
//   E = 1/2 |2 eta (y - y*) + 2x + mu(t) v|^2 + 2 eta (lambda - eta) |y - y*|^2
//       + 2 eta mu(t) <y - y*, v> + 1/2 mu(t)^2 |v|^2.
double energy_shbfop(double eta, std::span<const double> y_star, double t,
                     std::span<const double> x, std::span<const double> y,
                     std::span<const double> v, const ScalarSchedule& mu,
                     double lambda);

// Scaled potential of the improved-rate bound:
//   Phi~ = g(t) [ (f(y) - inf f) + |x|^2 / (2 b(t)) ],  g(t) = int_{(t+t0)/2}^t b.
double scaled_phi(double t, std::span<const double> y, std::span<const double> x,
                  const ScalarSchedule& b, const ObjectiveProblem& problem,
                  double t0);

// Midpoints of the admissible eta intervals identified in the dissipation
// arguments.
double default_eta_objective(double lambda, const ScalarSchedule& b);
double default_eta_operator(double lambda, double ell);

// Energy evaluated along a trajectory (objective: companion block is the
// velocity; operator: velocity recovered from the companion).
std::vector<double> energy_series(const Trajectory& traj, double eta);

// Least-squares line through (log t, log value) over [t_lo, t_hi]. Decay
// claims are one-sided: pass iff slope <= target + tolerance.
struct RateFit {
    std::string metric;
    double window_lo = 0.0;
    double window_hi = 0.0;
    double slope = 0.0;
    double intercept = 0.0;
    double r_squared = 0.0;
    double target = 0.0;
    double tolerance = 0.0;
    bool pass = false;
    bool clipped = false; // zero values clipped at 1e-300 before log
};

RateFit fit_rate(std::span<const double> grid, std::span<const double> values,
                 double window_lo, double window_hi, double target,
                 double tolerance, const std::string& metric = {});

} // namespace dynlab
