#pragma once

#include <optional>
#include <string>

#include "dynlab/vec.hpp"

namespace dynlab {

// Closed-form time coefficient families. Restricting to these four keeps
// every assumption query (sup/inf/limit of log-derivative ratios, square
// integrability over [t0, inf)) answerable analytically instead of by
// sampling an unbounded interval.
enum class ScheduleFamily { constant, power, power_log, exponential };

std::string to_string(ScheduleFamily f);

class ScalarSchedule {
  public:
    // constant:     c
    // power:        c * t^r           (t0 > 0 unless r == 0)
    // power_log:    c * t^r * log(t)  (t0 > 1)
    // exponential:  c * exp(a*t)
    static ScalarSchedule constant(double c, double domain_start = 0.0);
    static ScalarSchedule power(double c, double r, double domain_start);
    static ScalarSchedule power_log(double c, double r, double domain_start);
    static ScalarSchedule exponential(double c, double a, double domain_start = 0.0);

    double value(double t) const;
    double derivative(double t) const;

    ScheduleFamily family() const { return family_; }
    double coeff() const { return coeff_; }
    // r for power families, a for exponential, 0 for constant.
    double shape() const { return shape_; }
    double domain_start() const { return domain_start_; }

    bool nondecreasing() const;

    // sup / inf / limit of d/dt log value(t) = derivative/value over [t0, inf).
    double sup_log_derivative() const;
    double inf_log_derivative() const;
    double limit_log_derivative() const;

    // Integral of value(t)^2 * t^weight_power over [t0, inf) finite?
    // weight 0 is the plain square-integrability condition, weight 1 feeds
    // the improved-rate bound, weight 2 the rescaled-system conditions.
    bool weighted_square_integrable(double weight_power) const;
    bool square_integrable() const { return weighted_square_integrable(0.0); }

    // Closed-form antiderivative difference: integral of value over [lo, hi].
    double integral(double lo, double hi) const;

    friend bool operator==(const ScalarSchedule&, const ScalarSchedule&) = default;

  private:
    ScalarSchedule(ScheduleFamily f, double c, double s, double t0)
        : family_(f), coeff_(c), shape_(s), domain_start_(t0) {}

    double antiderivative(double t) const;

    ScheduleFamily family_;
    double coeff_;
    double shape_;
    double domain_start_;
};

// Limit of num(t)/den(t) as t -> inf, comparing growth signatures
// (exponential rate, then power, then log exponent). Returns +inf when the
// numerator dominates.
double limit_ratio(const ScalarSchedule& num, const ScalarSchedule& den);

// True when mu/gamma is constant in t (same family and shape), the only case
// in which sup/inf of mu'(t)/gamma(t) reduces to the single-schedule query.
bool proportional(const ScalarSchedule& a, const ScalarSchedule& b);

// Time-dependent diffusion coefficient: scalar multiplier times a fixed
// operator. sigma(t) = multiplier(t) * op, noise enters the companion block.
struct DiffusionSchedule {
    std::optional<ScalarSchedule> multiplier; // nullopt = identically zero
    Mat op;                                   // empty = identity

    static DiffusionSchedule zero() { return {}; }
    static DiffusionSchedule scalar(ScalarSchedule m) { return {std::move(m), Mat{}}; }

    bool is_zero() const { return !multiplier.has_value(); }
    bool has_operator() const { return op.rows != 0; }

    double multiplier_value(double t) const {
        return multiplier ? multiplier->value(t) : 0.0;
    }

    // ||sigma(t)||_HS = multiplier(t) * ||op||_F (identity has ||I||_F = sqrt(d),
    // resolved against the problem dimension by the caller).
    double hs_norm(double t, std::size_t dim) const;

    bool square_integrable() const {
        return is_zero() || multiplier->square_integrable();
    }
    bool weighted_square_integrable(double weight_power) const {
        return is_zero() || multiplier->weighted_square_integrable(weight_power);
    }

    friend bool operator==(const DiffusionSchedule&, const DiffusionSchedule&) = default;
};

} // namespace dynlab
