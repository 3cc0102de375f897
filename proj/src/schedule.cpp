#include "dynlab/schedule.hpp"

#include <cmath>
#include <limits>

namespace dynlab {

namespace {
constexpr double kInf = std::numeric_limits<double>::infinity();

// t^r with a fast path for small integer exponents; the integrator spends
// most of its time here for power-family coefficients like b(t) = t^2.
double pow_fast(double t, double r) {
    const int ri = static_cast<int>(r);
    if (static_cast<double>(ri) == r && ri >= -4 && ri <= 4) {
        double p = 1.0;
        const double base = t;
        int n = ri < 0 ? -ri : ri;
        for (int k = 0; k < n; ++k) p *= base;
        return ri < 0 ? 1.0 / p : p;
    }
    return std::pow(t, r);
}
} // namespace

std::string to_string(ScheduleFamily f) {
    switch (f) {
        case ScheduleFamily::constant: return "constant";
        case ScheduleFamily::power: return "power";
        case ScheduleFamily::power_log: return "power_log";
        case ScheduleFamily::exponential: return "exponential";
    }
    return "?";
}

ScalarSchedule ScalarSchedule::constant(double c, double domain_start) {
    if (!(c > 0.0)) throw InvalidScheduleError("constant schedule requires c > 0");
    return {ScheduleFamily::constant, c, 0.0, domain_start};
}

ScalarSchedule ScalarSchedule::power(double c, double r, double domain_start) {
    if (!(c > 0.0)) throw InvalidScheduleError("power schedule requires c > 0");
    if (r != 0.0 && !(domain_start > 0.0))
        throw InvalidScheduleError("power schedule with r != 0 requires domain_start > 0");
    return {ScheduleFamily::power, c, r, domain_start};
}

ScalarSchedule ScalarSchedule::power_log(double c, double r, double domain_start) {
    if (!(c > 0.0)) throw InvalidScheduleError("power_log schedule requires c > 0");
    if (!(domain_start > 1.0))
        throw InvalidScheduleError("power_log schedule requires domain_start > 1");
    return {ScheduleFamily::power_log, c, r, domain_start};
}

ScalarSchedule ScalarSchedule::exponential(double c, double a, double domain_start) {
    if (!(c > 0.0)) throw InvalidScheduleError("exponential schedule requires c > 0");
    if (a == 0.0) return {ScheduleFamily::constant, c, 0.0, domain_start};
    return {ScheduleFamily::exponential, c, a, domain_start};
}

double ScalarSchedule::value(double t) const {
    switch (family_) {
        case ScheduleFamily::constant: return coeff_;
        case ScheduleFamily::power: return coeff_ * pow_fast(t, shape_);
        case ScheduleFamily::power_log: return coeff_ * pow_fast(t, shape_) * std::log(t);
        case ScheduleFamily::exponential: return coeff_ * std::exp(shape_ * t);
    }
    return 0.0;
}

double ScalarSchedule::derivative(double t) const {
    switch (family_) {
        case ScheduleFamily::constant: return 0.0;
        case ScheduleFamily::power: return coeff_ * shape_ * pow_fast(t, shape_ - 1.0);
        case ScheduleFamily::power_log:
            return coeff_ * pow_fast(t, shape_ - 1.0) * (shape_ * std::log(t) + 1.0);
        case ScheduleFamily::exponential: return coeff_ * shape_ * std::exp(shape_ * t);
    }
    return 0.0;
}

bool ScalarSchedule::nondecreasing() const {
    switch (family_) {
        case ScheduleFamily::constant: return true;
        case ScheduleFamily::power: return shape_ >= 0.0;
        case ScheduleFamily::power_log:
            // (t^r log t)' = t^{r-1}(r log t + 1); for r < 0 the factor turns
            // negative past t = e^{-1/r}, so only r >= 0 is nondecreasing on
            // the whole of [t0, inf).
            return shape_ >= 0.0;
        case ScheduleFamily::exponential: return shape_ >= 0.0;
    }
    return false;
}

double ScalarSchedule::sup_log_derivative() const {
    switch (family_) {
        case ScheduleFamily::constant: return 0.0;
        case ScheduleFamily::power:
            // d/dt log = r/t: decreasing from r/t0 toward 0 when r > 0,
            // increasing toward 0 when r < 0.
            if (shape_ > 0.0) return shape_ / domain_start_;
            return 0.0;
        case ScheduleFamily::power_log: {
            // (r + 1/log t)/t with t0 > 1: decreasing for r >= 0.
            if (shape_ < 0.0)
                throw UnsupportedScheduleError(
                    "sup of log-derivative for power_log requires r >= 0");
            return shape_ / domain_start_ +
                   1.0 / (domain_start_ * std::log(domain_start_));
        }
        case ScheduleFamily::exponential: return shape_;
    }
    return 0.0;
}

double ScalarSchedule::inf_log_derivative() const {
    switch (family_) {
        case ScheduleFamily::constant: return 0.0;
        case ScheduleFamily::power:
            if (shape_ < 0.0) return shape_ / domain_start_;
            return 0.0;
        case ScheduleFamily::power_log:
            if (shape_ < 0.0)
                throw UnsupportedScheduleError(
                    "inf of log-derivative for power_log requires r >= 0");
            return 0.0;
        case ScheduleFamily::exponential: return shape_;
    }
    return 0.0;
}

double ScalarSchedule::limit_log_derivative() const {
    return family_ == ScheduleFamily::exponential ? shape_ : 0.0;
}

bool ScalarSchedule::weighted_square_integrable(double weight_power) const {
    switch (family_) {
        case ScheduleFamily::constant: return false; // c > 0 by construction
        case ScheduleFamily::power: return weight_power + 2.0 * shape_ < -1.0;
        case ScheduleFamily::power_log:
            // log^2 factors do not affect the power-law threshold except at
            // the boundary, where the integral still diverges.
            return weight_power + 2.0 * shape_ < -1.0;
        case ScheduleFamily::exponential: return shape_ < 0.0;
    }
    return false;
}

double ScalarSchedule::antiderivative(double t) const {
    switch (family_) {
        case ScheduleFamily::constant: return coeff_ * t;
        case ScheduleFamily::power:
            if (shape_ == -1.0) return coeff_ * std::log(t);
            return coeff_ * pow_fast(t, shape_ + 1.0) / (shape_ + 1.0);
        case ScheduleFamily::power_log: {
            if (shape_ == -1.0) {
                const double l = std::log(t);
                return coeff_ * 0.5 * l * l;
            }
            const double rp1 = shape_ + 1.0;
            return coeff_ * pow_fast(t, rp1) * (std::log(t) / rp1 - 1.0 / (rp1 * rp1));
        }
        case ScheduleFamily::exponential: return coeff_ * std::exp(shape_ * t) / shape_;
    }
    return 0.0;
}

double ScalarSchedule::integral(double lo, double hi) const {
    return antiderivative(hi) - antiderivative(lo);
}

double limit_ratio(const ScalarSchedule& num, const ScalarSchedule& den) {
    // value ~ c * exp(a t) * t^r * (log t)^l; compare signatures
    // lexicographically.
    auto signature = [](const ScalarSchedule& s) {
        struct Sig {
            double a, r, l;
        };
        switch (s.family()) {
            case ScheduleFamily::constant: return Sig{0.0, 0.0, 0.0};
            case ScheduleFamily::power: return Sig{0.0, s.shape(), 0.0};
            case ScheduleFamily::power_log: return Sig{0.0, s.shape(), 1.0};
            case ScheduleFamily::exponential: return Sig{s.shape(), 0.0, 0.0};
        }
        return Sig{0.0, 0.0, 0.0};
    };
    const auto n = signature(num);
    const auto d = signature(den);
    const double da = n.a - d.a, dr = n.r - d.r, dl = n.l - d.l;
    double lead = da;
    if (lead == 0.0) lead = dr;
    if (lead == 0.0) lead = dl;
    if (lead > 0.0) return kInf;
    if (lead < 0.0) return 0.0;
    return num.coeff() / den.coeff();
}

bool proportional(const ScalarSchedule& a, const ScalarSchedule& b) {
    return a.family() == b.family() && a.shape() == b.shape();
}

double DiffusionSchedule::hs_norm(double t, std::size_t dim) const {
    if (is_zero()) return 0.0;
    const double opnorm =
        has_operator() ? op.frobenius_norm() : std::sqrt(static_cast<double>(dim));
    return multiplier->value(t) * opnorm;
}

} // namespace dynlab
