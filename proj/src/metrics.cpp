#include "dynlab/metrics.hpp"

#include <cmath>

namespace dynlab {

std::vector<std::size_t> strided_indices(std::size_t n_points, std::size_t stride) {
    std::vector<std::size_t> idx;
    if (stride < 1) stride = 1;
    for (std::size_t i = 0; i < n_points; i += stride) idx.push_back(i);
    if (idx.back() != n_points - 1) idx.push_back(n_points - 1);
    return idx;
}

MetricEvaluator::MetricEvaluator(const SystemSpec& spec)
    : spec_(spec),
      v_(static_cast<std::size_t>(spec.dim())),
      diff_(static_cast<std::size_t>(spec.dim())) {}

std::vector<std::string> MetricEvaluator::names() const {
    if (spec_.objective()) return {"suboptimality", "velocity", "distance"};
    return {"residual", "residual_sq", "gap", "velocity", "distance"};
}

void MetricEvaluator::row(double t, std::span<const double> position,
                          std::span<const double> companion,
                          std::span<double> out) {
    const std::size_t d = v_.size();
    if (spec_.objective()) {
        const auto& obj = std::get<ObjectiveProblem>(spec_.problem);
        out[0] = obj.eval(position) - obj.inf_value;
        out[1] = norm(companion);
        out[2] = obj.argmin_distance(position);
        return;
    }
    const auto& mono = std::get<MonotoneProblem>(spec_.problem);
    mono.eval(position, v_);
    const double r2 = dot(v_, v_);
    out[0] = std::sqrt(r2);
    out[1] = r2;
    for (std::size_t k = 0; k < d; ++k) diff_[k] = position[k] - mono.zero[k];
    out[2] = dot(diff_, v_);
    const double mu_t = spec_.variant == SystemVariant::sfogda_alt
                            ? spec_.beta
                            : spec_.mu->value(t);
    double x2 = 0.0;
    for (std::size_t k = 0; k < d; ++k) {
        const double xk = companion[k] - mu_t * v_[k];
        x2 += xk * xk;
    }
    out[3] = std::sqrt(x2);
    out[4] = mono.zer_distance(position);
}

MetricSeries compute_metrics(const Trajectory& traj, const Problem& problem,
                             std::size_t stride) {
    if (problem_dim(problem) != traj.dim)
        throw InvalidInputError("compute_metrics: dimension mismatch");

    const auto idx = strided_indices(traj.grid.size(), stride);
    MetricSeries series;
    series.grid.reserve(idx.size());
    for (auto i : idx) series.grid.push_back(traj.grid[i]);

    MetricEvaluator eval(traj.spec);
    const auto names = eval.names();
    for (const auto& name : names) series.values[name].reserve(idx.size());
    Vec row(names.size());
    for (auto i : idx) {
        eval.row(traj.grid[i], traj.position(i), traj.companion(i), row);
        for (std::size_t m = 0; m < names.size(); ++m)
            series.values[names[m]].push_back(row[m]);
    }
    return series;
}

double energy_shbf(double eta, std::span<const double> y_star, double t,
                   std::span<const double> y, std::span<const double> x,
                   const ScalarSchedule& b, const ObjectiveProblem& problem,
                   double lambda) {
    if (!(eta > 0.0 && eta < lambda))
        throw InvalidParameterError("energy_shbf: eta must lie in (0, lambda)");
    double mix2 = 0.0, dev2 = 0.0;
    for (std::size_t k = 0; k < y.size(); ++k) {
        const double dev = y[k] - y_star[k];
        const double mix = eta * dev + x[k];
        mix2 += mix * mix;
        dev2 += dev * dev;
    }
    return b.value(t) * (problem.eval(y) - problem.inf_value) + 0.5 * mix2 +
           0.5 * eta * (lambda - eta) * dev2;
}

double energy_shbfop(double eta, std::span<const double> y_star, double t,
                     std::span<const double> x, std::span<const double> y,
                     std::span<const double> v, const ScalarSchedule& mu,
                     double lambda) {
    if (!(eta > 0.0 && eta < lambda))
        throw InvalidParameterError("energy_shbfop: eta must lie in (0, lambda)");
    const double mu_t = mu.value(t);
    double mix2 = 0.0, dev2 = 0.0, gap = 0.0, v2 = 0.0;
    for (std::size_t k = 0; k < y.size(); ++k) {
        const double dev = y[k] - y_star[k];
        const double mix = 2.0 * eta * dev + 2.0 * x[k] + mu_t * v[k];
        mix2 += mix * mix;
        dev2 += dev * dev;
        gap += dev * v[k];
        v2 += v[k] * v[k];
    }
    return 0.5 * mix2 + 2.0 * eta * (lambda - eta) * dev2 + 2.0 * eta * mu_t * gap +
           0.5 * mu_t * mu_t * v2;
}

double scaled_phi(double t, std::span<const double> y, std::span<const double> x,
                  const ScalarSchedule& b, const ObjectiveProblem& problem,
                  double t0) {
    if (!(t > t0)) throw InvalidParameterError("scaled_phi: t > t0 required");
    const double g = b.integral(0.5 * (t + t0), t);
    const double x2 = dot(x, x);
    return g * ((problem.eval(y) - problem.inf_value) + x2 / (2.0 * b.value(t)));
}

double default_eta_objective(double lambda, const ScalarSchedule& b) {
    return 0.5 * (b.sup_log_derivative() + lambda);
}

double default_eta_operator(double lambda, double ell) {
    return lambda - 0.5 * (lambda - ell);
}

std::vector<double> energy_series(const Trajectory& traj, double eta) {
    std::vector<double> es;
    es.reserve(traj.grid.size());
    if (traj.variant == SystemVariant::shbf) {
        const auto& obj = std::get<ObjectiveProblem>(traj.spec.problem);
        for (std::size_t i = 0; i < traj.grid.size(); ++i)
            es.push_back(energy_shbf(eta, obj.minimizer, traj.grid[i],
                                     traj.position(i), traj.companion(i),
                                     *traj.spec.b, obj, traj.spec.lambda));
    } else if (traj.variant == SystemVariant::shbfop_alt) {
        const auto& mono = std::get<MonotoneProblem>(traj.spec.problem);
        const std::size_t d = static_cast<std::size_t>(traj.dim);
        Vec v(d), x(d);
        for (std::size_t i = 0; i < traj.grid.size(); ++i) {
            const auto y = traj.position(i);
            const auto z = traj.companion(i);
            mono.eval(y, v);
            const double mu_t = traj.spec.mu->value(traj.grid[i]);
            for (std::size_t k = 0; k < d; ++k) x[k] = z[k] - mu_t * v[k];
            es.push_back(energy_shbfop(eta, mono.zero, traj.grid[i], x, y, v,
                                       *traj.spec.mu, traj.spec.lambda));
        }
    } else {
        throw InvalidInputError("energy_series: shbf or shbfop_alt trajectory required");
    }
    return es;
}

RateFit fit_rate(std::span<const double> grid, std::span<const double> values,
                 double window_lo, double window_hi, double target,
                 double tolerance, const std::string& metric) {
    if (grid.size() != values.size())
        throw InvalidInputError("fit_rate: grid/value size mismatch");
    if (!(window_lo > 0.0) || !(window_hi > window_lo))
        throw InvalidInputError("fit_rate: window must satisfy 0 < lo < hi");

    RateFit fit;
    fit.metric = metric;
    fit.window_lo = window_lo;
    fit.window_hi = window_hi;
    fit.target = target;
    fit.tolerance = tolerance;

    double sx = 0.0, sy = 0.0, sxx = 0.0, sxy = 0.0, syy = 0.0;
    std::size_t n = 0;
    for (std::size_t i = 0; i < grid.size(); ++i) {
        const double t = grid[i];
        if (t < window_lo || t > window_hi) continue;
        double v = values[i];
        if (v < 1e-300) {
            v = 1e-300;
            fit.clipped = true;
        }
        const double lx = std::log(t);
        const double ly = std::log(v);
        sx += lx;
        sy += ly;
        sxx += lx * lx;
        sxy += lx * ly;
        syy += ly * ly;
        ++n;
    }
    if (n < 8) throw InsufficientDataError("fit_rate: fewer than 8 points in window");

    const double dn = static_cast<double>(n);
    const double vxx = sxx - sx * sx / dn;
    const double vxy = sxy - sx * sy / dn;
    const double vyy = syy - sy * sy / dn;
    fit.slope = vxy / vxx;
    fit.intercept = (sy - fit.slope * sx) / dn;
    fit.r_squared = vyy > 0.0 ? (vxy * vxy) / (vxx * vyy) : 1.0;
    fit.pass = fit.slope <= target + tolerance;
    return fit;
}

} // namespace dynlab
