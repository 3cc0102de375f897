#include "dynlab/problems.hpp"

#include <algorithm>
#include <cmath>
#include <memory>
#include <random>

namespace dynlab {

double spectral_norm(const Mat& m) {
    if (m.rows == 0 || m.cols == 0) return 0.0;
    // Power iteration on A^T A with a deterministic, non-degenerate start.
    const std::size_t n = m.cols;
    Vec v(n), av(m.rows), atav(n);
    for (std::size_t j = 0; j < n; ++j) v[j] = 1.0 + 0.01 * static_cast<double>(j);
    const Mat mt = m.transposed();
    double lambda = 0.0;
    for (int it = 0; it < 1000; ++it) {
        m.apply(v, av);
        mt.apply(av, atav);
        const double nv = norm(atav);
        if (nv == 0.0) return 0.0;
        for (std::size_t j = 0; j < n; ++j) v[j] = atav[j] / nv;
        const double prev = lambda;
        lambda = nv;
        if (it > 10 && std::abs(lambda - prev) <= 1e-15 * lambda) break;
    }
    return std::sqrt(lambda);
}

int problem_dim(const Problem& p) {
    return std::visit([](const auto& q) { return q.dim; }, p);
}

ObjectiveProblem make_quadratic(const Vec& spectrum, const Vec& minimizer) {
    if (spectrum.empty()) throw InvalidProblemError("quadratic: empty spectrum");
    for (double q : spectrum)
        if (!(q > 0.0))
            throw InvalidProblemError("quadratic: spectrum entries must be > 0");
    if (minimizer.size() != spectrum.size())
        throw InvalidProblemError("quadratic: minimizer dimension mismatch");

    auto q = std::make_shared<Vec>(spectrum);
    auto ystar = std::make_shared<Vec>(minimizer);
    const int dim = static_cast<int>(spectrum.size());

    ObjectiveProblem p;
    p.dim = dim;
    p.eval = [q, ystar](std::span<const double> x) {
        double s = 0.0;
        for (std::size_t i = 0; i < q->size(); ++i) {
            const double d = x[i] - (*ystar)[i];
            s += (*q)[i] * d * d;
        }
        return 0.5 * s;
    };
    p.grad = [q, ystar](std::span<const double> x, std::span<double> g) {
        for (std::size_t i = 0; i < q->size(); ++i)
            g[i] = (*q)[i] * (x[i] - (*ystar)[i]);
    };
    p.lipschitz_grad = *std::max_element(spectrum.begin(), spectrum.end());
    p.inf_value = 0.0;
    p.minimizer = minimizer;
    p.argmin_distance = [ystar](std::span<const double> x) {
        return distance(x, *ystar);
    };
    return p;
}

MonotoneProblem make_rotation() {
    MonotoneProblem p;
    p.dim = 2;
    p.eval = [](std::span<const double> x, std::span<double> v) {
        v[0] = -x[1];
        v[1] = x[0];
    };
    p.lipschitz = 1.0;
    p.zero = {0.0, 0.0};
    p.zer_distance = [](std::span<const double> x) { return norm(x); };
    return p;
}

MonotoneProblem make_bilinear_saddle(const Mat& coupling) {
    if (coupling.rows == 0 || coupling.cols == 0)
        throw InvalidProblemError("saddle: empty coupling matrix");
    for (double v : coupling.a)
        if (!std::isfinite(v))
            throw InvalidProblemError("saddle: coupling entries must be finite");

    auto a = std::make_shared<Mat>(coupling);
    auto at = std::make_shared<Mat>(coupling.transposed());
    const std::size_t m = coupling.rows, n = coupling.cols;

    MonotoneProblem p;
    p.dim = static_cast<int>(m + n);
    p.eval = [a, at, m, n](std::span<const double> z, std::span<double> v) {
        a->apply(z.subspan(m, n), v.first(m));
        at->apply(z.first(m), v.subspan(m, n));
        for (std::size_t i = 0; i < n; ++i) v[m + i] = -v[m + i];
    };
    p.lipschitz = spectral_norm(coupling);
    p.zero.assign(m + n, 0.0);
    p.zer_distance = [](std::span<const double> x) { return norm(x); };
    return p;
}

MonotoneProblem gradient_as_operator(const ObjectiveProblem& p) {
    MonotoneProblem op;
    op.dim = p.dim;
    op.eval = p.grad;
    op.lipschitz = p.lipschitz_grad;
    op.zero = p.minimizer;
    op.zer_distance = p.argmin_distance;
    return op;
}

namespace {

Vec sample_in_ball(std::mt19937_64& rng, const Vec& center, double radius) {
    std::normal_distribution<double> gauss(0.0, 1.0);
    std::uniform_real_distribution<double> unif(0.0, 1.0);
    const std::size_t d = center.size();
    Vec x(d);
    double n2 = 0.0;
    for (std::size_t i = 0; i < d; ++i) {
        x[i] = gauss(rng);
        n2 += x[i] * x[i];
    }
    const double n = std::sqrt(n2);
    const double scale =
        n > 0.0 ? radius * std::pow(unif(rng), 1.0 / static_cast<double>(d)) / n : 0.0;
    for (std::size_t i = 0; i < d; ++i) x[i] = center[i] + scale * x[i];
    return x;
}

} // namespace

ProblemReport verify_problem(const Problem& p, int samples, double radius,
                             std::uint64_t seed) {
    if (samples < 1) throw InvalidInputError("verify_problem: samples >= 1 required");
    if (!(radius > 0.0)) throw InvalidInputError("verify_problem: radius > 0 required");

    ProblemReport report;
    report.seed = seed;
    report.samples = samples;
    report.radius = radius;

    std::mt19937_64 rng(seed);

    if (const auto* obj = std::get_if<ObjectiveProblem>(&p)) {
        Vec gx(static_cast<std::size_t>(obj->dim)), gy(static_cast<std::size_t>(obj->dim));
        Vec diff(static_cast<std::size_t>(obj->dim));
        for (int k = 0; k < samples; ++k) {
            const Vec x = sample_in_ball(rng, obj->minimizer, radius);
            const Vec y = sample_in_ball(rng, obj->minimizer, radius);
            obj->grad(x, gx);
            obj->grad(y, gy);
            for (int i = 0; i < obj->dim; ++i) diff[i] = y[i] - x[i];
            // gradient inequality f(y) >= f(x) + <grad f(x), y - x>
            const double convexity_gap = obj->eval(x) + dot(gx, diff) - obj->eval(y);
            report.max_structure_violation =
                std::max(report.max_structure_violation, convexity_gap);
            const double lip_gap =
                distance(gx, gy) - obj->lipschitz_grad * norm(diff);
            report.max_lipschitz_violation =
                std::max(report.max_lipschitz_violation, lip_gap);
        }
    } else {
        const auto& mono = std::get<MonotoneProblem>(p);
        Vec vx(static_cast<std::size_t>(mono.dim)), vy(static_cast<std::size_t>(mono.dim));
        Vec diff(static_cast<std::size_t>(mono.dim)), vdiff(static_cast<std::size_t>(mono.dim));
        for (int k = 0; k < samples; ++k) {
            const Vec x = sample_in_ball(rng, mono.zero, radius);
            const Vec y = sample_in_ball(rng, mono.zero, radius);
            mono.eval(x, vx);
            mono.eval(y, vy);
            for (int i = 0; i < mono.dim; ++i) {
                diff[i] = y[i] - x[i];
                vdiff[i] = vy[i] - vx[i];
            }
            report.max_structure_violation =
                std::max(report.max_structure_violation, -dot(vdiff, diff));
            const double lip_gap = norm(vdiff) - mono.lipschitz * norm(diff);
            report.max_lipschitz_violation =
                std::max(report.max_lipschitz_violation, lip_gap);
        }
    }

    report.pass = report.max_structure_violation <= 1e-8 &&
                  report.max_lipschitz_violation <= 1e-8;
    return report;
}

} // namespace dynlab
