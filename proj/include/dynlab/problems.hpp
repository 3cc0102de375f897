#pragma once

#include <cstdint>
#include <functional>
#include <variant>

#include "dynlab/vec.hpp"

namespace dynlab {

// Convex objective with Lipschitz gradient and a designated minimizer.
// Evaluators are in-place over spans so the integrator inner loop stays
// allocation-free. Immutable after construction, safe to share across
// ensemble workers.
struct ObjectiveProblem {
    int dim = 0;
    std::function<double(std::span<const double>)> eval;                     // f
    std::function<void(std::span<const double>, std::span<double>)> grad;    // grad f
    double lipschitz_grad = 0.0;
    double inf_value = 0.0;
    Vec minimizer;
    std::function<double(std::span<const double>)> argmin_distance;

    Vec grad_at(std::span<const double> x) const {
        Vec g(static_cast<std::size_t>(dim));
        grad(x, g);
        return g;
    }
};

// Monotone L-Lipschitz operator with a designated zero.
struct MonotoneProblem {
    int dim = 0;
    std::function<void(std::span<const double>, std::span<double>)> eval;    // V
    double lipschitz = 0.0;
    Vec zero;
    std::function<double(std::span<const double>)> zer_distance;

    Vec eval_at(std::span<const double> x) const {
        Vec v(static_cast<std::size_t>(dim));
        eval(x, v);
        return v;
    }
};

using Problem = std::variant<ObjectiveProblem, MonotoneProblem>;

int problem_dim(const Problem& p);

// f(x) = 1/2 sum_i q_i (x_i - y*_i)^2 with all q_i > 0; the canonical smooth
// strongly convex test instance.
ObjectiveProblem make_quadratic(const Vec& spectrum, const Vec& minimizer);

// Counterclockwise rotation by pi/2 in R^2: V(x1,x2) = (-x2, x1). Monotone
// with equality (skew), a zero at the origin, Lipschitz constant 1.
MonotoneProblem make_rotation();

// Saddle operator of Phi(x,y) = <x, A y>: V(x,y) = (A y, -A^T x) on R^{m+n}.
MonotoneProblem make_bilinear_saddle(const Mat& coupling);

// V = grad f; zeros of V are the minimizers of f.
MonotoneProblem gradient_as_operator(const ObjectiveProblem& p);

// Sampled check of the structural assumptions: convexity (objective) or
// monotonicity (operator), plus the Lipschitz bound, over `samples` random
// pairs drawn uniformly from the ball of the given radius around the
// designated solution.
struct ProblemReport {
    std::uint64_t seed = 0;
    int samples = 0;
    double radius = 0.0;
    double max_structure_violation = 0.0; // convexity resp. monotonicity
    double max_lipschitz_violation = 0.0;
    bool pass = false;
};

ProblemReport verify_problem(const Problem& p, int samples, double radius,
                             std::uint64_t seed);

} // namespace dynlab
