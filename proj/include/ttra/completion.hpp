#pragma once

#include "ttra/sampling.hpp"
#include "ttra/tangent.hpp"

namespace ttra {

/// Inner fixed-rank solver configuration. eps_rel is the relative-residual
/// stop sqrt(2 f) / ||A_omega||, eps_grad the gradient-norm stop, and
/// eps_stagnation the relative-progress stop on sqrt(2 f) values; 0 disables
/// a tolerance-based stop.
struct CGConfig {
    Index j_max = 15;
    double eps_grad = 1e-8;
    double eps_rel = 1e-8;
    double eps_stagnation = 1e-8;

    void validate() const {
        require(j_max >= 0, "CGConfig: j_max must be non-negative");
        require(eps_grad >= 0 && eps_rel >= 0 && eps_stagnation >= 0,
                "CGConfig: tolerances must be non-negative");
    }
};

enum class CGStop { none, budget, gradient, relative_residual, stagnation, degenerate };

struct CGTraceRow {
    Index iter = 0;        // completed retraction steps
    double f_omega_rel = 0; // f / ||A_omega||^2
    double grad_norm = 0;
    double wall_ms = 0;
};

struct CGResult {
    TTTensor x;
    std::vector<CGTraceRow> trace;
    CGStop stop = CGStop::none;
    Index iters = 0;
    double f_value = 0;
    double grad_norm = 0;
};

/// Solver state kept across inner iterations; dir falls back to the
/// steepest-descent direction whenever it fails the descent test.
struct CGState {
    TTTensor x;
    TangentVector grad;
    TangentVector dir;
    double f_val = 0;
    double grad_norm = 0;
    Index iter = 0;
};

/// f(x) = 1/2 sum over the set of (x[idx] - value)^2.
double objective(const TTTensor &x, const SampleSet &omega);

/// Values of the Euclidean gradient restricted to the set: x[idx] - value.
Vector residual_values(const TTTensor &x, const SampleSet &omega);

/// Exact minimizer of the quadratic t -> 1/2 ||resid + t*dir||^2:
/// t = -<resid, dir> / ||dir||^2. Throws on a zero direction.
double exact_step(const Vector &dir_samples, const Vector &resid);

/// Projection of the sparse residual onto the tangent space at x.
TangentVector riemannian_gradient(const TTTensor &x, const SampleSet &omega);

/// Riemannian conjugate gradient on the fixed-rank manifold: projected
/// residual gradient, Polak-Ribiere direction with non-negativity clamp,
/// transport by tangent projection, exact line search on the linearized
/// direction, rounding retraction with a monotonicity backtrack.
CGResult cg_solve(const TTTensor &x0, const SampleSet &omega, const CGConfig &cfg);

} // namespace ttra
