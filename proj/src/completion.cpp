#include "ttra/completion.hpp"

#include <chrono>

namespace ttra {

double objective(const TTTensor &x, const SampleSet &omega) {
    return 0.5 * residual_values(x, omega).squaredNorm();
}

Vector residual_values(const TTTensor &x, const SampleSet &omega) {
    require(x.shape() == omega.shape, "residual: shape mismatch");
    return gather(x, omega) - omega.values;
}

double exact_step(const Vector &dir_samples, const Vector &resid) {
    require(dir_samples.size() == resid.size(), "exact_step: length mismatch");
    double den = dir_samples.squaredNorm();
    if (den == 0.0)
        throw InvalidArgument("exact_step: direction vanishes on the sample set");
    return -resid.dot(dir_samples) / den;
}

TangentVector riemannian_gradient(const TTTensor &x, const SampleSet &omega) {
    auto frame = std::make_shared<OrthoFrame>(x);
    return project_tangent(frame, omega, residual_values(x, omega), x.order() - 1);
}

CGResult cg_solve(const TTTensor &x0, const SampleSet &omega, const CGConfig &cfg) {
    cfg.validate();
    require(x0.shape() == omega.shape, "cg_solve: shape mismatch");
    using Clock = std::chrono::steady_clock;
    const auto t0 = Clock::now();
    auto wall_ms = [&] {
        return std::chrono::duration<double, std::milli>(Clock::now() - t0).count();
    };

    CGResult res;
    res.x = x0;
    const double norm_a = omega.values.norm();
    const Index gauge = x0.order() - 1;
    const std::vector<Index> ranks = x0.ranks();

    auto frame = std::make_shared<OrthoFrame>(res.x);
    Vector resid = gather(res.x, omega) - omega.values;
    double f = 0.5 * resid.squaredNorm();
    res.f_value = f;

    TangentVector grad;
    double grad_norm = 0.0;
    TTTensor prev_grad_tt, prev_dir_tt;
    double prev_grad_norm_sq = 0.0;
    bool have_prev = false;

    for (Index j = 0; j < cfg.j_max; ++j) {
        // Convergence on the relative residual.
        if (norm_a > 0.0 && std::sqrt(2.0 * f) / norm_a < cfg.eps_rel) {
            res.stop = CGStop::relative_residual;
            break;
        }
        grad = project_tangent(frame, omega, resid, gauge);
        grad_norm = grad.norm();
        res.grad_norm = grad_norm;
        if (grad_norm < cfg.eps_grad) {
            res.stop = CGStop::gradient;
            break;
        }

        TangentVector dir = scale(grad, -1.0);
        if (have_prev) {
            TangentVector tg = project_tangent(frame, prev_grad_tt, gauge);
            TangentVector td = project_tangent(frame, prev_dir_tt, gauge);
            double beta = (inner(grad, grad) - inner(grad, tg)) / prev_grad_norm_sq;
            if (beta < 0.0) beta = 0.0;
            dir = axpy(-1.0, grad, beta, td);
            if (inner(dir, grad) >= 0.0) dir = scale(grad, -1.0);
        }

        TTTensor dir_tt = tangent_to_tt(dir);
        Vector dir_omega = gather(dir_tt, omega);
        double den = dir_omega.squaredNorm();
        if (den == 0.0) {
            // Degenerate conjugate direction: retry with steepest descent.
            dir = scale(grad, -1.0);
            dir_tt = tangent_to_tt(dir);
            dir_omega = gather(dir_tt, omega);
            den = dir_omega.squaredNorm();
            if (den == 0.0) {
                res.stop = CGStop::degenerate;
                break;
            }
        }
        double t = -resid.dot(dir_omega) / den;

        // Rounding retraction; halve the step until the cost does not grow.
        TTTensor x_next;
        Vector resid_next;
        double f_next = 0.0;
        bool accepted = false;
        for (int bt = 0; bt < 40; ++bt) {
            x_next = tt_round(tt_axpy(res.x, t, dir_tt), ranks);
            resid_next = gather(x_next, omega) - omega.values;
            f_next = 0.5 * resid_next.squaredNorm();
            if (f_next <= f) {
                accepted = true;
                break;
            }
            t *= 0.5;
        }
        if (!accepted) {
            res.stop = CGStop::stagnation;
            break;
        }

        prev_grad_tt = tangent_to_tt(grad);
        prev_dir_tt = std::move(dir_tt);
        prev_grad_norm_sq = grad_norm * grad_norm;
        have_prev = true;

        double f_prev = f;
        res.x = std::move(x_next);
        frame = std::make_shared<OrthoFrame>(res.x);
        resid = std::move(resid_next);
        f = f_next;
        res.f_value = f;
        res.iters = j + 1;

        CGTraceRow row;
        row.iter = res.iters;
        row.f_omega_rel = (norm_a > 0.0) ? f / (norm_a * norm_a) : f;
        row.grad_norm = grad_norm;
        row.wall_ms = wall_ms();
        res.trace.push_back(row);

        // Relative progress of sqrt(2 f) below tolerance stalls the solver.
        if (cfg.eps_stagnation > 0.0 && f > 0.0) {
            double prog = (std::sqrt(2.0 * f_prev) - std::sqrt(2.0 * f)) /
                          std::sqrt(2.0 * f);
            if (prog < cfg.eps_stagnation) {
                res.stop = CGStop::stagnation;
                break;
            }
        }
    }
    if (res.stop == CGStop::none) res.stop = CGStop::budget;
    res.f_value = f;
    return res;
}

} // namespace ttra
