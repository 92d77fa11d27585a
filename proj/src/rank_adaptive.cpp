#include "ttra/rank_adaptive.hpp"

#include <algorithm>
#include <chrono>
#include <unordered_set>

#include <Eigen/SVD>

namespace ttra {

void RankVector::validate(const std::vector<Index> &shape) const {
    require(r.size() + 1 == shape.size(), "RankVector: length must be d-1");
    Index left = 1, total = 1;
    for (Index n : shape) total *= n;
    for (std::size_t k = 0; k < r.size(); ++k) {
        left *= shape[k];
        Index right = total / left;
        require(r[k] >= 1, "RankVector: ranks must be positive");
        require(r[k] <= std::min(left, right),
                "RankVector: rank exceeds unfolding bound");
    }
}

void RRAMConfig::validate(Index d) const {
    require(eps_omega > 0 && eps_omega < 1, "RRAMConfig: eps_omega must be in (0,1)");
    require(eps_grad > 0 && eps_grad < 1, "RRAMConfig: eps_grad must be in (0,1)");
    require(eps_gamma >= 0, "RRAMConfig: eps_gamma must be non-negative");
    require(delta >= 0 && delta < 1, "RRAMConfig: delta must be in [0,1)");
    require(j_max >= 0 && k_max >= 0, "RRAMConfig: iteration caps must be non-negative");
    require(eps_decrease > 0, "RRAMConfig: eps_decrease must be positive");
    require(static_cast<Index>(r_max.size()) == d - 1 &&
                static_cast<Index>(s_max.size()) == d - 1,
            "RRAMConfig: per-bond caps must have d-1 entries");
}

RRAMConfig RRAMConfig::defaults(Index d) {
    RRAMConfig cfg;
    cfg.r_max.assign(d - 1, 10);
    cfg.s_max.assign(d - 1, 8);
    return cfg;
}

std::string to_string(RRAMAction a) {
    switch (a) {
    case RRAMAction::cg: return "cg";
    case RRAMAction::increase: return "increase";
    case RRAMAction::decrease: return "decrease";
    case RRAMAction::stop_overfit: return "stop-overfit";
    case RRAMAction::stop_converged: return "stop-converged";
    case RRAMAction::stop_budget: return "stop-budget";
    }
    return "unknown";
}

RRAMAction rram_action_from_string(const std::string &s) {
    if (s == "cg") return RRAMAction::cg;
    if (s == "increase") return RRAMAction::increase;
    if (s == "decrease") return RRAMAction::decrease;
    if (s == "stop-overfit") return RRAMAction::stop_overfit;
    if (s == "stop-converged") return RRAMAction::stop_converged;
    if (s == "stop-budget") return RRAMAction::stop_budget;
    throw InvalidArgument("unknown trace action: " + s);
}

Index estimated_rank(const SingularSpectrum &spec, Index s) {
    require(s >= 1, "estimated_rank: cap must be at least 1");
    const Vector &sigma = spec.values;
    if (sigma.size() == 0 || sigma[0] <= 0.0) return 0;
    Index best = 0;
    double best_gap = -1.0;
    Index upto = std::min<Index>(s, sigma.size());
    for (Index j = 0; j < upto; ++j) {
        if (sigma[j] <= 0.0) break;
        double next = (j + 1 < sigma.size()) ? sigma[j + 1] : 0.0;
        double gap = (sigma[j] - next) / sigma[j];
        if (gap > best_gap) {
            best_gap = gap;
            best = j + 1;
        }
    }
    return best;
}

Index delta_rank(const SingularSpectrum &spec, double delta) {
    require(delta >= 0.0 && delta <= 1.0, "delta_rank: delta must be in [0,1]");
    const Vector &sigma = spec.values;
    if (sigma.size() == 0 || sigma[0] <= 0.0) return 0;
    for (Index j = 0; j < sigma.size(); ++j) {
        if (sigma[j] <= 0.0) return j; // rank reached without hitting the gap
        double next = (j + 1 < sigma.size()) ? sigma[j + 1] : 0.0;
        double gap = (sigma[j] - next) / sigma[j];
        if (gap >= delta) return j + 1;
    }
    return sigma.size();
}

RankVector delta_rank_tt(const TTTensor &x, double delta) {
    const Index d = x.order();
    std::vector<TTCore> cores = x.cores();
    for (Index k = d - 1; k > 0; --k) detail::push_left(cores, k);
    RankVector out;
    out.r.resize(d - 1);
    for (Index k = 0; k < d - 1; ++k) {
        Vector sigma = singular_values(cores[k].right());
        out.r[k] = std::max<Index>(1, delta_rank(SingularSpectrum(sigma), delta));
        detail::push_right(cores, k);
    }
    return out;
}

double angle_lower_bound(const RankVector &r, const RankVector &r_prime) {
    require(r.r.size() == r_prime.r.size(), "angle_lower_bound: length mismatch");
    double num = 1.0, den = 1.0;
    for (std::size_t k = 1; k < r.r.size(); ++k) {
        require(r.r[k] >= 1 && r.r[k] <= r_prime.r[k],
                "angle_lower_bound: need 1 <= r <= r'");
        num *= static_cast<double>(r.r[k]);
        den *= static_cast<double>(r_prime.r[k]);
    }
    return std::sqrt(num / den);
}

TTTensor baseline_random_increase(const TTTensor &x, Index bond, double eps, Rng &rng) {
    const Index d = x.order();
    require(bond >= 0 && bond <= d - 2, "baseline_random_increase: bond out of range");
    std::vector<TTCore> cores = x.cores();
    const TTCore &a = cores[bond];
    const TTCore &b = cores[bond + 1];

    TTCore grown_a(a.r0(), a.n(), a.r1() + 1);
    grown_a.right().leftCols(a.r1()) = a.right();
    grown_a.right().col(a.r1()) = eps * rng.normal_vector(a.r0() * a.n());

    TTCore grown_b(b.r0() + 1, b.n(), b.r1());
    grown_b.left().topRows(b.r0()) = b.left();
    grown_b.left().row(b.r0()) = (eps * rng.normal_vector(b.n() * b.r1())).transpose();

    cores[bond] = std::move(grown_a);
    cores[bond + 1] = std::move(grown_b);
    return TTTensor(std::move(cores));
}

double overfit_ratio(double f_gamma_now, double f_gamma_prev) {
    if (f_gamma_prev == 0.0) return 0.0;
    require(f_gamma_prev > 0.0, "overfit_ratio: previous cost must be non-negative");
    return (f_gamma_now - f_gamma_prev) / f_gamma_prev;
}

namespace {

struct IncreaseState {
    TTTensor x;
    FramePtr frame;
    Vector resid_omega, resid_gamma;
    double f_omega = 0, f_gamma = 0;
};

/// One Alg-2 sweep over the bonds, updating the state in place.
void increase_rank_sweep(IncreaseState &st, const SampleSet &omega,
                         const SampleSet &gamma, const std::vector<Index> &r_max,
                         const std::vector<Index> &s_max, double eps) {
    const Index d = st.x.order();
    for (Index m = 0; m <= d - 2; ++m) {
        const Index r_m = st.x.ranks()[m];
        const Index cap = std::min(r_max[m] - r_m, s_max[m]);
        if (cap <= 0) continue;

        Matrix p = subcone_matrix(st.frame, omega, st.resid_omega, m);
        Eigen::BDCSVD<Matrix> svd(p, Eigen::ComputeThinU | Eigen::ComputeThinV);
        Index s = estimated_rank(SingularSpectrum(svd.singularValues()), cap);
        if (s == 0) continue;

        ConeDirection dir;
        dir.base = st.frame;
        dir.bond = m;
        dir.s = s;
        dir.U = TTCore::from_right(p.rows() / st.frame->left(m).n(),
                                   st.frame->left(m).n(), svd.matrixU().leftCols(s));
        dir.V = TTCore::from_left(
            st.frame->right(m + 1).n(), st.frame->right(m + 1).r1(),
            Matrix(svd.singularValues().head(s).asDiagonal() *
                   svd.matrixV().leftCols(s).transpose()));

        TTTensor dir_tt = dir.to_tt();
        Vector y_omega = gather(dir_tt, omega);
        double den = y_omega.squaredNorm();
        if (den == 0.0) continue;
        double t = -st.resid_omega.dot(y_omega) / den;

        Vector y_gamma = gamma.count() > 0 ? gather(dir_tt, gamma) : Vector(0);
        double f_omega_new = 0.5 * (st.resid_omega + t * y_omega).squaredNorm();
        double f_gamma_new =
            gamma.count() > 0 ? 0.5 * (st.resid_gamma + t * y_gamma).squaredNorm() : 0.0;

        bool gain_omega = (st.f_omega - f_omega_new) > eps;
        bool gain_gamma =
            gamma.count() == 0 || (st.f_gamma - f_gamma_new) > eps;
        if (!(gain_omega && gain_gamma)) continue;

        st.x = retract_increase(dir, t);
        st.frame = std::make_shared<OrthoFrame>(st.x);
        st.resid_omega += t * y_omega;
        st.f_omega = f_omega_new;
        if (gamma.count() > 0) {
            st.resid_gamma += t * y_gamma;
            st.f_gamma = f_gamma_new;
        }
    }
}

IncreaseState make_increase_state(const TTTensor &x, const SampleSet &omega,
                                  const SampleSet &gamma) {
    IncreaseState st;
    st.x = x;
    st.frame = std::make_shared<OrthoFrame>(x);
    st.resid_omega = residual_values(x, omega);
    st.f_omega = 0.5 * st.resid_omega.squaredNorm();
    if (gamma.count() > 0) {
        st.resid_gamma = residual_values(x, gamma);
        st.f_gamma = 0.5 * st.resid_gamma.squaredNorm();
    }
    return st;
}

void check_disjoint(const SampleSet &omega, const SampleSet &gamma) {
    if (gamma.count() == 0) return;
    require(omega.shape == gamma.shape, "sample sets: shape mismatch");
    const Index d = omega.order();
    std::unordered_set<long long> seen;
    seen.reserve(omega.count());
    auto lin = [&](const Index *ix) {
        long long l = 0;
        for (Index k = d - 1; k >= 0; --k) l = l * omega.shape[k] + ix[k];
        return l;
    };
    for (Index s = 0; s < omega.count(); ++s) seen.insert(lin(omega.index(s)));
    for (Index s = 0; s < gamma.count(); ++s)
        require(!seen.count(lin(gamma.index(s))), "sample sets must be disjoint");
}

} // namespace

TTTensor increase_rank(const TTTensor &x, const SampleSet &omega, const SampleSet &gamma,
                       const std::vector<Index> &r_max, const std::vector<Index> &s_max,
                       double eps) {
    require(static_cast<Index>(r_max.size()) == x.order() - 1 &&
                static_cast<Index>(s_max.size()) == x.order() - 1,
            "increase_rank: per-bond caps must have d-1 entries");
    IncreaseState st = make_increase_state(x, omega, gamma);
    increase_rank_sweep(st, omega, gamma, r_max, s_max, eps);
    return st.x;
}

RankVector estimate_tt_rank(const SampleSet &omega, const TTTensor &x0,
                            const std::vector<Index> &s_cap, const CGConfig &cfg,
                            std::vector<Vector> *sigma_out, TTTensor *x_star_out,
                            CGResult *cg_out) {
    require(static_cast<Index>(s_cap.size()) == x0.order() - 1,
            "estimate_tt_rank: cap vector must have d-1 entries");
    CGResult cg = cg_solve(x0, omega, cfg);
    auto frame = std::make_shared<OrthoFrame>(cg.x);
    Vector resid = residual_values(cg.x, omega);

    RankVector k;
    k.r = cg.x.ranks();
    if (sigma_out) sigma_out->clear();
    for (Index m = 0; m < x0.order() - 1; ++m) {
        Vector sigma = singular_values(subcone_matrix(frame, omega, resid, m));
        k.r[m] += estimated_rank(SingularSpectrum(sigma), s_cap[m]);
        if (sigma_out) sigma_out->push_back(std::move(sigma));
    }
    if (x_star_out) *x_star_out = std::move(cg.x);
    if (cg_out) {
        if (x_star_out) cg.x = TTTensor();
        *cg_out = std::move(cg);
    }
    return k;
}

RankVector estimate_tt_rank(const SampleSet &omega, const TTTensor &x0, Index s_cap,
                            const CGConfig &cfg) {
    return estimate_tt_rank(omega, x0, std::vector<Index>(x0.order() - 1, s_cap), cfg,
                            nullptr, nullptr, nullptr);
}

namespace {

using Clock = std::chrono::steady_clock;

double ms_since(Clock::time_point t0) {
    return std::chrono::duration<double, std::milli>(Clock::now() - t0).count();
}

} // namespace

RRAMResult rram(const SampleSet &omega, const SampleSet &gamma, const TTTensor &x0,
                const RRAMConfig &cfg) {
    cfg.validate(x0.order());
    require(x0.shape() == omega.shape, "rram: shape mismatch");
    check_disjoint(omega, gamma);
    const auto t0 = Clock::now();

    const double norm_o2 = omega.values.squaredNorm();
    const double norm_g2 = gamma.count() > 0 ? gamma.values.squaredNorm() : 0.0;
    auto rel_o = [&](double f) { return norm_o2 > 0 ? f / norm_o2 : f; };
    auto rel_g = [&](double f) { return norm_g2 > 0 ? f / norm_g2 : f; };

    RRAMResult res;
    res.x = x0;
    TTTensor x_new = x0;
    double f_gamma_prev = gamma.count() > 0 ? objective(x0, gamma) : 0.0;
    TTTensor best_gamma_x = x0;
    double best_gamma_f = f_gamma_prev;

    auto push_row = [&](Index outer, RRAMAction action, const TTTensor &x, double f_om,
                        double f_ga) {
        RRAMTraceRow row;
        row.outer = outer;
        row.action = action;
        row.ranks = x.ranks();
        row.f_omega_rel = rel_o(f_om);
        row.f_gamma_rel = rel_g(f_ga);
        row.inner_iters_cum = res.inner_iters;
        row.wall_ms = ms_since(t0);
        res.trace.push_back(std::move(row));
    };

    for (Index k = 1; k <= cfg.k_max; ++k) {
        CGResult cg = cg_solve(x_new, omega, cfg.cg());
        for (const auto &r : cg.trace)
            res.inner_series.push_back(
                {res.inner_iters + r.iter, r.f_omega_rel, ms_since(t0)});
        res.inner_iters += cg.iters;

        TTTensor x_k = std::move(cg.x);
        double f_om = cg.f_value;
        double f_ga = gamma.count() > 0 ? objective(x_k, gamma) : 0.0;
        push_row(k, RRAMAction::cg, x_k, f_om, f_ga);

        if (gamma.count() > 0 && overfit_ratio(f_ga, f_gamma_prev) > cfg.eps_gamma) {
            res.x = best_gamma_x;
            res.stop = RRAMAction::stop_overfit;
            push_row(k, RRAMAction::stop_overfit, res.x, objective(res.x, omega),
                     best_gamma_f);
            return res;
        }
        res.x = x_k;
        if (gamma.count() == 0 || f_ga < best_gamma_f) {
            best_gamma_x = x_k;
            best_gamma_f = f_ga;
        }
        if (norm_o2 > 0 && std::sqrt(2.0 * f_om / norm_o2) < cfg.eps_omega) {
            res.stop = RRAMAction::stop_converged;
            push_row(k, RRAMAction::stop_converged, x_k, f_om, f_ga);
            return res;
        }

        if (k < cfg.k_max) {
            RankVector r = RankVector::of(x_k.ranks());
            RankVector r_delta = delta_rank_tt(x_k, cfg.delta);
            bool decreased = false;
            if (r_delta.sum() < r.sum()) {
                TTTensor x_delta = tt_round(x_k, r_delta.r);
                double f_om_d = objective(x_delta, omega);
                double f_ga_d = gamma.count() > 0 ? objective(x_delta, gamma) : 0.0;
                if (f_om_d < f_om || (gamma.count() > 0 && f_ga_d < f_ga)) {
                    x_new = std::move(x_delta);
                    push_row(k, RRAMAction::decrease, x_new, f_om_d, f_ga_d);
                    decreased = true;
                }
            }
            if (!decreased) {
                IncreaseState st = make_increase_state(x_k, omega, gamma);
                increase_rank_sweep(st, omega, gamma, cfg.r_max, cfg.s_max,
                                    cfg.eps_decrease);
                x_new = std::move(st.x);
                if (x_new.ranks() != x_k.ranks())
                    push_row(k, RRAMAction::increase, x_new, st.f_omega, st.f_gamma);
            }
        }
        f_gamma_prev = f_ga;
    }

    res.stop = RRAMAction::stop_budget;
    if (gamma.count() > 0) res.x = best_gamma_x;
    push_row(cfg.k_max, RRAMAction::stop_budget, res.x, objective(res.x, omega),
             gamma.count() > 0 ? objective(res.x, gamma) : 0.0);
    return res;
}

RRAMResult baseline_complete(const SampleSet &omega, const SampleSet &gamma,
                             const TTTensor &x0, const RRAMConfig &cfg, Rng &rng) {
    cfg.validate(x0.order());
    require(x0.shape() == omega.shape, "baseline: shape mismatch");
    const auto t0 = Clock::now();
    const double norm_o2 = omega.values.squaredNorm();
    const double norm_g2 = gamma.count() > 0 ? gamma.values.squaredNorm() : 0.0;
    auto rel_o = [&](double f) { return norm_o2 > 0 ? f / norm_o2 : f; };
    auto rel_g = [&](double f) { return norm_g2 > 0 ? f / norm_g2 : f; };
    const double noise_eps = 1e-8;
    const Index d = x0.order();

    RRAMResult res;
    res.x = x0;
    TTTensor x_new = x0;
    Index next_bond = 0;

    auto push_row = [&](Index outer, RRAMAction action, const TTTensor &x, double f_om,
                        double f_ga) {
        RRAMTraceRow row;
        row.outer = outer;
        row.action = action;
        row.ranks = x.ranks();
        row.f_omega_rel = rel_o(f_om);
        row.f_gamma_rel = rel_g(f_ga);
        row.inner_iters_cum = res.inner_iters;
        row.wall_ms = ms_since(t0);
        res.trace.push_back(std::move(row));
    };

    for (Index k = 1; k <= cfg.k_max; ++k) {
        CGResult cg = cg_solve(x_new, omega, cfg.cg());
        for (const auto &r : cg.trace)
            res.inner_series.push_back(
                {res.inner_iters + r.iter, r.f_omega_rel, ms_since(t0)});
        res.inner_iters += cg.iters;
        res.x = std::move(cg.x);
        double f_om = cg.f_value;
        double f_ga = gamma.count() > 0 ? objective(res.x, gamma) : 0.0;
        push_row(k, RRAMAction::cg, res.x, f_om, f_ga);

        if (norm_o2 > 0 && std::sqrt(2.0 * f_om / norm_o2) < cfg.eps_omega) {
            res.stop = RRAMAction::stop_converged;
            push_row(k, RRAMAction::stop_converged, res.x, f_om, f_ga);
            return res;
        }
        if (k == cfg.k_max) break;

        // Raise the next bond still below its cap by one.
        const auto ranks = res.x.ranks();
        Index chosen = -1;
        for (Index step = 0; step < d - 1; ++step) {
            Index m = (next_bond + step) % (d - 1);
            if (ranks[m] < cfg.r_max[m]) {
                chosen = m;
                break;
            }
        }
        if (chosen >= 0) {
            x_new = baseline_random_increase(res.x, chosen, noise_eps, rng);
            next_bond = (chosen + 1) % (d - 1);
            push_row(k, RRAMAction::increase, x_new, f_om, f_ga);
        } else {
            // All bonds at their caps: keep optimizing unless the inner
            // solver has already stalled.
            x_new = res.x;
            if (cg.stop == CGStop::gradient || cg.stop == CGStop::stagnation ||
                cg.stop == CGStop::degenerate)
                break;
        }
    }
    res.stop = RRAMAction::stop_budget;
    push_row(cfg.k_max, RRAMAction::stop_budget, res.x, objective(res.x, omega),
             gamma.count() > 0 ? objective(res.x, gamma) : 0.0);
    return res;
}

} // namespace ttra
