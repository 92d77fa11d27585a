#pragma once

#include <string>

#include "ttra/completion.hpp"
#include "ttra/svd.hpp"

namespace ttra {

/// Per-bond rank vector, validated against the unfolding bound
/// r_k <= min(n_0...n_k, n_{k+1}...n_{d-1}).
struct RankVector {
    std::vector<Index> r;

    static RankVector of(std::vector<Index> r) { return {std::move(r)}; }
    static RankVector constant(Index d, Index value) {
        return {std::vector<Index>(d - 1, value)};
    }
    Index sum() const {
        Index s = 0;
        for (Index v : r) s += v;
        return s;
    }
    void validate(const std::vector<Index> &shape) const;
};

/// Outer driver configuration. r_max and s_max hold one entry per bond.
struct RRAMConfig {
    double eps_omega = 1e-8;
    double eps_grad = 1e-8;
    double eps_gamma = 1.0;
    double delta = 0.8;
    Index j_max = 15;
    Index k_max = 15;
    std::vector<Index> r_max;
    std::vector<Index> s_max;
    double eps_decrease = 1e-10;
    double eps_stagnation = 1e-8;

    void validate(Index d) const;
    CGConfig cg() const { return {j_max, eps_grad, eps_omega, eps_stagnation}; }
    static RRAMConfig defaults(Index d);
};

enum class RRAMAction {
    cg,
    increase,
    decrease,
    stop_overfit,
    stop_converged,
    stop_budget,
};

std::string to_string(RRAMAction a);
RRAMAction rram_action_from_string(const std::string &s);

struct RRAMTraceRow {
    Index outer = 0;
    RRAMAction action = RRAMAction::cg;
    std::vector<Index> ranks;
    double f_omega_rel = 0; // f_omega / ||A_omega||^2
    double f_gamma_rel = 0; // f_gamma / ||A_gamma||^2 (0 when gamma empty)
    Index inner_iters_cum = 0;
    double wall_ms = 0;
};

/// Per-inner-iteration cost series for iteration-granular comparisons.
struct InnerSeriesRow {
    Index inner_cum = 0;
    double f_omega_rel = 0;
    double wall_ms = 0;
};

struct RRAMResult {
    TTTensor x;
    std::vector<RRAMTraceRow> trace;
    std::vector<InnerSeriesRow> inner_series;
    RRAMAction stop = RRAMAction::stop_budget;
    Index inner_iters = 0;
};

/// Index of the largest relative singular-value gap up to the cap:
/// argmax_{j <= s} (sigma_j - sigma_{j+1}) / sigma_j with sigma past the
/// spectrum treated as 0; ties go to the smallest index; 0 for zero input.
Index estimated_rank(const SingularSpectrum &spec, Index s);

/// Rank estimation for a sampled tensor: solve at fixed rank r0, then add
/// the estimated rank of each bond's subcone matrix. The detailed overload
/// can return the subcone spectra, the solved point and the solver result.
RankVector estimate_tt_rank(const SampleSet &omega, const TTTensor &x0,
                            const std::vector<Index> &s_cap, const CGConfig &cfg,
                            std::vector<Vector> *sigma_out = nullptr,
                            TTTensor *x_star_out = nullptr, CGResult *cg_out = nullptr);
RankVector estimate_tt_rank(const SampleSet &omega, const TTTensor &x0, Index s_cap,
                            const CGConfig &cfg);

/// One sweep of subcone rank increases over the bonds; a mode is accepted
/// only if both the training and test costs drop by more than eps.
TTTensor increase_rank(const TTTensor &x, const SampleSet &omega, const SampleSet &gamma,
                       const std::vector<Index> &r_max, const std::vector<Index> &s_max,
                       double eps);

/// Lower bound on the rounding alignment: sqrt of the product over interior
/// bonds of r / r'.
double angle_lower_bound(const RankVector &r, const RankVector &r_prime);

/// Smallest index whose relative gap reaches delta; 0 for zero input.
Index delta_rank(const SingularSpectrum &spec, double delta);

/// Per-bond delta-ranks from the centered unfoldings of the TT form, which
/// share singular values with the dense unfoldings.
RankVector delta_rank_tt(const TTTensor &x, double delta);

/// The reference rank increase: appends a noise column/row pair of scale
/// eps at the given bond.
TTTensor baseline_random_increase(const TTTensor &x, Index bond, double eps, Rng &rng);

/// Relative growth of the test cost; prev == 0 counts as converged (0).
double overfit_ratio(double f_gamma_now, double f_gamma_prev);

/// The outer rank-adaptive driver: inner CG phases, overfitting rollback,
/// delta-rank rounding, and subcone rank increases.
RRAMResult rram(const SampleSet &omega, const SampleSet &gamma, const TTTensor &x0,
                const RRAMConfig &cfg);

/// Reference driver: CG phases interleaved with single random rank
/// increments cycling over the bonds until the caps are reached.
RRAMResult baseline_complete(const SampleSet &omega, const SampleSet &gamma,
                             const TTTensor &x0, const RRAMConfig &cfg, Rng &rng);

} // namespace ttra
