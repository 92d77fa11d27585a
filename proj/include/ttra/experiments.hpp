#pragma once

#include <string>

#include "ttra/io.hpp"

namespace ttra {

enum class ExperimentKind { synthetic, synthetic_noise, exponential };

std::string to_string(ExperimentKind k);
ExperimentKind experiment_kind_from_string(const std::string &s);

/// Resolved parameters of one experiment run.
struct ExperimentSpec {
    ExperimentKind kind = ExperimentKind::synthetic;
    Index d = 4;
    std::vector<Index> dims;      // n per mode
    std::vector<Index> r_prime;   // generating ranks (synthetic kinds)
    double rho_omega = 0.1;
    double gamma_fraction = 0.25;
    double noise = 0.0;
    std::uint64_t seed = 1;
    RRAMConfig config;            // solver / driver settings
    std::string out_dir;
    Index dense_cap = kDenseCapDefault;

    void validate() const;
    static ExperimentSpec make(ExperimentKind kind, Index d, Index n,
                               std::vector<Index> r_prime, double rho, double noise,
                               std::uint64_t seed);
};

/// Random TT-structured tensor: product of standard-normal cores. Returns
/// the dense tensor together with the generating TT.
std::pair<DenseTensor, TTTensor> gen_synthetic(const std::vector<Index> &dims,
                                               const std::vector<Index> &r_prime,
                                               Rng &rng,
                                               Index dense_cap = kDenseCapDefault);

/// Adds elementwise eta * standard-normal noise.
DenseTensor add_noise(const DenseTensor &a, double eta, Rng &rng);

/// Grid samples of exp(-||x||_2) on [0,1]^d with n uniform points per axis.
DenseTensor gen_exponential(Index n = 20, Index d = 4);

/// Disjoint train/test sample sets drawn from a seeded permutation of all
/// positions: |omega| = round(rho * N), |gamma| = round(gamma_fraction * |omega|).
std::pair<SampleSet, SampleSet> sample_split(const DenseTensor &a, double rho_omega,
                                             double gamma_fraction, Rng &rng);

/// Per-bond report of the rank estimation experiments.
struct RankEstimationReport {
    RankVector estimated;
    std::vector<Vector> sigma_p;        // subcone matrix spectra
    std::vector<Vector> sigma_a_omega;  // unfoldings of the zero-filled samples
    std::vector<Vector> sigma_a;        // unfoldings of the full tensor
    CGResult cg;
    double grad_norm = 0;

    /// CSV rows: bond,j,sigma_p,gap_p,sigma_a_omega,gap_a_omega,sigma_a,estimated_k.
    std::string to_csv(Index top) const;
};

/// Runs the estimation pipeline: generate, sample, solve at rank r0 for the
/// configured iteration budget, report spectra and the estimated rank.
RankEstimationReport run_rank_estimation(const ExperimentSpec &spec,
                                         const std::vector<Index> &r0, Index cg_iters,
                                         Index s_cap = 8);

struct AngleTrial {
    double alignment = 0;        // <X~/||X~||, A/||A||>
    double necessary_residual = 0; // |<X~,A> - ||X~||^2| / ||A||^2
};

struct AngleReport {
    double omega_bound = 0;
    std::vector<AngleTrial> trials;
    double min_alignment = 0, median_alignment = 0, max_alignment = 0;

    std::string to_csv() const;
};

/// Rounding alignment experiment: random TT tensors of rank r', rounded to
/// rank r, with the angle bound and the necessary-condition residual.
AngleReport run_angle_experiment(Index trials, Index d, Index n, Index r_prime, Index r,
                                 std::uint64_t seed);

enum class CompletionMethod { rram, baseline };

struct CompletionRun {
    ExperimentSpec spec;
    RRAMResult result;
    double norm_a_omega = 0;
    SampleSet omega, gamma;
    TTTensor x0;
};

/// Builds the data for a spec: the (optionally noisy) tensor, its sample
/// split and the rank-one starting point, all from the spec's seed stream.
struct ExperimentData {
    DenseTensor a;
    SampleSet omega, gamma;
    TTTensor x0;
};
ExperimentData build_experiment_data(const ExperimentSpec &spec);

/// Runs the full completion experiment; writes trace/series/manifest files
/// into spec.out_dir when it is non-empty.
CompletionRun run_completion(const ExperimentSpec &spec, CompletionMethod method);

/// First cumulative inner iteration count at which the relative cost drops
/// to the threshold, or -1 if never.
Index iters_to_threshold(const std::vector<InnerSeriesRow> &series, double threshold);

} // namespace ttra
