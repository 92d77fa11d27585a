#include "ttra/experiments.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <numeric>
#include <sstream>

namespace ttra {

std::string to_string(ExperimentKind k) {
    switch (k) {
    case ExperimentKind::synthetic: return "synthetic";
    case ExperimentKind::synthetic_noise: return "synthetic-noise";
    case ExperimentKind::exponential: return "exponential";
    }
    return "unknown";
}

ExperimentKind experiment_kind_from_string(const std::string &s) {
    if (s == "synthetic") return ExperimentKind::synthetic;
    if (s == "synthetic-noise") return ExperimentKind::synthetic_noise;
    if (s == "exponential") return ExperimentKind::exponential;
    throw InvalidArgument("unknown experiment kind: " + s);
}

void ExperimentSpec::validate() const {
    require(d >= 2, "ExperimentSpec: order must be at least 2");
    require(static_cast<Index>(dims.size()) == d, "ExperimentSpec: dims length mismatch");
    for (Index n : dims) require(n >= 2, "ExperimentSpec: dims must be at least 2");
    require(rho_omega > 0 && rho_omega <= 1, "ExperimentSpec: rho must be in (0,1]");
    require(gamma_fraction >= 0, "ExperimentSpec: gamma fraction must be non-negative");
    require(noise >= 0, "ExperimentSpec: noise must be non-negative");
    if (kind != ExperimentKind::exponential) {
        RankVector rp = RankVector::of(r_prime);
        rp.validate(dims);
    }
}

ExperimentSpec ExperimentSpec::make(ExperimentKind kind, Index d, Index n,
                                    std::vector<Index> r_prime, double rho, double noise,
                                    std::uint64_t seed) {
    ExperimentSpec spec;
    spec.kind = kind;
    spec.d = d;
    spec.dims.assign(d, n);
    spec.r_prime = std::move(r_prime);
    spec.rho_omega = rho;
    spec.noise = noise;
    spec.seed = seed;
    spec.config = RRAMConfig::defaults(d);
    spec.validate();
    return spec;
}

std::pair<DenseTensor, TTTensor> gen_synthetic(const std::vector<Index> &dims,
                                               const std::vector<Index> &r_prime,
                                               Rng &rng, Index dense_cap) {
    RankVector rp = RankVector::of(r_prime);
    rp.validate(dims);
    TTTensor gen = TTTensor::random(dims, r_prime, rng);
    return {reconstruct(gen, dense_cap), std::move(gen)};
}

DenseTensor add_noise(const DenseTensor &a, double eta, Rng &rng) {
    require(eta >= 0, "add_noise: eta must be non-negative");
    DenseTensor out = a;
    if (eta == 0.0) return out;
    for (Index i = 0; i < out.size(); ++i) out.values()[i] += eta * rng.normal();
    return out;
}

DenseTensor gen_exponential(Index n, Index d) {
    require(n >= 2 && d >= 2, "gen_exponential: need n >= 2 and d >= 2");
    std::vector<Index> dims(d, n);
    DenseTensor out = DenseTensor::zeros(dims);
    std::vector<Index> idx(d, 0);
    const double h = 1.0 / static_cast<double>(n - 1);
    for (Index lin = 0; lin < out.size(); ++lin) {
        double s = 0.0;
        for (Index k = 0; k < d; ++k) {
            double x = static_cast<double>(idx[k]) * h;
            s += x * x;
        }
        out.values()[lin] = std::exp(-std::sqrt(s));
        for (Index k = 0; k < d; ++k) {
            if (++idx[k] < n) break;
            idx[k] = 0;
        }
    }
    return out;
}

std::pair<SampleSet, SampleSet> sample_split(const DenseTensor &a, double rho_omega,
                                             double gamma_fraction, Rng &rng) {
    require(rho_omega > 0 && rho_omega <= 1, "sample_split: rho must be in (0,1]");
    require(gamma_fraction >= 0, "sample_split: gamma fraction must be non-negative");
    const Index total = a.size();
    const Index n_omega = std::llround(rho_omega * static_cast<double>(total));
    const Index n_gamma = std::llround(gamma_fraction * static_cast<double>(n_omega));
    require(n_omega >= 1, "sample_split: empty training set");
    require(n_omega + n_gamma <= total, "sample_split: insufficient indices");

    std::vector<Index> perm(total);
    std::iota(perm.begin(), perm.end(), Index{0});
    std::shuffle(perm.begin(), perm.end(), rng.engine());

    const Index d = a.order();
    const auto &shape = a.shape();
    auto build = [&](Index begin, Index count) {
        SampleSet s;
        s.shape = shape;
        s.idx_flat.resize(count * d);
        Vector values(count);
        for (Index i = 0; i < count; ++i) {
            Index lin = perm[begin + i];
            values[i] = a.values()[lin];
            for (Index k = 0; k < d; ++k) {
                s.idx_flat[i * d + k] = lin % shape[k];
                lin /= shape[k];
            }
        }
        s.values = std::move(values);
        s.ratio = static_cast<double>(count) / static_cast<double>(total);
        return s;
    };
    return {build(0, n_omega), build(n_omega, n_gamma)};
}

namespace {

std::string spectra_csv_header() {
    return "bond,j,sigma_p,gap_p,sigma_a_omega,gap_a_omega,sigma_a,estimated_k";
}

double gap_at(const Vector &sigma, Index j) {
    if (j >= sigma.size() || sigma[j] <= 0.0) return 0.0;
    double next = (j + 1 < sigma.size()) ? sigma[j + 1] : 0.0;
    return (sigma[j] - next) / sigma[j];
}

} // namespace

std::string RankEstimationReport::to_csv(Index top) const {
    std::ostringstream os;
    os << spectra_csv_header() << '\n';
    for (std::size_t m = 0; m < sigma_p.size(); ++m) {
        for (Index j = 0; j < top; ++j) {
            auto val = [&](const Vector &v) {
                return j < v.size() ? format_double(v[j]) : std::string("0");
            };
            os << (m + 1) << ',' << (j + 1) << ',' << val(sigma_p[m]) << ','
               << format_double(gap_at(sigma_p[m], j)) << ',' << val(sigma_a_omega[m])
               << ',' << format_double(gap_at(sigma_a_omega[m], j)) << ','
               << val(sigma_a[m]) << ',' << estimated.r[m] << '\n';
        }
    }
    return os.str();
}

RankEstimationReport run_rank_estimation(const ExperimentSpec &spec,
                                         const std::vector<Index> &r0, Index cg_iters,
                                         Index s_cap) {
    spec.validate();
    Rng rng(spec.seed);
    DenseTensor a = spec.kind == ExperimentKind::exponential
                        ? gen_exponential(spec.dims[0], spec.d)
                        : gen_synthetic(spec.dims, spec.r_prime, rng, spec.dense_cap).first;
    if (spec.noise > 0.0) a = add_noise(a, spec.noise, rng);
    auto [omega, gamma] = sample_split(a, spec.rho_omega, spec.gamma_fraction, rng);
    TTTensor x0 = TTTensor::random(spec.dims, r0, rng);

    // Fixed iteration budget: disable the tolerance- and progress-based
    // stops so the solver runs exactly cg_iters steps.
    CGConfig cg;
    cg.j_max = cg_iters;
    cg.eps_grad = 1e-14;
    cg.eps_rel = 1e-14;
    cg.eps_stagnation = 0.0;

    RankEstimationReport rep;
    TTTensor x_star;
    rep.estimated = estimate_tt_rank(omega, x0, std::vector<Index>(spec.d - 1, s_cap),
                                     cg, &rep.sigma_p, &x_star, &rep.cg);
    rep.grad_norm = riemannian_gradient(x_star, omega).norm();

    DenseTensor a_omega = scatter_to_dense(omega, omega.values, spec.dense_cap);
    for (Index k = 1; k < spec.d; ++k) {
        rep.sigma_a_omega.push_back(singular_values(unfold(a_omega, k)));
        rep.sigma_a.push_back(singular_values(unfold(a, k)));
    }
    return rep;
}

std::string AngleReport::to_csv() const {
    std::ostringstream os;
    os << "trial,alignment,omega_bound,necessary_residual\n";
    for (std::size_t i = 0; i < trials.size(); ++i)
        os << (i + 1) << ',' << format_double(trials[i].alignment) << ','
           << format_double(omega_bound) << ','
           << format_double(trials[i].necessary_residual) << '\n';
    return os.str();
}

AngleReport run_angle_experiment(Index trials, Index d, Index n, Index r_prime, Index r,
                                 std::uint64_t seed) {
    require(trials >= 1, "angle experiment: need at least one trial");
    require(r >= 1 && r <= r_prime, "angle experiment: need 1 <= r <= r'");
    Rng rng(seed);
    std::vector<Index> dims(d, n);
    std::vector<Index> rp(d - 1, r_prime), rt(d - 1, r);

    AngleReport rep;
    rep.omega_bound = angle_lower_bound(RankVector::of(rt), RankVector::of(rp));
    std::vector<double> alignments;
    for (Index trial = 0; trial < trials; ++trial) {
        TTTensor a = TTTensor::random(dims, rp, rng);
        TTTensor x = tt_round(a, rt);
        double na = norm(a), nx = norm(x);
        double dot = inner(x, a);
        AngleTrial t;
        t.alignment = dot / (na * nx);
        t.necessary_residual = std::abs(dot - nx * nx) / (na * na);
        rep.trials.push_back(t);
        alignments.push_back(t.alignment);
    }
    std::sort(alignments.begin(), alignments.end());
    rep.min_alignment = alignments.front();
    rep.max_alignment = alignments.back();
    rep.median_alignment = alignments[alignments.size() / 2];
    return rep;
}

ExperimentData build_experiment_data(const ExperimentSpec &spec) {
    spec.validate();
    Rng rng(spec.seed);
    ExperimentData data;
    switch (spec.kind) {
    case ExperimentKind::synthetic:
        data.a = gen_synthetic(spec.dims, spec.r_prime, rng, spec.dense_cap).first;
        break;
    case ExperimentKind::synthetic_noise:
        data.a = add_noise(gen_synthetic(spec.dims, spec.r_prime, rng, spec.dense_cap).first,
                           spec.noise, rng);
        break;
    case ExperimentKind::exponential:
        data.a = gen_exponential(spec.dims[0], spec.d);
        break;
    }
    auto [omega, gamma] = sample_split(data.a, spec.rho_omega, spec.gamma_fraction, rng);
    data.omega = std::move(omega);
    data.gamma = std::move(gamma);
    data.x0 = TTTensor::random(spec.dims, std::vector<Index>(spec.d - 1, 1), rng);
    return data;
}

namespace {

void write_run_outputs(const std::string &dir, const CompletionRun &run,
                       CompletionMethod method) {
    namespace fs = std::filesystem;
    fs::create_directories(dir);
    {
        std::ostringstream os;
        write_rram_trace(os, run.result.trace);
        save_file(dir + "/trace.csv", os.str());
    }
    {
        std::ostringstream os;
        os << "inner_cum,f_omega_rel,wall_ms\n";
        for (const auto &r : run.result.inner_series)
            os << r.inner_cum << ',' << format_double(r.f_omega_rel) << ','
               << format_double(r.wall_ms) << '\n';
        save_file(dir + "/series_cost.csv", os.str());
    }
    {
        std::ostringstream os;
        os << "wall_ms,f_gamma_rel\n";
        for (const auto &r : run.result.trace)
            if (r.action == RRAMAction::cg)
                os << format_double(r.wall_ms) << ',' << format_double(r.f_gamma_rel)
                   << '\n';
        save_file(dir + "/series_test.csv", os.str());
    }
    {
        std::ostringstream os;
        os << "outer,ranks\n";
        for (const auto &r : run.result.trace)
            if (r.action == RRAMAction::cg)
                os << r.outer << ',' << format_ranks(r.ranks) << '\n';
        save_file(dir + "/series_rank.csv", os.str());
    }
    {
        std::ostringstream os;
        write_tt(os, run.result.x);
        save_file(dir + "/recovered.tt", os.str());
    }
    {
        const ExperimentSpec &s = run.spec;
        std::vector<std::pair<std::string, std::string>> kv;
        kv.emplace_back("kind", to_string(s.kind));
        kv.emplace_back("method", method == CompletionMethod::rram ? "rram" : "baseline");
        kv.emplace_back("d", std::to_string(s.d));
        {
            std::string dims;
            for (std::size_t i = 0; i < s.dims.size(); ++i)
                dims += (i ? "," : "") + std::to_string(s.dims[i]);
            kv.emplace_back("dims", dims);
        }
        if (s.kind != ExperimentKind::exponential)
            kv.emplace_back("r_prime", format_ranks(s.r_prime));
        kv.emplace_back("rho_omega", format_double(s.rho_omega));
        kv.emplace_back("gamma_fraction", format_double(s.gamma_fraction));
        kv.emplace_back("noise", format_double(s.noise));
        kv.emplace_back("seed", std::to_string(s.seed));
        kv.emplace_back("eps_omega", format_double(s.config.eps_omega));
        kv.emplace_back("eps_grad", format_double(s.config.eps_grad));
        kv.emplace_back("eps_gamma", format_double(s.config.eps_gamma));
        kv.emplace_back("delta", format_double(s.config.delta));
        kv.emplace_back("j_max", std::to_string(s.config.j_max));
        kv.emplace_back("k_max", std::to_string(s.config.k_max));
        {
            std::string rmax, smax;
            for (std::size_t i = 0; i < s.config.r_max.size(); ++i) {
                rmax += (i ? "," : "") + std::to_string(s.config.r_max[i]);
                smax += (i ? "," : "") + std::to_string(s.config.s_max[i]);
            }
            kv.emplace_back("r_max", rmax);
            kv.emplace_back("s_max", smax);
        }
        kv.emplace_back("eps_decrease", format_double(s.config.eps_decrease));
        std::ostringstream os;
        write_key_values(os, kv);
        save_file(dir + "/manifest.txt", os.str());
    }
}

} // namespace

CompletionRun run_completion(const ExperimentSpec &spec, CompletionMethod method) {
    CompletionRun run;
    run.spec = spec;
    ExperimentData data = build_experiment_data(spec);
    run.omega = std::move(data.omega);
    run.gamma = std::move(data.gamma);
    run.x0 = std::move(data.x0);
    run.norm_a_omega = run.omega.values.norm();

    if (method == CompletionMethod::rram) {
        run.result = rram(run.omega, run.gamma, run.x0, spec.config);
    } else {
        // Continue the spec's seed stream for the random rank increments.
        Rng rng(spec.seed ^ 0x9e3779b97f4a7c15ULL);
        run.result = baseline_complete(run.omega, run.gamma, run.x0, spec.config, rng);
    }
    if (!spec.out_dir.empty()) write_run_outputs(spec.out_dir, run, method);
    return run;
}

Index iters_to_threshold(const std::vector<InnerSeriesRow> &series, double threshold) {
    for (const auto &r : series)
        if (r.f_omega_rel <= threshold) return r.inner_cum;
    return -1;
}

} // namespace ttra
