#pragma once

#include <iosfwd>
#include <map>
#include <string>

#include "ttra/completion.hpp"
#include "ttra/rank_adaptive.hpp"

namespace ttra {

/// Dense tensor text format: a `dims: n1 ... nd` header line followed by
/// the values in linearization order, one per line, 17 significant digits.
void write_dense(std::ostream &os, const DenseTensor &t);
DenseTensor read_dense(std::istream &is);

/// TT text format: `tt-ranks:` and `dims:` header lines, then the cores in
/// order, each introduced by `core i: r_{i-1} n_i r_i` (1-based i) with the
/// core values in linearization order.
void write_tt(std::ostream &os, const TTTensor &x);
TTTensor read_tt(std::istream &is);

/// Sample set CSV: `# dims: n1 ... nd ratio: rho` then one row per sample
/// `i1,...,id,value` with 1-based indices.
void write_samples(std::ostream &os, const SampleSet &s);
SampleSet read_samples(std::istream &is);

/// Inner solver trace CSV: iter,f_omega_rel,grad_norm,wall_ms.
void write_cg_trace(std::ostream &os, const std::vector<CGTraceRow> &trace);
std::vector<CGTraceRow> read_cg_trace(std::istream &is);

/// Outer driver trace CSV:
/// outer,action,ranks,f_omega_rel,f_gamma_rel,inner_iters_cum,wall_ms
/// with ranks encoded r1xr2x...
void write_rram_trace(std::ostream &os, const std::vector<RRAMTraceRow> &trace);
std::vector<RRAMTraceRow> read_rram_trace(std::istream &is);

/// Flat key-value configuration: `key = value` lines, '#' comments.
/// Recognized keys: eps_omega, eps_grad, eps_gamma, delta, j_max, k_max,
/// r_max, s_max, eps_decrease, seed. r_max/s_max accept a scalar or a
/// comma-separated list of d-1 entries.
struct KeyValues {
    std::map<std::string, std::string> entries;

    bool has(const std::string &k) const { return entries.count(k) > 0; }
    const std::string &at(const std::string &k) const;
    double number(const std::string &k) const;
    long long integer(const std::string &k) const;
    std::vector<Index> index_list(const std::string &k, Index expected) const;
};

KeyValues read_key_values(std::istream &is);
void write_key_values(std::ostream &os, const std::vector<std::pair<std::string, std::string>> &kv);

/// Applies recognized config keys onto cfg (caps broadcast to d-1 entries);
/// returns the seed if one was given.
std::optional<std::uint64_t> apply_config(const KeyValues &kv, Index d, RRAMConfig &cfg);

std::string format_double(double v);
std::string format_ranks(const std::vector<Index> &r);
std::vector<Index> parse_ranks(const std::string &s);

/// File helpers.
void save_file(const std::string &path, const std::string &content);
std::string load_file(const std::string &path);

} // namespace ttra
