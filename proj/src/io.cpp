#include "ttra/io.hpp"

#include <cstdio>
#include <fstream>
#include <sstream>

namespace ttra {

std::string format_double(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

std::string format_ranks(const std::vector<Index> &r) {
    std::string out;
    for (std::size_t i = 0; i < r.size(); ++i) {
        if (i) out += 'x';
        out += std::to_string(r[i]);
    }
    return out;
}

std::vector<Index> parse_ranks(const std::string &s) {
    std::vector<Index> out;
    std::string cur;
    for (char c : s + "x") {
        if (c == 'x') {
            require(!cur.empty(), "parse_ranks: empty component");
            out.push_back(std::stoll(cur));
            cur.clear();
        } else {
            cur += c;
        }
    }
    return out;
}

namespace {

std::vector<std::string> split(const std::string &line, char sep) {
    std::vector<std::string> out;
    std::string cur;
    for (char c : line) {
        if (c == sep) {
            out.push_back(cur);
            cur.clear();
        } else {
            cur += c;
        }
    }
    out.push_back(cur);
    return out;
}

std::string expect_prefix(const std::string &line, const std::string &prefix) {
    require(line.rfind(prefix, 0) == 0, "expected line starting with '" + prefix + "'");
    return line.substr(prefix.size());
}

std::vector<Index> parse_index_seq(const std::string &s) {
    std::istringstream iss(s);
    std::vector<Index> out;
    long long v;
    while (iss >> v) out.push_back(v);
    return out;
}

std::string getline_checked(std::istream &is, const char *what) {
    std::string line;
    require(static_cast<bool>(std::getline(is, line)), std::string("unexpected end of ") + what);
    return line;
}

} // namespace

void write_dense(std::ostream &os, const DenseTensor &t) {
    os << "dims:";
    for (Index n : t.shape()) os << ' ' << n;
    os << '\n';
    for (Index i = 0; i < t.size(); ++i) os << format_double(t.values()[i]) << '\n';
}

DenseTensor read_dense(std::istream &is) {
    std::vector<Index> dims = parse_index_seq(expect_prefix(getline_checked(is, "dense file"), "dims:"));
    Index n = DenseTensor::element_count(dims);
    Vector v(n);
    for (Index i = 0; i < n; ++i) {
        std::string line = getline_checked(is, "dense file");
        v[i] = std::stod(line);
    }
    return DenseTensor(std::move(dims), std::move(v));
}

void write_tt(std::ostream &os, const TTTensor &x) {
    os << "tt-ranks:";
    for (Index r : x.ranks()) os << ' ' << r;
    os << "\ndims:";
    for (Index n : x.shape()) os << ' ' << n;
    os << '\n';
    for (Index k = 0; k < x.order(); ++k) {
        const TTCore &c = x.core(k);
        os << "core " << (k + 1) << ": " << c.r0() << ' ' << c.n() << ' ' << c.r1()
           << '\n';
        for (Index i = 0; i < c.size(); ++i) os << format_double(c.data()[i]) << '\n';
    }
}

TTTensor read_tt(std::istream &is) {
    std::vector<Index> ranks =
        parse_index_seq(expect_prefix(getline_checked(is, "tt file"), "tt-ranks:"));
    std::vector<Index> dims =
        parse_index_seq(expect_prefix(getline_checked(is, "tt file"), "dims:"));
    require(ranks.size() + 1 == dims.size(), "tt file: rank/dim count mismatch");
    std::vector<TTCore> cores;
    for (std::size_t k = 0; k < dims.size(); ++k) {
        std::string header = getline_checked(is, "tt file");
        expect_prefix(header, "core " + std::to_string(k + 1) + ":");
        std::vector<Index> shape =
            parse_index_seq(header.substr(header.find(':') + 1));
        require(shape.size() == 3, "tt file: core header must list three dims");
        TTCore c(shape[0], shape[1], shape[2]);
        for (Index i = 0; i < c.size(); ++i)
            c.data()[i] = std::stod(getline_checked(is, "tt file"));
        cores.push_back(std::move(c));
    }
    return TTTensor(std::move(cores));
}

void write_samples(std::ostream &os, const SampleSet &s) {
    os << "# dims:";
    for (Index n : s.shape) os << ' ' << n;
    os << " ratio: " << format_double(s.ratio) << '\n';
    const Index d = s.order();
    for (Index i = 0; i < s.count(); ++i) {
        const Index *ix = s.index(i);
        for (Index k = 0; k < d; ++k) os << (ix[k] + 1) << ',';
        os << format_double(s.values[i]) << '\n';
    }
}

SampleSet read_samples(std::istream &is) {
    std::string header = expect_prefix(getline_checked(is, "sample file"), "# dims:");
    auto ratio_pos = header.find("ratio:");
    require(ratio_pos != std::string::npos, "sample file: missing ratio");
    std::vector<Index> dims = parse_index_seq(header.substr(0, ratio_pos));
    double ratio = std::stod(header.substr(ratio_pos + 6));
    const Index d = static_cast<Index>(dims.size());

    std::vector<Index> idx_flat;
    std::vector<double> values;
    std::string line;
    while (std::getline(is, line)) {
        if (line.empty()) continue;
        auto fields = split(line, ',');
        require(static_cast<Index>(fields.size()) == d + 1,
                "sample file: wrong column count");
        for (Index k = 0; k < d; ++k) idx_flat.push_back(std::stoll(fields[k]) - 1);
        values.push_back(std::stod(fields[d]));
    }
    SampleSet s;
    s.shape = std::move(dims);
    s.idx_flat = std::move(idx_flat);
    s.values = Eigen::Map<const Vector>(values.data(), values.size());
    s.ratio = ratio;
    s.validate();
    return s;
}

void write_cg_trace(std::ostream &os, const std::vector<CGTraceRow> &trace) {
    os << "iter,f_omega_rel,grad_norm,wall_ms\n";
    for (const auto &r : trace)
        os << r.iter << ',' << format_double(r.f_omega_rel) << ','
           << format_double(r.grad_norm) << ',' << format_double(r.wall_ms) << '\n';
}

std::vector<CGTraceRow> read_cg_trace(std::istream &is) {
    std::string header = getline_checked(is, "trace file");
    require(header == "iter,f_omega_rel,grad_norm,wall_ms", "trace file: bad header");
    std::vector<CGTraceRow> out;
    std::string line;
    while (std::getline(is, line)) {
        if (line.empty()) continue;
        auto f = split(line, ',');
        require(f.size() == 4, "trace file: wrong column count");
        out.push_back({std::stoll(f[0]), std::stod(f[1]), std::stod(f[2]), std::stod(f[3])});
    }
    return out;
}

void write_rram_trace(std::ostream &os, const std::vector<RRAMTraceRow> &trace) {
    os << "outer,action,ranks,f_omega_rel,f_gamma_rel,inner_iters_cum,wall_ms\n";
    for (const auto &r : trace)
        os << r.outer << ',' << to_string(r.action) << ',' << format_ranks(r.ranks)
           << ',' << format_double(r.f_omega_rel) << ',' << format_double(r.f_gamma_rel)
           << ',' << r.inner_iters_cum << ',' << format_double(r.wall_ms) << '\n';
}

std::vector<RRAMTraceRow> read_rram_trace(std::istream &is) {
    std::string header = getline_checked(is, "trace file");
    require(header == "outer,action,ranks,f_omega_rel,f_gamma_rel,inner_iters_cum,wall_ms",
            "trace file: bad header");
    std::vector<RRAMTraceRow> out;
    std::string line;
    while (std::getline(is, line)) {
        if (line.empty()) continue;
        auto f = split(line, ',');
        require(f.size() == 7, "trace file: wrong column count");
        RRAMTraceRow row;
        row.outer = std::stoll(f[0]);
        row.action = rram_action_from_string(f[1]);
        row.ranks = parse_ranks(f[2]);
        row.f_omega_rel = std::stod(f[3]);
        row.f_gamma_rel = std::stod(f[4]);
        row.inner_iters_cum = std::stoll(f[5]);
        row.wall_ms = std::stod(f[6]);
        out.push_back(std::move(row));
    }
    return out;
}

const std::string &KeyValues::at(const std::string &k) const {
    auto it = entries.find(k);
    require(it != entries.end(), "missing config key: " + k);
    return it->second;
}

double KeyValues::number(const std::string &k) const { return std::stod(at(k)); }

long long KeyValues::integer(const std::string &k) const { return std::stoll(at(k)); }

std::vector<Index> KeyValues::index_list(const std::string &k, Index expected) const {
    auto fields = split(at(k), ',');
    std::vector<Index> out;
    for (const auto &f : fields)
        if (!f.empty()) out.push_back(std::stoll(f));
    require(!out.empty(), "config key " + k + ": empty list");
    if (static_cast<Index>(out.size()) == 1 && expected > 1)
        out.assign(expected, out[0]);
    require(static_cast<Index>(out.size()) == expected,
            "config key " + k + ": expected " + std::to_string(expected) + " entries");
    return out;
}

KeyValues read_key_values(std::istream &is) {
    KeyValues kv;
    std::string line;
    while (std::getline(is, line)) {
        auto hash = line.find('#');
        if (hash != std::string::npos) line = line.substr(0, hash);
        auto eq = line.find('=');
        if (eq == std::string::npos) continue;
        auto trim = [](std::string s) {
            auto b = s.find_first_not_of(" \t");
            auto e = s.find_last_not_of(" \t");
            return b == std::string::npos ? std::string() : s.substr(b, e - b + 1);
        };
        std::string key = trim(line.substr(0, eq));
        std::string value = trim(line.substr(eq + 1));
        if (!key.empty()) kv.entries[key] = value;
    }
    return kv;
}

void write_key_values(std::ostream &os,
                      const std::vector<std::pair<std::string, std::string>> &kv) {
    for (const auto &[k, v] : kv) os << k << " = " << v << '\n';
}

std::optional<std::uint64_t> apply_config(const KeyValues &kv, Index d, RRAMConfig &cfg) {
    if (kv.has("eps_omega")) cfg.eps_omega = kv.number("eps_omega");
    if (kv.has("eps_grad")) cfg.eps_grad = kv.number("eps_grad");
    if (kv.has("eps_gamma")) cfg.eps_gamma = kv.number("eps_gamma");
    if (kv.has("delta")) cfg.delta = kv.number("delta");
    if (kv.has("j_max")) cfg.j_max = kv.integer("j_max");
    if (kv.has("k_max")) cfg.k_max = kv.integer("k_max");
    if (kv.has("r_max")) cfg.r_max = kv.index_list("r_max", d - 1);
    if (kv.has("s_max")) cfg.s_max = kv.index_list("s_max", d - 1);
    if (kv.has("eps_decrease")) cfg.eps_decrease = kv.number("eps_decrease");
    if (kv.has("seed")) return static_cast<std::uint64_t>(kv.integer("seed"));
    return std::nullopt;
}

void save_file(const std::string &path, const std::string &content) {
    std::ofstream os(path);
    require(static_cast<bool>(os), "cannot open for writing: " + path);
    os << content;
    require(static_cast<bool>(os), "write failed: " + path);
}

std::string load_file(const std::string &path) {
    std::ifstream is(path);
    require(static_cast<bool>(is), "cannot open: " + path);
    std::ostringstream ss;
    ss << is.rdbuf();
    return ss.str();
}

} // namespace ttra
