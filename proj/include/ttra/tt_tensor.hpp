#pragma once

#include <optional>
#include <vector>

#include "ttra/dense_tensor.hpp"
#include "ttra/rng.hpp"

namespace ttra {

/// Orthogonality marker: none, or the 0-based position of the center core.
/// At position p, cores k < p have column-orthonormal right unfoldings and
/// cores k > p have row-orthonormal left unfoldings.
struct OrthoState {
    std::optional<Index> position;

    static OrthoState none() { return {}; }
    static OrthoState at(Index p) { return {p}; }
};

/// Tensor in tensor-train form: a chain of order-3 cores, core k of shape
/// (r_{k-1}, n_k, r_k) with boundary ranks 1. The rank vector has d-1
/// entries; entry k is the bond dimension between cores k and k+1.
class TTTensor {
public:
    TTTensor() = default;

    explicit TTTensor(std::vector<TTCore> cores, OrthoState ortho = OrthoState::none())
            : cores_(std::move(cores)), ortho_(ortho) {
        require(cores_.size() >= 2, "TTTensor: order must be at least 2");
        require(cores_.front().r0() == 1 && cores_.back().r1() == 1,
                "TTTensor: boundary ranks must be 1");
        for (std::size_t k = 0; k + 1 < cores_.size(); ++k)
            require(cores_[k].r1() == cores_[k + 1].r0(),
                    "TTTensor: adjacent core ranks must chain");
    }

    /// Rank-one-per-bond zero tensor of the given shape.
    static TTTensor zeros(const std::vector<Index> &shape);

    /// Cores filled with independent standard-normal entries.
    static TTTensor random(const std::vector<Index> &shape,
                           const std::vector<Index> &ranks, Rng &rng);

    Index order() const { return static_cast<Index>(cores_.size()); }

    std::vector<Index> shape() const {
        std::vector<Index> s(cores_.size());
        for (std::size_t k = 0; k < cores_.size(); ++k) s[k] = cores_[k].n();
        return s;
    }

    std::vector<Index> ranks() const {
        std::vector<Index> r(cores_.size() - 1);
        for (std::size_t k = 0; k + 1 < cores_.size(); ++k) r[k] = cores_[k].r1();
        return r;
    }

    const std::vector<TTCore> &cores() const { return cores_; }
    const TTCore &core(Index k) const { return cores_[k]; }
    TTCore &core(Index k) { return cores_[k]; }

    OrthoState ortho() const { return ortho_; }
    void set_ortho(OrthoState s) { ortho_ = s; }

    Index element_count() const {
        Index n = 1;
        for (const auto &c : cores_) n *= c.n();
        return n;
    }

private:
    std::vector<TTCore> cores_;
    OrthoState ortho_;
};

/// The invertible factors linking the canonical orthogonal families of one
/// tensor: Q[k] relates the center at position k to the column-orthonormal
/// core there, R[k] the center at position k to the row-orthonormal core.
/// Q has d-1 entries (k = 0..d-2, each r_k x r_k) and R has d-1 entries
/// addressed as R[k] for k = 1..d-1 (each r_{k-1} x r_{k-1}); R[0] is unused.
/// Extracted from the same tensor they satisfy Q[k] == R[k+1].
struct OrthoFactors {
    std::vector<Matrix> Q;
    std::vector<Matrix> R;
};

/// Contraction of the whole chain into a dense tensor.
DenseTensor reconstruct(const TTTensor &x, Index dense_cap = kDenseCapDefault);

/// TT decomposition by successive SVDs of the unfoldings. Optional per-bond
/// rank caps and relative truncation tolerance; with neither, ranks are the
/// numerical ranks and the reconstruction is exact to working precision.
/// The result is orthogonal with center at the last core. A zero tensor
/// yields all ranks 1 with zero cores.
TTTensor tt_svd(const DenseTensor &a,
                const std::vector<Index> *rank_caps = nullptr,
                std::optional<double> tol = std::nullopt);

/// Moves the orthogonality center to `pos` (0-based) by QR sweeps and
/// returns the full canonical link factors. The represented tensor is
/// unchanged. QR is unpivoted Householder with the R diagonal forced
/// non-negative, which pins all signs.
std::pair<TTTensor, OrthoFactors> orthogonalize(const TTTensor &x, Index pos);

/// Same sweep without assembling OrthoFactors.
TTTensor orthogonalize_only(const TTTensor &x, Index pos);

/// <vec(x), vec(y)> by sequential core contractions; no densification.
double inner(const TTTensor &x, const TTTensor &y);

double norm(const TTTensor &x);

/// x + t*y by block core stacking; bond ranks add.
TTTensor tt_axpy(const TTTensor &x, double t, const TTTensor &y);

/// Entries of x at the given multi-indices (0-based, row-major list of
/// d-tuples). Cost O(|idx| * sum_k r_{k-1} r_k).
Vector gather(const TTTensor &x, const std::vector<std::vector<Index>> &idx);

/// Gather over flat index storage: sample s occupies idx[s*d .. s*d+d).
Vector gather_flat(const TTTensor &x, const std::vector<Index> &idx_flat, Index d);

/// Rank vector of the dense unfoldings, using threshold rel_tol * sigma_1.
std::vector<Index> dense_tt_rank(const DenseTensor &a, double rel_tol = 1e-8);

/// Left-to-right sweep of truncated SVDs reducing bond ranks to the target
/// (entries above the current rank clamp, so rounding never grows a bond).
/// The output is orthogonal with center at the last core and satisfies
/// <result, a> = ||result||^2 up to roundoff.
TTTensor tt_round(const TTTensor &a, const std::vector<Index> &target);

namespace detail {
/// In-place QR steps moving the orthogonality center; both return the
/// eliminated triangular factor.
Matrix push_right(std::vector<TTCore> &cores, Index k);
Matrix push_left(std::vector<TTCore> &cores, Index k);
} // namespace detail

} // namespace ttra
