#pragma once

#include <memory>

#include "ttra/tt_tensor.hpp"

namespace ttra {

struct SampleSet;

/// Both canonical orthogonal families of one TT tensor plus the link
/// factors between them.
///
/// lefts[k], k = 0..d-2: column-orthonormal right unfoldings; lefts[d-1] is
/// the center of the form orthogonal at the last position. rights[k],
/// k = 1..d-1: row-orthonormal left unfoldings; rights[0] is the center of
/// the form orthogonal at the first position. links[k] (r_k x r_k,
/// k = 0..d-2) satisfies center_k.right() = lefts[k].right() * links[k] and
/// center_{k+1}.left() = links[k] * rights[k+1].left().
class OrthoFrame {
public:
    explicit OrthoFrame(const TTTensor &x);

    Index order() const { return static_cast<Index>(lefts_.size()); }
    std::vector<Index> shape() const;
    std::vector<Index> ranks() const;

    const TTCore &left(Index k) const { return lefts_[k]; }
    const TTCore &right(Index k) const { return rights_[k]; }
    const Matrix &link(Index k) const { return links_[k]; }

    /// Center core of the form orthogonal at position k (materialized).
    TTCore center(Index k) const;

    /// The tensor as a TT with orthogonality center at the last core.
    TTTensor to_tt() const;

private:
    std::vector<TTCore> lefts_;
    std::vector<TTCore> rights_;
    std::vector<Matrix> links_;
};

using FramePtr = std::shared_ptr<const OrthoFrame>;

/// Gauge-fixed element of the tangent space at a fixed-rank point. W[k] has
/// the shape of core k; the represented tensor is the sum over k of
/// lefts[0..k-1] * W[k] * rights[k+1..d-1]. The gauge index marks the one
/// unprojected parameter: W[k] right-orthogonal to lefts[k] for k < gauge
/// and left-orthogonal to rights[k] for k > gauge, which makes the d terms
/// mutually orthogonal.
struct TangentVector {
    FramePtr base;
    std::vector<TTCore> W;
    Index gauge = 0;

    double norm_sq() const {
        double s = 0.0;
        for (const auto &w : W) s += w.data().squaredNorm();
        return s;
    }
    double norm() const { return std::sqrt(norm_sq()); }
};

/// One subcone descent direction at bond m (0-based): the represented
/// tensor is lefts[0..m-1] * U * V * rights[m+2..d-1], with U orthogonal to
/// lefts[m] on the left-unfolded range and V to rights[m+1].
struct ConeDirection {
    FramePtr base;
    Index bond = 0;
    TTCore U; // (r_{m-1}, n_m, s)
    TTCore V; // (s, n_{m+1}, r_{m+1})
    Index s = 0;
    bool clamped = false;

    double norm() const;
    /// The direction as a TT tensor (exact, by core substitution).
    TTTensor to_tt() const;
};

/// Inner product of two tangent vectors with the same base and gauge.
double inner(const TangentVector &a, const TangentVector &b);

/// a*sa + b*sb for tangent vectors sharing base and gauge.
TangentVector axpy(double sa, const TangentVector &a, double sb, const TangentVector &b);

TangentVector scale(const TangentVector &a, double s);

/// Orthogonal projection of a dense tensor onto the tangent space.
TangentVector project_tangent(const FramePtr &frame, const DenseTensor &y, Index gauge);

/// Orthogonal projection of a sparse tensor (values on the sample set,
/// zero elsewhere) onto the tangent space.
TangentVector project_tangent(const FramePtr &frame, const SampleSet &omega,
                              const Vector &values, Index gauge);

/// Orthogonal projection of a TT tensor onto the tangent space.
TangentVector project_tangent(const FramePtr &frame, const TTTensor &y, Index gauge);

/// Convenience overloads building the frame from x.
TangentVector project_tangent(const TTTensor &x, const DenseTensor &y, Index gauge);

/// Re-expresses the same tangent tensor under another gauge.
TangentVector with_gauge(const TangentVector &xi, Index gauge);

/// The tangent tensor as an explicit TT of bond ranks 2r.
TTTensor tangent_to_tt(const TangentVector &xi);

/// X + t*xi as an explicit TT of bond ranks 2r (exact block construction).
TTTensor tangent_step(const TangentVector &xi, double t);

/// The doubly-projected lifted matrix at bond m, of shape
/// (r_{m-1} n_m) x (n_{m+1} r_{m+1}).
Matrix subcone_matrix(const FramePtr &frame, const DenseTensor &y, Index bond);
Matrix subcone_matrix(const FramePtr &frame, const SampleSet &omega,
                      const Vector &values, Index bond);

/// Best rank-s element of the subcone at bond m aligned with y, via the
/// truncated SVD of subcone_matrix. s clamps to the matrix rank bound.
ConeDirection project_subcone(const FramePtr &frame, const DenseTensor &y,
                              Index bond, Index s);
ConeDirection project_subcone(const FramePtr &frame, const SampleSet &omega,
                              const Vector &values, Index bond, Index s);

/// Builds a ConeDirection from an already computed subcone matrix.
ConeDirection cone_direction_from_matrix(const FramePtr &frame, const Matrix &p,
                                         Index bond, Index s);

/// Rank-increasing retraction: the exact representation of x + t*dir with
/// the bond-m rank grown by dir.s.
TTTensor retract_increase(const ConeDirection &dir, double t);

/// Rank-preserving retraction for the fixed-rank solver: rounds x + t*xi
/// back to the ranks of x.
TTTensor retract_fixed_rank(const TTTensor &x, double t, const TangentVector &xi);

} // namespace ttra
