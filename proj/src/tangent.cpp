#include "ttra/tangent.hpp"

#include "ttra/sampling.hpp"
#include "ttra/svd.hpp"

namespace ttra {

OrthoFrame::OrthoFrame(const TTTensor &x) {
    const Index d = x.order();

    // Right-orthogonal family: center at the first core.
    rights_ = x.cores();
    for (Index k = d - 1; k > 0; --k) detail::push_left(rights_, k);

    // Left-orthogonal family and links grown out of the same sweep, so the
    // QR at each step acts on the true center core.
    lefts_.resize(d);
    links_.resize(d - 1);
    TTCore center_k = rights_[0];
    for (Index k = 0; k < d - 1; ++k) {
        Matrix q, r;
        thin_qr(center_k.right(), q, r);
        lefts_[k] = TTCore::from_right(center_k.r0(), center_k.n(), q);
        links_[k] = std::move(r);
        center_k = TTCore::from_left(rights_[k + 1].n(), rights_[k + 1].r1(),
                                     links_[k] * rights_[k + 1].left());
    }
    lefts_[d - 1] = std::move(center_k);
}

std::vector<Index> OrthoFrame::shape() const {
    std::vector<Index> s(lefts_.size());
    for (std::size_t k = 0; k < lefts_.size(); ++k) s[k] = lefts_[k].n();
    return s;
}

std::vector<Index> OrthoFrame::ranks() const {
    std::vector<Index> r(lefts_.size() - 1);
    for (std::size_t k = 0; k + 1 < lefts_.size(); ++k) r[k] = lefts_[k].r1();
    return r;
}

TTCore OrthoFrame::center(Index k) const {
    require(k >= 0 && k < order(), "center: position out of range");
    if (k == 0) return rights_[0];
    if (k == order() - 1) return lefts_[k];
    return TTCore::from_left(rights_[k].n(), rights_[k].r1(),
                             links_[k - 1] * rights_[k].left());
}

TTTensor OrthoFrame::to_tt() const {
    return TTTensor(lefts_, OrthoState::at(order() - 1));
}

std::pair<TTTensor, OrthoFactors> orthogonalize(const TTTensor &x, Index pos) {
    require(pos >= 0 && pos < x.order(), "orthogonalize: position out of range");
    const Index d = x.order();
    OrthoFrame frame(x);

    // Link factors evaluated through their defining contractions, one per
    // family, so the Q[k] == R[k+1] identity is a genuine consistency check.
    OrthoFactors factors;
    factors.Q.resize(d - 1);
    factors.R.resize(d);
    for (Index k = 0; k < d - 1; ++k) {
        TTCore c = frame.center(k);
        factors.Q[k] = frame.left(k).right().transpose() * c.right();
    }
    for (Index k = 1; k < d; ++k) {
        TTCore c = frame.center(k);
        factors.R[k] = c.left() * frame.right(k).left().transpose();
    }

    if (x.ortho().position == pos) return {x, std::move(factors)};
    std::vector<TTCore> cores;
    cores.reserve(d);
    for (Index k = 0; k < pos; ++k) cores.push_back(frame.left(k));
    cores.push_back(frame.center(pos));
    for (Index k = pos + 1; k < d; ++k) cores.push_back(frame.right(k));
    return {TTTensor(std::move(cores), OrthoState::at(pos)), std::move(factors)};
}

double inner(const TangentVector &a, const TangentVector &b) {
    require(a.W.size() == b.W.size(), "tangent inner: order mismatch");
    require(a.gauge == b.gauge, "tangent inner: gauge mismatch");
    double s = 0.0;
    for (std::size_t k = 0; k < a.W.size(); ++k)
        s += a.W[k].data().dot(b.W[k].data());
    return s;
}

TangentVector axpy(double sa, const TangentVector &a, double sb, const TangentVector &b) {
    require(a.W.size() == b.W.size() && a.gauge == b.gauge,
            "tangent axpy: mismatched vectors");
    TangentVector out;
    out.base = a.base;
    out.gauge = a.gauge;
    out.W.reserve(a.W.size());
    for (std::size_t k = 0; k < a.W.size(); ++k) {
        TTCore w = a.W[k];
        w.data() = sa * a.W[k].data() + sb * b.W[k].data();
        out.W.push_back(std::move(w));
    }
    return out;
}

TangentVector scale(const TangentVector &a, double s) {
    TangentVector out = a;
    for (auto &w : out.W) w.data() *= s;
    return out;
}

namespace {

/// Removes the gauge-fixed components in place.
void apply_gauge(const OrthoFrame &frame, std::vector<TTCore> &W, Index gauge) {
    const Index d = frame.order();
    require(gauge >= 0 && gauge < d, "project_tangent: gauge out of range");
    for (Index k = 0; k < gauge; ++k) {
        auto wr = W[k].right();
        auto xr = frame.left(k).right();
        wr.noalias() -= xr * (xr.transpose() * wr);
    }
    for (Index k = gauge + 1; k < d; ++k) {
        auto wl = W[k].left();
        auto xl = frame.right(k).left();
        wl.noalias() -= (wl * xl.transpose()) * xl;
    }
}

std::vector<TTCore> zero_like_cores(const OrthoFrame &frame) {
    std::vector<TTCore> W;
    W.reserve(frame.order());
    for (Index k = 0; k < frame.order(); ++k) {
        const TTCore &c = frame.left(k);
        W.emplace_back(c.r0(), c.n(), c.r1());
    }
    return W;
}

/// Per-sample prefix products through the left family: out[k] (length r_k)
/// for k = 0..d-2, stored at stride `stride`.
void sample_prefixes(const OrthoFrame &frame, const Index *idx, double *out,
                     Index stride) {
    const Index d = frame.order();
    const TTCore &c0 = frame.left(0);
    for (Index b = 0; b < c0.r1(); ++b) out[b] = c0(0, idx[0], b);
    for (Index k = 1; k < d - 1; ++k) {
        const TTCore &c = frame.left(k);
        const double *prev = out + (k - 1) * stride;
        double *cur = out + k * stride;
        const double *base = c.data().data() + c.r0() * idx[k];
        const Index col_stride = c.r0() * c.n();
        for (Index b = 0; b < c.r1(); ++b) {
            const double *col = base + col_stride * b;
            double acc = 0.0;
            for (Index a = 0; a < c.r0(); ++a) acc += prev[a] * col[a];
            cur[b] = acc;
        }
    }
}

/// Per-sample suffix products through the right family: out[k] (length
/// r_{k-1}) for k = 1..d-1, stored at stride `stride`.
void sample_suffixes(const OrthoFrame &frame, const Index *idx, double *out,
                     Index stride) {
    const Index d = frame.order();
    const TTCore &cl = frame.right(d - 1);
    {
        double *cur = out + (d - 1) * stride;
        const double *col = cl.data().data() + cl.r0() * idx[d - 1];
        for (Index a = 0; a < cl.r0(); ++a) cur[a] = col[a];
    }
    for (Index k = d - 2; k >= 1; --k) {
        const TTCore &c = frame.right(k);
        const double *next = out + (k + 1) * stride;
        double *cur = out + k * stride;
        const double *base = c.data().data() + c.r0() * idx[k];
        const Index col_stride = c.r0() * c.n();
        for (Index a = 0; a < c.r0(); ++a) cur[a] = 0.0;
        for (Index b = 0; b < c.r1(); ++b) {
            const double *col = base + col_stride * b;
            const double vb = next[b];
            for (Index a = 0; a < c.r0(); ++a) cur[a] += vb * col[a];
        }
    }
}

Index max_rank(const OrthoFrame &frame) {
    Index m = 1;
    for (Index r : frame.ranks()) m = std::max(m, r);
    return m;
}

/// Suffix contractions of a dense tensor with the right family:
/// suffix[k] is (n_0...n_k) x r_k for k = 0..d-1 (suffix[d-1] is the
/// flattened tensor itself).
std::vector<Matrix> dense_suffixes(const OrthoFrame &frame, const DenseTensor &y) {
    const Index d = frame.order();
    std::vector<Matrix> suffix(d);
    suffix[d - 1] = Eigen::Map<const Matrix>(y.values().data(), y.size(), 1);
    for (Index k = d - 1; k >= 1; --k) {
        const TTCore &c = frame.right(k);
        Index rows = suffix[k].rows() / c.n();
        Eigen::Map<const Matrix> grouped(suffix[k].data(), rows, c.n() * c.r1());
        suffix[k - 1].noalias() = grouped * c.left().transpose();
    }
    return suffix;
}

} // namespace

TangentVector project_tangent(const FramePtr &frame, const DenseTensor &y, Index gauge) {
    require(frame->shape() == y.shape(), "project_tangent: shape mismatch");
    const Index d = frame->order();
    TangentVector out;
    out.base = frame;
    out.gauge = gauge;
    out.W = zero_like_cores(*frame);

    std::vector<Matrix> suffix = dense_suffixes(*frame, y);

    Matrix prefix = Matrix::Ones(1, 1); // (n_0...n_{k-1}) x r_{k-1}
    for (Index k = 0; k < d; ++k) {
        const TTCore &c = frame->left(k);
        Eigen::Map<const Matrix> grouped(suffix[k].data(), prefix.rows(),
                                         c.n() * c.r1());
        out.W[k].left().noalias() = prefix.transpose() * grouped;
        if (k < d - 1) {
            Matrix grown(prefix.rows() * c.n(), c.r1());
            Eigen::Map<Matrix> flat(grown.data(), prefix.rows(), c.n() * c.r1());
            flat.noalias() = prefix * c.left();
            prefix = std::move(grown);
        }
    }
    apply_gauge(*frame, out.W, gauge);
    return out;
}

TangentVector project_tangent(const FramePtr &frame, const SampleSet &omega,
                              const Vector &values, Index gauge) {
    require(frame->shape() == omega.shape, "project_tangent: shape mismatch");
    require(values.size() == omega.count(), "project_tangent: value count mismatch");
    const Index d = frame->order();
    TangentVector out;
    out.base = frame;
    out.gauge = gauge;
    out.W = zero_like_cores(*frame);

    const Index stride = max_rank(*frame);
    std::vector<double> pre(static_cast<std::size_t>(stride * d));
    std::vector<double> suf(static_cast<std::size_t>(stride * d));
    const double one = 1.0;

    for (Index s = 0; s < omega.count(); ++s) {
        const Index *idx = omega.index(s);
        const double z = values[s];
        if (z == 0.0) continue;
        sample_prefixes(*frame, idx, pre.data(), stride);
        sample_suffixes(*frame, idx, suf.data(), stride);
        for (Index k = 0; k < d; ++k) {
            TTCore &w = out.W[k];
            const Index r0 = w.r0(), r1 = w.r1();
            const double *u = (k == 0) ? &one : pre.data() + (k - 1) * stride;
            const double *v = (k == d - 1) ? &one : suf.data() + (k + 1) * stride;
            double *base = w.data().data() + r0 * idx[k];
            const Index col_stride = r0 * w.n();
            for (Index b = 0; b < r1; ++b) {
                double *col = base + col_stride * b;
                const double zv = z * v[b];
                for (Index a = 0; a < r0; ++a) col[a] += zv * u[a];
            }
        }
    }
    apply_gauge(*frame, out.W, gauge);
    return out;
}

TangentVector project_tangent(const FramePtr &frame, const TTTensor &y, Index gauge) {
    require(frame->shape() == y.shape(), "project_tangent: shape mismatch");
    const Index d = frame->order();
    TangentVector out;
    out.base = frame;
    out.gauge = gauge;
    out.W = zero_like_cores(*frame);

    // Prefix Grams through the left family, suffix Grams through the right.
    std::vector<Matrix> g(d), h(d + 1);
    Matrix acc = Matrix::Ones(1, 1);
    for (Index k = 0; k < d; ++k) {
        g[k] = acc; // r_{k-1} x ry_{k-1}
        if (k < d - 1) {
            const TTCore &cx = frame->left(k);
            const TTCore &cy = y.core(k);
            Matrix next = Matrix::Zero(cx.r1(), cy.r1());
            for (Index i = 0; i < cx.n(); ++i)
                next.noalias() += cx.slice(i).transpose() * (acc * cy.slice(i));
            acc = std::move(next);
        }
    }
    h[d] = Matrix::Ones(1, 1);
    for (Index k = d - 1; k >= 1; --k) {
        const TTCore &cx = frame->right(k);
        const TTCore &cy = y.core(k);
        Matrix next = Matrix::Zero(cy.r0(), cx.r0());
        for (Index i = 0; i < cx.n(); ++i)
            next.noalias() += cy.slice(i) * (h[k + 1] * cx.slice(i).transpose());
        h[k] = std::move(next);
    }

    for (Index k = 0; k < d; ++k) {
        const TTCore &cy = y.core(k);
        for (Index i = 0; i < cy.n(); ++i)
            out.W[k].slice(i).noalias() = g[k] * (cy.slice(i) * h[k + 1]);
    }
    apply_gauge(*frame, out.W, gauge);
    return out;
}

TangentVector project_tangent(const TTTensor &x, const DenseTensor &y, Index gauge) {
    return project_tangent(std::make_shared<OrthoFrame>(x), y, gauge);
}

TangentVector with_gauge(const TangentVector &xi, Index gauge) {
    if (gauge == xi.gauge) return xi;
    return project_tangent(xi.base, tangent_to_tt(xi), gauge);
}

namespace {

TTTensor assemble_step(const TangentVector &xi, double t, bool add_base) {
    const OrthoFrame &f = *xi.base;
    const Index d = f.order();
    std::vector<TTCore> cores;
    cores.reserve(d);
    {
        const TTCore &w = xi.W[0];
        const TTCore &xl = f.left(0);
        TTCore c(1, w.n(), w.r1() + xl.r1());
        for (Index i = 0; i < c.n(); ++i) {
            c.slice(i).leftCols(w.r1()) = t * w.slice(i);
            c.slice(i).rightCols(xl.r1()) = xl.slice(i);
        }
        cores.push_back(std::move(c));
    }
    for (Index k = 1; k < d - 1; ++k) {
        const TTCore &w = xi.W[k];
        const TTCore &xl = f.left(k);
        const TTCore &xr = f.right(k);
        TTCore c(2 * w.r0(), w.n(), 2 * w.r1());
        for (Index i = 0; i < c.n(); ++i) {
            auto s = c.slice(i);
            s.topLeftCorner(xr.r0(), xr.r1()) = xr.slice(i);
            s.bottomLeftCorner(w.r0(), w.r1()) = t * w.slice(i);
            s.bottomRightCorner(xl.r0(), xl.r1()) = xl.slice(i);
        }
        cores.push_back(std::move(c));
    }
    {
        const TTCore &w = xi.W[d - 1];
        const TTCore &xr = f.right(d - 1);
        TTCore c(2 * w.r0(), w.n(), 1);
        for (Index i = 0; i < c.n(); ++i) {
            auto s = c.slice(i);
            s.topRows(xr.r0()) = xr.slice(i);
            if (add_base)
                s.bottomRows(w.r0()) = t * w.slice(i) + f.left(d - 1).slice(i);
            else
                s.bottomRows(w.r0()) = t * w.slice(i);
        }
        cores.push_back(std::move(c));
    }
    return TTTensor(std::move(cores));
}

} // namespace

TTTensor tangent_to_tt(const TangentVector &xi) { return assemble_step(xi, 1.0, false); }

TTTensor tangent_step(const TangentVector &xi, double t) {
    return assemble_step(xi, t, true);
}

namespace {

void project_subcone_sides(const OrthoFrame &frame, Matrix &p, Index bond) {
    auto xl = frame.left(bond).right();        // (r_{m-1} n_m) x r_m, orthonormal cols
    auto xr = frame.right(bond + 1).left();    // r_m x (n_{m+1} r_{m+1}), orthonormal rows
    p.noalias() -= xl * (xl.transpose() * p);
    p.noalias() -= (p * xr.transpose()) * xr;
}

} // namespace

Matrix subcone_matrix(const FramePtr &frame, const DenseTensor &y, Index bond) {
    require(frame->shape() == y.shape(), "subcone_matrix: shape mismatch");
    const Index d = frame->order();
    require(bond >= 0 && bond <= d - 2, "subcone_matrix: mode out of range");

    // Contract the trailing modes with the right family down to bond+2,
    // then the leading modes with the left family up to bond-1.
    Matrix sweep = Eigen::Map<const Matrix>(y.values().data(), y.size(), 1);
    for (Index k = d - 1; k >= bond + 2; --k) {
        const TTCore &c = frame->right(k);
        Eigen::Map<const Matrix> grouped(sweep.data(), sweep.rows() / c.n(),
                                         c.n() * c.r1());
        Matrix next = grouped * c.left().transpose();
        sweep = std::move(next);
    }
    Matrix prefix = Matrix::Ones(1, 1);
    for (Index k = 0; k < bond; ++k) {
        const TTCore &c = frame->left(k);
        Matrix grown(prefix.rows() * c.n(), c.r1());
        Eigen::Map<Matrix> flat(grown.data(), prefix.rows(), c.n() * c.r1());
        flat.noalias() = prefix * c.left();
        prefix = std::move(grown);
    }
    const Index nm = frame->left(bond).n();
    const Index nm1 = frame->right(bond + 1).n();
    const Index rl = frame->left(bond).r0();
    const Index rr = frame->right(bond + 1).r1();
    Eigen::Map<const Matrix> grouped(sweep.data(), prefix.rows(), nm * nm1 * rr);
    Matrix mid = prefix.transpose() * grouped; // r_{m-1} x (n_m n_{m+1} r_{m+1})
    Matrix p = Eigen::Map<const Matrix>(mid.data(), rl * nm, nm1 * rr);
    project_subcone_sides(*frame, p, bond);
    return p;
}

Matrix subcone_matrix(const FramePtr &frame, const SampleSet &omega,
                      const Vector &values, Index bond) {
    require(frame->shape() == omega.shape, "subcone_matrix: shape mismatch");
    require(values.size() == omega.count(), "subcone_matrix: value count mismatch");
    const Index d = frame->order();
    require(bond >= 0 && bond <= d - 2, "subcone_matrix: mode out of range");

    const Index nm = frame->left(bond).n();
    const Index nm1 = frame->right(bond + 1).n();
    const Index rl = frame->left(bond).r0();
    const Index rr = frame->right(bond + 1).r1();
    Matrix p = Matrix::Zero(rl * nm, nm1 * rr);

    const Index stride = max_rank(*frame);
    std::vector<double> pre(static_cast<std::size_t>(stride * d));
    std::vector<double> suf(static_cast<std::size_t>(stride * d));
    const double one = 1.0;

    for (Index s = 0; s < omega.count(); ++s) {
        const Index *idx = omega.index(s);
        const double z = values[s];
        if (z == 0.0) continue;
        sample_prefixes(*frame, idx, pre.data(), stride);
        sample_suffixes(*frame, idx, suf.data(), stride);
        const double *u = (bond == 0) ? &one : pre.data() + (bond - 1) * stride;
        const double *v = (bond + 2 == d) ? &one : suf.data() + (bond + 2) * stride;
        const Index row0 = rl * idx[bond];
        for (Index b = 0; b < rr; ++b) {
            double *col = p.col(idx[bond + 1] + nm1 * b).data() + row0;
            const double zv = z * v[b];
            for (Index a = 0; a < rl; ++a) col[a] += zv * u[a];
        }
    }
    project_subcone_sides(*frame, p, bond);
    return p;
}

ConeDirection cone_direction_from_matrix(const FramePtr &frame, const Matrix &p,
                                         Index bond, Index s) {
    require(s >= 1, "project_subcone: rank increment must be at least 1");
    auto svd = truncated_svd(p, s);
    s = svd.singular.size();

    const Index nm = frame->left(bond).n();
    const Index nm1 = frame->right(bond + 1).n();
    const Index rl = frame->left(bond).r0();
    const Index rr = frame->right(bond + 1).r1();

    ConeDirection dir;
    dir.base = frame;
    dir.bond = bond;
    dir.s = s;
    dir.clamped = svd.clamped;
    dir.U = TTCore::from_right(rl, nm, svd.U);
    dir.V = TTCore::from_left(nm1, rr,
                              Matrix(svd.singular.asDiagonal() * svd.V.transpose()));
    return dir;
}

ConeDirection project_subcone(const FramePtr &frame, const DenseTensor &y, Index bond,
                              Index s) {
    return cone_direction_from_matrix(frame, subcone_matrix(frame, y, bond), bond, s);
}

ConeDirection project_subcone(const FramePtr &frame, const SampleSet &omega,
                              const Vector &values, Index bond, Index s) {
    return cone_direction_from_matrix(frame, subcone_matrix(frame, omega, values, bond),
                                      bond, s);
}

double ConeDirection::norm() const {
    // The outer factors are orthonormal, so the norm is carried by U * V.
    return (U.right() * V.left()).norm();
}

TTTensor ConeDirection::to_tt() const {
    const OrthoFrame &f = *base;
    std::vector<TTCore> cores;
    cores.reserve(f.order());
    for (Index k = 0; k < bond; ++k) cores.push_back(f.left(k));
    cores.push_back(U);
    cores.push_back(V);
    for (Index k = bond + 2; k < f.order(); ++k) cores.push_back(f.right(k));
    return TTTensor(std::move(cores));
}

TTTensor retract_increase(const ConeDirection &dir, double t) {
    const OrthoFrame &f = *dir.base;
    const Index m = dir.bond;
    std::vector<TTCore> cores;
    cores.reserve(f.order());
    for (Index k = 0; k < m; ++k) cores.push_back(f.left(k));

    const TTCore &xl = f.left(m);
    TTCore grown(xl.r0(), xl.n(), xl.r1() + dir.s);
    for (Index i = 0; i < grown.n(); ++i) {
        grown.slice(i).leftCols(xl.r1()) = xl.slice(i);
        grown.slice(i).rightCols(dir.s) = dir.U.slice(i);
    }
    cores.push_back(std::move(grown));

    TTCore center = f.center(m + 1);
    TTCore stacked(center.r0() + dir.s, center.n(), center.r1());
    for (Index i = 0; i < stacked.n(); ++i) {
        stacked.slice(i).topRows(center.r0()) = center.slice(i);
        stacked.slice(i).bottomRows(dir.s) = t * dir.V.slice(i);
    }
    cores.push_back(std::move(stacked));

    for (Index k = m + 2; k < f.order(); ++k) cores.push_back(f.right(k));
    return TTTensor(std::move(cores), OrthoState::at(m + 1));
}

TTTensor retract_fixed_rank(const TTTensor &x, double t, const TangentVector &xi) {
    require(x.shape() == xi.base->shape(), "retract_fixed_rank: shape mismatch");
    return tt_round(tt_axpy(x, t, tangent_to_tt(xi)), x.ranks());
}

} // namespace ttra
