#include "ttra/tt_tensor.hpp"

#include <Eigen/SVD>

#include "ttra/svd.hpp"

namespace ttra {

TTTensor TTTensor::zeros(const std::vector<Index> &shape) {
    require(shape.size() >= 2, "TTTensor: order must be at least 2");
    std::vector<TTCore> cores;
    cores.reserve(shape.size());
    for (Index n : shape) cores.emplace_back(1, n, 1);
    return TTTensor(std::move(cores));
}

TTTensor TTTensor::random(const std::vector<Index> &shape,
                          const std::vector<Index> &ranks, Rng &rng) {
    require(shape.size() >= 2, "TTTensor: order must be at least 2");
    require(ranks.size() == shape.size() - 1, "TTTensor: rank vector length mismatch");
    std::vector<TTCore> cores;
    cores.reserve(shape.size());
    for (std::size_t k = 0; k < shape.size(); ++k) {
        Index r0 = (k == 0) ? 1 : ranks[k - 1];
        Index r1 = (k + 1 == shape.size()) ? 1 : ranks[k];
        cores.emplace_back(r0, shape[k], r1, rng.normal_vector(r0 * shape[k] * r1));
    }
    return TTTensor(std::move(cores));
}

DenseTensor reconstruct(const TTTensor &x, Index dense_cap) {
    Index n = x.element_count();
    if (n > dense_cap)
        throw DenseBudgetExceeded("reconstruct: dense size " + std::to_string(n) +
                                  " exceeds cap " + std::to_string(dense_cap));
    // Accumulate M_k = (X_0 ... X_k)^R, shape (n_0...n_k) x r_k.
    Matrix acc = x.core(0).right();
    for (Index k = 1; k < x.order(); ++k) {
        const TTCore &c = x.core(k);
        Matrix next(acc.rows() * c.n(), c.r1());
        Eigen::Map<Matrix> flat(next.data(), acc.rows(), c.n() * c.r1());
        flat.noalias() = acc * c.left();
        acc = std::move(next);
    }
    return DenseTensor(x.shape(), Vector(Eigen::Map<const Vector>(acc.data(), n)));
}

TTTensor tt_svd(const DenseTensor &a, const std::vector<Index> *rank_caps,
                std::optional<double> tol) {
    const Index d = a.order();
    if (rank_caps) {
        require(static_cast<Index>(rank_caps->size()) == d - 1,
                "tt_svd: rank cap vector length mismatch");
        for (Index c : *rank_caps) require(c >= 1, "tt_svd: rank caps must be positive");
    }
    if (tol) require(*tol >= 0.0, "tt_svd: tolerance must be non-negative");
    if (a.norm() == 0.0) return TTTensor::zeros(a.shape());

    const auto &shape = a.shape();
    std::vector<TTCore> cores;
    cores.reserve(d);

    Index r_prev = 1;
    Index cols_rest = a.size();
    Matrix work = Eigen::Map<const Matrix>(a.values().data(), shape[0], cols_rest / shape[0]);
    for (Index k = 0; k < d - 1; ++k) {
        // work holds (r_prev * n_k) x (n_{k+1} ... n_{d-1}).
        Eigen::BDCSVD<Matrix> svd(work, Eigen::ComputeThinU | Eigen::ComputeThinV);
        const Vector &sigma = svd.singularValues();

        // Numerical-rank floor keeps the reconstruction exact to working
        // precision; caps and the tail rule can only truncate further.
        double eps_drop = std::numeric_limits<double>::epsilon() *
                          static_cast<double>(std::max(work.rows(), work.cols()));
        Index r = numerical_rank(sigma, eps_drop);
        if (tol) {
            double target = *tol * work.norm();
            double tail = 0.0;
            Index s = sigma.size();
            while (s > 1) {
                double t = tail + sigma[s - 1] * sigma[s - 1];
                if (std::sqrt(t) > target) break;
                tail = t;
                --s;
            }
            r = std::min(r, s);
        }
        if (rank_caps) r = std::min(r, (*rank_caps)[k]);
        if (r < 1) r = 1; // zero tensor keeps rank-1 zero cores

        cores.push_back(TTCore::from_right(r_prev, shape[k], svd.matrixU().leftCols(r)));
        Matrix rest = sigma.head(r).asDiagonal() * svd.matrixV().leftCols(r).transpose();
        // rest is r x (n_{k+1} ... n_{d-1}); reshape to (r * n_{k+1}) x remainder.
        cols_rest = rest.cols() / shape[k + 1];
        work = Eigen::Map<const Matrix>(rest.data(), r * shape[k + 1], cols_rest);
        r_prev = r;
    }
    cores.push_back(TTCore::from_right(r_prev, shape[d - 1], work));
    return TTTensor(std::move(cores), OrthoState::at(d - 1));
}

namespace detail {

/// One left-to-right QR step: make core k column-orthonormal in its right
/// unfolding, push the factor into core k+1. Returns the triangular factor.
Matrix push_right(std::vector<TTCore> &cores, Index k) {
    Matrix q, r;
    thin_qr(cores[k].right(), q, r);
    TTCore next = TTCore::from_left(cores[k + 1].n(), cores[k + 1].r1(),
                                    r * cores[k + 1].left());
    cores[k] = TTCore::from_right(cores[k].r0(), cores[k].n(), q);
    cores[k + 1] = std::move(next);
    return r;
}

/// One right-to-left QR step: make core k row-orthonormal in its left
/// unfolding, push the factor into core k-1. Returns the factor L with
/// cores[k].left_old == L * cores[k].left_new.
Matrix push_left(std::vector<TTCore> &cores, Index k) {
    Matrix q, r;
    thin_qr(cores[k].left().transpose(), q, r);
    TTCore prev = TTCore::from_right(cores[k - 1].r0(), cores[k - 1].n(),
                                     cores[k - 1].right() * r.transpose());
    cores[k] = TTCore::from_left(cores[k].n(), cores[k].r1(), q.transpose());
    cores[k - 1] = std::move(prev);
    return r.transpose();
}

} // namespace detail

using detail::push_left;
using detail::push_right;

TTTensor orthogonalize_only(const TTTensor &x, Index pos) {
    require(pos >= 0 && pos < x.order(), "orthogonalize: position out of range");
    if (x.ortho().position == pos) return x;
    // Canonical pipeline shared with the frame machinery: a full
    // right-to-left sweep, then a left-to-right sweep up to the center.
    std::vector<TTCore> cores = x.cores();
    const Index d = x.order();
    for (Index k = d - 1; k > 0; --k) push_left(cores, k);
    for (Index k = 0; k < pos; ++k) push_right(cores, k);
    return TTTensor(std::move(cores), OrthoState::at(pos));
}

double inner(const TTTensor &x, const TTTensor &y) {
    require(x.shape() == y.shape(), "inner: shape mismatch");
    Matrix g = Matrix::Ones(1, 1);
    for (Index k = 0; k < x.order(); ++k) {
        const TTCore &cx = x.core(k);
        const TTCore &cy = y.core(k);
        Matrix next = Matrix::Zero(cx.r1(), cy.r1());
        for (Index i = 0; i < cx.n(); ++i)
            next.noalias() += cx.slice(i).transpose() * g * cy.slice(i);
        g = std::move(next);
    }
    return g(0, 0);
}

double norm(const TTTensor &x) {
    double n2 = inner(x, x);
    return n2 > 0.0 ? std::sqrt(n2) : 0.0;
}

TTTensor tt_axpy(const TTTensor &x, double t, const TTTensor &y) {
    require(x.shape() == y.shape(), "tt_axpy: shape mismatch");
    const Index d = x.order();
    std::vector<TTCore> cores;
    cores.reserve(d);
    for (Index k = 0; k < d; ++k) {
        const TTCore &cx = x.core(k);
        const TTCore &cy = y.core(k);
        double scale = (k == 0) ? t : 1.0;
        if (k == 0) {
            TTCore c(1, cx.n(), cx.r1() + cy.r1());
            for (Index i = 0; i < c.n(); ++i) {
                c.slice(i).leftCols(cx.r1()) = cx.slice(i);
                c.slice(i).rightCols(cy.r1()) = scale * cy.slice(i);
            }
            cores.push_back(std::move(c));
        } else if (k == d - 1) {
            TTCore c(cx.r0() + cy.r0(), cx.n(), 1);
            for (Index i = 0; i < c.n(); ++i) {
                c.slice(i).topRows(cx.r0()) = cx.slice(i);
                c.slice(i).bottomRows(cy.r0()) = cy.slice(i);
            }
            cores.push_back(std::move(c));
        } else {
            TTCore c(cx.r0() + cy.r0(), cx.n(), cx.r1() + cy.r1());
            for (Index i = 0; i < c.n(); ++i) {
                c.slice(i).topLeftCorner(cx.r0(), cx.r1()) = cx.slice(i);
                c.slice(i).bottomRightCorner(cy.r0(), cy.r1()) = cy.slice(i);
            }
            cores.push_back(std::move(c));
        }
    }
    return TTTensor(std::move(cores));
}

Vector gather_flat(const TTTensor &x, const std::vector<Index> &idx_flat, Index d) {
    require(d == x.order(), "gather: index order mismatch");
    require(idx_flat.size() % d == 0, "gather: flat index length mismatch");
    const Index count = static_cast<Index>(idx_flat.size()) / d;
    const auto shape = x.shape();

    Index max_r = 1;
    for (Index r : x.ranks()) max_r = std::max(max_r, r);
    Vector u(max_r), w(max_r);

    Vector out(count);
    for (Index s = 0; s < count; ++s) {
        const Index *idx = idx_flat.data() + s * d;
        for (Index k = 0; k < d; ++k)
            require(idx[k] >= 0 && idx[k] < shape[k], "gather: index out of bounds");

        const TTCore &c0 = x.core(0);
        Index cur = c0.r1();
        for (Index b = 0; b < cur; ++b) u[b] = c0(0, idx[0], b);
        for (Index k = 1; k < d; ++k) {
            const TTCore &c = x.core(k);
            const Index r0 = c.r0(), r1 = c.r1();
            const double *base = c.data().data() + r0 * idx[k];
            const Index stride = r0 * c.n();
            for (Index b = 0; b < r1; ++b) {
                const double *col = base + stride * b;
                double acc = 0.0;
                for (Index a2 = 0; a2 < r0; ++a2) acc += u[a2] * col[a2];
                w[b] = acc;
            }
            cur = r1;
            u.head(cur).swap(w.head(cur));
        }
        out[s] = u[0];
    }
    return out;
}

Vector gather(const TTTensor &x, const std::vector<std::vector<Index>> &idx) {
    const Index d = x.order();
    std::vector<Index> flat;
    flat.reserve(idx.size() * d);
    for (const auto &t : idx) {
        require(static_cast<Index>(t.size()) == d, "gather: index order mismatch");
        flat.insert(flat.end(), t.begin(), t.end());
    }
    return gather_flat(x, flat, d);
}

std::vector<Index> dense_tt_rank(const DenseTensor &a, double rel_tol) {
    std::vector<Index> r(a.order() - 1);
    for (Index k = 1; k < a.order(); ++k)
        r[k - 1] = numerical_rank(singular_values(unfold(a, k)), rel_tol);
    return r;
}

TTTensor tt_round(const TTTensor &a, const std::vector<Index> &target) {
    const Index d = a.order();
    require(static_cast<Index>(target.size()) == d - 1,
            "tt_round: target rank vector length mismatch");
    for (Index t : target) require(t >= 1, "tt_round: target ranks must be positive");

    // Bring the input to the form with orthogonality center at the first
    // core, then sweep truncated SVDs to the right.
    std::vector<TTCore> cores = a.cores();
    for (Index k = d - 1; k > 0; --k) push_left(cores, k);

    for (Index k = 0; k < d - 1; ++k) {
        Index r = std::min(target[k], std::min(cores[k].right().rows(), cores[k].r1()));
        auto svd = truncated_svd(cores[k].right(), r);
        Matrix rest = svd.singular.asDiagonal() * svd.V.transpose();
        TTCore next = TTCore::from_left(cores[k + 1].n(), cores[k + 1].r1(),
                                        rest * cores[k + 1].left());
        cores[k] = TTCore::from_right(cores[k].r0(), cores[k].n(), svd.U);
        cores[k + 1] = std::move(next);
    }
    return TTTensor(std::move(cores), OrthoState::at(d - 1));
}

} // namespace ttra
