#include "doctest.h"

#include <Eigen/SVD>

#include "oracles.hpp"
#include "test_helpers.hpp"
#include "ttra/completion.hpp"
#include "ttra/svd.hpp"
#include "ttra/tangent.hpp"

using namespace ttra;
using namespace ttra::testing;

namespace {

FramePtr frame_of(const TTTensor &x) { return std::make_shared<OrthoFrame>(x); }

SampleSet full_grid(const DenseTensor &a) {
    const Index d = a.order();
    std::vector<Index> idx;
    std::vector<Index> cur(d, 0);
    for (Index lin = 0; lin < a.size(); ++lin) {
        idx.insert(idx.end(), cur.begin(), cur.end());
        for (Index k = 0; k < d; ++k) {
            if (++cur[k] < a.shape()[k]) break;
            cur[k] = 0;
        }
    }
    return SampleSet::from_indices(a.shape(), std::move(idx), a.values());
}

} // namespace

TEST_CASE("frame families reproduce the tensor") {
    TTTensor x = random_tt({3, 4, 3, 2}, {2, 3, 2}, 7);
    OrthoFrame f(x);
    DenseTensor want = reconstruct(x);
    CHECK(rel_err(reconstruct(f.to_tt()), want) < 1e-12);
    for (Index k = 0; k < 4; ++k) {
        std::vector<TTCore> cores;
        for (Index j = 0; j < k; ++j) cores.push_back(f.left(j));
        cores.push_back(f.center(k));
        for (Index j = k + 1; j < 4; ++j) cores.push_back(f.right(j));
        CHECK(rel_err(reconstruct(TTTensor(std::move(cores))), want) < 1e-12);
    }
}

TEST_CASE("projecting the point itself gives the point") {
    TTTensor x = random_tt({3, 4, 3}, {2, 2}, 11);
    auto f = frame_of(x);
    DenseTensor y = reconstruct(x);
    TangentVector xi = project_tangent(f, y, x.order() - 1);
    // W_k vanishes for k < d-1 and the last parameter carries the center.
    for (Index k = 0; k < 2; ++k)
        CHECK(xi.W[k].data().norm() < 1e-12 * y.norm());
    CHECK((xi.W[2].data() - f->center(2).data()).norm() < 1e-12 * y.norm());
    CHECK(rel_err(oracles::tangent_dense(xi), y.values()) < 1e-12);
}

TEST_CASE("tangent projection is idempotent") {
    TTTensor x = random_tt({3, 4, 3}, {2, 2}, 13);
    auto f = frame_of(x);
    DenseTensor y = random_dense({3, 4, 3}, 17);
    TangentVector xi = project_tangent(f, y, 2);
    DenseTensor ximg(y.shape(), oracles::tangent_dense(xi));
    TangentVector xi2 = project_tangent(f, ximg, 2);
    CHECK(rel_err(oracles::tangent_dense(xi2), ximg.values()) < 1e-10);
}

TEST_CASE("tangent projection matches the explicit-basis oracle") {
    TTTensor x = random_tt({4, 4, 4}, {2, 2}, 19);
    auto f = frame_of(x);
    DenseTensor y = random_dense({4, 4, 4}, 23);
    TangentVector xi = project_tangent(f, y, 2);
    Matrix basis = oracles::tangent_space_basis(f);
    Vector want = oracles::project_onto_basis(basis, y.values());
    CHECK(rel_err(oracles::tangent_dense(xi), want) < 1e-8);
}

TEST_CASE("sparse, dense and tt projections agree") {
    TTTensor x = random_tt({3, 5, 4}, {2, 3}, 29);
    auto f = frame_of(x);
    DenseTensor y = random_dense({3, 5, 4}, 31);
    SampleSet grid = full_grid(y);
    TangentVector dense = project_tangent(f, y, 2);
    TangentVector sparse = project_tangent(f, grid, grid.values, 2);
    for (Index k = 0; k < 3; ++k)
        CHECK((dense.W[k].data() - sparse.W[k].data()).norm() < 1e-10);

    TTTensor ytt = tt_svd(y);
    TangentVector viott = project_tangent(f, ytt, 2);
    for (Index k = 0; k < 3; ++k)
        CHECK((dense.W[k].data() - viott.W[k].data()).norm() < 1e-9);
}

TEST_CASE("gauge conditions hold and gauge changes preserve the tensor") {
    TTTensor x = random_tt({3, 4, 3, 3}, {2, 3, 2}, 37);
    auto f = frame_of(x);
    DenseTensor y = random_dense({3, 4, 3, 3}, 41);
    for (Index gauge = 0; gauge < 4; ++gauge) {
        TangentVector xi = project_tangent(f, y, gauge);
        for (Index k = 0; k < gauge; ++k)
            CHECK((xi.W[k].right().transpose() * f->left(k).right()).norm() < 1e-10);
        for (Index k = gauge + 1; k < 4; ++k)
            CHECK((xi.W[k].left() * f->right(k).left().transpose()).norm() < 1e-10);
    }
    TangentVector xi = project_tangent(f, y, 3);
    Vector base = oracles::tangent_dense(xi);
    for (Index gauge = 0; gauge < 3; ++gauge) {
        TangentVector moved = with_gauge(xi, gauge);
        CHECK(rel_err(oracles::tangent_dense(moved), base) < 1e-12);
    }
}

TEST_CASE("the gauge makes the term sum orthogonal") {
    TTTensor x = random_tt({3, 4, 3, 3}, {2, 2, 2}, 43);
    auto f = frame_of(x);
    DenseTensor y = random_dense({3, 4, 3, 3}, 47);
    TangentVector xi = project_tangent(f, y, 3);
    auto terms = oracles::tangent_term_vectors(xi);
    for (std::size_t a = 0; a < terms.size(); ++a)
        for (std::size_t b = a + 1; b < terms.size(); ++b)
            CHECK(std::abs(terms[a].dot(terms[b])) <=
                  1e-10 * terms[a].norm() * terms[b].norm() + 1e-14);
}

TEST_CASE("tangent projection is self adjoint") {
    TTTensor x = random_tt({3, 3, 4}, {2, 2}, 53);
    auto f = frame_of(x);
    DenseTensor y = random_dense({3, 3, 4}, 59);
    DenseTensor z = random_dense({3, 3, 4}, 61);
    TangentVector py = project_tangent(f, y, 2);
    TangentVector pz = project_tangent(f, z, 2);
    double lhs = oracles::tangent_dense(py).dot(z.values());
    double rhs = y.values().dot(oracles::tangent_dense(pz));
    CHECK(lhs == doctest::Approx(rhs).epsilon(1e-10));
}

TEST_CASE("tangent inner products equal parameter inner products") {
    TTTensor x = random_tt({3, 4, 3}, {2, 2}, 67);
    auto f = frame_of(x);
    TangentVector a = project_tangent(f, random_dense({3, 4, 3}, 71), 2);
    TangentVector b = project_tangent(f, random_dense({3, 4, 3}, 73), 2);
    CHECK(inner(a, b) ==
          doctest::Approx(oracles::tangent_dense(a).dot(oracles::tangent_dense(b)))
              .epsilon(1e-10));
}

TEST_CASE("tangent_to_tt represents the term sum") {
    TTTensor x = random_tt({3, 4, 3}, {2, 2}, 79);
    auto f = frame_of(x);
    SUBCASE("zero parameters give the zero tensor") {
        TangentVector xi;
        xi.base = f;
        xi.gauge = 2;
        for (Index k = 0; k < 3; ++k) {
            const TTCore &c = f->left(k);
            xi.W.emplace_back(c.r0(), c.n(), c.r1());
        }
        CHECK(norm(tangent_to_tt(xi)) < 1e-14);
    }
    SUBCASE("a single last-mode parameter is a one-term product") {
        TangentVector xi;
        xi.base = f;
        xi.gauge = 2;
        Rng rng(83);
        for (Index k = 0; k < 3; ++k) {
            const TTCore &c = f->left(k);
            TTCore w(c.r0(), c.n(), c.r1());
            if (k == 2) w.data() = rng.normal_vector(w.size());
            xi.W.push_back(std::move(w));
        }
        std::vector<TTCore> cores{f->left(0), f->left(1), xi.W[2]};
        Vector want = reconstruct(TTTensor(std::move(cores))).values();
        CHECK(rel_err(reconstruct(tangent_to_tt(xi)).values(), want) < 1e-12);
    }
    SUBCASE("random parameters match the term-by-term oracle") {
        DenseTensor y = random_dense({3, 4, 3}, 89);
        TangentVector xi = project_tangent(f, y, 2);
        CHECK(rel_err(reconstruct(tangent_to_tt(xi)).values(),
                      oracles::tangent_dense(xi)) < 1e-12);
        // x + t*xi assembled directly.
        Vector stepped = reconstruct(tangent_step(xi, 0.7)).values();
        Vector want = reconstruct(x).values() + 0.7 * oracles::tangent_dense(xi);
        CHECK(rel_err(stepped, want) < 1e-12);
    }
}

TEST_CASE("subcone matrix vanishes on the point itself") {
    TTTensor x = random_tt({3, 4, 3, 3}, {2, 2, 2}, 97);
    auto f = frame_of(x);
    DenseTensor y = reconstruct(x);
    for (Index m = 0; m < 3; ++m)
        CHECK(subcone_matrix(f, y, m).norm() < 1e-12 * y.norm());
}

TEST_CASE("subcone matrix matches the literal dense oracle") {
    TTTensor x = random_tt({3, 4, 3, 3}, {2, 3, 2}, 101);
    auto f = frame_of(x);
    DenseTensor y = random_dense({3, 4, 3, 3}, 103);
    SampleSet grid = full_grid(y);
    for (Index m = 0; m < 3; ++m) {
        Matrix want = oracles::subcone_matrix_dense_oracle(f, y, m);
        Matrix dense = subcone_matrix(f, y, m);
        Matrix sparse = subcone_matrix(f, grid, grid.values, m);
        CHECK((dense - want).norm() < 1e-10 * (1.0 + want.norm()));
        CHECK((sparse - want).norm() < 1e-10 * (1.0 + want.norm()));
    }
}

TEST_CASE("subcone projection extremes") {
    TTTensor x = random_tt({3, 4, 3}, {2, 2}, 107);
    auto f = frame_of(x);
    SUBCASE("zero input gives a zero direction") {
        DenseTensor zero = DenseTensor::zeros({3, 4, 3});
        ConeDirection dir = project_subcone(f, zero, 1, 2);
        CHECK(dir.norm() < 1e-14);
    }
    SUBCASE("full rank keeps the whole matrix") {
        DenseTensor y = random_dense({3, 4, 3}, 109);
        Matrix p = subcone_matrix(f, y, 1);
        Index full = std::min(p.rows(), p.cols());
        ConeDirection dir = project_subcone(f, y, 1, full);
        CHECK(dir.norm() == doctest::Approx(p.norm()).epsilon(1e-10));
    }
    SUBCASE("the closed-cone necessary condition holds") {
        DenseTensor y = random_dense({3, 4, 3}, 113);
        ConeDirection dir = project_subcone(f, y, 1, 2);
        TTTensor yhat = dir.to_tt();
        double dot = reconstruct(yhat).values().dot(y.values());
        double n2 = inner(yhat, yhat);
        CHECK(dot == doctest::Approx(n2).epsilon(1e-10));
    }
    SUBCASE("oversized increments clamp with a flag") {
        DenseTensor y = random_dense({3, 4, 3}, 127);
        ConeDirection dir = project_subcone(f, y, 1, 50);
        CHECK(dir.clamped);
    }
}

TEST_CASE("subcone directions are orthogonal to the tangent space") {
    TTTensor x = random_tt({3, 4, 3, 3}, {2, 2, 2}, 131);
    auto f = frame_of(x);
    DenseTensor y = random_dense({3, 4, 3, 3}, 137);
    TangentVector xi = project_tangent(f, random_dense({3, 4, 3, 3}, 139), 3);
    Vector tangent = oracles::tangent_dense(xi);
    for (Index m = 0; m < 3; ++m) {
        ConeDirection dir = project_subcone(f, y, m, 1);
        Vector cone = reconstruct(dir.to_tt()).values();
        CHECK(std::abs(cone.dot(tangent)) <= 1e-10 * cone.norm() * tangent.norm());
    }
}

TEST_CASE("rank-increasing retraction is exact block concatenation") {
    TTTensor x = random_tt({3, 4, 3, 3}, {2, 2, 2}, 149);
    auto f = frame_of(x);
    DenseTensor y = random_dense({3, 4, 3, 3}, 151);
    for (Index m = 0; m < 3; ++m) {
        ConeDirection dir = project_subcone(f, y, m, 1);
        {
            TTTensor padded = retract_increase(dir, 0.0);
            CHECK(padded.ranks()[m] == x.ranks()[m] + 1);
            CHECK(rel_err(reconstruct(padded), reconstruct(x)) < 1e-12);
        }
        double t = 0.37;
        TTTensor out = retract_increase(dir, t);
        Vector want =
            reconstruct(x).values() + t * reconstruct(dir.to_tt()).values();
        CHECK((reconstruct(out).values() - want).norm() <= 1e-12 * want.norm());
    }
}

TEST_CASE("fixed-rank retraction: zero step and first-order agreement") {
    TTTensor x = random_tt({4, 4, 4}, {2, 2}, 157);
    auto f = frame_of(x);
    TangentVector xi = project_tangent(f, random_dense({4, 4, 4}, 163), 2);
    xi = scale(xi, 1.0 / xi.norm());

    SUBCASE("zero step reproduces the point") {
        TTTensor out = retract_fixed_rank(x, 0.0, xi);
        CHECK(rel_err(reconstruct(out), reconstruct(x)) < 1e-12);
    }
    SUBCASE("the error after a step of t is O(t^2)") {
        // log-log slope of ||R(x,t,xi) - (x + t xi)|| over three decades.
        std::vector<double> ts{1e-3, 1e-4, 1e-5};
        std::vector<double> errs;
        Vector x_dense = reconstruct(x).values();
        Vector xi_dense = oracles::tangent_dense(xi);
        for (double t : ts) {
            Vector got = reconstruct(retract_fixed_rank(x, t, xi)).values();
            errs.push_back((got - (x_dense + t * xi_dense)).norm());
        }
        double slope = (std::log(errs[0]) - std::log(errs[2])) /
                       (std::log(ts[0]) - std::log(ts[2]));
        CHECK(slope == doctest::Approx(2.0).epsilon(0.1));
        double c = errs[0] / (ts[0] * ts[0]);
        CHECK(errs[1] <= 10 * c * ts[1] * ts[1]);
    }
}
