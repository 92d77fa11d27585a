#include "doctest.h"

#include "oracles.hpp"
#include "test_helpers.hpp"
#include "ttra/dense_tensor.hpp"

using namespace ttra;
using namespace ttra::testing;

TEST_CASE("dense tensor validates shape against values") {
    CHECK_THROWS_AS(DenseTensor({2, 3}, Vector::Zero(5)), InvalidArgument);
    CHECK_THROWS_AS(DenseTensor({4}, Vector::Zero(4)), InvalidArgument);
    DenseTensor t({2, 3}, Vector::Zero(6));
    CHECK(t.order() == 2);
}

TEST_CASE("unfold of the 2x2x2 counting tensor") {
    Vector v(8);
    for (Index i = 0; i < 8; ++i) v[i] = static_cast<double>(i + 1);
    DenseTensor t({2, 2, 2}, v);
    Matrix m = unfold(t, 1);
    Matrix want(2, 4);
    want << 1, 3, 5, 7, 2, 4, 6, 8;
    CHECK((m - want).norm() == 0.0);
}

TEST_CASE("unfold shapes and range errors") {
    DenseTensor t = random_dense({3, 4, 5}, 7);
    CHECK(unfold(t, 2).rows() == 12);
    CHECK(unfold(t, 2).cols() == 5);
    CHECK_THROWS_AS(unfold(t, 0), InvalidArgument);
    CHECK_THROWS_AS(unfold(t, 3), InvalidArgument);
}

TEST_CASE("unfold ranks equal the TT-rank of a minimal decomposition") {
    TTTensor x = random_tt({4, 5, 3, 4}, {2, 3, 2}, 11);
    DenseTensor a = reconstruct(x);
    auto ranks = dense_tt_rank(a, 1e-8);
    CHECK(ranks == std::vector<Index>{2, 3, 2});
}

TEST_CASE("unfold3 agrees with unfold in the degenerate cases") {
    DenseTensor t = random_dense({2, 3, 4, 5}, 3);
    SUBCASE("i equals j collapses the middle group") {
        TTCore c = unfold3(t, 2, 2);
        CHECK(c.n() == 1);
        Matrix m = unfold(t, 2);
        CHECK((c.right() - m).norm() == 0.0);
    }
    SUBCASE("a 2x3x4x5 tensor splits 1,3 into 2 x 12 x 5") {
        TTCore c = unfold3(t, 1, 3);
        CHECK(c.r0() == 2);
        CHECK(c.n() == 12);
        CHECK(c.r1() == 5);
    }
    SUBCASE("round trip is exact") {
        TTCore c = unfold3(t, 1, 3);
        DenseTensor back(t.shape(), c.data());
        CHECK((back.values() - t.values()).norm() == 0.0);
    }
    CHECK_THROWS_AS(unfold3(t, 3, 2), InvalidArgument);
    CHECK_THROWS_AS(unfold3(t, 1, 5), InvalidArgument);
}

TEST_CASE("contract with an identity-like core is the identity") {
    TTCore core(2, 5, 3);
    Rng rng(5);
    core.data() = rng.normal_vector(core.size());
    TTCore eye(3, 1, 3);
    eye.slice(0) = Matrix::Identity(3, 3);
    TTCore out = contract(core, eye);
    CHECK(out.n() == 5);
    CHECK((out.data() - core.data()).norm() == 0.0);
}

TEST_CASE("chain contraction matches the brute-force element formula") {
    TTTensor x = random_tt({3, 2, 4}, {2, 3}, 13);
    TTCore chain = contract(contract(x.core(0), x.core(1)), x.core(2));
    DenseTensor brute = oracles::brute_force_reconstruct(x);
    CHECK(rel_err(chain.data(), brute.values()) < 1e-13);
    DenseTensor rec = reconstruct(x);
    CHECK(rel_err(rec, brute) < 1e-13);
}

TEST_CASE("contraction is associative") {
    Rng rng(17);
    TTCore a(2, 3, 4), b(4, 2, 3), c(3, 4, 2);
    a.data() = rng.normal_vector(a.size());
    b.data() = rng.normal_vector(b.size());
    c.data() = rng.normal_vector(c.size());
    TTCore lhs = contract(contract(a, b), c);
    TTCore rhs = contract(a, contract(b, c));
    CHECK((lhs.data() - rhs.data()).norm() < 1e-12 * lhs.data().norm());
    CHECK_THROWS_AS(contract(a, c), InvalidArgument);
}
