#include "doctest.h"

#include "oracles.hpp"
#include "test_helpers.hpp"
#include "ttra/completion.hpp"
#include "ttra/experiments.hpp"

using namespace ttra;
using namespace ttra::testing;

namespace {

/// Random completion instance: low-rank truth sampled at ratio rho.
struct Instance {
    DenseTensor a;
    SampleSet omega;
    SampleSet gamma;
};

Instance make_instance(const std::vector<Index> &shape, const std::vector<Index> &rp,
                       double rho, std::uint64_t seed) {
    Rng rng(seed);
    Instance inst;
    inst.a = gen_synthetic(shape, rp, rng).first;
    auto [omega, gamma] = sample_split(inst.a, rho, 0.25, rng);
    inst.omega = std::move(omega);
    inst.gamma = std::move(gamma);
    return inst;
}

SampleSet full_grid_set(const DenseTensor &a) {
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

TEST_CASE("objective against the dense masked oracle") {
    Instance inst = make_instance({4, 5, 4}, {2, 2}, 0.5, 3);
    TTTensor x = random_tt({4, 5, 4}, {2, 2}, 5);
    double got = objective(x, inst.omega);

    DenseTensor xd = reconstruct(x);
    double want = 0.0;
    for (Index s = 0; s < inst.omega.count(); ++s) {
        const Index *ix = inst.omega.index(s);
        double diff = xd({ix[0], ix[1], ix[2]}) - inst.omega.values[s];
        want += diff * diff;
    }
    want *= 0.5;
    CHECK(got == doctest::Approx(want).epsilon(1e-12));

    // An interpolating point has zero cost; the zero point has half the
    // squared sample norm.
    TTTensor truth = tt_svd(inst.a);
    CHECK(objective(truth, inst.omega) < 1e-18 * inst.omega.values.squaredNorm());
    TTTensor zero = TTTensor::zeros({4, 5, 4});
    CHECK(objective(zero, inst.omega) ==
          doctest::Approx(0.5 * inst.omega.values.squaredNorm()).epsilon(1e-14));
}

TEST_CASE("residual values") {
    Instance inst = make_instance({3, 4, 3}, {2, 2}, 0.6, 7);
    TTTensor truth = tt_svd(inst.a);
    CHECK(residual_values(truth, inst.omega).norm() <
          1e-9 * inst.omega.values.norm());

    SampleSet one = SampleSet::from_indices({3, 4, 3}, {1, 2, 0}, Vector::Ones(1) * 4.2);
    TTTensor zero = TTTensor::zeros({3, 4, 3});
    Vector r = residual_values(zero, one);
    CHECK(r.size() == 1);
    CHECK(r[0] == doctest::Approx(-4.2));
}

TEST_CASE("exact step formula and degenerate direction") {
    Rng rng(11);
    Vector resid = rng.normal_vector(40);
    SUBCASE("opposite direction gives unit step") {
        CHECK(exact_step(-resid, resid) == doctest::Approx(1.0).epsilon(1e-14));
    }
    SUBCASE("zero residual gives zero step") {
        Vector dir = rng.normal_vector(40);
        CHECK(exact_step(dir, Vector::Zero(40)) == 0.0);
    }
    SUBCASE("the step minimizes the 1-d quadratic") {
        Vector dir = rng.normal_vector(40);
        double t = exact_step(dir, resid);
        auto fval = [&](double s) { return 0.5 * (resid + s * dir).squaredNorm(); };
        CHECK(fval(t) <= fval(t + 1e-3));
        CHECK(fval(t) <= fval(t - 1e-3));
    }
    SUBCASE("zero direction is an error") {
        CHECK_THROWS_AS(exact_step(Vector::Zero(40), resid), InvalidArgument);
    }
}

TEST_CASE("riemannian gradient: zero residual and finite differences") {
    Instance inst = make_instance({4, 4, 4}, {2, 2}, 0.7, 13);
    TTTensor truth = tt_svd(inst.a);
    CHECK(riemannian_gradient(truth, inst.omega).norm() <
          1e-9 * inst.omega.values.norm());

    // Central differences of f along the fixed-rank retraction match the
    // gradient pairing for random tangent directions.
    for (int trial = 0; trial < 5; ++trial) {
        TTTensor x = random_tt({4, 4, 4}, {2, 2}, 17 + trial);
        auto frame = std::make_shared<OrthoFrame>(x);
        TangentVector grad =
            project_tangent(frame, inst.omega, residual_values(x, inst.omega), 2);
        TangentVector xi =
            project_tangent(frame, random_dense({4, 4, 4}, 700 + trial), 2);
        xi = scale(xi, 1.0 / xi.norm());
        const double h = 1e-6;
        double fp = objective(retract_fixed_rank(x, h, xi), inst.omega);
        double fm = objective(retract_fixed_rank(x, -h, xi), inst.omega);
        double fd = (fp - fm) / (2 * h);
        double pairing = inner(grad, xi);
        CHECK(std::abs(fd - pairing) <= 1e-5 * std::abs(pairing));
    }
}

TEST_CASE("cg on the full grid recovers an exact low-rank tensor") {
    TTTensor gen = random_tt({5, 5, 5, 5}, {2, 2, 2}, 19);
    DenseTensor a = reconstruct(gen);
    SampleSet grid = full_grid_set(a);
    Rng rng(23);
    TTTensor x0 = TTTensor::random(a.shape(), {2, 2, 2}, rng);
    CGConfig cfg;
    cfg.j_max = 100;
    cfg.eps_rel = 1e-9;
    cfg.eps_grad = 1e-12;
    cfg.eps_stagnation = 0.0;
    CGResult res = cg_solve(x0, grid, cfg);
    double rel = (reconstruct(res.x).values() - a.values()).norm() / a.norm();
    CHECK(rel <= 1e-8);
    CHECK(res.iters <= 100);
}

TEST_CASE("cg trace is monotone and respects j_max") {
    Instance inst = make_instance({6, 6, 6}, {2, 2}, 0.4, 29);
    Rng rng(31);
    TTTensor x0 = TTTensor::random({6, 6, 6}, {2, 2}, rng);

    CGConfig none;
    none.j_max = 0;
    CGResult unchanged = cg_solve(x0, inst.omega, none);
    CHECK(unchanged.iters == 0);
    CHECK(norm(tt_axpy(unchanged.x, -1.0, x0)) == 0.0);
    CHECK(unchanged.stop == CGStop::budget);

    CGConfig cfg;
    cfg.j_max = 25;
    cfg.eps_stagnation = 0.0;
    cfg.eps_rel = 1e-13;
    cfg.eps_grad = 1e-13;
    CGResult res = cg_solve(x0, inst.omega, cfg);
    REQUIRE(res.trace.size() >= 2);
    double prev = std::numeric_limits<double>::infinity();
    for (const auto &row : res.trace) {
        CHECK(row.f_omega_rel <= prev + 1e-12 * (1.0 + prev));
        prev = row.f_omega_rel;
    }
}

TEST_CASE("exact step zeroes the directional derivative along the line") {
    Instance inst = make_instance({4, 4, 4}, {2, 2}, 0.8, 37);
    TTTensor x = random_tt({4, 4, 4}, {2, 2}, 41);
    auto frame = std::make_shared<OrthoFrame>(x);
    Vector resid = residual_values(x, inst.omega);
    TangentVector grad = project_tangent(frame, inst.omega, resid, 2);
    TTTensor dir_tt = tangent_to_tt(scale(grad, -1.0));
    Vector dir_omega = gather(dir_tt, inst.omega);
    double t = exact_step(dir_omega, resid);
    // d/dt (1/2)||resid + t dir||^2 at the chosen step.
    double deriv = (resid + t * dir_omega).dot(dir_omega);
    CHECK(std::abs(deriv) <= 1e-10 * dir_omega.squaredNorm());
    // The retraction of the scaled steepest-descent direction decreases f.
    double f0 = 0.5 * resid.squaredNorm();
    double f1 = objective(retract_fixed_rank(x, t, scale(grad, -1.0)), inst.omega);
    CHECK(f1 < f0);
}

TEST_CASE("gradient norm reaches round-off at a full-grid stationary point") {
    TTTensor gen = random_tt({5, 4, 5}, {2, 2}, 43);
    DenseTensor a = reconstruct(gen);
    SampleSet grid = full_grid_set(a);
    Rng rng(47);
    TTTensor x0 = TTTensor::random(a.shape(), {2, 2}, rng);
    CGConfig cfg;
    cfg.j_max = 200;
    cfg.eps_grad = 1e-10;
    cfg.eps_rel = 1e-14;
    cfg.eps_stagnation = 0.0;
    CGResult res = cg_solve(x0, grid, cfg);
    CHECK(riemannian_gradient(res.x, grid).norm() <= 1e-10);
}
