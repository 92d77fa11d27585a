#include "doctest.h"

#include <sstream>

#include "test_helpers.hpp"
#include "ttra/experiments.hpp"
#include "ttra/io.hpp"

using namespace ttra;
using namespace ttra::testing;

TEST_CASE("dense tensor text round trip is exact") {
    DenseTensor t = random_dense({3, 4, 2}, 5);
    std::ostringstream os;
    write_dense(os, t);
    std::istringstream is(os.str());
    DenseTensor back = read_dense(is);
    CHECK(back.shape() == t.shape());
    CHECK((back.values() - t.values()).norm() == 0.0);
}

TEST_CASE("tt file round trip is exact") {
    TTTensor x = random_tt({3, 5, 4, 2}, {2, 3, 2}, 7);
    std::ostringstream os;
    write_tt(os, x);
    std::istringstream is(os.str());
    TTTensor back = read_tt(is);
    CHECK(back.ranks() == x.ranks());
    CHECK(back.shape() == x.shape());
    for (Index k = 0; k < 4; ++k)
        CHECK((back.core(k).data() - x.core(k).data()).norm() == 0.0);
}

TEST_CASE("sample csv round trip keeps indices one-based on disk") {
    Rng rng(11);
    DenseTensor a = random_dense({4, 3, 5}, 13);
    auto [omega, gamma] = sample_split(a, 0.3, 0.25, rng);
    std::ostringstream os;
    write_samples(os, omega);
    CHECK(os.str().find("# dims: 4 3 5 ratio:") == 0);
    // Data rows carry 1-based indices.
    std::string second_line = os.str().substr(os.str().find('\n') + 1);
    second_line = second_line.substr(0, second_line.find('\n'));
    CHECK(second_line.find("0,") != 0);

    std::istringstream is(os.str());
    SampleSet back = read_samples(is);
    CHECK(back.shape == omega.shape);
    CHECK(back.idx_flat == omega.idx_flat);
    CHECK((back.values - omega.values).norm() == 0.0);
    CHECK(back.ratio == omega.ratio);
}

TEST_CASE("trace csv round trips reproduce the records exactly") {
    std::vector<CGTraceRow> rows{{1, 0.123456789012345678, 3.5e-9, 12.25},
                                 {2, 1e-17, 2.0 / 3.0, 100.125}};
    std::ostringstream os;
    write_cg_trace(os, rows);
    std::istringstream is(os.str());
    auto back = read_cg_trace(is);
    REQUIRE(back.size() == rows.size());
    for (std::size_t i = 0; i < rows.size(); ++i) {
        CHECK(back[i].iter == rows[i].iter);
        CHECK(back[i].f_omega_rel == rows[i].f_omega_rel);
        CHECK(back[i].grad_norm == rows[i].grad_norm);
        CHECK(back[i].wall_ms == rows[i].wall_ms);
    }

    std::vector<RRAMTraceRow> rr{{1, RRAMAction::cg, {1, 1, 1}, 0.5, 0.25, 15, 3.5},
                                 {2, RRAMAction::increase, {4, 4, 4}, 1e-8, 2e-8, 30, 7.25},
                                 {3, RRAMAction::stop_converged, {4, 4, 4}, 1e-17, 2e-17, 45, 9.0}};
    std::ostringstream os2;
    write_rram_trace(os2, rr);
    std::istringstream is2(os2.str());
    auto back2 = read_rram_trace(is2);
    REQUIRE(back2.size() == rr.size());
    for (std::size_t i = 0; i < rr.size(); ++i) {
        CHECK(back2[i].outer == rr[i].outer);
        CHECK(back2[i].action == rr[i].action);
        CHECK(back2[i].ranks == rr[i].ranks);
        CHECK(back2[i].f_omega_rel == rr[i].f_omega_rel);
        CHECK(back2[i].f_gamma_rel == rr[i].f_gamma_rel);
        CHECK(back2[i].inner_iters_cum == rr[i].inner_iters_cum);
        CHECK(back2[i].wall_ms == rr[i].wall_ms);
    }
}

TEST_CASE("key-value config applies onto the driver settings") {
    std::istringstream is("# solver settings\n"
                          "eps_omega = 1e-3\n"
                          "delta = 0.7\n"
                          "j_max = 20\n"
                          "r_max = 5\n"
                          "s_max = 2,3,4\n"
                          "seed = 42\n");
    KeyValues kv = read_key_values(is);
    RRAMConfig cfg = RRAMConfig::defaults(4);
    auto seed = apply_config(kv, 4, cfg);
    CHECK(cfg.eps_omega == 1e-3);
    CHECK(cfg.delta == 0.7);
    CHECK(cfg.j_max == 20);
    CHECK(cfg.r_max == std::vector<Index>{5, 5, 5});
    CHECK(cfg.s_max == std::vector<Index>{2, 3, 4});
    REQUIRE(seed.has_value());
    CHECK(*seed == 42);
    cfg.validate(4);
}

TEST_CASE("ranks encode and parse") {
    CHECK(format_ranks({4, 5, 6}) == "4x5x6");
    CHECK(parse_ranks("4x5x6") == std::vector<Index>{4, 5, 6});
    CHECK(parse_ranks("7") == std::vector<Index>{7});
}
