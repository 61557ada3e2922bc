#include <doctest.h>

#include <cmath>

#include "coagstat/diagnostics.hpp"

using namespace coag;

TEST_SUITE_BEGIN("diagnostics");

TEST_CASE("tail exponent of a synthetic power law") {
    ClusterDistribution pl(1, 8192);
    for (int k = 1; k <= 4096; ++k) pl.set(Composition{k}, std::pow(k, -1.5));
    ExponentFit fit = fit_tail_exponent(pl, 0.5, geometric_grid(16, 2048));
    CHECK(fit.slope == doctest::Approx(-1.5).epsilon(0.05 / 1.5));
    CHECK(std::abs(fit.slope + 1.5) <= 0.02);  // window spans > 2 decades
    CHECK(fit.r_squared > 0.999);
    CHECK(fit.points >= 4);
    CHECK(fit.z_min == 16);
    CHECK(fit.z_max == doctest::Approx(2048));
}

TEST_CASE("tail exponent of a uniform state is flat") {
    // window mass (1/z)(z/2 + O(1)) -> 1/2, so the fitted slope vanishes once
    // the window sits well above the O(1) boundary correction
    ClusterDistribution uni(1, 2048);
    for (int k = 1; k <= 1024; ++k) uni.set(Composition{k}, 1.0);
    ExponentFit fit = fit_tail_exponent(uni, 0.5, geometric_grid(32, 1000));
    CHECK(std::abs(fit.slope) < 0.05);
    CHECK(std::exp(fit.intercept) == doctest::Approx(0.5).epsilon(0.1));
}

TEST_CASE("empty windows are dropped; too few points is an error") {
    ClusterDistribution st(1, 8192);
    for (int k = 1; k <= 64; ++k) st.set(Composition{k}, std::pow(k, -1.5));
    // windows above the support are empty and must be dropped
    ExponentFit fit = fit_tail_exponent(st, 0.5, geometric_grid(8, 2048));
    CHECK(fit.z_max <= 64 * std::sqrt(2.0) + 1e-9);
    ClusterDistribution tiny(1, 64);
    tiny.set(Composition{1}, 1.0);
    CHECK_THROWS_AS((void)fit_tail_exponent(tiny, 0.5, geometric_grid(8, 32)),
                    std::invalid_argument);
}

TEST_CASE("localization ratio on crafted states") {
    // support exactly on the diagonal: full localization toward (1/2, 1/2)
    ClusterDistribution diag(2, 256);
    for (int k = 1; k <= 60; ++k) diag.set(Composition{k, k}, 1.0 / k);
    CHECK(localization_ratio(diag, 16, 2.0, 0.1, {0.5, 0.5}) == 1.0);

    // isotropic shell: the ratio equals the cone fraction by direct enumeration
    ClusterDistribution shell(2, 256);
    const int r = 40;
    for (int i = 0; i <= r; ++i) shell.set(Composition{i, r - i}, 1.0);
    double eps = 0.1;
    int inside = 0;
    for (int i = 0; i <= r; ++i) {
        double t1 = static_cast<double>(i) / r;
        if (std::abs(t1 - 0.5) + std::abs((1.0 - t1) - 0.5) < eps) ++inside;
    }
    double expected = static_cast<double>(inside) / (r + 1);
    CHECK(localization_ratio(shell, r, 2.0, eps, {0.5, 0.5}) ==
          doctest::Approx(expected).epsilon(1e-12));

    // disjoint cone (no lattice direction within 0.005 of it): zero ratio,
    // distinct from the empty-band error below
    CHECK(localization_ratio(shell, r, 2.0, 0.005, {0.37, 0.63}) == 0.0);
    CHECK_THROWS_AS((void)localization_ratio(shell, 1000, 2.0, 0.1, {0.5, 0.5}),
                    EmptyBandError);
}

TEST_CASE("localization direction defaults to the source mass vector") {
    ClusterDistribution st(2, 64);
    st.set(Composition{3, 1}, 1.0);
    Source src(2, {{Composition{1, 0}, 3.0}, {Composition{0, 1}, 1.0}});
    // theta = (3/4, 1/4); the single entry sits exactly on it
    CHECK(localization_ratio(st, src, 2, 4.0, 0.05) == 1.0);
}

TEST_CASE("sweep verdict rules and hysteresis") {
    auto cell = [](double total, double tail, bool conv = true) {
        SweepCell c;
        c.total_number = total;
        c.tail_count = tail;
        c.converged = conv;
        return c;
    };
    using V = SweepVerdict;
    // no refinement evidence
    CHECK(sweep_verdict({cell(1, 1)}) == V::Inconclusive);
    // steady growth beyond 25% per refinement
    CHECK(sweep_verdict({cell(1, 1), cell(1.4, 1.5), cell(2.0, 2.2)}) == V::Diverging);
    // flat at the last refinement
    CHECK(sweep_verdict({cell(1, 1), cell(1.02, 1.01), cell(1.03, 1.015)}) == V::Saturating);
    // mixed signals
    CHECK(sweep_verdict({cell(1, 1), cell(1.4, 1.5), cell(1.5, 1.6)}) == V::Inconclusive);
    // a non-converged cell taints everything
    CHECK(sweep_verdict({cell(1, 1), cell(1.02, 1.01), cell(1.03, 1.015, false)}) ==
          V::Inconclusive);

    // appending one cell never flips saturating <-> diverging directly
    std::vector<SweepCell> grow = {cell(1, 1), cell(1.4, 1.4), cell(1.96, 1.96)};
    CHECK(sweep_verdict(grow) == V::Diverging);
    grow.push_back(cell(1.97, 1.97));  // suddenly flat
    CHECK(sweep_verdict(grow) == V::Inconclusive);
    grow.push_back(cell(1.98, 1.98));
    CHECK(sweep_verdict(grow) == V::Saturating);
    grow.push_back(cell(2.9, 2.9));  // suddenly growing again
    CHECK(sweep_verdict(grow) == V::Inconclusive);
}

TEST_CASE("existence sweep input validation") {
    Source src(1, {{Composition{1}, 1.0}});
    SolverConfig cfg;
    CHECK_THROWS_AS((void)existence_sweep(KernelSpec::constant(1.0), src, {}, {16}, cfg),
                    std::invalid_argument);
    CHECK_THROWS_AS(
        (void)existence_sweep(KernelSpec::constant(1.0), src, {0.01, 0.1}, {16}, cfg),
        std::invalid_argument);
    CHECK_THROWS_AS(
        (void)existence_sweep(KernelSpec::constant(1.0), src, {0.1}, {32, 16}, cfg),
        std::invalid_argument);
    // M <= 2L is rejected
    Source wide(1, {{Composition{9}, 1.0}});
    CHECK_THROWS_AS(
        (void)existence_sweep(KernelSpec::constant(1.0), wide, {0.1}, {16}, cfg),
        std::invalid_argument);
}

TEST_CASE("singleton sweep is inconclusive") {
    Source src(1, {{Composition{1}, 1.0}});
    SolverConfig cfg;
    cfg.steady_tol = 1e-6;
    SweepResult res = existence_sweep(KernelSpec::constant(1.0), src, {0.1}, {12}, cfg, 4);
    REQUIRE(res.cells.size() == 1);
    CHECK(res.cells[0].converged);
    CHECK(res.verdict == SweepVerdict::Inconclusive);
}

TEST_SUITE_END();
