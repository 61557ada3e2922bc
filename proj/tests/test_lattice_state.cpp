#include <doctest.h>

#include <cmath>
#include <random>
#include <sstream>

#include "coagstat/lattice_state.hpp"

using namespace coag;

TEST_SUITE_BEGIN("lattice_state");

TEST_CASE("moments of simple states and sources") {
    ClusterDistribution empty(2, 128);
    Source src(2, {{Composition{1, 0}, 1.0}});
    Moments m = moments(empty, src);
    CHECK(m.total_number == 0.0);
    CHECK(m.injection == std::vector<double>{1.0, 0.0});
    CHECK(m.injection_total == 1.0);

    ClusterDistribution st(2, 128);
    st.set(Composition{1, 1}, 2.0);
    m = moments(st, src);
    CHECK(m.total_number == 2.0);
    CHECK(m.species_mass == std::vector<double>{2.0, 2.0});

    Source skew(2, {{Composition{1, 0}, 3.0}, {Composition{0, 1}, 1.0}});
    m = moments(st, skew);
    CHECK(m.injection == std::vector<double>{3.0, 1.0});
    CHECK(m.injection_total == 4.0);
    // direction of the source mass vector
    CHECK(m.injection[0] / m.injection_total == doctest::Approx(0.75));
    CHECK(m.injection[1] / m.injection_total == doctest::Approx(0.25));
}

TEST_CASE("moments are additive over disjoint supports") {
    std::mt19937 rng(17);
    std::uniform_real_distribution<double> u(0.0, 5.0);
    Source src(1, {{Composition{1}, 1.0}});
    ClusterDistribution a(1, 256), b(1, 256), both(1, 256);
    for (int k = 1; k <= 40; ++k) {
        double v = u(rng);
        if (k % 2 == 0)
            a.set(Composition{k}, v);
        else
            b.set(Composition{k}, v);
        both.set(Composition{k}, v);
    }
    Moments ma = moments(a, src), mb = moments(b, src), mab = moments(both, src);
    CHECK(mab.total_number == doctest::Approx(ma.total_number + mb.total_number).epsilon(1e-15));
    CHECK(mab.species_mass[0] ==
          doctest::Approx(ma.species_mass[0] + mb.species_mass[0]).epsilon(1e-15));
}

TEST_CASE("dyadic window mass") {
    ClusterDistribution empty(1, 8192);
    CHECK(dyadic_window_mass(empty, 64, 0.5) == 0.0);

    ClusterDistribution single(2, 64);
    single.set(Composition{4, 4}, 1.0);
    CHECK(dyadic_window_mass(single, 8, 0.5) == doctest::Approx(1.0 / 8.0));
    CHECK(dyadic_window_mass(single, 8.0, 0.5) ==
          doctest::Approx(tail_count(single, 4) / 8.0));  // closed ends: |alpha| = bz counts

    // synthetic power law against a direct summation oracle
    ClusterDistribution pl(1, 8192);
    for (int k = 1; k <= 4096; ++k) pl.set(Composition{k}, std::pow(k, -1.5));
    double direct = 0;
    for (int k = 512; k <= 1024; ++k) direct += std::pow(k, -1.5);
    CHECK(dyadic_window_mass(pl, 1024, 0.5) == doctest::Approx(direct / 1024.0).epsilon(1e-14));

    CHECK_THROWS_AS((void)dyadic_window_mass(pl, 64, 1.5), std::invalid_argument);
    CHECK_THROWS_AS((void)dyadic_window_mass(pl, 0.0, 0.5), std::invalid_argument);
}

TEST_CASE("window sums cross-check against brute-force filter on random states") {
    std::mt19937 rng(29);
    std::uniform_int_distribution<int> norm(1, 200);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    ClusterDistribution st(2, 400);
    std::vector<std::pair<Composition, double>> kept;
    for (int i = 0; i < 150; ++i) {
        int n = norm(rng);
        int x = static_cast<int>(u(rng) * n);
        Composition c{x, n - x};
        double v = u(rng);
        st.set(c, v);
        kept.emplace_back(c, v);
    }
    for (double z : {8.0, 33.3, 150.0}) {
        for (double b : {0.25, 0.5, 0.9}) {
            double brute = 0;
            for (const auto& [c, v] : st.entries()) {
                double r = static_cast<double>(c.norm());
                if (r >= b * z && r <= z) brute += v;
            }
            CHECK(dyadic_window_mass(st, z, b) * z == doctest::Approx(brute).epsilon(1e-14));
        }
    }
}

TEST_CASE("tail count") {
    ClusterDistribution st(2, 64);
    CHECK(tail_count(st, 1) == 0.0);
    st.set(Composition{1, 0}, 5.0);
    CHECK(tail_count(st, 1) == 5.0);
    CHECK(tail_count(st, 2) == 0.0);
}

TEST_CASE("negative concentrations are unrepresentable") {
    ClusterDistribution st(1, 64);
    CHECK_THROWS_AS(st.set(Composition{3}, -1.0), std::invalid_argument);
    st.set(Composition{3}, 1.0);
    CHECK_THROWS_AS(st.add(Composition{3}, -2.0), std::invalid_argument);
    CHECK(st.value(Composition{3}) == 1.0);
}

TEST_CASE("values below the floor are pruned") {
    ClusterDistribution st(1, 64);
    st.set(Composition{5}, 1e-31);
    CHECK(st.support_size() == 0);
    st.set(Composition{5}, 1.0);
    st.set(Composition{5}, 0.0);
    CHECK(st.support_size() == 0);
}

TEST_CASE("key invariants") {
    ClusterDistribution st(2, 16);
    CHECK_THROWS_AS(st.set(Composition{0, 0}, 1.0), std::invalid_argument);
    CHECK_THROWS_AS(st.set(Composition{17, 0}, 1.0), std::invalid_argument);
    CHECK_THROWS_AS(st.set(Composition{1}, 1.0), std::invalid_argument);
}

TEST_CASE("snapshot round trip is bit exact") {
    std::mt19937 rng(31);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    ClusterDistribution st(3, 64);
    std::uniform_int_distribution<int> part(0, 10);
    for (int i = 0; i < 200; ++i) {
        Composition c{part(rng), part(rng), part(rng)};
        if (!c.valid()) continue;
        st.set(c, std::exp(40.0 * (u(rng) - 0.7)));
    }
    std::ostringstream out;
    save_snapshot(st, 32.0, 12.5, out);
    std::istringstream in(out.str());
    Snapshot snap = load_snapshot(in);
    CHECK(snap.M == 32.0);
    CHECK(snap.t == 12.5);
    REQUIRE(snap.state.support_size() == st.support_size());
    for (const auto& [c, v] : st.entries()) {
        double loaded = snap.state.value(c);
        CHECK(loaded == v);  // exact: 17 significant digits round-trip doubles
    }
    // and the re-serialization is byte identical
    std::ostringstream again;
    save_snapshot(snap.state, snap.M, snap.t, again);
    CHECK(again.str() == out.str());
}

TEST_CASE("snapshot loader rejects malformed lines with line numbers") {
    auto expect_error = [](const std::string& text, const std::string& needle) {
        std::istringstream in(text);
        try {
            (void)load_snapshot(in, "snap");
            FAIL_CHECK("expected a format error for: " << text);
        } catch (const SnapshotFormatError& e) {
            CHECK(std::string(e.what()).find(needle) != std::string::npos);
        }
    };
    expect_error("no header\n", "snap:1");
    expect_error("# d=2 M=16 t=0\n1 2\n", "snap:2");
    expect_error("# d=2 M=16 t=0\n1 1 0.5\n1 x 0.5\n", "snap:3");
    expect_error("# d=2 M=16 t=0\n1 1 0.5 junk\n", "snap:2");
    expect_error("# d=2 M=16 t=0\n1 1 -0.5\n", "snap:2");
}

TEST_SUITE_END();
