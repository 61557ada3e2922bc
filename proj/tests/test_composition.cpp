#include <doctest.h>

#include <random>
#include <stdexcept>

#include "coagstat/composition.hpp"

using namespace coag;

TEST_SUITE_BEGIN("composition");

TEST_CASE("norm and validity") {
    CHECK(Composition{1, 0}.norm() == 1);
    CHECK(Composition{2, 3, 4}.norm() == 9);
    CHECK(Composition{1, 0}.valid());
    CHECK_FALSE(Composition{0, 0}.valid());
    CHECK_FALSE(Composition{-1, 2}.valid());
    CHECK_FALSE(Composition{}.valid());
}

TEST_CASE("lexicographic order matches vector comparison") {
    CHECK(Composition{0, 1} < Composition{0, 2});
    CHECK(Composition{0, 5} < Composition{1, 0});
    CHECK(Composition{1, 1} == Composition{1, 1});
}

TEST_CASE("indexer enumerates the capped simplex in lexicographic order") {
    CompositionIndexer idxr(2, 2);
    REQUIRE(idxr.size() == 5);  // (0,1) (0,2) (1,0) (1,1) (2,0)
    CHECK(idxr.composition_of(0) == Composition{0, 1});
    CHECK(idxr.composition_of(1) == Composition{0, 2});
    CHECK(idxr.composition_of(2) == Composition{1, 0});
    CHECK(idxr.composition_of(3) == Composition{1, 1});
    CHECK(idxr.composition_of(4) == Composition{2, 0});
    for (std::size_t i = 0; i < idxr.size(); ++i)
        CHECK(idxr.index_of(idxr.composition_of(i)) == i);
}

TEST_CASE("rank and unrank are inverse over random dimensions and caps") {
    std::mt19937 rng(7);
    for (int trial = 0; trial < 20; ++trial) {
        int d = 1 + static_cast<int>(rng() % 4);
        int cap = 2 + static_cast<int>(rng() % 40);
        CompositionIndexer idxr(d, cap);
        std::uniform_int_distribution<std::size_t> pick(0, idxr.size() - 1);
        std::size_t prev_checked = idxr.size();  // sentinel
        for (int k = 0; k < 50; ++k) {
            std::size_t i = pick(rng);
            Composition c = idxr.composition_of(i);
            CHECK(c.valid());
            CHECK(c.norm() <= cap);
            CHECK(idxr.index_of(c) == i);
            CHECK(idxr.norm_of(i) == c.norm());
            if (prev_checked < idxr.size() && prev_checked < i)
                CHECK(idxr.composition_of(prev_checked) < c);
            prev_checked = i;
        }
    }
}

TEST_CASE("index_of rejects out-of-range keys") {
    CompositionIndexer idxr(2, 4);
    CHECK_THROWS_AS((void)idxr.index_of(Composition{3, 3}), std::out_of_range);
    CHECK_THROWS_AS((void)idxr.index_of(Composition{0, 0}), std::invalid_argument);
    CHECK_THROWS_AS((void)idxr.index_of(Composition{1, 2, 3}), std::invalid_argument);
}

TEST_SUITE_END();
