#include "doctest.h"

#include "nilflow/errors.hpp"
#include "nilflow/lattice_series.hpp"
#include "nilflow/tiling.hpp"

using namespace nilflow;

namespace {
const Rational kTol(1, 1000000000000L);
}

TEST_CASE("tile midpoints locate to their tile") {
    SeriesContext ctx(2, Rational(1));
    for (long a = -3; a <= 3; ++a)
        for (long b = -3; b <= 3; ++b) {
            Tile t = tile_interval(ctx, LatticePoint{a, b}, kTol);
            CHECK(t.length == Rational(1) / Rational(1 + a * a * a * a + b * b));
            LocateResult r = locate(ctx, Enclosure(t.left.midpoint() + t.length / 2), kTol);
            REQUIRE(r.is_interior());
            CHECK(r.q == LatticePoint{a, b});
        }
}

TEST_CASE("adjacent tiles share endpoints") {
    SeriesContext ctx(3, Rational(2));
    Tile a = tile_interval(ctx, LatticePoint{0, 1, 4}, kTol);
    Tile b = tile_interval(ctx, LatticePoint{0, 1, 5}, kTol);
    CHECK(a.right.overlaps(b.left));
}

TEST_CASE("a shared endpoint gives a boundary pair") {
    SeriesContext ctx(1, Rational(1));
    // n = 1: tile (0) starts at downset(0) = (S - 1)/2; the boundary with (-1) is exact
    Tile t = tile_interval(ctx, LatticePoint{0}, kTol);
    LocateResult r = locate_at(ctx, Interval(t.left, 256), 256);
    CHECK(r.kind == LocateKind::boundary_pair);
    CHECK(r.q == LatticePoint{-1});
    CHECK(r.upper == LatticePoint{0});
}

TEST_CASE("a slab end is unresolved") {
    SeriesContext ctx(2, Rational(1));
    // the right end of slab q_1 = 0 is an accumulation point of tiles (0, k)
    Interval x = prefix_mass_at(ctx, {Integer(1)}, 256);
    LocateResult r = locate_at(ctx, x, 256);
    CHECK(r.kind == LocateKind::unresolved);
    CHECK(r.reason == UnresolvedReason::accumulation_point);
    CHECK(r.to_string() == "unresolved accumulation_point");
}

TEST_CASE("slab bracket around an accumulation point") {
    SeriesContext ctx(2, Rational(1));
    Interval x = prefix_mass_at(ctx, {Integer(1)}, 256);
    SlabBracket b = slab_bracket(ctx, x, 256);
    REQUIRE(b.lower);
    REQUIRE(b.upper);
    CHECK((*b.lower)[0] < (*b.upper)[0]);
}

TEST_CASE("locate rejects points outside [0, S]") {
    SeriesContext ctx(2, Rational(1));
    CHECK_THROWS_AS(locate(ctx, Enclosure(Rational(-1)), kTol), DomainError);
    CHECK_THROWS_AS(locate(ctx, Enclosure(Rational(100)), kTol), DomainError);
}
