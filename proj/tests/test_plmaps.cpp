#include "doctest.h"

#include <random>

#include "nilflow/errors.hpp"
#include "nilflow/plmaps.hpp"

using namespace nilflow;

TEST_CASE("inverse of a two-piece map") {
    PLHomeo f = PLHomeo::parse("bp: 1/2; slopes: 1/2, 3/2");
    PLHomeo g = pl_inverse(f);
    CHECK(g.breakpoints() == std::vector<Rational>{Rational(1, 4)});
    CHECK(g.slopes() == std::vector<Rational>{Rational(2), Rational(2, 3)});
    CHECK(pl_compose(f, g).is_identity());
    CHECK(pl_compose(g, f).is_identity());
}

TEST_CASE("fixed point sets") {
    auto fix = pl_fixed_points(PLHomeo::parse("bp: 1/2; slopes: 1/2, 3/2"));
    REQUIRE(fix.size() == 2);
    CHECK(fix[0].is_point());
    CHECK(fix[0].lo == 0);
    CHECK(fix[1].lo == 1);

    fix = pl_fixed_points(PLHomeo::parse("bp: 1/3, 2/3; slopes: 1, 1/2, 3/2"));
    REQUIRE(fix.size() == 2);
    CHECK(fix[0].lo == 0);
    CHECK(fix[0].hi == Rational(1, 3));
    CHECK(fix[0].to_string() == "[0, 1/3]");
    CHECK(fix[1].is_point());

    fix = pl_fixed_points(PLHomeo());
    REQUIRE(fix.size() == 1);
    CHECK(fix[0].hi == 1);
}

TEST_CASE("canonical form merges equal slopes") {
    PLHomeo f = PLHomeo::from_pieces({Rational(1, 4), Rational(1, 2)}, {Rational(3, 2), Rational(3, 2), Rational(1, 2)});
    CHECK(f.breakpoints() == std::vector<Rational>{Rational(1, 2)});
    CHECK(f == PLHomeo::parse("bp: 1/2; slopes: 3/2, 1/2"));
    CHECK(PLHomeo::parse("bp: ; slopes: 1").is_identity());
}

TEST_CASE("parse and construction errors") {
    CHECK_THROWS_AS(PLHomeo::parse("bp 1/2"), ParseError);
    CHECK_THROWS_AS(PLHomeo::parse("bp: x; slopes: 1"), ParseError);
    CHECK_THROWS_AS(PLHomeo::from_pieces({Rational(1, 2)}, {Rational(1), Rational(1, 2)}), DomainError);
    CHECK_THROWS_AS(PLHomeo::from_pieces({Rational(1, 2)}, {Rational(-1), Rational(3)}), DomainError);
    CHECK_THROWS_AS(PLHomeo::from_points({Rational(1, 2), Rational(1, 3)}, {Rational(1, 4), Rational(1, 2)}),
                    DomainError);
}

TEST_CASE("random maps: group laws, character and fixed sets") {
    std::mt19937_64 rng(5);
    for (int t = 0; t < 100; ++t) {
        PLHomeo f = random_pl(rng), g = random_pl(rng), h = random_pl(rng);
        CHECK(pl_compose(f, pl_compose(g, h)) == pl_compose(pl_compose(f, g), h));
        CHECK(pl_compose(f, pl_inverse(f)).is_identity());
        auto cf = endpoint_character(f), cg = endpoint_character(g);
        auto cfg = endpoint_character(pl_compose(f, g));
        CHECK(cfg.first == cf.first * cg.first);
        CHECK(cfg.second == cf.second * cg.second);
        auto cc = endpoint_character(pl_commutator(f, g));
        CHECK(cc.first == 1);
        CHECK(cc.second == 1);
        auto a = pl_fixed_points(f), b = pl_fixed_points(pl_inverse(f));
        REQUIRE(a.size() == b.size());
        for (size_t i = 0; i < a.size(); ++i) {
            CHECK(a[i].lo == b[i].lo);
            CHECK(a[i].hi == b[i].hi);
        }
        for (const Rational& x : g.breakpoints()) CHECK(f.preimage(f(x)) == x);
    }
}
