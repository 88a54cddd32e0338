#include "doctest.h"

#include <gmpxx.h>

#include "nilflow/errors.hpp"
#include "nilflow/staircase.hpp"

using namespace nilflow;

namespace {
const Rational kTol(1, 1000000000000L);

Rational sample(int i, int count) { return Rational(-5) + Rational(10) * (Rational(i) + Rational(1, 3)) / count; }
}  // namespace

TEST_CASE("bump map constants") {
    const BumpMap& b = bump_map();
    CHECK(b.delta() == Rational(1, 4));
    CHECK(b.beta_slope_bound() > Rational(78, 1000));
    CHECK(b.beta_slope_bound() <= 1);
    CHECK(b.apply(Interval(Rational(0), 64)).contains(Rational(0)));
    CHECK(b.apply(Interval(Rational(1), 64)).contains(Rational(1)));
    CHECK(b.deriv(Interval(Rational(1, 2), 64)).contains(Rational(1)));
    Interval y = b.apply(Interval(Rational(1, 3), 128));
    CHECK(b.inverse(y).contains(Rational(1, 3)));
    CHECK(b.power(b.power(Interval(Rational(2, 7), 128), 3), -3).contains(Rational(2, 7)));
}

TEST_CASE("exponent table") {
    CHECK(exponent_table(2, Integer(3)) == 6);
    CHECK(exponent_table(1, Integer(-4)) == -4);
    CHECK(exponent_table(0, Integer(-4)) == 1);
    for (int k = 1; k <= 5; ++k) CHECK(exponent_table(k, Integer(0)) == 0);
    for (int k = 2; k <= 5; ++k) CHECK(exponent_table(k, Integer(-1)) == 0);
    // H_k(m) - H_k(m - 1) = H_{k-1}(m)
    for (int k = 1; k <= 6; ++k)
        for (long m = -10; m <= 10; ++m)
            CHECK(exponent_table(k, Integer(m)) - exponent_table(k, Integer(m - 1)) ==
                  exponent_table(k - 1, Integer(m)));
    CHECK_THROWS_AS(exponent_table(9, Integer(0)), DomainError);
    CHECK_THROWS_AS(exponent_table(-1, Integer(0)), DomainError);
}

TEST_CASE("h_k fixes integers and is trivial near 0") {
    for (int k = 0; k <= 4; ++k)
        for (long m = -4; m <= 4; ++m)
            CHECK(stair_apply(StaircaseElement::h(k), Rational(m), kTol).contains(Rational(m)));
    for (int k = 1; k <= 4; ++k)
        CHECK(stair_apply(StaircaseElement::h(k), Rational(2, 5), kTol).contains(Rational(2, 5)));
    for (int k = 2; k <= 4; ++k)
        CHECK(stair_apply(StaircaseElement::h(k), Rational(-3, 5), kTol).contains(Rational(-3, 5)));
}

TEST_CASE("commutator relation at sample points") {
    StaircaseElement rel = StaircaseElement::parse("F H1 f h1");
    StaircaseElement h0 = StaircaseElement::h(0);
    for (int i = 0; i < 100; ++i) {
        Rational x = sample(i, 100);
        CHECK(stair_apply(rel, x, kTol).overlaps(stair_apply(h0, x, kTol)));
    }
}

TEST_CASE("recursive and table modes agree") {
    for (int k = 0; k <= 4; ++k) {
        StaircaseElement rec = StaircaseElement::h(k);
        StaircaseElement tab = rec.with_mode(StairMode::exponent_table);
        for (int i = 0; i < 100; ++i) {
            Rational x = sample(i, 100);
            Enclosure a = stair_apply(rec, x, kTol), b = stair_apply(tab, x, kTol);
            CHECK(abs(a.midpoint() - b.midpoint()) <= 2 * kTol);
        }
    }
}

TEST_CASE("elements are monotone bijections") {
    StaircaseElement e = StaircaseElement::parse("h2 F h1 h0");
    StaircaseElement inv = e.inverse();
    Enclosure prev = stair_apply(e, sample(0, 60), kTol);
    for (int i = 0; i < 60; ++i) {
        Rational x = sample(i, 60);
        Enclosure y = stair_apply(e, x, kTol);
        if (i > 0) CHECK(prev.certainly_less(y));
        prev = y;
        CHECK(stair_apply(inv, y.midpoint(), kTol).overlaps(Enclosure(x - kTol * 4, x + kTol * 4)));
    }
}

TEST_CASE("word algebra") {
    StaircaseElement e = StaircaseElement::parse("f h2 H0");
    CHECK(e.to_string() == "f h2 H0");
    CHECK(e.inverse().to_string() == "h0 H2 F");
    CHECK(e.depth() == 2);
    CHECK(StaircaseElement::translation(1).commutator(StaircaseElement::h(1)).to_string() == "F H1 f h1");
    CHECK(StaircaseElement::parse("").letters.empty());
}

TEST_CASE("parse, depth and budget errors") {
    CHECK_THROWS_AS(StaircaseElement::parse("g"), ParseError);
    CHECK_THROWS_AS(StaircaseElement::parse("h"), ParseError);
    CHECK_THROWS_AS(StaircaseElement::parse("h9"), DomainError);
    CHECK_THROWS_AS(stair_apply(StaircaseElement::h(3), Rational(1000000), kTol, 1000), BudgetExhausted);
}

TEST_CASE("witness report") {
    WitnessReport r = nilpotency_witness(2, kTol, 20);
    CHECK(r.ok());
    CHECK(r.degree == 2);
    CHECK(r.to_json().find("\"relations\"") != std::string::npos);
}
