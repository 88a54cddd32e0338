#include "doctest.h"

#include <cmath>

#include "nilflow/dynamics.hpp"
#include "nilflow/errors.hpp"

using namespace nilflow;

namespace {
const Rational kTol(1, 1000000000000L);
}

TEST_CASE("atomic measures") {
    AtomicMeasure mu = AtomicMeasure::integers(-3, 3);
    CHECK(mu.atoms().size() == 7);
    CHECK(mu.mass(Rational(0), Rational(2)) == 2);
    CHECK(mu.mass(Rational(1, 2), Rational(2)) == 1);
    CHECK(mu.mass(Rational(2), Rational(0)) == 0);
    CHECK(mu.signed_mass(Rational(2), Rational(0)) == -2);
    CHECK(mu.signed_mass(Rational(1), Rational(1)) == 0);
    AtomicMeasure p = AtomicMeasure::parse("integers:-5:5");
    CHECK(p.lo() == -5);
    CHECK(p.hi() == 5);
    CHECK(AtomicMeasure::parse("integers").hi() == 20);
}

TEST_CASE("measure errors") {
    CHECK_THROWS_AS(AtomicMeasure::parse("uniform"), ParseError);
    CHECK_THROWS_AS(AtomicMeasure::parse("integers:a:3"), ParseError);
    CHECK_THROWS_AS(AtomicMeasure({{Rational(1), Rational(0)}}, Rational(0), Rational(2)), DomainError);
    CHECK_THROWS_AS(AtomicMeasure({{Rational(1), Rational(1)}, {Rational(1), Rational(1)}}, Rational(0), Rational(2)),
                    DomainError);
    CHECK_THROWS_AS(AtomicMeasure({{Rational(5), Rational(1)}}, Rational(0), Rational(2)), DomainError);
}

TEST_CASE("translation numbers of the generators") {
    AtomicMeasure mu = AtomicMeasure::integers();
    for (Rational x : {Rational(0), Rational(1, 2), Rational(-7, 3)}) {
        CHECK(translation_number(staircase_map(StaircaseElement::translation(1)), mu, x, kTol).contains(Rational(-1)));
        CHECK(translation_number(staircase_map(StaircaseElement::translation(-2)), mu, x, kTol).contains(Rational(2)));
        for (int k = 0; k <= 3; ++k)
            CHECK(translation_number(staircase_map(StaircaseElement::h(k)), mu, x, kTol).contains(Rational(0)));
    }
    CHECK_THROWS_AS(translation_number(staircase_map(StaircaseElement::translation(1)), mu, Rational(-20), kTol),
                    DomainError);
    CHECK_THROWS_AS(translation_number(staircase_map(StaircaseElement::h(0)), mu, Rational(30), kTol), DomainError);
}

TEST_CASE("fixed point search") {
    FixedPointResult r = find_fixed_point(StaircaseElement::h(1), {}, kTol);
    REQUIRE(r.point);
    CHECK(r.point->contains(Rational(-20)));
    FixedPointResult none = find_fixed_point(StaircaseElement::translation(1), {Rational(-3), Rational(3), 6}, kTol);
    CHECK(!none.point);
    CHECK(none.undecided_cells == 0);
}

TEST_CASE("tau report is consistent") {
    std::vector<StaircaseElement> words{StaircaseElement::parse("f"), StaircaseElement::parse("h1"),
                                        StaircaseElement::parse("f h1")};
    TauReport r = tau_report(words, AtomicMeasure::integers(), kTol, Rational(1, 2), {Rational(-5), Rational(5), 6});
    CHECK(r.ok());
    CHECK(r.rows.size() == 3);
    CHECK(r.pairs.size() == 9);
    CHECK(r.to_csv().rfind("kind,left,right,tau_lo,tau_hi,fixed_point,undecided_cells,consistent", 0) == 0);
}

TEST_CASE("distortion probe") {
    ActionContext ac(2, Rational(10));
    auto id = distortion_probe(ac, UnipotentMatrix::identity(2), 3, 2);
    CHECK(id.size() == 6);
    for (const auto& row : id) {
        CHECK(row.lipschitz == 0.0);
        CHECK(row.max_deviation == 0.0);
    }
    auto rows = distortion_probe(ac, UnipotentMatrix::generator(2, 1), 4, 3);
    for (const auto& row : rows) {
        CHECK(std::isfinite(row.lipschitz));
        CHECK(row.lipschitz >= 0);
        CHECK(row.max_deviation >= 0);
    }
    // finer grids see at least as much variation
    for (size_t i = 1; i < rows.size(); ++i)
        if (rows[i].tile == rows[i - 1].tile) CHECK(rows[i].max_deviation >= rows[i - 1].max_deviation);
    CHECK(distortion_csv(rows).find('\n') != std::string::npos);
    CHECK_THROWS_AS(distortion_probe(ac, UnipotentMatrix::identity(2), 21, 1), BudgetExhausted);
}
