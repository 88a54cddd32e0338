#include "doctest.h"

#include <random>

#include "nilflow/errors.hpp"
#include "nilflow/yoccoz.hpp"

using namespace nilflow;

namespace {
const Rational kTol(1, 1000000000000000L);
}

TEST_CASE("endpoints and symmetry") {
    PhiParams p(Rational(3, 2), Rational(5));
    CHECK(phi_apply(p, Enclosure(Rational(0)), kTol).contains(Rational(0)));
    CHECK(phi_apply(p, Enclosure(Rational(3, 2)), kTol).contains(Rational(5)));
    CHECK(phi_apply(p, Enclosure(Rational(3, 4)), kTol).contains(Rational(5, 2)));
    Enclosure x = phi_apply(p, Enclosure(Rational(1, 5)), kTol);
    Enclosure y = phi_apply(p, Enclosure(Rational(13, 10)), kTol);
    CHECK((x + y).overlaps(Enclosure(Rational(5))));
}

TEST_CASE("derivative at the midpoint and the endpoints") {
    PhiParams p(Rational(1), Rational(2));
    CHECK(phi_deriv(p, Enclosure(Rational(1, 2)), kTol).contains(Rational(4)));
    CHECK(phi_deriv(p, Enclosure(Rational(0)), kTol).contains(Rational(1)));
    CHECK(phi_deriv(p, Enclosure(Rational(1)), kTol).contains(Rational(1)));
}

TEST_CASE("identity when a = b") {
    PhiParams p(Rational(7, 3), Rational(7, 3));
    for (int i = 0; i <= 10; ++i) {
        Rational x = Rational(7, 3) * Rational(i, 10);
        CHECK(phi_apply(p, Enclosure(x), kTol).contains(x));
    }
}

TEST_CASE("literal conjugation route agrees") {
    std::mt19937_64 rng(11);
    for (int t = 0; t < 50; ++t) {
        Rational a(1 + long(rng() % 99), 10), b(1 + long(rng() % 99), 10);
        PhiParams p(a, b);
        Rational x = a * Rational(1 + long(rng() % 98), 100);
        CHECK(phi_apply(p, Enclosure(x), kTol).overlaps(phi_apply_literal(p, Enclosure(x), kTol)));
    }
}

TEST_CASE("derivative matches central differences") {
    PhiParams p(Rational(2), Rational(1, 3));
    const Rational h(1, 1000000);
    for (int i = 1; i < 10; ++i) {
        Rational x = Rational(2) * Rational(i, 10);
        Enclosure fd = (phi_apply(p, Enclosure(x + h), kTol) - phi_apply(p, Enclosure(x - h), kTol)) *
                       Enclosure(1 / (2 * h));
        Enclosure d = phi_deriv(p, Enclosure(x), kTol);
        CHECK(std::abs(fd.midpoint().get_d() - d.midpoint().get_d()) < 1e-8);
    }
}

TEST_CASE("cocycle") {
    PhiParams ab(Rational(1, 2), Rational(3)), bc(Rational(3), Rational(7, 5)), ac(Rational(1, 2), Rational(7, 5));
    for (int i = 0; i <= 8; ++i) {
        Enclosure x(Rational(i, 16));
        CHECK((phi_apply(bc, phi_apply(ab, x, kTol), kTol) - phi_apply(ac, x, kTol)).contains_zero());
    }
}

TEST_CASE("domain errors") {
    PhiParams p(Rational(1), Rational(1));
    CHECK_THROWS_AS(phi_apply(p, Enclosure(Rational(2)), kTol), DomainError);
    CHECK_THROWS_AS(phi_apply(p, Enclosure(Rational(-1)), kTol), DomainError);
    CHECK_THROWS_AS(PhiParams(Rational(0), Rational(1)), DomainError);
    CHECK_THROWS_AS(phi_apply_literal(p, Enclosure(Rational(0)), kTol), DomainError);
}
