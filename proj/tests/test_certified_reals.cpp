#include "doctest.h"

#include "nilflow/certified_reals.hpp"
#include "nilflow/errors.hpp"

using namespace nilflow;

namespace {

// atan(1/k) bracketed by consecutive partial sums of its alternating series.
std::pair<Rational, Rational> atan_inverse(long k, int terms) {
    Rational sum = 0, term(1, k), prev = 0;
    const Rational k2(k * k);
    for (int i = 0; i < terms; ++i) {
        prev = sum;
        Rational t = term / (2 * i + 1);
        sum += i % 2 ? Rational(-t) : t;
        term /= k2;
    }
    return prev < sum ? std::make_pair(prev, sum) : std::make_pair(sum, prev);
}

// pi = 16 atan(1/5) - 4 atan(1/239), exact rational bounds.
Enclosure machin_pi(int terms) {
    auto [a_lo, a_hi] = atan_inverse(5, terms);
    auto [b_lo, b_hi] = atan_inverse(239, terms);
    return Enclosure(16 * a_lo - 4 * b_hi, 16 * a_hi - 4 * b_lo);
}

Rational tenth_power(int e) {
    Rational q(1);
    for (int i = 0; i < e; ++i) q /= 10;
    return q;
}

}  // namespace

TEST_CASE("pi enclosure agrees with the Machin series over rationals") {
    Enclosure machin = machin_pi(40);
    CHECK(machin.width() < tenth_power(50));
    for (mpfr_prec_t prec : {64, 128, 256}) {
        Enclosure pi = pi_interval(prec).to_enclosure();
        CHECK(pi.overlaps(machin));
        CHECK(pi.width() < tenth_power(prec / 4));
    }
    Enclosure e = enc_transcendental(Transcendental::pi, Enclosure(Rational(0)), tenth_power(30));
    CHECK(e.width() <= tenth_power(30));
    CHECK(e.overlaps(machin));
}

TEST_CASE("enclosure arithmetic is exact on rationals") {
    Enclosure a(Rational(1, 3), Rational(1, 2)), b(Rational(-2), Rational(1));
    CHECK((a + b) == Enclosure(Rational(-5, 3), Rational(3, 2)));
    CHECK((a * b) == Enclosure(Rational(-1), Rational(1, 2)));
    CHECK((a - a).contains_zero());
    CHECK_THROWS_AS(a / b, DomainError);
    CHECK(Enclosure(Rational(1)).certainly_less(Enclosure(Rational(2))));
}

TEST_CASE("transcendentals contain their values and honour tol") {
    const Rational tol = tenth_power(25);
    Enclosure s = enc_transcendental(Transcendental::sqrt, Enclosure(Rational(2)), tol);
    CHECK(s.width() <= tol);
    CHECK(s.lo() * s.lo() <= 2);
    CHECK(s.hi() * s.hi() >= 2);
    // atan(1) = pi/4
    Enclosure a = enc_transcendental(Transcendental::arctan, Enclosure(Rational(1)), tol);
    CHECK((a * Enclosure(Rational(4))).overlaps(machin_pi(30)));
    // tan(theta - pi/2) = -cot(theta); at theta = pi/2 it is 0
    Enclosure half_pi = machin_pi(30) * Enclosure(Rational(1, 2));
    Enclosure t = enc_transcendental(Transcendental::tan_shifted, half_pi, tol);
    CHECK(t.contains_zero());
    // coth(x) > 1 and close to 1 for large x
    Enclosure c = enc_transcendental(Transcendental::coth, Enclosure(Rational(40)), tol);
    CHECK(c.lo() > 1);
    CHECK(c.hi() < 1 + tenth_power(30));
}

TEST_CASE("transcendental domain errors") {
    const Rational tol = tenth_power(10);
    CHECK_THROWS_AS(enc_transcendental(Transcendental::sqrt, Enclosure(Rational(-1)), tol), DomainError);
    CHECK_THROWS_AS(enc_transcendental(Transcendental::coth, Enclosure(Rational(0)), tol), DomainError);
    CHECK_THROWS_AS(enc_transcendental(Transcendental::tan_shifted, Enclosure(Rational(4)), tol), DomainError);
}

TEST_CASE("parse_rational and rendering") {
    CHECK(parse_rational("3/6") == Rational(1, 2));
    CHECK(parse_rational("-7") == Rational(-7));
    CHECK(parse_rational("0.25") == Rational(1, 4));
    CHECK_THROWS_AS(parse_rational("1/0"), ParseError);
    CHECK_THROWS_AS(parse_rational("abc"), ParseError);
    CHECK(to_decimal(Rational(1, 3), 5) == "0.33333");
    CHECK(bits_for_tol(tenth_power(12)) >= 40);
}

TEST_CASE("interval functions are monotone-correct on wide inputs") {
    Interval x(Rational(1, 10), Rational(2), 96);
    Interval e = exp(x);
    CHECK(e.contains(Rational(1)) == false);
    CHECK(mpfr_cmp_d(e.lo().get(), 1.105) > 0);
    CHECK(mpfr_cmp_d(e.hi().get(), 7.38) > 0);
    Interval l = log(Interval(Rational(1, 2), Rational(2), 96));
    CHECK(l.contains_zero());
    CHECK(sqr(Interval(Rational(-1), Rational(2), 64)).contains(Rational(0)));
}
