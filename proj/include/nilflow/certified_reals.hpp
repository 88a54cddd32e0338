#pragma once

// Certified real arithmetic.
//
// Two layers:
//   Enclosure  - the public contract: a pair of exact rationals lo <= hi
//                bracketing a real value. Arithmetic on it is exact.
//   Interval   - the working type: MPFR endpoints with directed rounding.
//                Every transcendental goes through it; results convert to
//                Enclosure without loss (MPFR values are dyadic rationals).

#include <gmpxx.h>
#include <mpfr.h>

#include <compare>
#include <string>
#include <string_view>

#include "nilflow/errors.hpp"

namespace nilflow {

using Integer = mpz_class;
using Rational = mpq_class;

Rational parse_rational(std::string_view text);
std::string to_string(const Rational& q);
std::string to_string(const Integer& z);
/// Decimal rendering with `digits` significant digits. Display only.
std::string to_decimal(const Rational& q, int digits = 20);

/// Working precision (bits) that resolves absolute errors below `tol`
/// for quantities of moderate magnitude.
mpfr_prec_t bits_for_tol(const Rational& tol);

class Enclosure {
public:
    Enclosure() = default;
    explicit Enclosure(const Rational& point) : lo_(point), hi_(point) {}
    Enclosure(Rational lo, Rational hi);

    static Enclosure from_int(long v) { return Enclosure(Rational(v)); }

    const Rational& lo() const { return lo_; }
    const Rational& hi() const { return hi_; }
    Rational width() const { return hi_ - lo_; }
    Rational midpoint() const { return (lo_ + hi_) / 2; }
    bool is_point() const { return lo_ == hi_; }

    bool contains(const Rational& x) const { return lo_ <= x && x <= hi_; }
    bool contains(const Enclosure& other) const { return lo_ <= other.lo_ && other.hi_ <= hi_; }
    bool contains_zero() const { return lo_ <= 0 && 0 <= hi_; }
    bool overlaps(const Enclosure& other) const { return lo_ <= other.hi_ && other.lo_ <= hi_; }
    /// Every point of *this is strictly below every point of `other`.
    bool certainly_less(const Enclosure& other) const { return hi_ < other.lo_; }

    Enclosure operator-() const { return Enclosure(-hi_, -lo_); }
    Enclosure& operator+=(const Enclosure& o);
    Enclosure& operator-=(const Enclosure& o);
    Enclosure& operator*=(const Enclosure& o);
    Enclosure& operator/=(const Enclosure& o);

    friend Enclosure operator+(Enclosure a, const Enclosure& b) { return a += b; }
    friend Enclosure operator-(Enclosure a, const Enclosure& b) { return a -= b; }
    friend Enclosure operator*(Enclosure a, const Enclosure& b) { return a *= b; }
    friend Enclosure operator/(Enclosure a, const Enclosure& b) { return a /= b; }
    friend bool operator==(const Enclosure& a, const Enclosure& b) {
        return a.lo_ == b.lo_ && a.hi_ == b.hi_;
    }

    std::string to_json() const;
    static Enclosure from_json(std::string_view json);

private:
    Rational lo_{0};
    Rational hi_{0};
};

Enclosure abs(const Enclosure& x);
Enclosure min(const Enclosure& a, const Enclosure& b);
Enclosure max(const Enclosure& a, const Enclosure& b);
Enclosure hull(const Enclosure& a, const Enclosure& b);
/// Intersection; throws DomainError when disjoint.
Enclosure intersect(const Enclosure& a, const Enclosure& b);

// ---------------------------------------------------------------------------
// MPFR working layer

/// Owning MPFR scalar.
class Real {
public:
    explicit Real(mpfr_prec_t prec);
    Real(const Real& other);
    Real(Real&& other) noexcept;
    Real& operator=(const Real& other);
    Real& operator=(Real&& other) noexcept;
    ~Real();

    mpfr_ptr get() { return value_; }
    mpfr_srcptr get() const { return value_; }
    mpfr_prec_t precision() const { return mpfr_get_prec(value_); }
    Rational to_rational() const;
    double to_double() const { return mpfr_get_d(value_, MPFR_RNDN); }

private:
    mpfr_t value_;
};

class Interval {
public:
    explicit Interval(mpfr_prec_t prec = 128);
    Interval(const Rational& point, mpfr_prec_t prec);
    Interval(const Rational& lo, const Rational& hi, mpfr_prec_t prec);
    Interval(const Enclosure& e, mpfr_prec_t prec);
    Interval(long point, mpfr_prec_t prec);

    /// Build from already-rounded endpoints; lo must not exceed hi.
    static Interval from_endpoints(Real lo, Real hi);

    const Real& lo() const { return lo_; }
    const Real& hi() const { return hi_; }
    Real& lo() { return lo_; }
    Real& hi() { return hi_; }
    mpfr_prec_t precision() const { return lo_.precision(); }

    Enclosure to_enclosure() const;
    double mid() const;
    double width_double() const;
    Rational width() const;

    bool contains_zero() const;
    bool contains(const Rational& x) const;
    bool is_positive() const { return mpfr_sgn(lo_.get()) > 0; }
    bool is_negative() const { return mpfr_sgn(hi_.get()) < 0; }
    bool certainly_less(const Interval& o) const { return mpfr_less_p(hi_.get(), o.lo_.get()); }
    bool overlaps(const Interval& o) const;

    Interval operator-() const;
    Interval& operator+=(const Interval& o);
    Interval& operator-=(const Interval& o);
    Interval& operator*=(const Interval& o);
    Interval& operator/=(const Interval& o);
    friend Interval operator+(Interval a, const Interval& b) { return a += b; }
    friend Interval operator-(Interval a, const Interval& b) { return a -= b; }
    friend Interval operator*(Interval a, const Interval& b) { return a *= b; }
    friend Interval operator/(Interval a, const Interval& b) { return a /= b; }

private:
    Real lo_;
    Real hi_;
};

Interval hull(const Interval& a, const Interval& b);
Interval intersect(const Interval& a, const Interval& b);
Interval sqr(const Interval& x);
Interval abs(const Interval& x);

Interval pi_interval(mpfr_prec_t prec);
Interval sqrt(const Interval& x);
Interval exp(const Interval& x);
Interval log(const Interval& x);
Interval atan(const Interval& x);
/// tan on an interval inside (-pi/2, pi/2).
Interval tan(const Interval& x);
/// cot on an interval inside (0, pi).
Interval cot(const Interval& x);
Interval sin(const Interval& x);
Interval cos(const Interval& x);
/// coth on an interval inside (0, inf).
Interval coth(const Interval& x);
/// x^y for x > 0.
Interval pow(const Interval& x, const Interval& y);
/// Gamma at a positive rational point.
Interval gamma_at(const Rational& x, mpfr_prec_t prec);

// ---------------------------------------------------------------------------
// Enclosure-level transcendental entry point

enum class Transcendental { pi, sqrt, arctan, tan_shifted, coth };

/// fn(x) enclosed; for point x the result width is at most tol.
/// tan_shifted(theta) = tan(theta - pi/2) = -cot(theta), theta inside (0, pi).
/// `pi` ignores x.
Enclosure enc_transcendental(Transcendental fn, const Enclosure& x, const Rational& tol);

}  // namespace nilflow
