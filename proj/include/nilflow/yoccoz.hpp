#pragma once

// The diffeomorphisms phi_{a,b}: [0,a] -> [0,b] obtained by conjugating
// through psi_u(t) = (arctan(t/u) + pi/2)/u with u0 = pi/a, u1 = pi/b.
//
// With theta = pi x / a:
//   phi(x)  = (b/pi) atan2(a sin theta, b cos theta)
//   phi'(x) = 1 / (1 + ((a/b)^2 - 1) sin^2 theta)
// Both are evaluated in pole-free forms; phi(a - x) = b - phi(x).

#include "nilflow/certified_reals.hpp"

namespace nilflow {

struct PhiParams {
    PhiParams(Rational a_, Rational b_);

    Rational a;
    Rational b;

    Enclosure u0(const Rational& tol) const;  // pi / a
    Enclosure u1(const Rational& tol) const;  // pi / b
    /// [min(1, b^2/a^2), max(1, b^2/a^2)]
    Enclosure deriv_envelope() const;
};

/// Interval-level evaluation; x is clipped to [0, a].
Interval phi_at(const Rational& a, const Rational& b, const Interval& x);
Interval phi_deriv_at(const Rational& a, const Rational& b, const Interval& x);

/// phi_{a,b}(x); width <= tol for point x. Throws DomainError if x leaves
/// [0, a] by more than tol.
Enclosure phi_apply(const PhiParams& p, const Enclosure& x, const Rational& tol);
/// phi'_{a,b}(x), always inside deriv_envelope().
Enclosure phi_deriv(const PhiParams& p, const Enclosure& x, const Rational& tol);

/// psi_{u1}(psi_{u0}^{-1}(x)) evaluated literally, with
/// psi_{u0}^{-1}(x) = -u0 cot(u0 x). Interior points only; used as a
/// cross-check of phi_apply.
Enclosure phi_apply_literal(const PhiParams& p, const Enclosure& x, const Rational& tol);

}  // namespace nilflow
