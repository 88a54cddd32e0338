#include "nilflow/yoccoz.hpp"

#include <algorithm>
#include <cmath>

namespace nilflow {

PhiParams::PhiParams(Rational a_, Rational b_) : a(std::move(a_)), b(std::move(b_)) {
    if (a <= 0 || b <= 0) throw DomainError("phi: lengths must be positive");
}

Enclosure PhiParams::u0(const Rational& tol) const {
    return enc_transcendental(Transcendental::pi, Enclosure(Rational(0)), tol * a / 4) /
           Enclosure(a);
}

Enclosure PhiParams::u1(const Rational& tol) const {
    return enc_transcendental(Transcendental::pi, Enclosure(Rational(0)), tol * b / 4) /
           Enclosure(b);
}

Enclosure PhiParams::deriv_envelope() const {
    Rational r = (b * b) / (a * a);
    return r < 1 ? Enclosure(r, Rational(1)) : Enclosure(Rational(1), r);
}

namespace {

// phi on z inside [0, a/2] (up to rounding).
Interval phi_left(const Rational& a, const Rational& b, const Interval& z) {
    const mpfr_prec_t prec = z.precision();
    Interval pi = pi_interval(prec);
    Interval ai(a, prec), bi(b, prec);
    Interval theta = pi * z / ai;
    Interval scale = bi / pi;
    Real three_eighths(prec);
    mpfr_set_q(three_eighths.get(), Rational(3 * a / 8).get_mpq_t(), MPFR_RNDD);
    if (mpfr_lessequal_p(z.hi().get(), three_eighths.get()))
        return scale * atan(ai / bi * tan(theta));
    Interval half_pi = pi / Interval(2L, prec);
    return scale * (half_pi - atan(bi / ai * cot(theta)));
}

Interval phi_point(const Rational& a, const Rational& b, const Real& y) {
    const mpfr_prec_t prec = y.precision();
    if (mpfr_sgn(y.get()) <= 0) return Interval(0L, prec);
    if (mpfr_cmp_q(y.get(), a.get_mpq_t()) >= 0) return Interval(b, prec);
    Interval yi = Interval::from_endpoints(Real(y), Real(y));
    if (mpfr_cmp_q(y.get(), Rational(a / 2).get_mpq_t()) <= 0) return phi_left(a, b, yi);
    Interval z = Interval(a, prec) - yi;
    return Interval(b, prec) - phi_left(a, b, z);
}

Interval clip(const Interval& v, const Rational& hi) {
    const mpfr_prec_t prec = v.precision();
    return intersect(v, Interval(Rational(0), hi, prec));
}

mpfr_prec_t prec_for(const Rational& tol, const Rational& a, const Rational& b) {
    // extra bits for magnitudes of a, b and their ratio
    double spread = std::abs(std::log2(a.get_d())) + std::abs(std::log2(b.get_d()));
    return bits_for_tol(tol) + static_cast<mpfr_prec_t>(spread) + 8;
}

Interval clip_input(const Enclosure& x, const Rational& a, const Rational& tol, mpfr_prec_t prec) {
    if (x.hi() < -tol || x.lo() > a + tol) throw DomainError("phi: x outside [0, a]");
    Rational lo = std::max(x.lo(), Rational(0));
    Rational hi = std::min(x.hi(), a);
    if (lo > hi) lo = hi;
    return Interval(lo, hi, prec);
}

template <typename F>
Enclosure refine(const Enclosure& x, const Rational& tol, mpfr_prec_t start, F&& eval) {
    Enclosure out;
    for (mpfr_prec_t prec = start; prec <= 16384; prec *= 2) {
        out = eval(prec);
        if (!x.is_point() || out.width() <= tol) return out;
    }
    return out;
}

}  // namespace

Interval phi_at(const Rational& a, const Rational& b, const Interval& x) {
    if (a == b) return clip(x, a);
    Interval lo = phi_point(a, b, x.lo());
    Interval hi = phi_point(a, b, x.hi());
    return clip(hull(lo, hi), b);
}

Interval phi_deriv_at(const Rational& a, const Rational& b, const Interval& x) {
    const mpfr_prec_t prec = x.precision();
    Rational r = (b * b) / (a * a);
    Interval envelope = r < 1 ? Interval(r, Rational(1), prec) : Interval(Rational(1), r, prec);
    if (a == b) return Interval(1L, prec);
    Interval theta = pi_interval(prec) * clip(x, a) / Interval(a, prec);
    Interval s = sin(theta);
    Interval ratio = Interval(a * a / (b * b) - 1, prec);
    Interval d = Interval(1L, prec) / (Interval(1L, prec) + ratio * sqr(s));
    return intersect(d, envelope);
}

Enclosure phi_apply(const PhiParams& p, const Enclosure& x, const Rational& tol) {
    if (tol <= 0) throw DomainError("phi: tol must be positive");
    return refine(x, tol, prec_for(tol, p.a, p.b), [&](mpfr_prec_t prec) {
        return phi_at(p.a, p.b, clip_input(x, p.a, tol, prec)).to_enclosure();
    });
}

Enclosure phi_deriv(const PhiParams& p, const Enclosure& x, const Rational& tol) {
    if (tol <= 0) throw DomainError("phi: tol must be positive");
    return refine(x, tol, prec_for(tol, p.a, p.b), [&](mpfr_prec_t prec) {
        return phi_deriv_at(p.a, p.b, clip_input(x, p.a, tol, prec)).to_enclosure();
    });
}

Enclosure phi_apply_literal(const PhiParams& p, const Enclosure& x, const Rational& tol) {
    if (!(x.lo() > 0 && x.hi() < p.a)) throw DomainError("phi_apply_literal: interior points only");
    return refine(x, tol, prec_for(tol, p.a, p.b) + 32, [&](mpfr_prec_t prec) {
        Interval pi = pi_interval(prec);
        Interval u0 = pi / Interval(p.a, prec);
        Interval u1 = pi / Interval(p.b, prec);
        Interval t = -(u0 * cot(u0 * Interval(x, prec)));
        return ((atan(t / u1) + pi / Interval(2L, prec)) / u1).to_enclosure();
    });
}

}  // namespace nilflow
