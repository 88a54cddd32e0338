#include "nilflow/staircase.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <map>
#include <mutex>
#include <sstream>

#include "json.hpp"

namespace nilflow {

namespace {

Interval point(const Real& x) { return Interval::from_endpoints(Real(x), Real(x)); }

Interval unit(mpfr_prec_t prec) { return Interval(Rational(0), Rational(1), prec); }

// exp(-1/(x(1-x))) at a point of (0, 1); 0 outside.
Interval beta_point(const Real& x) {
    const mpfr_prec_t prec = x.precision();
    if (mpfr_sgn(x.get()) <= 0 || mpfr_cmp_ui(x.get(), 1) >= 0) return Interval(0L, prec);
    Interval xi = point(x);
    Interval t = Interval(1L, prec) / (xi * (Interval(1L, prec) - xi));
    return exp(-t);
}

}  // namespace

BumpMap::BumpMap() {
    // |beta'| = t^2 e^{-t} |1 - 2x| with t = 1/(x(1-x)); bounded cell by cell.
    const mpfr_prec_t prec = 64;
    const int cells = 1024;
    Real best(prec);
    mpfr_set_ui(best.get(), 0, MPFR_RNDU);
    for (int i = 0; i < cells; ++i) {
        Interval x(Rational(i, cells), Rational(i + 1, cells), prec);
        Interval b(prec);
        if (i == 0 || i == cells - 1) {
            // t >= t_min >= 2, where t^2 e^{-t} is decreasing
            Rational h(1, cells);
            Interval tmin = Interval(1L, prec) / Interval(h * (1 - h), prec);
            b = sqr(tmin) * exp(-tmin);
        } else {
            b = abs(beta_deriv(x));
        }
        if (mpfr_greater_p(b.hi().get(), best.get())) best = b.hi();
    }
    slope_bound_ = best.to_rational();
    Integer c;
    mpz_cdiv_q(c.get_mpz_t(), slope_bound_.get_num_mpz_t(), slope_bound_.get_den_mpz_t());
    if (c < 1) c = 1;
    delta_ = Rational(1) / Rational(4 * c);
}

const BumpMap& bump_map() {
    static const BumpMap map;
    return map;
}

Interval BumpMap::beta(const Interval& x) {
    const mpfr_prec_t prec = x.precision();
    Interval lo = beta_point(x.lo());
    Interval hi = beta_point(x.hi());
    // increasing on [0, 1/2], decreasing on [1/2, 1]
    if (mpfr_cmp_d(x.hi().get(), 0.5) <= 0) return hull(lo, hi);
    if (mpfr_cmp_d(x.lo().get(), 0.5) >= 0) return hull(lo, hi);
    Real half(prec);
    mpfr_set_d(half.get(), 0.5, MPFR_RNDN);
    return hull(hull(lo, hi), beta_point(half));
}

Interval BumpMap::beta_deriv(const Interval& x) {
    const mpfr_prec_t prec = x.precision();
    Interval one(1L, prec);
    if (mpfr_sgn(x.lo().get()) <= 0 || mpfr_cmp_ui(x.hi().get(), 1) >= 0) {
        if (x.lo() .to_double() == x.hi().to_double() && mpfr_equal_p(x.lo().get(), x.hi().get()))
            return Interval(0L, prec);
        throw DomainError("beta_deriv: interval must lie inside (0, 1)");
    }
    Interval t = one / (x * (one - x));
    return exp(-t) * sqr(t) * (one - Interval(2L, prec) * x);
}

Interval BumpMap::apply_point(const Real& x) const {
    const mpfr_prec_t prec = x.precision();
    if (mpfr_sgn(x.get()) <= 0) return Interval(0L, prec);
    if (mpfr_cmp_ui(x.get(), 1) >= 0) return Interval(1L, prec);
    return intersect(point(x) + Interval(delta_, prec) * beta_point(x), unit(prec));
}

Interval BumpMap::apply(const Interval& x) const {
    const mpfr_prec_t prec = x.precision();
    Interval lo = apply_point(x.lo());
    Interval hi = apply_point(x.hi());
    return intersect(hull(lo, hi), unit(prec));
}

Interval BumpMap::inverse_point(const Real& y) const {
    const mpfr_prec_t prec = y.precision();
    if (mpfr_sgn(y.get()) <= 0) return Interval(0L, prec);
    if (mpfr_cmp_ui(y.get(), 1) >= 0) return Interval(1L, prec);
    // Newton in double, polished at working precision, then a certified bracket.
    const double yd = mpfr_get_d(y.get(), MPFR_RNDN);
    const double dd = delta_.get_d();
    double xd = yd;
    for (int it = 0; it < 60; ++it) {
        if (xd <= 0 || xd >= 1) break;
        double t = 1.0 / (xd * (1 - xd));
        double b = std::exp(-t);
        double step = (xd + dd * b - yd) / (1 + dd * b * t * t * (1 - 2 * xd));
        double next = std::clamp(xd - step, 0.5 * xd, 0.5 * (xd + 1));
        if (next == xd) break;
        xd = next;
    }
    Real x(prec);
    mpfr_set_d(x.get(), xd, MPFR_RNDN);
    for (mpfr_prec_t reached = 50; reached < prec + 8; reached *= 2) {
        Interval xi = point(x);
        Interval fx = apply_point(x) - point(y);
        Interval d = deriv(xi);
        Real step(prec);
        mpfr_div(step.get(), fx.lo().get(), d.lo().get(), MPFR_RNDN);
        mpfr_sub(x.get(), x.get(), step.get(), MPFR_RNDN);
        if (mpfr_sgn(x.get()) <= 0 || mpfr_cmp_ui(x.get(), 1) >= 0) break;
    }
    Real eps(prec);
    mpfr_set_ui_2exp(eps.get(), 1, -static_cast<long>(prec) + 4, MPFR_RNDU);
    for (int tries = 0; tries < 64; ++tries) {
        Real lo(prec), hi(prec);
        mpfr_sub(lo.get(), x.get(), eps.get(), MPFR_RNDD);
        mpfr_add(hi.get(), x.get(), eps.get(), MPFR_RNDU);
        if (mpfr_sgn(lo.get()) < 0) mpfr_set_ui(lo.get(), 0, MPFR_RNDD);
        if (mpfr_cmp_ui(hi.get(), 1) > 0) mpfr_set_ui(hi.get(), 1, MPFR_RNDU);
        bool lo_ok = mpfr_lessequal_p(apply_point(lo).hi().get(), y.get());
        bool hi_ok = mpfr_greaterequal_p(apply_point(hi).lo().get(), y.get());
        if (lo_ok && hi_ok) return Interval::from_endpoints(std::move(lo), std::move(hi));
        mpfr_mul_ui(eps.get(), eps.get(), 16, MPFR_RNDU);
    }
    return unit(prec);
}

Interval BumpMap::inverse(const Interval& y) const {
    const mpfr_prec_t prec = y.precision();
    Interval lo = inverse_point(y.lo());
    Interval hi = inverse_point(y.hi());
    return intersect(hull(lo, hi), unit(prec));
}

Interval BumpMap::deriv(const Interval& x) const {
    const mpfr_prec_t prec = x.precision();
    return Interval(1L, prec) + Interval(delta_, prec) * beta_deriv(x);
}

Interval BumpMap::power(const Interval& x, long power) const {
    Interval y = x;
    if (power >= 0)
        for (long i = 0; i < power; ++i) y = apply(y);
    else
        for (long i = 0; i < -power; ++i) y = inverse(y);
    return y;
}

// ---------------------------------------------------------------------------

StaircaseElement StaircaseElement::parse(const std::string& text, StairMode mode) {
    StaircaseElement e;
    e.mode = mode;
    std::istringstream is(text);
    std::string tok;
    while (is >> tok) {
        StairLetter l;
        if (tok == "f" || tok == "F") {
            l.is_translation = true;
            l.exponent = tok == "f" ? 1 : -1;
        } else if (tok.size() >= 2 && (tok[0] == 'h' || tok[0] == 'H')) {
            int k = 0;
            for (size_t i = 1; i < tok.size(); ++i) {
                if (!std::isdigit(static_cast<unsigned char>(tok[i])))
                    throw ParseError("bad staircase token: " + tok);
                k = k * 10 + (tok[i] - '0');
                if (k > kMaxStairDepth) throw DomainError("staircase depth exceeded: " + tok);
            }
            l.k = k;
            l.exponent = tok[0] == 'h' ? 1 : -1;
        } else {
            throw ParseError("bad staircase token: " + tok);
        }
        e.letters.push_back(l);
    }
    return e;
}

StaircaseElement StaircaseElement::translation(int power) {
    StaircaseElement e;
    for (int i = 0; i < std::abs(power); ++i) e.letters.push_back({true, 0, power > 0 ? 1 : -1});
    return e;
}

StaircaseElement StaircaseElement::h(int k, int exponent) {
    if (k < 0 || k > kMaxStairDepth) throw DomainError("staircase depth exceeded");
    StaircaseElement e;
    for (int i = 0; i < std::abs(exponent); ++i) e.letters.push_back({false, k, exponent > 0 ? 1 : -1});
    return e;
}

std::string StaircaseElement::to_string() const {
    std::string out;
    for (const auto& l : letters) {
        if (!out.empty()) out += ' ';
        if (l.is_translation) out += l.exponent > 0 ? "f" : "F";
        else out += (l.exponent > 0 ? "h" : "H") + std::to_string(l.k);
    }
    return out;
}

int StaircaseElement::depth() const {
    int d = 0;
    for (const auto& l : letters)
        if (!l.is_translation) d = std::max(d, l.k);
    return d;
}

StaircaseElement StaircaseElement::inverse() const {
    StaircaseElement e;
    e.mode = mode;
    for (auto it = letters.rbegin(); it != letters.rend(); ++it) {
        StairLetter l = *it;
        l.exponent = -l.exponent;
        e.letters.push_back(l);
    }
    return e;
}

StaircaseElement StaircaseElement::operator*(const StaircaseElement& other) const {
    StaircaseElement e = *this;
    e.letters.insert(e.letters.end(), other.letters.begin(), other.letters.end());
    return e;
}

StaircaseElement StaircaseElement::commutator(const StaircaseElement& g) const {
    return inverse() * g.inverse() * *this * g;
}

StaircaseElement StaircaseElement::with_mode(StairMode m) const {
    StaircaseElement e = *this;
    e.mode = m;
    return e;
}

// ---------------------------------------------------------------------------

Integer exponent_table(int k, const Integer& m) {
    if (k < 0 || k > kMaxStairDepth) throw DomainError("exponent_table: depth exceeded");
    if (k == 0) return 1;
    if (k == 1) return m;
    static std::mutex mu;
    static std::map<std::pair<int, std::string>, Integer> memo;
    const auto key = std::make_pair(k, m.get_str());
    {
        std::lock_guard lock(mu);
        if (auto it = memo.find(key); it != memo.end()) return it->second;
    }
    // H_k(0) = 0 and H_k(j) - H_k(j-1) = H_{k-1}(j), walked from 0 to m.
    Integer h = 0;
    if (m > 0)
        for (Integer j = 1; j <= m; ++j) h += exponent_table(k - 1, j);
    else
        for (Integer j = 0; j > m; --j) h -= exponent_table(k - 1, j);
    std::lock_guard lock(mu);
    memo.emplace(key, h);
    return h;
}

namespace {

Integer floor_of(const Real& x) {
    Integer z;
    Real f(x.precision());
    mpfr_floor(f.get(), x.get());
    mpfr_get_z(z.get_mpz_t(), f.get(), MPFR_RNDD);
    return z;
}

Interval shift(const Interval& x, long by) {
    return x + Interval(by, x.precision());
}

Interval h_eval(int k, const Interval& x, bool inv, StairMode mode);

Interval h_on_unit(int k, const Interval& x, const Integer& m, bool inv, StairMode mode) {
    const mpfr_prec_t prec = x.precision();
    const long ml = m.get_si();
    const BumpMap& a = bump_map();
    Interval cell(Rational(m), Rational(m + 1), prec);
    Interval y(prec);
    if (mode == StairMode::exponent_table || k == 0) {
        Integer H = exponent_table(k, m);
        if (abs(H) > (1L << 24)) throw BudgetExhausted("staircase: alpha power too large");
        long p = H.get_si();
        y = shift(a.power(intersect(shift(x, -ml), unit(prec)), inv ? -p : p), ml);
    } else if (ml == 0) {
        y = x;
    } else if (ml >= 1) {
        y = inv ? h_eval(k - 1, shift(h_eval(k, shift(x, -1), true, mode), 1), true, mode)
                : shift(h_eval(k, shift(h_eval(k - 1, x, false, mode), -1), false, mode), 1);
    } else {
        y = inv ? shift(h_eval(k - 1, h_eval(k, shift(x, 1), true, mode), false, mode), -1)
                : shift(h_eval(k, h_eval(k - 1, shift(x, 1), true, mode), false, mode), -1);
    }
    return intersect(hull(y, y), cell);
}

Interval h_eval(int k, const Interval& x, bool inv, StairMode mode) {
    Integer mlo = floor_of(x.lo());
    Integer mhi = floor_of(x.hi());
    if (mlo == mhi) return h_on_unit(k, x, mlo, inv, mode);
    if (mhi == mlo + 1 && mpfr_integer_p(x.hi().get()))
        return h_on_unit(k, x, mlo, inv, mode);
    // x straddles an integer: h is monotone, so evaluate the endpoints.
    Interval lo = h_eval(k, point(x.lo()), inv, mode);
    Interval hi = h_eval(k, point(x.hi()), inv, mode);
    return hull(lo, hi);
}

}  // namespace

Interval stair_apply_at(const StaircaseElement& e, const Interval& x, long budget) {
    double reach = std::abs(x.mid()) + static_cast<double>(e.letters.size()) + 1.0;
    if (reach * (e.depth() + 1) > static_cast<double>(budget))
        throw BudgetExhausted("staircase: recursion budget exceeded");
    Interval y = x;
    for (auto it = e.letters.rbegin(); it != e.letters.rend(); ++it) {
        if (it->is_translation) y = shift(y, -it->exponent);
        else y = h_eval(it->k, y, it->exponent < 0, e.mode);
    }
    return y;
}

Enclosure stair_apply(const StaircaseElement& e, const Rational& x, const Rational& tol, long budget) {
    if (tol <= 0) throw DomainError("stair_apply: tol must be positive");
    Enclosure out;
    for (mpfr_prec_t prec = bits_for_tol(tol) + 16; prec <= 4096; prec *= 2) {
        out = stair_apply_at(e, Interval(x, prec), budget).to_enclosure();
        if (out.width() <= tol) return out;
    }
    return out;
}

// ---------------------------------------------------------------------------

bool WitnessReport::ok() const {
    for (const auto& r : relations)
        if (!r.all_contain_zero) return false;
    return true;
}

std::string WitnessReport::to_json() const {
    nlohmann::ordered_json j;
    j["degree"] = degree;
    j["ok"] = ok();
    auto& arr = j["relations"] = nlohmann::ordered_json::array();
    for (const auto& r : relations) {
        nlohmann::ordered_json jr;
        jr["relation"] = r.relation;
        jr["samples"] = r.samples;
        jr["all_contain_zero"] = r.all_contain_zero;
        jr["max_width"] = r.max_width;
        jr["max_abs"] = r.max_abs;
        arr.push_back(jr);
    }
    return j.dump(2);
}

WitnessReport nilpotency_witness(int degree, const Rational& tol, int samples, StairMode mode) {
    if (degree < 0 || degree > kMaxStairDepth) throw DomainError("nilpotency_witness: depth exceeded");
    WitnessReport rep;
    rep.degree = degree;
    const StaircaseElement f = StaircaseElement::translation(1).with_mode(mode);
    auto H = [&](int k) { return StaircaseElement::h(k).with_mode(mode); };
    std::vector<std::pair<std::string, std::pair<StaircaseElement, StaircaseElement>>> rels;
    rels.push_back({"[f,h0] = id", {f.commutator(H(0)), StaircaseElement{}.with_mode(mode)}});
    for (int k = 1; k <= degree; ++k)
        rels.push_back({"[f,h" + std::to_string(k) + "] = h" + std::to_string(k - 1),
                        {f.commutator(H(k)), H(k - 1)}});
    for (int i = 0; i <= degree; ++i)
        for (int j = i + 1; j <= degree; ++j)
            rels.push_back({"h" + std::to_string(i) + " h" + std::to_string(j) + " = h" +
                                std::to_string(j) + " h" + std::to_string(i),
                            {H(i) * H(j), H(j) * H(i)}});
    if (degree >= 1) {
        StaircaseElement c = H(degree);
        for (int i = 0; i < degree; ++i) c = f.commutator(c);
        rels.push_back({std::to_string(degree) + "-fold [f,.] of h" + std::to_string(degree) + " = h0",
                        {c, H(0)}});
    }
    for (const auto& [name, pair] : rels) {
        RelationResidual r;
        r.relation = name;
        for (int i = 0; i < samples; ++i) {
            Rational x = Rational(-5) + Rational(10) * (Rational(i) + Rational(1, 3)) / samples;
            Enclosure d = stair_apply(pair.first, x, tol) - stair_apply(pair.second, x, tol);
            ++r.samples;
            r.all_contain_zero = r.all_contain_zero && d.contains_zero();
            r.max_width = std::max(r.max_width, d.width().get_d());
            r.max_abs = std::max(r.max_abs, std::max(std::abs(d.lo().get_d()), std::abs(d.hi().get_d())));
        }
        rep.relations.push_back(r);
    }
    return rep;
}

}  // namespace nilflow
