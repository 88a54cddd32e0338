#include "nilflow/certified_reals.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <utility>

#include <json.hpp>

namespace nilflow {

Rational parse_rational(std::string_view text) {
    std::string s(text);
    s.erase(std::remove_if(s.begin(), s.end(), [](unsigned char c) { return std::isspace(c); }),
            s.end());
    if (s.empty()) throw ParseError("empty rational");
    // Decimal notation such as "0.125" or "-3.5".
    if (auto dot = s.find('.'); dot != std::string::npos) {
        if (s.find('/') != std::string::npos) throw ParseError("bad rational: " + s);
        std::string digits = s.substr(0, dot) + s.substr(dot + 1);
        size_t frac = s.size() - dot - 1;
        Rational q;
        try {
            Integer num(digits.empty() || digits == "-" ? "0" : digits, 10);
            Integer den;
            mpz_ui_pow_ui(den.get_mpz_t(), 10, frac);
            q = Rational(num, den);
        } catch (const std::invalid_argument&) {
            throw ParseError("bad rational: " + s);
        }
        q.canonicalize();
        return q;
    }
    Rational q;
    if (q.set_str(s, 10) != 0) throw ParseError("bad rational: " + s);
    if (q.get_den() == 0) throw ParseError("zero denominator: " + s);
    q.canonicalize();
    return q;
}

std::string to_string(const Rational& q) { return q.get_str(); }
std::string to_string(const Integer& z) { return z.get_str(); }

std::string to_decimal(const Rational& q, int digits) {
    mpfr_t t;
    mpfr_init2(t, 128);
    mpfr_set_q(t, q.get_mpq_t(), MPFR_RNDN);
    char* buf = nullptr;
    mpfr_asprintf(&buf, "%.*Rg", digits, t);
    std::string out(buf);
    mpfr_free_str(buf);
    mpfr_clear(t);
    return out;
}

mpfr_prec_t bits_for_tol(const Rational& tol) {
    if (tol <= 0) throw DomainError("tolerance must be positive");
    // log2(1/tol) from the sizes of numerator and denominator.
    long den_bits = static_cast<long>(mpz_sizeinbase(tol.get_den_mpz_t(), 2));
    long num_bits = static_cast<long>(mpz_sizeinbase(tol.get_num_mpz_t(), 2));
    long need = std::max(0L, den_bits - num_bits + 1);
    return static_cast<mpfr_prec_t>(std::max(96L, need + 64));
}

// ---------------------------------------------------------------------------
// Enclosure

Enclosure::Enclosure(Rational lo, Rational hi) : lo_(std::move(lo)), hi_(std::move(hi)) {
    if (lo_ > hi_) throw DomainError("enclosure with lo > hi");
}

Enclosure& Enclosure::operator+=(const Enclosure& o) {
    lo_ += o.lo_;
    hi_ += o.hi_;
    return *this;
}

Enclosure& Enclosure::operator-=(const Enclosure& o) {
    Rational lo = lo_ - o.hi_;
    hi_ = hi_ - o.lo_;
    lo_ = std::move(lo);
    return *this;
}

Enclosure& Enclosure::operator*=(const Enclosure& o) {
    Rational p[4] = {lo_ * o.lo_, lo_ * o.hi_, hi_ * o.lo_, hi_ * o.hi_};
    lo_ = *std::min_element(p, p + 4);
    hi_ = *std::max_element(p, p + 4);
    return *this;
}

Enclosure& Enclosure::operator/=(const Enclosure& o) {
    if (o.contains_zero()) throw DomainError("division by an enclosure containing zero");
    Enclosure inv(1 / o.hi_, 1 / o.lo_);
    return *this *= inv;
}

std::string Enclosure::to_json() const {
    nlohmann::json j{{"lo", lo_.get_str()}, {"hi", hi_.get_str()}};
    return j.dump();
}

Enclosure Enclosure::from_json(std::string_view json) {
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(json);
    } catch (const nlohmann::json::exception& e) {
        throw ParseError(std::string("enclosure json: ") + e.what());
    }
    if (!j.contains("lo") || !j.contains("hi") || !j["lo"].is_string() || !j["hi"].is_string())
        throw ParseError("enclosure json needs string fields lo and hi");
    return Enclosure(parse_rational(j["lo"].get<std::string>()),
                     parse_rational(j["hi"].get<std::string>()));
}

Enclosure abs(const Enclosure& x) {
    if (x.lo() >= 0) return x;
    if (x.hi() <= 0) return -x;
    return Enclosure(Rational(0), std::max(Rational(-x.lo()), x.hi()));
}

Enclosure min(const Enclosure& a, const Enclosure& b) {
    return Enclosure(std::min(a.lo(), b.lo()), std::min(a.hi(), b.hi()));
}

Enclosure max(const Enclosure& a, const Enclosure& b) {
    return Enclosure(std::max(a.lo(), b.lo()), std::max(a.hi(), b.hi()));
}

Enclosure hull(const Enclosure& a, const Enclosure& b) {
    return Enclosure(std::min(a.lo(), b.lo()), std::max(a.hi(), b.hi()));
}

Enclosure intersect(const Enclosure& a, const Enclosure& b) {
    if (!a.overlaps(b)) throw DomainError("intersection of disjoint enclosures");
    return Enclosure(std::max(a.lo(), b.lo()), std::min(a.hi(), b.hi()));
}

// ---------------------------------------------------------------------------
// Real

Real::Real(mpfr_prec_t prec) {
    mpfr_init2(value_, prec);
    mpfr_set_zero(value_, 1);
}

Real::Real(const Real& other) {
    mpfr_init2(value_, other.precision());
    mpfr_set(value_, other.value_, MPFR_RNDN);
}

Real::Real(Real&& other) noexcept {
    // Steal the limbs; leave `other` as a valid zero of minimal precision.
    value_[0] = other.value_[0];
    mpfr_init2(other.value_, MPFR_PREC_MIN);
}

Real& Real::operator=(const Real& other) {
    if (this != &other) {
        mpfr_set_prec(value_, other.precision());
        mpfr_set(value_, other.value_, MPFR_RNDN);
    }
    return *this;
}

Real& Real::operator=(Real&& other) noexcept {
    if (this != &other) mpfr_swap(value_, other.value_);
    return *this;
}

Real::~Real() { mpfr_clear(value_); }

Rational Real::to_rational() const {
    if (!mpfr_number_p(value_)) throw DomainError("non-finite value in certified computation");
    Rational q;
    mpfr_get_q(q.get_mpq_t(), value_);
    return q;
}

// ---------------------------------------------------------------------------
// Interval

namespace {

void check_finite(const Interval& x) {
    if (!mpfr_number_p(x.lo().get()) || !mpfr_number_p(x.hi().get()))
        throw DomainError("non-finite interval endpoint");
}

mpfr_prec_t prec_of(const Interval& a, const Interval& b) {
    return std::max(a.precision(), b.precision());
}

template <typename F>
Interval increasing(const Interval& x, F&& fn) {
    Real lo(x.precision()), hi(x.precision());
    fn(lo.get(), x.lo().get(), MPFR_RNDD);
    fn(hi.get(), x.hi().get(), MPFR_RNDU);
    return Interval::from_endpoints(std::move(lo), std::move(hi));
}

template <typename F>
Interval decreasing(const Interval& x, F&& fn) {
    Real lo(x.precision()), hi(x.precision());
    fn(lo.get(), x.hi().get(), MPFR_RNDD);
    fn(hi.get(), x.lo().get(), MPFR_RNDU);
    return Interval::from_endpoints(std::move(lo), std::move(hi));
}

}  // namespace

Interval::Interval(mpfr_prec_t prec) : lo_(prec), hi_(prec) {}

Interval::Interval(const Rational& point, mpfr_prec_t prec) : lo_(prec), hi_(prec) {
    mpfr_set_q(lo_.get(), point.get_mpq_t(), MPFR_RNDD);
    mpfr_set_q(hi_.get(), point.get_mpq_t(), MPFR_RNDU);
}

Interval::Interval(const Rational& lo, const Rational& hi, mpfr_prec_t prec)
    : lo_(prec), hi_(prec) {
    if (lo > hi) throw DomainError("interval with lo > hi");
    mpfr_set_q(lo_.get(), lo.get_mpq_t(), MPFR_RNDD);
    mpfr_set_q(hi_.get(), hi.get_mpq_t(), MPFR_RNDU);
}

Interval::Interval(const Enclosure& e, mpfr_prec_t prec) : Interval(e.lo(), e.hi(), prec) {}

Interval::Interval(long point, mpfr_prec_t prec) : lo_(prec), hi_(prec) {
    mpfr_set_si(lo_.get(), point, MPFR_RNDD);
    mpfr_set_si(hi_.get(), point, MPFR_RNDU);
}

Interval Interval::from_endpoints(Real lo, Real hi) {
    if (mpfr_nan_p(lo.get()) || mpfr_nan_p(hi.get())) throw DomainError("NaN interval endpoint");
    if (mpfr_greater_p(lo.get(), hi.get())) throw DomainError("interval with lo > hi");
    Interval out(std::max(lo.precision(), hi.precision()));
    out.lo_ = std::move(lo);
    out.hi_ = std::move(hi);
    return out;
}

Enclosure Interval::to_enclosure() const {
    check_finite(*this);
    return Enclosure(lo_.to_rational(), hi_.to_rational());
}

double Interval::mid() const { return 0.5 * (lo_.to_double() + hi_.to_double()); }

double Interval::width_double() const {
    Real w(precision());
    mpfr_sub(w.get(), hi_.get(), lo_.get(), MPFR_RNDU);
    return mpfr_get_d(w.get(), MPFR_RNDU);
}

Rational Interval::width() const { return hi_.to_rational() - lo_.to_rational(); }

bool Interval::contains_zero() const {
    return mpfr_sgn(lo_.get()) <= 0 && mpfr_sgn(hi_.get()) >= 0;
}

bool Interval::contains(const Rational& x) const {
    return mpfr_cmp_q(lo_.get(), x.get_mpq_t()) <= 0 && mpfr_cmp_q(hi_.get(), x.get_mpq_t()) >= 0;
}

bool Interval::overlaps(const Interval& o) const {
    return mpfr_lessequal_p(lo_.get(), o.hi_.get()) && mpfr_lessequal_p(o.lo_.get(), hi_.get());
}

Interval Interval::operator-() const {
    Real lo(precision()), hi(precision());
    mpfr_neg(lo.get(), hi_.get(), MPFR_RNDD);
    mpfr_neg(hi.get(), lo_.get(), MPFR_RNDU);
    return from_endpoints(std::move(lo), std::move(hi));
}

Interval& Interval::operator+=(const Interval& o) {
    Real lo(prec_of(*this, o)), hi(prec_of(*this, o));
    mpfr_add(lo.get(), lo_.get(), o.lo_.get(), MPFR_RNDD);
    mpfr_add(hi.get(), hi_.get(), o.hi_.get(), MPFR_RNDU);
    lo_ = std::move(lo);
    hi_ = std::move(hi);
    return *this;
}

Interval& Interval::operator-=(const Interval& o) {
    Real lo(prec_of(*this, o)), hi(prec_of(*this, o));
    mpfr_sub(lo.get(), lo_.get(), o.hi_.get(), MPFR_RNDD);
    mpfr_sub(hi.get(), hi_.get(), o.lo_.get(), MPFR_RNDU);
    lo_ = std::move(lo);
    hi_ = std::move(hi);
    return *this;
}

Interval& Interval::operator*=(const Interval& o) {
    const mpfr_prec_t p = prec_of(*this, o);
    Real lo(p), hi(p), t(p);
    mpfr_srcptr a[2] = {lo_.get(), hi_.get()};
    mpfr_srcptr b[2] = {o.lo_.get(), o.hi_.get()};
    mpfr_set_inf(lo.get(), 1);
    mpfr_set_inf(hi.get(), -1);
    for (auto x : a) {
        for (auto y : b) {
            mpfr_mul(t.get(), x, y, MPFR_RNDD);
            mpfr_min(lo.get(), lo.get(), t.get(), MPFR_RNDD);
            mpfr_mul(t.get(), x, y, MPFR_RNDU);
            mpfr_max(hi.get(), hi.get(), t.get(), MPFR_RNDU);
        }
    }
    lo_ = std::move(lo);
    hi_ = std::move(hi);
    return *this;
}

Interval& Interval::operator/=(const Interval& o) {
    if (o.contains_zero()) throw DomainError("division by an interval containing zero");
    const mpfr_prec_t p = prec_of(*this, o);
    Real lo(p), hi(p);
    // 1/o is decreasing on each sign component.
    mpfr_ui_div(lo.get(), 1, o.hi_.get(), MPFR_RNDD);
    mpfr_ui_div(hi.get(), 1, o.lo_.get(), MPFR_RNDU);
    return *this *= from_endpoints(std::move(lo), std::move(hi));
}

Interval hull(const Interval& a, const Interval& b) {
    const mpfr_prec_t p = prec_of(a, b);
    Real lo(p), hi(p);
    mpfr_min(lo.get(), a.lo().get(), b.lo().get(), MPFR_RNDD);
    mpfr_max(hi.get(), a.hi().get(), b.hi().get(), MPFR_RNDU);
    return Interval::from_endpoints(std::move(lo), std::move(hi));
}

Interval intersect(const Interval& a, const Interval& b) {
    if (!a.overlaps(b)) throw DomainError("intersection of disjoint intervals");
    const mpfr_prec_t p = prec_of(a, b);
    Real lo(p), hi(p);
    mpfr_max(lo.get(), a.lo().get(), b.lo().get(), MPFR_RNDD);
    mpfr_min(hi.get(), a.hi().get(), b.hi().get(), MPFR_RNDU);
    return Interval::from_endpoints(std::move(lo), std::move(hi));
}

Interval abs(const Interval& x) {
    if (mpfr_sgn(x.lo().get()) >= 0) return x;
    if (mpfr_sgn(x.hi().get()) <= 0) return -x;
    Real lo(x.precision()), hi(x.precision());
    mpfr_abs(hi.get(), x.lo().get(), MPFR_RNDU);
    mpfr_max(hi.get(), hi.get(), x.hi().get(), MPFR_RNDU);
    return Interval::from_endpoints(std::move(lo), std::move(hi));
}

Interval sqr(const Interval& x) {
    Interval a = abs(x);
    Real lo(x.precision()), hi(x.precision());
    if (x.contains_zero()) {
        mpfr_set_zero(lo.get(), 1);
    } else {
        mpfr_sqr(lo.get(), a.lo().get(), MPFR_RNDD);
    }
    mpfr_sqr(hi.get(), a.hi().get(), MPFR_RNDU);
    return Interval::from_endpoints(std::move(lo), std::move(hi));
}

Interval pi_interval(mpfr_prec_t prec) {
    Real lo(prec), hi(prec);
    mpfr_const_pi(lo.get(), MPFR_RNDD);
    mpfr_const_pi(hi.get(), MPFR_RNDU);
    return Interval::from_endpoints(std::move(lo), std::move(hi));
}

Interval sqrt(const Interval& x) {
    if (mpfr_sgn(x.lo().get()) < 0) throw DomainError("sqrt of an interval reaching below 0");
    return increasing(x, [](mpfr_ptr r, mpfr_srcptr a, mpfr_rnd_t d) { mpfr_sqrt(r, a, d); });
}

Interval exp(const Interval& x) {
    return increasing(x, [](mpfr_ptr r, mpfr_srcptr a, mpfr_rnd_t d) { mpfr_exp(r, a, d); });
}

Interval log(const Interval& x) {
    if (!x.is_positive()) throw DomainError("log of an interval reaching 0");
    return increasing(x, [](mpfr_ptr r, mpfr_srcptr a, mpfr_rnd_t d) { mpfr_log(r, a, d); });
}

Interval atan(const Interval& x) {
    return increasing(x, [](mpfr_ptr r, mpfr_srcptr a, mpfr_rnd_t d) { mpfr_atan(r, a, d); });
}

Interval tan(const Interval& x) {
    Interval half_pi = pi_interval(x.precision()) / Interval(2L, x.precision());
    if (!(-half_pi).certainly_less(x) || !x.certainly_less(half_pi))
        throw DomainError("tan argument not inside (-pi/2, pi/2)");
    return increasing(x, [](mpfr_ptr r, mpfr_srcptr a, mpfr_rnd_t d) { mpfr_tan(r, a, d); });
}

Interval cot(const Interval& x) {
    Interval pi = pi_interval(x.precision());
    if (!x.is_positive() || !x.certainly_less(pi))
        throw DomainError("cot argument not inside (0, pi)");
    return decreasing(x, [](mpfr_ptr r, mpfr_srcptr a, mpfr_rnd_t d) { mpfr_cot(r, a, d); });
}

namespace {

// Whether [x.lo, x.hi] may contain offset + 2*pi*k for some integer k.
bool may_contain_critical(const Interval& x, const Interval& offset) {
    const mpfr_prec_t p = x.precision();
    Interval two_pi = pi_interval(p) * Interval(2L, p);
    Interval t = (x - offset) / two_pi;
    Real c(p);
    mpfr_ceil(c.get(), t.lo().get());
    return mpfr_lessequal_p(c.get(), t.hi().get());
}

Interval sin_or_cos(const Interval& x, bool is_sin) {
    const mpfr_prec_t p = x.precision();
    Interval pi = pi_interval(p);
    Interval half_pi = pi / Interval(2L, p);
    Real lo(p), hi(p), t(p);
    auto fn = [is_sin](mpfr_ptr r, mpfr_srcptr a, mpfr_rnd_t d) {
        is_sin ? mpfr_sin(r, a, d) : mpfr_cos(r, a, d);
    };
    fn(lo.get(), x.lo().get(), MPFR_RNDD);
    fn(t.get(), x.hi().get(), MPFR_RNDD);
    mpfr_min(lo.get(), lo.get(), t.get(), MPFR_RNDD);
    fn(hi.get(), x.lo().get(), MPFR_RNDU);
    fn(t.get(), x.hi().get(), MPFR_RNDU);
    mpfr_max(hi.get(), hi.get(), t.get(), MPFR_RNDU);
    // Maxima of sin at pi/2 + 2 pi k, of cos at 2 pi k; minima shifted by pi.
    Interval max_at = is_sin ? half_pi : Interval(0L, p);
    Interval min_at = max_at + pi;
    if (may_contain_critical(x, max_at)) mpfr_set_si(hi.get(), 1, MPFR_RNDU);
    if (may_contain_critical(x, min_at)) mpfr_set_si(lo.get(), -1, MPFR_RNDD);
    return Interval::from_endpoints(std::move(lo), std::move(hi));
}

}  // namespace

Interval sin(const Interval& x) { return sin_or_cos(x, true); }
Interval cos(const Interval& x) { return sin_or_cos(x, false); }

Interval coth(const Interval& x) {
    if (!x.is_positive()) throw DomainError("coth argument must be positive");
    return decreasing(x, [](mpfr_ptr r, mpfr_srcptr a, mpfr_rnd_t d) { mpfr_coth(r, a, d); });
}

Interval pow(const Interval& x, const Interval& y) {
    if (!x.is_positive()) throw DomainError("pow base must be positive");
    return exp(y * log(x));
}

Interval gamma_at(const Rational& x, mpfr_prec_t prec) {
    if (x <= 0) throw DomainError("gamma_at expects a positive argument");
    // Bracket the argument, then bound gamma at both MPFR endpoints; for an
    // exactly representable argument both endpoints coincide.
    Interval xi(x, prec);
    if (mpfr_equal_p(xi.lo().get(), xi.hi().get())) {
        return increasing(xi, [](mpfr_ptr r, mpfr_srcptr a, mpfr_rnd_t d) { mpfr_gamma(r, a, d); });
    }
    // Gamma is decreasing on (0, 1.46) and increasing beyond; 1.46 < min point < 1.4617.
    Real glo(prec), ghi(prec), t(prec);
    mpfr_gamma(glo.get(), xi.lo().get(), MPFR_RNDD);
    mpfr_gamma(t.get(), xi.hi().get(), MPFR_RNDD);
    mpfr_min(glo.get(), glo.get(), t.get(), MPFR_RNDD);
    mpfr_gamma(ghi.get(), xi.lo().get(), MPFR_RNDU);
    mpfr_gamma(t.get(), xi.hi().get(), MPFR_RNDU);
    mpfr_max(ghi.get(), ghi.get(), t.get(), MPFR_RNDU);
    if (mpfr_cmp_d(xi.lo().get(), 1.4617) < 0 && mpfr_cmp_d(xi.hi().get(), 1.46) > 0)
        mpfr_set_d(glo.get(), 0.8856, MPFR_RNDD);  // Gamma minimum 0.88560319...
    return Interval::from_endpoints(std::move(glo), std::move(ghi));
}

// ---------------------------------------------------------------------------

Enclosure enc_transcendental(Transcendental fn, const Enclosure& x, const Rational& tol) {
    if (tol <= 0) throw DomainError("tolerance must be positive");
    if (fn == Transcendental::sqrt && x.lo() < 0) throw DomainError("sqrt of negative");
    if (fn == Transcendental::coth && x.lo() <= 0) throw DomainError("coth needs x > 0");
    if (fn == Transcendental::tan_shifted) {
        if (x.lo() <= 0) throw DomainError("tan_shifted needs theta inside (0, pi)");
        Interval probe(x, 64);
        if (!probe.certainly_less(pi_interval(64)))
            throw DomainError("tan_shifted needs theta inside (0, pi)");
    }
    const bool point = fn == Transcendental::pi || x.is_point();
    constexpr mpfr_prec_t max_bits = 1 << 14;
    for (mpfr_prec_t bits = bits_for_tol(tol); bits <= max_bits; bits *= 2) {
        Interval xi(x, bits);
        Interval r(bits);
        switch (fn) {
            case Transcendental::pi: r = pi_interval(bits); break;
            case Transcendental::sqrt: r = sqrt(xi); break;
            case Transcendental::arctan: r = atan(xi); break;
            case Transcendental::tan_shifted: r = -cot(xi); break;
            case Transcendental::coth: r = coth(xi); break;
        }
        Enclosure out = r.to_enclosure();
        if (!point || out.width() <= tol) return out;
    }
    throw BudgetExhausted("transcendental evaluation did not reach the requested width");
}

}  // namespace nilflow
