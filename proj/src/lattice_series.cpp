#include "nilflow/lattice_series.hpp"

#include <atomic>
#include <cmath>
#include <cstdlib>
#include <map>
#include <mutex>
#include <string>
#include <tuple>
#include <unordered_map>

namespace nilflow {

long budget_from_env() {
    if (const char* env = std::getenv("NILFLOW_BUDGET")) {
        char* end = nullptr;
        long v = std::strtol(env, &end, 10);
        if (end != env && *end == '\0' && v > 0) return v;
    }
    return kDefaultBudget;
}

SeriesContext::SeriesContext(int n, Rational K, long budget)
    : n_(n), K_(std::move(K)), budget_(budget) {
    if (n < 1) throw DimensionError("series dimension must be >= 1");
    if (n > kMaxSeriesDim)
        throw DomainError("the lattice series diverges for n >= 4 (sum of 1/(2j) exceeds 1)");
    if (K_ < 1) throw DomainError("K must be >= 1");
    if (budget_ < 1) throw DomainError("budget must be positive");
}

Rational b_value(const SeriesContext& ctx, const LatticePoint& q) {
    if (q.size() != ctx.dim()) throw DimensionError("b_value: dimension mismatch");
    Rational b = ctx.K();
    for (int j = 1; j <= ctx.dim(); ++j) {
        Integer p;
        mpz_pow_ui(p.get_mpz_t(), q[j - 1].get_mpz_t(), ctx.exponent(j));
        b += p;
    }
    return b;
}

namespace detail {
namespace {

// ---------------------------------------------------------------------------
// memo

std::atomic<bool> g_cache_enabled{true};

struct Cache {
    std::mutex mu;
    std::unordered_map<std::string, Interval> values;
};

Cache& cache() {
    static Cache c;
    return c;
}

std::string key(char kind, int d, const Rational& C, const Integer& a, mpfr_prec_t prec) {
    return std::string(1, kind) + std::to_string(d) + "|" + C.get_str() + "|" + a.get_str() + "|" +
           std::to_string(prec);
}

template <typename F>
Interval memo(const std::string& k, F&& compute) {
    if (g_cache_enabled.load()) {
        std::lock_guard lock(cache().mu);
        if (auto it = cache().values.find(k); it != cache().values.end()) return it->second;
    }
    Interval v = compute();
    if (g_cache_enabled.load()) {
        std::lock_guard lock(cache().mu);
        if (cache().values.size() > 2'000'000) cache().values.clear();
        cache().values.emplace(k, v);
    }
    return v;
}

// ---------------------------------------------------------------------------
// small helpers

Integer ipow(const Integer& base, int e) {
    Integer r;
    mpz_pow_ui(r.get_mpz_t(), base.get_mpz_t(), e);
    return r;
}

bool is_dyadic(const Rational& s) {
    const mpz_srcptr den = s.get_den_mpz_t();
    return mpz_popcount(den) == 1;
}

/// base^(-s) for an integer base >= 1 and rational s.
Interval inv_pow(const Integer& base, const Rational& s, mpfr_prec_t prec) {
    if (is_dyadic(s)) {
        // Exact operands, correctly rounded MPFR pow in both directions.
        mpfr_prec_t exact_bits = static_cast<mpfr_prec_t>(
            std::max<size_t>({mpz_sizeinbase(base.get_mpz_t(), 2),
                              mpz_sizeinbase(s.get_num_mpz_t(), 2) + 1, 2}) + 2);
        Real b(exact_bits), e(exact_bits), lo(prec), hi(prec);
        mpfr_set_z(b.get(), base.get_mpz_t(), MPFR_RNDN);
        mpfr_set_q(e.get(), Rational(-s).get_mpq_t(), MPFR_RNDN);
        mpfr_pow(lo.get(), b.get(), e.get(), MPFR_RNDD);
        mpfr_pow(hi.get(), b.get(), e.get(), MPFR_RNDU);
        return Interval::from_endpoints(std::move(lo), std::move(hi));
    }
    return exp(Interval(Rational(-s), prec) * log(Interval(Rational(base), prec)));
}

/// B_{2j}/(2j)! = (-1)^{j+1} 2 zeta(2j) / (2 pi)^{2j}, j >= 1.
const std::vector<Interval>& bernoulli_coefficients(mpfr_prec_t prec, int count) {
    static std::mutex mu;
    static std::map<mpfr_prec_t, std::vector<Interval>> table;
    std::lock_guard lock(mu);
    auto& v = table[prec];
    if (static_cast<int>(v.size()) >= count + 1) return v;
    Interval two_pi_sq = sqr(pi_interval(prec) * Interval(2L, prec));
    Interval denom(1L, prec);
    v.clear();
    v.emplace_back(0L, prec);  // index 0 unused
    for (int j = 1; j <= count; ++j) {
        denom *= two_pi_sq;
        Real zlo(prec), zhi(prec);
        mpfr_zeta_ui(zlo.get(), 2 * j, MPFR_RNDD);
        mpfr_zeta_ui(zhi.get(), 2 * j, MPFR_RNDU);
        Interval z = Interval::from_endpoints(std::move(zlo), std::move(zhi));
        Interval c = Interval(2L, prec) * z / denom;
        v.push_back(j % 2 == 1 ? c : -c);
    }
    return v;
}

Interval symmetric(const Interval& radius) {
    Interval r = abs(radius);
    Real lo(r.precision());
    mpfr_neg(lo.get(), r.hi().get(), MPFR_RNDD);
    Real hi = r.hi();
    return Interval::from_endpoints(std::move(lo), std::move(hi));
}

// Exponent data of a d-dimensional fiber as a tail model: T_d(c) ~ A c^{-gamma}.
Rational model_gamma(int d) {
    switch (d) {
        case 0: return Rational(1);
        case 1: return Rational(1, 2);
        case 2: return Rational(1, 4);
        default: throw DomainError("no tail model for fiber dimension >= 3");
    }
}

/// integral over R of (1 + t^4)^{-1/2} = Gamma(1/4)^2 / (2 sqrt(pi)).
Interval quartic_integral(mpfr_prec_t prec) {
    Interval g = gamma_at(Rational(1, 4), prec);
    return sqr(g) / (Interval(2L, prec) * sqrt(pi_interval(prec)));
}

/// Upper bound on |R|/c^{-1/4}, where sum_p (c + p^4)^{-1/2} = c^{-1/4} (A' + R),
/// from whole-line Euler-Maclaurin with Cauchy estimates on a disk of radius
/// 1/2 around each real point (the zeros of 1 + z^4 sit at distance >= 1/sqrt 2).
Interval quartic_em_bound(const Interval& c, mpfr_prec_t prec) {
    Interval u = sqrt(sqrt(c));
    Interval rho(Rational(1, 2), prec);
    Interval one(1L, prec);
    Interval c_rho = one / sqr(one - rho * sqrt(Interval(2L, prec)));
    Interval base = Interval(2L, prec) * pi_interval(prec) * rho * u;  // 2 pi rho u
    Interval aprime = quartic_integral(prec);
    // 2 zeta(2k) (2k)! C_rho A' / (2 pi rho u)^{2k}, relative to A': drop A'.
    Interval best(0L, prec);
    bool have = false;
    Interval fact(1L, prec);
    Interval power(1L, prec);
    Interval zeta_bound(Rational(33, 10), prec);  // 2 zeta(2k) <= pi^2/3 < 3.3
    double prev = INFINITY;
    for (int k = 1; k <= 400; ++k) {
        fact *= Interval(static_cast<long>(2 * k - 1), prec) * Interval(static_cast<long>(2 * k), prec);
        power *= sqr(base);
        Interval b = zeta_bound * fact * c_rho / power;
        double bd = b.hi().to_double();
        if (!have || mpfr_less_p(b.hi().get(), best.hi().get())) {
            best = b;
            have = true;
        }
        if (bd > prev) break;
        prev = bd;
    }
    (void)aprime;
    return Interval::from_endpoints(Real(best.hi()), Real(best.hi()));
}

/// Closed form sum_m 1/(c + m^2) = (pi / sqrt c) coth(pi sqrt c).
Interval t1_closed(const Interval& c) {
    Interval s = sqrt(c);
    Interval pi = pi_interval(c.precision());
    return pi / s * coth(pi * s);
}

/// Relative correction factor range [1+lo, 1+hi] of the model A c^{-gamma}
/// for T_d, valid for all c >= c_min.
Interval model_factor(int d, const Interval& c_min, mpfr_prec_t prec) {
    Interval one(1L, prec);
    switch (d) {
        case 0: return one;
        case 1: {
            // coth(y) - 1 = 2/(e^{2y} - 1), y = pi sqrt(c), decreasing in c.
            Interval y = pi_interval(prec) * sqrt(c_min);
            Interval eps = Interval(2L, prec) / (exp(Interval(2L, prec) * y) - one);
            return hull(one, one + Interval::from_endpoints(Real(eps.hi()), Real(eps.hi())));
        }
        case 2: {
            Interval r = quartic_em_bound(c_min, prec);
            Interval y = pi_interval(prec) * sqrt(c_min);
            Interval eps = Interval(2L, prec) / (exp(Interval(2L, prec) * y) - one);
            Interval lo = one - r;
            Interval hi = (one + r) * (one + eps);
            return hull(lo, hi);
        }
        default: throw DomainError("no tail model for fiber dimension >= 3");
    }
}

Interval model_constant(int d, mpfr_prec_t prec) {
    switch (d) {
        case 0: return Interval(1L, prec);
        case 1: return pi_interval(prec);
        case 2: return pi_interval(prec) * quartic_integral(prec);
        default: throw DomainError("no tail model for fiber dimension >= 3");
    }
}

double model_error_estimate(int d, double c_min) {
    // Double-precision estimate of the model's relative error, used only to
    // choose where asymptotics take over; soundness comes from model_factor.
    switch (d) {
        case 0: return 0.0;
        case 1: return 2.0 * std::exp(-2.0 * M_PI * std::sqrt(c_min));
        case 2: {
            double base = 2.0 * M_PI * 0.5 * std::pow(c_min, 0.25);
            double best = INFINITY, lf = 0.0;
            for (int k = 1; k <= 400; ++k) {
                lf += std::log(2.0 * k - 1) + std::log(2.0 * k);
                double lb = std::log(3.3 * 11.66) + lf - 2.0 * k * std::log(base);
                best = std::min(best, lb);
                if (2.0 * k > base + 2) break;
            }
            return std::exp(best) + 2.0 * std::exp(-2.0 * M_PI * std::sqrt(c_min));
        }
        default: return INFINITY;
    }
}

double to_double(const Rational& q) { return q.get_d(); }

}  // namespace

// ---------------------------------------------------------------------------

Interval hurwitz_zeta(const Rational& s, const Integer& a, mpfr_prec_t prec) {
    if (s <= 1) throw DomainError("hurwitz_zeta needs s > 1");
    if (a < 1) throw DomainError("hurwitz_zeta needs a >= 1");
    const double sd = to_double(s);
    const double ad = a.get_d();
    Interval sum(0L, prec);
    const Rational s_minus_1 = s - 1;

    // The remainder after x = a + k is about (x/a)^{1-s} of the sum, so direct
    // summation needs about a (2^{prec/(s-1)} - 1) terms.
    const double growth = (static_cast<double>(prec) + 10.0) / (sd - 1.0);
    const double direct_terms = growth > 60.0 ? INFINITY : ad * (std::exp2(growth) - 1.0);
    if (sd > 4.0 * ad + 64.0 || direct_terms < 4096.0) {
        // Direct summation; remainder sum_{k>=N} (a+k)^{-s} <= x^{-s} (1 + x/(s-1)).
        Integer x = a;
        for (long k = 0;; ++k, ++x) {
            Interval t = inv_pow(x, s, prec);
            Interval rest = t * (Interval(1L, prec) + Interval(Rational(x) / s_minus_1, prec));
            if (k > 0 && mpfr_cmp(rest.hi().get(), sum.lo().get()) <= 0) {
                Real e(prec);
                mpfr_div_2si(e.get(), sum.lo().get(), prec + 8, MPFR_RNDU);
                if (mpfr_lessequal_p(rest.hi().get(), e.get()))
                    return sum + hull(Interval(0L, prec), rest);
            }
            sum += t;
            if (k > (1L << 24)) throw BudgetExhausted("hurwitz_zeta direct sum did not converge");
        }
    }

    // Euler-Maclaurin with the remainder bound
    //   |R| <= 4 (s)_{2J} / (2 pi)^{2J} * x^{1-s-2J} / (s + 2J - 1),  x = a + N.
    const int max_j = static_cast<int>(prec / 2 + 8);
    const auto& bern = bernoulli_coefficients(prec, max_j);
    long n_direct = std::max(0L, static_cast<long>(std::ceil((sd + 2.0 * max_j) / M_PI - ad)));
    Integer x = a;
    for (long k = 0; k < n_direct; ++k, ++x) sum += inv_pow(x, s, prec);
    Interval xs = inv_pow(x, s, prec);
    Interval xi(Rational(x), prec);
    Interval x2 = sqr(xi);
    sum += xi * xs / Interval(s_minus_1, prec);
    sum += xs / Interval(2L, prec);

    Interval poch(s, prec);  // (s)_{2j-1}
    Interval xpow = xs / xi;  // x^{-s-2j+1}
    Interval tail_tol = abs(sum);
    Real thresh(prec);
    mpfr_div_2si(thresh.get(), tail_tol.lo().get(), prec + 8, MPFR_RNDD);
    int j = 1;
    for (; j <= max_j; ++j) {
        Interval term = bern[j] * poch * xpow;
        sum += term;
        // advance to (s)_{2j+1} and x^{-s-2j-1}
        poch *= Interval(s + 2 * j - 1, prec) * Interval(s + 2 * j, prec);
        xpow /= x2;
        if (mpfr_lessequal_p(abs(term).hi().get(), thresh.get())) {
            ++j;
            break;
        }
    }
    // poch now holds (s)_{2J+1} with J = j-1 terms taken; (s)_{2J} = poch / (s + 2J).
    const int J = j - 1;
    Interval poch_2j = poch / Interval(s + 2 * J, prec);
    Interval two_pi_pow(1L, prec);
    Interval two_pi = pi_interval(prec) * Interval(2L, prec);
    for (int i = 0; i < 2 * J; ++i) two_pi_pow *= two_pi;
    // x^{1-s-2J} = xpow * x^2 after the loop advanced xpow to x^{-s-2J-1}.
    Interval rem = Interval(4L, prec) * poch_2j / two_pi_pow * xpow * x2 /
                   Interval(s + 2 * J - 1, prec);
    return sum + symmetric(rem);
}

Integer tail_start(int d, const Rational& C, mpfr_prec_t prec) {
    const int e = 2 * (d + 1);
    // C / M^e <= 2^-8 keeps the binomial series short.
    double m = std::ceil(std::pow(256.0 * to_double(C), 1.0 / e));
    m = std::max(m, 2.0);
    const double target = std::ldexp(1.0, -static_cast<int>(prec) - 4);
    while (model_error_estimate(d, to_double(C) + std::pow(m, e)) > target) m += 1.0;
    Integer M(m);
    // Guard the double estimate of the binomial ratio exactly.
    while (Rational(ipow(M, e)) < 256 * C) ++M;
    return M;
}

Interval tail_sum(int d, const Rational& C, const Integer& M, mpfr_prec_t prec) {
    if (d < 0 || d > 2) throw DomainError("tail_sum: fiber dimension out of range");
    const int e = 2 * (d + 1);
    if (Rational(ipow(M, e)) < 2 * C) throw DomainError("tail_sum: start below convergence radius");
    return memo(key('Z', d, C, M, prec), [&] {
        const Rational gamma = model_gamma(d);
        // sum_{m>=M} (C + m^e)^{-gamma} = sum_j binom(-gamma, j) C^j zeta(e gamma + e j, M);
        // per m the series alternates with nonincreasing terms, so consecutive
        // partial sums bracket the value.
        Rational coef = 1;
        Rational cpow = 1;
        Interval partial(0L, prec);
        Interval result(prec);
        for (int j = 0;; ++j) {
            Rational s = e * gamma + e * j;
            Interval term = Interval(coef * cpow, prec) * hurwitz_zeta(s, M, prec);
            if (j > 0) {
                Real thresh(prec);
                mpfr_div_2si(thresh.get(), partial.lo().get(), prec + 8, MPFR_RNDD);
                if (mpfr_lessequal_p(abs(term).hi().get(), thresh.get())) {
                    result = hull(partial, partial + term);
                    break;
                }
            }
            partial += term;
            coef *= -(gamma + j) / (j + 1);
            cpow *= C;
            if (j > 4 * static_cast<int>(prec)) throw BudgetExhausted("tail series did not converge");
        }
        Rational c_min = C + Rational(ipow(M, e));
        return model_constant(d, prec) * model_factor(d, Interval(c_min, prec), prec) * result;
    });
}

namespace {

Interval fiber_term(int d, const Rational& c, mpfr_prec_t prec, long budget) {
    return fiber_total(d, c, prec, budget);
}

// Cumulative sums P[i] = sum_{m=1}^{i} T_d(C + m^e), extended on demand. The
// summation order is fixed, so values do not depend on what was cached.
struct PartialSums {
    std::mutex mu;
    std::unordered_map<std::string, std::vector<Interval>> runs;
};

PartialSums& partial_sums() {
    static PartialSums p;
    return p;
}

void extend_run(std::vector<Interval>& run, int d, const Rational& C, long upto, mpfr_prec_t prec,
                long budget) {
    const int e = 2 * (d + 1);
    if (run.empty()) run.emplace_back(0L, prec);
    for (long m = static_cast<long>(run.size()); m <= upto; ++m)
        run.push_back(run.back() + fiber_term(d, C + Rational(ipow(Integer(m), e)), prec, budget));
}

Interval partial_sum(int d, const Rational& C, const Integer& upto, mpfr_prec_t prec, long budget) {
    if (upto <= 0) return Interval(0L, prec);
    if (upto > budget) throw BudgetExhausted("explicit lattice sum exceeds budget");
    const long n = upto.get_si();
    if (!g_cache_enabled.load()) {
        std::vector<Interval> run;
        extend_run(run, d, C, n, prec, budget);
        return run[n];
    }
    const std::string k = key('P', d, C, Integer(0), prec);
    std::vector<Interval> run;
    {
        std::lock_guard lock(partial_sums().mu);
        auto it = partial_sums().runs.find(k);
        if (it != partial_sums().runs.end()) {
            if (static_cast<long>(it->second.size()) > n) return it->second[n];
            run = it->second;
        }
    }
    extend_run(run, d, C, n, prec, budget);
    Interval v = run[n];
    std::lock_guard lock(partial_sums().mu);
    auto& slot = partial_sums().runs[k];
    if (slot.size() < run.size()) slot = std::move(run);
    return v;
}

/// sum_{m=lo}^{hi-1} T_d(C + m^e), lo >= 1
Interval explicit_sum(int d, const Rational& C, const Integer& lo, const Integer& hi,
                      mpfr_prec_t prec, long budget) {
    if (hi <= lo) return Interval(0L, prec);
    return partial_sum(d, C, hi - 1, prec, budget) - partial_sum(d, C, lo - 1, prec, budget);
}

struct Complex {
    Interval re, im;
};

Complex operator*(const Complex& x, const Complex& y) {
    return {x.re * y.re - x.im * y.im, x.re * y.im + x.im * y.re};
}

/// sum_{m>=a} 1/(C + m^2) for a >= 1 by Euler-Maclaurin. With s = sqrt C and
/// w = 1/(a - i s), f^{(j)}(a) = (-1)^j j! Im(w^{j+1}) / s, and
///   |R_J| <= |B_2J|/(2J)! * (2J)! r^{1-2J} atan(s/a) / s^2,  r = |a - i s|.
Interval half_sum_line(const Rational& C, const Integer& a, mpfr_prec_t prec) {
    const int max_k = static_cast<int>(prec / 2 + 8);
    const auto& bern = bernoulli_coefficients(prec, max_k);
    Interval s = sqrt(Interval(C, prec));
    Interval ai(Rational(a), prec);
    Interval r2(Rational(a) * Rational(a) + C, prec);
    Interval integral = atan(s / ai) / s;
    Interval sum = integral + Interval(1L, prec) / (Interval(2L, prec) * r2);
    Complex w{ai / r2, s / r2};
    Complex w2 = w * w;
    Complex wp = w2;            // w^{2k}
    Interval fact(1L, prec);    // (2k-1)!
    Real thresh(prec);
    mpfr_div_2si(thresh.get(), sum.lo().get(), prec + 8, MPFR_RNDD);
    int J = 1;
    for (int k = 1; k <= max_k; ++k) {
        Interval term = bern[k] * fact * (-wp.im) / s;  // B_2k/(2k)! f^{(2k-1)}(a)
        sum -= term;
        J = k;
        if (mpfr_lessequal_p(abs(term).hi().get(), thresh.get())) break;
        fact *= Interval(static_cast<long>(2 * k), prec) * Interval(static_cast<long>(2 * k + 1), prec);
        wp = wp * w2;
    }
    // (2J)! = (2J-1)! * 2J, with fact still holding (2J-1)!
    Interval fact2j = fact * Interval(static_cast<long>(2 * J), prec);
    Interval r = sqrt(r2);
    Interval rpow(1L, prec);
    for (int i = 0; i < 2 * J - 1; ++i) rpow *= r;
    Interval rem = abs(bern[J]) * fact2j / rpow * integral / s;
    return sum + symmetric(rem);
}

/// sum_{m>=a} with a >= 1, summing forward to the tail start.
Interval half_sum_forward(int d, const Rational& C, const Integer& a, mpfr_prec_t prec,
                          long budget) {
    Integer M0 = tail_start(d, C, prec);
    if (a >= M0) return tail_sum(d, C, a, prec);
    return explicit_sum(d, C, a, M0, prec, budget) + tail_sum(d, C, M0, prec);
}

bool has_direct_total(int D, const Rational& C, mpfr_prec_t prec) {
    if (D <= 1) return true;
    if (D == 2)
        return model_error_estimate(2, to_double(C)) < std::ldexp(1.0, -static_cast<int>(prec) - 4);
    return false;
}

}  // namespace

Interval fiber_total(int D, const Rational& C, mpfr_prec_t prec, long budget) {
    if (D < 0 || D > kMaxSeriesDim) throw DomainError("fiber dimension out of range");
    if (C < 1) throw DomainError("fiber_total needs C >= 1");
    if (D == 0) return Interval(1L, prec) / Interval(C, prec);
    return memo(key('T', D, C, Integer(0), prec), [&]() -> Interval {
        if (D == 1) return t1_closed(Interval(C, prec));
        if (D == 2 && has_direct_total(2, C, prec)) {
            Interval c(C, prec);
            return model_constant(2, prec) * model_factor(2, c, prec) /
                   sqrt(sqrt(c));
        }
        return fiber_total(D - 1, C, prec, budget) +
               Interval(2L, prec) * half_sum_forward(D - 1, C, Integer(1), prec, budget);
    });
}

Interval half_sum(int d, const Rational& C, const Integer& a, mpfr_prec_t prec, long budget) {
    if (d < 0 || d > 2) throw DomainError("half_sum: fiber dimension out of range");
    if (a <= 0) {
        // sum_{m>=a} = T_{d+1}(C) - sum_{m<a} = T_{d+1}(C) - sum_{m>=1-a} (evenness)
        return fiber_total(d + 1, C, prec, budget) - half_sum(d, C, Integer(1 - a), prec, budget);
    }
    return memo(key('H', d, C, a, prec), [&]() -> Interval {
        if (d == 0) {
            // The coth identity makes the whole half line O(1); subtract a
            // short head, or switch to Euler-Maclaurin for large a.
            if (a <= 65 || a < Integer(prec / 4)) {
                Interval half = (fiber_total(1, C, prec, budget) - fiber_total(0, C, prec, budget)) /
                                Interval(2L, prec);
                return half - explicit_sum(0, C, Integer(1), a, prec, budget);
            }
            return half_sum_line(C, a, prec);
        }
        Integer M0 = tail_start(d, C, prec);
        if (a >= M0) return tail_sum(d, C, a, prec);
        // Either sum forward from a to the tail start, or subtract the first
        // a-1 terms from the half fiber; pick the shorter explicit range.
        Integer forward = M0 - a;
        Integer backward = a - 1;
        if (backward < forward && has_direct_total(d + 1, C, prec)) {
            Interval half = (fiber_total(d + 1, C, prec, budget) - fiber_total(d, C, prec, budget)) /
                            Interval(2L, prec);
            return half - explicit_sum(d, C, Integer(1), a, prec, budget);
        }
        return explicit_sum(d, C, a, M0, prec, budget) + tail_sum(d, C, M0, prec);
    });
}

void clear_cache() {
    {
        std::lock_guard lock(partial_sums().mu);
        partial_sums().runs.clear();
    }
    std::lock_guard lock(cache().mu);
    cache().values.clear();
}

void set_cache_enabled(bool enabled) { g_cache_enabled.store(enabled); }

}  // namespace detail

// ---------------------------------------------------------------------------

Interval total_mass_at(const SeriesContext& ctx, mpfr_prec_t prec) {
    return detail::fiber_total(ctx.dim(), ctx.K(), prec, ctx.budget());
}

Interval prefix_mass_at(const SeriesContext& ctx, const std::vector<Integer>& prefix,
                        mpfr_prec_t prec) {
    const int k = static_cast<int>(prefix.size());
    if (k < 1 || k > ctx.dim()) throw DimensionError("prefix length must be in [1, n]");
    Interval total(0L, prec);
    Rational C = ctx.K();
    for (int j = 1; j <= k; ++j) {
        // slab: q_i = p_i for i < j, q_j < p_j, remaining coordinates free.
        // sum_{m < p} T(C + m^e) = sum_{m >= 1 - p} T(C + m^e) by evenness.
        const int d = ctx.dim() - j;
        total += detail::half_sum(d, C, Integer(1 - prefix[j - 1]), prec, ctx.budget());
        Integer p;
        mpz_pow_ui(p.get_mpz_t(), prefix[j - 1].get_mpz_t(), ctx.exponent(j));
        C += p;
    }
    return total;
}

Interval downset_mass_at(const SeriesContext& ctx, const LatticePoint& r, mpfr_prec_t prec) {
    if (r.size() != ctx.dim()) throw DimensionError("downset_mass: dimension mismatch");
    return prefix_mass_at(ctx, r.coords(), prec);
}

namespace {

template <typename F>
Enclosure refine_to(const Rational& tol, F&& compute) {
    for (mpfr_prec_t prec = bits_for_tol(tol); prec <= 8192; prec *= 2) {
        Enclosure e = compute(prec).to_enclosure();
        if (e.width() <= tol) return e;
    }
    throw BudgetExhausted("could not reach the requested tolerance");
}

}  // namespace

Enclosure total_mass(const SeriesContext& ctx, const Rational& tol) {
    return refine_to(tol, [&](mpfr_prec_t p) { return total_mass_at(ctx, p); });
}

Enclosure downset_mass(const SeriesContext& ctx, const LatticePoint& r, const Rational& tol) {
    return refine_to(tol, [&](mpfr_prec_t p) { return downset_mass_at(ctx, r, p); });
}

Enclosure prefix_mass(const SeriesContext& ctx, const std::vector<Integer>& prefix,
                      const Rational& tol) {
    return refine_to(tol, [&](mpfr_prec_t p) { return prefix_mass_at(ctx, prefix, p); });
}

}  // namespace nilflow
