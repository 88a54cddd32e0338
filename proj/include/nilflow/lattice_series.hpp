#pragma once

// Lattice series over Z^n with weights 1/B_K(q),
//   B_K(q) = K + q_1^{2n} + q_2^{2n-2} + ... + q_n^2,
// their lexicographic down-set sums, and prefix-slab sums.
//
// Every sum is reduced to "fiber totals" T_d(C) = sum over Z^d of
// 1/(C + q_1^{2d} + ... + q_d^2) plus finite sums, using that B_K is even
// in each coordinate. Tails are summed with certified asymptotics, so
// enclosures are tight to working precision.
//
// S_K is finite only for n <= 3: the count of lattice points with B_K <= T
// grows like T^{1/2 + 1/4 + ... + 1/(2n)}, which exceeds T for n >= 4.

#include <memory>
#include <vector>

#include "nilflow/certified_reals.hpp"
#include "nilflow/unipotent.hpp"

namespace nilflow {

inline constexpr int kMaxSeriesDim = 3;
inline constexpr long kDefaultBudget = 1L << 20;

/// Budget from the NILFLOW_BUDGET environment variable, else kDefaultBudget.
long budget_from_env();

class SeriesContext {
public:
    /// Requires 1 <= n <= 3 and K >= 1.
    SeriesContext(int n, Rational K, long budget = budget_from_env());

    int dim() const { return n_; }
    const Rational& K() const { return K_; }
    /// e_j = 2n - 2j + 2 for 1-based j.
    int exponent(int j) const { return 2 * (n_ - j + 1); }
    long budget() const { return budget_; }

private:
    int n_;
    Rational K_;
    long budget_;
};

/// K + sum_j q_j^{e_j}, exact.
Rational b_value(const SeriesContext& ctx, const LatticePoint& q);

/// S_K enclosed to width <= tol.
Enclosure total_mass(const SeriesContext& ctx, const Rational& tol);
/// S_K(r): sum of 1/B_K over q lexicographically below r.
Enclosure downset_mass(const SeriesContext& ctx, const LatticePoint& r, const Rational& tol);
/// Mass of {q : (q_1..q_k) lex-below prefix}, 1 <= k <= n.
Enclosure prefix_mass(const SeriesContext& ctx, const std::vector<Integer>& prefix,
                      const Rational& tol);

// Working-precision variants used by tiling and the action.
Interval total_mass_at(const SeriesContext& ctx, mpfr_prec_t prec);
Interval downset_mass_at(const SeriesContext& ctx, const LatticePoint& r, mpfr_prec_t prec);
Interval prefix_mass_at(const SeriesContext& ctx, const std::vector<Integer>& prefix,
                        mpfr_prec_t prec);

namespace detail {

/// T_d(C) for 0 <= d <= 3, C >= 1.
Interval fiber_total(int d, const Rational& C, mpfr_prec_t prec, long budget);
/// sum_{m >= a} T_d(C + m^{2(d+1)}) for any integer a.
Interval half_sum(int d, const Rational& C, const Integer& a, mpfr_prec_t prec, long budget);
/// Asymptotic tail sum_{m >= M} T_d(C + m^{2(d+1)}); requires M >= tail_start(d, C, prec).
Interval tail_sum(int d, const Rational& C, const Integer& M, mpfr_prec_t prec);
/// Smallest M accepted by tail_sum.
Integer tail_start(int d, const Rational& C, mpfr_prec_t prec);
/// Hurwitz zeta(s, a) for rational s > 1 and integer a >= 1.
Interval hurwitz_zeta(const Rational& s, const Integer& a, mpfr_prec_t prec);
/// Drop memoized fiber values (results are identical with or without the cache).
void clear_cache();
/// Globally disable or enable memoization; used to check cache transparency.
void set_cache_enabled(bool enabled);

}  // namespace detail

}  // namespace nilflow
