#pragma once

// A smooth nilpotent group on the line: the translation f(x) = x - 1 and
// maps h_k that fix every integer. On each [m, m+1], h_0 is a copy of the
// bump diffeomorphism alpha(x) = x + delta * exp(-1/(x(1-x))) of [0, 1], and
// h_k (k >= 1) is built from h_{k-1} by the commutator recursion
// [f, h_k] = h_{k-1}, starting from the identity on [0, 1].

#include <string>
#include <vector>

#include "nilflow/certified_reals.hpp"

namespace nilflow {

inline constexpr int kMaxStairDepth = 8;

class BumpMap {
public:
    /// Certifies sup |beta'| on a 2^-10 grid and sets delta = 1/(4 ceil(sup)).
    BumpMap();

    const Rational& delta() const { return delta_; }
    /// Certified upper bound on sup |beta'| over [0, 1].
    const Rational& beta_slope_bound() const { return slope_bound_; }

    /// alpha on an interval inside [0, 1] (clipped); exact at 0 and 1.
    Interval apply(const Interval& x) const;
    Interval inverse(const Interval& y) const;
    /// alpha' = 1 + delta beta'.
    Interval deriv(const Interval& x) const;
    /// alpha^power, negative powers through the inverse.
    Interval power(const Interval& x, long power) const;

    static Interval beta(const Interval& x);
    static Interval beta_deriv(const Interval& x);

private:
    Interval apply_point(const Real& x) const;
    Interval inverse_point(const Real& y) const;

    Rational delta_;
    Rational slope_bound_;
};

/// The shared bump map (built once).
const BumpMap& bump_map();

enum class StairMode { recursive, exponent_table };

/// Word in f, h_0, h_1, ... and inverses. Text: "f", "F" for f^-1, "h2",
/// "H2" for h_2^-1, whitespace separated. Evaluated right to left, so
/// "F H1 f h1" is the commutator [f, h_1] = f^-1 h_1^-1 f h_1.
struct StairLetter {
    bool is_translation = false;
    int k = 0;
    int exponent = 1;
    friend bool operator==(const StairLetter&, const StairLetter&) = default;
};

struct StaircaseElement {
    std::vector<StairLetter> letters;
    StairMode mode = StairMode::recursive;

    static StaircaseElement parse(const std::string& text, StairMode mode = StairMode::recursive);
    static StaircaseElement translation(int power);
    static StaircaseElement h(int k, int exponent = 1);
    std::string to_string() const;
    int depth() const;

    StaircaseElement inverse() const;
    StaircaseElement operator*(const StaircaseElement& other) const;
    /// f^-1 g^-1 f g with f = *this.
    StaircaseElement commutator(const StaircaseElement& g) const;
    StaircaseElement with_mode(StairMode m) const;
};

/// H_k(m): the power of alpha by which h_k acts on [m, m+1].
Integer exponent_table(int k, const Integer& m);

Interval stair_apply_at(const StaircaseElement& e, const Interval& x, long budget);
/// e(x) with width <= tol.
Enclosure stair_apply(const StaircaseElement& e, const Rational& x, const Rational& tol,
                      long budget = 1L << 20);

struct RelationResidual {
    std::string relation;
    int samples = 0;
    bool all_contain_zero = true;
    double max_width = 0;
    double max_abs = 0;  // largest |residual| endpoint
};

struct WitnessReport {
    int degree = 0;
    std::vector<RelationResidual> relations;
    bool ok() const;
    std::string to_json() const;
};

/// Checks [f, h_k] = h_{k-1} (1 <= k <= degree), [f, h_0] = id, h_i h_j = h_j h_i,
/// and that the degree-fold commutator of f against h_degree is h_0, at
/// `samples` points in [-5, 5].
WitnessReport nilpotency_witness(int degree, const Rational& tol, int samples = 200,
                                 StairMode mode = StairMode::recursive);

}  // namespace nilflow
