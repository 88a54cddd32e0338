#pragma once

// Translation numbers against atomic invariant measures, fixed-point search
// for staircase words, and a derivative-distortion probe for the lattice action.

#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "nilflow/certified_reals.hpp"
#include "nilflow/nilaction.hpp"
#include "nilflow/staircase.hpp"

namespace nilflow {

struct Atom {
    Rational point;
    Rational mass;
};

class AtomicMeasure {
public:
    /// Atoms strictly increasing, positive masses, all inside [lo, hi].
    AtomicMeasure(std::vector<Atom> atoms, Rational lo, Rational hi);

    /// Unit atoms on the integers of [lo, hi].
    static AtomicMeasure integers(long lo = -20, long hi = 20);
    /// "integers" or "integers:LO:HI".
    static AtomicMeasure parse(const std::string& spec);

    const std::vector<Atom>& atoms() const { return atoms_; }
    const Rational& lo() const { return lo_; }
    const Rational& hi() const { return hi_; }
    bool in_window(const Rational& x) const { return lo_ <= x && x <= hi_; }

    /// mu([a, b)); zero when b <= a.
    Rational mass(const Rational& a, const Rational& b) const;
    /// mu([x, y)) if x < y, -mu([y, x)) if y < x, 0 if equal. Nondecreasing in y.
    Rational signed_mass(const Rational& x, const Rational& y) const;

private:
    std::vector<Atom> atoms_;
    Rational lo_, hi_;
};

/// Evaluates a map at a rational point to width <= tol.
using PointMap = std::function<Enclosure(const Rational& x, const Rational& tol)>;

PointMap staircase_map(const StaircaseElement& e);

/// Signed mu-mass between x and f(x). Throws DomainError outside the window and
/// BudgetExhausted if f(x) cannot be resolved against the atoms.
Enclosure translation_number(const PointMap& f, const AtomicMeasure& mu, const Rational& x,
                             const Rational& tol);

struct FixedPointSearch {
    Rational lo = -20;
    Rational hi = 20;
    int grid_log2 = 10;
};

struct FixedPointResult {
    std::optional<Enclosure> point;  // first certified fixed point from the left
    long undecided_cells = 0;        // grid cells where neither outcome was certified
};

/// Interval bisection of [lo, hi] down to cells of width 2^-grid_log2.
FixedPointResult find_fixed_point(const StaircaseElement& e, const FixedPointSearch& search,
                                  const Rational& tol);

struct TauRow {
    std::string word;
    Enclosure tau;
    FixedPointResult fixed;
    /// tau == 0 exactly iff a fixed point was certified, with no undecided cells left.
    bool consistent = false;
};

struct TauPair {
    std::string left, right;
    Enclosure residual;  // tau(left right) - tau(left) - tau(right)
};

struct TauReport {
    std::vector<TauRow> rows;
    std::vector<TauPair> pairs;
    bool ok() const;
    std::string to_csv() const;
};

TauReport tau_report(const std::vector<StaircaseElement>& words, const AtomicMeasure& mu,
                     const Rational& tol, const Rational& basepoint = 0,
                     const FixedPointSearch& search = {});

struct DistortionRow {
    LatticePoint tile;
    int depth;
    double lipschitz;      // max |log g'(x) - log g'(y)| / |x - y| over the grid
    double max_deviation;  // max |g'(x) - 1| over the grid
};

/// Tiles (1, ..., 1, k) for k = 1..tiles, grids j/2^d of each tile for d = 1..depth.
std::vector<DistortionRow> distortion_probe(const ActionContext& ac, const UnipotentMatrix& alpha,
                                            int depth, int tiles = 10);

std::string distortion_csv(const std::vector<DistortionRow>& rows);

}  // namespace nilflow
