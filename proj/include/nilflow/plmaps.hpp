#pragma once

// Exact piecewise-linear orientation-preserving homeomorphisms of [0, 1].

#include <random>
#include <string>
#include <utility>
#include <vector>

#include "nilflow/certified_reals.hpp"

namespace nilflow {

class PLHomeo {
public:
    /// The identity.
    PLHomeo();

    /// Interior breakpoints (strictly increasing in (0,1)) and one positive slope per piece.
    /// The slopes must carry 0 to 1.
    static PLHomeo from_pieces(std::vector<Rational> breakpoints, std::vector<Rational> slopes);
    /// Graph through (0,0), (xs[i], ys[i]) and (1,1); both lists strictly increasing in (0,1).
    static PLHomeo from_points(const std::vector<Rational>& xs, const std::vector<Rational>& ys);
    /// "bp: 1/2; slopes: 1/2, 3/2". The identity is "bp: ; slopes: 1".
    static PLHomeo parse(const std::string& text);

    const std::vector<Rational>& breakpoints() const { return breakpoints_; }
    const std::vector<Rational>& slopes() const { return slopes_; }
    /// f at each breakpoint.
    std::vector<Rational> breakpoint_values() const;

    Rational operator()(const Rational& x) const;
    Rational preimage(const Rational& y) const;

    bool is_identity() const { return breakpoints_.empty(); }
    bool operator==(const PLHomeo& other) const = default;
    std::string to_string() const;

private:
    void canonicalize();

    std::vector<Rational> breakpoints_;
    std::vector<Rational> slopes_;
};

/// (f o g)(x) = f(g(x)).
PLHomeo pl_compose(const PLHomeo& f, const PLHomeo& g);
PLHomeo pl_inverse(const PLHomeo& f);
/// f^-1 g^-1 f g, the rightmost map applied first.
PLHomeo pl_commutator(const PLHomeo& f, const PLHomeo& g);

/// (f'(0), f'(1)).
std::pair<Rational, Rational> endpoint_character(const PLHomeo& f);

struct FixedComponent {
    Rational lo, hi;
    bool is_point() const { return lo == hi; }
    std::string to_string() const;
};

/// Maximal connected components of {x : f(x) = x}, in increasing order.
std::vector<FixedComponent> pl_fixed_points(const PLHomeo& f);

/// Random map with up to `pieces` pieces and nodes on the grid 1/denominator.
PLHomeo random_pl(std::mt19937_64& rng, int pieces = 4, int denominator = 64);

}  // namespace nilflow
