#pragma once

// Tiles I_K(q) = [S_K(q), S_K(succ q)] partitioning [0, S_K] in lex order,
// and the inverse lookup from a point to its tile.

#include <optional>
#include <string>
#include <vector>

#include "nilflow/lattice_series.hpp"

namespace nilflow {

struct Tile {
    LatticePoint q;
    Enclosure left;
    Enclosure right;
    Rational length;  // exactly 1/B_K(q)
};

Tile tile_interval(const SeriesContext& ctx, const LatticePoint& q, const Rational& tol);

enum class LocateKind { interior, boundary_pair, unresolved };
enum class UnresolvedReason { none, accumulation_point, precision_exhausted };

struct LocateResult {
    LocateKind kind = LocateKind::unresolved;
    LatticePoint q;      // interior tile, or the lower tile of a boundary pair
    LatticePoint upper;  // boundary pair: successor of q
    UnresolvedReason reason = UnresolvedReason::none;
    // Unresolved at an accumulation point: the x-enclosure meets the left end
    // of the slab {q : (q_1..q_k) = slab_prefix} with k < n.
    std::vector<Integer> slab_prefix;

    bool is_interior() const { return kind == LocateKind::interior; }
    std::string to_string() const;
};

/// Search at one working precision.
LocateResult locate_at(const SeriesContext& ctx, const Interval& x, mpfr_prec_t prec);

/// Tries tol, tol/4, tol/16 before giving up. Throws DomainError if x lies
/// outside [0, S_K] by more than tol.
LocateResult locate(const SeriesContext& ctx, const Enclosure& x, const Rational& tol);

/// Prefixes whose slab left ends bracket x: prefix_mass(lower) < x and
/// x < prefix_mass(upper), both certainly, chosen as tight as the search
/// allows. A missing side stands for 0 (lower) or S_K (upper).
struct SlabBracket {
    std::optional<std::vector<Integer>> lower;
    std::optional<std::vector<Integer>> upper;
};
SlabBracket slab_bracket(const SeriesContext& ctx, const Interval& x, mpfr_prec_t prec);

}  // namespace nilflow
