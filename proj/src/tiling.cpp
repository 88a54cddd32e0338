#include "nilflow/tiling.hpp"

namespace nilflow {

Tile tile_interval(const SeriesContext& ctx, const LatticePoint& q, const Rational& tol) {
    if (q.size() != ctx.dim()) throw DimensionError("tile_interval: dimension mismatch");
    Tile t;
    t.q = q;
    t.left = downset_mass(ctx, q, tol);
    t.right = downset_mass(ctx, lex_successor(q), tol);
    t.length = 1 / b_value(ctx, q);
    return t;
}

std::string LocateResult::to_string() const {
    switch (kind) {
        case LocateKind::interior: return "interior " + q.to_string();
        case LocateKind::boundary_pair: return "boundary " + q.to_string() + " " + upper.to_string();
        case LocateKind::unresolved:
            return reason == UnresolvedReason::accumulation_point ? "unresolved accumulation_point"
                                                                  : "unresolved precision_exhausted";
    }
    return "";
}

namespace {

enum class Side { below, above, ambiguous };

// Position of the threshold prefix_mass(prefix + t) relative to x:
// below means the threshold lies strictly under x.
Side compare(const SeriesContext& ctx, std::vector<Integer>& prefix, const Integer& t,
             const Interval& x, mpfr_prec_t prec) {
    prefix.push_back(t);
    Interval f(prec);
    try {
        f = prefix_mass_at(ctx, prefix, prec);
    } catch (const BudgetExhausted&) {
        // too expensive to decide at this threshold; treat as undecided
        prefix.pop_back();
        return Side::ambiguous;
    }
    prefix.pop_back();
    if (f.certainly_less(x)) return Side::below;
    if (x.certainly_less(f)) return Side::above;
    return Side::ambiguous;
}

constexpr int kMaxGallop = 64;

}  // namespace

LocateResult locate_at(const SeriesContext& ctx, const Interval& x, mpfr_prec_t prec) {
    const int n = ctx.dim();
    std::vector<Integer> prefix;
    LocateResult res;
    for (int j = 1; j <= n; ++j) {
        // Largest t whose threshold is below x; thresholds increase with t.
        Integer lo, hi;  // threshold(lo) below x, threshold(hi) above x
        Integer t = 0;
        Side s = compare(ctx, prefix, t, x, prec);
        Integer ambiguous_at;
        bool ambiguous = false;
        if (s == Side::ambiguous) {
            ambiguous = true;
            ambiguous_at = t;
        } else if (s == Side::below) {
            lo = t;
            Integer step = 1;
            for (int g = 0;; ++g) {
                if (g > kMaxGallop) {
                    res.reason = UnresolvedReason::accumulation_point;
                    prefix.push_back(lo);
                    res.slab_prefix = prefix;
                    return res;
                }
                Integer cand = lo + step;
                Side c = compare(ctx, prefix, cand, x, prec);
                if (c == Side::below) {
                    lo = cand;
                    step *= 2;
                } else if (c == Side::above) {
                    hi = cand;
                    break;
                } else {
                    ambiguous = true;
                    ambiguous_at = cand;
                    break;
                }
            }
        } else {
            hi = t;
            Integer step = 1;
            for (int g = 0;; ++g) {
                if (g > kMaxGallop) {
                    res.reason = UnresolvedReason::accumulation_point;
                    res.slab_prefix = prefix;
                    return res;
                }
                Integer cand = hi - step;
                Side c = compare(ctx, prefix, cand, x, prec);
                if (c == Side::above) {
                    hi = cand;
                    step *= 2;
                } else if (c == Side::below) {
                    lo = cand;
                    break;
                } else {
                    ambiguous = true;
                    ambiguous_at = cand;
                    break;
                }
            }
        }
        while (!ambiguous && hi - lo > 1) {
            Integer mid = lo + (hi - lo) / 2;
            Side c = compare(ctx, prefix, mid, x, prec);
            if (c == Side::below) lo = mid;
            else if (c == Side::above) hi = mid;
            else {
                ambiguous = true;
                ambiguous_at = mid;
            }
        }
        if (!ambiguous) {
            prefix.push_back(lo);
            continue;
        }
        // x meets the threshold between coordinate values t-1 and t.
        const Integer& at = ambiguous_at;
        if (j < n) {
            res.reason = UnresolvedReason::accumulation_point;
            prefix.push_back(at);
            res.slab_prefix = prefix;
            return res;
        }
        if (compare(ctx, prefix, at - 1, x, prec) != Side::below ||
            compare(ctx, prefix, at + 1, x, prec) != Side::above) {
            res.reason = UnresolvedReason::precision_exhausted;
            return res;
        }
        std::vector<Integer> lower = prefix, upper = prefix;
        lower.push_back(at - 1);
        upper.push_back(at);
        res.kind = LocateKind::boundary_pair;
        res.q = LatticePoint(std::move(lower));
        res.upper = LatticePoint(std::move(upper));
        return res;
    }
    res.kind = LocateKind::interior;
    res.q = LatticePoint(std::move(prefix));
    return res;
}

namespace {

// Walk t = start, start + dir, start + 2 dir, start + 4 dir, ... while the
// threshold stays on side `keep`, then bisect; returns the last t on that side.
std::optional<Integer> extreme_on_side(const SeriesContext& ctx, std::vector<Integer>& prefix,
                                       const Integer& start, int dir, Side keep,
                                       const Interval& x, mpfr_prec_t prec) {
    if (compare(ctx, prefix, start, x, prec) != keep) return std::nullopt;
    Integer good = start;
    Integer step = 1;
    std::optional<Integer> bad;
    for (int g = 0; g < 80; ++g) {
        Integer cand = good + dir * step;
        if (compare(ctx, prefix, cand, x, prec) == keep) {
            good = cand;
            step *= 2;
        } else {
            bad = cand;
            break;
        }
    }
    if (!bad) return good;
    while (abs(*bad - good) > 1) {
        Integer mid = good + (*bad - good) / 2;
        if (compare(ctx, prefix, mid, x, prec) == keep) good = mid;
        else bad = mid;
    }
    return good;
}

std::vector<Integer> extend(std::vector<Integer> p, const Integer& t) {
    p.push_back(t);
    return p;
}

}  // namespace

SlabBracket slab_bracket(const SeriesContext& ctx, const Interval& x, mpfr_prec_t prec) {
    const int n = ctx.dim();
    SlabBracket br;
    std::vector<Integer> p;
    for (int j = 1; j <= n; ++j) {
        Side s0 = compare(ctx, p, Integer(0), x, prec);
        if (s0 != Side::ambiguous) {
            // Largest t below x and smallest t above x.
            std::optional<Integer> lo, hi;
            if (s0 == Side::below) {
                lo = extreme_on_side(ctx, p, Integer(0), +1, Side::below, x, prec);
                if (compare(ctx, p, *lo + 1, x, prec) == Side::above) hi = *lo + 1;
            } else {
                hi = extreme_on_side(ctx, p, Integer(0), -1, Side::above, x, prec);
                if (compare(ctx, p, *hi - 1, x, prec) == Side::below) lo = *hi - 1;
            }
            if (lo) br.lower = extend(p, *lo);
            if (hi) br.upper = extend(p, *hi);
            if (lo && hi) {
                p.push_back(*lo);
                continue;
            }
            if (!lo && !hi) return br;
            // One side only: either the gallop ran out or x meets the next
            // threshold; look for it one step further.
            Integer at = lo ? Integer(*lo + 1) : Integer(*hi - 1);
            if (compare(ctx, p, at, x, prec) != Side::ambiguous) return br;
            s0 = Side::ambiguous;
            p.push_back(at);
        } else {
            p.push_back(Integer(0));
        }
        // x meets the left end of slab p = (..., t).
        Integer t = p.back();
        p.pop_back();
        if (compare(ctx, p, t - 1, x, prec) == Side::below) br.lower = extend(p, t - 1);
        if (compare(ctx, p, t + 1, x, prec) == Side::above) br.upper = extend(p, t + 1);
        if (j < n) {
            std::vector<Integer> left = extend(p, t - 1);
            if (auto s = extreme_on_side(ctx, left, Integer(0), +1, Side::below, x, prec))
                br.lower = extend(left, *s);
            std::vector<Integer> right = extend(p, t);
            if (auto s = extreme_on_side(ctx, right, Integer(0), -1, Side::above, x, prec))
                br.upper = extend(right, *s);
        }
        return br;
    }
    return br;
}

LocateResult locate(const SeriesContext& ctx, const Enclosure& x, const Rational& tol) {
    if (tol <= 0) throw DomainError("locate: tol must be positive");
    Rational t = tol;
    LocateResult last;
    for (int round = 0; round < 3; ++round, t /= 4) {
        mpfr_prec_t prec = bits_for_tol(t);
        Interval xi(x, prec);
        if (round == 0) {
            Enclosure total = total_mass_at(ctx, prec).to_enclosure();
            if (x.hi() < -tol || x.lo() > total.hi() + tol)
                throw DomainError("locate: x outside [0, S_K]");
        }
        last = locate_at(ctx, xi, prec);
        if (last.kind != LocateKind::unresolved) return last;
    }
    return last;
}

}  // namespace nilflow
