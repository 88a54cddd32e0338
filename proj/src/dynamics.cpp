#include "nilflow/dynamics.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "nilflow/errors.hpp"
#include "nilflow/tiling.hpp"

namespace nilflow {

AtomicMeasure::AtomicMeasure(std::vector<Atom> atoms, Rational lo, Rational hi)
    : atoms_(std::move(atoms)), lo_(std::move(lo)), hi_(std::move(hi)) {
    if (hi_ < lo_) throw DomainError("measure: empty window");
    for (size_t i = 0; i < atoms_.size(); ++i) {
        if (atoms_[i].mass <= 0) throw DomainError("measure: atom masses must be positive");
        if (!in_window(atoms_[i].point)) throw DomainError("measure: atom outside window");
        if (i > 0 && atoms_[i].point <= atoms_[i - 1].point)
            throw DomainError("measure: atoms must increase strictly");
    }
}

AtomicMeasure AtomicMeasure::integers(long lo, long hi) {
    std::vector<Atom> atoms;
    for (long m = lo; m <= hi; ++m) atoms.push_back({Rational(m), Rational(1)});
    return AtomicMeasure(std::move(atoms), Rational(lo), Rational(hi));
}

AtomicMeasure AtomicMeasure::parse(const std::string& spec) {
    if (spec == "integers") return integers();
    long lo = 0, hi = 0;
    char tail = 0;
    if (std::sscanf(spec.c_str(), "integers:%ld:%ld%c", &lo, &hi, &tail) == 2 && lo <= hi)
        return integers(lo, hi);
    throw ParseError("unknown measure: " + spec);
}

Rational AtomicMeasure::mass(const Rational& a, const Rational& b) const {
    Rational total = 0;
    if (b <= a) return total;
    auto first = std::lower_bound(atoms_.begin(), atoms_.end(), a,
                                  [](const Atom& at, const Rational& v) { return at.point < v; });
    for (auto it = first; it != atoms_.end() && it->point < b; ++it) total += it->mass;
    return total;
}

Rational AtomicMeasure::signed_mass(const Rational& x, const Rational& y) const {
    if (x < y) return mass(x, y);
    if (y < x) return -mass(y, x);
    return 0;
}

PointMap staircase_map(const StaircaseElement& e) {
    return [e](const Rational& x, const Rational& tol) { return stair_apply(e, x, tol); };
}

Enclosure translation_number(const PointMap& f, const AtomicMeasure& mu, const Rational& x,
                             const Rational& tol) {
    if (!mu.in_window(x)) throw DomainError("translation_number: basepoint outside window");
    Rational t = tol;
    for (int round = 0; round < 4; ++round, t /= 65536) {
        Enclosure y = f(x, t);
        if (!mu.in_window(y.lo()) || !mu.in_window(y.hi()))
            throw DomainError("translation_number: image outside window");
        Enclosure tau(mu.signed_mass(x, y.lo()), mu.signed_mass(x, y.hi()));
        if (tau.width() <= tol) return tau;
    }
    throw BudgetExhausted("translation_number: image not resolved against the atoms");
}

namespace {

constexpr mpfr_prec_t kCellPrec = 64;

Enclosure displacement(const StaircaseElement& e, const Rational& x, const Rational& tol) {
    return stair_apply(e, x, tol) - Enclosure(x);
}

bool is_zero(const Enclosure& d) { return d.is_point() && d.lo() == 0; }

int certain_sign(const Enclosure& d) {
    if (d.lo() > 0) return 1;
    if (d.hi() < 0) return -1;
    return 0;
}

struct CellSearch {
    const StaircaseElement& e;
    Rational grid;
    Rational tol;
    FixedPointResult result;

    bool visit(const Rational& a, const Rational& b) {
        Enclosure image = stair_apply_at(e, Interval(a, b, kCellPrec), 1L << 20).to_enclosure();
        if (image.hi() < a || image.lo() > b) return false;
        Enclosure da = displacement(e, a, tol);
        if (is_zero(da)) {
            result.point = Enclosure(a);
            return true;
        }
        Enclosure db = displacement(e, b, tol);
        int sa = certain_sign(da), sb = certain_sign(db);
        if (sa != 0 && sb != 0 && sa != sb) {
            result.point = refine(a, b, sa);
            return true;
        }
        if (b - a > grid) {
            Rational mid = (a + b) / 2;
            return visit(a, mid) || visit(mid, b);
        }
        if (is_zero(db)) {
            result.point = Enclosure(b);
            return true;
        }
        ++result.undecided_cells;
        return false;
    }

    Enclosure refine(Rational a, Rational b, int sa) {
        while (b - a > tol) {
            Rational mid = (a + b) / 2;
            Enclosure dm = displacement(e, mid, tol);
            if (is_zero(dm)) return Enclosure(mid);
            int s = certain_sign(dm);
            if (s == 0) break;
            (s == sa ? a : b) = mid;
        }
        return Enclosure(a, b);
    }
};

}  // namespace

FixedPointResult find_fixed_point(const StaircaseElement& e, const FixedPointSearch& search,
                                  const Rational& tol) {
    if (search.hi < search.lo) throw DomainError("find_fixed_point: empty window");
    CellSearch cs{e, Rational(1), tol, {}};
    mpq_div_2exp(cs.grid.get_mpq_t(), cs.grid.get_mpq_t(), search.grid_log2);
    Rational a = search.lo;
    while (a < search.hi) {
        Integer fl;
        mpz_fdiv_q(fl.get_mpz_t(), a.get_num_mpz_t(), a.get_den_mpz_t());
        Rational b = std::min(Rational(fl + 1), search.hi);
        if (cs.visit(a, b)) return cs.result;
        a = b;
    }
    return cs.result;
}

bool TauReport::ok() const {
    for (const auto& r : rows)
        if (!r.consistent) return false;
    for (const auto& p : pairs)
        if (!is_zero(p.residual)) return false;
    return true;
}

namespace {

std::string fixed_text(const FixedPointResult& f) {
    if (!f.point) return "none";
    if (f.point->is_point()) return f.point->lo().get_str();
    return f.point->lo().get_str() + ".." + f.point->hi().get_str();
}

}  // namespace

std::string TauReport::to_csv() const {
    std::ostringstream os;
    os << "kind,left,right,tau_lo,tau_hi,fixed_point,undecided_cells,consistent\n";
    for (const auto& r : rows) {
        os << "word,\"" << r.word << "\",," << r.tau.lo() << ',' << r.tau.hi() << ','
           << fixed_text(r.fixed) << ','
           << r.fixed.undecided_cells << ',' << (r.consistent ? "true" : "false") << '\n';
    }
    for (const auto& p : pairs)
        os << "additivity,\"" << p.left << "\",\"" << p.right << "\"," << p.residual.lo() << ','
           << p.residual.hi() << ",,," << (is_zero(p.residual) ? "true" : "false") << '\n';
    return os.str();
}

TauReport tau_report(const std::vector<StaircaseElement>& words, const AtomicMeasure& mu,
                     const Rational& tol, const Rational& basepoint, const FixedPointSearch& search) {
    TauReport rep;
    std::vector<Enclosure> taus;
    for (const auto& w : words) {
        TauRow row;
        row.word = w.to_string();
        row.tau = translation_number(staircase_map(w), mu, basepoint, tol);
        row.fixed = find_fixed_point(w, search, tol);
        bool zero = is_zero(row.tau);
        row.consistent = row.fixed.point ? zero : (!zero && row.fixed.undecided_cells == 0);
        taus.push_back(row.tau);
        rep.rows.push_back(std::move(row));
    }
    for (size_t i = 0; i < words.size(); ++i)
        for (size_t j = 0; j < words.size(); ++j) {
            Enclosure both = translation_number(staircase_map(words[i] * words[j]), mu, basepoint, tol);
            rep.pairs.push_back({words[i].to_string(), words[j].to_string(), both - taus[i] - taus[j]});
        }
    return rep;
}

std::vector<DistortionRow> distortion_probe(const ActionContext& ac, const UnipotentMatrix& alpha,
                                            int depth, int tiles) {
    if (depth < 1 || tiles < 1) throw DomainError("distortion_probe: depth and tiles must be positive");
    if (depth > 20 || (1L << depth) * tiles > ac.series().budget())
        throw BudgetExhausted("distortion_probe: grid exceeds budget");
    const mpfr_prec_t prec = 96;
    const long N = 1L << depth;
    std::vector<DistortionRow> rows;
    for (int k = 1; k <= tiles; ++k) {
        std::vector<Integer> coords(ac.dim(), 1);
        coords.back() = k;
        LatticePoint q(coords);
        Tile t = tile_interval(ac.series(), q, ac.tol());
        const Rational base = t.left.midpoint();
        std::vector<double> logd(N, 0.0), dev(N, 0.0);
        for (long j = 1; j < N; ++j) {
            Rational x = base + t.length * Rational(j) / Rational(N);
            x.canonicalize();
            Enclosure d = g_deriv_at(ac, alpha, Interval(x, prec), prec).to_enclosure();
            double v = d.midpoint().get_d();
            logd[j] = std::log(v);
            dev[j] = std::max(std::abs(d.lo().get_d() - 1), std::abs(d.hi().get_d() - 1));
        }
        const double len = t.length.get_d();
        for (int d = 1; d <= depth; ++d) {
            const long stride = 1L << (depth - d);
            double lip = 0, mdev = 0;
            for (long i = stride; i < N; i += stride) {
                mdev = std::max(mdev, dev[i]);
                for (long j = i + stride; j < N; j += stride)
                    lip = std::max(lip, std::abs(logd[i] - logd[j]) / (len * double(j - i) / double(N)));
            }
            rows.push_back({q, d, lip, mdev});
        }
    }
    return rows;
}

std::string distortion_csv(const std::vector<DistortionRow>& rows) {
    std::ostringstream os;
    os.precision(12);
    os << "tile,depth,lipschitz_log_deriv,max_deviation\n";
    for (const auto& r : rows)
        os << '"' << r.tile.to_string() << "\"," << r.depth << ',' << r.lipschitz << ','
           << r.max_deviation << '\n';
    return os.str();
}

}  // namespace nilflow
