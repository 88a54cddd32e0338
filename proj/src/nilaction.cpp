#include "nilflow/nilaction.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <map>
#include <mutex>

#include "json.hpp"

namespace nilflow {

ActionContext::ActionContext(int n, Rational K, Rational tol, long budget)
    : series_(n, std::move(K), budget), tol_(std::move(tol)) {
    if (tol_ <= 0) throw DomainError("action tolerance must be positive");
}

Interval ActionContext::total_at(mpfr_prec_t prec) const { return total_mass_at(series_, prec); }

namespace {

Interval clamp_to(const Interval& v, const Rational& lo, const Rational& hi) {
    const mpfr_prec_t prec = v.precision();
    Real a = v.lo(), b = v.hi();
    if (mpfr_cmp_q(a.get(), lo.get_mpq_t()) < 0) mpfr_set_q(a.get(), lo.get_mpq_t(), MPFR_RNDD);
    if (mpfr_cmp_q(b.get(), hi.get_mpq_t()) > 0) mpfr_set_q(b.get(), hi.get_mpq_t(), MPFR_RNDU);
    if (mpfr_greater_p(a.get(), b.get())) {
        // v misses [lo, hi] entirely; pin to the nearer end.
        if (mpfr_cmp_q(v.hi().get(), lo.get_mpq_t()) < 0) return Interval(lo, prec);
        return Interval(hi, prec);
    }
    return Interval::from_endpoints(std::move(a), std::move(b));
}

void check_dim(const ActionContext& ac, const UnipotentMatrix& alpha) {
    if (alpha.dim() != ac.dim()) throw DimensionError("action: matrix dimension mismatch");
}

/// Leading k x k block of alpha applied to a length-k prefix.
std::vector<Integer> apply_leading(const UnipotentMatrix& alpha, const std::vector<Integer>& p) {
    std::vector<Integer> out(p.size());
    for (size_t i = 0; i < p.size(); ++i) {
        Integer s = 0;
        for (size_t k = 0; k <= i; ++k) s += alpha.at(static_cast<int>(i + 1), static_cast<int>(k + 1)) * p[k];
        out[i] = s;
    }
    return out;
}

struct TileMap {
    Rational b1, b2;
    Interval c1, c2;
};

TileMap tile_map(const ActionContext& ac, const UnipotentMatrix& alpha, const LatticePoint& q,
                 mpfr_prec_t prec) {
    const SeriesContext& s = ac.series();
    LatticePoint aq = apply_to_lattice(alpha, q);
    return {1 / b_value(s, q), 1 / b_value(s, aq), downset_mass_at(s, q, prec),
            downset_mass_at(s, aq, prec)};
}

Interval tile_image(const ActionContext& ac, const UnipotentMatrix& alpha, const LatticePoint& q,
                    const Interval& x, mpfr_prec_t prec) {
    TileMap t = tile_map(ac, alpha, q, prec);
    Interval y = clamp_to(x - t.c1, Rational(0), t.b1);
    return t.c2 + phi_at(t.b1, t.b2, y);
}

Interval tile_deriv(const ActionContext& ac, const UnipotentMatrix& alpha, const LatticePoint& q,
                    const Interval& x, mpfr_prec_t prec) {
    TileMap t = tile_map(ac, alpha, q, prec);
    Interval y = clamp_to(x - t.c1, Rational(0), t.b1);
    return phi_deriv_at(t.b1, t.b2, y);
}

Interval ratio_envelope(const ActionContext& ac, const UnipotentMatrix& alpha,
                        const std::vector<Integer>& prefix, mpfr_prec_t prec) {
    std::vector<Integer> full = prefix;
    full.resize(ac.dim(), Integer(0));
    LatticePoint q(std::move(full));
    Rational r = b_value(ac.series(), q) / b_value(ac.series(), apply_to_lattice(alpha, q));
    r *= r;
    return r < 1 ? Interval(r, Rational(1), prec) : Interval(Rational(1), r, prec);
}

}  // namespace

Interval g_apply_at(const ActionContext& ac, const UnipotentMatrix& alpha, const Interval& x,
                    mpfr_prec_t prec) {
    check_dim(ac, alpha);
    LocateResult loc = locate_at(ac.series(), x, prec);
    switch (loc.kind) {
        case LocateKind::interior: return tile_image(ac, alpha, loc.q, x, prec);
        case LocateKind::boundary_pair:
            return hull(tile_image(ac, alpha, loc.q, x, prec),
                        tile_image(ac, alpha, loc.upper, x, prec));
        case LocateKind::unresolved: break;
    }
    // Monotone envelope: slab ends map to slab ends.
    SlabBracket br = slab_bracket(ac.series(), x, prec);
    Interval lo = br.lower ? prefix_mass_at(ac.series(), apply_leading(alpha, *br.lower), prec)
                           : Interval(0L, prec);
    Interval hi = br.upper ? prefix_mass_at(ac.series(), apply_leading(alpha, *br.upper), prec)
                           : ac.total_at(prec);
    return hull(lo, hi);
}

Interval g_deriv_at(const ActionContext& ac, const UnipotentMatrix& alpha, const Interval& x,
                    mpfr_prec_t prec) {
    check_dim(ac, alpha);
    LocateResult loc = locate_at(ac.series(), x, prec);
    switch (loc.kind) {
        case LocateKind::interior: return tile_deriv(ac, alpha, loc.q, x, prec);
        case LocateKind::boundary_pair:
            return hull(tile_deriv(ac, alpha, loc.q, x, prec),
                        tile_deriv(ac, alpha, loc.upper, x, prec));
        case LocateKind::unresolved: break;
    }
    Interval d(1L, prec);
    SlabBracket br = slab_bracket(ac.series(), x, prec);
    if (br.lower) d = hull(d, ratio_envelope(ac, alpha, *br.lower, prec));
    if (br.upper) d = hull(d, ratio_envelope(ac, alpha, *br.upper, prec));
    return d;
}

namespace {

template <typename F>
Enclosure refine_point(const ActionContext& ac, const Enclosure& x, const Rational& tol, F&& eval) {
    if (tol <= 0) throw DomainError("action: tol must be positive");
    Enclosure out;
    for (mpfr_prec_t prec = bits_for_tol(tol) + 16; prec <= 4096; prec *= 2) {
        if (x.hi() < -tol || ac.total_at(prec).to_enclosure().hi() + tol < x.lo())
            throw DomainError("action: x outside [0, S_K]");
        out = eval(Interval(x, prec), prec);
        if (!x.is_point() || out.width() <= tol) return out;
    }
    return out;
}

}  // namespace

Enclosure g_apply(const ActionContext& ac, const UnipotentMatrix& alpha, const Enclosure& x,
                  const Rational& tol) {
    return refine_point(ac, x, tol, [&](const Interval& xi, mpfr_prec_t prec) {
        return g_apply_at(ac, alpha, xi, prec).to_enclosure();
    });
}

Enclosure g_deriv(const ActionContext& ac, const UnipotentMatrix& alpha, const Enclosure& x,
                  const Rational& tol) {
    return refine_point(ac, x, tol, [&](const Interval& xi, mpfr_prec_t prec) {
        return g_deriv_at(ac, alpha, xi, prec).to_enclosure();
    });
}

namespace {

Enclosure reduce_unit(const Enclosure& x, UnitMode mode) {
    if (mode == UnitMode::interval) {
        if (x.lo() < 0 || x.hi() > 1) throw DomainError("unit_action: x outside [0, 1]");
        return x;
    }
    Integer f;
    mpz_fdiv_q(f.get_mpz_t(), x.lo().get_num_mpz_t(), x.lo().get_den_mpz_t());
    Enclosure r = x - Enclosure(Rational(f));
    if (r.hi() > 1) throw DomainError("unit_action: circle input straddles an integer");
    return r;
}

}  // namespace

Enclosure unit_action(const ActionContext& ac, const UnipotentMatrix& alpha, const Enclosure& x,
                      const Rational& tol, UnitMode mode) {
    check_dim(ac, alpha);
    Enclosure u = reduce_unit(x, mode);
    if (u.is_point() && (u.lo() == 0 || u.lo() == 1)) return u;
    Enclosure out;
    for (mpfr_prec_t prec = bits_for_tol(tol) + 16; prec <= 4096; prec *= 2) {
        Interval S = ac.total_at(prec);
        Interval g = g_apply_at(ac, alpha, S * Interval(u, prec), prec);
        out = intersect(g / S, Interval(Rational(0), Rational(1), prec)).to_enclosure();
        if (!u.is_point() || out.width() <= tol) return out;
    }
    return out;
}

Enclosure unit_deriv(const ActionContext& ac, const UnipotentMatrix& alpha, const Enclosure& x,
                     const Rational& tol) {
    check_dim(ac, alpha);
    Enclosure u = reduce_unit(x, UnitMode::interval);
    Enclosure out;
    for (mpfr_prec_t prec = bits_for_tol(tol) + 16; prec <= 4096; prec *= 2) {
        Interval S = ac.total_at(prec);
        out = g_deriv_at(ac, alpha, S * Interval(u, prec), prec).to_enclosure();
        if (!u.is_point() || out.width() <= tol) return out;
    }
    return out;
}

// ---------------------------------------------------------------------------

namespace {

Rational halton2(std::uint64_t index) {
    Rational r = 0, f(1, 2);
    while (index > 0) {
        if (index & 1) r += f;
        f /= 2;
        index >>= 1;
    }
    return r;
}

void box_points(int n, int box, std::vector<long>& cur, std::vector<LatticePoint>& out) {
    if (static_cast<int>(cur.size()) == n) {
        std::vector<Integer> c(cur.begin(), cur.end());
        out.emplace_back(std::move(c));
        return;
    }
    for (long v = -box; v <= box; ++v) {
        cur.push_back(v);
        box_points(n, box, cur, out);
        cur.pop_back();
    }
}

double deviation(const Interval& d) {
    double lo = std::abs(d.lo().to_double() - 1.0);
    double hi = std::abs(d.hi().to_double() - 1.0);
    return std::max(lo, hi);
}

}  // namespace

namespace {

double sampled_deviation_uncached(const ActionContext& ac, const std::vector<UnipotentMatrix>& gens,
                                  const SamplerSpec& sampler) {
    const mpfr_prec_t prec = 96;
    std::vector<Interval> xs;
    // Halton points over the slab |q_1| <= box, where the tiles are large.
    const long box = std::max(sampler.box, 0);
    Interval lo = prefix_mass_at(ac.series(), {Integer(-box)}, prec);
    Interval hi = prefix_mass_at(ac.series(), {Integer(box + 1)}, prec);
    // Each Halton point also contributes the midpoint of its tile, where
    // |g' - 1| peaks.
    for (int i = 0; i < sampler.halton_points; ++i) {
        Interval x = lo + (hi - lo) * Interval(halton2(sampler.seed + i + 1), prec);
        xs.push_back(x);
        LocateResult loc = locate_at(ac.series(), x, prec);
        if (loc.is_interior()) {
            Rational half_len = 1 / (2 * b_value(ac.series(), loc.q));
            xs.push_back(downset_mass_at(ac.series(), loc.q, prec) + Interval(half_len, prec));
        }
    }
    std::vector<LatticePoint> tiles;
    std::vector<long> cur;
    if (sampler.box >= 0) box_points(ac.dim(), sampler.box, cur, tiles);
    for (const auto& q : tiles) {
        Interval left = downset_mass_at(ac.series(), q, prec);
        Interval right = downset_mass_at(ac.series(), lex_successor(q), prec);
        xs.push_back(left);
        xs.push_back(right);
        xs.push_back((left + right) / Interval(2L, prec));
    }
    double sup = 0;
    for (const auto& g : gens)
        for (const auto& x : xs) sup = std::max(sup, deviation(g_deriv_at(ac, g, x, prec)));
    return sup;
}

}  // namespace

double sampled_deviation(const ActionContext& ac, const std::vector<UnipotentMatrix>& gens,
                         const SamplerSpec& sampler) {
    static std::mutex mu;
    static std::map<std::string, double> memo;
    std::string key = std::to_string(ac.dim()) + "|" + ac.K().get_str() + "|" +
                      std::to_string(ac.series().budget()) + "|" +
                      std::to_string(sampler.halton_points) + "|" + std::to_string(sampler.box) +
                      "|" + std::to_string(sampler.seed);
    std::vector<std::string> names;
    for (const auto& g : gens) names.push_back(g.to_string());
    std::sort(names.begin(), names.end());
    for (const auto& name : names) key += "|" + name;
    {
        std::lock_guard lock(mu);
        if (auto it = memo.find(key); it != memo.end()) return it->second;
    }
    double v = sampled_deviation_uncached(ac, gens, sampler);
    std::lock_guard lock(mu);
    memo.emplace(key, v);
    return v;
}

Calibration calibrate_K(int n, const std::vector<UnipotentMatrix>& gens, double eps,
                        const SamplerSpec& sampler, int max_doublings) {
    if (!(eps > 0)) throw DomainError("calibrate_K: eps must be positive");
    Rational K = 1;
    for (int step = 0; step <= max_doublings; ++step, K *= 2) {
        ActionContext ac(n, K);
        double sup = sampled_deviation(ac, gens, sampler);
        if (sup < eps) return {K, sup, step};
    }
    throw BudgetExhausted("calibrate_K: no K found within the doubling cap");
}

// ---------------------------------------------------------------------------

AbstractWord AbstractWord::parse(const std::string& text) {
    AbstractWord w;
    for (char c : text) {
        if (std::isspace(static_cast<unsigned char>(c))) continue;
        if (!std::isalpha(static_cast<unsigned char>(c))) throw ParseError(std::string("bad letter: ") + c);
        bool inv = std::isupper(static_cast<unsigned char>(c));
        w.letters.emplace_back(static_cast<char>(std::tolower(static_cast<unsigned char>(c))), inv ? -1 : 1);
    }
    return w;
}

std::string AbstractWord::to_string() const {
    std::string out;
    for (const auto& [c, e] : letters) {
        if (!out.empty()) out += ' ';
        out += e > 0 ? c : static_cast<char>(std::toupper(static_cast<unsigned char>(c)));
    }
    return out;
}

const GlueBlock* GluedAction::block(int m) const {
    for (const auto& b : blocks)
        if (b.m == m) return &b;
    return nullptr;
}

UnipotentMatrix GluedAction::image(const GlueBlock& b, const AbstractWord& w) const {
    GroupWord out;
    for (const auto& [c, e] : w.letters) {
        auto it = b.images.find(c);
        if (it == b.images.end()) throw DomainError(std::string("no image for generator ") + c);
        out = out * (e > 0 ? it->second : it->second.inverse());
    }
    return word_eval(out, b.n);
}

GluedAction GluedAction::from_json(const std::string& text, const SamplerSpec& sampler) {
    using nlohmann::json;
    json j;
    try {
        j = json::parse(text);
    } catch (const json::exception& e) {
        throw ParseError(std::string("glue config: ") + e.what());
    }
    GluedAction g;
    try {
        for (const auto& jb : j.at("blocks")) {
            GlueBlock b;
            b.m = jb.at("m").get<int>();
            b.n = jb.value("n", 3);
            if (b.m < 1) throw ParseError("glue config: m must be >= 1");
            if (g.block(b.m)) throw ParseError("glue config: duplicate block");
            for (const auto& [name, word] : jb.at("images").items()) {
                if (name.size() != 1 || !std::islower(static_cast<unsigned char>(name[0])))
                    throw ParseError("glue config: generator names are single lowercase letters");
                GroupWord w = GroupWord::parse(word.get<std::string>());
                if (w.max_generator() >= b.n) throw ParseError("glue config: image outside N_n");
                b.images[name[0]] = w;
            }
            std::vector<UnipotentMatrix> gens;
            for (const auto& [c, w] : b.images) gens.push_back(word_eval(w, b.n));
            const double bound = std::ldexp(1.0, -b.m);
            const json& jk = jb.at("K");
            if (jk.is_string() && jk.get<std::string>() == "auto") {
                Calibration cal = calibrate_K(b.n, gens, bound, sampler);
                b.K = cal.K;
                b.sampled_sup = cal.achieved_sup;
            } else {
                b.K = jk.is_number_integer() ? Rational(jk.get<long>())
                                              : parse_rational(jk.get<std::string>());
                b.sampled_sup = sampled_deviation(ActionContext(b.n, b.K), gens, sampler);
            }
            g.blocks.push_back(std::move(b));
        }
        if (j.contains("witnesses"))
            for (const auto& jw : j.at("witnesses"))
                g.witnesses.push_back({AbstractWord::parse(jw.at("word").get<std::string>()),
                                       jw.at("block").get<int>()});
    } catch (const json::exception& e) {
        throw ParseError(std::string("glue config: ") + e.what());
    }
    std::sort(g.blocks.begin(), g.blocks.end(),
              [](const GlueBlock& a, const GlueBlock& b) { return a.m < b.m; });
    return g;
}

namespace {

Enclosure apply_in_block(const GluedAction& g, int m, const AbstractWord& w, const Enclosure& x,
                         const Rational& tol) {
    const GlueBlock* b = g.block(m);
    if (!b) return x;
    const Rational left(1, m + 1);
    const Rational scale(m * (m + 1));
    Enclosure u = (x - Enclosure(left)) * Enclosure(scale);
    u = intersect(u, Enclosure(Rational(0), Rational(1)));
    ActionContext ac(b->n, b->K);
    Enclosure y = unit_action(ac, g.image(*b, w), u, tol * scale);
    return Enclosure(left) + y / Enclosure(scale);
}

long block_of(const Rational& x) {
    // m with x in (1/(m+1), 1/m]
    Integer f;
    Rational inv = 1 / x;
    mpz_fdiv_q(f.get_mpz_t(), inv.get_num_mpz_t(), inv.get_den_mpz_t());
    return f.get_si();
}

}  // namespace

Enclosure glue_residual(const GluedAction& g, const AbstractWord& w, const Enclosure& x,
                        const Rational& tol) {
    if (x.lo() < 0 || x.hi() > 1) throw DomainError("glue_residual: x outside [0, 1]");
    if (x.hi() == 0) return x;
    if (x.lo() <= 0) throw DomainError("glue_residual: cannot resolve a block near 0");
    long m_hi = block_of(x.lo());  // larger m, nearer 0
    long m_lo = block_of(x.hi());
    if (m_lo == m_hi) {
        // x.hi == 1/m exactly sits on the right end of block m.
        return apply_in_block(g, static_cast<int>(m_lo), w, x, tol);
    }
    if (m_hi - m_lo == 1) {
        // x straddles the shared endpoint 1/m_hi, which every block fixes.
        Rational cut(1, m_hi);
        Enclosure left = apply_in_block(g, static_cast<int>(m_hi), w, Enclosure(x.lo(), cut), tol);
        Enclosure right = apply_in_block(g, static_cast<int>(m_lo), w, Enclosure(cut, x.hi()), tol);
        return hull(left, right);
    }
    throw DomainError("glue_residual: x spans several blocks");
}

}  // namespace nilflow
