#include "nilflow/acceptance.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <fstream>
#include <sstream>

#include "nilflow/dynamics.hpp"
#include "nilflow/errors.hpp"
#include "nilflow/lattice_series.hpp"
#include "nilflow/nilaction.hpp"
#include "nilflow/plmaps.hpp"
#include "nilflow/staircase.hpp"
#include "nilflow/tiling.hpp"
#include "nilflow/unipotent.hpp"
#include "nilflow/yoccoz.hpp"

#ifndef NILFLOW_CONFIG_DIR
#define NILFLOW_CONFIG_DIR "configs"
#endif

namespace nilflow {

std::string CriterionResult::line() const {
    std::ostringstream os;
    os.setf(std::ios::fixed);
    os.precision(1);
    os << (pass ? "PASS" : "FAIL") << ' ' << (id < 10 ? " " : "") << id << ' ' << name << ": "
       << detail << " (" << seconds << " s)";
    return os.str();
}

std::string default_glue_config() { return std::string(NILFLOW_CONFIG_DIR) + "/glue_demo.json"; }

Rational random_rational(std::mt19937_64& rng, const Rational& lo, const Rational& hi, long den) {
    Rational q(static_cast<long>(rng() % static_cast<std::uint64_t>(den + 1)), den);
    q.canonicalize();
    return lo + (hi - lo) * q;
}

namespace {

Rational pow10(int e) {
    Rational q(1);
    for (int i = 0; i < e; ++i) q /= 10;
    return q;
}

std::string sci(const Rational& q) {
    std::ostringstream os;
    os.precision(3);
    os << q.get_d();
    return os.str();
}

std::string sci(double v) {
    std::ostringstream os;
    os.precision(3);
    os << v;
    return os.str();
}

GroupWord random_word(std::mt19937_64& rng, int generators, int max_len) {
    std::vector<Letter> letters;
    int len = 1 + static_cast<int>(rng() % max_len);
    for (int i = 0; i < len; ++i)
        letters.push_back({1 + static_cast<int>(rng() % generators), rng() % 2 ? 1 : -1});
    return GroupWord(letters);
}

// 1. phi_{b,c} o phi_{a,b} = phi_{a,c}
CriterionResult phi_cocycle(const AcceptanceOptions& o) {
    std::mt19937_64 rng(o.seed + 1);
    const int triples = o.quick ? 50 : 500;
    const Rational tol = pow10(12), lo(1, 10), hi(10);
    Rational worst = 0;
    int bad = 0;
    for (int t = 0; t < triples; ++t) {
        Rational a = random_rational(rng, lo, hi, 9990), b = random_rational(rng, lo, hi, 9990),
                 c = random_rational(rng, lo, hi, 9990);
        PhiParams ab(a, b), bc(b, c), ac(a, c);
        for (int i = 0; i < 5; ++i) {
            Enclosure x(random_rational(rng, Rational(0), a, 1000));
            Enclosure d = phi_apply(bc, phi_apply(ab, x, tol), tol) - phi_apply(ac, x, tol);
            worst = std::max(worst, d.width());
            if (!d.contains_zero() || d.width() > pow10(9)) ++bad;
        }
    }
    return {1, "phi cocycle", bad == 0,
            std::to_string(triples * 5) + " samples, " + std::to_string(bad) + " failures, max width " +
                sci(worst)};
}

// 2. phi' inside [min(1,b^2/a^2), max(1,b^2/a^2)] and |phi' - 1| <= |b^2/a^2 - 1|
CriterionResult phi_envelope(const AcceptanceOptions& o) {
    std::mt19937_64 rng(o.seed + 2);
    const int pairs = o.quick ? 20 : 200;
    const Rational tol = pow10(14), slack = pow10(12), lo(1, 10), hi(10);
    int bad = 0;
    for (int t = 0; t < pairs; ++t) {
        Rational a = random_rational(rng, lo, hi, 9990), b = random_rational(rng, lo, hi, 9990);
        PhiParams p(a, b);
        Rational r = b * b / (a * a);
        Rational env_lo = std::min(Rational(1), r) - slack, env_hi = std::max(Rational(1), r) + slack;
        Rational bound = abs(r - 1) + slack, sup = 0;
        for (int i = 0; i < 50; ++i) {
            Enclosure d = phi_deriv(p, Enclosure(random_rational(rng, Rational(0), a, 1000)), tol);
            if (d.lo() < env_lo || d.hi() > env_hi) ++bad;
            sup = std::max({sup, Rational(abs(d.lo() - 1)), Rational(abs(d.hi() - 1))});
        }
        if (sup > bound) ++bad;
    }
    return {2, "phi' envelope", bad == 0,
            std::to_string(pairs) + " parameter pairs x 50 samples, " + std::to_string(bad) + " violations"};
}

// Sum of 1/(1 + q1^4 + q2^2) over |q| <= box plus an integral-approximated tail.
double brute_force_n2(long box) {
    const double pi = std::acos(-1.0);
    long double sum = 0;
    for (long a = -box; a <= box; ++a) {
        const double c = 1.0 + std::pow(double(a), 4);
        long double row = 0;
        for (long b = box; b >= 1; --b) row += 2.0L / (c + double(b) * double(b));
        sum += row + 1.0L / c;
        // |q2| > box
        const double s = std::sqrt(c);
        sum += 2.0 * (pi / 2 - std::atan((box + 0.5) / s)) / s;
    }
    // |q1| > box: each full row sums to ~ pi / sqrt(1 + q1^4) ~ pi / q1^2
    sum += 2.0 * pi / (box + 0.5);
    return static_cast<double>(sum);
}

// 3. summation oracles
CriterionResult summation_oracle(const AcceptanceOptions&) {
    const Rational tol = pow10(10);
    std::string detail;
    bool pass = true;
    for (long K : {1L, 4L, 9L}) {
        SeriesContext ctx(1, Rational(K));
        Enclosure s = total_mass(ctx, tol);
        const mpfr_prec_t prec = 256;
        Interval rk = sqrt(Interval(Rational(K), prec));
        Interval pik = pi_interval(prec) * rk;
        Enclosure closed = (pi_interval(prec) / rk * coth(pik)).to_enclosure();
        bool ok = s.width() <= tol && s.contains(closed.midpoint());
        pass = pass && ok;
        detail += "n=1 K=" + std::to_string(K) + (ok ? " ok; " : " MISMATCH; ");
    }
    SeriesContext ctx2(2, Rational(1));
    Enclosure s2 = total_mass(ctx2, tol);
    double brute = brute_force_n2(2000);
    double diff = std::abs(s2.midpoint().get_d() - brute);
    bool ok2 = diff <= 1e-6;
    pass = pass && ok2;
    detail += "n=2 K=1 brute-force gap " + sci(diff);
    return {3, "summation oracle", pass, detail};
}

// 4. downset_mass(succ r) - downset_mass(r) = 1/B_K(r)
CriterionResult tile_length(const AcceptanceOptions& o) {
    std::mt19937_64 rng(o.seed + 4);
    const Rational tol = pow10(11);
    const int points = o.quick ? 10 : 50;
    int bad = 0, total = 0;
    Rational worst = 0;
    for (int n : {2, 3}) {
        SeriesContext ctx(n, Rational(10));
        for (int i = 0; i < points; ++i) {
            std::vector<Integer> c;
            for (int j = 0; j < n; ++j) c.push_back(Integer(static_cast<long>(rng() % 11) - 5));
            LatticePoint r(c);
            Enclosure d = downset_mass(ctx, lex_successor(r), tol) - downset_mass(ctx, r, tol);
            Rational len = 1 / b_value(ctx, r);
            worst = std::max(worst, d.width());
            ++total;
            if (!d.contains(len) || d.width() > pow10(9)) ++bad;
        }
    }
    return {4, "tile length identity", bad == 0,
            std::to_string(total) + " points, " + std::to_string(bad) + " failures, max width " + sci(worst)};
}

void box_points(int n, long box, std::vector<Integer>& cur, std::vector<LatticePoint>& out) {
    if (static_cast<int>(cur.size()) == n) {
        out.emplace_back(cur);
        return;
    }
    for (long v = -box; v <= box; ++v) {
        cur.push_back(Integer(v));
        box_points(n, box, cur, out);
        cur.pop_back();
    }
}

std::vector<LatticePoint> box_points(int n, long box) {
    std::vector<LatticePoint> out;
    std::vector<Integer> cur;
    box_points(n, box, cur, out);
    return out;
}

// 5. locate(tile midpoint) = interior(q)
CriterionResult locate_roundtrip(const AcceptanceOptions& o) {
    const Rational tol = pow10(12);
    int total = 0, hits = 0;
    for (int n : {2, 3}) {
        SeriesContext ctx(n, Rational(1));
        for (const auto& q : box_points(n, o.quick && n == 3 ? 1 : 3)) {
            Tile t = tile_interval(ctx, q, tol);
            LocateResult r = locate(ctx, Enclosure(t.left.midpoint() + t.length / 2), tol);
            ++total;
            if (r.is_interior() && r.q == q) ++hits;
        }
    }
    return {5, "locate roundtrip", hits == total, std::to_string(hits) + "/" + std::to_string(total) + " tiles"};
}

// 6. g_{AB} = g_A o g_B
CriterionResult homomorphism(const AcceptanceOptions& o) {
    std::mt19937_64 rng(o.seed + 6);
    const Rational tol = pow10(9);
    ActionContext ac(3, Rational(100));
    const int pairs = o.quick ? 10 : 100, points = o.quick ? 3 : 10;
    Rational lo = prefix_mass(ac.series(), {Integer(-3)}, tol).midpoint();
    Rational hi = prefix_mass(ac.series(), {Integer(4)}, tol).midpoint();
    int bad = 0;
    Rational worst = 0;
    for (int p = 0; p < pairs; ++p) {
        UnipotentMatrix A = word_eval(random_word(rng, 2, 5), 3), B = word_eval(random_word(rng, 2, 5), 3);
        UnipotentMatrix AB = mat_mul(A, B);
        for (int i = 0; i < points; ++i) {
            Enclosure x(random_rational(rng, lo, hi, 1L << 40));
            Enclosure composed = g_apply(ac, A, g_apply(ac, B, x, tol), tol);
            Enclosure product = g_apply(ac, AB, x, tol);
            worst = std::max({worst, composed.width(), product.width()});
            if (!composed.overlaps(product) || composed.width() > pow10(6) || product.width() > pow10(6))
                ++bad;
        }
    }
    return {6, "action homomorphism", bad == 0,
            std::to_string(pairs * points) + " samples, " + std::to_string(bad) + " failures, max width " +
                sci(worst)};
}

// 7. sampled sup |g_i' - 1| nonincreasing in K, and calibrate_K reaches eps
CriterionResult c1_trend(const AcceptanceOptions& o) {
    std::string detail;
    bool pass = true;
    for (int i : {1, 2}) {
        std::vector<UnipotentMatrix> gens{UnipotentMatrix::generator(3, i)};
        double prev = INFINITY;
        detail += "s" + std::to_string(i) + ":";
        for (long K : {10L, 100L, 1000L}) {
            double d = sampled_deviation(ActionContext(3, Rational(K)), gens, SamplerSpec{});
            if (d > prev + 1e-3) pass = false;
            prev = d;
            detail += " " + sci(d);
        }
        detail += "; ";
    }
    const int n = o.quick ? 2 : 3;
    const double eps = o.quick ? 0.5 : 0.1;
    std::vector<UnipotentMatrix> gens;
    for (int i = 1; i < n; ++i) gens.push_back(UnipotentMatrix::generator(n, i));
    Calibration cal = calibrate_K(n, gens, eps, SamplerSpec{});
    pass = pass && cal.achieved_sup < eps;
    detail += "calibrate n=" + std::to_string(n) + " eps=" + sci(eps) + ": K=" + cal.K.get_str() +
              " sup=" + sci(cal.achieved_sup);
    return {7, "C1-closeness trend", pass, detail};
}

// 8. the lattice action preserves the lexicographic order
CriterionResult lex_equivariance(const AcceptanceOptions& o) {
    std::mt19937_64 rng(o.seed + 8);
    std::vector<LatticePoint> pts = box_points(3, o.quick ? 2 : 3);
    std::vector<UnipotentMatrix> mats;
    for (int i = 1; i <= 2; ++i) {
        mats.push_back(UnipotentMatrix::generator(3, i));
        mats.push_back(mat_inverse(mats.back()));
    }
    for (int w = 0; w < 20; ++w) mats.push_back(word_eval(random_word(rng, 2, 8), 3));
    long violations = 0, checked = 0;
    for (const auto& m : mats) {
        std::vector<LatticePoint> img;
        for (const auto& p : pts) img.push_back(apply_to_lattice(m, p));
        for (size_t i = 0; i < pts.size(); ++i)
            for (size_t j = i + 1; j < pts.size(); ++j) {
                ++checked;
                if (lex_compare(pts[i], pts[j]) != lex_compare(img[i], img[j])) ++violations;
            }
    }
    return {8, "lex-order equivariance", violations == 0,
            std::to_string(checked) + " ordered pairs over " + std::to_string(mats.size()) + " elements, " +
                std::to_string(violations) + " violations"};
}

// 9. staircase relations and the exponent table
CriterionResult staircase_relations(const AcceptanceOptions& o) {
    const int samples = o.quick ? 200 : 2000;
    WitnessReport rep = nilpotency_witness(4, pow10(12), samples);
    bool pass = rep.ok();
    double width = 0;
    for (const auto& r : rep.relations) width = std::max(width, r.max_width);
    pass = pass && width <= 1e-9;
    int table_bad = 0;
    for (int k = 1; k <= 5; ++k)
        for (long m = -15; m <= 15; ++m) {
            Integer bin;
            Integer top(m + k - 1);
            mpz_bin_ui(bin.get_mpz_t(), top.get_mpz_t(), k);
            if (exponent_table(k, Integer(m)) != bin) ++table_bad;
        }
    pass = pass && table_bad == 0;
    return {9, "staircase relations", pass,
            std::to_string(rep.relations.size()) + " relations x " + std::to_string(samples) +
                " samples, max width " + sci(width) + "; exponent table mismatches " +
                std::to_string(table_bad)};
}

// 10. endpoint character of PL maps
CriterionResult pl_character(const AcceptanceOptions& o) {
    std::mt19937_64 rng(o.seed + 10);
    int bad = 0;
    for (int i = 0; i < 100; ++i) {
        PLHomeo f = random_pl(rng, 5, 64), g = random_pl(rng, 5, 64);
        auto [f0, f1] = endpoint_character(f);
        auto [g0, g1] = endpoint_character(g);
        auto [h0, h1] = endpoint_character(pl_compose(f, g));
        if (h0 != f0 * g0 || h1 != f1 * g1) ++bad;
        auto [c0, c1] = endpoint_character(pl_commutator(f, g));
        if (c0 != 1 || c1 != 1) ++bad;
    }
    return {10, "PL endpoint character", bad == 0, "100 random pairs, " + std::to_string(bad) + " violations"};
}

std::vector<StaircaseElement> staircase_word_set() {
    std::vector<StaircaseElement> out;
    for (const char* w : {"f", "h1", "f h1", "h2", "F F h3", "f h0 h2", "h4 f", "F", "H2 h1", "f f F"})
        out.push_back(StaircaseElement::parse(w));
    return out;
}

// 11. translation numbers
CriterionResult translation_numbers(const AcceptanceOptions&) {
    const Rational tol = pow10(12);
    const AtomicMeasure mu = AtomicMeasure::integers();
    std::string detail;
    int shift_bad = 0;
    for (const char* w : {"", "h1", "h0 h2", "H3 h1"})
        for (int a = -3; a <= 3; ++a) {
            StaircaseElement e = StaircaseElement::translation(a) * StaircaseElement::parse(w);
            if (translation_number(staircase_map(e), mu, Rational(0), tol) != Enclosure(Rational(-a))) ++shift_bad;
        }
    TauReport rep = tau_report(staircase_word_set(), mu, tol);
    int fix_bad = 0, add_bad = 0, base_bad = 0;
    for (const auto& r : rep.rows) fix_bad += !r.consistent;
    for (const auto& p : rep.pairs) add_bad += !(p.residual == Enclosure(Rational(0)));
    const std::vector<Rational> bases{Rational(0), Rational(5), Rational(-3), Rational(1, 2), Rational(7, 3)};
    for (const auto& w : staircase_word_set()) {
        Enclosure ref = translation_number(staircase_map(w), mu, bases[0], tol);
        for (size_t i = 1; i < bases.size(); ++i)
            if (translation_number(staircase_map(w), mu, bases[i], tol) != ref) ++base_bad;
    }
    bool pass = shift_bad + fix_bad + add_bad + base_bad == 0;
    detail = "shift " + std::to_string(shift_bad) + ", Fix/tau " + std::to_string(fix_bad) + ", additivity " +
             std::to_string(add_bad) + ", basepoint " + std::to_string(base_bad) + " violations";
    return {11, "translation numbers", pass, detail};
}

// 12. residual gluing demo
CriterionResult residual_gluing(const AcceptanceOptions& o) {
    const std::string path = o.glue_config.empty() ? default_glue_config() : o.glue_config;
    std::ifstream in(path);
    if (!in) return {12, "residual gluing", false, "cannot read " + path};
    std::stringstream text;
    text << in.rdbuf();
    SamplerSpec sampler;
    if (o.quick) sampler = SamplerSpec{50, 1, 0};
    GluedAction g = GluedAction::from_json(text.str(), sampler);
    const Rational tol = pow10(12);
    std::string detail;
    bool pass = true;
    for (const auto& b : g.blocks) {
        bool ok = b.sampled_sup <= std::ldexp(1.0, -b.m);
        pass = pass && ok;
        detail += "m=" + std::to_string(b.m) + " K=" + b.K.get_str() + " sup=" + sci(b.sampled_sup) + "; ";
    }
    // Samples sit at midpoints of tiles with |q_i| <= 1, mapped into the block.
    int displaced = 0;
    for (const auto& w : g.witnesses) {
        const GlueBlock* b = g.block(w.block);
        if (!b) continue;
        SeriesContext ctx(b->n, b->K);
        const Rational total = total_mass(ctx, tol).midpoint();
        const Rational left(1, w.block + 1), width(1, w.block * (w.block + 1));
        for (const auto& q : box_points(b->n, 1)) {
            Tile t = tile_interval(ctx, q, tol);
            Enclosure x(left + width * (t.left.midpoint() + t.length / 2) / total);
            Enclosure moved = glue_residual(g, w.word, x, tol) - x;
            if (moved.lo() > 10 * tol || moved.hi() < -10 * tol) {
                ++displaced;
                break;
            }
        }
    }
    pass = pass && displaced == static_cast<int>(g.witnesses.size());
    detail += std::to_string(displaced) + "/" + std::to_string(g.witnesses.size()) + " witnesses displace a sample";
    return {12, "residual gluing", pass, detail};
}

using CriterionFn = CriterionResult (*)(const AcceptanceOptions&);

const std::vector<CriterionFn>& criteria() {
    static const std::vector<CriterionFn> fns{phi_cocycle,      phi_envelope,        summation_oracle,
                                              tile_length,      locate_roundtrip,    homomorphism,
                                              c1_trend,         lex_equivariance,    staircase_relations,
                                              pl_character,     translation_numbers, residual_gluing};
    return fns;
}

}  // namespace

int acceptance_count() { return static_cast<int>(criteria().size()); }

CriterionResult run_criterion(int id, const AcceptanceOptions& opts) {
    if (id < 1 || id > acceptance_count()) throw DomainError("no such criterion: " + std::to_string(id));
    auto t0 = std::chrono::steady_clock::now();
    CriterionResult r;
    try {
        r = criteria()[id - 1](opts);
    } catch (const std::exception& e) {
        r = {id, "criterion " + std::to_string(id), false, std::string("error: ") + e.what()};
    }
    r.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    return r;
}

std::vector<CriterionResult> run_acceptance(const AcceptanceOptions& opts,
                                            const std::function<void(const CriterionResult&)>& report) {
    std::vector<CriterionResult> out;
    for (int id = 1; id <= acceptance_count(); ++id) {
        if (!opts.only.empty() && std::find(opts.only.begin(), opts.only.end(), id) == opts.only.end()) continue;
        out.push_back(run_criterion(id, opts));
        if (report) report(out.back());
    }
    return out;
}

}  // namespace nilflow
