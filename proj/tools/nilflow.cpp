// Command-line front end. Exit codes: 0 ok, 1 verification failed, 2 usage error,
// 3 runtime failure (budget exhausted and similar).

#include <fstream>
#include <iostream>
#include <sstream>

#include "CLI11.hpp"
#include "json.hpp"
#include "nilflow/acceptance.hpp"
#include "nilflow/dynamics.hpp"
#include "nilflow/errors.hpp"
#include "nilflow/lattice_series.hpp"
#include "nilflow/nilaction.hpp"
#include "nilflow/plmaps.hpp"
#include "nilflow/staircase.hpp"
#include "nilflow/tiling.hpp"
#include "nilflow/unipotent.hpp"
#include "nilflow/yoccoz.hpp"

using namespace nilflow;
using Json = nlohmann::ordered_json;

namespace {

struct Options {
    int n = 2;
    std::string K = "1";
    std::string tol = "1e-12";
    std::uint64_t seed = 0;
    long box = 2;
    double eps = 0.1;
    int depth = 6;
    int tiles = 10;
    int generator = 1;
    int samples = 200;
    int halton = 500;
    std::string measure = "integers";
    std::string words;
    std::string out;
    std::string word;
    std::string x = "0";
    std::string a = "1", b = "2";
    std::string mode = "recursive";
    std::string config;
    std::string map, other;
    bool unit = false;
    bool quick = false;
};

Rational parse_tol(const std::string& text) {
    Rational tol;
    auto e = text.find_first_of("eE");
    if (e != std::string::npos) {
        // 1e-12 style
        Rational mant = parse_rational(text.substr(0, e));
        long exp = std::stol(text.substr(e + 1));
        tol = mant;
        for (long i = 0; i < std::abs(exp); ++i) tol = exp < 0 ? Rational(tol / 10) : Rational(tol * 10);
    } else {
        tol = parse_rational(text);
    }
    if (tol <= 0) throw ParseError("--tol must be positive");
    return tol;
}

Json enclosure_json(const Enclosure& e) {
    Json j;
    j["lo"] = e.lo().get_str();
    j["hi"] = e.hi().get_str();
    j["decimal"] = to_decimal(e.midpoint());
    return j;
}

void emit(const Options& o, const std::string& text) {
    if (o.out.empty()) {
        std::cout << text;
        return;
    }
    std::ofstream f(o.out);
    if (!f) throw DomainError("cannot write " + o.out);
    f << text;
}

std::string slurp(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ParseError("cannot read " + path);
    std::stringstream s;
    s << in.rdbuf();
    return s.str();
}

int tile_table(const Options& o) {
    SeriesContext ctx(o.n, parse_rational(o.K));
    Rational tol = parse_tol(o.tol);
    std::ostringstream os;
    os << "q,left_lo,left_hi,length,left_decimal,length_decimal\n";
    std::vector<Integer> cur(o.n, Integer(-o.box));
    while (true) {
        LatticePoint q(cur);
        Tile t = tile_interval(ctx, q, tol);
        os << '"' << q.to_string() << "\"," << t.left.lo() << ',' << t.left.hi() << ',' << t.length << ','
           << to_decimal(t.left.midpoint()) << ',' << to_decimal(t.length) << '\n';
        int i = o.n - 1;
        while (i >= 0 && cur[i] == o.box) cur[i--] = -o.box;
        if (i < 0) break;
        ++cur[i];
    }
    emit(o, os.str());
    return 0;
}

int act(const Options& o, bool deriv) {
    ActionContext ac(o.n, parse_rational(o.K), parse_tol(o.tol));
    GroupWord w = GroupWord::parse(o.word);
    if (w.max_generator() >= o.n) throw ParseError("word uses a generator outside N_n");
    UnipotentMatrix m = word_eval(w, o.n);
    Enclosure x(parse_rational(o.x));
    Enclosure y = o.unit ? (deriv ? unit_deriv(ac, m, x, ac.tol()) : unit_action(ac, m, x, ac.tol()))
                         : (deriv ? g_deriv(ac, m, x, ac.tol()) : g_apply(ac, m, x, ac.tol()));
    Json j;
    j["n"] = o.n;
    j["K"] = ac.K().get_str();
    j["word"] = w.to_string();
    j["x"] = x.lo().get_str();
    j[deriv ? "derivative" : "value"] = enclosure_json(y);
    emit(o, j.dump(2) + "\n");
    return 0;
}

int calibrate(const Options& o) {
    std::vector<UnipotentMatrix> gens;
    for (int i = 1; i < o.n; ++i) gens.push_back(UnipotentMatrix::generator(o.n, i));
    Calibration c = calibrate_K(o.n, gens, o.eps, SamplerSpec{o.halton, o.box, o.seed});
    Json j;
    j["n"] = o.n;
    j["eps"] = o.eps;
    j["K"] = c.K.get_str();
    j["achieved_sup"] = c.achieved_sup;
    j["steps"] = c.steps;
    emit(o, j.dump(2) + "\n");
    return c.achieved_sup < o.eps ? 0 : 1;
}

int phi_profile(const Options& o) {
    PhiParams p(parse_rational(o.a), parse_rational(o.b));
    Rational tol = parse_tol(o.tol);
    std::ostringstream os;
    os << "x,phi_lo,phi_hi,deriv_lo,deriv_hi,phi_decimal,deriv_decimal\n";
    for (int i = 0; i <= o.samples; ++i) {
        Rational x = p.a * Rational(i, o.samples);
        x.canonicalize();
        Enclosure v = phi_apply(p, Enclosure(x), tol), d = phi_deriv(p, Enclosure(x), tol);
        os << x << ',' << v.lo() << ',' << v.hi() << ',' << d.lo() << ',' << d.hi() << ','
           << to_decimal(v.midpoint()) << ',' << to_decimal(d.midpoint()) << '\n';
    }
    emit(o, os.str());
    return 0;
}

StairMode stair_mode(const std::string& s) {
    if (s == "recursive") return StairMode::recursive;
    if (s == "table") return StairMode::exponent_table;
    throw ParseError("--mode must be recursive or table");
}

int staircase_eval(const Options& o) {
    StaircaseElement e = StaircaseElement::parse(o.word, stair_mode(o.mode));
    Enclosure y = stair_apply(e, parse_rational(o.x), parse_tol(o.tol));
    Json j;
    j["word"] = e.to_string();
    j["x"] = parse_rational(o.x).get_str();
    j["value"] = enclosure_json(y);
    emit(o, j.dump(2) + "\n");
    return 0;
}

int staircase_verify(const Options& o) {
    WitnessReport r = nilpotency_witness(o.depth, parse_tol(o.tol), o.samples, stair_mode(o.mode));
    emit(o, r.to_json() + "\n");
    return r.ok() ? 0 : 1;
}

int glue_eval(const Options& o) {
    GluedAction g = GluedAction::from_json(slurp(o.config.empty() ? default_glue_config() : o.config),
                                           SamplerSpec{o.halton, o.box, o.seed});
    AbstractWord w = AbstractWord::parse(o.word);
    Enclosure x(parse_rational(o.x));
    Enclosure y = glue_residual(g, w, x, parse_tol(o.tol));
    Json j;
    Json blocks = Json::array();
    for (const auto& b : g.blocks) blocks.push_back({{"m", b.m}, {"K", b.K.get_str()}, {"sampled_sup", b.sampled_sup}});
    j["blocks"] = blocks;
    j["word"] = w.to_string();
    j["x"] = x.lo().get_str();
    j["value"] = enclosure_json(y);
    emit(o, j.dump(2) + "\n");
    return 0;
}

int tau(const Options& o) {
    std::vector<StaircaseElement> words;
    if (o.words.empty()) {
        for (const char* w : {"f", "h1", "f h1", "h2", "F F h3", "f h0 h2", "h4 f", "F", "H2 h1", "f f F"})
            words.push_back(StaircaseElement::parse(w));
    } else {
        std::istringstream in(slurp(o.words));
        std::string line;
        while (std::getline(in, line))
            if (line.find_first_not_of(" \t\r") != std::string::npos && line[0] != '#')
                words.push_back(StaircaseElement::parse(line));
    }
    TauReport r = tau_report(words, AtomicMeasure::parse(o.measure), parse_tol(o.tol));
    emit(o, r.to_csv());
    return r.ok() ? 0 : 1;
}

int distortion(const Options& o) {
    ActionContext ac(o.n, parse_rational(o.K), parse_tol(o.tol));
    if (o.generator < 0 || o.generator >= o.n) throw ParseError("--generator must be in 0..n-1 (0 = identity)");
    UnipotentMatrix m = o.generator == 0 ? UnipotentMatrix::identity(o.n) : UnipotentMatrix::generator(o.n, o.generator);
    emit(o, distortion_csv(distortion_probe(ac, m, o.depth, o.tiles)));
    return 0;
}

int pl_info(const Options& o) {
    PLHomeo f = PLHomeo::parse(o.map);
    Json j;
    auto [d0, d1] = endpoint_character(f);
    j["map"] = f.to_string();
    j["inverse"] = pl_inverse(f).to_string();
    j["character"] = {d0.get_str(), d1.get_str()};
    Json fixed = Json::array();
    for (const auto& c : pl_fixed_points(f)) fixed.push_back(c.to_string());
    j["fixed_points"] = fixed;
    if (!o.other.empty()) {
        PLHomeo g = PLHomeo::parse(o.other);
        j["compose"] = pl_compose(f, g).to_string();
        j["commutator"] = pl_commutator(f, g).to_string();
    }
    emit(o, j.dump(2) + "\n");
    return 0;
}

int verify_all(const Options& o) {
    AcceptanceOptions opts;
    opts.quick = o.quick;
    opts.seed = o.seed;
    opts.glue_config = o.config;
    int failed = 0;
    run_acceptance(opts, [&](const CriterionResult& r) {
        std::cout << r.line() << std::endl;
        failed += !r.pass;
    });
    std::cout << (failed ? "FAILED: " : "all criteria passed") << (failed ? std::to_string(failed) : "") << std::endl;
    return failed ? 1 : 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"nilflow: lattice actions of unipotent groups on the line"};
    app.require_subcommand(1);
    Options o;
    auto sub = [&](const std::string& name, const std::string& help) { return app.add_subcommand(name, help); };

    auto* tt = sub("tile-table", "CSV of tiles with |q_i| <= box");
    tt->add_option("--n", o.n)->check(CLI::Range(1, kMaxSeriesDim));
    tt->add_option("--K", o.K);
    tt->add_option("--box", o.box)->check(CLI::Range(0L, 50L));
    tt->add_option("--tol", o.tol);
    tt->add_option("--out", o.out);

    CLI::App* ev[2];
    for (int d = 0; d < 2; ++d) {
        ev[d] = sub(d ? "act-deriv" : "act-eval", d ? "derivative of the action of a word" : "action of a word");
        ev[d]->add_option("--n", o.n)->check(CLI::Range(1, kMaxSeriesDim));
        ev[d]->add_option("--K", o.K);
        ev[d]->add_option("--word", o.word, "e.g. \"s1 S2\"")->required();
        ev[d]->add_option("--x", o.x);
        ev[d]->add_option("--tol", o.tol);
        ev[d]->add_flag("--unit", o.unit, "rescaled action on [0,1]");
        ev[d]->add_option("--out", o.out);
    }

    auto* cal = sub("calibrate", "smallest doubling K with sampled sup |g_i' - 1| < eps");
    cal->add_option("--n", o.n)->check(CLI::Range(2, kMaxSeriesDim));
    cal->add_option("--eps", o.eps)->check(CLI::PositiveNumber);
    cal->add_option("--box", o.box);
    cal->add_option("--seed", o.seed);
    cal->add_option("--samples", o.halton, "Halton points");
    cal->add_option("--out", o.out);

    auto* pp = sub("phi-profile", "samples of phi_{a,b} and its derivative");
    pp->add_option("--a", o.a);
    pp->add_option("--b", o.b);
    pp->add_option("--samples", o.samples)->check(CLI::Range(1, 1000000));
    pp->add_option("--tol", o.tol);
    pp->add_option("--out", o.out);

    auto* se = sub("staircase-eval", "evaluate a staircase word at x");
    se->add_option("--word", o.word, "e.g. \"f h2 H1\"")->required();
    se->add_option("--x", o.x);
    se->add_option("--tol", o.tol);
    se->add_option("--mode", o.mode, "recursive or table");
    se->add_option("--out", o.out);

    auto* sv = sub("staircase-verify", "check the staircase group relations");
    sv->add_option("--degree,--depth", o.depth)->check(CLI::Range(0, kMaxStairDepth));
    sv->add_option("--samples", o.samples)->check(CLI::Range(1, 1000000));
    sv->add_option("--tol", o.tol);
    sv->add_option("--mode", o.mode);
    sv->add_option("--out", o.out);

    auto* ge = sub("glue-eval", "evaluate the block-glued free group action");
    ge->add_option("--config", o.config);
    ge->add_option("--word", o.word, "e.g. \"a b A B\"")->required();
    ge->add_option("--x", o.x);
    ge->add_option("--tol", o.tol);
    ge->add_option("--seed", o.seed);
    ge->add_option("--out", o.out);

    auto* ta = sub("tau", "translation numbers and fixed points of staircase words");
    ta->add_option("--measure", o.measure, "integers or integers:LO:HI");
    ta->add_option("--words", o.words, "file with one word per line");
    ta->add_option("--tol", o.tol);
    ta->add_option("--out", o.out);

    auto* di = sub("distortion", "Lipschitz estimates of log g' along tiles (1,..,1,k)");
    di->add_option("--n", o.n)->check(CLI::Range(1, kMaxSeriesDim));
    di->add_option("--K", o.K);
    di->add_option("--generator", o.generator, "generator index, 0 for the identity");
    di->add_option("--depth", o.depth)->check(CLI::Range(1, 20));
    di->add_option("--tiles", o.tiles)->check(CLI::Range(1, 100000));
    di->add_option("--tol", o.tol);
    di->add_option("--out", o.out);

    auto* pl = sub("pl-info", "inverse, endpoint slopes and fixed points of a PL map");
    pl->add_option("--map", o.map, "\"bp: 1/2; slopes: 1/2, 3/2\"")->required();
    pl->add_option("--with", o.other, "second map for composition and commutator");
    pl->add_option("--out", o.out);

    auto* va = sub("verify-all", "run the acceptance suite");
    va->add_flag("--quick", o.quick);
    va->add_option("--seed", o.seed);
    va->add_option("--config", o.config);

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return 2;
    }

    try {
        if (*tt) return tile_table(o);
        if (*ev[0]) return act(o, false);
        if (*ev[1]) return act(o, true);
        if (*cal) return calibrate(o);
        if (*pp) return phi_profile(o);
        if (*se) return staircase_eval(o);
        if (*sv) return staircase_verify(o);
        if (*ge) return glue_eval(o);
        if (*ta) return tau(o);
        if (*di) return distortion(o);
        if (*pl) return pl_info(o);
        if (*va) return verify_all(o);
    } catch (const ParseError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const DimensionError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const DomainError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 3;
    }
    return 2;
}
