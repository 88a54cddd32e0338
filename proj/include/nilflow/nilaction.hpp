#pragma once

// The action of N_n on [0, S_K]: g_alpha carries tile I_K(q) onto I_K(alpha q)
// through phi_{1/B(q), 1/B(alpha q)}. Also the rescaled action on [0, 1],
// a doubling search for K, and block gluing on [1/(m+1), 1/m].

#include <cstdint>
#include <map>
#include <mutex>
#include <string>
#include <vector>

#include "nilflow/tiling.hpp"
#include "nilflow/yoccoz.hpp"

namespace nilflow {

class ActionContext {
public:
    ActionContext(int n, Rational K, Rational tol = Rational(1, 1000000000000L),
                  long budget = budget_from_env());

    const SeriesContext& series() const { return series_; }
    int dim() const { return series_.dim(); }
    const Rational& K() const { return series_.K(); }
    const Rational& tol() const { return tol_; }

    Interval total_at(mpfr_prec_t prec) const;

private:
    SeriesContext series_;
    Rational tol_;
};

// Interval-level evaluation at a fixed working precision.
Interval g_apply_at(const ActionContext& ac, const UnipotentMatrix& alpha, const Interval& x,
                    mpfr_prec_t prec);
Interval g_deriv_at(const ActionContext& ac, const UnipotentMatrix& alpha, const Interval& x,
                    mpfr_prec_t prec);

/// g_alpha(x). Point inputs get width <= tol; wider inputs are carried through.
Enclosure g_apply(const ActionContext& ac, const UnipotentMatrix& alpha, const Enclosure& x,
                  const Rational& tol);
Enclosure g_deriv(const ActionContext& ac, const UnipotentMatrix& alpha, const Enclosure& x,
                  const Rational& tol);

enum class UnitMode { interval, circle };

/// S_K-rescaled action on [0, 1] (circle mode reads x modulo 1).
Enclosure unit_action(const ActionContext& ac, const UnipotentMatrix& alpha, const Enclosure& x,
                      const Rational& tol, UnitMode mode = UnitMode::interval);
Enclosure unit_deriv(const ActionContext& ac, const UnipotentMatrix& alpha, const Enclosure& x,
                     const Rational& tol);

/// Halton points are spread over the slab |q_1| <= box; tiles with all
/// |q_i| <= box add their endpoints and midpoints.
struct SamplerSpec {
    int halton_points = 500;
    int box = 3;
    std::uint64_t seed = 0;  // offset into the Halton sequence
};

/// Sampled max |g'(x) - 1| over the given generators. A lower bound on the sup.
double sampled_deviation(const ActionContext& ac, const std::vector<UnipotentMatrix>& gens,
                         const SamplerSpec& sampler);

struct Calibration {
    Rational K;
    double achieved_sup = 0;
    int steps = 0;
};

/// First K in 1, 2, 4, ... with sampled deviation < eps. Throws
/// BudgetExhausted after max_doublings.
Calibration calibrate_K(int n, const std::vector<UnipotentMatrix>& gens, double eps,
                        const SamplerSpec& sampler = {}, int max_doublings = 40);

// ---------------------------------------------------------------------------
// Gluing

/// Word over named abstract generators: lowercase letters, uppercase for
/// inverses, whitespace separated (e.g. "a b A B").
struct AbstractWord {
    std::vector<std::pair<char, int>> letters;  // (lowercase name, +-1)
    static AbstractWord parse(const std::string& text);
    std::string to_string() const;
};

struct GlueBlock {
    int m = 1;
    int n = 3;
    Rational K;
    std::map<char, GroupWord> images;
    double sampled_sup = 0;  // recorded when the block is built
};

struct GlueWitness {
    AbstractWord word;
    int block = 1;
};

struct GluedAction {
    std::vector<GlueBlock> blocks;
    std::vector<GlueWitness> witnesses;

    /// Parse the JSON config; "K": "auto" calibrates the block to sup < 2^-m.
    static GluedAction from_json(const std::string& text, const SamplerSpec& sampler = {});
    const GlueBlock* block(int m) const;
    UnipotentMatrix image(const GlueBlock& b, const AbstractWord& w) const;
};

/// Block-glued action on [0, 1]; identity outside configured blocks.
Enclosure glue_residual(const GluedAction& g, const AbstractWord& w, const Enclosure& x,
                        const Rational& tol);

}  // namespace nilflow
