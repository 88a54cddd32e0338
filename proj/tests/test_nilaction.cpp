#include "doctest.h"

#include "nilflow/errors.hpp"
#include "nilflow/nilaction.hpp"

using namespace nilflow;

namespace {
const Rational kTol(1, 1000000000000L);

UnipotentMatrix word(const char* text, int n) { return word_eval(GroupWord::parse(text), n); }

// tile midpoints with |q_i| <= 1, as points of [0, S]
std::vector<Rational> sample_points(const ActionContext& ac) {
    std::vector<Rational> xs;
    const int n = ac.dim();
    std::vector<long> c(n, -1);
    while (true) {
        LatticePoint q(std::vector<Integer>(c.begin(), c.end()));
        Tile t = tile_interval(ac.series(), q, kTol);
        xs.push_back(t.left.midpoint() + t.length / 2);
        int i = n - 1;
        while (i >= 0 && c[i] == 1) c[i--] = -1;
        if (i < 0) break;
        ++c[i];
    }
    return xs;
}
}  // namespace

TEST_CASE("identity acts trivially") {
    ActionContext ac(2, Rational(3));
    for (const Rational& x : sample_points(ac)) {
        CHECK(g_apply(ac, UnipotentMatrix::identity(2), Enclosure(x), kTol).contains(x));
        CHECK(g_deriv(ac, UnipotentMatrix::identity(2), Enclosure(x), kTol).contains(Rational(1)));
    }
}

TEST_CASE("tiles go to tiles") {
    ActionContext ac(3, Rational(10));
    UnipotentMatrix s1 = word("s1", 3);
    for (LatticePoint q : {LatticePoint{0, 0, 0}, LatticePoint{2, -1, 3}, LatticePoint{-1, 4, 0}}) {
        Tile src = tile_interval(ac.series(), q, kTol);
        Tile dst = tile_interval(ac.series(), apply_to_lattice(s1, q), kTol);
        CHECK(g_apply(ac, s1, src.left, kTol).overlaps(dst.left));
        CHECK(g_apply(ac, s1, src.right, kTol).overlaps(dst.right));
    }
}

TEST_CASE("homomorphism on sample points") {
    ActionContext ac(3, Rational(5));
    UnipotentMatrix a = word("s1 s2", 3), b = word("S2 s1 s1", 3);
    UnipotentMatrix ab = mat_mul(a, b);
    for (const Rational& x : sample_points(ac)) {
        Enclosure lhs = g_apply(ac, ab, Enclosure(x), kTol);
        Enclosure rhs = g_apply(ac, a, g_apply(ac, b, Enclosure(x), kTol), kTol);
        CHECK(lhs.overlaps(rhs));
    }
}

TEST_CASE("derivative matches central differences") {
    ActionContext ac(2, Rational(2));
    UnipotentMatrix s1 = word("s1", 2);
    const Rational h(1, 10000000);
    for (const Rational& x : sample_points(ac)) {
        Enclosure fd = (g_apply(ac, s1, Enclosure(x + h), kTol) - g_apply(ac, s1, Enclosure(x - h), kTol)) *
                       Enclosure(1 / (2 * h));
        double d = g_deriv(ac, s1, Enclosure(x), kTol).midpoint().get_d();
        CHECK(std::abs(fd.midpoint().get_d() - d) < 1e-5 * std::max(1.0, d));
    }
}

TEST_CASE("unit action fixes the endpoints") {
    ActionContext ac(2, Rational(1));
    UnipotentMatrix s1 = word("s1", 2);
    CHECK(unit_action(ac, s1, Enclosure(Rational(0)), kTol).contains(Rational(0)));
    CHECK(unit_action(ac, s1, Enclosure(Rational(1)), kTol).contains(Rational(1)));
    CHECK(unit_action(ac, s1, Enclosure(Rational(7, 2)), kTol, UnitMode::circle)
              .overlaps(unit_action(ac, s1, Enclosure(Rational(1, 2)), kTol)));
    CHECK_THROWS_AS(unit_action(ac, s1, Enclosure(Rational(3, 2)), kTol), DomainError);
}

TEST_CASE("domain errors") {
    ActionContext ac(2, Rational(1));
    CHECK_THROWS_AS(g_apply(ac, word("s1", 2), Enclosure(Rational(-1)), kTol), DomainError);
    CHECK_THROWS_AS(g_apply(ac, word("s1", 2), Enclosure(Rational(1000)), kTol), DomainError);
    CHECK_THROWS_AS(ActionContext(2, Rational(1), Rational(0)), DomainError);
    CHECK_THROWS_AS(calibrate_K(2, {word("s1", 2)}, 0.0), DomainError);
}

TEST_CASE("calibration with a loose target stops at K = 1") {
    Calibration c = calibrate_K(2, {word("s1", 2)}, 1e6, SamplerSpec{20, 1, 0});
    CHECK(c.K == 1);
    CHECK(c.steps == 0);
}

TEST_CASE("glue config parsing") {
    CHECK_THROWS_AS(GluedAction::from_json("{"), ParseError);
    CHECK_THROWS_AS(GluedAction::from_json(R"({"blocks": [{"m": 0, "n": 2, "K": 1, "images": {}}]})"), ParseError);
    CHECK_THROWS_AS(GluedAction::from_json(R"({"blocks": [{"m": 1, "n": 2, "K": 1, "images": {"a": "s2"}}]})"),
                    ParseError);
    CHECK_THROWS_AS(AbstractWord::parse("a 1"), ParseError);
    CHECK(AbstractWord::parse("a b A B").to_string() == "a b A B");
}

TEST_CASE("glued action is the identity outside blocks and fixes block ends") {
    GluedAction g = GluedAction::from_json(
        R"({"blocks": [{"m": 2, "n": 2, "K": 1, "images": {"a": "s1"}}], "witnesses": []})");
    AbstractWord a = AbstractWord::parse("a");
    CHECK(glue_residual(g, a, Enclosure(Rational(3, 4)), kTol).contains(Rational(3, 4)));
    CHECK(glue_residual(g, a, Enclosure(Rational(1, 3)), kTol).contains(Rational(1, 3)));
    CHECK(glue_residual(g, a, Enclosure(Rational(1, 2)), kTol).contains(Rational(1, 2)));
    Enclosure y = glue_residual(g, a, Enclosure(Rational(2, 5)), kTol);
    CHECK(y.lo() > Rational(1, 3));
    CHECK(y.hi() < Rational(1, 2));
    CHECK(glue_residual(g, a, Enclosure(Rational(0)), kTol).contains(Rational(0)));
    CHECK_THROWS_AS(glue_residual(g, a, Enclosure(Rational(0), Rational(1, 100)), kTol), DomainError);
}
