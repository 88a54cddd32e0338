#include "doctest.h"

#include <random>

#include "nilflow/errors.hpp"
#include "nilflow/unipotent.hpp"

using namespace nilflow;

namespace {

// Textbook triple loop on full matrices.
std::vector<std::vector<Integer>> naive_product(const UnipotentMatrix& a, const UnipotentMatrix& b, int n) {
    std::vector<std::vector<Integer>> c(n, std::vector<Integer>(n, Integer(0)));
    for (int i = 1; i <= n; ++i)
        for (int j = 1; j <= n; ++j)
            for (int k = 1; k <= n; ++k) c[i - 1][j - 1] += a.at(i, k) * b.at(k, j);
    return c;
}

GroupWord random_word(std::mt19937_64& rng, int gens, int len) {
    std::vector<Letter> letters;
    for (int i = 0; i < len; ++i) letters.push_back({1 + int(rng() % gens), rng() % 2 ? 1 : -1});
    return GroupWord(letters);
}

}  // namespace

TEST_CASE("matrix product matches the naive triple loop") {
    std::mt19937_64 rng(7);
    for (int n = 2; n <= 5; ++n)
        for (int t = 0; t < 20; ++t) {
            UnipotentMatrix a = word_eval(random_word(rng, n - 1, 6), n);
            UnipotentMatrix b = word_eval(random_word(rng, n - 1, 6), n);
            UnipotentMatrix c = mat_mul(a, b);
            auto ref = naive_product(a, b, n);
            for (int i = 1; i <= n; ++i)
                for (int j = 1; j <= n; ++j) CHECK(c.at(i, j) == ref[i - 1][j - 1]);
            CHECK(mat_mul(a, mat_inverse(a)).is_identity());
        }
}

TEST_CASE("generators and words") {
    UnipotentMatrix s1 = UnipotentMatrix::generator(3, 1);
    CHECK(s1.at(2, 1) == 1);
    CHECK(s1.at(3, 2) == 0);
    GroupWord w = GroupWord::parse("s1 s2 S1 S2");
    CHECK(w.length() == 4);
    CHECK(w.to_string() == "s1 s2 S1 S2");
    CHECK((w * w.inverse()).length() == 8);
    CHECK(word_eval(w * w.inverse(), 3).is_identity());
    // [s1, s2] is central and nontrivial in N_3
    UnipotentMatrix c = word_eval(w, 3);
    CHECK_FALSE(c.is_identity());
    CHECK(c.at(3, 1) != 0);
    CHECK(word_eval(GroupWord(), 4).is_identity());
}

TEST_CASE("words evaluate left to right") {
    UnipotentMatrix a = UnipotentMatrix::generator(3, 1), b = UnipotentMatrix::generator(3, 2);
    CHECK(word_eval(GroupWord::parse("s1 s2"), 3) == mat_mul(a, b));
}

TEST_CASE("parse and dimension errors") {
    CHECK_THROWS_AS(GroupWord::parse("s0"), ParseError);
    CHECK_THROWS_AS(GroupWord::parse("x1"), ParseError);
    CHECK_THROWS_AS(GroupWord::parse("s"), ParseError);
    CHECK_THROWS_AS(word_eval(GroupWord::parse("s3"), 3), DimensionError);
    CHECK_THROWS_AS(UnipotentMatrix::generator(3, 3), DimensionError);
    CHECK_THROWS_AS(apply_to_lattice(UnipotentMatrix::identity(3), LatticePoint{1, 2}), DimensionError);
    CHECK_THROWS_AS(lex_compare(LatticePoint{1}, LatticePoint{1, 2}), DimensionError);
}

TEST_CASE("lex order and successor") {
    CHECK(lex_compare(LatticePoint{0, 5}, LatticePoint{1, -9}) < 0);
    CHECK(lex_compare(LatticePoint{1, 2}, LatticePoint{1, 2}) == 0);
    CHECK(lex_successor(LatticePoint{1, 2}) == LatticePoint{1, 3});
    CHECK(difference(LatticePoint{3, 1}, LatticePoint{1, 1}) == LatticePoint{2, 0});
}

TEST_CASE("the action preserves lex order on a box") {
    std::mt19937_64 rng(3);
    std::vector<LatticePoint> pts;
    for (long a = -2; a <= 2; ++a)
        for (long b = -2; b <= 2; ++b)
            for (long c = -2; c <= 2; ++c) pts.push_back(LatticePoint{a, b, c});
    for (int t = 0; t < 10; ++t) {
        UnipotentMatrix m = word_eval(random_word(rng, 2, 5), 3);
        for (size_t i = 0; i < pts.size(); ++i)
            for (size_t j = 0; j < pts.size(); ++j)
                REQUIRE(lex_compare(pts[i], pts[j]) ==
                        lex_compare(apply_to_lattice(m, pts[i]), apply_to_lattice(m, pts[j])));
    }
}
