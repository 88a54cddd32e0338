#pragma once

// The group N_n of lower-triangular unipotent integer matrices, its
// generators sigma_i, words over them, and its order-preserving action on
// Z^n with the lexicographic order (first coordinate most significant).

#include <compare>
#include <initializer_list>
#include <string>
#include <string_view>
#include <vector>

#include "nilflow/certified_reals.hpp"

namespace nilflow {

class LatticePoint {
public:
    LatticePoint() = default;
    explicit LatticePoint(std::vector<Integer> coords) : coords_(std::move(coords)) {}
    LatticePoint(std::initializer_list<long> coords);
    static LatticePoint zero(int n) { return LatticePoint(std::vector<Integer>(n, Integer(0))); }

    int size() const { return static_cast<int>(coords_.size()); }
    const Integer& operator[](int i) const { return coords_[i]; }
    Integer& operator[](int i) { return coords_[i]; }
    const std::vector<Integer>& coords() const { return coords_; }

    std::string to_string() const;
    friend bool operator==(const LatticePoint& a, const LatticePoint& b) {
        return a.coords_ == b.coords_;
    }

private:
    std::vector<Integer> coords_;
};

/// Lexicographic comparison; throws DimensionError on length mismatch.
std::strong_ordering lex_compare(const LatticePoint& q, const LatticePoint& r);
/// q with its last coordinate incremented: the immediate lex successor.
LatticePoint lex_successor(const LatticePoint& q);
/// Coordinate-wise difference q - r.
LatticePoint difference(const LatticePoint& q, const LatticePoint& r);

class UnipotentMatrix {
public:
    static UnipotentMatrix identity(int n);
    /// sigma_i: identity plus a 1 at row i+1, column i (1-based, 1 <= i < n).
    static UnipotentMatrix generator(int n, int i);
    /// Validates shape, unit diagonal and zero upper triangle.
    static UnipotentMatrix from_rows(const std::vector<std::vector<Integer>>& rows);

    int dim() const { return n_; }
    /// 1-based entry access.
    const Integer& at(int row, int col) const { return entries_[(row - 1) * n_ + (col - 1)]; }
    bool is_identity() const;

    friend bool operator==(const UnipotentMatrix& a, const UnipotentMatrix& b) {
        return a.n_ == b.n_ && a.entries_ == b.entries_;
    }
    std::string to_string() const;

private:
    explicit UnipotentMatrix(int n);
    Integer& mut(int row, int col) { return entries_[(row - 1) * n_ + (col - 1)]; }

    int n_ = 0;
    std::vector<Integer> entries_;

    friend UnipotentMatrix mat_mul(const UnipotentMatrix&, const UnipotentMatrix&);
    friend UnipotentMatrix mat_inverse(const UnipotentMatrix&);
};

UnipotentMatrix mat_mul(const UnipotentMatrix& a, const UnipotentMatrix& b);
UnipotentMatrix mat_inverse(const UnipotentMatrix& a);
/// Matrix times column vector.
LatticePoint apply_to_lattice(const UnipotentMatrix& a, const LatticePoint& q);

struct Letter {
    int generator = 1;  // 1-based generator index
    int exponent = 1;   // +1 or -1
    friend bool operator==(const Letter&, const Letter&) = default;
};

/// Word in the generators sigma_i^{+-1}. Text form: "s1 s2 S1 S2", uppercase
/// for inverses, whitespace separated; the empty string is the empty word.
class GroupWord {
public:
    GroupWord() = default;
    explicit GroupWord(std::vector<Letter> letters) : letters_(std::move(letters)) {}

    static GroupWord parse(std::string_view text);
    std::string to_string() const;

    const std::vector<Letter>& letters() const { return letters_; }
    bool empty() const { return letters_.empty(); }
    int length() const { return static_cast<int>(letters_.size()); }
    int max_generator() const;

    GroupWord inverse() const;
    GroupWord operator*(const GroupWord& other) const;
    friend bool operator==(const GroupWord&, const GroupWord&) = default;

private:
    std::vector<Letter> letters_;
};

/// Product of generator matrices in word order; index checked against n.
UnipotentMatrix word_eval(const GroupWord& w, int n);

}  // namespace nilflow
