#include "nilflow/unipotent.hpp"

#include <cctype>
#include <sstream>

namespace nilflow {

LatticePoint::LatticePoint(std::initializer_list<long> coords) {
    coords_.reserve(coords.size());
    for (long c : coords) coords_.emplace_back(c);
}

std::string LatticePoint::to_string() const {
    std::string out = "(";
    for (int i = 0; i < size(); ++i) {
        if (i) out += ",";
        out += coords_[i].get_str();
    }
    return out + ")";
}

std::strong_ordering lex_compare(const LatticePoint& q, const LatticePoint& r) {
    if (q.size() != r.size()) throw DimensionError("lex_compare: length mismatch");
    for (int k = 0; k < q.size(); ++k) {
        int c = cmp(q[k], r[k]);
        if (c < 0) return std::strong_ordering::less;
        if (c > 0) return std::strong_ordering::greater;
    }
    return std::strong_ordering::equal;
}

LatticePoint lex_successor(const LatticePoint& q) {
    if (q.size() == 0) throw DimensionError("lex_successor of an empty point");
    LatticePoint s = q;
    s[s.size() - 1] += 1;
    return s;
}

LatticePoint difference(const LatticePoint& q, const LatticePoint& r) {
    if (q.size() != r.size()) throw DimensionError("difference: length mismatch");
    LatticePoint d = q;
    for (int i = 0; i < d.size(); ++i) d[i] -= r[i];
    return d;
}

UnipotentMatrix::UnipotentMatrix(int n) : n_(n), entries_(static_cast<size_t>(n) * n) {
    if (n < 1) throw DimensionError("matrix dimension must be positive");
}

UnipotentMatrix UnipotentMatrix::identity(int n) {
    UnipotentMatrix m(n);
    for (int i = 1; i <= n; ++i) m.mut(i, i) = 1;
    return m;
}

UnipotentMatrix UnipotentMatrix::generator(int n, int i) {
    if (i < 1 || i >= n) throw DimensionError("generator index out of range");
    UnipotentMatrix m = identity(n);
    m.mut(i + 1, i) = 1;
    return m;
}

UnipotentMatrix UnipotentMatrix::from_rows(const std::vector<std::vector<Integer>>& rows) {
    const int n = static_cast<int>(rows.size());
    UnipotentMatrix m(n);
    for (int i = 1; i <= n; ++i) {
        if (static_cast<int>(rows[i - 1].size()) != n) throw DimensionError("matrix is not square");
        for (int j = 1; j <= n; ++j) {
            const Integer& v = rows[i - 1][j - 1];
            if (i == j && v != 1) throw DomainError("diagonal entries must equal 1");
            if (j > i && v != 0) throw DomainError("entries above the diagonal must vanish");
            m.mut(i, j) = v;
        }
    }
    return m;
}

bool UnipotentMatrix::is_identity() const { return *this == identity(n_); }

std::string UnipotentMatrix::to_string() const {
    std::ostringstream os;
    os << "[";
    for (int i = 1; i <= n_; ++i) {
        os << (i > 1 ? "; " : "");
        for (int j = 1; j <= n_; ++j) os << (j > 1 ? " " : "") << at(i, j).get_str();
    }
    os << "]";
    return os.str();
}

UnipotentMatrix mat_mul(const UnipotentMatrix& a, const UnipotentMatrix& b) {
    if (a.n_ != b.n_) throw DimensionError("mat_mul: dimension mismatch");
    const int n = a.n_;
    UnipotentMatrix c(n);
    // Both factors are lower triangular, so only k in [j, i] contributes.
    for (int i = 1; i <= n; ++i)
        for (int j = 1; j <= i; ++j) {
            Integer s = 0;
            for (int k = j; k <= i; ++k) s += a.at(i, k) * b.at(k, j);
            c.mut(i, j) = s;
        }
    return c;
}

UnipotentMatrix mat_inverse(const UnipotentMatrix& a) {
    const int n = a.n_;
    UnipotentMatrix x = UnipotentMatrix::identity(n);
    // Forward substitution on A X = I, column by column.
    for (int j = 1; j <= n; ++j)
        for (int i = j + 1; i <= n; ++i) {
            Integer s = 0;
            for (int k = j; k < i; ++k) s += a.at(i, k) * x.at(k, j);
            x.mut(i, j) = -s;
        }
    return x;
}

LatticePoint apply_to_lattice(const UnipotentMatrix& a, const LatticePoint& q) {
    if (a.dim() != q.size()) throw DimensionError("apply_to_lattice: dimension mismatch");
    const int n = a.dim();
    std::vector<Integer> out(n);
    for (int i = 1; i <= n; ++i) {
        Integer s = 0;
        for (int k = 1; k <= i; ++k) s += a.at(i, k) * q[k - 1];
        out[i - 1] = s;
    }
    return LatticePoint(std::move(out));
}

GroupWord GroupWord::parse(std::string_view text) {
    std::vector<Letter> letters;
    std::istringstream is{std::string(text)};
    std::string tok;
    while (is >> tok) {
        if (tok.size() < 2 || (tok[0] != 's' && tok[0] != 'S'))
            throw ParseError("bad generator token: " + tok);
        int idx = 0;
        for (size_t i = 1; i < tok.size(); ++i) {
            if (!std::isdigit(static_cast<unsigned char>(tok[i])))
                throw ParseError("bad generator token: " + tok);
            idx = idx * 10 + (tok[i] - '0');
            if (idx > 1000000) throw ParseError("generator index too large: " + tok);
        }
        if (idx < 1) throw ParseError("generator index must be >= 1: " + tok);
        letters.push_back({idx, tok[0] == 's' ? 1 : -1});
    }
    return GroupWord(std::move(letters));
}

std::string GroupWord::to_string() const {
    std::string out;
    for (const auto& l : letters_) {
        if (!out.empty()) out += ' ';
        out += (l.exponent > 0 ? 's' : 'S');
        out += std::to_string(l.generator);
    }
    return out;
}

int GroupWord::max_generator() const {
    int m = 0;
    for (const auto& l : letters_) m = std::max(m, l.generator);
    return m;
}

GroupWord GroupWord::inverse() const {
    std::vector<Letter> inv(letters_.rbegin(), letters_.rend());
    for (auto& l : inv) l.exponent = -l.exponent;
    return GroupWord(std::move(inv));
}

GroupWord GroupWord::operator*(const GroupWord& other) const {
    std::vector<Letter> out = letters_;
    out.insert(out.end(), other.letters_.begin(), other.letters_.end());
    return GroupWord(std::move(out));
}

UnipotentMatrix word_eval(const GroupWord& w, int n) {
    UnipotentMatrix m = UnipotentMatrix::identity(n);
    for (const auto& l : w.letters()) {
        if (l.generator < 1 || l.generator >= n)
            throw DimensionError("word_eval: generator index out of range");
        UnipotentMatrix g = UnipotentMatrix::generator(n, l.generator);
        m = mat_mul(m, l.exponent > 0 ? g : mat_inverse(g));
    }
    return m;
}

}  // namespace nilflow
