#include "nilflow/plmaps.hpp"

#include <algorithm>
#include <sstream>

#include "nilflow/errors.hpp"

namespace nilflow {

PLHomeo::PLHomeo() : slopes_{Rational(1)} {}

PLHomeo PLHomeo::from_pieces(std::vector<Rational> breakpoints, std::vector<Rational> slopes) {
    if (slopes.size() != breakpoints.size() + 1)
        throw DomainError("PL map: need one more slope than breakpoints");
    Rational prev = 0, value = 0;
    for (size_t i = 0; i < slopes.size(); ++i) {
        if (slopes[i] <= 0) throw DomainError("PL map: slopes must be positive");
        Rational next = i < breakpoints.size() ? breakpoints[i] : Rational(1);
        if (next <= prev || (i < breakpoints.size() && next >= 1))
            throw DomainError("PL map: breakpoints must increase strictly inside (0,1)");
        value += slopes[i] * (next - prev);
        prev = next;
    }
    if (value != 1) throw DomainError("PL map: f(1) must equal 1, got " + value.get_str());
    PLHomeo f;
    f.breakpoints_ = std::move(breakpoints);
    f.slopes_ = std::move(slopes);
    f.canonicalize();
    return f;
}

PLHomeo PLHomeo::from_points(const std::vector<Rational>& xs, const std::vector<Rational>& ys) {
    if (xs.size() != ys.size()) throw DimensionError("PL map: xs and ys differ in length");
    std::vector<Rational> bx{0}, by{0};
    bx.insert(bx.end(), xs.begin(), xs.end());
    by.insert(by.end(), ys.begin(), ys.end());
    bx.push_back(1);
    by.push_back(1);
    std::vector<Rational> slopes;
    for (size_t i = 0; i + 1 < bx.size(); ++i) {
        if (bx[i + 1] <= bx[i] || by[i + 1] <= by[i])
            throw DomainError("PL map: nodes must increase strictly");
        slopes.push_back((by[i + 1] - by[i]) / (bx[i + 1] - bx[i]));
    }
    return from_pieces(xs, std::move(slopes));
}

namespace {

std::string trim(const std::string& s) {
    auto b = s.find_first_not_of(" \t\n");
    if (b == std::string::npos) return "";
    return s.substr(b, s.find_last_not_of(" \t\n") - b + 1);
}

std::vector<Rational> parse_list(const std::string& text) {
    std::vector<Rational> out;
    std::string body = trim(text);
    if (body.empty()) return out;
    std::istringstream is(body);
    std::string item;
    while (std::getline(is, item, ',')) {
        try {
            out.push_back(parse_rational(trim(item)));
        } catch (const std::exception&) {
            throw ParseError("PL map: bad rational '" + trim(item) + "'");
        }
    }
    return out;
}

}  // namespace

PLHomeo PLHomeo::parse(const std::string& text) {
    auto semi = text.find(';');
    if (semi == std::string::npos) throw ParseError("PL map: expected 'bp: ...; slopes: ...'");
    std::string a = trim(text.substr(0, semi)), b = trim(text.substr(semi + 1));
    if (a.rfind("bp:", 0) != 0 || b.rfind("slopes:", 0) != 0)
        throw ParseError("PL map: expected 'bp: ...; slopes: ...'");
    return from_pieces(parse_list(a.substr(3)), parse_list(b.substr(7)));
}

void PLHomeo::canonicalize() {
    std::vector<Rational> bp, sl{slopes_[0]};
    for (size_t i = 0; i < breakpoints_.size(); ++i) {
        if (slopes_[i + 1] == sl.back()) continue;
        bp.push_back(breakpoints_[i]);
        sl.push_back(slopes_[i + 1]);
    }
    breakpoints_ = std::move(bp);
    slopes_ = std::move(sl);
}

std::vector<Rational> PLHomeo::breakpoint_values() const {
    std::vector<Rational> out;
    Rational prev = 0, value = 0;
    for (size_t i = 0; i < breakpoints_.size(); ++i) {
        value += slopes_[i] * (breakpoints_[i] - prev);
        prev = breakpoints_[i];
        out.push_back(value);
    }
    return out;
}

Rational PLHomeo::operator()(const Rational& x) const {
    if (x < 0 || x > 1) throw DomainError("PL map: argument outside [0,1]");
    Rational prev = 0, value = 0;
    size_t i = 0;
    for (; i < breakpoints_.size() && x > breakpoints_[i]; ++i) {
        value += slopes_[i] * (breakpoints_[i] - prev);
        prev = breakpoints_[i];
    }
    return value + slopes_[i] * (x - prev);
}

Rational PLHomeo::preimage(const Rational& y) const {
    if (y < 0 || y > 1) throw DomainError("PL map: argument outside [0,1]");
    auto vals = breakpoint_values();
    size_t i = std::lower_bound(vals.begin(), vals.end(), y) - vals.begin();
    Rational x0 = i == 0 ? Rational(0) : breakpoints_[i - 1];
    Rational y0 = i == 0 ? Rational(0) : vals[i - 1];
    return x0 + (y - y0) / slopes_[i];
}

std::string PLHomeo::to_string() const {
    std::string out = "bp: ";
    for (size_t i = 0; i < breakpoints_.size(); ++i) out += (i ? ", " : "") + breakpoints_[i].get_str();
    out += "; slopes: ";
    for (size_t i = 0; i < slopes_.size(); ++i) out += (i ? ", " : "") + slopes_[i].get_str();
    return out;
}

PLHomeo pl_compose(const PLHomeo& f, const PLHomeo& g) {
    std::vector<Rational> nodes = g.breakpoints();
    for (const auto& b : f.breakpoints()) nodes.push_back(g.preimage(b));
    std::sort(nodes.begin(), nodes.end());
    nodes.erase(std::unique(nodes.begin(), nodes.end()), nodes.end());
    std::vector<Rational> ys;
    for (const auto& x : nodes) ys.push_back(f(g(x)));
    return PLHomeo::from_points(nodes, ys);
}

PLHomeo pl_inverse(const PLHomeo& f) {
    return PLHomeo::from_points(f.breakpoint_values(), f.breakpoints());
}

PLHomeo pl_commutator(const PLHomeo& f, const PLHomeo& g) {
    return pl_compose(pl_inverse(f), pl_compose(pl_inverse(g), pl_compose(f, g)));
}

std::pair<Rational, Rational> endpoint_character(const PLHomeo& f) {
    return {f.slopes().front(), f.slopes().back()};
}

std::string FixedComponent::to_string() const {
    return is_point() ? lo.get_str() : "[" + lo.get_str() + ", " + hi.get_str() + "]";
}

std::vector<FixedComponent> pl_fixed_points(const PLHomeo& f) {
    std::vector<Rational> xs{0};
    xs.insert(xs.end(), f.breakpoints().begin(), f.breakpoints().end());
    xs.push_back(1);
    std::vector<FixedComponent> raw;
    for (size_t i = 0; i + 1 < xs.size(); ++i) {
        const Rational &x0 = xs[i], &x1 = xs[i + 1];
        Rational d0 = f(x0) - x0, d1 = f(x1) - x1;
        if (d0 == 0 && d1 == 0) {
            raw.push_back({x0, x1});
        } else if (d0 == 0) {
            raw.push_back({x0, x0});
        } else if (d1 == 0) {
            raw.push_back({x1, x1});
        } else if ((d0 < 0) != (d1 < 0)) {
            Rational x = x0 - d0 * (x1 - x0) / (d1 - d0);
            raw.push_back({x, x});
        }
    }
    std::vector<FixedComponent> out;
    for (auto& c : raw) {
        if (!out.empty() && c.lo <= out.back().hi) {
            if (c.hi > out.back().hi) out.back().hi = c.hi;
        } else {
            out.push_back(c);
        }
    }
    return out;
}

PLHomeo random_pl(std::mt19937_64& rng, int pieces, int denominator) {
    // Raw engine output keeps the sequence identical across standard libraries.
    if (pieces < 1 || denominator < 2) throw DomainError("random_pl: need pieces >= 1, denominator >= 2");
    int k = static_cast<int>(rng() % static_cast<unsigned>(pieces));
    auto draw = [&] {
        std::vector<int> v;
        for (int i = 0; i < k; ++i) v.push_back(1 + static_cast<int>(rng() % (denominator - 1)));
        std::sort(v.begin(), v.end());
        v.erase(std::unique(v.begin(), v.end()), v.end());
        return v;
    };
    std::vector<int> a = draw(), b = draw();
    size_t m = std::min(a.size(), b.size());
    std::vector<Rational> xs, ys;
    for (size_t i = 0; i < m; ++i) {
        xs.emplace_back(a[i], denominator);
        ys.emplace_back(b[i], denominator);
        xs.back().canonicalize();
        ys.back().canonicalize();
    }
    return PLHomeo::from_points(xs, ys);
}

}  // namespace nilflow
