#include "xferop/poly.hpp"

#include <algorithm>
#include <cmath>

namespace xferop {

// ---------------------------------------------------------------- Poly

Poly::Poly(Rational c) : c_{std::move(c)} { trim(); }

Poly::Poly(std::vector<Rational> coeffs) : c_(std::move(coeffs)) { trim(); }

Poly Poly::affine(const Rational& slope, const Rational& intercept) { return Poly({intercept, slope}); }

void Poly::trim() {
    while (!c_.empty() && c_.back().is_zero()) c_.pop_back();
}

Rational Poly::operator()(const Rational& x) const {
    Rational r(0);
    for (auto it = c_.rbegin(); it != c_.rend(); ++it) r = r * x + *it;
    return r;
}

double Poly::operator()(double x) const {
    double r = 0;
    for (auto it = c_.rbegin(); it != c_.rend(); ++it) r = r * x + it->to_double();
    return r;
}

Poly Poly::operator+(const Poly& o) const {
    std::vector<Rational> r(std::max(c_.size(), o.c_.size()));
    for (std::size_t i = 0; i < c_.size(); ++i) r[i] += c_[i];
    for (std::size_t i = 0; i < o.c_.size(); ++i) r[i] += o.c_[i];
    return Poly(std::move(r));
}

Poly Poly::operator-() const {
    std::vector<Rational> r = c_;
    for (auto& v : r) v = -v;
    return Poly(std::move(r));
}

Poly Poly::operator-(const Poly& o) const { return *this + (-o); }

Poly Poly::operator*(const Poly& o) const {
    if (c_.empty() || o.c_.empty()) return {};
    std::vector<Rational> r(c_.size() + o.c_.size() - 1);
    for (std::size_t i = 0; i < c_.size(); ++i)
        for (std::size_t j = 0; j < o.c_.size(); ++j) r[i + j] += c_[i] * o.c_[j];
    return Poly(std::move(r));
}

Poly Poly::compose(const Affine& f) const {
    Poly inner = Poly::affine(f);
    Poly r;
    for (auto it = c_.rbegin(); it != c_.rend(); ++it) r = r * inner + Poly(*it);
    return r;
}

Poly Poly::derivative() const {
    if (c_.size() <= 1) return {};
    std::vector<Rational> r(c_.size() - 1);
    for (std::size_t i = 1; i < c_.size(); ++i) r[i - 1] = c_[i] * Rational(static_cast<long>(i));
    return Poly(std::move(r));
}

Poly Poly::antiderivative() const {
    std::vector<Rational> r(c_.size() + 1);
    for (std::size_t i = 0; i < c_.size(); ++i) r[i + 1] = c_[i] / Rational(static_cast<long>(i + 1));
    return Poly(std::move(r));
}

Rational Poly::integrate(const Rational& a, const Rational& b) const {
    Poly F = antiderivative();
    return F(b) - F(a);
}

std::string Poly::str() const {
    if (c_.empty()) return "0";
    std::string s;
    for (std::size_t i = 0; i < c_.size(); ++i) {
        if (c_[i].is_zero()) continue;
        if (!s.empty()) s += "+";
        s += "(" + c_[i].str() + ")";
        if (i == 1) s += "*x";
        if (i > 1) s += "*x^" + std::to_string(i);
    }
    return s;
}

// -------------------------------------------------------- FactoredPoly

FactoredPoly FactoredPoly::affine(const Rational& slope, const Rational& intercept) {
    FactoredPoly f{Rational(1), {Affine{slope, intercept}}};
    f.normalize();
    return f;
}

void FactoredPoly::normalize() {
    std::vector<Affine> kept;
    for (const auto& f : factors) {
        if (f.slope.is_zero()) {
            scale *= f.intercept;
        } else {
            scale *= f.slope;
            kept.push_back({Rational(1), f.intercept / f.slope});
        }
    }
    if (scale.is_zero()) kept.clear();
    std::sort(kept.begin(), kept.end(), [](const Affine& a, const Affine& b) { return a.intercept < b.intercept; });
    factors = std::move(kept);
}

Rational FactoredPoly::operator()(const Rational& x) const {
    Rational r = scale;
    for (const auto& f : factors) r *= f(x);
    return r;
}

double FactoredPoly::operator()(double x) const {
    double r = scale.to_double();
    for (const auto& f : factors) r *= f(x);
    return r;
}

FactoredPoly FactoredPoly::operator*(const FactoredPoly& o) const {
    FactoredPoly r{scale * o.scale, factors};
    r.factors.insert(r.factors.end(), o.factors.begin(), o.factors.end());
    r.normalize();
    return r;
}

FactoredPoly FactoredPoly::compose(const Affine& g) const {
    FactoredPoly r{scale, {}};
    for (const auto& f : factors) r.factors.push_back(f.after(g));
    r.normalize();
    return r;
}

Poly FactoredPoly::to_poly() const {
    Poly p(scale);
    for (const auto& f : factors) p = p * Poly::affine(f);
    return p;
}

std::vector<Rational> FactoredPoly::roots() const {
    std::vector<Rational> r;
    if (scale.is_zero()) return r;
    for (const auto& f : factors) r.push_back(-f.intercept / f.slope);
    std::sort(r.begin(), r.end());
    r.erase(std::unique(r.begin(), r.end()), r.end());
    return r;
}

std::string FactoredPoly::str() const {
    std::string s = scale.str();
    for (const auto& f : factors) s += "*(x+" + f.intercept.str() + ")";
    return s;
}

// -------------------------------------------------------------- PwPoly

PwPoly::PwPoly(std::vector<Rational> bp, std::vector<Poly> gaps, std::vector<Rational> vals)
    : bp_(std::move(bp)), gaps_(std::move(gaps)), vals_(std::move(vals)) {
    simplify();
}

void PwPoly::simplify() {
    bool changed = true;
    while (changed && !bp_.empty()) {
        changed = false;
        const std::size_t n = bp_.size();
        // leading / trailing zero breakpoints
        if (vals_.front().is_zero() && (n == 1 || gaps_.front().is_zero())) {
            bp_.erase(bp_.begin());
            vals_.erase(vals_.begin());
            if (!gaps_.empty()) gaps_.erase(gaps_.begin());
            changed = true;
            continue;
        }
        if (vals_.back().is_zero() && (n == 1 || gaps_.back().is_zero())) {
            bp_.pop_back();
            vals_.pop_back();
            if (!gaps_.empty()) gaps_.pop_back();
            changed = true;
            continue;
        }
        for (std::size_t i = 1; i + 1 < n; ++i) {
            if (gaps_[i - 1] == gaps_[i] && gaps_[i](bp_[i]) == vals_[i]) {
                bp_.erase(bp_.begin() + static_cast<long>(i));
                vals_.erase(vals_.begin() + static_cast<long>(i));
                gaps_.erase(gaps_.begin() + static_cast<long>(i));
                changed = true;
                break;
            }
        }
    }
}

PwPoly PwPoly::from_pieces(const std::vector<Piece>& pieces,
                           const std::vector<std::pair<Rational, Rational>>& overrides) {
    std::vector<Rational> bp;
    for (const auto& p : pieces) {
        if (p.domain.empty()) continue;
        bp.push_back(p.domain.lo);
        bp.push_back(p.domain.hi);
    }
    for (const auto& o : overrides) bp.push_back(o.first);
    std::sort(bp.begin(), bp.end());
    bp.erase(std::unique(bp.begin(), bp.end()), bp.end());
    auto value_at = [&](const Rational& x) -> Rational {
        for (const auto& p : pieces)
            if (p.domain.contains(x)) return p.poly(x);
        return Rational(0);
    };
    std::vector<Poly> gaps;
    for (std::size_t i = 0; i + 1 < bp.size(); ++i) {
        Rational mid = midpoint(bp[i], bp[i + 1]);
        Poly g;
        for (const auto& p : pieces)
            if (p.domain.contains(mid)) {
                g = p.poly;
                break;
            }
        gaps.push_back(g);
    }
    std::vector<Rational> vals;
    for (const auto& x : bp) {
        auto it = std::find_if(overrides.begin(), overrides.end(), [&](const auto& o) { return o.first == x; });
        vals.push_back(it != overrides.end() ? it->second : value_at(x));
    }
    return PwPoly(std::move(bp), std::move(gaps), std::move(vals));
}

PwPoly PwPoly::constant_on(const IntervalSet& s, const Rational& c) {
    std::vector<Piece> pieces;
    for (const auto& iv : s.components()) pieces.push_back({iv, Poly(c)});
    return from_pieces(pieces);
}

PwPoly PwPoly::indicator(const IntervalSet& s) { return constant_on(s, Rational(1)); }

PwPoly PwPoly::linear_spline(const std::vector<std::pair<Rational, Rational>>& knots) {
    std::vector<Rational> bp, vals;
    std::vector<Poly> gaps;
    for (std::size_t i = 0; i < knots.size(); ++i) {
        bp.push_back(knots[i].first);
        vals.push_back(knots[i].second);
        if (i + 1 < knots.size()) {
            const auto& [x0, y0] = knots[i];
            const auto& [x1, y1] = knots[i + 1];
            Rational s = (y1 - y0) / (x1 - x0);
            gaps.push_back(Poly::affine(s, y0 - s * x0));
        }
    }
    return PwPoly(std::move(bp), std::move(gaps), std::move(vals));
}

PwPoly PwPoly::hat(const Rational& lo, const Rational& mid, const Rational& hi, const Rational& peak) {
    return linear_spline({{lo, Rational(0)}, {mid, peak}, {hi, Rational(0)}});
}

Rational PwPoly::operator()(const Rational& x) const {
    auto it = std::lower_bound(bp_.begin(), bp_.end(), x);
    if (it != bp_.end() && *it == x) return vals_[static_cast<std::size_t>(it - bp_.begin())];
    if (it == bp_.begin() || it == bp_.end()) return Rational(0);
    return gaps_[static_cast<std::size_t>(it - bp_.begin()) - 1](x);
}

double PwPoly::operator()(double x) const {
    if (bp_.empty()) return 0.0;
    if (x < bp_.front().to_double() || x > bp_.back().to_double()) return 0.0;
    // Locate by double comparison; exact ties fall back to the rational path.
    std::size_t lo = 0, hi = bp_.size() - 1;
    while (hi - lo > 1) {
        std::size_t m = (lo + hi) / 2;
        if (bp_[m].to_double() <= x) lo = m; else hi = m;
    }
    if (bp_[lo].to_double() == x) return vals_[lo].to_double();
    if (bp_[hi].to_double() == x) return vals_[hi].to_double();
    if (gaps_.empty()) return 0.0;
    return gaps_[lo](x);
}

Rational PwPoly::limit_left(const Rational& x) const {
    auto it = std::lower_bound(bp_.begin(), bp_.end(), x);
    std::size_t i = static_cast<std::size_t>(it - bp_.begin());
    if (i == 0 || i == bp_.size()) return Rational(0);
    return gaps_[i - 1](x);
}

Rational PwPoly::limit_right(const Rational& x) const {
    auto it = std::upper_bound(bp_.begin(), bp_.end(), x);
    std::size_t j = static_cast<std::size_t>(it - bp_.begin());
    if (j == 0 || j == bp_.size()) return Rational(0);
    return gaps_[j - 1](x);
}

PwPoly PwPoly::combine(const PwPoly& a, const PwPoly& b, int op) {
    std::vector<Rational> bp = a.bp_;
    bp.insert(bp.end(), b.bp_.begin(), b.bp_.end());
    std::sort(bp.begin(), bp.end());
    bp.erase(std::unique(bp.begin(), bp.end()), bp.end());
    auto gap_of = [](const PwPoly& f, const Rational& mid) -> Poly {
        auto it = std::upper_bound(f.bp_.begin(), f.bp_.end(), mid);
        std::size_t j = static_cast<std::size_t>(it - f.bp_.begin());
        if (j == 0 || j == f.bp_.size()) return {};
        return f.gaps_[j - 1];
    };
    auto apply = [op](const auto& x, const auto& y) {
        if (op == 0) return x + y;
        if (op == 1) return x - y;
        return x * y;
    };
    std::vector<Poly> gaps;
    for (std::size_t i = 0; i + 1 < bp.size(); ++i) {
        Rational mid = midpoint(bp[i], bp[i + 1]);
        gaps.push_back(apply(gap_of(a, mid), gap_of(b, mid)));
    }
    std::vector<Rational> vals;
    for (const auto& x : bp) vals.push_back(apply(a(x), b(x)));
    return PwPoly(std::move(bp), std::move(gaps), std::move(vals));
}

PwPoly PwPoly::operator+(const PwPoly& o) const { return combine(*this, o, 0); }
PwPoly PwPoly::operator-(const PwPoly& o) const { return combine(*this, o, 1); }
PwPoly PwPoly::operator*(const PwPoly& o) const { return combine(*this, o, 2); }

PwPoly PwPoly::scaled(const Rational& c) const {
    std::vector<Poly> gaps;
    for (const auto& g : gaps_) gaps.push_back(g * Poly(c));
    std::vector<Rational> vals;
    for (const auto& v : vals_) vals.push_back(v * c);
    return PwPoly(bp_, std::move(gaps), std::move(vals));
}

PwPoly PwPoly::push_forward(const Affine& f) const {
    Affine inv = f.inverse();
    std::vector<Rational> bp;
    std::vector<Poly> gaps;
    std::vector<Rational> vals = vals_;
    for (const auto& x : bp_) bp.push_back(f(x));
    for (const auto& g : gaps_) gaps.push_back(g.compose(inv));
    if (f.slope.sign() < 0) {
        std::reverse(bp.begin(), bp.end());
        std::reverse(gaps.begin(), gaps.end());
        std::reverse(vals.begin(), vals.end());
    }
    return PwPoly(std::move(bp), std::move(gaps), std::move(vals));
}

Rational PwPoly::integrate(const Rational& a, const Rational& b) const {
    Rational total(0);
    for (std::size_t i = 0; i + 1 < bp_.size(); ++i) {
        Rational lo = max(a, bp_[i]);
        Rational hi = min(b, bp_[i + 1]);
        if (lo < hi) total += gaps_[i].integrate(lo, hi);
    }
    return total;
}

Rational PwPoly::integral() const {
    if (bp_.empty()) return Rational(0);
    return integrate(bp_.front(), bp_.back());
}

IntervalSet PwPoly::nonzero_set() const {
    std::vector<Interval> parts;
    for (std::size_t i = 0; i < bp_.size(); ++i) {
        if (!vals_[i].is_zero()) parts.push_back(Interval::point(bp_[i]));
        if (i + 1 == bp_.size() || gaps_[i].is_zero()) continue;
        const Poly& g = gaps_[i];
        Interval gap = Interval::open(bp_[i], bp_[i + 1]);
        if (g.degree() == 1) {
            Rational root = -g.coeffs()[0] / g.coeffs()[1];
            if (gap.contains(root)) {
                parts.push_back(Interval::open(bp_[i], root));
                parts.push_back(Interval::open(root, bp_[i + 1]));
                continue;
            }
        }
        parts.push_back(gap);
    }
    return IntervalSet(std::move(parts));
}

IntervalSet PwPoly::support() const { return nonzero_set().closure(); }

bool PwPoly::is_continuous() const {
    for (std::size_t i = 0; i < bp_.size(); ++i)
        if (limit_left(bp_[i]) != vals_[i] || limit_right(bp_[i]) != vals_[i]) return false;
    return true;
}

double PwPoly::sup_abs() const {
    double m = 0;
    for (const auto& v : vals_) m = std::max(m, std::abs(v.to_double()));
    for (std::size_t i = 0; i + 1 < bp_.size(); ++i) {
        const Poly& g = gaps_[i];
        m = std::max(m, std::abs(g(bp_[i]).to_double()));
        m = std::max(m, std::abs(g(bp_[i + 1]).to_double()));
        if (g.degree() >= 2) {
            double a = bp_[i].to_double(), b = bp_[i + 1].to_double();
            for (int k = 1; k < 64; ++k) m = std::max(m, std::abs(g(a + (b - a) * k / 64.0)));
        }
    }
    return m;
}

std::string PwPoly::str() const {
    if (bp_.empty()) return "0";
    std::string s;
    for (std::size_t i = 0; i < bp_.size(); ++i) {
        s += "{" + bp_[i].str() + ":" + vals_[i].str() + "}";
        if (i + 1 < bp_.size()) s += " " + gaps_[i].str() + " ";
    }
    return s;
}

}  // namespace xferop
