#include "xferop/interval.hpp"

#include "xferop/errors.hpp"

#include <algorithm>

namespace xferop {

Affine Affine::inverse() const {
    if (slope.is_zero()) throw Error("DivisionByZero", "inverse of a constant affine map");
    Rational inv = Rational(1) / slope;
    return {inv, -intercept * inv};
}

Affine Affine::after(const Affine& inner) const {
    return {slope * inner.slope, slope * inner.intercept + intercept};
}

std::string Affine::str() const { return slope.str() + "*x+" + intercept.str(); }

bool Interval::contains(const Rational& x) const {
    if (x < lo || x > hi) return false;
    if (x == lo && !lo_closed) return false;
    if (x == hi && !hi_closed) return false;
    return true;
}

Interval Interval::intersect(const Interval& o) const {
    Interval r;
    if (lo == o.lo) {
        r.lo = lo;
        r.lo_closed = lo_closed && o.lo_closed;
    } else if (lo > o.lo) {
        r.lo = lo;
        r.lo_closed = lo_closed;
    } else {
        r.lo = o.lo;
        r.lo_closed = o.lo_closed;
    }
    if (hi == o.hi) {
        r.hi = hi;
        r.hi_closed = hi_closed && o.hi_closed;
    } else if (hi < o.hi) {
        r.hi = hi;
        r.hi_closed = hi_closed;
    } else {
        r.hi = o.hi;
        r.hi_closed = o.hi_closed;
    }
    return r;
}

Interval Interval::image(const Affine& f) const {
    if (f.slope.is_zero()) return Interval::point(f.intercept);
    if (f.slope.sign() > 0) return {f(lo), f(hi), lo_closed, hi_closed};
    return {f(hi), f(lo), hi_closed, lo_closed};
}

std::string Interval::str() const {
    if (empty()) return "{}";
    if (degenerate()) return "{" + lo.str() + "}";
    return std::string(lo_closed ? "[" : "(") + lo.str() + "," + hi.str() + (hi_closed ? "]" : ")");
}

namespace {

std::vector<Interval> normalize(std::vector<Interval> parts) {
    parts.erase(std::remove_if(parts.begin(), parts.end(), [](const Interval& i) { return i.empty(); }),
                parts.end());
    std::sort(parts.begin(), parts.end(), [](const Interval& a, const Interval& b) {
        if (a.lo != b.lo) return a.lo < b.lo;
        return a.lo_closed && !b.lo_closed;
    });
    std::vector<Interval> out;
    for (const auto& p : parts) {
        if (!out.empty()) {
            Interval& c = out.back();
            bool touch = p.lo < c.hi || (p.lo == c.hi && (p.lo_closed || c.hi_closed));
            if (touch) {
                if (p.hi > c.hi) {
                    c.hi = p.hi;
                    c.hi_closed = p.hi_closed;
                } else if (p.hi == c.hi) {
                    c.hi_closed = c.hi_closed || p.hi_closed;
                }
                if (p.lo == c.lo) c.lo_closed = c.lo_closed || p.lo_closed;
                continue;
            }
        }
        out.push_back(p);
    }
    return out;
}

}  // namespace

IntervalSet::IntervalSet(const Interval& iv) : comps_(normalize({iv})) {}

IntervalSet::IntervalSet(std::vector<Interval> parts) : comps_(normalize(std::move(parts))) {}

IntervalSet IntervalSet::points(const std::vector<Rational>& ps) {
    std::vector<Interval> parts;
    for (const auto& p : ps) parts.push_back(Interval::point(p));
    return IntervalSet(std::move(parts));
}

bool IntervalSet::contains(const Rational& x) const {
    auto it = std::upper_bound(comps_.begin(), comps_.end(), x,
                               [](const Rational& v, const Interval& i) { return v < i.lo; });
    if (it == comps_.begin()) return false;
    return std::prev(it)->contains(x);
}

IntervalSet IntervalSet::unite(const IntervalSet& o) const {
    std::vector<Interval> parts = comps_;
    parts.insert(parts.end(), o.comps_.begin(), o.comps_.end());
    return IntervalSet(std::move(parts));
}

IntervalSet IntervalSet::intersect(const IntervalSet& o) const {
    std::vector<Interval> parts;
    for (const auto& a : comps_)
        for (const auto& b : o.comps_) {
            if (b.lo > a.hi) break;
            Interval c = a.intersect(b);
            if (!c.empty()) parts.push_back(c);
        }
    return IntervalSet(std::move(parts));
}

IntervalSet IntervalSet::minus(const IntervalSet& o) const {
    std::vector<Interval> result;
    for (const auto& a : comps_) {
        std::vector<Interval> pieces{a};
        for (const auto& b : o.comps_) {
            std::vector<Interval> next;
            for (const auto& p : pieces) {
                if (p.intersect(b).empty()) {
                    next.push_back(p);
                    continue;
                }
                Interval left = p.intersect(Interval{p.lo, b.lo, p.lo_closed, !b.lo_closed});
                Interval right = p.intersect(Interval{b.hi, p.hi, !b.hi_closed, p.hi_closed});
                if (!left.empty()) next.push_back(left);
                if (!right.empty()) next.push_back(right);
            }
            pieces = std::move(next);
        }
        result.insert(result.end(), pieces.begin(), pieces.end());
    }
    return IntervalSet(std::move(result));
}

IntervalSet IntervalSet::closure() const {
    std::vector<Interval> parts = comps_;
    for (auto& p : parts) p.lo_closed = p.hi_closed = true;
    return IntervalSet(std::move(parts));
}

IntervalSet IntervalSet::interior_in(const IntervalSet& X) const {
    return X.minus(X.minus(*this).closure());
}

bool IntervalSet::is_open_in(const IntervalSet& X) const {
    return intersect(X.minus(*this).closure()).empty();
}

IntervalSet IntervalSet::image(const Affine& f) const {
    std::vector<Interval> parts;
    for (const auto& c : comps_) parts.push_back(c.image(f));
    return IntervalSet(std::move(parts));
}

Rational IntervalSet::measure() const {
    Rational m(0);
    for (const auto& c : comps_) m += c.length();
    return m;
}

std::vector<Rational> IntervalSet::endpoints() const {
    std::vector<Rational> out;
    for (const auto& c : comps_) {
        out.push_back(c.lo);
        if (c.hi != c.lo) out.push_back(c.hi);
    }
    return out;
}

std::vector<Rational> IntervalSet::isolated_points() const {
    std::vector<Rational> out;
    for (const auto& c : comps_)
        if (c.degenerate()) out.push_back(c.lo);
    return out;
}

bool IntervalSet::has_nondegenerate() const {
    return std::any_of(comps_.begin(), comps_.end(), [](const Interval& c) { return !c.degenerate(); });
}

std::optional<Rational> IntervalSet::lower() const {
    if (comps_.empty()) return std::nullopt;
    return comps_.front().lo;
}

std::optional<Rational> IntervalSet::upper() const {
    if (comps_.empty()) return std::nullopt;
    return comps_.back().hi;
}

std::optional<Rational> IntervalSet::sample_point() const {
    for (const auto& c : comps_)
        if (!c.degenerate()) return midpoint(c.lo, c.hi);
    if (!comps_.empty()) return comps_.front().lo;
    return std::nullopt;
}

std::string IntervalSet::str() const {
    if (comps_.empty()) return "{}";
    std::string s;
    for (std::size_t i = 0; i < comps_.size(); ++i) {
        if (i) s += " U ";
        s += comps_[i].str();
    }
    return s;
}

}  // namespace xferop
