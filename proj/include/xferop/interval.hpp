#pragma once

#include "xferop/rational.hpp"

#include <optional>
#include <string>
#include <vector>

namespace xferop {

// x -> slope*x + intercept
struct Affine {
    Rational slope{1};
    Rational intercept{0};

    Rational operator()(const Rational& x) const { return slope * x + intercept; }
    double operator()(double x) const { return slope.to_double() * x + intercept.to_double(); }
    Affine inverse() const;
    // (this after inner)(x) = this(inner(x))
    Affine after(const Affine& inner) const;
    bool is_identity() const { return slope == Rational(1) && intercept.is_zero(); }
    std::string str() const;
    friend bool operator==(const Affine&, const Affine&) = default;
};

struct Interval {
    Rational lo;
    Rational hi;
    bool lo_closed = true;
    bool hi_closed = true;

    static Interval closed(const Rational& a, const Rational& b) { return {a, b, true, true}; }
    static Interval open(const Rational& a, const Rational& b) { return {a, b, false, false}; }
    static Interval closed_open(const Rational& a, const Rational& b) { return {a, b, true, false}; }
    static Interval open_closed(const Rational& a, const Rational& b) { return {a, b, false, true}; }
    static Interval point(const Rational& p) { return {p, p, true, true}; }

    bool empty() const { return hi < lo || (lo == hi && !(lo_closed && hi_closed)); }
    bool degenerate() const { return lo == hi; }
    bool contains(const Rational& x) const;
    Rational length() const { return empty() ? Rational(0) : hi - lo; }
    Interval intersect(const Interval& o) const;
    Interval image(const Affine& f) const;
    std::string str() const;
    friend bool operator==(const Interval&, const Interval&) = default;
};

// Finite union of rational intervals kept in a canonical form: components are
// sorted, pairwise disjoint, and no two of them can be merged into one.
class IntervalSet {
public:
    IntervalSet() = default;
    IntervalSet(const Interval& iv);  // NOLINT
    explicit IntervalSet(std::vector<Interval> parts);

    static IntervalSet point(const Rational& p) { return IntervalSet(Interval::point(p)); }
    static IntervalSet points(const std::vector<Rational>& ps);

    const std::vector<Interval>& components() const { return comps_; }
    bool empty() const { return comps_.empty(); }
    bool contains(const Rational& x) const;
    bool contains(const IntervalSet& o) const { return o.minus(*this).empty(); }

    IntervalSet unite(const IntervalSet& o) const;
    IntervalSet intersect(const IntervalSet& o) const;
    IntervalSet minus(const IntervalSet& o) const;
    IntervalSet closure() const;
    // Interior relative to the ambient set X (which must contain *this).
    IntervalSet interior_in(const IntervalSet& X) const;
    bool is_open_in(const IntervalSet& X) const;
    IntervalSet image(const Affine& f) const;
    IntervalSet preimage(const Affine& f) const { return image(f.inverse()); }

    Rational measure() const;
    std::vector<Rational> endpoints() const;
    std::vector<Rational> isolated_points() const;
    bool has_nondegenerate() const;
    std::optional<Rational> lower() const;
    std::optional<Rational> upper() const;
    // A rational inside the set, preferring interior midpoints.
    std::optional<Rational> sample_point() const;

    std::string str() const;
    friend bool operator==(const IntervalSet&, const IntervalSet&) = default;

private:
    std::vector<Interval> comps_;
};

}  // namespace xferop
