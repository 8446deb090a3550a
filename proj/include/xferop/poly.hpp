#pragma once

#include "xferop/interval.hpp"

#include <utility>
#include <vector>

namespace xferop {

// Dense polynomial with rational coefficients, lowest degree first.
class Poly {
public:
    Poly() = default;
    Poly(Rational c);  // NOLINT
    explicit Poly(std::vector<Rational> coeffs);
    static Poly affine(const Rational& slope, const Rational& intercept);
    static Poly affine(const Affine& f) { return affine(f.slope, f.intercept); }

    const std::vector<Rational>& coeffs() const { return c_; }
    int degree() const { return static_cast<int>(c_.size()) - 1; }  // -1 for zero
    bool is_zero() const { return c_.empty(); }
    bool is_constant() const { return c_.size() <= 1; }

    Rational operator()(const Rational& x) const;
    double operator()(double x) const;

    Poly operator+(const Poly& o) const;
    Poly operator-(const Poly& o) const;
    Poly operator*(const Poly& o) const;
    Poly operator-() const;
    // p(f(x))
    Poly compose(const Affine& f) const;
    Poly derivative() const;
    Poly antiderivative() const;
    Rational integrate(const Rational& a, const Rational& b) const;

    std::string str() const;
    friend bool operator==(const Poly&, const Poly&) = default;

private:
    void trim();
    std::vector<Rational> c_;
};

// scale * prod_i (slope_i x + intercept_i). Keeps zeros visible and stays
// closed under products and affine substitution, which is what cocycles need.
struct FactoredPoly {
    Rational scale{0};
    std::vector<Affine> factors;

    static FactoredPoly constant(const Rational& c) { return {c, {}}; }
    static FactoredPoly affine(const Rational& slope, const Rational& intercept);

    Rational operator()(const Rational& x) const;
    double operator()(double x) const;
    FactoredPoly operator*(const FactoredPoly& o) const;
    FactoredPoly compose(const Affine& f) const;
    Poly to_poly() const;
    // Real roots of the nonzero factors (empty when scale is zero).
    std::vector<Rational> roots() const;
    bool is_zero() const { return scale.is_zero(); }
    bool is_constant() const { return factors.empty(); }
    std::string str() const;

    void normalize();
    friend bool operator==(const FactoredPoly&, const FactoredPoly&) = default;
};

// Piecewise polynomial on the real line with exact point values at the
// breakpoints; identically zero outside [front breakpoint, back breakpoint].
class PwPoly {
public:
    PwPoly() = default;

    struct Piece {
        Interval domain;
        Poly poly;
    };
    // Pieces must be pairwise disjoint. Point values default to the piece
    // value; overrides replace them.
    static PwPoly from_pieces(const std::vector<Piece>& pieces,
                              const std::vector<std::pair<Rational, Rational>>& overrides = {});
    static PwPoly indicator(const IntervalSet& s);
    static PwPoly constant_on(const IntervalSet& s, const Rational& c);
    // Continuous piecewise-affine interpolant through (x_i, y_i), zero outside.
    static PwPoly linear_spline(const std::vector<std::pair<Rational, Rational>>& knots);
    // Hat: 0 at lo, peak at mid, 0 at hi.
    static PwPoly hat(const Rational& lo, const Rational& mid, const Rational& hi, const Rational& peak);

    const std::vector<Rational>& breakpoints() const { return bp_; }
    const std::vector<Poly>& gap_polys() const { return gaps_; }
    const std::vector<Rational>& point_values() const { return vals_; }

    Rational operator()(const Rational& x) const;
    double operator()(double x) const;
    Rational limit_left(const Rational& x) const;
    Rational limit_right(const Rational& x) const;

    PwPoly operator+(const PwPoly& o) const;
    PwPoly operator-(const PwPoly& o) const;
    PwPoly operator*(const PwPoly& o) const;
    PwPoly scaled(const Rational& c) const;
    // x -> this(f^{-1}(x)): pushes the graph forward along an affine bijection.
    PwPoly push_forward(const Affine& f) const;
    // x -> this(f(x)).
    PwPoly pull_back(const Affine& f) const { return push_forward(f.inverse()); }

    Rational integrate(const Rational& a, const Rational& b) const;
    Rational integral() const;
    // Closure of {x : f(x) != 0}.
    IntervalSet support() const;
    // Set where f != 0 (not closed).
    IntervalSet nonzero_set() const;
    bool is_zero() const { return bp_.empty(); }
    bool is_continuous() const;
    // Exact for piecewise affine functions; sampled otherwise.
    double sup_abs() const;
    std::string str() const;

    friend bool operator==(const PwPoly&, const PwPoly&) = default;

private:
    PwPoly(std::vector<Rational> bp, std::vector<Poly> gaps, std::vector<Rational> vals);
    void simplify();
    // Index of the gap (bp_[i], bp_[i+1]) containing x, -1 left of all, size-1 right.
    static PwPoly combine(const PwPoly& a, const PwPoly& b, int op);

    std::vector<Rational> bp_;
    std::vector<Poly> gaps_;   // gaps_[i] on (bp_[i], bp_[i+1])
    std::vector<Rational> vals_;
};

}  // namespace xferop
