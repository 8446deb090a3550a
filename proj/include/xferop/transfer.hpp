#pragma once

#include "xferop/system.hpp"

#include <optional>
#include <string>
#include <vector>

namespace xferop {

struct Defect {
    std::string kind;
    std::string location;
    std::string message;
    std::optional<Rational> required;
    std::optional<Rational> found;
};

struct TransferHandle {
    PartialSystem sys;
    Potential pot;
    bool validated = false;
    Rational norm;            // sup_y sum_{phi(x)=y} rho(x)
    std::string norm_witness;  // where the sup is attained (value or one-sided limit)
    bool norm_exact = true;
};

struct ValidationResult {
    bool valid = false;
    std::vector<Defect> defects;
    std::optional<TransferHandle> handle;
};

ValidationResult validate(const PartialSystem& sys, const Potential& pot);
// validate() or throw NotValidated with the defect list.
TransferHandle require_valid(const PartialSystem& sys, const Potential& pot);

// L^n(a)(y) = sum_{x in phi^{-n}(y)} rho_n(x) a(x), exact; n = 0 gives a(y).
Rational apply(const TransferHandle& L, const TestFunction& a, const Point& y, int n);
// Same with a real-valued function (no exactness claim).
double apply_fn(const PartialSystem& sys, const Potential& pot, const Fn& a, const Point& y, int n);

// max_y |L((a∘phi) b)(y) - a(y) L(b)(y)| over the samples, exact.
Rational transfer_identity_check(const TransferHandle& L, const TestFunction& a, const TestFunction& b,
                                 const std::vector<Point>& samples);

struct AtomicMeasure {
    std::vector<std::pair<Point, double>> atoms;
    double mass() const;
    double integrate(const Fn& f) const;
};

// Uniform bins of [lo, hi]; densities are per-bin masses divided by bin width.
struct UlamMeasure {
    Rational lo, hi;
    std::vector<double> densities;
    double bin_width() const;
    double mass() const;
};

AtomicMeasure dual_apply(const TransferHandle& L, const AtomicMeasure& mu);

// Sparse exact Ulam matrix. entries[(i,j)] = (1/|B_i|) * integral over B_i of
// L(1_{B_j}); column j is the bin-averaged image of the j-th indicator.
struct UlamMatrix {
    int m = 0;
    Rational lo, hi;
    struct Entry {
        int i, j;
        Rational value;
    };
    std::vector<Entry> entries;
    std::vector<std::vector<double>> dense() const;
    std::string csv() const;
};
UlamMatrix ulam_matrix(const TransferHandle& L, int m);
UlamMeasure dual_apply(const TransferHandle& L, const UlamMeasure& mu);

// Function-level transfer on the interval backend:
// (L_w f)(y) = sum over branches of (w f 1_dom)(b^{-1} y), exact.
PwPoly transfer_pw(const IntervalSystem& sys, const PwPoly& weight, const PwPoly& f);

}  // namespace xferop
