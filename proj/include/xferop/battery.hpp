#pragma once

#include "xferop/groupoid.hpp"
#include "xferop/rep.hpp"
#include "xferop/thermo.hpp"

#include <cstdint>
#include <string>
#include <vector>

namespace xferop {

// Seeded family of test functions. Interval backend: polynomials, hats and
// splits with dyadic breakpoints; graph backend: cylinder combinations.
struct Battery {
    std::vector<Fn> fns;
    std::vector<std::string> labels;
    Region K;                        // compact subset of Delta_reg
    std::vector<Fn> supported;       // supported in K, for covariance
    std::vector<std::string> supported_labels;
    std::uint64_t seed = 0;
};
Battery function_battery(const PartialSystem& sys, const Potential& pot, std::size_t count, std::uint64_t seed);

struct RelationSummary {
    std::string name;
    double worst = 0;
    double tol = 1e-10;
    std::size_t checks = 0;
    std::size_t interior = 0;
    std::size_t boundary = 0;
    std::string witness;
    bool pass() const { return worst <= tol; }
};

struct RelationOptions {
    int depth = 6;
    int window = 3;
    std::size_t count = 50;
    std::uint64_t seed = 0;
    double tol = 1e-10;
};

// Transfer relation, commutation, covariance on K, monomial products, gauge
// and the G formula over the battery; one summary row per relation.
std::vector<RelationSummary> relation_battery(const PartialSystem& sys, const Potential& pot,
                                              const RelationOptions& opt);

struct KMSRow {
    std::size_t id = 0;
    std::string first;
    std::string second;
    int degree = 0;  // (n1 + n2) - (m1 + m2); the state vanishes on both sides unless 0
    KMSResidual r;
};
// Monomial pairs a t^n t*^m b with n, m <= 2 from a small fixed function pool;
// the pair order is drawn from the seed and about half the pairs have nonzero degree.
std::vector<KMSRow> kms_battery(const PartialSystem& sys, const Potential& pot, const Potential& psi, double beta,
                                const Measure& mu, std::size_t count, std::uint64_t seed);

struct IsoRow {
    std::string f;
    std::string g;
    Residual r;
};
// Phi(f) Phi(g) against the convolution f * g on the regular representation,
// for pairs of cylinder (graph) or polynomial (interval) monomials with n, m <= 1.
std::vector<IsoRow> iso_battery(const PartialSystem& sys, const Potential& pot, int depth, int window,
                                std::size_t count, std::uint64_t seed);

}  // namespace xferop
