#pragma once

#include "xferop/rep.hpp"

#include <map>
#include <string>
#include <tuple>
#include <vector>

namespace xferop {

// (x, n - m, y) with phi^n(x) = phi^m(y); (n, m) is the smallest witness.
struct GroupoidElement {
    std::size_t x = 0;  // indices into the orbit basis
    int k = 0;
    std::size_t y = 0;
    int n = 0;
    int m = 0;
};

struct Deaconu {
    OrbitBasis basis;
    int depth = 0;
    std::vector<GroupoidElement> elements;
    std::map<std::tuple<std::size_t, int, std::size_t>, std::size_t> index;
    // (g, h, g*h) for composable pairs whose product is inside the truncation;
    // (g, h, npos) when it falls outside.
    std::vector<std::tuple<std::size_t, std::size_t, std::size_t>> products;
    std::vector<std::size_t> inverse;  // npos when outside the truncation
    bool restricted = false;           // built on Delta_reg only

    std::optional<std::size_t> find(std::size_t x, int k, std::size_t y) const;
    std::string csv(const PartialSystem& sys) const;
};

// Throws NotLocalHomeo unless Delta_reg = Delta_pos = Delta, or when
// restrict_regular is set, drops orbit points outside Delta_reg.
Deaconu build_deaconu(const PartialSystem& sys, const Potential& pot, const std::vector<Point>& seeds, int depth,
                      bool restrict_regular = false);

struct GroupoidAxioms {
    std::size_t associativity_checked = 0;
    std::size_t associativity_failures = 0;
    std::size_t inverse_failures = 0;  // g g^{-1} not a unit
    std::size_t unit_failures = 0;     // (x,0,x) not neutral
    bool ok() const { return associativity_failures + inverse_failures + unit_failures == 0; }
};
GroupoidAxioms check_groupoid_axioms(const Deaconu& G);

struct GapPair {
    int n = 0;
    Point x;
    Point y;
};
struct GapRelation {
    int n = 0;
    std::vector<GapPair> pairs;
    bool nested = true;       // every pair of R_n is also in R_{n+1} when phi^{n+1} is defined
    bool equivalence = true;  // reflexive, symmetric, transitive on the samples
};
GapRelation gap_relation(const PartialSystem& sys, const Potential& pot, int n, const std::vector<Point>& samples);

// Phi(a ⊗ b) at level (n, m) is a rho_n^{-1/2} t^n t*^m rho_m^{-1/2} b.
struct GroupoidMonomial {
    Fn a;
    Fn b;
    int n = 0;
    int m = 0;
};
Monomial phi_image(const PartialSystem& sys, const Potential& pot, const GroupoidMonomial& f);
// Compares Phi(f) Phi(g) with the regular-representation matrix of the
// groupoid convolution f * g, on rows where the product is exact.
Residual iso_phi_check(const RepPair& regular, const GroupoidMonomial& f, const GroupoidMonomial& g);
// The k = 0 diagonal of Phi(a ⊗ b) at level (n, n) against G of the same element.
Residual expectation_compat(const RepPair& regular, const Fn& a, const Fn& b, int n);

struct GraphGenerators {
    RepPair rep;
    std::vector<SpMat> s;  // per edge, prepending the edge
    std::vector<SpMat> p;  // per vertex
    std::vector<Residual> residuals;
    bool pass() const;
};
GraphGenerators graph_generators(const PartialSystem& sys, const Potential& pot, int depth,
                                 const std::vector<Point>& seeds = {});

}  // namespace xferop
