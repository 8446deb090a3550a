#pragma once

#include "xferop/graph.hpp"
#include "xferop/poly.hpp"

#include <functional>
#include <optional>
#include <string>
#include <variant>
#include <vector>

namespace xferop {

// One branch of phi: x -> map(x) on domain.
struct Branch {
    Interval domain;
    Affine map;
};

struct IntervalSystem {
    std::vector<Interval> space_parts;  // as written in the spec
    std::vector<Branch> branches;

    IntervalSet space;  // X
    IntervalSet delta;  // union of branch domains

    void finalize();
    // Index of the branch whose domain contains x.
    std::optional<std::size_t> branch_at(const Rational& x) const;
    // Branch whose domain contains points arbitrarily close to x on the given
    // side (side < 0: left, side > 0: right).
    std::optional<std::size_t> branch_near(const Rational& x, int side) const;
};

struct GraphSystem {
    GraphPtr graph;
};

struct PartialSystem {
    std::variant<IntervalSystem, GraphSystem> backend;

    bool is_interval() const { return backend.index() == 0; }
    bool is_graph() const { return backend.index() == 1; }
    const IntervalSystem& interval() const { return std::get<IntervalSystem>(backend); }
    const GraphSystem& graph_system() const { return std::get<GraphSystem>(backend); }
    const Graph& graph() const { return *std::get<GraphSystem>(backend).graph; }
    const GraphPtr& graph_ptr() const { return std::get<GraphSystem>(backend).graph; }
};

struct PotentialPiece {
    Interval domain;
    FactoredPoly f;
};

struct IntervalPotential {
    std::vector<PotentialPiece> pieces;
    std::vector<std::pair<Rational, Rational>> overrides;

    std::optional<Rational> override_at(const Rational& x) const;
    const PotentialPiece* piece_at(const Rational& x) const;
    // Piece accumulating at x from the given side.
    const PotentialPiece* piece_near(const Rational& x, int side) const;
    // One-sided limit of rho at x (nullopt if no piece approaches from that side).
    std::optional<Rational> limit(const Rational& x, int side) const;
    // rho as an exact piecewise polynomial (zero outside the pieces).
    PwPoly as_pwpoly() const;
};

struct GraphPotential {
    std::vector<Rational> weights;  // indexed by edge
};

struct Potential {
    std::variant<IntervalPotential, GraphPotential> data;

    bool is_interval() const { return data.index() == 0; }
    const IntervalPotential& interval() const { return std::get<IntervalPotential>(data); }
    const GraphPotential& graph() const { return std::get<GraphPotential>(data); }
};

using Point = std::variant<Rational, Path>;
using Region = std::variant<IntervalSet, CylinderSet>;

// A system spec as read from disk.
struct Spec {
    std::string name;
    PartialSystem sys;
    Potential pot;
    int depth_bound = 32;
};

// ---- points
bool in_space(const PartialSystem& sys, const Point& x);
bool in_delta(const PartialSystem& sys, const Point& x);
Point phi(const PartialSystem& sys, const Point& x);
// phi^n(x), throwing OutOfDomain if the orbit leaves Delta early.
Point phi_n(const PartialSystem& sys, const Point& x, int n);
// Largest k <= cap with x in Delta_k.
int orbit_depth(const PartialSystem& sys, const Point& x, int cap);
Rational rho(const PartialSystem& sys, const Potential& pot, const Point& x);
// phi^{-1}(y), sorted and without repetition.
std::vector<Point> preimages1(const PartialSystem& sys, const Point& y);
std::string point_str(const PartialSystem& sys, const Point& x);
Point parse_point(const PartialSystem& sys, const std::string& text);
double point_coord(const Point& x);  // interval backend only

// ---- regions
Region space_region(const PartialSystem& sys);
Region delta_region(const PartialSystem& sys);
Region empty_region(const PartialSystem& sys);
Region region_image(const PartialSystem& sys, const Region& s);     // phi(S ∩ Delta)
Region region_preimage(const PartialSystem& sys, const Region& s);  // phi^{-1}(S)
Region region_unite(const Region& a, const Region& b);
Region region_intersect(const Region& a, const Region& b);
Region region_minus(const Region& a, const Region& b);
bool region_empty(const Region& a);
bool region_contains(const Region& a, const Point& x);
bool region_subset(const Region& a, const Region& b);
std::string region_str(const Region& a);

// ---- test functions
// Graph test function: sum of coefficients times cylinder indicators.
struct CylFn {
    std::vector<std::pair<Word, Rational>> terms;
};
using TestFunction = std::variant<PwPoly, CylFn>;
using Fn = std::function<double(const Point&)>;

Rational eval(const TestFunction& f, const Point& x);
Fn as_fn(const TestFunction& f);
TestFunction tf_product(const TestFunction& a, const TestFunction& b);
Region tf_support(const PartialSystem& sys, const TestFunction& f);
TestFunction tf_one(const PartialSystem& sys);

}  // namespace xferop
