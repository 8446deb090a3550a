#include "oracles.hpp"

#include "xferop/battery.hpp"
#include "xferop/dynamics.hpp"
#include "xferop/errors.hpp"
#include "xferop/groupoid.hpp"
#include "xferop/io.hpp"
#include "xferop/rep.hpp"

#include <doctest.h>

using namespace xferop;

namespace {

Fn cyl(const Graph& g, std::vector<int> edges) {
    Word w{g.r(edges.front()), edges};
    return [w](const Point& x) { return std::get<Path>(x).in_cylinder(w) ? 1.0 : 0.0; };
}

}  // namespace

TEST_SUITE("groupoid") {

TEST_CASE("groupoid axioms on the truncated Deaconu groupoid") {
    for (const char* name : {"fullshift2", "loop1", "loops2"}) {
        Spec s = load_spec_or_bundled(name);
        for (int depth : {3, 5}) {
            Deaconu G = build_deaconu(s.sys, s.pot, default_seeds(s.sys), depth);
            GroupoidAxioms ax = check_groupoid_axioms(G);
            CHECK_MESSAGE(ax.ok(), name << " depth " << depth);
            CHECK(ax.associativity_checked > 0);
            for (std::size_t i = 0; i < G.basis.size(); ++i) CHECK(G.find(i, 0, i));
        }
    }
}

TEST_CASE("element enumeration matches a brute-force tail comparison") {
    for (const char* name : {"fullshift2", "loops2"}) {
        Spec s = load_spec_or_bundled(name);
        for (int depth : {3, 4, 6}) {
            Deaconu G = build_deaconu(s.sys, s.pot, default_seeds(s.sys), depth);
            auto expect = oracle::groupoid_elements(G.basis.points, depth);
            std::set<std::tuple<std::size_t, int, std::size_t>> got;
            for (const auto& e : G.elements) {
                got.insert({e.x, e.k, e.y});
                CHECK(e.n - e.m == e.k);
                CHECK(phi_n(s.sys, G.basis.points[e.x], e.n) == phi_n(s.sys, G.basis.points[e.y], e.m));
            }
            CHECK(got.size() == G.elements.size());
            CHECK_MESSAGE(got == expect, name << " depth " << depth);
        }
    }
}

TEST_CASE("non-local-homeomorphisms need the regular restriction") {
    Spec t = load_spec_or_bundled("tent_std");
    try {
        build_deaconu(t.sys, t.pot, default_seeds(t.sys), 4);
        FAIL("expected NotLocalHomeo");
    } catch (const Error& e) {
        CHECK(e.code() == "NotLocalHomeo");
    }
    Deaconu G = build_deaconu(t.sys, t.pot, default_seeds(t.sys), 4, true);
    CHECK(G.restricted);
    CHECK(check_groupoid_axioms(G).ok());
}

TEST_CASE("GAP relation is a nested equivalence relation") {
    for (const char* name : {"fullshift2", "loops2", "doubling", "tent_std"}) {
        Spec s = load_spec_or_bundled(name);
        std::vector<Point> samples = default_seeds(s.sys);
        if (s.sys.is_interval())
            for (int i = 1; i < 16; ++i) samples.push_back(Point{Rational(i, 16)});
        for (int n = 0; n <= 3; ++n) {
            GapRelation R = gap_relation(s.sys, s.pot, n, samples);
            CHECK_MESSAGE(R.equivalence, name << " n=" << n);
            CHECK_MESSAGE(R.nested, name << " n=" << n);
            for (const auto& p : R.pairs) CHECK(phi_n(s.sys, p.x, p.n) == phi_n(s.sys, p.y, p.n));
        }
    }
}

TEST_CASE("Cuntz-Krieger relations for the graph generators") {
    for (const char* name : {"fullshift2", "loop1", "loops2"}) {
        Spec s = load_spec_or_bundled(name);
        GraphGenerators gg = graph_generators(s.sys, s.pot, 6);
        CHECK(!gg.residuals.empty());
        for (const auto& r : gg.residuals) CHECK_MESSAGE(r.pass(), name << " " << r.name << " " << r.value);
        CHECK(gg.s.size() == s.sys.graph().edges.size());
        CHECK(gg.p.size() == s.sys.graph().vertices.size());
    }
    CHECK_THROWS_AS(graph_generators(load_spec_or_bundled("tent_std").sys, load_spec_or_bundled("tent_std").pot, 3),
                    Error);
}

TEST_CASE("convolution is carried to products by Phi") {
    Spec s = load_spec_or_bundled("fullshift2");
    auto rows = iso_battery(s.sys, s.pot, 6, 3, 20, 0);
    CHECK(rows.size() == 20);
    for (const auto& row : rows) {
        CHECK_MESSAGE(row.r.value <= 1e-10, row.f << " * " << row.g);
        CHECK(row.r.interior > 0);
    }
}

TEST_CASE("diagonal of Phi(a (x) b) agrees with G") {
    Spec s = load_spec_or_bundled("fullshift2");
    const auto& g = s.sys.graph();
    RepPair R = regular_rep(s.sys, s.pot, default_seeds(s.sys), 6, 3);
    std::vector<Fn> pool{cyl(g, {0}), cyl(g, {1}), cyl(g, {0, 1}), cyl(g, {1, 1, 0})};
    for (const auto& a : pool)
        for (const auto& b : pool)
            for (int n = 0; n <= 2; ++n) {
                Residual r = expectation_compat(R, a, b, n);
                CHECK(r.value <= 1e-10);
                CHECK(r.interior > 0);
            }
}

}
