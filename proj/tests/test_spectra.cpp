#include "oracles.hpp"

#include "xferop/dynamics.hpp"
#include "xferop/errors.hpp"
#include "xferop/io.hpp"
#include "xferop/rep.hpp"
#include "xferop/spectra.hpp"

#include <doctest.h>

using namespace xferop;

namespace {

std::vector<Point> grid(const PartialSystem& sys, int count) {
    if (sys.is_graph()) return default_seeds(sys);
    std::vector<Point> out;
    for (int i = 1; i <= count; ++i) {
        Point p{Rational(i, count + 1)};
        if (in_space(sys, p)) out.push_back(p);
    }
    return out;
}

bool region_equal(const Region& a, const Region& b) { return region_subset(a, b) && region_subset(b, a); }

std::string error_code(const std::function<void()>& f) {
    try {
        f();
    } catch (const Error& e) {
        return e.code();
    }
    return "";
}

}  // namespace

TEST_SUITE("spectra") {

TEST_CASE("fibre dimension is the number of positive-weight preimages") {
    for (const char* name : {"tent_std", "tent_half", "halving"}) {
        Spec s = load_spec_or_bundled(name);
        auto extra = grid(s.sys, 9);
        for (int n = 1; n <= 3; ++n) {
            SpectrumDescription d = spectrum_An(s.sys, s.pot, n, extra);
            CHECK(!d.samples.empty());
            for (const auto& p : d.samples) {
                auto fib = preimages(s.sys, s.pot, p.y, p.k, true);
                CHECK_MESSAGE(p.dim == fib.size(), name << " k=" << p.k << " y=" << point_str(s.sys, p.y));
                CHECK(p.dim > 0);
                CHECK(p.top == (p.k == n));
            }
        }
    }
}

TEST_CASE("lower strata avoid Delta_reg and lie in the images") {
    for (const char* name : {"tent_std", "tent_half", "doubling", "halving"}) {
        Spec s = load_spec_or_bundled(name);
        RegionReport rr = regular_set(s.sys, s.pot);
        SpectrumDescription d = spectrum_An(s.sys, s.pot, 3);
        REQUIRE(d.strata.size() == 4);
        for (int k = 0; k < 3; ++k) {
            CHECK(region_empty(region_intersect(d.strata[k], rr.delta_reg)));
            CHECK(region_subset(d.strata[k], d.images[k]));
        }
        CHECK(region_equal(d.strata[3], d.images[3]));
        for (const auto& g : d.generators) {
            CHECK_MESSAGE(g.compatible, name << " " << g.seed);
            CHECK_MESSAGE(g.open, name << " " << g.seed);
        }
    }
}

TEST_CASE("standard tent: strata at 1/2 with dimension 2^k and top stratum [0,1]") {
    Spec t = load_spec_or_bundled("tent_std");
    SpectrumDescription d = spectrum_An(t.sys, t.pot, 3, {Point{Rational(1, 2)}});
    for (int k = 0; k < 3; ++k) CHECK(region_equal(d.strata[k], Region{IntervalSet(Interval::point(Rational(1, 2)))}));
    CHECK(region_equal(d.strata[3], Region{IntervalSet(Interval::closed(0, 1))}));
    int half = 0;
    for (const auto& p : d.samples)
        if (p.k < 3) {
            CHECK(std::get<Rational>(p.y) == Rational(1, 2));
            CHECK(p.dim == (1UL << p.k));
            auto o = oracle::preimages(t.sys.interval(), Rational(1, 2), p.k);
            CHECK(p.dim == o.size());
            ++half;
        }
    CHECK(half == 3);
    CHECK(d.topology_exact == false);  // the override at 1/2 breaks continuity of rho
}

TEST_CASE("top-stratum dimensions at the endpoints") {
    Spec t = load_spec_or_bundled("tent_std");
    for (int n = 1; n <= 6; ++n) {
        KnSpectrum K = spectrum_Kn(t.sys, t.pot, n, {Point{Rational(0)}, Point{Rational(1)}});
        for (const auto& p : K.samples) {
            if (std::get<Rational>(p.y) == Rational(0)) CHECK(p.dim == (1UL << (n - 1)) + 1);
            if (std::get<Rational>(p.y) == Rational(1)) CHECK(p.dim == (1UL << (n - 1)));
        }
    }
}

TEST_CASE("half tent: [1/2,1] glued to [0,1] with a topology warning") {
    Spec h = load_spec_or_bundled("tent_half");
    SpectrumDescription d = spectrum_An(h.sys, h.pot, 1);
    REQUIRE(d.strata.size() == 2);
    CHECK(region_equal(d.strata[0], Region{IntervalSet(Interval::closed(Rational(1, 2), 1))}));
    CHECK(region_equal(d.strata[1], Region{IntervalSet(Interval::closed(0, 1))}));
    CHECK(!d.topology_exact);
    CHECK(!d.warnings.empty());
}

TEST_CASE("pi_y^k is irreducible on its fibre") {
    Spec t = load_spec_or_bundled("tent_std");
    for (int k = 0; k <= 3; ++k)
        for (const Rational& y : {Rational(1, 2), Rational(1, 3), Rational(1)}) {
            PiYK p = rep_pi_y_k(t.sys, t.pot, Point{y}, k, 4);
            CHECK(p.fibre.size() == preimages(t.sys, t.pot, Point{y}, k, true).size());
            CHECK(p.span_rank == p.fibre.size());
            CHECK(p.sigma_min >= 1e-8);
            CHECK(p.irreducible);
            for (double w : p.weights) CHECK(w > 0);
        }
}

TEST_CASE("pi_y^k outside the spectrum") {
    Spec h = load_spec_or_bundled("halving");
    CHECK(error_code([&] { rep_pi_y_k(h.sys, h.pot, Point{Rational(3, 4)}, 1); }) == "OutOfSpectrum");
    Spec th = load_spec_or_bundled("tent_half");
    // 1 <- 1/2 <- {1/4, 3/4}, and rho vanishes at 3/4
    PiYK p = rep_pi_y_k(th.sys, th.pot, Point{Rational(1)}, 2);
    REQUIRE(p.fibre.size() == 1);
    CHECK(std::get<Rational>(p.fibre[0]) == Rational(1, 4));
}

TEST_CASE("quasi-orbit classes and the brute-force cross-check") {
    std::vector<std::pair<const char*, std::size_t>> expect{{"doubling", 4}, {"fullshift2", 1}, {"loops2", 2}, {"loop1", 1}};
    for (const auto& [name, classes] : expect) {
        Spec s = load_spec_or_bundled(name);
        QuasiOrbitPartition q = quasi_orbits(s.sys, s.pot, 6, grid(s.sys, 15));
        CHECK_MESSAGE(q.representatives.size() == classes, name);
        CHECK(q.brute_force_agrees);
        CHECK(q.class_of.size() == q.samples.size());
    }
    Spec t = load_spec_or_bundled("tent_std");
    CHECK(error_code([&] { quasi_orbits(t.sys, t.pot, 6, grid(t.sys, 15)); }) == "HypothesisViolated");
}

}
