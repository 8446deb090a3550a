#include "oracles.hpp"

#include "xferop/dynamics.hpp"
#include "xferop/errors.hpp"
#include "xferop/io.hpp"
#include "xferop/rep.hpp"

#include <doctest.h>

using namespace xferop;

namespace {

std::set<Point> as_set(const std::vector<PreimageEntry>& v) {
    std::set<Point> s;
    for (const auto& e : v) s.insert(e.x);
    return s;
}

const char* kIntervalSpecs[] = {"tent_std", "tent_half", "doubling", "halving"};

}  // namespace

TEST_SUITE("dynamics") {

TEST_CASE("tent preimage counts against the closed form and the branch oracle") {
    Spec t = load_spec_or_bundled("tent_std");
    for (int n = 1; n <= 12; ++n) {
        auto one = preimages(t.sys, t.pot, Point{Rational(1)}, n, false);
        auto zero = preimages(t.sys, t.pot, Point{Rational(0)}, n, false);
        CHECK(one.size() == (1UL << (n - 1)));
        CHECK(zero.size() == (1UL << (n - 1)) + 1);
        if (n <= 8) {
            auto o1 = oracle::preimages(t.sys.interval(), Rational(1), n);
            std::set<Point> e1;
            for (const auto& x : o1) e1.insert(Point{x});
            CHECK(as_set(one) == e1);
        }
    }
}

TEST_CASE("preimages compose one step at a time") {
    std::mt19937_64 rng(11);
    for (const char* name : kIntervalSpecs) {
        Spec s = load_spec_or_bundled(name);
        for (int trial = 0; trial < 8; ++trial) {
            Point y{oracle::random_rational(rng)};
            for (int n = 0; n <= 4; ++n) {
                auto next = as_set(preimages(s.sys, s.pot, y, n + 1, false));
                std::set<Point> composed;
                for (const auto& e : preimages(s.sys, s.pot, y, n, false))
                    for (const auto& x : preimages(s.sys, s.pot, e.x, 1, false)) composed.insert(x.x);
                CHECK_MESSAGE(next == composed, name << " y=" << point_str(s.sys, y) << " n=" << n);
            }
        }
    }
    Spec f = load_spec_or_bundled("fullshift2");
    for (const auto& y : default_seeds(f.sys))
        for (int n = 0; n <= 3; ++n) {
            auto next = as_set(preimages(f.sys, f.pot, y, n + 1, false));
            std::set<Point> composed;
            for (const auto& e : preimages(f.sys, f.pot, y, n, false))
                for (const auto& x : preimages(f.sys, f.pot, e.x, 1, false)) composed.insert(x.x);
            CHECK(next == composed);
            CHECK(next.size() == (2UL << n));
        }
}

TEST_CASE("preimage weights are the cocycle and match the oracle product") {
    Spec s = load_spec_or_bundled("halving");
    auto pre = preimages(s.sys, s.pot, Point{Rational(1, 8)}, 3, false);
    REQUIRE(pre.size() == 1);
    // 1/8 <- 1/4 <- 1/2 <- 1 under x/2, with rho = 1 - x
    CHECK(std::get<Rational>(pre[0].x) == Rational(1));
    CHECK(pre[0].weight == Rational(0));
    CHECK(preimages(s.sys, s.pot, Point{Rational(1, 8)}, 3, true).empty());
    auto two = preimages(s.sys, s.pot, Point{Rational(1, 8)}, 2, false);
    REQUIRE(two.size() == 1);
    CHECK(two[0].weight == Rational(1, 2) * Rational(3, 4));
}

TEST_CASE("cocycle law rho_{n+m}(x) = rho_n(x) rho_m(phi^n x)") {
    std::mt19937_64 rng(5);
    for (const char* name : kIntervalSpecs) {
        Spec s = load_spec_or_bundled(name);
        int checked = 0;
        for (int trial = 0; trial < 60; ++trial) {
            Point x{oracle::random_rational(rng)};
            for (int n = 0; n <= 3; ++n)
                for (int m = 0; m <= 3; ++m) {
                    if (orbit_depth(s.sys, x, n + m) < n + m) continue;
                    Rational lhs = cocycle(s.sys, s.pot, n + m, x);
                    Rational rhs = cocycle(s.sys, s.pot, n, x) * cocycle(s.sys, s.pot, m, phi_n(s.sys, x, n));
                    CHECK(lhs == rhs);
                    ++checked;
                }
        }
        CHECK(checked > 50);
    }
}

TEST_CASE("cocycle matches the oracle product along the orbit") {
    Spec s = load_spec_or_bundled("tent_std");
    const auto& is = s.sys.interval();
    const auto& ip = s.pot.interval();
    std::mt19937_64 rng(3);
    for (int trial = 0; trial < 40; ++trial) {
        Rational x = oracle::dyadic(rng, 6);
        Rational w(1), z = x;
        for (int k = 0; k < 5; ++k) {
            w *= oracle::rho(ip, z);
            const Branch* b = oracle::branch_of(is, z);
            REQUIRE(b);
            z = b->map(z);
        }
        CHECK(cocycle(s.sys, s.pot, 5, Point{x}) == w);
    }
}

TEST_CASE("regular set of the power system is the orbit-wise regular set") {
    std::mt19937_64 rng(9);
    for (const char* name : {"tent_std", "tent_half", "doubling"}) {
        Spec s = load_spec_or_bundled(name);
        RegionReport base = regular_set(s.sys, s.pot);
        for (int n = 1; n <= 3; ++n) {
            PoweredSystem P = power(s.sys, s.pot, n);
            RegionReport pr = regular_set_unchecked(P.sys, P.pot);
            for (int trial = 0; trial < 80; ++trial) {
                Point x{oracle::dyadic(rng, 5)};
                if (orbit_depth(s.sys, x, n) < n) continue;
                bool all = true;
                Point z = x;
                for (int i = 0; i < n; ++i) {
                    all = all && region_contains(base.delta_reg, z);
                    z = phi(s.sys, z);
                }
                CHECK_MESSAGE(region_contains(pr.delta_reg, x) == all, name << " n=" << n << " x=" << point_str(s.sys, x));
            }
        }
    }
}

TEST_CASE("Delta_reg is open in X") {
    for (const char* name : kIntervalSpecs) {
        Spec s = load_spec_or_bundled(name);
        RegionReport rr = regular_set(s.sys, s.pot);
        CHECK_MESSAGE(std::get<IntervalSet>(rr.delta_reg).is_open_in(s.sys.interval().space), name);
    }
}

TEST_CASE("rho is upper semicontinuous at its breakpoints") {
    for (const char* name : kIntervalSpecs) {
        Spec s = load_spec_or_bundled(name);
        const auto& ip = s.pot.interval();
        std::set<Rational> bps;
        for (const auto& piece : ip.pieces) {
            bps.insert(piece.domain.lo);
            bps.insert(piece.domain.hi);
        }
        for (const auto& b : bps) {
            if (!s.sys.interval().delta.contains(b)) continue;
            Rational at = rho(s.sys, s.pot, Point{b});
            for (int k = 4; k <= 40; k += 4) {
                Rational h(1, 1L << k);
                for (const Rational& x : {b - h, b + h})
                    if (s.sys.interval().delta.contains(x)) CHECK(rho(s.sys, s.pot, Point{x}) <= at + h * Rational(4));
            }
            for (int side : {-1, 1})
                if (auto l = ip.limit(b, side)) CHECK(*l <= at);
        }
    }
}

TEST_CASE("tent regions") {
    Spec t = load_spec_or_bundled("tent_std");
    RegionReport rr = regular_set(t.sys, t.pot);
    auto reg = std::get<IntervalSet>(rr.delta_reg);
    CHECK(!reg.contains(Rational(1, 2)));
    CHECK(reg.contains(Rational(0)));
    CHECK(reg.contains(Rational(1)));
    CHECK(std::get<IntervalSet>(rr.delta_pos) == IntervalSet(Interval::closed(0, 1)));
    Spec h = load_spec_or_bundled("tent_half");
    RegionReport hr = regular_set(h.sys, h.pot);
    CHECK(std::get<IntervalSet>(hr.delta_pos) == IntervalSet(Interval::closed(0, Rational(1, 2))));
}

TEST_CASE("iterated domains and the essential domain") {
    Spec h = load_spec_or_bundled("halving");
    // x -> x/2 on [0,1]: Delta_n = X, essential domain shrinks to {0}
    CHECK(region_subset(space_region(h.sys), iterate_domain(h.sys, 3)));
    EssentialDomain e = essential_domain(h.sys, 12);
    auto set = std::get<IntervalSet>(e.set);
    CHECK(set.contains(Rational(0)));
    CHECK(!set.contains(Rational(1, 2)));
}

TEST_CASE("depth bound is enforced") {
    Spec t = load_spec_or_bundled("tent_std");
    CHECK_THROWS_AS(preimages(t.sys, t.pot, Point{Rational(1)}, 40, false, 32), Error);
    try {
        preimages(t.sys, t.pot, Point{Rational(1)}, 40, false, 32);
    } catch (const Error& e) {
        CHECK(e.code() == "DepthExceeded");
    }
    CHECK_THROWS_AS(cocycle(t.sys, t.pot, 1, Point{Rational(2)}), Error);
}

}
