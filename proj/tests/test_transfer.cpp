#include "oracles.hpp"

#include "xferop/dynamics.hpp"
#include "xferop/errors.hpp"
#include "xferop/io.hpp"
#include "xferop/transfer.hpp"

#include <doctest.h>

using namespace xferop;

namespace {

PwPoly random_nonneg(std::mt19937_64& rng) {
    Rational a = oracle::dyadic(rng, 4), b = oracle::dyadic(rng, 4);
    if (b < a) std::swap(a, b);
    if (a == b) b = a + Rational(1, 16);
    std::uniform_int_distribution<int> p(1, 6);
    return PwPoly::hat(a, (a + b) / Rational(2), b, Rational(p(rng), 3));
}

std::vector<Point> grid(int n) {
    std::vector<Point> out;
    for (int i = 0; i <= n; ++i) out.push_back(Point{Rational(i, n)});
    return out;
}

}  // namespace

TEST_SUITE("transfer") {

TEST_CASE("bundled specs validate and the norm is the fibre-sum supremum") {
    for (const char* name : {"tent_std", "tent_half", "doubling", "halving", "loop1", "loops2", "fullshift2"}) {
        Spec s = load_spec_or_bundled(name);
        ValidationResult v = validate(s.sys, s.pot);
        CHECK_MESSAGE(v.valid, name);
        REQUIRE(v.handle);
        if (!s.sys.is_interval()) continue;
        TestFunction one = tf_one(s.sys);
        Rational best(0);
        for (const auto& y : grid(64)) {
            Rational val = apply(*v.handle, one, y, 1);
            CHECK(val <= v.handle->norm);
            if (val > best) best = val;
        }
        CHECK_MESSAGE(v.handle->norm - best <= Rational(1, 16), name);
    }
    CHECK(require_valid(load_spec_or_bundled("tent_std").sys, load_spec_or_bundled("tent_std").pot).norm == Rational(1));
    Spec h = load_spec_or_bundled("halving");
    CHECK(require_valid(h.sys, h.pot).norm == Rational(1));
}

TEST_CASE("negative potentials are rejected with a defect") {
    std::string bad = R"({"name":"neg","backend":"interval",
      "space":[{"lo":"0","hi":"1","lo_closed":true,"hi_closed":true}],
      "branches":[{"domain":{"lo":"0","hi":"1","lo_closed":true,"hi_closed":true},"slope":"1/2","intercept":"0"}],
      "potential":{"pieces":[{"domain":{"lo":"0","hi":"1","lo_closed":true,"hi_closed":true},"slope":"0","intercept":"-1"}],"overrides":[]}})";
    Spec s = parse_spec_text(bad, "neg");
    ValidationResult v = validate(s.sys, s.pot);
    CHECK(!v.valid);
    CHECK(!v.defects.empty());
    CHECK_THROWS_AS(require_valid(s.sys, s.pot), Error);
}

TEST_CASE("transfer operator agrees with the fibre oracle") {
    std::mt19937_64 rng(21);
    for (const char* name : {"tent_std", "tent_half", "doubling", "halving"}) {
        Spec s = load_spec_or_bundled(name);
        TransferHandle L = require_valid(s.sys, s.pot);
        for (int trial = 0; trial < 6; ++trial) {
            PwPoly a = random_nonneg(rng);
            for (int n = 0; n <= 3; ++n)
                for (const auto& y : grid(16)) {
                    Rational expect = oracle::transfer(s.sys.interval(), s.pot.interval(),
                                                       [&](const Rational& x) { return a(x); }, std::get<Rational>(y), n);
                    CHECK(apply(L, TestFunction{a}, y, n) == expect);
                }
        }
    }
}

TEST_CASE("positivity") {
    std::mt19937_64 rng(4);
    for (const char* name : {"tent_std", "tent_half", "doubling", "halving"}) {
        Spec s = load_spec_or_bundled(name);
        TransferHandle L = require_valid(s.sys, s.pot);
        for (int trial = 0; trial < 10; ++trial) {
            PwPoly a = random_nonneg(rng);
            for (int n = 1; n <= 3; ++n)
                for (const auto& y : grid(32)) CHECK(apply(L, TestFunction{a}, y, n).sign() >= 0);
        }
    }
}

TEST_CASE("L((a o phi) b) = a L(b)") {
    std::mt19937_64 rng(8);
    for (const char* name : {"tent_std", "doubling", "halving"}) {
        Spec s = load_spec_or_bundled(name);
        TransferHandle L = require_valid(s.sys, s.pot);
        for (int trial = 0; trial < 5; ++trial)
            CHECK(transfer_identity_check(L, TestFunction{random_nonneg(rng)}, TestFunction{random_nonneg(rng)}, grid(24))
                      .is_zero());
    }
}

TEST_CASE("duality with atomic measures against a fibre-sum oracle") {
    std::mt19937_64 rng(13);
    Spec s = load_spec_or_bundled("tent_std");
    TransferHandle L = require_valid(s.sys, s.pot);
    AtomicMeasure mu;
    for (int i = 0; i < 12; ++i) mu.atoms.push_back({Point{oracle::dyadic(rng, 5)}, 1.0 / 16 * (i % 4 + 1)});
    AtomicMeasure pulled = dual_apply(L, mu);
    for (int trial = 0; trial < 8; ++trial) {
        PwPoly a = random_nonneg(rng);
        double lhs = 0;
        for (const auto& [y, w] : mu.atoms) {
            Rational ly = oracle::transfer(s.sys.interval(), s.pot.interval(), [&](const Rational& x) { return a(x); },
                                           std::get<Rational>(y), 1);
            lhs += w * ly.to_double();
        }
        double rhs = pulled.integrate([&](const Point& x) { return a(std::get<Rational>(x)).to_double(); });
        CHECK(std::abs(lhs - rhs) <= 1e-14);
    }
    CHECK(std::abs(pulled.mass() - mu.mass()) <= 1e-14);  // L(1) = 1 on the standard tent
}

TEST_CASE("L^2 equals one step of the squared system") {
    std::mt19937_64 rng(17);
    for (const char* name : {"tent_std", "tent_half", "doubling", "halving"}) {
        Spec s = load_spec_or_bundled(name);
        TransferHandle L = require_valid(s.sys, s.pot);
        PoweredSystem P = power(s.sys, s.pot, 2);
        TransferHandle L2 = require_valid(P.sys, P.pot);
        for (int trial = 0; trial < 4; ++trial) {
            PwPoly a = random_nonneg(rng);
            for (const auto& y : grid(20)) CHECK(apply(L, TestFunction{a}, y, 2) == apply(L2, TestFunction{a}, y, 1));
        }
    }
}

TEST_CASE("support of L(a) lies in phi(supp a)") {
    std::mt19937_64 rng(23);
    for (const char* name : {"tent_std", "tent_half", "doubling", "halving"}) {
        Spec s = load_spec_or_bundled(name);
        PwPoly rho_pw = s.pot.interval().as_pwpoly();
        for (int trial = 0; trial < 10; ++trial) {
            PwPoly a = random_nonneg(rng);
            PwPoly La = transfer_pw(s.sys.interval(), rho_pw, a);
            Region img = region_image(s.sys, Region{a.support()});
            CHECK(region_subset(Region{La.support()}, Region{std::get<IntervalSet>(img).closure()}));
            // function-level transfer agrees with the pointwise one
            TransferHandle L = require_valid(s.sys, s.pot);
            for (const auto& y : grid(16)) {
                Rational yy = std::get<Rational>(y);
                if (La.breakpoints().end() != std::find(La.breakpoints().begin(), La.breakpoints().end(), yy)) continue;
                CHECK(La(yy) == apply(L, TestFunction{a}, y, 1));
            }
        }
    }
}

TEST_CASE("Ulam matrix rows sum to one when L(1) = 1") {
    Spec s = load_spec_or_bundled("tent_std");
    TransferHandle L = require_valid(s.sys, s.pot);
    UlamMatrix U = ulam_matrix(L, 8);
    std::vector<Rational> rows(8, Rational(0));
    for (const auto& e : U.entries) rows[static_cast<std::size_t>(e.i)] += e.value;
    for (const auto& r : rows) CHECK(r == Rational(1));
    // Lebesgue is fixed by the dual on bin masses
    UlamMeasure leb{Rational(0), Rational(1), std::vector<double>(8, 1.0)};
    UlamMeasure img = dual_apply(L, leb);
    for (double d : img.densities) CHECK(std::abs(d - 1.0) <= 1e-14);
}

}
