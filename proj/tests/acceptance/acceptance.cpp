// One PASS/FAIL line per acceptance criterion. Tolerances and time budgets
// are fixed here; the exit status is the number of failed criteria.

#include "../oracles.hpp"

#include "xferop/battery.hpp"
#include "xferop/dynamics.hpp"
#include "xferop/errors.hpp"
#include "xferop/groupoid.hpp"
#include "xferop/io.hpp"
#include "xferop/rep.hpp"
#include "xferop/spectra.hpp"
#include "xferop/thermo.hpp"
#include "xferop/transfer.hpp"
#include "xferop/verdicts.hpp"

#include <chrono>
#include <cstdio>
#include <functional>
#include <numbers>
#include <sstream>

using namespace xferop;

namespace {

constexpr double kRelationTol = 1e-10;
constexpr double kGFormulaTol = 1e-12;
constexpr double kBetaTol = 1e-8;
constexpr double kMassTol = 1e-9;
constexpr double kStrongGap = 0.05;
constexpr double kKmsSideTol = 1e-5;
constexpr double kWitnessRegular = 0.1;
constexpr double kWitnessOrbit = 1e-10;
constexpr double kGroupoidTol = 1e-10;
constexpr double kRescaleTol = 1e-10;

struct Outcome {
    bool pass = true;
    std::ostringstream detail;
    void require(bool ok, const std::string& what) {
        if (!ok) {
            pass = false;
            detail << " [" << what << "]";
        }
    }
};

struct Criterion {
    int id;
    const char* title;
    double budget;  // seconds, 0 for none
    std::function<void(Outcome&)> run;
};

bool region_equal(const Region& a, const Region& b) { return region_subset(a, b) && region_subset(b, a); }
Region interval_region(const Interval& i) { return Region{IntervalSet(i)}; }

void tent_counts(Outcome& o) {
    Spec t = load_spec_or_bundled("tent_std");
    for (int n = 1; n <= 12; ++n) {
        auto one = preimages(t.sys, t.pot, Point{Rational(1)}, n, false).size();
        auto zero = preimages(t.sys, t.pot, Point{Rational(0)}, n, false).size();
        o.require(one == (1UL << (n - 1)), "|phi^-" + std::to_string(n) + "(1)| = " + std::to_string(one));
        o.require(zero == (1UL << (n - 1)) + 1, "|phi^-" + std::to_string(n) + "(0)| = " + std::to_string(zero));
    }
    o.detail << "n=1..12 exact";
}

void stratification(Outcome& o) {
    Spec t = load_spec_or_bundled("tent_std");
    SpectrumDescription d = spectrum_An(t.sys, t.pot, 3, {Point{Rational(1, 2)}});
    o.require(d.strata.size() == 4, "stratum count");
    if (d.strata.size() != 4) return;
    for (int k = 0; k < 3; ++k)
        o.require(region_equal(d.strata[k], interval_region(Interval::point(Rational(1, 2)))),
                  "stratum " + std::to_string(k) + " = " + region_str(d.strata[k]));
    o.require(region_equal(d.strata[3], interval_region(Interval::closed(0, 1))), "top stratum " + region_str(d.strata[3]));
    std::string dims;
    for (const auto& p : d.samples) {
        if (p.k >= 3) continue;
        std::size_t expect = 0;
        for (const auto& x : oracle::preimages(t.sys.interval(), Rational(1, 2), p.k)) {
            Rational w(1), z = x;
            for (int i = 0; i < p.k; ++i) {
                w *= oracle::rho(t.pot.interval(), z);
                z = oracle::branch_of(t.sys.interval(), z)->map(z);
            }
            if (w.sign() > 0) ++expect;
        }
        o.require(p.dim == expect, "dim pi_1/2^" + std::to_string(p.k));
        dims += (dims.empty() ? "" : ",") + std::to_string(p.dim);
    }
    o.detail << "tent_std dims(1/2)=" << dims;

    Spec h = load_spec_or_bundled("tent_half");
    SpectrumDescription e = spectrum_An(h.sys, h.pot, 1);
    o.require(e.strata.size() == 2, "tent_half stratum count");
    if (e.strata.size() != 2) return;
    o.require(region_equal(e.strata[0], interval_region(Interval::closed(Rational(1, 2), 1))), "tent_half lower stratum");
    o.require(region_equal(e.strata[1], interval_region(Interval::closed(0, 1))), "tent_half top stratum");
    o.require(!e.generators.empty(), "no pushout generators");
    for (const auto& g : e.generators) o.require(g.compatible && g.open, "generator " + g.seed);
    o.require(!e.topology_exact && !e.warnings.empty(), "topology warning");
    o.detail << "; tent_half " << region_str(e.strata[0]) << " + " << region_str(e.strata[1]) << ", "
             << e.warnings.size() << " warning(s)";
}

void relations(Outcome& o) {
    RelationOptions opt;
    opt.depth = 6;
    opt.window = 3;
    opt.count = 50;
    opt.seed = 0;
    opt.tol = kRelationTol;
    double worst = 0;
    for (const char* name : {"tent_std", "doubling", "fullshift2"}) {
        Spec s = load_spec_or_bundled(name);
        for (const auto& r : relation_battery(s.sys, s.pot, opt)) {
            o.require(r.worst <= kRelationTol && r.interior > 0, std::string(name) + " " + r.name);
            worst = std::max(worst, r.worst);
        }
    }
    o.detail << "worst residual " << worst;
}

void g_formula(Outcome& o) {
    Spec s = load_spec_or_bundled("tent_half");
    RepPair R = regular_rep(s.sys, s.pot, default_seeds(s.sys), 8, 7);
    double worst = 0;
    std::size_t points = 0;
    for (int n = 1; n <= 6; ++n) {
        Monomial M{fn_const(1), n, n, fn_const(1), "tt*"};
        auto diag = expectation_G(R, monomial_matrix(R, M), R.exact_rows(monomial_word(M)));
        o.require(!diag.empty(), "no interior points at n=" + std::to_string(n));
        for (const auto& d : diag) {
            double expect = std::get<Rational>(d.x) <= Rational(1, 1L << n) ? 1.0 : 0.0;
            worst = std::max(worst, std::abs(d.value - expect));
            ++points;
        }
    }
    o.require(worst <= kGFormulaTol, "residual");
    o.detail << points << " interior points, worst " << worst;
}

void conformal(Outcome& o) {
    Spec s = load_spec_or_bundled("tent_std");
    SolveOptions opt;
    opt.lo = 0.1;
    opt.hi = 3.0;
    opt.bins = 1024;
    KMSCandidate c = solve_conformal(s.sys, s.pot, parse_psi(s, "one"), opt);
    double err = std::abs(c.beta - std::numbers::ln2);
    double tv = total_variation_to_uniform(std::get<UlamMeasure>(c.mu));
    o.require(err <= kBetaTol, "beta");
    o.require(tv <= 5.0 / opt.bins, "total variation");
    o.detail << "beta*=" << c.beta << " |beta*-ln2|=" << err << " TV=" << tv << " (bound " << 5.0 / opt.bins << ")";
}

void family(Outcome& o) {
    Spec s = load_spec_or_bundled("tent_std");
    Potential psi = parse_psi(s, "one");
    std::vector<TestFunction> weak;
    RegionReport rr = regular_set(s.sys, s.pot);
    for (const auto& comp : std::get<IntervalSet>(rr.delta_reg).components()) {
        Rational w = comp.hi - comp.lo;
        Rational l = comp.lo + w / Rational(8), h = comp.hi - w / Rational(8);
        weak.push_back(PwPoly::hat(l, (l + h) / Rational(2), h, Rational(1)));
    }
    std::vector<TestFunction> strong{PwPoly::hat(Rational(1, 4), Rational(1, 2), Rational(3, 4), Rational(1))};
    for (double beta : {0.75, 1.0, 1.5}) {
        SeriesMeasure mu = mu_beta(beta, 30);
        double mass = total_mass(s.sys, mu) + mu.tail();
        auto wr = weakly_conformal_residual(s.sys, s.pot, psi, beta, mu, weak);
        double sr = conformal_residual(s.sys, s.pot, psi, beta, mu, strong).value;
        std::string b = "beta=" + std::to_string(beta);
        o.require(std::abs(mass - 1) <= kMassTol, b + " mass");
        o.require(wr.tail_bound && wr.value <= *wr.tail_bound, b + " weak");
        o.require(sr >= kStrongGap, b + " strong");
        o.detail << b.substr(0, 9) << ": mass-1=" << mass - 1 << " weak=" << wr.value << "<="
                 << (wr.tail_bound ? *wr.tail_bound : -1) << " strong=" << sr << "; ";
    }
}

void kms(Outcome& o) {
    Spec s = load_spec_or_bundled("tent_std");
    Potential psi = parse_psi(s, "one");
    int m = 1024;
    KMSCandidate c = candidate_at(s.sys, s.pot, psi, std::numbers::ln2, m);
    double tol = 1e-5 + 10.0 / m;
    auto rows = kms_battery(s.sys, s.pot, psi, c.beta, c.mu, 20, 0);
    o.require(rows.size() == 20, "battery size");
    double worst = 0, worst_side = 0;
    int unbalanced = 0;
    for (const auto& r : rows) {
        worst = std::max(worst, r.r.value);
        o.require(r.r.value <= tol, r.first + " / " + r.second);
        if (r.degree != 0) {
            ++unbalanced;
            worst_side = std::max({worst_side, std::abs(r.r.lhs), std::abs(r.r.rhs)});
            o.require(std::abs(r.r.lhs) <= kKmsSideTol && std::abs(r.r.rhs) <= kKmsSideTol, "n!=m side " + r.first);
        }
    }
    o.require(unbalanced > 0, "no n!=m pairs");
    o.detail << rows.size() << " pairs (" << unbalanced << " with n!=m), worst " << worst << " <= " << tol
             << ", worst n!=m side " << worst_side;
}

void verdicts(Outcome& o) {
    struct Expect {
        const char* spec;
        Verdict (*check)(const PartialSystem&, const Potential&, int);
        std::vector<Status> allowed;
    };
    std::vector<Expect> table{
        {"loop1", check_minimal, {Status::Holds}},
        {"loop1", check_top_free, {Status::Fails}},
        {"loop1", verdict_simple, {Status::Fails}},
        {"loops2", check_minimal, {Status::Fails}},
        {"fullshift2", verdict_simple, {Status::Holds}},
        {"fullshift2", verdict_purely_infinite, {Status::Holds}},
        {"tent_std", verdict_purely_infinite, {Status::Holds}},
        {"halving", check_contracting, {Status::Fails, Status::Unknown}},
    };
    for (const auto& e : table) {
        Spec s = load_spec_or_bundled(e.spec);
        Verdict v = e.check(s.sys, s.pot, 8);
        std::string label = std::string(e.spec) + " " + property_str(v.property) + "=" + status_str(v.status);
        bool ok = std::find(e.allowed.begin(), e.allowed.end(), v.status) != e.allowed.end();
        o.require(ok, label);
        o.require(verify_certificate(s.sys, s.pot, v), label + " certificate");
        if (v.property == Property::TopFree) o.require(!v.circuit.empty(), label + " circuit");
        if (v.property == Property::Minimal && v.status == Status::Fails) o.require(v.invariant_set.has_value(), label + " set");
        if (std::string(e.spec) == "tent_std") {
            bool contracting = false;
            for (const auto& p : v.parts)
                if (p.property == Property::Contracting) contracting = p.status == Status::Holds && !p.contracting.empty();
            o.require(contracting, label + " contracting certificate");
        }
        if (std::string(e.spec) == "halving") o.require(!v.reason.empty() && v.contracting.empty(), label + " obstruction");
        o.detail << label << "; ";
    }
}

void witness(Outcome& o) {
    Spec s = load_spec_or_bundled("loop1");
    Verdict tf = check_top_free(s.sys, s.pot, 8);
    o.require(tf.status == Status::Fails, "loop1 is not topologically free");
    if (tf.status != Status::Fails) return;
    AnnihilationWitness w = annihilation_witness(s.sys, s.pot, tf, 8);
    o.require(w.regular_norm >= kWitnessRegular, "regular norm");
    o.require(w.orbit_norm <= kWitnessOrbit, "orbit norm");
    o.detail << "n=" << w.n << " on " << w.support << ": regular " << w.regular_norm << ", orbit " << w.orbit_norm;
}

void groupoid(Outcome& o) {
    Spec s = load_spec_or_bundled("fullshift2");
    GraphGenerators gg = graph_generators(s.sys, s.pot, 6);
    double ck = 0;
    for (const auto& r : gg.residuals) {
        ck = std::max(ck, r.value);
        o.require(r.value <= kGroupoidTol, "CK " + r.name);
    }
    auto rows = iso_battery(s.sys, s.pot, 6, 3, 20, 0);
    o.require(rows.size() == 20, "iso pair count");
    double iso = 0;
    for (const auto& r : rows) {
        iso = std::max(iso, r.r.value);
        o.require(r.r.value <= kGroupoidTol && r.r.interior > 0, "iso " + r.f + " * " + r.g);
    }
    Deaconu G = build_deaconu(s.sys, s.pot, default_seeds(s.sys), 6);
    auto expect = oracle::groupoid_elements(G.basis.points, 6);
    std::set<std::tuple<std::size_t, int, std::size_t>> got;
    for (const auto& e : G.elements) got.insert({e.x, e.k, e.y});
    o.require(got == expect && got.size() == G.elements.size(), "element enumeration");
    o.require(check_groupoid_axioms(G).ok(), "groupoid axioms");
    o.detail << "CK worst " << ck << ", iso worst " << iso << " over " << rows.size() << " pairs, " << G.elements.size()
             << " elements (oracle " << expect.size() << ")";
}

void rescale(Outcome& o) {
    Spec s = load_spec_or_bundled("tent_std");
    auto omega = [](const Point& p) { return 1 + point_coord(p); };
    Battery bat = function_battery(s.sys, s.pot, 12, 0);
    double worst = 0;
    for (const auto& a : bat.fns) worst = std::max(worst, rescale_check(s.sys, s.pot, omega, a, default_seeds(s.sys), 6, 2).value);
    o.require(worst <= kRescaleTol, "residual");
    o.detail << bat.fns.size() << " functions, worst " << worst;
}

}  // namespace

int main() {
    std::vector<Criterion> criteria{
        {1, "tent preimage counts", 1, tent_counts},
        {2, "spectrum stratification", 1, stratification},
        {3, "relation battery", 30, relations},
        {4, "expectation on the half tent", 0, g_formula},
        {5, "conformal solver", 10, conformal},
        {6, "weakly conformal family", 0, family},
        {7, "KMS battery", 30, kms},
        {8, "verdicts", 30, verdicts},
        {9, "annihilated element", 0, witness},
        {10, "groupoid and graph consistency", 30, groupoid},
        {11, "rescaling independence", 0, rescale},
    };
    int failed = 0;
    for (const auto& c : criteria) {
        Outcome o;
        auto t0 = std::chrono::steady_clock::now();
        try {
            c.run(o);
        } catch (const std::exception& e) {
            o.pass = false;
            o.detail << " [exception: " << e.what() << "]";
        }
        double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
        if (c.budget > 0 && secs > c.budget) o.require(false, "over time budget");
        if (!o.pass) ++failed;
        std::printf("%s  %2d  %-32s %7.2fs  %s\n", o.pass ? "PASS" : "FAIL", c.id, c.title, secs, o.detail.str().c_str());
        std::fflush(stdout);
    }
    return failed;
}
