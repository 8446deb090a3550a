#include "xferop/battery.hpp"

#include "xferop/dynamics.hpp"

#include <cmath>
#include <numbers>
#include <random>
#include <set>

namespace xferop {

namespace {

Rational dyadic_in(std::mt19937_64& rng, const Rational& lo, const Rational& hi, int bits) {
    std::uniform_int_distribution<long> d(0, (1L << bits));
    return lo + (hi - lo) * Rational(d(rng), 1L << bits);
}

PwPoly random_hat(std::mt19937_64& rng, const Rational& lo, const Rational& hi) {
    Rational a = dyadic_in(rng, lo, hi, 4);
    Rational b = dyadic_in(rng, lo, hi, 4);
    if (b < a) std::swap(a, b);
    if (a == b) b = a + (hi - a) / Rational(2);
    if (a == b) a = lo, b = hi;
    std::uniform_int_distribution<int> p(1, 8);
    return PwPoly::hat(a, (a + b) / Rational(2), b, Rational(p(rng), 4));
}

Word random_word(const Graph& g, std::mt19937_64& rng, std::size_t len) {
    std::uniform_int_distribution<std::size_t> pick(0, g.edges.size() - 1);
    std::vector<int> es{static_cast<int>(pick(rng))};
    while (es.size() < len) {
        const auto& next = g.by_range[static_cast<std::size_t>(g.s(es.back()))];
        if (next.empty()) break;
        std::uniform_int_distribution<std::size_t> d(0, next.size() - 1);
        es.push_back(next[d(rng)]);
    }
    return Word{g.r(es.front()), es};
}

}  // namespace

Battery function_battery(const PartialSystem& sys, const Potential& pot, std::size_t count, std::uint64_t seed) {
    Battery b;
    b.seed = seed;
    std::mt19937_64 rng(seed);
    RegionReport rr = regular_set(sys, pot);

    if (sys.is_interval()) {
        const auto& X = sys.interval().space.components();
        Rational lo = X.front().lo, hi = X.back().hi;
        auto add = [&](const PwPoly& f, std::string label) {
            b.labels.push_back("f" + std::to_string(b.fns.size()) + " " + label);
            b.fns.push_back(as_fn(TestFunction{f}));
        };
        std::vector<std::pair<Rational, Rational>> id_knots{{lo, lo}, {hi, hi}};
        PwPoly x = PwPoly::linear_spline(id_knots);
        PwPoly one = PwPoly::constant_on(sys.interval().space, Rational(1));
        add(one, "1");
        add(x, "x");
        add(one - x, "1-x");
        add(x * x, "x^2");
        add(x * x * x, "x^3");
        while (b.fns.size() < count) {
            std::size_t i = b.fns.size();
            PwPoly h = random_hat(rng, lo, hi);
            if (i % 3 == 0) add(h, "hat");
            else if (i % 3 == 1) add(h * x + one.scaled(Rational(1, 2)), "hat*x+1/2");
            else {
                IntervalSet s(Interval::closed_open(lo, dyadic_in(rng, lo, hi, 3)));
                add(PwPoly::indicator(s) - h, "step-hat");
            }
        }
        std::vector<Interval> kparts;
        for (const auto& c : std::get<IntervalSet>(rr.delta_reg).components()) {
            Rational w = c.hi - c.lo;
            if (w.sign() <= 0) continue;
            kparts.push_back(Interval::closed(c.lo + w / Rational(8), c.hi - w / Rational(8)));
        }
        IntervalSet K(kparts);
        b.K = K;
        for (std::size_t i = 0; i < count && !kparts.empty(); ++i) {
            const Interval& c = kparts[i % kparts.size()];
            PwPoly h = random_hat(rng, c.lo, c.hi);
            if (i % 2) h = h * x;
            b.supported.push_back(as_fn(TestFunction{h}));
            b.supported_labels.push_back(i % 2 ? "hat*x in " + c.str() : "hat in " + c.str());
        }
        return b;
    }

    const Graph& g = sys.graph();
    std::uniform_int_distribution<int> coef(-4, 4);
    std::uniform_int_distribution<std::size_t> len(1, 3);
    for (std::size_t e = 0; e < g.edges.size() && b.fns.size() < count; ++e) {
        Word w{g.r(static_cast<int>(e)), {static_cast<int>(e)}};
        b.fns.push_back(as_fn(TestFunction{CylFn{{{w, Rational(1)}}}}));
        b.labels.push_back(w.str(g));
    }
    while (b.fns.size() < count) {
        CylFn f;
        std::string label;
        for (int t = 0; t < 3; ++t) {
            Word w = random_word(g, rng, len(rng));
            int c = coef(rng);
            if (c == 0) c = 1;
            f.terms.push_back({w, Rational(c, 2)});
            label += (t ? "+" : "") + Rational(c, 2).str() + w.str(g);
        }
        b.fns.push_back(as_fn(TestFunction{f}));
        b.labels.push_back(label);
    }
    const auto& reg = std::get<CylinderSet>(rr.delta_reg);
    b.K = reg;
    for (std::size_t tries = 0; b.supported.size() < count && tries < 50 * count; ++tries) {
        Word w = random_word(g, rng, len(rng));
        if (!reg.covers(w)) continue;
        int c = coef(rng);
        if (c == 0) c = 1;
        b.supported.push_back(as_fn(TestFunction{CylFn{{{w, Rational(c, 2)}}}}));
        b.supported_labels.push_back(w.str(g));
    }
    return b;
}

std::vector<RelationSummary> relation_battery(const PartialSystem& sys, const Potential& pot,
                                              const RelationOptions& opt) {
    Battery bat = function_battery(sys, pot, opt.count, opt.seed);
    auto seeds = default_seeds(sys);
    RepPair orb = orbit_rep(sys, pot, seeds, opt.depth);
    RepPair reg = regular_rep(sys, pot, seeds, opt.depth, opt.window);

    std::vector<RelationSummary> rows;
    for (const char* n : {"transfer_relation", "commutation", "covariance", "monomial_product", "gauge", "G_formula"})
        rows.push_back({n, 0, opt.tol, 0, 0, 0, ""});
    auto fold = [&](std::size_t k, const Residual& r, const std::string& label) {
        auto& s = rows[k];
        ++s.checks;
        s.interior += r.interior;
        s.boundary += r.boundary;
        if (r.value > s.worst || s.witness.empty()) {
            if (r.value >= s.worst) s.worst = r.value;
            s.witness = label + (r.witness.empty() ? "" : " @ " + r.witness);
        }
    };

    std::mt19937_64 rng(opt.seed ^ 0x9e3779b97f4a7c15ULL);
    std::uniform_real_distribution<double> angle(0, 2 * std::numbers::pi);
    std::optional<QuasiBasis> qb;
    if (!region_empty(bat.K)) qb = quasi_basis(sys, pot, bat.K);

    const std::size_t N = bat.fns.size();
    for (std::size_t i = 0; i < N; ++i) {
        const Fn& a = bat.fns[i];
        const std::string& la = bat.labels[i];
        for (const RepPair* rep : {&orb, &reg}) {
            fold(0, check_transfer_relation(*rep, a), la);
            fold(1, check_commutation(*rep, a, bat.fns[(i + 1) % N]), la);
        }
        if (qb && i < bat.supported.size())
            for (const RepPair* rep : {&orb, &reg}) fold(2, check_covariance(*rep, bat.supported[i], *qb), bat.supported_labels[i]);

        int n1 = static_cast<int>(i % 3), m1 = static_cast<int>((i / 3) % 3);
        int n2 = static_cast<int>((i / 9) % 3), m2 = static_cast<int>((i + 1) % 3);
        Monomial M1{a, n1, m1, bat.fns[(i + 1) % N], la};
        Monomial M2{bat.fns[(i + 2) % N], n2, m2, bat.fns[(i + 3) % N], bat.labels[(i + 2) % N]};
        std::string lm = "(" + std::to_string(n1) + "," + std::to_string(m1) + ")x(" + std::to_string(n2) + "," +
                         std::to_string(m2) + ") " + la;
        fold(3, product_check(reg, M1, M2), lm);
        fold(4, check_gauge(reg, std::polar(1.0, angle(rng)), M1), lm);
        fold(5, g_check(reg, M1), lm);
        Monomial D{a, n1, n1, bat.fns[(i + 1) % N], la};
        fold(5, g_check(reg, D), "diag " + la);
    }
    return rows;
}

std::vector<KMSRow> kms_battery(const PartialSystem& sys, const Potential& pot, const Potential& psi, double beta,
                                const Measure& mu, std::size_t count, std::uint64_t seed) {
    std::vector<std::pair<Fn, std::string>> pool;
    if (sys.is_interval()) {
        Rational lo = *sys.interval().space.lower(), hi = *sys.interval().space.upper();
        double l = lo.to_double(), w = (hi - lo).to_double();
        pool.push_back({fn_const(1), "1"});
        pool.push_back({[l, w](const Point& p) { return (point_coord(p) - l) / w; }, "x"});
        pool.push_back({[l, w](const Point& p) { return 1 - (point_coord(p) - l) / w; }, "1-x"});
        pool.push_back({[l, w](const Point& p) { double t = (point_coord(p) - l) / w; return t * t; }, "x^2"});
        Rational q = (hi - lo) / Rational(4);
        pool.push_back({as_fn(TestFunction{PwPoly::hat(lo, lo + q, lo + q + q, Rational(1))}), "hat(left)"});
        pool.push_back({as_fn(TestFunction{PwPoly::hat(lo + q + q, hi - q, hi, Rational(1))}), "hat(right)"});
    } else {
        const Graph& g = sys.graph();
        pool.push_back({fn_const(1), "1"});
        for (std::size_t e = 0; e < g.edges.size(); ++e) {
            Word w{g.r(static_cast<int>(e)), {static_cast<int>(e)}};
            pool.push_back({as_fn(TestFunction{CylFn{{{w, Rational(1)}}}}), w.str(g)});
        }
    }
    std::mt19937_64 rng(seed);
    std::uniform_int_distribution<std::size_t> pick(0, pool.size() - 1);
    std::uniform_int_distribution<int> deg(0, 2);
    auto mono = [&](bool balanced) {
        auto& [a, la] = pool[pick(rng)];
        auto& [b, lb] = pool[pick(rng)];
        int n = deg(rng), m = balanced ? n : deg(rng);
        return Monomial{a, n, m, b, la + " t^" + std::to_string(n) + " t*^" + std::to_string(m) + " " + lb};
    };
    std::vector<KMSRow> rows;
    for (std::size_t i = 0; i < count; ++i) {
        // even ids: balanced pairs; odd ids: unconstrained, usually off the diagonal
        Monomial M1 = mono(i % 2 == 0), M2 = mono(i % 2 == 0);
        KMSRow row;
        row.id = i;
        row.first = M1.label;
        row.second = M2.label;
        row.degree = (M1.n + M2.n) - (M1.m + M2.m);
        row.r = kms_residual(sys, pot, psi, beta, mu, M1, M2);
        rows.push_back(std::move(row));
    }
    return rows;
}

std::vector<IsoRow> iso_battery(const PartialSystem& sys, const Potential& pot, int depth, int window,
                                std::size_t count, std::uint64_t seed) {
    std::vector<std::pair<Fn, std::string>> pool;
    std::mt19937_64 rng(seed);
    if (sys.is_interval()) {
        pool.push_back({fn_const(1), "1"});
        pool.push_back({[](const Point& p) { return point_coord(p); }, "x"});
        pool.push_back({[](const Point& p) { return 1 - point_coord(p); }, "1-x"});
        pool.push_back({[](const Point& p) { return point_coord(p) * point_coord(p); }, "x^2"});
    } else {
        const Graph& g = sys.graph();
        std::uniform_int_distribution<std::size_t> len(1, 2);
        std::set<Word> seen;
        for (std::size_t tries = 0; pool.size() < 8 && tries < 200; ++tries) {
            Word w = random_word(g, rng, len(rng));
            if (!seen.insert(w).second) continue;
            pool.push_back({as_fn(TestFunction{CylFn{{{w, Rational(1)}}}}), w.str(g)});
        }
    }
    RepPair reg = regular_rep(sys, pot, default_seeds(sys), depth, window);
    std::uniform_int_distribution<std::size_t> pick(0, pool.size() - 1);
    std::uniform_int_distribution<int> deg(0, 1);
    auto mono = [&](std::string& label) {
        const auto& [a, la] = pool[pick(rng)];
        const auto& [b, lb] = pool[pick(rng)];
        int n = deg(rng), m = deg(rng);
        label = la + " (x) " + lb + " @(" + std::to_string(n) + "," + std::to_string(m) + ")";
        return GroupoidMonomial{a, b, n, m};
    };
    std::vector<IsoRow> rows;
    for (std::size_t i = 0; i < count; ++i) {
        IsoRow row;
        GroupoidMonomial f = mono(row.f), g = mono(row.g);
        row.r = iso_phi_check(reg, f, g);
        rows.push_back(std::move(row));
    }
    return rows;
}

}  // namespace xferop
