#include "xferop/transfer.hpp"

#include "xferop/dynamics.hpp"
#include "xferop/errors.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <set>
#include <sstream>

namespace xferop {

namespace {

bool approaches(const Interval& d, const Rational& x, int side) {
    if (d.empty()) return false;
    if (side < 0) return d.lo < x && x <= d.hi;
    return d.lo <= x && x < d.hi;
}

bool space_approaches(const IntervalSet& X, const Rational& x, int side) {
    return std::any_of(X.components().begin(), X.components().end(),
                       [&](const Interval& c) { return approaches(c, x, side); });
}

const char* side_name(int side) { return side < 0 ? "left" : "right"; }

void structural_interval(const IntervalSystem& is, const IntervalPotential& ip, std::vector<Defect>& d) {
    for (const auto& c : is.space_parts)
        if (!c.lo_closed || !c.hi_closed)
            d.push_back({"space_not_compact", c.str(), "components of X must be closed intervals", {}, {}});
    for (std::size_t i = 0; i < is.branches.size(); ++i) {
        const auto& b = is.branches[i];
        std::string loc = "branches[" + std::to_string(i) + "]";
        if (b.map.slope.is_zero()) {
            d.push_back({"zero_slope", loc, "branch slope must be nonzero", {}, {}});
            continue;
        }
        if (b.domain.empty()) d.push_back({"empty_domain", loc, "branch domain is empty", {}, {}});
        if (!is.space.contains(IntervalSet(b.domain)))
            d.push_back({"domain_outside_space", loc, "domain " + b.domain.str() + " is not inside X", {}, {}});
        if (!is.space.contains(IntervalSet(b.domain.image(b.map))))
            d.push_back({"image_outside_space", loc, "image " + b.domain.image(b.map).str() + " is not inside X", {}, {}});
        for (std::size_t j = i + 1; j < is.branches.size(); ++j)
            if (!b.domain.intersect(is.branches[j].domain).empty())
                d.push_back({"overlapping_domains", loc,
                             "domains of branches " + std::to_string(i) + " and " + std::to_string(j) + " intersect",
                             {}, {}});
    }
    if (!d.empty()) return;
    if (!is.delta.is_open_in(is.space))
        d.push_back({"delta_not_open", is.delta.str(), "Delta is not open in X", {}, {}});
    // phi continuous at shared domain boundaries
    for (const auto& b : is.branches) {
        for (int end = 0; end < 2; ++end) {
            const Rational& p = end ? b.domain.hi : b.domain.lo;
            if (!b.domain.contains(p)) continue;
            int outside = end ? 1 : -1;
            auto other = is.branch_near(p, outside);
            if (other && is.branches[*other].map(p) != b.map(p))
                d.push_back({"phi_discontinuous", p.str(),
                             "one-sided limits of phi at " + p.str() + " are " + b.map(p).str() + " and " +
                                 is.branches[*other].map(p).str(),
                             b.map(p), is.branches[*other].map(p)});
        }
    }
    // potential structure
    for (std::size_t i = 0; i < ip.pieces.size(); ++i)
        for (std::size_t j = i + 1; j < ip.pieces.size(); ++j)
            if (!ip.pieces[i].domain.intersect(ip.pieces[j].domain).empty())
                d.push_back({"overlapping_pieces", "potential.pieces[" + std::to_string(i) + "]",
                             "potential pieces " + std::to_string(i) + " and " + std::to_string(j) + " intersect",
                             {}, {}});
    std::vector<Interval> pd;
    for (const auto& p : ip.pieces) pd.push_back(p.domain);
    IntervalSet uncovered = is.delta.minus(IntervalSet(pd));
    if (!uncovered.empty())
        d.push_back({"pieces_do_not_cover", uncovered.str(), "potential pieces do not cover Delta", {}, {}});
    std::set<Rational> seen;
    for (const auto& [x, v] : ip.overrides) {
        if (!is.delta.contains(x))
            d.push_back({"override_outside_delta", x.str(), "override point is not in Delta", {}, {}});
        if (!seen.insert(x).second)
            d.push_back({"duplicate_override", x.str(), "override point listed twice", {}, {}});
    }
}

void nonnegativity_interval(const IntervalSystem& is, const IntervalPotential& ip, std::vector<Defect>& d) {
    for (std::size_t i = 0; i < ip.pieces.size(); ++i) {
        const auto& p = ip.pieces[i];
        IntervalSet on = IntervalSet(p.domain).intersect(is.delta);
        for (const auto& comp : on.components()) {
            std::vector<Rational> pts{comp.lo, comp.hi};
            for (const auto& r : p.f.roots())
                if (comp.lo < r && r < comp.hi) pts.push_back(r);
            std::sort(pts.begin(), pts.end());
            pts.erase(std::unique(pts.begin(), pts.end()), pts.end());
            std::vector<Rational> probes;
            for (std::size_t k = 0; k < pts.size(); ++k) {
                if (comp.contains(pts[k])) probes.push_back(pts[k]);
                if (k + 1 < pts.size()) probes.push_back(midpoint(pts[k], pts[k + 1]));
            }
            for (const auto& x : probes) {
                if (ip.override_at(x)) continue;
                Rational v = p.f(x);
                if (v.sign() < 0) {
                    d.push_back({"negative_potential", x.str(), "rho(" + x.str() + ") = " + v.str() + " < 0",
                                 Rational(0), v});
                    break;
                }
            }
        }
    }
    for (const auto& [x, v] : ip.overrides)
        if (v.sign() < 0)
            d.push_back({"negative_potential", x.str(), "override value " + v.str() + " < 0", Rational(0), v});
}

// Critical values: images of branch endpoints, potential breakpoints,
// override points and endpoints of X.
std::vector<Rational> critical_values(const IntervalSystem& is, const IntervalPotential& ip) {
    std::set<Rational> pts;
    for (const auto& p : ip.pieces) {
        pts.insert(p.domain.lo);
        pts.insert(p.domain.hi);
    }
    for (const auto& o : ip.overrides) pts.insert(o.first);
    std::set<Rational> cv;
    for (const auto& b : is.branches) {
        cv.insert(b.map(b.domain.lo));
        cv.insert(b.map(b.domain.hi));
        for (const auto& p : pts)
            if (b.domain.lo <= p && p <= b.domain.hi) cv.insert(b.map(p));
    }
    for (const auto& c : is.space.components()) {
        cv.insert(c.lo);
        cv.insert(c.hi);
    }
    return {cv.begin(), cv.end()};
}

// Sum over branches of one-sided limits of rho along points approaching the
// fibre of c from `side`, grouped by the limit point in X.
std::map<Rational, Rational> side_limits(const IntervalSystem& is, const IntervalPotential& ip, const Rational& c,
                                         int side) {
    std::map<Rational, Rational> out;
    for (const auto& b : is.branches) {
        Rational p = b.map.inverse()(c);
        int tau = side * b.map.slope.sign();
        if (!approaches(b.domain, p, tau)) continue;
        Rational lim = ip.limit(p, tau).value_or(Rational(0));
        out[p] += lim;
    }
    return out;
}

ValidationResult validate_interval(const PartialSystem& sys, const Potential& pot) {
    ValidationResult res;
    const auto& is = sys.interval();
    const auto& ip = pot.interval();
    structural_interval(is, ip, res.defects);
    if (!res.defects.empty()) return res;
    nonnegativity_interval(is, ip, res.defects);
    if (!res.defects.empty()) return res;

    TransferHandle h{sys, pot, false, Rational(0), "", true};
    for (const auto& p : ip.pieces)
        if (p.f.factors.size() > 1) h.norm_exact = false;
    bool have = false;
    auto consider = [&](const Rational& v, const std::string& where) {
        if (!have || v > h.norm) {
            h.norm = v;
            h.norm_witness = where;
            have = true;
        }
    };
    for (const auto& c : critical_values(is, ip)) {
        Rational at(0);
        for (const auto& x : preimages1(sys, c)) at += rho(sys, pot, x);
        consider(at, "y=" + c.str());
        for (int side : {-1, 1}) {
            if (!space_approaches(is.space, c, side)) continue;
            auto lims = side_limits(is, ip, c, side);
            Rational total(0);
            for (const auto& [p, s] : lims) total += s;
            consider(total, std::string("y->") + c.str() + " from the " + side_name(side));
            for (const auto& [p, s] : lims) {
                if (!is.delta.contains(p)) continue;
                Rational expected = phi(sys, p) == Point{c} ? rho(sys, pot, p) : Rational(0);
                if (s != expected) {
                    std::ostringstream msg;
                    msg << "L(a) jumps at y=" << c << " from the " << side_name(side) << ": one-sided limits of rho at "
                        << p << " sum to " << s << " but the fibre value is " << expected;
                    res.defects.push_back({"collision_sum", p.str(), msg.str(), s, expected});
                }
            }
            for (const auto& x : preimages1(sys, c)) {
                const Rational& p = std::get<Rational>(x);
                if (lims.count(p)) continue;
                Rational v = rho(sys, pot, x);
                if (!v.is_zero()) {
                    std::ostringstream msg;
                    msg << "L(a) jumps at y=" << c << " from the " << side_name(side) << ": no branch approaches " << p
                        << " but rho(" << p << ") = " << v;
                    res.defects.push_back({"collision_sum", p.str(), msg.str(), Rational(0), v});
                }
            }
        }
    }
    if (!h.norm_exact) {
        // products of factors may peak inside a gap; add a fine scan
        const auto& X = is.space;
        for (const auto& comp : X.components()) {
            for (int k = 0; k <= 256; ++k) {
                Rational y = comp.lo + (comp.hi - comp.lo) * Rational(k, 256);
                Rational at(0);
                for (const auto& x : preimages1(sys, y)) at += rho(sys, pot, x);
                consider(at, "y=" + y.str() + " (scan)");
            }
        }
    }
    res.valid = res.defects.empty();
    if (res.valid) {
        h.validated = true;
        res.handle = std::move(h);
    }
    return res;
}

ValidationResult validate_graph(const PartialSystem& sys, const Potential& pot) {
    ValidationResult res;
    const Graph& g = sys.graph();
    const auto& w = pot.graph().weights;
    if (g.vertices.empty()) res.defects.push_back({"empty_graph", "vertices", "graph has no vertices", {}, {}});
    if (w.size() != g.edges.size())
        res.defects.push_back({"weights_mismatch", "potential.weights", "one weight per edge is required", {}, {}});
    for (std::size_t e = 0; e < std::min(w.size(), g.edges.size()); ++e)
        if (w[e].sign() <= 0)
            res.defects.push_back({"nonpositive_weight", g.edges[e].name, "edge weights must be positive",
                                   Rational(0), w[e]});
    if (!res.defects.empty()) return res;
    TransferHandle h{sys, pot, true, Rational(0), "", true};
    bool have = false;
    for (std::size_t v = 0; v < g.vertices.size(); ++v) {
        Rational s(0);
        for (int e : g.by_source[v]) s += w[static_cast<std::size_t>(e)];
        if (!have || s > h.norm) {
            h.norm = s;
            h.norm_witness = "paths with range " + g.vertices[v];
            have = true;
        }
    }
    res.valid = true;
    res.handle = std::move(h);
    return res;
}

}  // namespace

ValidationResult validate(const PartialSystem& sys, const Potential& pot) {
    if (sys.is_interval() != pot.is_interval()) {
        ValidationResult r;
        r.defects.push_back({"backend_mismatch", "potential", "potential does not match the system backend", {}, {}});
        return r;
    }
    return sys.is_interval() ? validate_interval(sys, pot) : validate_graph(sys, pot);
}

TransferHandle require_valid(const PartialSystem& sys, const Potential& pot) {
    auto v = validate(sys, pot);
    if (!v.valid) {
        std::string msg = "transfer operator is not valid:";
        for (const auto& d : v.defects) msg += " [" + d.kind + " at " + d.location + "] " + d.message + ";";
        throw not_validated(msg);
    }
    return *v.handle;
}

Rational apply(const TransferHandle& L, const TestFunction& a, const Point& y, int n) {
    if (!in_space(L.sys, y)) throw out_of_domain("point " + point_str(L.sys, y) + " is outside X");
    if (n == 0) return eval(a, y);
    Rational s(0);
    for (const auto& e : preimages(L.sys, L.pot, y, n, true, std::max(n, 64))) s += e.weight * eval(a, e.x);
    return s;
}

double apply_fn(const PartialSystem& sys, const Potential& pot, const Fn& a, const Point& y, int n) {
    if (n == 0) return a(y);
    double s = 0;
    for (const auto& e : preimages(sys, pot, y, n, true, std::max(n, 64))) s += e.weight.to_double() * a(e.x);
    return s;
}

Rational transfer_identity_check(const TransferHandle& L, const TestFunction& a, const TestFunction& b,
                                 const std::vector<Point>& samples) {
    Rational worst(0);
    for (const auto& y : samples) {
        Rational lhs(0), Lb(0);
        for (const auto& x : preimages1(L.sys, y)) {
            Rational w = rho(L.sys, L.pot, x);
            lhs += w * eval(a, phi(L.sys, x)) * eval(b, x);
            Lb += w * eval(b, x);
        }
        worst = max(worst, abs(lhs - eval(a, y) * Lb));
    }
    return worst;
}

double AtomicMeasure::mass() const {
    double m = 0;
    for (const auto& a : atoms) m += a.second;
    return m;
}

double AtomicMeasure::integrate(const Fn& f) const {
    double s = 0;
    for (const auto& [x, w] : atoms) s += w * f(x);
    return s;
}

double UlamMeasure::bin_width() const {
    return densities.empty() ? 0.0 : (hi - lo).to_double() / static_cast<double>(densities.size());
}

double UlamMeasure::mass() const {
    double s = 0;
    for (double d : densities) s += d;
    return s * bin_width();
}

AtomicMeasure dual_apply(const TransferHandle& L, const AtomicMeasure& mu) {
    std::map<Point, double> acc;
    for (const auto& [y, w] : mu.atoms)
        for (const auto& x : preimages1(L.sys, y)) {
            double r = rho(L.sys, L.pot, x).to_double();
            if (r != 0 && w != 0) acc[x] += r * w;
        }
    AtomicMeasure out;
    for (auto& [x, w] : acc) out.atoms.push_back({x, w});
    return out;
}

UlamMatrix ulam_matrix(const TransferHandle& L, int m) {
    if (!L.sys.is_interval()) throw unsupported("Ulam matrices need the interval backend");
    if (m < 1) throw out_of_domain("bin count must be positive");
    const auto& is = L.sys.interval();
    UlamMatrix U;
    U.m = m;
    U.lo = *is.space.lower();
    U.hi = *is.space.upper();
    Rational h = (U.hi - U.lo) / Rational(m);
    PwPoly rho_pw = L.pot.interval().as_pwpoly();
    auto bin = [&](int i) { return Interval::closed(U.lo + h * Rational(i), U.lo + h * Rational(i + 1)); };
    std::map<std::pair<int, int>, Rational> acc;
    for (int j = 0; j < m; ++j) {
        Interval Bj = bin(j);
        for (const auto& b : is.branches) {
            Interval J = Bj.intersect(b.domain);
            if (J.empty() || J.degenerate()) continue;
            Interval I = J.image(b.map);
            double flo = ((I.lo - U.lo) / h).to_double(), fhi = ((I.hi - U.lo) / h).to_double();
            int i0 = std::max(0, static_cast<int>(std::floor(flo)) - 1);
            int i1 = std::min(m - 1, static_cast<int>(std::ceil(fhi)) + 1);
            for (int i = i0; i <= i1; ++i) {
                Interval K = bin(i).intersect(I);
                if (K.empty() || K.degenerate()) continue;
                Interval pre = K.image(b.map.inverse());
                Rational mass = rho_pw.integrate(pre.lo, pre.hi) * abs(b.map.slope);
                if (!mass.is_zero()) acc[{i, j}] += mass / h;
            }
        }
    }
    for (auto& [ij, v] : acc) U.entries.push_back({ij.first, ij.second, v});
    return U;
}

std::vector<std::vector<double>> UlamMatrix::dense() const {
    std::vector<std::vector<double>> d(static_cast<std::size_t>(m), std::vector<double>(static_cast<std::size_t>(m), 0.0));
    for (const auto& e : entries) d[static_cast<std::size_t>(e.i)][static_cast<std::size_t>(e.j)] = e.value.to_double();
    return d;
}

std::string UlamMatrix::csv() const {
    std::ostringstream out;
    Rational h = (hi - lo) / Rational(m);
    out << "# entry(i,j) = (1/|B_i|) * integral over B_i of L(1_{B_j}); rows i, columns j\n";
    out << "edges";
    for (int k = 0; k <= m; ++k) out << "," << (lo + h * Rational(k)).str();
    out << "\n";
    auto d = dense();
    for (int i = 0; i < m; ++i) {
        out << i;
        for (int j = 0; j < m; ++j) out << "," << d[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)];
        out << "\n";
    }
    return out.str();
}

UlamMeasure dual_apply(const TransferHandle& L, const UlamMeasure& mu) {
    UlamMatrix U = ulam_matrix(L, static_cast<int>(mu.densities.size()));
    UlamMeasure out{mu.lo, mu.hi, std::vector<double>(mu.densities.size(), 0.0)};
    for (const auto& e : U.entries)
        out.densities[static_cast<std::size_t>(e.j)] += e.value.to_double() * mu.densities[static_cast<std::size_t>(e.i)];
    return out;
}

PwPoly transfer_pw(const IntervalSystem& sys, const PwPoly& weight, const PwPoly& f) {
    PwPoly wf = weight * f;
    PwPoly out;
    for (const auto& b : sys.branches) out = out + (wf * PwPoly::indicator(IntervalSet(b.domain))).push_forward(b.map);
    return out;
}

}  // namespace xferop
