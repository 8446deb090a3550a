#include "xferop/dynamics.hpp"

#include "xferop/errors.hpp"
#include "xferop/transfer.hpp"

#include <algorithm>
#include <map>
#include <set>

namespace xferop {

Region iterate_domain(const PartialSystem& sys, int n) {
    Region d = space_region(sys);
    for (int k = 0; k < n; ++k) d = region_preimage(sys, d);
    return d;
}

std::vector<PreimageEntry> preimages(const PartialSystem& sys, const Potential& pot, const Point& y, int n,
                                     bool drop_zero, int depth_bound) {
    if (n < 0) throw out_of_domain("negative preimage depth");
    if (n > depth_bound)
        throw depth_exceeded("preimage depth " + std::to_string(n) + " exceeds bound " + std::to_string(depth_bound));
    if (!in_space(sys, y)) throw out_of_domain("point " + point_str(sys, y) + " is outside X");
    std::vector<PreimageEntry> level{{y, Rational(1)}};
    for (int k = 0; k < n; ++k) {
        std::vector<PreimageEntry> next;
        for (const auto& e : level)
            for (auto& x : preimages1(sys, e.x)) {
                Rational w = rho(sys, pot, x) * e.weight;
                next.push_back({std::move(x), std::move(w)});
            }
        level = std::move(next);
    }
    if (drop_zero)
        level.erase(std::remove_if(level.begin(), level.end(), [](const PreimageEntry& e) { return e.weight.is_zero(); }),
                    level.end());
    std::sort(level.begin(), level.end(), [](const PreimageEntry& a, const PreimageEntry& b) { return a.x < b.x; });
    return level;
}

Rational cocycle(const PartialSystem& sys, const Potential& pot, int n, const Point& x) {
    if (n < 0) throw out_of_domain("negative cocycle order");
    if (!in_space(sys, x)) throw out_of_domain("point " + point_str(sys, x) + " is outside X");
    Rational r(1);
    Point y = x;
    for (int i = 0; i < n; ++i) {
        if (!in_delta(sys, y))
            throw out_of_domain("point " + point_str(sys, x) + " is not in Delta_" + std::to_string(n));
        r *= rho(sys, pot, y);
        y = phi(sys, y);
    }
    return r;
}

std::string reason_str(IrregularReason r) {
    switch (r) {
        case IrregularReason::ZeroPotential: return "zero_potential";
        case IrregularReason::RhoDiscontinuous: return "rho_discontinuous";
        case IrregularReason::NotLocallyInjective: return "not_locally_injective";
    }
    return "?";
}

namespace {

IntervalSet interval_zero_set(const IntervalSystem& is, const IntervalPotential& ip) {
    std::vector<Interval> zeros;
    for (const auto& p : ip.pieces) {
        if (p.f.is_zero()) {
            zeros.push_back(p.domain);
            continue;
        }
        for (const auto& r : p.f.roots())
            if (p.domain.contains(r)) zeros.push_back(Interval::point(r));
    }
    IntervalSet z(std::move(zeros));
    std::vector<Rational> pos_over, zero_over;
    for (const auto& [x, v] : ip.overrides) (v.is_zero() ? zero_over : pos_over).push_back(x);
    z = z.minus(IntervalSet::points(pos_over)).unite(IntervalSet::points(zero_over));
    return z.intersect(is.delta);
}

bool space_approaches(const IntervalSet& X, const Rational& x, int side) {
    for (const auto& c : X.components()) {
        if (side < 0 && c.lo < x && x <= c.hi) return true;
        if (side > 0 && c.lo <= x && x < c.hi) return true;
    }
    return false;
}

}  // namespace

Region positive_set(const PartialSystem& sys, const Potential& pot) {
    if (sys.is_interval()) {
        const auto& is = sys.interval();
        return is.delta.minus(interval_zero_set(is, pot.interval()));
    }
    const Graph& g = sys.graph();
    std::vector<Word> w;
    for (std::size_t e = 0; e < g.edges.size(); ++e)
        if (pot.graph().weights[e].sign() > 0) w.push_back({g.edges[e].r, {static_cast<int>(e)}});
    return CylinderSet(sys.graph_ptr(), std::move(w));
}

RegionReport regular_set_unchecked(const PartialSystem& sys, const Potential& pot) {
    RegionReport rep;
    rep.delta = delta_region(sys);
    rep.delta_pos = positive_set(sys, pot);
    if (!sys.is_interval()) {
        rep.delta_reg = rep.delta_pos;
        return rep;
    }
    const auto& is = sys.interval();
    const auto& ip = pot.interval();
    std::set<Rational> cand;
    for (const auto& p : ip.pieces) {
        cand.insert(p.domain.lo);
        cand.insert(p.domain.hi);
    }
    for (const auto& o : ip.overrides) cand.insert(o.first);
    for (const auto& b : is.branches) {
        cand.insert(b.domain.lo);
        cand.insert(b.domain.hi);
    }
    std::vector<Rational> bad;
    for (const auto& p : cand) {
        if (!is.delta.contains(p)) continue;
        IrregularPoint ir{p, {}};
        Rational v = rho(sys, pot, p);
        if (v.is_zero()) {
            ir.reasons.push_back(IrregularReason::ZeroPotential);
        } else {
            for (int side : {-1, 1}) {
                if (!space_approaches(is.space, p, side)) continue;
                auto lim = ip.limit(p, side);
                if (!lim || *lim != v) {
                    ir.reasons.push_back(IrregularReason::RhoDiscontinuous);
                    break;
                }
            }
            auto bl = is.branch_near(p, -1);
            auto br = is.branch_near(p, 1);
            if (bl && br && *bl != *br &&
                is.branches[*bl].map.slope.sign() != is.branches[*br].map.slope.sign())
                ir.reasons.push_back(IrregularReason::NotLocallyInjective);
        }
        if (!ir.reasons.empty()) {
            bad.push_back(p);
            rep.irregular.push_back(std::move(ir));
        }
    }
    IntervalSet reg = std::get<IntervalSet>(rep.delta_pos).minus(IntervalSet::points(bad));
    rep.delta_reg = reg.interior_in(is.space);
    return rep;
}

RegionReport regular_set(const PartialSystem& sys, const Potential& pot) {
    require_valid(sys, pot);
    return regular_set_unchecked(sys, pot);
}

Region regular_domain_n(const PartialSystem& sys, const Region& reg, int n) {
    if (n <= 0) return space_region(sys);
    Region r = reg;
    for (int k = 1; k < n; ++k) r = region_intersect(reg, region_preimage(sys, r));
    return r;
}

// ------------------------------------------------------------------ power

namespace {

struct Composite {
    Interval domain;
    Affine map;
    std::vector<PotentialPiece> pieces;
};

PoweredSystem power_interval(const PartialSystem& sys, const Potential& pot, int n) {
    const auto& is = sys.interval();
    const auto& ip = pot.interval();
    std::vector<Composite> comps;
    for (const auto& b : is.branches) {
        Composite c{b.domain, b.map, {}};
        for (const auto& p : ip.pieces) {
            Interval d = p.domain.intersect(b.domain);
            if (!d.empty()) c.pieces.push_back({d, p.f});
        }
        comps.push_back(std::move(c));
    }
    for (int k = 1; k < n; ++k) {
        std::vector<Composite> next;
        for (const auto& c : comps)
            for (const auto& b : is.branches) {
                Interval d = c.domain.intersect(b.domain.image(c.map.inverse()));
                if (d.empty()) continue;
                Composite nc{d, b.map.after(c.map), {}};
                for (const auto& p : c.pieces)
                    for (const auto& q : ip.pieces) {
                        Interval pd = p.domain.intersect(d).intersect(q.domain.image(c.map.inverse()));
                        if (pd.empty()) continue;
                        nc.pieces.push_back({pd, p.f * q.f.compose(c.map)});
                    }
                next.push_back(std::move(nc));
            }
        comps = std::move(next);
    }
    IntervalSystem out;
    out.space_parts = is.space_parts;
    IntervalPotential op;
    for (auto& c : comps) {
        out.branches.push_back({c.domain, c.map});
        for (auto& p : c.pieces) op.pieces.push_back(std::move(p));
    }
    out.finalize();
    // Cocycle values at points whose orbit meets an override.
    std::map<Rational, Rational> over;
    for (const auto& [p, v] : ip.overrides)
        for (int i = 0; i < n; ++i) {
            if (!is.space.contains(p)) continue;
            for (const auto& e : preimages(sys, pot, Point{p}, i, false, n)) {
                const Rational& x = std::get<Rational>(e.x);
                if (!out.delta.contains(x)) continue;
                over[x] = cocycle(sys, pot, n, e.x);
            }
        }
    for (auto& [x, v] : over) op.overrides.push_back({x, v});
    return {PartialSystem{std::move(out)}, Potential{std::move(op)}};
}

PoweredSystem power_graph(const PartialSystem& sys, const Potential& pot, int n) {
    const Graph& g = sys.graph();
    auto ng = std::make_shared<Graph>();
    ng->vertices = g.vertices;
    ng->truncation_depth = std::max(1, g.truncation_depth / n);
    GraphPotential gp;
    std::vector<std::vector<int>> words;
    for (std::size_t e = 0; e < g.edges.size(); ++e) words.push_back({static_cast<int>(e)});
    for (int k = 1; k < n; ++k) {
        std::vector<std::vector<int>> next;
        for (const auto& w : words)
            for (int e : g.by_range[static_cast<std::size_t>(g.s(w.back()))]) {
                auto nw = w;
                nw.push_back(e);
                next.push_back(std::move(nw));
            }
        words = std::move(next);
    }
    for (const auto& w : words) {
        std::string name;
        Rational weight(1);
        for (std::size_t i = 0; i < w.size(); ++i) {
            name += (i ? "." : "") + g.edge_name(w[i]);
            weight *= pot.graph().weights[static_cast<std::size_t>(w[i])];
        }
        ng->edges.push_back({name, g.r(w.front()), g.s(w.back())});
        gp.weights.push_back(weight);
    }
    ng->index();
    return {PartialSystem{GraphSystem{ng}}, Potential{std::move(gp)}};
}

}  // namespace

PoweredSystem power(const PartialSystem& sys, const Potential& pot, int n) {
    if (n < 1) throw out_of_domain("power requires n >= 1");
    if (n == 1) return {sys, pot};
    if (sys.is_interval()) return power_interval(sys, pot, n);
    return power_graph(sys, pot, n);
}

EssentialDomain essential_domain(const PartialSystem& sys, int depth) {
    if (depth < 1) throw out_of_domain("essential_domain requires depth >= 1");
    Region X = space_region(sys);
    Region D = X, C = X, acc = X;
    EssentialDomain out;
    for (int n = 1; n <= depth; ++n) {
        Region Dn = region_preimage(sys, D);
        Region Cn = region_image(sys, C);
        acc = region_intersect(acc, region_intersect(Dn, Cn));
        out.depth_reached = n;
        bool same = region_subset(Dn, D) && region_subset(D, Dn) && region_subset(Cn, C) && region_subset(C, Cn);
        D = std::move(Dn);
        C = std::move(Cn);
        if (same) {
            out.stabilized = true;
            break;
        }
    }
    out.set = acc;
    return out;
}

}  // namespace xferop
