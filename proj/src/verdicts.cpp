#include "xferop/verdicts.hpp"

#include "xferop/dynamics.hpp"
#include "xferop/errors.hpp"
#include "xferop/transfer.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <set>

namespace xferop {

std::string property_str(Property p) {
    switch (p) {
        case Property::TopFree: return "TopFree";
        case Property::Minimal: return "Minimal";
        case Property::Contracting: return "Contracting";
        case Property::Simple: return "Simple";
        case Property::PurelyInfiniteSimple: return "PurelyInfiniteSimple";
        case Property::OneCircuit: return "OneCircuit";
        case Property::PositiveEnergy: return "PositiveEnergy";
    }
    return "?";
}

std::string status_str(Status s) {
    switch (s) {
        case Status::Holds: return "Holds";
        case Status::Fails: return "Fails";
        case Status::Unknown: return "Unknown";
    }
    return "?";
}

int exit_code(Status s) {
    switch (s) {
        case Status::Holds: return 0;
        case Status::Fails: return 1;
        case Status::Unknown: return 2;
    }
    return 2;
}

namespace {

const std::size_t kMaxComposites = 1U << 18;

IntervalSet preimage_under(const Affine& f, const IntervalSet& domain, const IntervalSet& target) {
    if (f.slope.is_zero()) return target.contains(f.intercept) ? domain : IntervalSet();
    return domain.intersect(target.preimage(f));
}

bool region_equal(const Region& a, const Region& b) { return region_subset(a, b) && region_subset(b, a); }

Region region_closure(const Region& r) {
    if (const auto* s = std::get_if<IntervalSet>(&r)) return s->closure();
    return r;  // cylinder sets are clopen
}

bool region_open(const PartialSystem& sys, const Region& r) {
    if (const auto* s = std::get_if<IntervalSet>(&r)) return s->is_open_in(sys.interval().space);
    return true;
}

std::vector<int> positive_edges_at(const Graph& g, const GraphPotential& gp, int v) {
    std::vector<int> out;
    for (int e : g.by_range[static_cast<std::size_t>(v)])
        if (gp.weights[static_cast<std::size_t>(e)] > Rational(0)) out.push_back(e);
    return out;
}

std::string edges_str(const Graph& g, const std::vector<int>& es) {
    std::string s;
    for (int e : es) s += g.edge_name(e);
    return s;
}

std::vector<std::string> seq_names(const std::vector<std::size_t>& seq) {
    std::vector<std::string> out;
    for (auto i : seq) out.push_back("b" + std::to_string(i));
    return out;
}

// Boundary space is finite iff the number of atoms stops growing.
bool boundary_finite(const Graph& g) {
    std::size_t L = g.vertices.size() + g.edges.size() + 1;
    return atoms(g, L).size() == atoms(g, 2 * L).size();
}

std::vector<int> exitless_cycle(const Graph& g, const GraphPotential& gp) {
    for (std::size_t v = 0; v < g.vertices.size(); ++v) {
        std::vector<int> path;
        int cur = static_cast<int>(v);
        for (std::size_t step = 0; step < g.vertices.size(); ++step) {
            auto outs = positive_edges_at(g, gp, cur);
            if (outs.size() != 1) break;
            path.push_back(outs[0]);
            cur = g.s(outs[0]);
            if (cur == static_cast<int>(v)) return path;
        }
    }
    return {};
}

Verdict conjunction(Property p, int depth, std::vector<Verdict> parts) {
    Verdict v;
    v.property = p;
    v.depth = depth;
    bool fails = false, unknown = false;
    for (const auto& q : parts) {
        if (q.status == Status::Fails) fails = true;
        if (q.status == Status::Unknown) unknown = true;
    }
    v.status = fails ? Status::Fails : unknown ? Status::Unknown : Status::Holds;
    std::string why;
    for (const auto& q : parts)
        if (q.status != Status::Holds) why += (why.empty() ? "" : "; ") + property_str(q.property) + " " + status_str(q.status);
    v.reason = why.empty() ? "all conjuncts hold" : why;
    v.parts = std::move(parts);
    return v;
}

}  // namespace

std::vector<CompositeBranch> composite_branches(const PartialSystem& sys, const IntervalSet& within, int n) {
    if (!sys.is_interval()) throw unsupported("composite branches need the interval backend");
    const auto& is = sys.interval();
    std::vector<CompositeBranch> cur{{{}, is.space, Affine{}}};
    for (int step = 0; step < n; ++step) {
        std::vector<CompositeBranch> next;
        for (const auto& c : cur)
            for (std::size_t i = 0; i < is.branches.size(); ++i) {
                const auto& b = is.branches[i];
                IntervalSet D = preimage_under(c.map, c.domain, IntervalSet(b.domain).intersect(within));
                if (D.empty()) continue;
                auto seq = c.seq;
                seq.push_back(i);
                next.push_back({std::move(seq), std::move(D), b.map.after(c.map)});
            }
        if (next.size() > kMaxComposites) throw depth_exceeded("too many composite branches at n = " + std::to_string(step + 1));
        cur = std::move(next);
    }
    return cur;
}

ContractingCheck check_contracting_set(const PartialSystem& sys, const Potential& pot, const ContractingTuple& t) {
    RegionReport rr = regular_set(sys, pot);
    auto fail = [](std::string why) { return ContractingCheck{false, std::move(why)}; };
    if (region_empty(t.V)) return fail("V is empty");
    if (!region_open(sys, t.V)) return fail("V is not open");
    if (t.U.empty() || t.U.size() != t.n.size()) return fail("need matching nonempty U_k and n_k lists");
    Region uni = empty_region(sys), cover = empty_region(sys);
    for (std::size_t k = 0; k < t.U.size(); ++k) {
        const Region& U = t.U[k];
        std::string tag = "U_" + std::to_string(k + 1);
        if (t.n[k] < 1) return fail("n_" + std::to_string(k + 1) + " must be positive");
        if (!region_open(sys, U)) return fail(tag + " is not open");
        if (!region_empty(region_intersect(uni, U))) return fail(tag + " meets an earlier U_j");
        Region allowed = region_intersect(regular_domain_n(sys, rr.delta_reg, t.n[k]), t.V);
        if (!region_subset(U, allowed))
            return fail(tag + " = " + region_str(U) + " is not inside Delta_reg,n ∩ V = " + region_str(allowed));
        uni = region_unite(uni, U);
        Region img = U;
        for (int i = 0; i < t.n[k]; ++i) img = region_image(sys, img);
        cover = region_unite(cover, img);
    }
    if (region_subset(t.V, region_closure(uni)))
        return fail("V = " + region_str(t.V) + " lies inside the closure of the union of U_k");
    Region cv = region_closure(t.V);
    if (!region_subset(cv, cover))
        return fail("closure(V) = " + region_str(cv) + " is not covered by the images " + region_str(cover) +
                    " (missing " + region_str(region_minus(cv, cover)) + ")");
    return {true, ""};
}

Json verdict_json(const PartialSystem& sys, const Verdict& v) {
    Json j;
    j["property"] = property_str(v.property);
    j["status"] = status_str(v.status);
    j["depth"] = v.depth;
    j["reason"] = v.reason;
    j["certificate"] = v.certificate;
    if (!v.parts.empty()) {
        j["parts"] = Json::array();
        for (const auto& p : v.parts) j["parts"].push_back(verdict_json(sys, p));
    }
    return j;
}

std::pair<bool, bool> check_invariant(const PartialSystem& sys, const Potential& pot, const Region& U) {
    RegionReport rr = regular_set(sys, pot);
    bool pos = region_subset(region_image(sys, region_intersect(U, rr.delta_pos)), U);
    bool neg = region_subset(region_intersect(region_preimage(sys, U), rr.delta_reg), U);
    return {pos, neg};
}

// ------------------------------------------------------------ freeness

Verdict check_top_free(const PartialSystem& sys, const Potential& pot, int depth) {
    RegionReport rr = regular_set(sys, pot);
    Verdict v;
    v.property = Property::TopFree;
    v.depth = depth;
    if (sys.is_graph()) {
        const auto& g = sys.graph();
        auto cyc = exitless_cycle(g, pot.graph());
        if (!cyc.empty()) {
            v.status = Status::Fails;
            v.circuit = cyc;
            v.reason = "cycle without an exit in the positive-weight graph; its periodic path is isolated";
            v.certificate["cycle"] = edges_str(g, cyc);
        } else {
            v.status = Status::Holds;
            v.reason = "every cycle of the positive-weight graph has an exit";
            v.certificate["exhaustive"] = true;
        }
        return v;
    }
    const auto& reg = std::get<IntervalSet>(rr.delta_reg);
    std::size_t checked = 0;
    for (int n = 1; n <= depth; ++n) {
        for (auto& cb : composite_branches(sys, reg, n)) {
            ++checked;
            if (cb.map.is_identity() && cb.domain.has_nondegenerate()) {
                v.status = Status::Fails;
                v.reason = "phi^" + std::to_string(n) + " is the identity on an interval of Delta_reg orbits";
                v.certificate["n"] = n;
                v.certificate["branches"] = seq_names(cb.seq);
                v.certificate["periodic_set"] = cb.domain.str();
                v.identity_branch = std::move(cb);
                return v;
            }
        }
    }
    v.status = Status::Holds;
    v.reason = "no composite branch of phi^n (n <= " + std::to_string(depth) +
               ") along Delta_reg is the identity; other affine maps fix at most one point";
    v.certificate["composites_checked"] = checked;
    return v;
}

Verdict check_one_circuit(const PartialSystem& sys, const Potential& pot) {
    require_valid(sys, pot);
    Verdict v;
    v.property = Property::OneCircuit;
    if (sys.is_interval()) {
        v.status = Status::Fails;
        v.reason = "the interval backend has an infinite space";
        return v;
    }
    const auto& g = sys.graph();
    const auto& gp = pot.graph();
    std::size_t V = g.vertices.size();
    bool shape = g.edges.size() == V && V > 0;
    for (std::size_t u = 0; shape && u < V; ++u)
        shape = g.by_range[u].size() == 1 && g.by_source[u].size() == 1;
    std::vector<int> cyc;
    if (shape) {
        int cur = 0;
        for (std::size_t step = 0; step < V; ++step) {
            int e = g.by_range[static_cast<std::size_t>(cur)][0];
            if (!(gp.weights[static_cast<std::size_t>(e)] > Rational(0))) {
                shape = false;
                break;
            }
            cyc.push_back(e);
            cur = g.s(e);
            if (cur == 0 && step + 1 < V) shape = false;
        }
        shape = shape && cur == 0;
    }
    if (shape) {
        v.status = Status::Holds;
        v.circuit = cyc;
        v.reason = "the graph is a single circuit";
        v.certificate["circuit"] = edges_str(g, cyc);
    } else {
        v.status = Status::Fails;
        v.reason = "the graph is not a single circuit";
    }
    return v;
}

// ------------------------------------------------------------ minimality

Verdict check_minimal(const PartialSystem& sys, const Potential& pot, int depth) {
    RegionReport rr = regular_set(sys, pot);
    Verdict v;
    v.property = Property::Minimal;
    v.depth = depth;
    Region X = space_region(sys);
    int s = (depth + 1) / 2;
    std::vector<std::pair<std::string, Region>> seeds;
    if (sys.is_interval()) {
        const auto& is = sys.interval();
        Rational lo = *is.space.lower(), hi = *is.space.upper();
        Rational w = (hi - lo) / Rational(1L << s);
        for (long k = 0; k < (1L << s); ++k) {
            IntervalSet c = IntervalSet(Interval::open(lo + w * Rational(k), lo + w * Rational(k + 1))).intersect(is.space);
            if (!c.empty()) seeds.push_back({c.str(), Region{c}});
        }
        // complements of short periodic orbits
        for (int n = 1; n <= 2; ++n)
            for (const auto& cb : composite_branches(sys, std::get<IntervalSet>(rr.delta), n)) {
                if (cb.map.slope == Rational(1)) continue;
                Rational p = cb.map.intercept / (Rational(1) - cb.map.slope);
                if (!cb.domain.contains(p)) continue;
                std::vector<Rational> orbit{p};
                Point q{p};
                for (int i = 1; i < n; ++i) {
                    q = phi(sys, q);
                    orbit.push_back(std::get<Rational>(q));
                }
                IntervalSet P = IntervalSet::points(orbit);
                seeds.push_back({"X minus periodic orbit " + P.str(), Region{is.space.minus(P)}});
            }
    } else {
        for (const auto& w : atoms(sys.graph(), static_cast<std::size_t>(s)))
            seeds.push_back({w.str(sys.graph()), Region{CylinderSet::cylinder(sys.graph_ptr(), w)}});
    }
    int cap = 2 * depth + 2;
    bool unknown = false;
    int worst = 0;
    std::string unknown_seed;
    for (const auto& [label, U0] : seeds) {
        if (region_empty(U0)) continue;
        Region U = U0;
        bool stable = false;
        int it = 0;
        for (; it < cap; ++it) {
            Region next = region_unite(
                U, region_unite(region_image(sys, region_intersect(U, rr.delta_pos)),
                                region_intersect(region_preimage(sys, U), rr.delta_reg)));
            if (region_equal(next, U)) {
                stable = true;
                break;
            }
            U = std::move(next);
            if (region_subset(X, U)) break;
        }
        worst = std::max(worst, it);
        if (region_subset(X, U)) continue;
        if (stable) {
            Region cand = U;
            if (!region_open(sys, cand)) cand = Region{std::get<IntervalSet>(cand).interior_in(sys.interval().space)};
            auto [p, n] = check_invariant(sys, pot, cand);
            if (p && n && !region_empty(cand) && !region_subset(X, cand)) {
                v.status = Status::Fails;
                v.reason = "the invariant closure of " + label + " is a proper open invariant set";
                v.certificate["seed"] = label;
                v.certificate["invariant_set"] = region_str(cand);
                v.invariant_set = cand;
                return v;
            }
        }
        if (!unknown) unknown_seed = label;
        unknown = true;
    }
    if (unknown) {
        v.status = Status::Unknown;
        v.reason = "closure of " + unknown_seed + " neither reached X nor gave an open invariant set within " +
                   std::to_string(cap) + " steps";
        v.certificate["depth_exhausted"] = depth;
        return v;
    }
    v.status = Status::Holds;
    v.reason = "the invariant closure of every seed reaches X";
    v.certificate["seeds"] = seeds.size();
    v.certificate["resolution"] = "2^-" + std::to_string(s);
    v.certificate["max_steps"] = worst;
    return v;
}

// ------------------------------------------------------------ contractivity

namespace {

bool dense_inverse_orbit(const PartialSystem& sys, const IntervalSet& reg, const Rational& x0, int depth, int s) {
    const auto& X = sys.interval().space;
    std::set<Rational> orbit{x0};
    std::vector<Point> layer{Point{x0}};
    for (int k = 0; k < depth; ++k) {
        std::vector<Point> next;
        for (const auto& y : layer)
            for (auto& x : preimages1(sys, y))
                if (reg.contains(std::get<Rational>(x))) {
                    orbit.insert(std::get<Rational>(x));
                    next.push_back(x);
                }
        layer = std::move(next);
    }
    Rational lo = *X.lower(), hi = *X.upper();
    Rational w = (hi - lo) / Rational(1L << s);
    for (long k = 0; k < (1L << s); ++k) {
        IntervalSet cell = IntervalSet(Interval::closed(lo + w * Rational(k), lo + w * Rational(k + 1))).intersect(X);
        if (!cell.has_nondegenerate()) continue;
        bool hit = false;
        for (const auto& p : orbit)
            if (cell.contains(p)) {
                hit = true;
                break;
            }
        if (!hit) return false;
    }
    return true;
}

}  // namespace

Verdict check_contracting(const PartialSystem& sys, const Potential& pot, int depth) {
    RegionReport rr = regular_set(sys, pot);
    Verdict v;
    v.property = Property::Contracting;
    v.depth = depth;
    if (sys.is_interval()) {
        const auto& is = sys.interval();
        bool expands = false;
        for (const auto& b : is.branches)
            if (abs(b.map.slope) > Rational(1)) expands = true;
        if (!expands) {
            v.status = Status::Fails;
            v.reason = "every branch has |slope| <= 1, so phi^n(U) is never longer than U";
            v.certificate["obstruction"] = "non_expanding";
            return v;
        }
    }
    if (!region_equal(rr.delta, rr.delta_pos)) {
        v.status = Status::Fails;
        v.reason = "Delta differs from Delta_pos (" + region_str(rr.delta) + " vs " + region_str(rr.delta_pos) + ")";
        v.certificate["obstruction"] = "delta_not_positive";
        return v;
    }
    int s = std::max(2, (depth + 1) / 2);
    if (sys.is_interval()) {
        const auto& is = sys.interval();
        const auto& reg = std::get<IntervalSet>(rr.delta_reg);
        Rational lo = *is.space.lower(), hi = *is.space.upper();
        for (Rational f : {Rational(1, 3), Rational(2, 7), Rational(3, 5)}) {
            Rational x0 = lo + (hi - lo) * f;
            if (!dense_inverse_orbit(sys, reg, x0, depth, s)) continue;
            std::vector<ContractingTuple> found;
            for (int j = 2; j <= s; ++j) {
                Rational w = (hi - lo) / Rational(1L << j);
                Rational k = floor((x0 - lo) / w);
                Rational a = lo + w * k, b = a + w;
                IntervalSet V = IntervalSet(Interval::open(a, b)).intersect(is.space);
                IntervalSet T(Interval::open(a - w / Rational(4), b + w / Rational(4)));
                bool ok = false;
                for (int n = 1; n <= depth && !ok; ++n)
                    for (const auto& cb : composite_branches(sys, reg, n)) {
                        if (cb.map.slope.is_zero()) continue;
                        IntervalSet U = cb.domain.intersect(T.preimage(cb.map)).interior_in(is.space);
                        if (U.empty() || !V.contains(U)) continue;
                        ContractingTuple t{Region{V}, {Region{U}}, {n}};
                        if (check_contracting_set(sys, pot, t).ok) {
                            found.push_back(std::move(t));
                            ok = true;
                            break;
                        }
                    }
                if (!ok) break;
            }
            if (static_cast<int>(found.size()) == s - 1) {
                v.status = Status::Holds;
                v.x0 = Point{x0};
                v.reason = "x0 has a dense Delta_reg-inverse orbit and contracting sets at every scale down to 2^-" +
                           std::to_string(s);
                v.certificate["x0"] = x0.str();
                Json arr = Json::array();
                for (const auto& t : found)
                    arr.push_back({{"V", region_str(t.V)}, {"U", region_str(t.U[0])}, {"n", t.n[0]}});
                v.certificate["tuples"] = arr;
                v.contracting = std::move(found);
                return v;
            }
        }
        v.status = Status::Unknown;
        v.reason = "no contracting certificate found at depth " + std::to_string(depth);
        v.certificate["depth_exhausted"] = depth;
        return v;
    }

    const auto& g = sys.graph();
    if (boundary_finite(g)) {
        v.status = Status::Fails;
        v.reason = "the boundary path space is finite, so no open V escapes the closure of its covering sets";
        v.certificate["obstruction"] = "finite_space";
        return v;
    }
    // a vertex reachable from every vertex along paths
    std::size_t Vn = g.vertices.size();
    std::vector<std::vector<bool>> reach(Vn, std::vector<bool>(Vn, false));
    for (std::size_t u = 0; u < Vn; ++u) {
        std::deque<int> q{static_cast<int>(u)};
        reach[u][u] = true;
        while (!q.empty()) {
            int c = q.front();
            q.pop_front();
            for (int e : g.by_range[static_cast<std::size_t>(c)]) {
                auto t = static_cast<std::size_t>(g.s(e));
                if (!reach[u][t]) {
                    reach[u][t] = true;
                    q.push_back(static_cast<int>(t));
                }
            }
        }
    }
    int target = -1;
    for (std::size_t t = 0; t < Vn && target < 0; ++t) {
        bool all = true;
        for (std::size_t u = 0; u < Vn; ++u) all = all && reach[u][t];
        if (all) target = static_cast<int>(t);
    }
    if (target < 0) {
        v.status = Status::Fails;
        v.reason = "no vertex is reachable from every vertex, so Delta_reg-inverse orbits are never dense";
        v.certificate["obstruction"] = "no_dense_inverse_orbit";
        return v;
    }
    Path x0 = sample_path(g, Word{target, {}});
    std::vector<ContractingTuple> found;
    for (int j = 1; j <= s; ++j) {
        auto w = x0.first_edges(static_cast<std::size_t>(j));
        if (static_cast<int>(w.size()) < j) break;
        Word Vw{target, w};
        Region V{CylinderSet::cylinder(sys.graph_ptr(), Vw)};
        bool ok = false;
        std::deque<Word> q{Vw};
        while (!q.empty() && !ok) {
            Word cur = q.front();
            q.pop_front();
            if (cur.length() > Vw.length() &&
                std::equal(w.begin(), w.end(), cur.edges.end() - static_cast<long>(w.size()))) {
                ContractingTuple t{V, {Region{CylinderSet::cylinder(sys.graph_ptr(), cur)}},
                                   {static_cast<int>(cur.length() - w.size())}};
                if (check_contracting_set(sys, pot, t).ok) {
                    found.push_back(std::move(t));
                    ok = true;
                    break;
                }
            }
            if (static_cast<int>(cur.length()) < j + depth)
                for (auto& c : children(g, cur)) q.push_back(std::move(c));
        }
        if (!ok) break;
    }
    if (static_cast<int>(found.size()) == s) {
        v.status = Status::Holds;
        v.x0 = Point{x0};
        v.reason = "x0 has a dense inverse orbit and contracting cylinders at every length up to " + std::to_string(s);
        v.certificate["x0"] = x0.str(g);
        Json arr = Json::array();
        for (const auto& t : found) arr.push_back({{"V", region_str(t.V)}, {"U", region_str(t.U[0])}, {"n", t.n[0]}});
        v.certificate["tuples"] = arr;
        v.contracting = std::move(found);
        return v;
    }
    v.status = Status::Unknown;
    v.reason = "no contracting cylinder found at depth " + std::to_string(depth);
    v.certificate["depth_exhausted"] = depth;
    return v;
}

// ------------------------------------------------------------ combined

Verdict verdict_simple(const PartialSystem& sys, const Potential& pot, int depth) {
    std::vector<Verdict> parts{check_minimal(sys, pot, depth), check_top_free(sys, pot, depth)};
    Verdict oc = check_one_circuit(sys, pot);
    bool one_circuit = oc.status == Status::Holds;
    if (sys.is_graph()) parts.push_back(oc);
    Verdict v = conjunction(Property::Simple, depth, {});
    bool fails = false, unknown = false;
    for (const auto& p : parts) {
        if (p.property == Property::OneCircuit) continue;
        fails = fails || p.status == Status::Fails;
        unknown = unknown || p.status == Status::Unknown;
    }
    fails = fails || one_circuit;
    v.status = fails ? Status::Fails : unknown ? Status::Unknown : Status::Holds;
    RegionReport rr = regular_set(sys, pot);
    bool infinite = sys.is_interval() ? std::get<IntervalSet>(rr.delta_reg).has_nondegenerate()
                                      : !boundary_finite(sys.graph());
    v.certificate["delta_reg_infinite"] = infinite;
    v.certificate["one_circuit"] = one_circuit;
    if (v.status == Status::Holds)
        v.reason = "minimal and topologically free";
    else {
        std::string why;
        for (const auto& p : parts)
            if (p.property != Property::OneCircuit && p.status != Status::Holds)
                why += (why.empty() ? "" : "; ") + property_str(p.property) + " " + status_str(p.status);
        if (one_circuit) why += (why.empty() ? "" : "; ") + std::string("the graph is a single circuit");
        v.reason = why;
    }
    if (!infinite) v.reason += " (Delta_reg is finite; simplicity there reduces to minimal and not one circuit)";
    v.parts = std::move(parts);
    return v;
}

Verdict verdict_purely_infinite(const PartialSystem& sys, const Potential& pot, int depth) {
    Verdict v = conjunction(Property::PurelyInfiniteSimple, depth,
                            {check_minimal(sys, pot, depth), check_contracting(sys, pot, depth)});
    v.certificate["kirchberg"] = v.status == Status::Holds;
    v.certificate["second_countable"] = true;
    if (v.status == Status::Holds) v.reason = "minimal and contracting";
    return v;
}

bool verify_certificate(const PartialSystem& sys, const Potential& pot, const Verdict& v) {
    for (const auto& p : v.parts)
        if (!verify_certificate(sys, pot, p)) return false;
    if (v.status == Status::Unknown) return true;
    RegionReport rr = regular_set(sys, pot);
    switch (v.property) {
        case Property::TopFree:
            if (v.status == Status::Holds) return check_top_free(sys, pot, v.depth).status == Status::Holds;
            if (sys.is_graph()) {
                const auto& g = sys.graph();
                if (v.circuit.empty()) return false;
                for (std::size_t i = 0; i < v.circuit.size(); ++i) {
                    int e = v.circuit[i], f = v.circuit[(i + 1) % v.circuit.size()];
                    if (g.s(e) != g.r(f)) return false;
                    if (positive_edges_at(g, pot.graph(), g.r(e)).size() != 1) return false;
                }
                return true;
            }
            if (!v.identity_branch) return false;
            {
                const auto& cb = *v.identity_branch;
                const auto& reg = std::get<IntervalSet>(rr.delta_reg);
                IntervalSet D = sys.interval().space;
                Affine f;
                for (auto i : cb.seq) {
                    const auto& b = sys.interval().branches[i];
                    D = preimage_under(f, D, IntervalSet(b.domain).intersect(reg));
                    f = b.map.after(f);
                }
                return f.is_identity() && D == cb.domain && D.has_nondegenerate();
            }
        case Property::Minimal:
            if (v.status == Status::Holds) return check_minimal(sys, pot, v.depth).status == Status::Holds;
            if (!v.invariant_set) return false;
            {
                auto [p, n] = check_invariant(sys, pot, *v.invariant_set);
                return p && n && region_open(sys, *v.invariant_set) && !region_empty(*v.invariant_set) &&
                       !region_subset(space_region(sys), *v.invariant_set);
            }
        case Property::Contracting:
            if (v.status == Status::Fails) return check_contracting(sys, pot, v.depth).status == Status::Fails;
            if (v.contracting.empty()) return false;
            for (const auto& t : v.contracting)
                if (!check_contracting_set(sys, pot, t).ok) return false;
            return true;
        default: return true;
    }
}

AnnihilationWitness annihilation_witness(const PartialSystem& sys, const Potential& pot, const Verdict& top_free,
                                      int depth) {
    if (top_free.property != Property::TopFree || top_free.status != Status::Fails)
        throw hypothesis_violated("the witness needs a failed topological-freeness verdict");
    AnnihilationWitness w;
    Fn a;
    std::vector<Point> seeds;
    if (sys.is_graph()) {
        const auto& g = sys.graph();
        const auto& c = top_free.circuit;
        w.n = static_cast<int>(c.size());
        Word cyl{g.r(c.front()), c};
        a = [cyl](const Point& x) { return std::get<Path>(x).in_cylinder(cyl) ? 1.0 : 0.0; };
        seeds.push_back(Point{Path::periodic(g, {}, c)});
        w.support = cyl.str(g);
    } else {
        const auto& cb = *top_free.identity_branch;
        w.n = static_cast<int>(cb.seq.size());
        const Interval* big = nullptr;
        for (const auto& c : cb.domain.components())
            if (!c.degenerate() && (!big || big->length() < c.length())) big = &c;
        double p = big->lo.to_double(), q = big->hi.to_double();
        double m = (p + q) / 2, r = (q - p) / 2;
        a = [m, r](const Point& x) { return std::max(0.0, 1.0 - std::abs(point_coord(x) - m) / r); };
        seeds.push_back(Point{midpoint(big->lo, big->hi)});
        w.support = big->str();
    }
    Fn sqrt_rho_n = [f = fn_cocycle(sys, pot, w.n)](const Point& x) { return std::sqrt(f(x)); };
    Monomial M{a, w.n, 0, fn_const(1.0), "a t^n"};
    auto measure = [&](const RepPair& R) {
        SpMat D = monomial_matrix(R, M) - R.pi(fn_product(a, sqrt_rho_n));
        return spectral_norm_rows(D, R.exact_rows(monomial_word(M)));
    };
    w.orbit_norm = measure(orbit_rep(sys, pot, seeds, depth));
    w.regular_norm = measure(regular_rep(sys, pot, seeds, depth, w.n + 2));
    return w;
}

}  // namespace xferop
