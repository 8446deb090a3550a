#include "xferop/groupoid.hpp"

#include "xferop/dynamics.hpp"
#include "xferop/errors.hpp"
#include "xferop/transfer.hpp"

#include <cmath>
#include <limits>
#include <sstream>

namespace xferop {

namespace {

constexpr std::size_t npos = std::numeric_limits<std::size_t>::max();

bool region_equal(const Region& a, const Region& b) { return region_subset(a, b) && region_subset(b, a); }

Fn inv_sqrt_cocycle(const PartialSystem& sys, const Potential& pot, int n) {
    Fn c = fn_cocycle(sys, pot, n);
    return [c](const Point& x) {
        double r = c(x);
        return r > 0 ? 1.0 / std::sqrt(r) : 0.0;
    };
}

}  // namespace

std::optional<std::size_t> Deaconu::find(std::size_t x, int k, std::size_t y) const {
    auto it = index.find({x, k, y});
    if (it == index.end()) return std::nullopt;
    return it->second;
}

std::string Deaconu::csv(const PartialSystem& sys) const {
    std::ostringstream out;
    out << "x,k,y,n,m\n";
    for (const auto& g : elements)
        out << point_str(sys, basis.points[g.x]) << "," << g.k << "," << point_str(sys, basis.points[g.y]) << ","
            << g.n << "," << g.m << "\n";
    return out.str();
}

Deaconu build_deaconu(const PartialSystem& sys, const Potential& pot, const std::vector<Point>& seeds, int depth,
                      bool restrict_regular) {
    RegionReport rr = regular_set(sys, pot);
    bool local_homeo = region_equal(rr.delta_reg, rr.delta_pos) && region_equal(rr.delta_pos, rr.delta);
    if (!local_homeo && !restrict_regular) {
        std::string pts;
        for (const auto& ip : rr.irregular) pts += (pts.empty() ? "" : ", ") + point_str(sys, ip.x);
        throw not_local_homeo("phi is not a local homeomorphism with positive continuous rho (irregular: " + pts +
                              "); pass --restrict-regular to work on Delta_reg");
    }
    Deaconu G;
    G.depth = depth;
    G.restricted = !local_homeo;
    G.basis = orbit_basis(sys, pot, seeds, depth);
    const auto& pts = G.basis.points;
    // orbit of each basis point while it stays in the domain
    std::map<Point, std::vector<std::pair<std::size_t, int>>> at;
    for (std::size_t i = 0; i < pts.size(); ++i) {
        Point p = pts[i];
        for (int s = 0; s <= depth; ++s) {
            at[p].push_back({i, s});
            bool inside = G.restricted ? region_contains(rr.delta_reg, p) : in_delta(sys, p);
            if (s == depth || !inside) break;
            p = phi(sys, p);
        }
    }
    for (const auto& [p, list] : at)
        for (const auto& [i, n] : list)
            for (const auto& [j, m] : list) {
                auto key = std::make_tuple(i, n - m, j);
                auto it = G.index.find(key);
                if (it == G.index.end()) {
                    G.index[key] = G.elements.size();
                    G.elements.push_back({i, n - m, j, n, m});
                } else if (n < G.elements[it->second].n) {
                    G.elements[it->second].n = n;
                    G.elements[it->second].m = m;
                }
            }
    std::vector<std::vector<std::size_t>> by_source(pts.size());
    for (std::size_t g = 0; g < G.elements.size(); ++g) by_source[G.elements[g].x].push_back(g);
    for (std::size_t g = 0; g < G.elements.size(); ++g) {
        const auto& e = G.elements[g];
        for (auto h : by_source[e.y]) {
            const auto& f = G.elements[h];
            auto gh = G.find(e.x, e.k + f.k, f.y);
            G.products.emplace_back(g, h, gh ? *gh : npos);
        }
        auto inv = G.find(e.y, -e.k, e.x);
        G.inverse.push_back(inv ? *inv : npos);
    }
    return G;
}

GroupoidAxioms check_groupoid_axioms(const Deaconu& G) {
    GroupoidAxioms ax;
    std::size_t E = G.elements.size();
    std::vector<std::vector<std::size_t>> by_source(G.basis.size());
    std::vector<std::size_t> pos(E);
    for (std::size_t g = 0; g < E; ++g) {
        auto& list = by_source[G.elements[g].x];
        pos[g] = list.size();
        list.push_back(g);
    }
    // products of g live at offset[g] + pos[h] for h composable with g
    std::vector<std::size_t> offset(E + 1, 0);
    for (std::size_t g = 0; g < E; ++g) offset[g + 1] = offset[g] + by_source[G.elements[g].y].size();
    std::vector<std::size_t> table(offset[E], npos);
    for (const auto& [g, h, gh] : G.products)
        if (G.elements[h].x == G.elements[g].y) table[offset[g] + pos[h]] = gh;
    auto mul = [&](std::size_t g, std::size_t h) {
        return G.elements[h].x == G.elements[g].y ? table[offset[g] + pos[h]] : npos;
    };
    for (const auto& [g, h, gh] : G.products) {
        if (gh == npos) continue;
        for (auto l : by_source[G.elements[h].y]) {
            std::size_t hl = mul(h, l);
            if (hl == npos) continue;
            std::size_t left = mul(gh, l), right = mul(g, hl);
            if (left == npos || right == npos) continue;
            ++ax.associativity_checked;
            if (left != right) ++ax.associativity_failures;
        }
    }
    for (std::size_t g = 0; g < E; ++g) {
        const auto& e = G.elements[g];
        auto unit_y = G.find(e.y, 0, e.y), unit_x = G.find(e.x, 0, e.x);
        if (!unit_x || !unit_y || mul(g, *unit_y) != g || mul(*unit_x, g) != g) ++ax.unit_failures;
        if (G.inverse[g] != npos) {
            std::size_t u = mul(g, G.inverse[g]);
            if (u == npos || G.elements[u].k != 0 || G.elements[u].x != e.x || G.elements[u].y != e.x)
                ++ax.inverse_failures;
        }
    }
    return ax;
}

GapRelation gap_relation(const PartialSystem& sys, const Potential& pot, int n, const std::vector<Point>& samples) {
    require_valid(sys, pot);
    GapRelation R;
    R.n = n;
    std::vector<std::optional<Point>> img(samples.size()), img1(samples.size());
    for (std::size_t i = 0; i < samples.size(); ++i) {
        if (orbit_depth(sys, samples[i], n) >= n) img[i] = phi_n(sys, samples[i], n);
        if (orbit_depth(sys, samples[i], n + 1) >= n + 1) img1[i] = phi_n(sys, samples[i], n + 1);
    }
    auto related = [&](std::size_t i, std::size_t j) { return img[i] && img[j] && *img[i] == *img[j]; };
    for (std::size_t i = 0; i < samples.size(); ++i)
        for (std::size_t j = 0; j < samples.size(); ++j) {
            if (!related(i, j)) continue;
            R.pairs.push_back({n, samples[i], samples[j]});
            if (img1[i] && img1[j] && !(*img1[i] == *img1[j])) R.nested = false;
            if (!related(j, i)) R.equivalence = false;
            for (std::size_t k = 0; k < samples.size(); ++k)
                if (related(j, k) && !related(i, k)) R.equivalence = false;
        }
    for (std::size_t i = 0; i < samples.size(); ++i)
        if (img[i] && !related(i, i)) R.equivalence = false;
    return R;
}

Monomial phi_image(const PartialSystem& sys, const Potential& pot, const GroupoidMonomial& f) {
    return {fn_product(f.a, inv_sqrt_cocycle(sys, pot, f.n)), f.n, f.m,
            fn_product(inv_sqrt_cocycle(sys, pot, f.m), f.b), "Phi"};
}

Residual iso_phi_check(const RepPair& R, const GroupoidMonomial& f, const GroupoidMonomial& g) {
    if (R.kind != RepKind::Regular) throw unsupported("iso_phi_check needs the regular representation");
    const auto& sys = R.sys;
    Monomial Pf = phi_image(sys, R.pot, f), Pg = phi_image(sys, R.pot, g);
    SpMat lhs = monomial_matrix(R, Pf) * monomial_matrix(R, Pg);
    auto rows = R.exact_rows(monomial_word(Pf) + monomial_word(Pg));
    int k = f.n - f.m + g.n - g.m;
    std::vector<Eigen::Triplet<double>> trip;
    for (std::size_t r = 0; r < R.dim(); ++r) {
        if (!rows[r]) continue;
        const Point& x = R.basis.points[R.point_of(r)];
        int z = R.z_of(r), zc = z - k;
        if (zc < -R.window || zc > R.window) continue;
        if (orbit_depth(sys, x, f.n) < f.n) continue;
        double ax = f.a(x);
        if (ax == 0) continue;
        std::map<std::size_t, double> acc;
        // (f * g)(x, k, w) = sum over y with phi^{f.n} x = phi^{f.m} y and phi^{g.n} y = phi^{g.m} w
        for (const auto& ey : preimages(sys, R.pot, phi_n(sys, x, f.n), f.m, false)) {
            const Point& y = ey.x;
            double c = ax * f.b(y) * g.a(y);
            if (c == 0 || orbit_depth(sys, y, g.n) < g.n) continue;
            for (const auto& ew : preimages(sys, R.pot, phi_n(sys, y, g.n), g.m, false)) {
                auto wi = R.basis.find(ew.x);
                if (!wi) continue;
                acc[*wi] += c * g.b(ew.x);
            }
        }
        for (const auto& [wi, v] : acc)
            if (v != 0) trip.emplace_back(static_cast<int>(r), static_cast<int>(R.row(wi, zc)), v);
    }
    SpMat rhs(lhs.rows(), lhs.cols());
    rhs.setFromTriplets(trip.begin(), trip.end());
    return masked_residual(R, lhs, rhs, rows, "iso_phi");
}

Residual expectation_compat(const RepPair& R, const Fn& a, const Fn& b, int n) {
    Monomial P = phi_image(R.sys, R.pot, {a, b, n, n});
    auto rows = R.exact_rows(monomial_word(P));
    Residual res;
    res.name = "expectation_compat";
    for (const auto& d : expectation_G(R, monomial_matrix(R, P), rows)) {
        ++res.interior;
        double want = orbit_depth(R.sys, d.x, n) >= n ? a(d.x) * b(d.x) : 0.0;
        double diff = std::abs(d.value - want);
        if (diff > res.value) {
            res.value = diff;
            res.witness = point_str(R.sys, d.x);
        }
    }
    res.boundary = R.dim() - res.interior;
    return res;
}

bool GraphGenerators::pass() const {
    for (const auto& r : residuals)
        if (!r.pass()) return false;
    return true;
}

GraphGenerators graph_generators(const PartialSystem& sys, const Potential& pot, int depth,
                                 const std::vector<Point>& seeds) {
    if (!sys.is_graph()) throw unsupported("graph generators need the graph backend");
    const auto& g = sys.graph();
    GraphGenerators out{orbit_rep(sys, pot, seeds.empty() ? default_seeds(sys) : seeds, depth), {}, {}, {}};
    const RepPair& R = out.rep;
    auto D = static_cast<Eigen::Index>(R.dim());
    for (std::size_t v = 0; v < g.vertices.size(); ++v) {
        int vi = static_cast<int>(v);
        out.p.push_back(R.pi([vi](const Point& x) { return std::get<Path>(x).vertex == vi ? 1.0 : 0.0; }));
    }
    for (std::size_t e = 0; e < g.edges.size(); ++e) {
        int ei = static_cast<int>(e);
        std::vector<Eigen::Triplet<double>> trip;
        for (std::size_t i = 0; i < R.basis.size(); ++i) {
            const Path& y = std::get<Path>(R.basis.points[i]);
            if (y.vertex != g.s(ei)) continue;
            if (auto j = R.basis.find(Point{y.prepend(g, ei)})) trip.emplace_back(static_cast<int>(*j), static_cast<int>(i), 1.0);
        }
        SpMat s(D, D);
        s.setFromTriplets(trip.begin(), trip.end());
        out.s.push_back(s);
        double lam = pot.graph().weights[e].to_double();
        Word cyl{g.r(ei), {ei}};
        SpMat via_T = R.pi([cyl](const Point& x) { return std::get<Path>(x).in_cylinder(cyl) ? 1.0 : 0.0; }) * R.T;
        via_T *= 1.0 / std::sqrt(lam);
        out.residuals.push_back(masked_residual(R, s, via_T, R.exact_rows("T"), "s_" + g.edge_name(ei) + " = lambda^-1/2 pi(1_Z) T"));
    }
    auto st = R.exact_rows("ST"), ts = R.exact_rows("TS");
    for (std::size_t e = 0; e < g.edges.size(); ++e) {
        int ei = static_cast<int>(e);
        const SpMat& s = out.s[e];
        SpMat sst = s * SpMat(s.transpose());
        out.residuals.push_back(masked_residual(R, SpMat(s.transpose()) * s, out.p[static_cast<std::size_t>(g.s(ei))], st,
                                                "s_" + g.edge_name(ei) + "* s = p_s"));
        out.residuals.push_back(masked_residual(R, out.p[static_cast<std::size_t>(g.r(ei))] * sst, sst, ts,
                                                "s_" + g.edge_name(ei) + " s* <= p_r"));
        for (std::size_t f = 0; f < g.edges.size(); ++f)
            if (f != e && g.r(static_cast<int>(f)) == g.r(ei))
                out.residuals.push_back(masked_residual(R, SpMat(s.transpose()) * out.s[f], SpMat(D, D), st,
                                                        "s_" + g.edge_name(ei) + "* s_" + g.edge_name(static_cast<int>(f)) + " = 0"));
    }
    for (std::size_t v = 0; v < g.vertices.size(); ++v) {
        if (g.is_source(static_cast<int>(v))) continue;
        SpMat sum(D, D);
        for (int e : g.by_range[v]) {
            const SpMat& s = out.s[static_cast<std::size_t>(e)];
            sum = SpMat(sum + SpMat(s * SpMat(s.transpose())));
        }
        out.residuals.push_back(masked_residual(R, out.p[v], sum, ts, "p_" + g.vertices[v] + " = sum s s*"));
    }
    return out;
}

}  // namespace xferop
