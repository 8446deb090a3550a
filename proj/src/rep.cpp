#include "xferop/rep.hpp"

#include "xferop/dynamics.hpp"
#include "xferop/errors.hpp"
#include "xferop/transfer.hpp"

#include <Eigen/Dense>
#include <Eigen/SVD>

#include <algorithm>
#include <cmath>
#include <set>
#include <sstream>

namespace xferop {

std::optional<std::size_t> OrbitBasis::find(const Point& x) const {
    auto it = index.find(x);
    if (it == index.end()) return std::nullopt;
    return it->second;
}

OrbitBasis orbit_basis(const PartialSystem& sys, const Potential& pot, const std::vector<Point>& seeds, int depth) {
    if (seeds.empty()) throw empty_basis("orbit basis needs at least one seed");
    if (depth < 0) throw out_of_domain("negative basis depth");
    OrbitBasis B;
    B.seeds = seeds;
    B.depth = depth;
    std::vector<Point> frontier;
    auto add = [&](const Point& x, int lvl) {
        if (B.index.count(x)) return;
        B.index[x] = B.points.size();
        B.points.push_back(x);
        B.level.push_back(lvl);
        frontier.push_back(x);
    };
    for (const auto& s : seeds) {
        if (!in_space(sys, s)) throw out_of_domain("seed " + point_str(sys, s) + " is outside X");
        add(s, 0);
    }
    for (int k = 1; k <= depth; ++k) {
        auto cur = std::move(frontier);
        frontier.clear();
        for (const auto& y : cur)
            for (const auto& x : preimages1(sys, y)) add(x, k);
    }
    B.interior.assign(B.points.size(), true);
    for (std::size_t i = 0; i < B.points.size(); ++i)
        for (const auto& x : preimages1(sys, B.points[i]))
            if (rho(sys, pot, x).sign() > 0 && !B.index.count(x)) B.interior[i] = false;
    return B;
}

std::vector<Point> default_seeds(const PartialSystem& sys) {
    std::vector<Point> out;
    if (sys.is_interval()) {
        for (const auto& c : sys.interval().space.components()) {
            Rational w = c.hi - c.lo;
            for (const auto& f : {Rational(1, 3), Rational(2, 7), Rational(3, 5)}) out.push_back(Point{c.lo + w * f});
        }
        return out;
    }
    const Graph& g = sys.graph();
    std::set<Path> seen;
    for (std::size_t e = 0; e < g.edges.size(); ++e) {
        Path p = sample_path(g, Word{g.r(static_cast<int>(e)), {static_cast<int>(e)}});
        if (seen.insert(p).second) out.push_back(p);
    }
    for (std::size_t v = 0; v < g.vertices.size(); ++v)
        if (g.is_source(static_cast<int>(v))) {
            Path p = Path::vertex_point(static_cast<int>(v));
            if (seen.insert(p).second) out.push_back(p);
        }
    return out;
}

// ------------------------------------------------------------------ RepPair

std::size_t RepPair::dim() const {
    return kind == RepKind::Orbit ? basis.size() : basis.size() * static_cast<std::size_t>(2 * window + 1);
}

std::size_t RepPair::row(std::size_t point, int z) const {
    if (kind == RepKind::Orbit) return point;
    return point * static_cast<std::size_t>(2 * window + 1) + static_cast<std::size_t>(z + window);
}

std::size_t RepPair::point_of(std::size_t r) const {
    return kind == RepKind::Orbit ? r : r / static_cast<std::size_t>(2 * window + 1);
}

int RepPair::z_of(std::size_t r) const {
    return kind == RepKind::Orbit ? 0 : static_cast<int>(r % static_cast<std::size_t>(2 * window + 1)) - window;
}

Eigen::VectorXd RepPair::pi_diag(const Fn& a) const {
    Eigen::VectorXd d(static_cast<Eigen::Index>(dim()));
    std::vector<double> vals(basis.size());
    for (std::size_t i = 0; i < basis.size(); ++i) vals[i] = a(basis.points[i]);
    for (std::size_t r = 0; r < dim(); ++r) d[static_cast<Eigen::Index>(r)] = vals[point_of(r)];
    return d;
}

SpMat RepPair::pi(const Fn& a) const {
    Eigen::VectorXd d = pi_diag(a);
    SpMat D(d.size(), d.size());
    std::vector<Eigen::Triplet<double>> trip;
    for (Eigen::Index i = 0; i < d.size(); ++i)
        if (d[i] != 0) trip.emplace_back(i, i, d[i]);
    D.setFromTriplets(trip.begin(), trip.end());
    return D;
}

std::vector<bool> RepPair::exact_rows(const Letters& word) const {
    std::vector<bool> ok(dim(), true);
    for (std::size_t r0 = 0; r0 < dim(); ++r0) {
        std::set<std::size_t> cur{r0};
        for (char c : word) {
            std::set<std::size_t> next;
            for (auto r : cur) {
                std::size_t p = point_of(r);
                int z = z_of(r);
                if (c == 'T') {
                    if (up[p] == -1) continue;
                    if (up[p] == -2 || (kind == RepKind::Regular && z - 1 < -window)) {
                        ok[r0] = false;
                        break;
                    }
                    next.insert(row(static_cast<std::size_t>(up[p]), z - 1));
                } else {
                    if (down[p].empty() && down_complete[p]) continue;
                    if (!down_complete[p] || (kind == RepKind::Regular && z + 1 > window)) {
                        ok[r0] = false;
                        break;
                    }
                    for (auto q : down[p]) next.insert(row(q, z + 1));
                }
            }
            if (!ok[r0]) break;
            cur = std::move(next);
        }
    }
    return ok;
}

std::string RepPair::row_str(std::size_t r) const {
    std::string s = point_str(sys, basis.points[point_of(r)]);
    if (kind == RepKind::Regular) s += " @ z=" + std::to_string(z_of(r));
    return s;
}

namespace {

RepPair build_rep(const PartialSystem& sys, const Potential& pot, const std::vector<Point>& seeds, int depth,
                  RepKind kind, int window, std::function<double(const Point&)> weight) {
    require_valid(sys, pot);
    RepPair R;
    R.sys = sys;
    R.pot = pot;
    R.basis = orbit_basis(sys, pot, seeds, depth);
    R.kind = kind;
    R.window = kind == RepKind::Regular ? window : 0;
    if (kind == RepKind::Regular && window < 1) throw out_of_domain("regular representation needs window >= 1");
    R.weight = weight ? std::move(weight)
                      : std::function<double(const Point&)>(
                            [sys, pot](const Point& x) { return rho(sys, pot, x).to_double(); });
    std::size_t N = R.basis.size();
    std::vector<double> w(N);
    R.up.assign(N, -1);
    R.down.assign(N, {});
    R.down_complete.assign(N, true);
    for (std::size_t i = 0; i < N; ++i) {
        const Point& x = R.basis.points[i];
        w[i] = in_delta(sys, x) ? R.weight(x) : 0.0;
        if (w[i] != 0) {
            auto y = R.basis.find(phi(sys, x));
            R.up[i] = y ? static_cast<long>(*y) : -2;
        }
        for (const auto& p : preimages1(sys, x)) {
            if (R.weight(p) == 0) continue;
            if (auto j = R.basis.find(p))
                R.down[i].push_back(*j);
            else
                R.down_complete[i] = false;
        }
    }
    std::vector<Eigen::Triplet<double>> trip;
    for (std::size_t i = 0; i < N; ++i) {
        if (R.up[i] < 0) continue;
        double s = std::sqrt(w[i]);
        auto j = static_cast<std::size_t>(R.up[i]);
        if (kind == RepKind::Orbit) {
            trip.emplace_back(static_cast<int>(i), static_cast<int>(j), s);
        } else {
            for (int z = -window + 1; z <= window; ++z)
                trip.emplace_back(static_cast<int>(R.row(i, z)), static_cast<int>(R.row(j, z - 1)), s);
        }
    }
    auto D = static_cast<Eigen::Index>(R.dim());
    R.T = SpMat(D, D);
    R.T.setFromTriplets(trip.begin(), trip.end());
    return R;
}

SpMat mat_power(const SpMat& A, int n, Eigen::Index dim) {
    SpMat I(dim, dim);
    I.setIdentity();
    SpMat out = I;
    for (int i = 0; i < n; ++i) out = SpMat(out * A);
    return out;
}

}  // namespace

RepPair orbit_rep(const PartialSystem& sys, const Potential& pot, const std::vector<Point>& seeds, int depth) {
    return build_rep(sys, pot, seeds, depth, RepKind::Orbit, 0, nullptr);
}

RepPair regular_rep(const PartialSystem& sys, const Potential& pot, const std::vector<Point>& seeds, int depth,
                    int window) {
    return build_rep(sys, pot, seeds, depth, RepKind::Regular, window, nullptr);
}

RepPair regular_rep_weighted(const PartialSystem& sys, const Potential& pot, const std::vector<Point>& seeds,
                             int depth, int window, std::function<double(const Point&)> weight) {
    return build_rep(sys, pot, seeds, depth, RepKind::Regular, window, std::move(weight));
}

Residual masked_residual(const RepPair& rep, const SpMat& A, const SpMat& B, const std::vector<bool>& rows,
                         const std::string& name) {
    Residual res;
    res.name = name;
    SpMat D = A - B;
    for (Eigen::Index r = 0; r < D.outerSize(); ++r) {
        if (!rows[static_cast<std::size_t>(r)]) {
            ++res.boundary;
            continue;
        }
        ++res.interior;
        for (SpMat::InnerIterator it(D, r); it; ++it)
            if (std::abs(it.value()) > res.value) {
                res.value = std::abs(it.value());
                res.witness = rep.row_str(static_cast<std::size_t>(r)) + " -> " +
                              rep.row_str(static_cast<std::size_t>(it.col()));
            }
    }
    return res;
}

// ------------------------------------------------------------- functions

Fn fn_const(double c) {
    return [c](const Point&) { return c; };
}

Fn fn_product(const Fn& f, const Fn& g) {
    return [f, g](const Point& x) {
        double a = f(x);
        return a == 0 ? 0.0 : a * g(x);
    };
}

Fn fn_alpha(const PartialSystem& sys, const Fn& f, int k) {
    if (k == 0) return f;
    return [sys, f, k](const Point& x) {
        if (orbit_depth(sys, x, k) < k) return 0.0;
        return f(phi_n(sys, x, k));
    };
}

Fn fn_transfer(const PartialSystem& sys, const Potential& pot, const Fn& f, int k) {
    if (k == 0) return f;
    return [sys, pot, f, k](const Point& y) { return apply_fn(sys, pot, f, y, k); };
}

Fn fn_cocycle(const PartialSystem& sys, const Potential& pot, int k) {
    return [sys, pot, k](const Point& x) {
        if (orbit_depth(sys, x, k) < k) return 0.0;
        return cocycle(sys, pot, k, x).to_double();
    };
}

// ------------------------------------------------------------- relations

Residual check_transfer_relation(const RepPair& rep, const Fn& a) {
    SpMat lhs = rep.T_star() * rep.pi(a) * rep.T;
    // L built from the same weight as the entries
    Fn La = [&rep, a](const Point& y) {
        double s = 0;
        for (const auto& x : preimages1(rep.sys, y))
            if (in_delta(rep.sys, x)) s += rep.weight(x) * a(x);
        return s;
    };
    SpMat rhs = rep.pi(La);
    return masked_residual(rep, lhs, rhs, rep.exact_rows("ST"), "transfer_relation");
}

Residual check_commutation(const RepPair& rep, const Fn& a, const Fn& b) {
    SpMat lhs = rep.pi(b) * rep.T * rep.pi(a);
    SpMat rhs = rep.pi(fn_product(b, fn_alpha(rep.sys, a, 1))) * rep.T;
    return masked_residual(rep, lhs, rhs, rep.exact_rows("T"), "commutation");
}

// ------------------------------------------------------------- quasi-basis

namespace {

bool injective_on(const IntervalSystem& is, const IntervalSet& S) {
    std::vector<IntervalSet> imgs;
    for (const auto& b : is.branches) {
        IntervalSet part = S.intersect(IntervalSet(b.domain));
        if (!part.empty()) imgs.push_back(part.image(b.map));
    }
    for (std::size_t i = 0; i < imgs.size(); ++i)
        for (std::size_t j = i + 1; j < imgs.size(); ++j)
            if (!imgs[i].intersect(imgs[j]).empty()) return false;
    return true;
}

Fn sqrt_ratio(const PartialSystem& sys, const Potential& pot, const PwPoly& v) {
    return [sys, pot, v](const Point& x) {
        const Rational& r = std::get<Rational>(x);
        Rational vx = v(r);
        if (vx.sign() <= 0) return 0.0;
        Rational p = rho(sys, pot, x);
        if (p.sign() <= 0) return 0.0;
        return std::sqrt((vx / p).to_double());
    };
}

}  // namespace

QuasiBasis quasi_basis(const PartialSystem& sys, const Potential& pot, const Region& K) {
    require_valid(sys, pot);
    RegionReport rr = regular_set_unchecked(sys, pot);
    if (!region_subset(K, rr.delta_reg))
        throw not_regular("K = " + region_str(K) + " is not contained in Delta_reg = " + region_str(rr.delta_reg));
    QuasiBasis qb;
    qb.K = K;
    if (!sys.is_interval()) {
        const Graph& g = sys.graph();
        const auto& Kc = std::get<CylinderSet>(K);
        for (std::size_t e = 0; e < g.edges.size(); ++e) {
            Word w{g.r(static_cast<int>(e)), {static_cast<int>(e)}};
            auto cyl = CylinderSet::cylinder(sys.graph_ptr(), w);
            if (cyl.intersect(Kc).empty()) continue;
            double lam = pot.graph().weights[e].to_double();
            int ei = static_cast<int>(e);
            qb.u.push_back([ei, lam](const Point& x) {
                const auto& p = std::get<Path>(x);
                return !p.is_vertex() && p.edge_at(0) == ei ? 1.0 / std::sqrt(lam) : 0.0;
            });
            qb.cover.push_back(w.str(g));
        }
        return qb;
    }
    const auto& is = sys.interval();
    const auto& KI = std::get<IntervalSet>(K);
    for (const auto& c : KI.components())
        if (!c.lo_closed || !c.hi_closed) throw not_regular("K must be compact; component " + c.str() + " is not closed");
    const auto& reg = std::get<IntervalSet>(rr.delta_reg);

    // pieces between cut points (branch boundaries inside a component)
    struct Piece {
        Rational lo, hi;
        bool lo_cut, hi_cut;
    };
    std::vector<Piece> pieces;
    std::optional<Rational> minlen;
    auto shrink = [&](const Rational& len) {
        if (len.sign() > 0 && (!minlen || len < *minlen)) minlen = len;
    };
    for (const auto& c : KI.components()) {
        std::set<Rational> cuts;
        for (const auto& b : is.branches)
            for (const auto& e : {b.domain.lo, b.domain.hi})
                if (c.lo < e && e < c.hi) cuts.insert(e);
        std::vector<Rational> pts{c.lo};
        pts.insert(pts.end(), cuts.begin(), cuts.end());
        pts.push_back(c.hi);
        for (std::size_t i = 0; i + 1 < pts.size(); ++i) {
            pieces.push_back({pts[i], pts[i + 1], i > 0, i + 2 < pts.size()});
            shrink(pts[i + 1] - pts[i]);
        }
    }
    for (std::size_t i = 0; i + 1 < KI.components().size(); ++i)
        shrink(KI.components()[i + 1].lo - KI.components()[i].hi);
    Rational h = minlen ? *minlen / Rational(4) : Rational(1, 16);
    for (int attempt = 0; attempt < 60; ++attempt, h = h / Rational(2)) {
        std::vector<PwPoly> vs;
        bool ok = true;
        for (const auto& p : pieces) {
            std::vector<std::pair<Rational, Rational>> knots;
            knots.push_back({p.lo - h, Rational(0)});
            knots.push_back({p.lo_cut ? p.lo + h : p.lo, Rational(1)});
            if (p.hi != p.lo || p.lo_cut || p.hi_cut) knots.push_back({p.hi_cut ? p.hi - h : p.hi, Rational(1)});
            knots.push_back({p.hi + h, Rational(0)});
            IntervalSet S = IntervalSet(Interval::closed(p.lo - h, p.hi + h)).intersect(is.space);
            if (!reg.contains(S) || !injective_on(is, S)) {
                ok = false;
                break;
            }
            vs.push_back(PwPoly::linear_spline(knots));
        }
        if (!ok) continue;
        qb.margin = h.to_double();
        for (std::size_t i = 0; i < vs.size(); ++i) {
            qb.u.push_back(sqrt_ratio(sys, pot, vs[i]));
            qb.cover.push_back(vs[i].support().intersect(is.space).str());
        }
        return qb;
    }
    throw not_regular("no injective cover of K = " + KI.str() + " inside Delta_reg was found");
}

QuasiBasis forced_quasi_basis(const PartialSystem& sys, const Potential& pot, const IntervalSet& K) {
    QuasiBasis qb;
    qb.K = K;
    qb.forced = true;
    qb.u.push_back([sys, pot, K](const Point& x) {
        if (!K.contains(std::get<Rational>(x))) return 0.0;
        Rational p = rho(sys, pot, x);
        return p.sign() > 0 ? 1.0 / std::sqrt(p.to_double()) : 0.0;
    });
    qb.cover.push_back(K.str());
    return qb;
}

Residual check_covariance(const RepPair& rep, const Fn& a, const QuasiBasis& qb) {
    SpMat TS = rep.T * rep.T_star();
    auto D = static_cast<Eigen::Index>(rep.dim());
    SpMat sum(D, D);
    for (const auto& u : qb.u) {
        SpMat pu = rep.pi(u);
        sum += SpMat(pu * TS * pu);
    }
    SpMat pa = rep.pi(a);
    SpMat lhs = pa * sum;
    auto r = masked_residual(rep, lhs, pa, rep.exact_rows("TS"), qb.forced ? "covariance_forced" : "covariance");
    return r;
}

// ---------------------------------------------------------------- monomials

Letters monomial_word(const Monomial& M) { return std::string(static_cast<std::size_t>(M.n), 'T') + std::string(static_cast<std::size_t>(M.m), 'S'); }

SpMat monomial_matrix(const RepPair& rep, const Monomial& M) {
    auto D = static_cast<Eigen::Index>(rep.dim());
    SpMat out = rep.pi(M.a) * mat_power(rep.T, M.n, D) * mat_power(rep.T_star(), M.m, D) * rep.pi(M.b);
    out.prune(0.0);
    return out;
}

Monomial product_closed_form(const PartialSystem& sys, const Potential& pot, const Monomial& M1,
                             const Monomial& M2) {
    Fn g = fn_product(M1.b, M2.a);
    if (M1.m >= M2.n) {
        Fn h = fn_alpha(sys, fn_transfer(sys, pot, g, M2.n), M2.m);
        return {M1.a, M1.n, M1.m - M2.n + M2.m, fn_product(h, M2.b), "closed"};
    }
    Fn h = fn_alpha(sys, fn_transfer(sys, pot, g, M1.m), M1.n);
    return {fn_product(M1.a, h), M2.n - M1.m + M1.n, M2.m, M2.b, "closed"};
}

Residual product_check(const RepPair& rep, const Monomial& M1, const Monomial& M2) {
    SpMat lhs = monomial_matrix(rep, M1) * monomial_matrix(rep, M2);
    Monomial C = product_closed_form(rep.sys, rep.pot, M1, M2);
    SpMat rhs = monomial_matrix(rep, C);
    auto r1 = rep.exact_rows(monomial_word(M1) + monomial_word(M2));
    auto r2 = rep.exact_rows(monomial_word(C));
    for (std::size_t i = 0; i < r1.size(); ++i) r1[i] = r1[i] && r2[i];
    return masked_residual(rep, lhs, rhs, r1, "product");
}

// --------------------------------------------------------------- expectations

std::vector<Term> expectation_E(const std::vector<Term>& terms) {
    std::vector<Term> out;
    for (const auto& t : terms)
        if (t.mono.n == t.mono.m) out.push_back(t);
    return out;
}

ExpectationReport expectation_E_check(const RepPair& regular, const std::vector<Term>& terms, double tol) {
    if (regular.kind != RepKind::Regular) throw unsupported("expectation_E_check needs the regular representation");
    ExpectationReport rep;
    rep.kept = expectation_E(terms);
    auto D = static_cast<Eigen::Index>(regular.dim());
    SpMat X(D, D), E(D, D);
    for (const auto& t : terms) X += SpMat(t.coeff * monomial_matrix(regular, t.mono));
    for (const auto& t : rep.kept) E += SpMat(t.coeff * monomial_matrix(regular, t.mono));
    std::vector<Eigen::Triplet<double>> trip;
    for (Eigen::Index r = 0; r < X.outerSize(); ++r)
        for (SpMat::InnerIterator it(X, r); it; ++it)
            if (regular.z_of(static_cast<std::size_t>(r)) == regular.z_of(static_cast<std::size_t>(it.col())))
                trip.emplace_back(r, it.col(), it.value());
    SpMat P(D, D);
    P.setFromTriplets(trip.begin(), trip.end());
    SpMat diff = P - E;
    for (Eigen::Index r = 0; r < diff.outerSize(); ++r)
        for (SpMat::InnerIterator it(diff, r); it; ++it)
            rep.pinching_residual = std::max(rep.pinching_residual, std::abs(it.value()));
    rep.norm_input = spectral_norm(X);
    rep.norm_output = spectral_norm(E);
    rep.contractive = rep.norm_output <= rep.norm_input + tol;
    return rep;
}

std::vector<DiagonalEntry> expectation_G(const RepPair& regular, const SpMat& M, const std::vector<bool>& rows) {
    std::vector<DiagonalEntry> out;
    for (std::size_t r = 0; r < regular.dim(); ++r) {
        if (!rows[r]) continue;
        out.push_back({regular.basis.points[regular.point_of(r)], regular.z_of(r),
                       M.coeff(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(r))});
    }
    return out;
}

Residual g_check(const RepPair& regular, const Monomial& M) {
    SpMat A = monomial_matrix(regular, M);
    auto rows = regular.exact_rows(monomial_word(M));
    Residual res;
    res.name = "G_formula";
    Fn rk = M.n == M.m ? fn_cocycle(regular.sys, regular.pot, M.n) : fn_const(0);
    std::vector<double> expect(regular.basis.size());
    for (std::size_t i = 0; i < regular.basis.size(); ++i) {
        const Point& x = regular.basis.points[i];
        expect[i] = M.n == M.m ? M.a(x) * M.b(x) * rk(x) : 0.0;
    }
    for (std::size_t r = 0; r < regular.dim(); ++r) {
        if (!rows[r]) {
            ++res.boundary;
            continue;
        }
        ++res.interior;
        double d = std::abs(A.coeff(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(r)) -
                            expect[regular.point_of(r)]);
        if (d > res.value) {
            res.value = d;
            res.witness = regular.row_str(r);
        }
    }
    return res;
}

Residual check_gauge(const RepPair& regular, std::complex<double> z, const Monomial& M) {
    if (regular.kind != RepKind::Regular) throw unsupported("gauge check needs the regular representation");
    SpMat A = monomial_matrix(regular, M);
    Residual res;
    res.name = "gauge";
    res.interior = regular.dim();
    std::complex<double> target = std::pow(z, M.n - M.m);
    for (Eigen::Index r = 0; r < A.outerSize(); ++r)
        for (SpMat::InnerIterator it(A, r); it; ++it) {
            int dz = regular.z_of(static_cast<std::size_t>(r)) - regular.z_of(static_cast<std::size_t>(it.col()));
            double d = std::abs((std::pow(z, dz) - target) * it.value());
            if (d > res.value) {
                res.value = d;
                res.witness = regular.row_str(static_cast<std::size_t>(r));
            }
        }
    return res;
}

Residual rescale_check(const PartialSystem& sys, const Potential& pot, const std::function<double(const Point&)>& omega,
                       const Fn& a, const std::vector<Point>& seeds, int depth, int window) {
    RepPair R1 = regular_rep(sys, pot, seeds, depth, window);
    RepPair R2 = regular_rep_weighted(sys, pot, seeds, depth, window, [sys, pot, omega](const Point& x) {
        return rho(sys, pot, x).to_double() * omega(x);
    });
    SpMat lhs = R2.pi(a) * R2.T;
    Fn a_sqrt = [a, omega](const Point& x) { return a(x) * std::sqrt(omega(x)); };
    SpMat rhs = R1.pi(a_sqrt) * R1.T;
    return masked_residual(R1, lhs, rhs, R1.exact_rows("T"), "rescale");
}

// --------------------------------------------------------------------- norms

double spectral_norm(const SpMat& M) {
    if (M.nonZeros() == 0) return 0.0;
    if (M.rows() * M.cols() <= 1'500'000) {
        Eigen::MatrixXd d(M);
        Eigen::BDCSVD<Eigen::MatrixXd> svd(d);
        return svd.singularValues().size() ? svd.singularValues()[0] : 0.0;
    }
    Eigen::VectorXd v = Eigen::VectorXd::Ones(M.cols());
    for (Eigen::Index i = 0; i < v.size(); ++i) v[i] += 1e-3 * static_cast<double>(i % 7);
    v.normalize();
    double est = 0;
    for (int it = 0; it < 2000; ++it) {
        Eigen::VectorXd w = M.transpose() * (M * v);
        double n = w.norm();
        if (n == 0) return 0.0;
        v = w / n;
        if (std::abs(n - est) <= 1e-14 * n) {
            est = n;
            break;
        }
        est = n;
    }
    return std::sqrt(est);
}

double spectral_norm_rows(const SpMat& M, const std::vector<bool>& rows) {
    SpMat C = M;
    for (Eigen::Index r = 0; r < C.outerSize(); ++r)
        if (!rows[static_cast<std::size_t>(r)])
            for (SpMat::InnerIterator it(C, r); it; ++it) it.valueRef() = 0;
    C.prune(0.0);
    return spectral_norm(C);
}

// ------------------------------------------------------------- lazy walker

FactorWord factors_of(const Monomial& M) {
    FactorWord w;
    w.push_back({Factor::Mul, M.a});
    for (int i = 0; i < M.n; ++i) w.push_back({Factor::T, nullptr});
    for (int i = 0; i < M.m; ++i) w.push_back({Factor::TStar, nullptr});
    w.push_back({Factor::Mul, M.b});
    return w;
}

FactorWord concat(const FactorWord& a, const FactorWord& b) {
    FactorWord out = a;
    out.insert(out.end(), b.begin(), b.end());
    return out;
}

std::map<std::pair<Point, int>, double> apply_word(const PartialSystem& sys, const Potential& pot,
                                                   const FactorWord& w, const Point& x) {
    std::map<std::pair<Point, int>, double> v{{{x, 0}, 1.0}};
    for (auto f = w.rbegin(); f != w.rend(); ++f) {
        std::map<std::pair<Point, int>, double> next;
        for (const auto& [key, c] : v) {
            const auto& [p, z] = key;
            switch (f->kind) {
                case Factor::Mul: {
                    double s = f->f(p);
                    if (s != 0) next[key] += c * s;
                    break;
                }
                case Factor::T:
                    for (const auto& q : preimages1(sys, p)) {
                        double r = rho(sys, pot, q).to_double();
                        if (r != 0) next[{q, z + 1}] += c * std::sqrt(r);
                    }
                    break;
                case Factor::TStar:
                    if (in_delta(sys, p)) {
                        double r = rho(sys, pot, p).to_double();
                        if (r != 0) next[{phi(sys, p), z - 1}] += c * std::sqrt(r);
                    }
                    break;
            }
        }
        v = std::move(next);
        if (v.empty()) break;
    }
    return v;
}

double g_value(const PartialSystem& sys, const Potential& pot, const FactorWord& w, const Point& x) {
    auto v = apply_word(sys, pot, w, x);
    auto it = v.find({x, 0});
    return it == v.end() ? 0.0 : it->second;
}

std::string coo_csv(const SpMat& M) {
    std::ostringstream out;
    out.precision(17);
    out << "row,col,value\n";
    for (Eigen::Index r = 0; r < M.outerSize(); ++r)
        for (SpMat::InnerIterator it(M, r); it; ++it) out << r << "," << it.col() << "," << it.value() << "\n";
    return out.str();
}

}  // namespace xferop
