#include "xferop/thermo.hpp"

#include "xferop/dynamics.hpp"
#include "xferop/errors.hpp"

#include <algorithm>
#include <cmath>
#include <map>

namespace xferop {

double psi_at(const PartialSystem& sys, const Potential& psi, const Point& x) {
    return rho(sys, psi, x).to_double();
}

Fn fn_birkhoff(const PartialSystem& sys, const Potential& psi, int n) {
    return [sys, psi, n](const Point& x) {
        if (orbit_depth(sys, x, n) < n) return 0.0;
        double s = 0;
        Point y = x;
        for (int k = 0; k < n; ++k) {
            s += psi_at(sys, psi, y);
            if (k + 1 < n) y = phi(sys, y);
        }
        return s;
    };
}

CMonomial to_complex(const Monomial& M) {
    auto lift = [](const Fn& f) -> CFn { return [f](const Point& x) { return std::complex<double>(f(x), 0.0); }; };
    return {lift(M.a), M.n, M.m, lift(M.b)};
}

CMonomial sigma_action(const PartialSystem& sys, const Potential& psi, const CMonomial& M, std::complex<double> lambda) {
    const std::complex<double> I(0, 1);
    Fn Sn = fn_birkhoff(sys, psi, M.n), Sm = fn_birkhoff(sys, psi, M.m);
    CFn a = [a0 = M.a, Sn, lambda, I](const Point& x) { return std::exp(I * lambda * Sn(x)) * a0(x); };
    CFn b = [b0 = M.b, Sm, lambda, I](const Point& x) { return b0(x) * std::exp(-I * lambda * Sm(x)); };
    return {a, M.n, M.m, b};
}

Monomial sigma_i_beta(const PartialSystem& sys, const Potential& psi, const Monomial& M, double beta) {
    Fn Sn = fn_birkhoff(sys, psi, M.n), Sm = fn_birkhoff(sys, psi, M.m);
    Fn a = [a0 = M.a, Sn, beta](const Point& x) { return std::exp(-beta * Sn(x)) * a0(x); };
    Fn b = [b0 = M.b, Sm, beta](const Point& x) { return b0(x) * std::exp(beta * Sm(x)); };
    return {a, M.n, M.m, b, "sigma(" + M.label + ")"};
}

// ------------------------------------------------------------ positive energy

namespace {

struct PsiPiece {
    IntervalSet domain;
    Poly poly;
};

std::vector<PsiPiece> psi_pieces(const PartialSystem& sys, const Potential& psi) {
    const auto& ip = psi.interval();
    std::vector<Rational> pts;
    for (const auto& [x, v] : ip.overrides) pts.push_back(x);
    IntervalSet over = IntervalSet::points(pts);
    std::vector<PsiPiece> out;
    for (const auto& p : ip.pieces) {
        Poly f = p.f.to_poly();
        if (f.degree() > 1) throw unsupported("psi must be piecewise affine");
        out.push_back({IntervalSet(p.domain).minus(over).intersect(sys.interval().delta), f});
    }
    for (const auto& [x, v] : ip.overrides) out.push_back({IntervalSet::point(x), Poly(v)});
    return out;
}

bool psi_is_zero(const Potential& psi) {
    if (psi.is_interval()) {
        for (const auto& p : psi.interval().pieces)
            if (!p.f.is_zero()) return false;
        for (const auto& [x, v] : psi.interval().overrides)
            if (!v.is_zero()) return false;
        return true;
    }
    for (const auto& w : psi.graph().weights)
        if (!w.is_zero()) return false;
    return true;
}

// psi constant on Delta (interval backend), if so.
std::optional<Rational> psi_constant(const PartialSystem& sys, const Potential& psi) {
    if (!psi.is_interval()) return std::nullopt;
    std::optional<Rational> c;
    IntervalSet covered;
    for (const auto& p : psi.interval().pieces) {
        if (!p.f.is_constant()) return std::nullopt;
        if (c && !(*c == p.f.scale)) return std::nullopt;
        c = p.f.scale;
        covered = covered.unite(IntervalSet(p.domain));
    }
    for (const auto& [x, v] : psi.interval().overrides)
        if (!c || !(v == *c)) return std::nullopt;
    if (!c || !covered.contains(sys.interval().delta)) return std::nullopt;
    return c;
}

}  // namespace

Verdict check_positive_energy(const PartialSystem& sys, const Potential& psi, int depth) {
    Verdict v;
    v.property = Property::PositiveEnergy;
    v.depth = depth;
    auto fails = [&](int n, const std::string& where, const std::string& why) {
        v.status = Status::Fails;
        v.reason = why;
        v.certificate["n"] = n;
        v.certificate["zero_at"] = where;
        return v;
    };
    if (sys.is_graph()) {
        const auto& g = sys.graph();
        const auto& w = psi.graph().weights;
        // (vertex at the end of the word, Birkhoff sum) -> one witness word
        std::map<std::pair<int, Rational>, std::vector<int>> layer;
        for (std::size_t e = 0; e < g.edges.size(); ++e) layer[{g.s(static_cast<int>(e)), w[e]}] = {static_cast<int>(e)};
        for (int n = 1; n <= depth; ++n) {
            for (const auto& [key, word] : layer)
                if (key.second.is_zero()) {
                    return fails(n, Word{g.r(word.front()), word}.str(g), "S_" + std::to_string(n) + " psi vanishes on a cylinder");
                }
            if (n == depth) break;
            std::map<std::pair<int, Rational>, std::vector<int>> next;
            for (const auto& [key, word] : layer)
                for (int e : g.by_range[static_cast<std::size_t>(key.first)]) {
                    auto wd = word;
                    wd.push_back(e);
                    next.emplace(std::make_pair(g.s(e), key.second + w[static_cast<std::size_t>(e)]), std::move(wd));
                }
            layer = std::move(next);
        }
        v.status = Status::Holds;
        v.reason = "S_n psi has no zero for n <= " + std::to_string(depth);
        return v;
    }
    const auto& is = sys.interval();
    auto pieces = psi_pieces(sys, psi);
    struct State {
        IntervalSet D;
        Affine f;
        Poly sum;
    };
    auto pre = [](const Affine& f, const IntervalSet& D, const IntervalSet& target) {
        if (f.slope.is_zero()) return target.contains(f.intercept) ? D : IntervalSet();
        return D.intersect(target.preimage(f));
    };
    std::vector<State> cur{{is.space, Affine{}, Poly()}};
    for (int n = 1; n <= depth; ++n) {
        std::vector<State> next;
        for (const auto& s : cur)
            for (const auto& p : pieces) {
                IntervalSet D1 = pre(s.f, s.D, p.domain);
                if (D1.empty()) continue;
                Poly sum = s.sum + p.poly.compose(s.f);
                // zeros of the affine sum on D1 (a subset of Delta_n)
                if (sum.is_zero()) return fails(n, D1.str(), "S_" + std::to_string(n) + " psi vanishes identically");
                if (sum.degree() == 1) {
                    Rational root = -sum.coeffs()[0] / sum.coeffs()[1];
                    if (D1.contains(root))
                        return fails(n, root.str(), "S_" + std::to_string(n) + " psi crosses zero");
                }
                if (n == depth) continue;
                for (const auto& b : is.branches) {
                    IntervalSet D2 = pre(s.f, D1, IntervalSet(b.domain));
                    if (!D2.empty()) next.push_back({D2, b.map.after(s.f), sum});
                }
            }
        if (next.size() > (1U << 18)) throw depth_exceeded("positive-energy search grew too large");
        cur = std::move(next);
    }
    v.status = Status::Holds;
    v.reason = "S_n psi has no zero on Delta_n for n <= " + std::to_string(depth);
    return v;
}

// ------------------------------------------------------------ measures

double GraphMeasure::cylinder(const PartialSystem& sys, const Word& w) const {
    const auto& g = sys.graph();
    double s = 0;
    for (int e : w.edges) s += psi.graph().weights[static_cast<std::size_t>(e)].to_double();
    int end = w.edges.empty() ? w.vertex : g.s(w.edges.back());
    return std::exp(-beta * s) * vertex_mass[static_cast<std::size_t>(end)];
}

double SeriesMeasure::tail() const { return std::pow(q(), depth + 1); }

SeriesMeasure mu_beta(double beta, int depth, const Rational& y0) {
    if (!(2.0 * std::exp(-beta) < 1.0)) throw out_of_domain("the series needs beta > ln 2");
    return {y0, beta, depth};
}

double integrate_pw(const PartialSystem& sys, const SeriesMeasure& mu, const PwPoly& f) {
    const auto& is = sys.interval();
    PwPoly one = PwPoly::constant_on(is.delta, Rational(1));
    PwPoly g = f;
    double total = 0, c = 1.0 - mu.q();
    for (int n = 0; n <= mu.depth; ++n) {
        total += c * std::exp(-n * mu.beta) * g(mu.y0).to_double();
        if (n < mu.depth) g = transfer_pw(is, one, g);
    }
    return total;
}

namespace {

const double kGaussNodes[4] = {-0.8611363115940526, -0.3399810435848563, 0.3399810435848563, 0.8611363115940526};
const double kGaussWeights[4] = {0.3478548451374538, 0.6521451548625461, 0.6521451548625461, 0.3478548451374538};

}  // namespace

double integrate(const PartialSystem& sys, const Measure& mu, const Fn& f, int graph_level) {
    if (const auto* a = std::get_if<AtomicMeasure>(&mu)) return a->integrate(f);
    if (const auto* u = std::get_if<UlamMeasure>(&mu)) {
        double lo = u->lo.to_double(), h = u->bin_width(), total = 0;
        for (std::size_t i = 0; i < u->densities.size(); ++i) {
            if (u->densities[i] == 0) continue;
            double mid = lo + (static_cast<double>(i) + 0.5) * h, acc = 0;
            for (int k = 0; k < 4; ++k)
                acc += kGaussWeights[k] * f(Point{Rational(mpq_class(mid + 0.5 * h * kGaussNodes[k]))});
            total += u->densities[i] * 0.5 * h * acc;
        }
        return total;
    }
    if (const auto* g = std::get_if<GraphMeasure>(&mu)) {
        double total = 0;
        for (const auto& w : atoms(sys.graph(), static_cast<std::size_t>(graph_level)))
            total += g->cylinder(sys, w) * f(Point{sample_path(sys.graph(), w)});
        return total;
    }
    const auto& s = std::get<SeriesMeasure>(mu);
    if (s.depth > 20) throw depth_exceeded("series measure: pointwise integration enumerates 2^depth atoms");
    double total = 0, c = 1.0 - s.q();
    std::vector<Point> layer{Point{s.y0}};
    for (int n = 0; n <= s.depth; ++n) {
        double acc = 0;
        for (const auto& x : layer) acc += f(x);
        total += c * std::exp(-n * s.beta) * acc;
        if (n == s.depth) break;
        std::vector<Point> next;
        for (const auto& y : layer)
            for (auto& x : preimages1(sys, y)) next.push_back(std::move(x));
        layer = std::move(next);
    }
    return total;
}

double total_mass(const PartialSystem& sys, const Measure& mu) {
    if (const auto* s = std::get_if<SeriesMeasure>(&mu))
        return integrate_pw(sys, *s, PwPoly::constant_on(sys.interval().space, Rational(1)));
    if (const auto* u = std::get_if<UlamMeasure>(&mu)) return u->mass();
    if (const auto* a = std::get_if<AtomicMeasure>(&mu)) return a->mass();
    const auto& g = std::get<GraphMeasure>(mu);
    double m = 0;
    for (double x : g.vertex_mass) m += x;
    return m;
}

// ------------------------------------------------------------ conformality

FamilyResidual conformal_residual(const PartialSystem& sys, const Potential& pot, const Potential& psi, double beta,
                                  const Measure& mu, const std::vector<TestFunction>& tests) {
    FamilyResidual r;
    const auto* series = std::get_if<SeriesMeasure>(&mu);
    auto c = psi_constant(sys, psi);
    for (const auto& t : tests) {
        double lhs, rhs;
        if (series && c && std::holds_alternative<PwPoly>(t)) {
            const auto& a = std::get<PwPoly>(t);
            PwPoly rho_pw = pot.interval().as_pwpoly();
            lhs = integrate_pw(sys, *series, transfer_pw(sys.interval(), rho_pw, a));
            rhs = std::exp(beta * c->to_double()) * integrate_pw(sys, *series, a * rho_pw);
        } else {
            Fn a = as_fn(t);
            lhs = integrate(sys, mu, [&](const Point& y) { return apply_fn(sys, pot, a, y, 1); });
            rhs = integrate(sys, mu, [&](const Point& x) {
                return a(x) * std::exp(beta * psi_at(sys, psi, x)) * rho(sys, pot, x).to_double();
            });
        }
        double d = std::abs(lhs - rhs);
        r.per_function.push_back(d);
        if (d > r.value || r.per_function.size() == 1) {
            r.value = std::max(r.value, d);
            r.worst = r.per_function.size() - 1;
        }
    }
    return r;
}

FamilyResidual weakly_conformal_residual(const PartialSystem& sys, const Potential& pot, const Potential& psi,
                                         double beta, const Measure& mu, const std::vector<TestFunction>& tests) {
    RegionReport rr = regular_set(sys, pot);
    for (std::size_t i = 0; i < tests.size(); ++i) {
        Region supp = tf_support(sys, tests[i]);
        if (!region_subset(supp, rr.delta_reg))
            throw support_violation("test function " + std::to_string(i) + " has support " + region_str(supp) +
                                    " outside Delta_reg = " + region_str(rr.delta_reg));
    }
    FamilyResidual r;
    const auto* series = std::get_if<SeriesMeasure>(&mu);
    auto c = psi_constant(sys, psi);
    double sup = 0;
    for (const auto& t : tests) {
        double lhs, rhs;
        if (series && c && std::holds_alternative<PwPoly>(t)) {
            const auto& a = std::get<PwPoly>(t);
            PwPoly one = PwPoly::constant_on(sys.interval().delta, Rational(1));
            lhs = integrate_pw(sys, *series, transfer_pw(sys.interval(), one, a));
            rhs = std::exp(beta * c->to_double()) * integrate_pw(sys, *series, a);
            sup = std::max(sup, a.sup_abs());
        } else {
            Fn a = as_fn(t);
            lhs = integrate(sys, mu, [&](const Point& y) {
                double s = 0;
                for (const auto& x : preimages1(sys, y)) s += a(x);
                return s;
            });
            rhs = integrate(sys, mu, [&](const Point& x) { return a(x) * std::exp(beta * psi_at(sys, psi, x)); });
            if (const auto* pw = std::get_if<PwPoly>(&t)) sup = std::max(sup, pw->sup_abs());
        }
        double d = std::abs(lhs - rhs);
        r.per_function.push_back(d);
        if (d >= r.value) {
            r.value = d;
            r.worst = r.per_function.size() - 1;
        }
    }
    if (series) r.tail_bound = 2.0 * std::pow(series->q(), series->depth) * sup;
    return r;
}

// ------------------------------------------------------------ solver

namespace {

// Q[i][j] = (1/|B_i|) ∫_{B_i} P(1_{B_j}) with P b(y) = sum_{phi x = y} e^{-beta psi(x)} b(x).
SpMat weighted_ulam(const PartialSystem& sys, const Potential& psi, double beta, int m) {
    const auto& is = sys.interval();
    double lo = is.space.lower()->to_double(), hi = is.space.upper()->to_double();
    double h = (hi - lo) / m;
    struct AffPiece {
        double a, b, c, d;  // psi = c x + d on [a,b]
    };
    std::vector<AffPiece> ps;
    for (const auto& p : psi.interval().pieces) {
        Poly f = p.f.to_poly();
        if (f.degree() > 1) throw unsupported("psi must be piecewise affine");
        double c1 = f.degree() == 1 ? f.coeffs()[1].to_double() : 0.0;
        double c0 = f.degree() >= 0 ? f.coeffs()[0].to_double() : 0.0;
        ps.push_back({p.domain.lo.to_double(), p.domain.hi.to_double(), c1, c0});
    }
    // ∫_x0^x1 e^{-beta psi}
    auto weight_integral = [&](double x0, double x1) {
        double total = 0;
        for (const auto& p : ps) {
            double a = std::max(x0, p.a), b = std::min(x1, p.b);
            if (b <= a) continue;
            double k = -beta * p.c, base = -beta * p.d;
            if (std::abs(k) < 1e-14)
                total += (b - a) * std::exp(base);
            else
                total += (std::exp(base + k * b) - std::exp(base + k * a)) / k;
        }
        return total;
    };
    std::vector<Eigen::Triplet<double>> trip;
    for (const auto& br : is.branches) {
        double s = br.map.slope.to_double(), c = br.map.intercept.to_double();
        if (s == 0) continue;
        double dlo = br.domain.lo.to_double(), dhi = br.domain.hi.to_double();
        for (int j = 0; j < m; ++j) {
            double x0 = std::max(lo + j * h, dlo), x1 = std::min(lo + (j + 1) * h, dhi);
            if (x1 <= x0) continue;
            double y0 = s * x0 + c, y1 = s * x1 + c;
            if (y0 > y1) std::swap(y0, y1);
            int i0 = std::max(0, static_cast<int>(std::floor((y0 - lo) / h)));
            int i1 = std::min(m - 1, static_cast<int>(std::ceil((y1 - lo) / h)) - 1);
            for (int i = i0; i <= i1; ++i) {
                double b0 = lo + i * h, b1 = lo + (i + 1) * h;
                double u0 = (b0 - c) / s, u1 = (b1 - c) / s;
                if (u0 > u1) std::swap(u0, u1);
                double a = std::max(x0, u0), b = std::min(x1, u1);
                if (b <= a) continue;
                trip.emplace_back(i, j, std::abs(s) * weight_integral(a, b) / h);
            }
        }
    }
    SpMat Q(m, m);
    Q.setFromTriplets(trip.begin(), trip.end());
    return Q;
}

Eigen::MatrixXd graph_matrix(const PartialSystem& sys, const Potential& psi, double beta) {
    const auto& g = sys.graph();
    auto V = static_cast<Eigen::Index>(g.vertices.size());
    Eigen::MatrixXd A = Eigen::MatrixXd::Zero(V, V);
    for (std::size_t e = 0; e < g.edges.size(); ++e)
        A(g.r(static_cast<int>(e)), g.s(static_cast<int>(e))) +=
            std::exp(-beta * psi.graph().weights[e].to_double());
    return A;
}

template <class Mat>
PerronResult power_iterate(const Mat& M, double tol) {
    PerronResult res;
    Eigen::Index n = M.rows();
    double shift = 0;
    for (int attempt = 0; attempt < 2; ++attempt) {
        Eigen::VectorXd v = Eigen::VectorXd::Constant(n, 1.0 / static_cast<double>(n));
        for (int it = 1; it <= 20000; ++it) {
            Eigen::VectorXd w = M * v + shift * v;
            double r = w.sum();
            if (r <= 0) break;
            w /= r;
            Eigen::VectorXd mv = M * w;
            double lam = mv.sum();
            res.r = lam;
            res.vec = w;
            res.residual = (mv - lam * w).lpNorm<1>();
            res.iterations = it;
            if (res.residual <= tol) return res;
            v = w;
        }
        // periodic structure: add a shift so the Perron root dominates strictly
        shift = 0;
        for (Eigen::Index i = 0; i < n; ++i) shift = std::max(shift, std::abs(Eigen::VectorXd(M * Eigen::VectorXd::Unit(n, i)).sum()));
        shift = std::max(shift, 1.0);
    }
    return res;
}

}  // namespace

PerronResult perron(const PartialSystem& sys, const Potential& psi, double beta, int bins, double tol) {
    if (sys.is_graph()) return power_iterate(graph_matrix(sys, psi, beta), tol);
    SpMat Qt = SpMat(weighted_ulam(sys, psi, beta, bins).transpose());
    return power_iterate(Qt, tol);
}

namespace {

KMSCandidate from_perron(const PartialSystem& sys, const Potential& psi, double beta, const PerronResult& pr,
                         int bins) {
    KMSCandidate c;
    c.beta = beta;
    c.perron = pr.r;
    c.eigen_residual = pr.residual;
    Eigen::VectorXd v = pr.vec / pr.vec.sum();
    if (sys.is_graph()) {
        GraphMeasure gm;
        gm.beta = beta;
        gm.psi = psi;
        gm.vertex_mass.assign(v.data(), v.data() + v.size());
        c.mu = gm;
    } else {
        UlamMeasure u;
        u.lo = *sys.interval().space.lower();
        u.hi = *sys.interval().space.upper();
        double h = (u.hi - u.lo).to_double() / bins;
        for (Eigen::Index i = 0; i < v.size(); ++i) u.densities.push_back(v[i] / h);
        c.mu = u;
    }
    return c;
}

}  // namespace

KMSCandidate candidate_at(const PartialSystem& sys, const Potential& pot, const Potential& psi, double beta,
                          int bins, double eigen_tol) {
    require_valid(sys, pot);
    return from_perron(sys, psi, beta, perron(sys, psi, beta, bins, eigen_tol), bins);
}

KMSCandidate solve_conformal(const PartialSystem& sys, const Potential& pot, const Potential& psi,
                             const SolveOptions& opt) {
    require_valid(sys, pot);
    double lo = opt.lo, hi = opt.hi;
    PerronResult rl = perron(sys, psi, lo, opt.bins, opt.eigen_tol);
    PerronResult rh = perron(sys, psi, hi, opt.bins, opt.eigen_tol);
    KMSCandidate c;
    auto finish = [&](double beta, const PerronResult& pr) {
        bool degenerate = c.degenerate;
        int steps = c.bisection_steps;
        c = from_perron(sys, psi, beta, pr, opt.bins);
        c.degenerate = degenerate;
        c.bisection_steps = steps;
        return c;
    };
    if (std::abs(rl.r - rh.r) <= 1e-12) {
        if (std::abs(rl.r - 1.0) <= opt.root_tol) {
            c.degenerate = true;
            return finish(lo, rl);
        }
        throw Error("NoSolution", "r(beta) is flat at " + std::to_string(rl.r) + " on [" + std::to_string(lo) + ", " +
                                      std::to_string(hi) + "]");
    }
    double fl = rl.r - 1.0, fh = rh.r - 1.0;
    if (fl == 0) return finish(lo, rl);
    if (fh == 0) return finish(hi, rh);
    if ((fl > 0) == (fh > 0))
        throw Error("NoSolution", "r(beta) - 1 has the same sign at both ends: r(" + std::to_string(lo) +
                                      ") = " + std::to_string(rl.r) + ", r(" + std::to_string(hi) +
                                      ") = " + std::to_string(rh.r));
    PerronResult mid;
    double bm = lo;
    int steps = 0;
    while (steps < 200) {
        ++steps;
        bm = 0.5 * (lo + hi);
        mid = perron(sys, psi, bm, opt.bins, opt.eigen_tol);
        double fm = mid.r - 1.0;
        if ((fm > 0) == (fl > 0)) {
            lo = bm;
            fl = fm;
        } else {
            hi = bm;
        }
        if (hi - lo <= 1e-13 || (std::abs(fm) <= opt.root_tol * 1e-2)) break;
    }
    c.bisection_steps = steps;
    return finish(bm, mid);
}

double total_variation_to_uniform(const UlamMeasure& mu) {
    double h = mu.bin_width(), m = static_cast<double>(mu.densities.size()), tv = 0;
    for (double d : mu.densities) tv += std::abs(d * h - 1.0 / m);
    return 0.5 * tv;
}

// ------------------------------------------------------------ KMS

double phi_mu(const PartialSystem& sys, const Potential& pot, const Measure& mu, const FactorWord& w) {
    return integrate(sys, mu, [&](const Point& x) { return g_value(sys, pot, w, x); });
}

KMSResidual kms_residual(const PartialSystem& sys, const Potential& pot, const Potential& psi, double beta,
                         const Measure& mu, const Monomial& M1, const Monomial& M2) {
    KMSResidual r;
    r.lhs = phi_mu(sys, pot, mu, concat(factors_of(M1), factors_of(sigma_i_beta(sys, psi, M2, beta))));
    r.rhs = phi_mu(sys, pot, mu, concat(factors_of(M2), factors_of(M1)));
    r.value = std::abs(r.lhs - r.rhs);
    r.certifying = !(beta == 0 || psi_is_zero(psi));
    return r;
}

double core_kms_check(const PartialSystem& sys, const Potential& pot, const Potential& psi, double beta,
                      const Measure& mu, const Fn& a, const Fn& b, int n) {
    double lhs = phi_mu(sys, pot, mu, factors_of(Monomial{a, n, n, b, ""}));
    Fn Sn = fn_birkhoff(sys, psi, n);
    Fn g = [&](const Point& x) { return std::exp(-beta * Sn(x)) * a(x) * b(x); };
    double rhs = integrate(sys, mu, [&](const Point& y) { return apply_fn(sys, pot, g, y, n); });
    return std::abs(lhs - rhs);
}

}  // namespace xferop
