#include "xferop/spectra.hpp"

#include "xferop/dynamics.hpp"
#include "xferop/errors.hpp"
#include "xferop/transfer.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <random>
#include <set>
#include <sstream>

namespace xferop {

Region positive_domain(const PartialSystem& sys, const Potential& pot, int k) {
    if (k < 0) throw out_of_domain("negative level");
    if (k == 0) return space_region(sys);
    return regular_domain_n(sys, positive_set(sys, pot), k);
}

Region spectrum_image(const PartialSystem& sys, const Potential& pot, int k) {
    Region r = positive_domain(sys, pot, k);
    for (int i = 0; i < k; ++i) r = region_image(sys, r);
    return r;
}

namespace {

bool rho_continuous(const RegionReport& rr) {
    for (const auto& ir : rr.irregular)
        for (auto reason : ir.reasons)
            if (reason == IrregularReason::RhoDiscontinuous) return false;
    return true;
}

std::vector<Point> region_samples(const PartialSystem& sys, const Region& r) {
    std::vector<Point> out;
    if (const auto* s = std::get_if<IntervalSet>(&r)) {
        for (const auto& c : s->components()) {
            if (c.lo_closed) out.push_back(Point{c.lo});
            if (!c.degenerate()) out.push_back(Point{midpoint(c.lo, c.hi)});
            if (c.hi_closed && !c.degenerate()) out.push_back(Point{c.hi});
        }
        return out;
    }
    const auto& cs = std::get<CylinderSet>(r);
    for (const auto& w : cs.words()) out.push_back(sample_path(sys.graph(), w));
    return out;
}

std::size_t fibre_dim(const PartialSystem& sys, const Potential& pot, const Point& y, int k) {
    return preimages(sys, pot, y, k, true, std::max(k, 64)).size();
}

std::vector<SpectrumPoint> sample_stratum(const PartialSystem& sys, const Potential& pot, const Region& stratum, int k,
                                          bool top, const std::vector<Point>& extra) {
    std::vector<Point> pts = region_samples(sys, stratum);
    for (const auto& p : extra)
        if (region_contains(stratum, p)) pts.push_back(p);
    std::sort(pts.begin(), pts.end());
    pts.erase(std::unique(pts.begin(), pts.end()), pts.end());
    std::vector<SpectrumPoint> out;
    for (const auto& y : pts) out.push_back({k, y, fibre_dim(sys, pot, y, k), top});
    return out;
}

bool region_equal(const Region& a, const Region& b) { return region_subset(a, b) && region_subset(b, a); }

bool open_in(const Region& U, const Region& Y) {
    if (const auto* u = std::get_if<IntervalSet>(&U)) return u->is_open_in(std::get<IntervalSet>(Y));
    return true;  // cylinder sets are clopen
}

Region neighbourhood(const PartialSystem& sys, const Point& p, const Region& Y) {
    if (sys.is_interval()) {
        const Rational& x = std::get<Rational>(p);
        Rational eps(1, 16);
        return region_intersect(Region{IntervalSet(Interval::open(x - eps, x + eps))}, Y);
    }
    const auto& path = std::get<Path>(p);
    Word w{path.vertex, path.first_edges(2)};
    return region_intersect(Region{CylinderSet::cylinder(sys.graph_ptr(), w)}, Y);
}

TopologyGenerator grow_generator(const PartialSystem& sys, const std::vector<Region>& Y, const Region& reg,
                                 const Point& p, int level) {
    int n = static_cast<int>(Y.size()) - 1;
    TopologyGenerator g;
    g.seed = point_str(sys, p) + " at level " + std::to_string(level);
    for (int k = 0; k <= n; ++k) g.U.push_back(empty_region(sys));
    g.U[static_cast<std::size_t>(level)] = neighbourhood(sys, p, Y[static_cast<std::size_t>(level)]);
    for (int round = 0; round < 4 * (n + 1); ++round) {
        bool changed = false;
        auto grow = [&](std::size_t k, const Region& add) {
            Region nu = region_unite(g.U[k], add);
            if (!region_equal(nu, g.U[k])) {
                g.U[k] = nu;
                changed = true;
            }
        };
        for (int k = 0; k < n; ++k) {
            auto ku = static_cast<std::size_t>(k);
            grow(ku + 1, region_intersect(region_image(sys, region_intersect(g.U[ku], reg)), Y[ku + 1]));
        }
        for (int k = n - 1; k >= 0; --k) {
            auto ku = static_cast<std::size_t>(k);
            grow(ku, region_intersect(region_intersect(region_preimage(sys, g.U[ku + 1]), reg), Y[ku]));
        }
        if (!changed) break;
    }
    g.compatible = true;
    g.open = true;
    for (int k = 0; k <= n; ++k) {
        auto ku = static_cast<std::size_t>(k);
        if (!open_in(g.U[ku], Y[ku])) g.open = false;
        if (k < n) {
            Region lhs = region_intersect(g.U[ku], reg);
            Region rhs = region_intersect(region_intersect(region_preimage(sys, g.U[ku + 1]), Y[ku]), reg);
            if (!region_equal(lhs, rhs)) g.compatible = false;
        }
    }
    return g;
}

}  // namespace

KnSpectrum spectrum_Kn(const PartialSystem& sys, const Potential& pot, int n, const std::vector<Point>& extra) {
    require_valid(sys, pot);
    if (n < 0) throw out_of_domain("negative level");
    KnSpectrum s;
    s.n = n;
    s.stratum = spectrum_image(sys, pot, n);
    s.samples = sample_stratum(sys, pot, s.stratum, n, true, extra);
    return s;
}

SpectrumDescription spectrum_An(const PartialSystem& sys, const Potential& pot, int n, const std::vector<Point>& extra) {
    require_valid(sys, pot);
    if (n < 0) throw out_of_domain("negative level");
    RegionReport rr = regular_set_unchecked(sys, pot);
    SpectrumDescription d;
    d.n = n;
    for (int k = 0; k <= n; ++k) {
        d.images.push_back(spectrum_image(sys, pot, k));
        d.strata.push_back(k < n ? region_minus(d.images.back(), rr.delta_reg) : d.images.back());
        auto pts = sample_stratum(sys, pot, d.strata.back(), k, k == n, extra);
        d.samples.insert(d.samples.end(), pts.begin(), pts.end());
    }
    std::sort(d.samples.begin(), d.samples.end(), [](const SpectrumPoint& a, const SpectrumPoint& b) {
        return a.k != b.k ? a.k < b.k : a.y < b.y;
    });
    for (const auto& sp : d.samples) d.generators.push_back(grow_generator(sys, d.images, rr.delta_reg, sp.y, sp.k));
    d.topology_exact = rho_continuous(rr);
    if (!d.topology_exact)
        d.warnings.push_back(
            "rho is discontinuous on Delta_pos: the pushout topology is reported as a lower bound on the open sets "
            "of the spectrum and may be strictly coarser");
    for (const auto& g : d.generators)
        if (!g.compatible || !g.open)
            d.warnings.push_back("generator grown from " + g.seed + " is not a valid pushout open set");
    return d;
}

std::string spectrum_csv(const PartialSystem& sys, const std::vector<SpectrumPoint>& pts) {
    std::ostringstream out;
    out << "k,y,dimension,stratum\n";
    for (const auto& p : pts)
        out << p.k << "," << point_str(sys, p.y) << "," << p.dim << "," << (p.top ? "top" : "interior") << "\n";
    return out.str();
}

// ---------------------------------------------------------------- pi_y^k

PiYK rep_pi_y_k(const PartialSystem& sys, const Potential& pot, const Point& y, int k, std::uint64_t seed) {
    require_valid(sys, pot);
    if (k < 0) throw out_of_domain("negative level");
    PiYK r;
    r.y = y;
    r.k = k;
    for (auto& e : preimages(sys, pot, y, k, true, std::max(k, 64))) {
        r.fibre.push_back(e.x);
        r.weights.push_back(e.weight.to_double());
    }
    if (r.fibre.empty())
        throw out_of_spectrum("phi^-" + std::to_string(k) + "(" + point_str(sys, y) + ") carries no positive weight");
    auto N = static_cast<Eigen::Index>(r.fibre.size());

    // a separating function on the fibre
    std::vector<double> sep(r.fibre.size());
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> unif(0.5, 1.5);
    for (std::size_t i = 0; i < r.fibre.size(); ++i)
        sep[i] = sys.is_interval() ? 1.0 + point_coord(r.fibre[i]) : unif(rng);

    auto tt = [&](int i) {
        Eigen::MatrixXd P = Eigen::MatrixXd::Zero(N, N);
        std::vector<Point> img;
        std::vector<double> w;
        for (const auto& x : r.fibre) {
            img.push_back(phi_n(sys, x, i));
            w.push_back(cocycle(sys, pot, i, x).to_double());
        }
        for (Eigen::Index a = 0; a < N; ++a)
            for (Eigen::Index b = 0; b < N; ++b)
                if (img[static_cast<std::size_t>(a)] == img[static_cast<std::size_t>(b)])
                    P(a, b) = std::sqrt(w[static_cast<std::size_t>(a)] * w[static_cast<std::size_t>(b)]);
        return P;
    };
    Eigen::MatrixXd D = Eigen::MatrixXd::Zero(N, N);
    for (Eigen::Index a = 0; a < N; ++a) D(a, a) = sep[static_cast<std::size_t>(a)];
    std::vector<Eigen::MatrixXd> gens{D};
    r.samples.push_back({"a", D});
    for (int i = 1; i <= k; ++i) {
        Eigen::MatrixXd P = tt(i);
        gens.push_back(P);
        r.samples.push_back({"t^" + std::to_string(i) + " t*^" + std::to_string(i), P});
        r.samples.push_back({"a t^" + std::to_string(i) + " t*^" + std::to_string(i) + " a", D * P * D});
    }

    // cyclic span of a random vector
    std::normal_distribution<double> gauss;
    Eigen::VectorXd h(N);
    for (Eigen::Index i = 0; i < N; ++i) h[i] = gauss(rng);
    h.normalize();
    std::vector<Eigen::VectorXd> basis, raw{h};
    auto absorb = [&](Eigen::VectorXd v) {
        Eigen::VectorXd w = v;
        for (const auto& q : basis) w -= q.dot(w) * q;
        if (w.norm() <= 1e-10 * std::max(1.0, v.norm())) return false;
        basis.push_back(w.normalized());
        raw.push_back(v.normalized());
        return true;
    };
    basis.push_back(h);
    std::vector<Eigen::VectorXd> frontier{h};
    while (!frontier.empty() && static_cast<Eigen::Index>(basis.size()) < N) {
        std::vector<Eigen::VectorXd> next;
        for (const auto& v : frontier)
            for (const auto& G : gens) {
                Eigen::VectorXd w = G * v;
                if (absorb(w)) next.push_back(w);
                if (static_cast<Eigen::Index>(basis.size()) >= N) break;
            }
        frontier = std::move(next);
    }
    Eigen::MatrixXd M(N, static_cast<Eigen::Index>(raw.size()));
    for (std::size_t j = 0; j < raw.size(); ++j) M.col(static_cast<Eigen::Index>(j)) = raw[j];
    Eigen::JacobiSVD<Eigen::MatrixXd> svd(M);
    const auto& sv = svd.singularValues();
    r.span_rank = static_cast<std::size_t>((sv.array() >= 1e-8).count());
    r.sigma_min = sv.size() >= N ? sv[N - 1] : 0.0;
    r.irreducible = r.sigma_min >= 1e-8;
    return r;
}

// ------------------------------------------------------------- quasi-orbits

QuasiOrbitPartition quasi_orbits(const PartialSystem& sys, const Potential& pot, int depth,
                                 const std::vector<Point>& samples) {
    require_valid(sys, pot);
    RegionReport rr = regular_set_unchecked(sys, pot);
    if (!rho_continuous(rr) || !region_equal(rr.delta_reg, rr.delta_pos))
        throw hypothesis_violated("quasi-orbit description needs rho continuous on Delta_pos (Delta_reg = " +
                                  region_str(rr.delta_reg) + ", Delta_pos = " + region_str(rr.delta_pos) + ")");
    QuasiOrbitPartition q;
    q.samples = samples;
    q.depth = depth;
    q.resolution = std::max(1, depth / 2);
    auto cell = [&](const Point& x) -> std::string {
        if (sys.is_interval()) {
            const auto& X = sys.interval().space;
            Rational lo = *X.lower(), hi = *X.upper();
            double f = ((std::get<Rational>(x) - lo) / (hi - lo)).to_double();
            long c = std::min<long>((1L << q.resolution) - 1, static_cast<long>(std::floor(f * (1L << q.resolution))));
            return std::to_string(c);
        }
        const auto& p = std::get<Path>(x);
        return Word{p.vertex, p.first_edges(static_cast<std::size_t>(q.resolution))}.str(sys.graph());
    };
    std::vector<std::set<std::string>> sig;
    std::vector<std::vector<Point>> orbit_pts;
    for (const auto& x : samples) {
        std::set<std::string> cells;
        std::set<Point> pts;
        for (int k = 0; k <= depth; ++k) {
            if (orbit_depth(sys, x, k) < k) break;
            if (k > 0 && cocycle(sys, pot, k, x).is_zero()) break;
            Point y = phi_n(sys, x, k);
            for (const auto& e : preimages(sys, pot, y, k, false, std::max(depth, 64))) {
                cells.insert(cell(e.x));
                pts.insert(e.x);
            }
        }
        sig.push_back(std::move(cells));
        orbit_pts.emplace_back(pts.begin(), pts.end());
    }
    std::vector<std::size_t> rep_of_sig;
    for (std::size_t i = 0; i < samples.size(); ++i) {
        std::size_t found = rep_of_sig.size();
        for (std::size_t r = 0; r < rep_of_sig.size(); ++r)
            if (sig[rep_of_sig[r]] == sig[i]) {
                found = r;
                break;
            }
        if (found == rep_of_sig.size()) {
            rep_of_sig.push_back(i);
            q.representatives.push_back(samples[i]);
            std::string s;
            for (const auto& c : sig[i]) s += (s.empty() ? "" : " ") + c;
            q.closures.push_back(s);
        }
        q.class_of.push_back(found);
    }
    // Independent route: pairwise Hausdorff distance between the truncated
    // orbit point sets, below half a cell counts as equal closures.
    auto dist = [&](const Point& a, const Point& b) -> double {
        if (sys.is_interval()) return std::abs(point_coord(a) - point_coord(b));
        const auto& p = std::get<Path>(a);
        const auto& r = std::get<Path>(b);
        if (p.vertex != r.vertex) return 1.0;
        auto L = static_cast<std::size_t>(q.resolution + 2);
        auto ea = p.first_edges(L), eb = r.first_edges(L);
        std::size_t c = 0;
        while (c < ea.size() && c < eb.size() && ea[c] == eb[c]) ++c;
        if (c == ea.size() && c == eb.size()) return 0.0;
        return std::ldexp(1.0, -static_cast<int>(c));
    };
    auto directed = [&](const std::vector<Point>& A, const std::vector<Point>& B) {
        double worst = 0;
        for (const auto& a : A) {
            double best = 1e300;
            for (const auto& b : B) best = std::min(best, dist(a, b));
            worst = std::max(worst, best);
        }
        return worst;
    };
    double thresh = std::ldexp(1.0, -(q.resolution + 1));
    q.brute_force_agrees = true;
    for (std::size_t i = 0; i < samples.size(); ++i)
        for (std::size_t j = i + 1; j < samples.size(); ++j) {
            double h = std::max(directed(orbit_pts[i], orbit_pts[j]), directed(orbit_pts[j], orbit_pts[i]));
            if ((h < thresh) != (q.class_of[i] == q.class_of[j])) q.brute_force_agrees = false;
        }
    return q;
}

}  // namespace xferop
