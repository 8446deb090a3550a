#include "xferop/system.hpp"

#include "xferop/errors.hpp"

#include <algorithm>
#include <sstream>

namespace xferop {

void IntervalSystem::finalize() {
    space = IntervalSet(space_parts);
    std::vector<Interval> doms;
    for (const auto& b : branches) doms.push_back(b.domain);
    delta = IntervalSet(std::move(doms));
}

std::optional<std::size_t> IntervalSystem::branch_at(const Rational& x) const {
    for (std::size_t i = 0; i < branches.size(); ++i)
        if (branches[i].domain.contains(x)) return i;
    return std::nullopt;
}

namespace {

bool approaches(const Interval& d, const Rational& x, int side) {
    if (d.empty()) return false;
    if (side < 0) return d.lo < x && x <= d.hi;
    return d.lo <= x && x < d.hi;
}

}  // namespace

std::optional<std::size_t> IntervalSystem::branch_near(const Rational& x, int side) const {
    for (std::size_t i = 0; i < branches.size(); ++i)
        if (approaches(branches[i].domain, x, side)) return i;
    return std::nullopt;
}

std::optional<Rational> IntervalPotential::override_at(const Rational& x) const {
    for (const auto& [p, v] : overrides)
        if (p == x) return v;
    return std::nullopt;
}

const PotentialPiece* IntervalPotential::piece_at(const Rational& x) const {
    for (const auto& p : pieces)
        if (p.domain.contains(x)) return &p;
    return nullptr;
}

const PotentialPiece* IntervalPotential::piece_near(const Rational& x, int side) const {
    for (const auto& p : pieces)
        if (approaches(p.domain, x, side)) return &p;
    return nullptr;
}

std::optional<Rational> IntervalPotential::limit(const Rational& x, int side) const {
    const PotentialPiece* p = piece_near(x, side);
    if (!p) return std::nullopt;
    return p->f(x);
}

PwPoly IntervalPotential::as_pwpoly() const {
    std::vector<PwPoly::Piece> ps;
    for (const auto& p : pieces) ps.push_back({p.domain, p.f.to_poly()});
    return PwPoly::from_pieces(ps, overrides);
}

// ---------------------------------------------------------------- points

bool in_space(const PartialSystem& sys, const Point& x) {
    if (sys.is_interval()) return sys.interval().space.contains(std::get<Rational>(x));
    const Path& p = std::get<Path>(x);
    return p.valid(sys.graph());
}

bool in_delta(const PartialSystem& sys, const Point& x) {
    if (sys.is_interval()) return sys.interval().branch_at(std::get<Rational>(x)).has_value();
    const Path& p = std::get<Path>(x);
    return !p.is_vertex();
}

Point phi(const PartialSystem& sys, const Point& x) {
    if (sys.is_interval()) {
        const auto& is = sys.interval();
        const Rational& r = std::get<Rational>(x);
        auto b = is.branch_at(r);
        if (!b) throw out_of_domain("point " + r.str() + " is outside Delta");
        return is.branches[*b].map(r);
    }
    return std::get<Path>(x).shift(sys.graph());
}

Point phi_n(const PartialSystem& sys, const Point& x, int n) {
    Point y = x;
    for (int i = 0; i < n; ++i) y = phi(sys, y);
    return y;
}

int orbit_depth(const PartialSystem& sys, const Point& x, int cap) {
    Point y = x;
    for (int k = 0; k < cap; ++k) {
        if (!in_delta(sys, y)) return k;
        y = phi(sys, y);
    }
    return cap;
}

Rational rho(const PartialSystem& sys, const Potential& pot, const Point& x) {
    if (!in_delta(sys, x)) return Rational(0);
    if (sys.is_interval()) {
        const Rational& r = std::get<Rational>(x);
        const auto& ip = pot.interval();
        if (auto o = ip.override_at(r)) return *o;
        if (const auto* p = ip.piece_at(r)) return p->f(r);
        return Rational(0);
    }
    const Path& p = std::get<Path>(x);
    return pot.graph().weights[static_cast<std::size_t>(p.edge_at(0))];
}

std::vector<Point> preimages1(const PartialSystem& sys, const Point& y) {
    std::vector<Point> out;
    if (sys.is_interval()) {
        const Rational& r = std::get<Rational>(y);
        std::vector<Rational> xs;
        for (const auto& b : sys.interval().branches) {
            Rational x = b.map.inverse()(r);
            if (b.domain.contains(x)) xs.push_back(x);
        }
        std::sort(xs.begin(), xs.end());
        xs.erase(std::unique(xs.begin(), xs.end()), xs.end());
        for (auto& x : xs) out.emplace_back(std::move(x));
        return out;
    }
    const Graph& g = sys.graph();
    const Path& p = std::get<Path>(y);
    if (p.is_vertex() && !g.is_source(p.vertex)) return out;
    for (int e : g.by_source[static_cast<std::size_t>(p.vertex)]) out.emplace_back(p.prepend(g, e));
    std::sort(out.begin(), out.end());
    return out;
}

std::string point_str(const PartialSystem& sys, const Point& x) {
    if (sys.is_interval()) return std::get<Rational>(x).str();
    return std::get<Path>(x).str(sys.graph());
}

Point parse_point(const PartialSystem& sys, const std::string& text) {
    if (sys.is_interval()) return Rational::parse(text);
    const Graph& g = sys.graph();
    if (!text.empty() && text.front() == '<') {
        auto close = text.find('>');
        int v = g.vertex_index(text.substr(1, close == std::string::npos ? std::string::npos : close - 1));
        if (v < 0) throw parse_error("unknown vertex in point \"" + text + "\"");
        return Path::vertex_point(v);
    }
    auto names = [&](const std::string& s) {
        std::vector<int> out;
        std::istringstream in(s);
        std::string tok;
        while (in >> tok) {
            int e = g.edge_index(tok);
            if (e < 0) throw parse_error("unknown edge \"" + tok + "\" in point \"" + text + "\"");
            out.push_back(e);
        }
        return out;
    };
    auto open = text.find('(');
    Path p;
    if (open == std::string::npos) {
        p = Path::finite(g, names(text));
    } else {
        auto close = text.find(')', open);
        if (close == std::string::npos) throw parse_error("unbalanced parenthesis in point \"" + text + "\"");
        auto cyc = names(text.substr(open + 1, close - open - 1));
        if (cyc.empty()) throw parse_error("empty cycle in point \"" + text + "\"");
        p = Path::periodic(g, names(text.substr(0, open)), cyc);
    }
    if (!p.valid(g)) throw parse_error("point \"" + text + "\" is not a boundary path");
    return p;
}

double point_coord(const Point& x) { return std::get<Rational>(x).to_double(); }

// --------------------------------------------------------------- regions

Region space_region(const PartialSystem& sys) {
    if (sys.is_interval()) return sys.interval().space;
    return CylinderSet::full(sys.graph_ptr());
}

Region delta_region(const PartialSystem& sys) {
    if (sys.is_interval()) return sys.interval().delta;
    return CylinderSet::delta(sys.graph_ptr());
}

Region empty_region(const PartialSystem& sys) {
    if (sys.is_interval()) return IntervalSet{};
    return CylinderSet(sys.graph_ptr(), {});
}

Region region_image(const PartialSystem& sys, const Region& s) {
    if (sys.is_interval()) {
        const auto& S = std::get<IntervalSet>(s);
        IntervalSet out;
        for (const auto& b : sys.interval().branches) out = out.unite(S.intersect(b.domain).image(b.map));
        return out;
    }
    return std::get<CylinderSet>(s).image();
}

Region region_preimage(const PartialSystem& sys, const Region& s) {
    if (sys.is_interval()) {
        const auto& S = std::get<IntervalSet>(s);
        IntervalSet out;
        for (const auto& b : sys.interval().branches)
            out = out.unite(S.image(b.map.inverse()).intersect(b.domain));
        return out;
    }
    return std::get<CylinderSet>(s).preimage();
}

template <class F>
static Region binary(const Region& a, const Region& b, F f) {
    if (a.index() != b.index()) throw Error("BackendMismatch", "regions from different backends");
    if (a.index() == 0) return f(std::get<IntervalSet>(a), std::get<IntervalSet>(b));
    return f(std::get<CylinderSet>(a), std::get<CylinderSet>(b));
}

Region region_unite(const Region& a, const Region& b) {
    return binary(a, b, [](const auto& x, const auto& y) -> Region { return x.unite(y); });
}

Region region_intersect(const Region& a, const Region& b) {
    return binary(a, b, [](const auto& x, const auto& y) -> Region { return x.intersect(y); });
}

Region region_minus(const Region& a, const Region& b) {
    return binary(a, b, [](const auto& x, const auto& y) -> Region { return x.minus(y); });
}

bool region_empty(const Region& a) {
    return std::visit([](const auto& x) { return x.empty(); }, a);
}

bool region_contains(const Region& a, const Point& x) {
    if (a.index() == 0) return std::get<IntervalSet>(a).contains(std::get<Rational>(x));
    return std::get<CylinderSet>(a).contains(std::get<Path>(x));
}

bool region_subset(const Region& a, const Region& b) { return region_empty(region_minus(a, b)); }

std::string region_str(const Region& a) {
    return std::visit([](const auto& x) { return x.str(); }, a);
}

// -------------------------------------------------------- test functions

Rational eval(const TestFunction& f, const Point& x) {
    if (f.index() == 0) return std::get<PwPoly>(f)(std::get<Rational>(x));
    const Path& p = std::get<Path>(x);
    Rational s(0);
    for (const auto& [w, c] : std::get<CylFn>(f).terms)
        if (p.in_cylinder(w)) s += c;
    return s;
}

Fn as_fn(const TestFunction& f) {
    return [f](const Point& x) { return eval(f, x).to_double(); };
}

TestFunction tf_product(const TestFunction& a, const TestFunction& b) {
    if (a.index() == 0) return std::get<PwPoly>(a) * std::get<PwPoly>(b);
    CylFn out;
    for (const auto& [u, c] : std::get<CylFn>(a).terms)
        for (const auto& [w, d] : std::get<CylFn>(b).terms) {
            if (u.is_prefix_of(w)) out.terms.push_back({w, c * d});
            else if (w.is_prefix_of(u)) out.terms.push_back({u, c * d});
        }
    return out;
}

Region tf_support(const PartialSystem& sys, const TestFunction& f) {
    if (f.index() == 0) return std::get<PwPoly>(f).support().intersect(sys.interval().space);
    const auto& cf = std::get<CylFn>(f);
    std::size_t level = 0;
    for (const auto& t : cf.terms) level = std::max(level, t.first.length());
    std::vector<Word> nz;
    for (const auto& w : atoms(sys.graph(), level)) {
        Rational s(0);
        for (const auto& [u, c] : cf.terms)
            if (u.is_prefix_of(w)) s += c;
        if (!s.is_zero()) nz.push_back(w);
    }
    return CylinderSet(sys.graph_ptr(), std::move(nz));
}

TestFunction tf_one(const PartialSystem& sys) {
    if (sys.is_interval()) return PwPoly::indicator(sys.interval().space);
    CylFn f;
    for (std::size_t v = 0; v < sys.graph().vertices.size(); ++v) f.terms.push_back({Word{static_cast<int>(v), {}}, Rational(1)});
    return f;
}

}  // namespace xferop
