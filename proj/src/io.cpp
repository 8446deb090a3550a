#include "xferop/io.hpp"

#include "xferop/errors.hpp"

#include <filesystem>
#include <fstream>
#include <map>
#include <sstream>

namespace xferop {

std::string read_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw parse_error(path + ": cannot open file");
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

Json parse_json(const std::string& text, const std::string& name) {
    try {
        return Json::parse(text);
    } catch (const Json::parse_error& e) {
        throw parse_error(name + ": byte " + std::to_string(e.byte) + ": " + e.what());
    }
}

namespace {

const Json& field(const Json& j, const char* key, const std::string& path) {
    if (!j.is_object()) throw parse_error(path + ": expected an object");
    auto it = j.find(key);
    if (it == j.end()) throw parse_error(path + "." + key + ": missing field");
    return *it;
}

bool flag(const Json& j, const char* key, const std::string& path, bool dflt) {
    auto it = j.find(key);
    if (it == j.end()) return dflt;
    if (!it->is_boolean()) throw parse_error(path + "." + key + ": expected true or false");
    return it->get<bool>();
}

int positive_int(const Json& j, const char* key, const std::string& path, int dflt) {
    auto it = j.find(key);
    if (it == j.end()) return dflt;
    if (!it->is_number_integer() || it->get<long>() < 1)
        throw parse_error(path + "." + key + ": expected a positive integer");
    return it->get<int>();
}

std::vector<PotentialPiece> parse_pieces(const Json& arr, const std::string& path) {
    if (!arr.is_array()) throw parse_error(path + ": expected an array");
    std::vector<PotentialPiece> out;
    for (std::size_t i = 0; i < arr.size(); ++i) {
        std::string p = path + "[" + std::to_string(i) + "]";
        Interval d = parse_interval(field(arr[i], "domain", p), p + ".domain");
        Rational slope = parse_rational(field(arr[i], "slope", p), p + ".slope");
        Rational icpt = parse_rational(field(arr[i], "intercept", p), p + ".intercept");
        out.push_back({d, FactoredPoly::affine(slope, icpt)});
    }
    return out;
}

std::vector<Rational> parse_weights(const Json& w, const Graph& g, const std::string& path) {
    if (!w.is_object()) throw parse_error(path + ": expected an object keyed by edge name");
    std::vector<Rational> out(g.edges.size());
    std::vector<bool> seen(g.edges.size(), false);
    for (auto it = w.begin(); it != w.end(); ++it) {
        int e = g.edge_index(it.key());
        if (e < 0) throw parse_error(path + "." + it.key() + ": unknown edge");
        out[static_cast<std::size_t>(e)] = parse_rational(it.value(), path + "." + it.key());
        seen[static_cast<std::size_t>(e)] = true;
    }
    for (std::size_t e = 0; e < g.edges.size(); ++e)
        if (!seen[e]) throw parse_error(path + "." + g.edges[e].name + ": missing weight");
    return out;
}

// Coefficients of an affine FactoredPoly as (slope, intercept).
std::pair<Rational, Rational> affine_coeffs(const FactoredPoly& f) {
    Poly p = f.to_poly();
    const auto& c = p.coeffs();
    Rational icpt = c.empty() ? Rational(0) : c[0];
    Rational slope = c.size() > 1 ? c[1] : Rational(0);
    return {slope, icpt};
}

}  // namespace

Json rational_json(const Rational& r) { return r.str(); }

Rational parse_rational(const Json& j, const std::string& field_path) {
    if (j.is_number_integer()) return Rational(j.get<long>());
    if (!j.is_string()) throw parse_error(field_path + ": expected a rational string \"p/q\"");
    try {
        return Rational::parse(j.get<std::string>());
    } catch (const Error& e) {
        throw parse_error(field_path + ": " + e.what());
    }
}

Json interval_json(const Interval& iv) {
    return Json{{"lo", rational_json(iv.lo)},
                {"hi", rational_json(iv.hi)},
                {"lo_closed", iv.lo_closed},
                {"hi_closed", iv.hi_closed}};
}

Interval parse_interval(const Json& j, const std::string& path) {
    Interval iv{parse_rational(field(j, "lo", path), path + ".lo"), parse_rational(field(j, "hi", path), path + ".hi"),
                flag(j, "lo_closed", path, true), flag(j, "hi_closed", path, true)};
    if (iv.hi < iv.lo) throw parse_error(path + ": lo " + iv.lo.str() + " exceeds hi " + iv.hi.str());
    if (iv.lo == iv.hi && !(iv.lo_closed && iv.hi_closed))
        throw parse_error(path + ": a degenerate interval must be closed at both ends");
    return iv;
}

Json region_json(const Region& r) {
    if (const auto* s = std::get_if<IntervalSet>(&r)) {
        Json arr = Json::array();
        for (const auto& c : s->components()) arr.push_back(interval_json(c));
        return Json{{"intervals", arr}, {"text", s->str()}};
    }
    const auto& c = std::get<CylinderSet>(r);
    Json arr = Json::array();
    for (const auto& w : c.words()) arr.push_back(w.str(*c.graph()));
    return Json{{"cylinders", arr}, {"text", c.str()}};
}

Spec parse_spec(const Json& j, const std::string& name) {
    Spec s;
    s.name = j.contains("name") && j["name"].is_string() ? j["name"].get<std::string>() : name;
    const Json& backend = field(j, "backend", "spec");
    if (!backend.is_string()) throw parse_error("spec.backend: expected \"interval\" or \"graph\"");
    s.depth_bound = positive_int(j, "depth_bound", "spec", 32);
    const Json& pot = field(j, "potential", "spec");
    if (backend == "interval") {
        IntervalSystem is;
        const Json& space = field(j, "space", "spec");
        if (!space.is_array() || space.empty()) throw parse_error("spec.space: expected a nonempty array of intervals");
        for (std::size_t i = 0; i < space.size(); ++i)
            is.space_parts.push_back(parse_interval(space[i], "spec.space[" + std::to_string(i) + "]"));
        const Json& br = field(j, "branches", "spec");
        if (!br.is_array()) throw parse_error("spec.branches: expected an array");
        for (std::size_t i = 0; i < br.size(); ++i) {
            std::string p = "spec.branches[" + std::to_string(i) + "]";
            Branch b{parse_interval(field(br[i], "domain", p), p + ".domain"),
                     Affine{parse_rational(field(br[i], "slope", p), p + ".slope"),
                            parse_rational(field(br[i], "intercept", p), p + ".intercept")}};
            if (b.map.slope.is_zero()) throw parse_error(p + ".slope: must be nonzero");
            is.branches.push_back(b);
        }
        is.finalize();
        IntervalPotential ip;
        ip.pieces = parse_pieces(field(pot, "pieces", "spec.potential"), "spec.potential.pieces");
        if (pot.contains("overrides")) {
            const Json& ov = pot["overrides"];
            if (!ov.is_array()) throw parse_error("spec.potential.overrides: expected an array");
            for (std::size_t i = 0; i < ov.size(); ++i) {
                std::string p = "spec.potential.overrides[" + std::to_string(i) + "]";
                ip.overrides.push_back({parse_rational(field(ov[i], "point", p), p + ".point"),
                                        parse_rational(field(ov[i], "value", p), p + ".value")});
            }
        }
        std::sort(ip.overrides.begin(), ip.overrides.end());
        s.sys = PartialSystem{std::move(is)};
        s.pot = Potential{std::move(ip)};
    } else if (backend == "graph") {
        auto g = std::make_shared<Graph>();
        const Json& vs = field(j, "vertices", "spec");
        if (!vs.is_array()) throw parse_error("spec.vertices: expected an array of names");
        for (std::size_t i = 0; i < vs.size(); ++i) {
            if (!vs[i].is_string()) throw parse_error("spec.vertices[" + std::to_string(i) + "]: expected a name");
            if (g->vertex_index(vs[i].get<std::string>()) >= 0)
                throw parse_error("spec.vertices[" + std::to_string(i) + "]: duplicate vertex");
            g->vertices.push_back(vs[i].get<std::string>());
        }
        const Json& es = field(j, "edges", "spec");
        if (!es.is_array()) throw parse_error("spec.edges: expected an array");
        for (std::size_t i = 0; i < es.size(); ++i) {
            std::string p = "spec.edges[" + std::to_string(i) + "]";
            auto str_field = [&](const char* k) {
                const Json& v = field(es[i], k, p);
                if (!v.is_string()) throw parse_error(p + "." + k + ": expected a string");
                return v.get<std::string>();
            };
            Edge e{str_field("name"), g->vertex_index(str_field("r")), g->vertex_index(str_field("s"))};
            if (e.r < 0) throw parse_error(p + ".r: unknown vertex");
            if (e.s < 0) throw parse_error(p + ".s: unknown vertex");
            if (g->edge_index(e.name) >= 0) throw parse_error(p + ".name: duplicate edge");
            g->edges.push_back(e);
        }
        g->truncation_depth = positive_int(j, "truncation_depth", "spec", 8);
        g->index();
        GraphPotential gp{parse_weights(field(pot, "weights", "spec.potential"), *g, "spec.potential.weights")};
        s.sys = PartialSystem{GraphSystem{g}};
        s.pot = Potential{std::move(gp)};
    } else {
        throw parse_error("spec.backend: expected \"interval\" or \"graph\"");
    }
    return s;
}

Spec parse_spec_text(const std::string& text, const std::string& name) {
    return parse_spec(parse_json(text, name.empty() ? "spec" : name), name);
}

Spec load_spec(const std::string& path) {
    std::string stem = std::filesystem::path(path).stem().string();
    return parse_spec_text(read_file(path), stem);
}

std::string bundled_spec_dir() {
    if (const char* env = std::getenv("XFEROP_SPEC_DIR")) return env;
    return XFEROP_SPEC_DIR;
}

Spec load_spec_or_bundled(const std::string& p) {
    namespace fs = std::filesystem;
    for (const auto& cand : {fs::path(p), fs::path(p + ".spec"), fs::path(bundled_spec_dir()) / p,
                             fs::path(bundled_spec_dir()) / (p + ".spec")})
        if (fs::is_regular_file(cand)) return load_spec(cand.string());
    throw parse_error(p + ": no such spec file or bundled spec");
}

Json serialize_spec(const Spec& s) {
    Json j;
    if (!s.name.empty()) j["name"] = s.name;
    if (s.sys.is_interval()) {
        const auto& is = s.sys.interval();
        const auto& ip = s.pot.interval();
        j["backend"] = "interval";
        j["space"] = Json::array();
        for (const auto& c : is.space_parts) j["space"].push_back(interval_json(c));
        j["branches"] = Json::array();
        for (const auto& b : is.branches)
            j["branches"].push_back(Json{{"domain", interval_json(b.domain)},
                                         {"slope", rational_json(b.map.slope)},
                                         {"intercept", rational_json(b.map.intercept)}});
        Json pieces = Json::array();
        for (const auto& p : ip.pieces) {
            auto [slope, icpt] = affine_coeffs(p.f);
            pieces.push_back(Json{{"domain", interval_json(p.domain)},
                                  {"slope", rational_json(slope)},
                                  {"intercept", rational_json(icpt)}});
        }
        Json ov = Json::array();
        for (const auto& [x, v] : ip.overrides) ov.push_back(Json{{"point", rational_json(x)}, {"value", rational_json(v)}});
        j["potential"] = Json{{"pieces", pieces}, {"overrides", ov}};
    } else {
        const Graph& g = s.sys.graph();
        j["backend"] = "graph";
        j["vertices"] = g.vertices;
        j["edges"] = Json::array();
        for (const auto& e : g.edges)
            j["edges"].push_back(Json{{"name", e.name},
                                      {"r", g.vertices[static_cast<std::size_t>(e.r)]},
                                      {"s", g.vertices[static_cast<std::size_t>(e.s)]}});
        Json w = Json::object();
        for (std::size_t e = 0; e < g.edges.size(); ++e) w[g.edges[e].name] = rational_json(s.pot.graph().weights[e]);
        j["potential"] = Json{{"weights", w}};
        j["truncation_depth"] = g.truncation_depth;
    }
    j["depth_bound"] = s.depth_bound;
    return j;
}

std::string canonical_spec_text(const Spec& s) { return serialize_spec(s).dump(2) + "\n"; }

Potential parse_psi(const Spec& spec, const std::string& arg) {
    auto constant = [&](const Rational& c) {
        if (spec.sys.is_interval()) {
            IntervalPotential ip;
            for (const auto& comp : spec.sys.interval().space.components())
                ip.pieces.push_back({comp, FactoredPoly::constant(c)});
            return Potential{ip};
        }
        return Potential{GraphPotential{std::vector<Rational>(spec.sys.graph().edges.size(), c)}};
    };
    if (arg == "one") return constant(Rational(1));
    if (arg == "zero") return constant(Rational(0));
    if (arg.rfind("const:", 0) == 0) return constant(Rational::parse(arg.substr(6)));
    return parse_psi_json(spec, parse_json(read_file(arg), arg));
}

Potential parse_psi_json(const Spec& spec, const Json& j) {
    if (spec.sys.is_interval()) {
        IntervalPotential ip;
        ip.pieces = parse_pieces(field(j, "pieces", "psi"), "psi.pieces");
        return Potential{ip};
    }
    return Potential{GraphPotential{parse_weights(field(j, "weights", "psi"), spec.sys.graph(), "psi.weights")}};
}

Json measure_json(const UlamMeasure& mu) {
    return Json{{"kind", "ulam"},
                {"lo", rational_json(mu.lo)},
                {"hi", rational_json(mu.hi)},
                {"bins", mu.densities.size()},
                {"densities", mu.densities}};
}

Json measure_json(const PartialSystem& sys, const AtomicMeasure& mu) {
    Json atoms = Json::array();
    for (const auto& [x, w] : mu.atoms) atoms.push_back(Json{{"point", point_str(sys, x)}, {"weight", w}});
    return Json{{"kind", "atomic"}, {"atoms", atoms}};
}

}  // namespace xferop
