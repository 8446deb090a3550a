#include "xferop/report.hpp"

#include "xferop/errors.hpp"

#include <cstdio>

namespace xferop {

std::uint64_t fnv1a64(const std::string& bytes) {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (unsigned char c : bytes) {
        h ^= c;
        h *= 0x100000001b3ULL;
    }
    return h;
}

std::string hex64(std::uint64_t v) {
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(v));
    return buf;
}

Json measure_to_json(const PartialSystem& sys, const Measure& mu) {
    return std::visit(
        [&](const auto& m) -> Json {
            using M = std::decay_t<decltype(m)>;
            if constexpr (std::is_same_v<M, UlamMeasure>) return measure_json(m);
            else if constexpr (std::is_same_v<M, AtomicMeasure>) return measure_json(sys, m);
            else if constexpr (std::is_same_v<M, GraphMeasure>) {
                Json masses = Json::object();
                for (std::size_t v = 0; v < m.vertex_mass.size(); ++v) masses[sys.graph().vertices[v]] = m.vertex_mass[v];
                return Json{{"kind", "graph"}, {"beta", m.beta}, {"vertex_mass", masses}};
            } else {
                return Json{{"kind", "series"}, {"y0", rational_json(m.y0)}, {"beta", m.beta}, {"depth", m.depth}};
            }
        },
        mu);
}

Measure measure_from_json(const Json& j, const Potential& psi) {
    try {
        std::string kind = j.at("kind").get<std::string>();
        if (kind == "ulam") {
            UlamMeasure u;
            u.lo = parse_rational(j.at("lo"), "measure.lo");
            u.hi = parse_rational(j.at("hi"), "measure.hi");
            u.densities = j.at("densities").get<std::vector<double>>();
            if (u.densities.empty()) throw parse_error("measure.densities: empty");
            return u;
        }
        if (kind == "graph") {
            GraphMeasure g;
            g.beta = j.at("beta").get<double>();
            g.psi = psi;
            for (const auto& [name, m] : j.at("vertex_mass").items()) g.vertex_mass.push_back(m.get<double>());
            return g;
        }
        if (kind == "series")
            return mu_beta(j.at("beta").get<double>(), j.at("depth").get<int>(), parse_rational(j.at("y0"), "measure.y0"));
        throw parse_error("measure.kind: unknown kind '" + kind + "'");
    } catch (const Json::exception& e) {
        throw parse_error(std::string("measure: ") + e.what());
    }
}

Json candidate_json(const Spec& spec, const std::string& psi_arg, const KMSCandidate& c) {
    Json j{{"spec", serialize_spec(spec)}, {"psi", psi_arg}};
    if (psi_arg != "one" && psi_arg != "zero" && psi_arg.rfind("const:", 0) != 0)
        j["psi_data"] = parse_json(read_file(psi_arg), psi_arg);
    j["beta"] = c.beta;
    j["kind"] = c.kind;
    j["degenerate"] = c.degenerate;
    j["perron"] = c.perron;
    j["eigen_residual"] = c.eigen_residual;
    j["bisection_steps"] = c.bisection_steps;
    j["measure"] = measure_to_json(spec.sys, c.mu);
    return j;
}

LoadedCandidate load_candidate(const std::string& path) {
    Json j = parse_json(read_file(path), path);
    LoadedCandidate c;
    if (!j.contains("spec") || !j.contains("beta") || !j.contains("measure"))
        throw parse_error(path + ": candidate needs spec, beta and measure");
    c.spec = parse_spec(j["spec"], j["spec"].value("name", std::string("candidate")));
    c.psi_arg = j.value("psi", std::string("one"));
    c.psi = j.contains("psi_data") ? parse_psi_json(c.spec, j["psi_data"]) : parse_psi(c.spec, c.psi_arg);
    if (!j["beta"].is_number()) throw parse_error(path + ".beta: expected a number");
    c.beta = j["beta"].get<double>();
    c.mu = measure_from_json(j["measure"], c.psi);
    return c;
}

}  // namespace xferop
