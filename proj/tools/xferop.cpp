#include "xferop/battery.hpp"
#include "xferop/dynamics.hpp"
#include "xferop/errors.hpp"
#include "xferop/groupoid.hpp"
#include "xferop/io.hpp"
#include "xferop/report.hpp"
#include "xferop/spectra.hpp"
#include "xferop/thermo.hpp"
#include "xferop/verdicts.hpp"

#include <CLI11.hpp>

#include <chrono>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

using namespace xferop;

namespace {

constexpr const char* kVersion = "0.1.0";

enum Exit { kOk = 0, kFails = 1, kUnknown = 2, kInputError = 3 };

struct Config {
    std::string spec_arg;
    int depth = 6;
    int bins = 1024;
    double tol = 0;  // 0: command default
    std::uint64_t seed = 0;
    std::string out;
    std::string format = "text";
    std::vector<std::string> argv;

    Spec spec;
    std::string hash_extra;  // extra inputs (psi, candidate) folded into the hash
};

struct Output {
    Json report;
    std::vector<std::pair<std::string, std::string>> files;  // name, contents
    std::string csv;  // printed for --format csv
    int code = kOk;
};

double tol_or(const Config& c, double d) { return c.tol > 0 ? c.tol : d; }

std::string timestamp() {
    std::time_t t = std::time(nullptr);
    char buf[32];
    std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", std::gmtime(&t));
    return buf;
}

Json header(const Config& c, const std::string& command) {
    std::string joined;
    for (std::size_t i = 0; i < c.argv.size(); ++i) joined += (i ? " " : "") + c.argv[i];
    Json h;
    h["command"] = command;
    h["argv"] = joined;
    h["spec"] = c.spec.name;
    h["input_hash"] = hex64(fnv1a64(canonical_spec_text(c.spec) + "\n" + c.hash_extra));
    h["seed"] = c.seed;
    h["depth"] = c.depth;
    h["version"] = kVersion;
    h["timestamp"] = timestamp();
    h["warnings"] = Json::array();
    return h;
}

Json residual_row(const Residual& r) {
    return Json{{"name", r.name}, {"value", r.value},       {"tol", r.tol},
                {"pass", r.pass()}, {"interior", r.interior}, {"boundary", r.boundary},
                {"witness", r.witness}};
}

std::string csv_escape(const std::string& s) {
    if (s.find_first_of(",\"\n") == std::string::npos) return s;
    std::string o = "\"";
    for (char ch : s) o += ch == '"' ? std::string("\"\"") : std::string(1, ch);
    return o + "\"";
}

std::vector<Point> parse_points(const PartialSystem& sys, const std::string& text) {
    std::vector<Point> out;
    std::stringstream ss(text);
    std::string item;
    while (std::getline(ss, item, ';'))
        if (!item.empty()) out.push_back(parse_point(sys, item));
    return out;
}

std::vector<Point> grid_samples(const PartialSystem& sys, int count) {
    if (sys.is_graph()) return default_seeds(sys);
    std::vector<Point> out;
    Rational lo = *sys.interval().space.lower(), hi = *sys.interval().space.upper();
    for (int i = 1; i <= count; ++i) {
        Point p{lo + (hi - lo) * Rational(i, count + 1)};
        if (in_space(sys, p)) out.push_back(p);
    }
    return out;
}

// ------------------------------------------------------------ commands

Output cmd_validate(const Config& c, bool canonical) {
    Output o;
    o.report = header(c, "validate");
    ValidationResult v = validate(c.spec.sys, c.spec.pot);
    Json r;
    r["valid"] = v.valid;
    r["defects"] = Json::array();
    std::string csv = "kind,location,message\n";
    for (const auto& d : v.defects) {
        Json dj{{"kind", d.kind}, {"location", d.location}, {"message", d.message}};
        if (d.required) dj["required"] = d.required->str();
        if (d.found) dj["found"] = d.found->str();
        r["defects"].push_back(dj);
        csv += csv_escape(d.kind) + "," + csv_escape(d.location) + "," + csv_escape(d.message) + "\n";
    }
    if (v.handle) {
        r["norm"] = v.handle->norm.str();
        r["norm_witness"] = v.handle->norm_witness;
        r["norm_exact"] = v.handle->norm_exact;
    }
    if (canonical) r["canonical"] = serialize_spec(c.spec);
    o.report["result"] = r;
    o.csv = csv;
    o.files.push_back({"canonical.spec", canonical_spec_text(c.spec)});
    o.code = v.valid ? kOk : kFails;
    return o;
}

Output cmd_region(const Config& c) {
    Output o;
    o.report = header(c, "region");
    RegionReport rr = regular_set(c.spec.sys, c.spec.pot);
    Json r;
    r["delta"] = region_json(rr.delta);
    r["delta_pos"] = region_json(rr.delta_pos);
    r["delta_reg"] = region_json(rr.delta_reg);
    r["irregular"] = Json::array();
    o.csv = "point,reasons\n";
    for (const auto& ip : rr.irregular) {
        Json reasons = Json::array();
        std::string rs;
        for (auto why : ip.reasons) {
            reasons.push_back(reason_str(why));
            rs += (rs.empty() ? "" : ";") + reason_str(why);
        }
        std::string p = point_str(c.spec.sys, ip.x);
        r["irregular"].push_back(Json{{"point", p}, {"reasons", reasons}});
        o.csv += csv_escape(p) + "," + rs + "\n";
    }
    o.report["result"] = r;
    return o;
}

Output cmd_domain(const Config& c, int n, const std::string& point) {
    Output o;
    o.report = header(c, "domain");
    Json r;
    r["iterates"] = Json::array();
    for (int k = 0; k <= n; ++k) r["iterates"].push_back(Json{{"n", k}, {"region", region_json(iterate_domain(c.spec.sys, k))}});
    EssentialDomain ess = essential_domain(c.spec.sys, c.depth);
    r["essential"] = Json{{"region", region_json(ess.set)}, {"stabilized", ess.stabilized}, {"depth", ess.depth_reached}};
    if (!ess.stabilized) o.report["warnings"].push_back("essential domain did not stabilise by depth " + std::to_string(c.depth));
    o.csv = "x,weight\n";
    if (!point.empty()) {
        Point y = parse_point(c.spec.sys, point);
        auto pre = preimages(c.spec.sys, c.spec.pot, y, n, false, c.spec.depth_bound);
        Json arr = Json::array();
        for (const auto& e : pre) {
            arr.push_back(Json{{"x", point_str(c.spec.sys, e.x)}, {"weight", e.weight.str()}});
            o.csv += csv_escape(point_str(c.spec.sys, e.x)) + "," + e.weight.str() + "\n";
        }
        r["preimages"] = Json{{"y", point}, {"n", n}, {"count", pre.size()}, {"points", arr}};
    }
    o.report["result"] = r;
    return o;
}

Output cmd_rep(const Config& c, const std::string& kind, int window, const std::string& seeds_arg) {
    Output o;
    o.report = header(c, "rep " + kind);
    auto seeds = seeds_arg.empty() ? default_seeds(c.spec.sys) : parse_points(c.spec.sys, seeds_arg);
    RepPair rep = kind == "orbit" ? orbit_rep(c.spec.sys, c.spec.pot, seeds, c.depth)
                                  : regular_rep(c.spec.sys, c.spec.pot, seeds, c.depth, window);
    auto exact = rep.exact_rows("T");
    std::size_t interior = std::count(exact.begin(), exact.end(), true);
    std::size_t interior_pts = std::count(rep.basis.interior.begin(), rep.basis.interior.end(), true);
    Json r;
    r["kind"] = kind;
    r["basis_size"] = rep.basis.size();
    r["basis_interior"] = interior_pts;
    r["dim"] = rep.dim();
    if (kind == "regular") r["window"] = window;
    r["nnz_T"] = rep.T.nonZeros();
    r["exact_rows_T"] = interior;
    r["norm_T"] = spectral_norm(rep.T);
    Json sj = Json::array();
    for (const auto& s : seeds) sj.push_back(point_str(c.spec.sys, s));
    r["seeds"] = sj;
    o.report["result"] = r;
    o.report["warnings"].push_back("truncated at depth " + std::to_string(c.depth) + "; rows outside the exact set are boundary rows");
    o.csv = coo_csv(rep.T);
    std::string basis = "index,point,level,interior\n";
    for (std::size_t i = 0; i < rep.basis.size(); ++i)
        basis += std::to_string(i) + "," + csv_escape(point_str(c.spec.sys, rep.basis.points[i])) + "," +
                 std::to_string(rep.basis.level[i]) + "," + (rep.basis.interior[i] ? "1" : "0") + "\n";
    o.files.push_back({"T.csv", o.csv});
    o.files.push_back({"basis.csv", basis});
    return o;
}

Output cmd_relations(const Config& c, std::size_t battery, int window) {
    Output o;
    o.report = header(c, "relations");
    RelationOptions opt;
    opt.depth = c.depth;
    opt.window = window;
    opt.count = battery;
    opt.seed = c.seed;
    opt.tol = tol_or(c, 1e-10);
    auto rows = relation_battery(c.spec.sys, c.spec.pot, opt);
    Json arr = Json::array();
    o.csv = "relation,worst,tol,pass,checks,interior,boundary,witness\n";
    bool all = true;
    for (const auto& s : rows) {
        all = all && s.pass();
        arr.push_back(Json{{"relation", s.name}, {"worst", s.worst}, {"tol", s.tol}, {"pass", s.pass()}, {"checks", s.checks},
                           {"interior", s.interior}, {"boundary", s.boundary}, {"witness", s.witness}});
        std::ostringstream line;
        line.precision(6);
        line << s.name << "," << s.worst << "," << s.tol << "," << (s.pass() ? "1" : "0") << "," << s.checks << ","
             << s.interior << "," << s.boundary << "," << csv_escape(s.witness) << "\n";
        o.csv += line.str();
    }
    o.report["result"] = Json{{"battery", battery}, {"window", window}, {"rows", arr}, {"pass", all}};
    o.files.push_back({"relations.csv", o.csv});
    o.code = all ? kOk : kFails;
    return o;
}

Output cmd_spectrum(const Config& c, int n, const std::string& irrep, int k) {
    Output o;
    o.report = header(c, "spectrum");
    SpectrumDescription d = spectrum_An(c.spec.sys, c.spec.pot, n);
    Json r;
    r["n"] = n;
    r["images"] = Json::array();
    r["strata"] = Json::array();
    for (int i = 0; i <= n; ++i) {
        r["images"].push_back(region_json(d.images[static_cast<std::size_t>(i)]));
        r["strata"].push_back(Json{{"k", i}, {"top", i == n}, {"set", region_json(d.strata[static_cast<std::size_t>(i)])}});
    }
    r["gluing"] = "pushout";
    r["topology_exact"] = d.topology_exact;
    r["generators"] = Json::array();
    for (const auto& g : d.generators) {
        Json U = Json::array();
        for (const auto& u : g.U) U.push_back(region_str(u));
        r["generators"].push_back(Json{{"seed", g.seed}, {"U", U}, {"compatible", g.compatible}, {"open", g.open}});
    }
    for (const auto& w : d.warnings) o.report["warnings"].push_back(w);
    if (!irrep.empty()) {
        PiYK p = rep_pi_y_k(c.spec.sys, c.spec.pot, parse_point(c.spec.sys, irrep), k, c.seed);
        Json f = Json::array();
        for (std::size_t i = 0; i < p.fibre.size(); ++i)
            f.push_back(Json{{"x", point_str(c.spec.sys, p.fibre[i])}, {"rho_k", p.weights[i]}});
        r["irrep"] = Json{{"y", irrep},           {"k", k},
                          {"dim", p.fibre.size()}, {"fibre", f},
                          {"span_rank", p.span_rank}, {"sigma_min", p.sigma_min},
                          {"irreducible", p.irreducible}};
    }
    o.report["result"] = r;
    o.csv = spectrum_csv(c.spec.sys, d.samples);
    o.files.push_back({"spectrum.csv", o.csv});
    return o;
}

Output cmd_quasi_orbits(const Config& c, int samples) {
    Output o;
    o.report = header(c, "quasi-orbits");
    auto pts = grid_samples(c.spec.sys, samples);
    QuasiOrbitPartition q = quasi_orbits(c.spec.sys, c.spec.pot, c.depth, pts);
    Json classes = Json::array();
    for (std::size_t i = 0; i < q.representatives.size(); ++i) {
        Json members = Json::array();
        for (std::size_t s = 0; s < q.samples.size(); ++s)
            if (q.class_of[s] == i) members.push_back(point_str(c.spec.sys, q.samples[s]));
        classes.push_back(Json{{"representative", point_str(c.spec.sys, q.representatives[i])},
                               {"closure", q.closures[i]},
                               {"members", members}});
    }
    o.report["result"] = Json{{"classes", classes},
                              {"resolution", q.resolution},
                              {"brute_force_agrees", q.brute_force_agrees}};
    o.csv = "sample,class\n";
    for (std::size_t s = 0; s < q.samples.size(); ++s)
        o.csv += csv_escape(point_str(c.spec.sys, q.samples[s])) + "," + std::to_string(q.class_of[s]) + "\n";
    o.code = q.brute_force_agrees ? kOk : kUnknown;
    return o;
}

Output cmd_check(const Config& c, const std::string& prop, const std::string& psi_arg, bool witness) {
    Output o;
    o.report = header(c, "check " + prop);
    const auto& s = c.spec;
    Verdict v;
    if (prop == "free") v = check_top_free(s.sys, s.pot, c.depth);
    else if (prop == "minimal") v = check_minimal(s.sys, s.pot, c.depth);
    else if (prop == "contracting") v = check_contracting(s.sys, s.pot, c.depth);
    else if (prop == "simple") v = verdict_simple(s.sys, s.pot, c.depth);
    else if (prop == "pure-infinite") v = verdict_purely_infinite(s.sys, s.pot, c.depth);
    else if (prop == "one-circuit") v = check_one_circuit(s.sys, s.pot);
    else if (prop == "positive-energy") v = check_positive_energy(s.sys, parse_psi(s, psi_arg), c.depth);
    else throw parse_error("check: unknown property '" + prop + "'");
    Json r = verdict_json(s.sys, v);
    r["certificate_verified"] = v.status == Status::Unknown ? Json(nullptr) : Json(verify_certificate(s.sys, s.pot, v));
    if (witness && prop == "free" && v.status == Status::Fails) {
        auto w = annihilation_witness(s.sys, s.pot, v, c.depth);
        r["annihilation_witness"] = Json{{"n", w.n}, {"support", w.support}, {"orbit_norm", w.orbit_norm},
                                         {"regular_norm", w.regular_norm}};
    }
    o.report["result"] = r;
    o.csv = "property,status,depth,reason\n" + property_str(v.property) + "," + status_str(v.status) + "," +
            std::to_string(v.depth) + "," + csv_escape(v.reason) + "\n";
    o.code = exit_code(v.status);
    return o;
}

std::string measure_csv(const PartialSystem& sys, const Measure& mu) {
    std::ostringstream out;
    out.precision(17);
    if (const auto* u = std::get_if<UlamMeasure>(&mu)) {
        out << "bin,lo,hi,density\n";
        double h = u->bin_width(), lo = u->lo.to_double();
        for (std::size_t i = 0; i < u->densities.size(); ++i)
            out << i << "," << lo + h * static_cast<double>(i) << "," << lo + h * static_cast<double>(i + 1) << ","
                << u->densities[i] << "\n";
    } else if (const auto* g = std::get_if<GraphMeasure>(&mu)) {
        out << "vertex,mass\n";
        for (std::size_t v = 0; v < g->vertex_mass.size(); ++v) out << sys.graph().vertices[v] << "," << g->vertex_mass[v] << "\n";
    }
    return out.str();
}

struct ConformalArgs {
    std::string psi = "one";
    std::optional<double> beta;
    bool solve = false;
    std::string bracket = "0.1,3";
    bool family = false;
};

Output cmd_conformal(const Config& c, const ConformalArgs& a) {
    Output o;
    o.report = header(c, "conformal");
    const auto& s = c.spec;
    Potential psi = parse_psi(s, a.psi);
    Json r;
    r["psi"] = a.psi;
    r["bins"] = c.bins;

    if (a.family) {
        if (!a.beta) throw parse_error("conformal --family needs --beta");
        if (!s.sys.is_interval()) throw unsupported("the truncated measure family is defined on the interval backend");
        SeriesMeasure mu = mu_beta(*a.beta, c.depth);
        RegionReport rr = regular_set(s.sys, s.pot);
        std::vector<TestFunction> weak;
        for (const auto& comp : std::get<IntervalSet>(rr.delta_reg).components()) {
            Rational w = comp.hi - comp.lo;
            Rational l = comp.lo + w / Rational(8), h = comp.hi - w / Rational(8);
            weak.push_back(PwPoly::hat(l, (l + h) / Rational(2), h, Rational(1)));
        }
        Rational lo = *s.sys.interval().space.lower(), hi = *s.sys.interval().space.upper(), q = (hi - lo) / Rational(4);
        std::vector<TestFunction> strong{PwPoly::hat(lo + q, (lo + hi) / Rational(2), hi - q, Rational(1))};
        auto wr = weakly_conformal_residual(s.sys, s.pot, psi, *a.beta, mu, weak);
        auto sr = conformal_residual(s.sys, s.pot, psi, *a.beta, mu, strong);
        double mass = total_mass(s.sys, mu);
        r["family"] = Json{{"beta", *a.beta},
                           {"depth", c.depth},
                           {"mass_truncated", mass},
                           {"tail", mu.tail()},
                           {"mass", mass + mu.tail()},
                           {"weak_residual", wr.value},
                           {"weak_tail_bound", wr.tail_bound ? Json(*wr.tail_bound) : Json(nullptr)},
                           {"weak_pass", wr.tail_bound && wr.value <= *wr.tail_bound},
                           {"strong_residual", sr.value}};
        r["measure"] = measure_to_json(s.sys, mu);
        o.report["result"] = r;
        o.csv = "quantity,value\nmass," + std::to_string(mass + mu.tail()) + "\nweak_residual," +
                std::to_string(wr.value) + "\nstrong_residual," + std::to_string(sr.value) + "\n";
        o.code = wr.tail_bound && wr.value <= *wr.tail_bound ? kOk : kFails;
        return o;
    }

    KMSCandidate cand;
    if (a.solve) {
        SolveOptions opt;
        auto comma = a.bracket.find(',');
        if (comma == std::string::npos) throw parse_error("--bracket: expected a,b");
        opt.lo = std::stod(a.bracket.substr(0, comma));
        opt.hi = std::stod(a.bracket.substr(comma + 1));
        if (!(opt.lo < opt.hi)) throw parse_error("--bracket: need a < b");
        opt.bins = c.bins;
        if (c.tol > 0) opt.root_tol = c.tol;
        try {
            cand = solve_conformal(s.sys, s.pot, psi, opt);
        } catch (const Error& e) {
            if (e.code() != "NoSolution") throw;
            r["status"] = "NoSolution";
            r["reason"] = e.what();
            o.report["result"] = r;
            o.csv = "status,reason\nNoSolution," + csv_escape(e.what()) + "\n";
            o.code = kFails;
            return o;
        }
    } else if (a.beta) {
        cand = candidate_at(s.sys, s.pot, psi, *a.beta, c.bins);
    } else {
        throw parse_error("conformal: give --beta B or --solve");
    }
    r["status"] = "Candidate";
    r["beta"] = cand.beta;
    r["perron"] = cand.perron;
    r["eigen_residual"] = cand.eigen_residual;
    r["bisection_steps"] = cand.bisection_steps;
    r["degenerate"] = cand.degenerate;
    if (const auto* u = std::get_if<UlamMeasure>(&cand.mu)) r["tv_to_uniform"] = total_variation_to_uniform(*u);
    r["mass"] = total_mass(s.sys, cand.mu);
    if (cand.degenerate) o.report["warnings"].push_back("r(beta) is flat at 1 on the bracket; beta is not determined");
    if (!a.solve && std::abs(cand.perron - 1.0) > 1e-8)
        o.report["warnings"].push_back("r(beta) = " + std::to_string(cand.perron) + " is not 1; the measure is not conformal");
    o.report["result"] = r;
    o.csv = measure_csv(s.sys, cand.mu);
    o.files.push_back({"measure.csv", o.csv});
    o.files.push_back({"candidate.json", candidate_json(s, a.psi, cand).dump(2) + "\n"});
    return o;
}

Output cmd_kms_verify(Config& c, const std::string& candidate, std::size_t battery) {
    LoadedCandidate lc = load_candidate(candidate);
    c.spec = lc.spec;
    c.hash_extra = read_file(candidate);
    Output o;
    o.report = header(c, "kms-verify");
    double tol = 1e-8;
    if (const auto* u = std::get_if<UlamMeasure>(&lc.mu)) tol = 1e-5 + 10.0 / static_cast<double>(u->densities.size());
    tol = tol_or(c, tol);
    auto rows = kms_battery(lc.spec.sys, lc.spec.pot, lc.psi, lc.beta, lc.mu, battery, c.seed);
    std::ostringstream csv;
    csv.precision(12);
    csv << "pair,first,second,degree,lhs,rhs,residual\n";
    double worst = 0;
    bool offdiag_ok = true;
    Json arr = Json::array();
    for (const auto& row : rows) {
        worst = std::max(worst, row.r.value);
        if (row.degree != 0 && (std::abs(row.r.lhs) > 1e-5 || std::abs(row.r.rhs) > 1e-5)) offdiag_ok = false;
        arr.push_back(Json{{"pair", row.id}, {"first", row.first}, {"second", row.second}, {"degree", row.degree},
                           {"lhs", row.r.lhs}, {"rhs", row.r.rhs}, {"residual", row.r.value}});
        csv << row.id << "," << csv_escape(row.first) << "," << csv_escape(row.second) << "," << row.degree << ","
            << row.r.lhs << "," << row.r.rhs << "," << row.r.value << "\n";
    }
    bool pass = worst <= tol && offdiag_ok;
    o.report["result"] = Json{{"beta", lc.beta}, {"psi", lc.psi_arg}, {"pairs", arr}, {"worst", worst},
                              {"tol", tol},      {"off_diagonal_vanish", offdiag_ok}, {"pass", pass}};
    o.csv = csv.str();
    o.files.push_back({"kms.csv", o.csv});
    o.code = pass ? kOk : kFails;
    return o;
}

Output cmd_groupoid(const Config& c, const std::string& sub, bool restrict_regular, int gap_n, int samples,
                    std::size_t battery, int window) {
    Output o;
    o.report = header(c, "groupoid " + sub);
    const auto& s = c.spec;
    Json r;
    if (sub == "build") {
        Deaconu G = build_deaconu(s.sys, s.pot, default_seeds(s.sys), c.depth, restrict_regular);
        GroupoidAxioms ax = check_groupoid_axioms(G);
        r = Json{{"basis_size", G.basis.size()},
                 {"elements", G.elements.size()},
                 {"products", G.products.size()},
                 {"restricted", G.restricted},
                 {"associativity_checked", ax.associativity_checked},
                 {"associativity_failures", ax.associativity_failures},
                 {"inverse_failures", ax.inverse_failures},
                 {"unit_failures", ax.unit_failures},
                 {"axioms_ok", ax.ok()}};
        o.csv = G.csv(s.sys);
        o.files.push_back({"elements.csv", o.csv});
        o.code = ax.ok() ? kOk : kFails;
    } else if (sub == "gap") {
        GapRelation g = gap_relation(s.sys, s.pot, gap_n, grid_samples(s.sys, samples));
        Json pairs = Json::array();
        o.csv = "n,x,y\n";
        for (const auto& p : g.pairs) {
            pairs.push_back(Json{{"n", p.n}, {"x", point_str(s.sys, p.x)}, {"y", point_str(s.sys, p.y)}});
            o.csv += std::to_string(p.n) + "," + csv_escape(point_str(s.sys, p.x)) + "," + csv_escape(point_str(s.sys, p.y)) + "\n";
        }
        r = Json{{"n", gap_n}, {"pairs", pairs}, {"nested", g.nested}, {"equivalence", g.equivalence}};
        o.code = g.nested && g.equivalence ? kOk : kFails;
    } else if (sub == "iso-check") {
        double tol = tol_or(c, 1e-10);
        auto rows = iso_battery(s.sys, s.pot, c.depth, window, battery, c.seed);
        Json arr = Json::array();
        double worst = 0;
        std::ostringstream csv;
        csv << "f,g,residual,interior,boundary\n";
        for (auto& row : rows) {
            row.r.tol = tol;
            worst = std::max(worst, row.r.value);
            Json rj = residual_row(row.r);
            rj["f"] = row.f;
            rj["g"] = row.g;
            arr.push_back(rj);
            csv << csv_escape(row.f) << "," << csv_escape(row.g) << "," << row.r.value << "," << row.r.interior << ","
                << row.r.boundary << "\n";
        }
        r = Json{{"pairs", arr}, {"worst", worst}, {"tol", tol}, {"pass", worst <= tol}};
        o.csv = csv.str();
        o.code = worst <= tol ? kOk : kFails;
    } else if (sub == "graph-gen") {
        GraphGenerators gg = graph_generators(s.sys, s.pot, c.depth);
        Json arr = Json::array();
        o.csv = "name,value,tol,interior,boundary\n";
        for (auto r2 : gg.residuals) {
            if (c.tol > 0) r2.tol = c.tol;
            arr.push_back(residual_row(r2));
            std::ostringstream line;
            line << r2.name << "," << r2.value << "," << r2.tol << "," << r2.interior << "," << r2.boundary << "\n";
            o.csv += line.str();
        }
        r = Json{{"residuals", arr}, {"pass", gg.pass()}};
        o.code = gg.pass() ? kOk : kFails;
    } else {
        throw parse_error("groupoid: unknown subcommand '" + sub + "'");
    }
    o.report["result"] = r;
    return o;
}

Output cmd_report(const Config& c, std::size_t battery) {
    Output o;
    o.report = header(c, "report");
    const auto& s = c.spec;
    Json r;
    ValidationResult v = validate(s.sys, s.pot);
    r["valid"] = v.valid;
    if (!v.valid) {
        o.report["result"] = r;
        o.code = kInputError;
        return o;
    }
    RegionReport rr = regular_set(s.sys, s.pot);
    r["delta_pos"] = region_str(rr.delta_pos);
    r["delta_reg"] = region_str(rr.delta_reg);
    r["verdicts"] = Json::array();
    o.csv = "property,status,reason\n";
    for (const Verdict& vd : {check_top_free(s.sys, s.pot, c.depth), check_minimal(s.sys, s.pot, c.depth),
                              check_contracting(s.sys, s.pot, c.depth), verdict_simple(s.sys, s.pot, c.depth),
                              verdict_purely_infinite(s.sys, s.pot, c.depth)}) {
        r["verdicts"].push_back(Json{{"property", property_str(vd.property)}, {"status", status_str(vd.status)},
                                     {"reason", vd.reason}});
        o.csv += property_str(vd.property) + "," + status_str(vd.status) + "," + csv_escape(vd.reason) + "\n";
    }
    RelationOptions opt;
    opt.depth = std::min(c.depth, 6);
    opt.count = battery;
    opt.seed = c.seed;
    opt.tol = tol_or(c, 1e-10);
    Json rel = Json::array();
    for (const auto& row : relation_battery(s.sys, s.pot, opt))
        rel.push_back(Json{{"relation", row.name}, {"worst", row.worst}, {"tol", row.tol}, {"pass", row.pass()},
                           {"interior", row.interior}, {"boundary", row.boundary}});
    r["relations"] = rel;
    o.report["result"] = r;
    return o;
}

void emit(const Config& c, const Output& o) {
    if (!c.out.empty()) {
        std::filesystem::create_directories(c.out);
        std::ofstream(std::filesystem::path(c.out) / "report.json") << o.report.dump(2) << "\n";
        for (const auto& [name, body] : o.files) std::ofstream(std::filesystem::path(c.out) / name) << body;
    }
    if (c.format == "csv") std::cout << o.csv;
    else std::cout << o.report.dump(2) << "\n";
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Transfer operators of partial maps: regions, representations, spectra, verdicts, KMS data"};
    app.set_version_flag("--version", kVersion);
    app.require_subcommand(1);
    app.fallthrough();

    Config cfg;
    for (int i = 0; i < argc; ++i) cfg.argv.emplace_back(i == 0 ? "xferop" : argv[i]);
    app.add_option("--spec", cfg.spec_arg, "spec file or bundled spec name");
    app.add_option("--depth", cfg.depth, "truncation depth")->check(CLI::Range(1, 64));
    app.add_option("--bins", cfg.bins, "Ulam bins")->check(CLI::Range(2, 1 << 20));
    app.add_option("--tol", cfg.tol, "tolerance override")->check(CLI::PositiveNumber);
    app.add_option("--seed", cfg.seed, "64-bit seed for sampled batteries");
    app.add_option("--out", cfg.out, "directory for report.json and CSV files");
    app.add_option("--format", cfg.format, "stdout format")->check(CLI::IsMember({"text", "csv"}));

    bool canonical = false;
    auto* validate_cmd = app.add_subcommand("validate", "parse and validate a spec");
    validate_cmd->add_flag("--canonical", canonical, "print the canonical serialisation");

    app.add_subcommand("region", "Delta, Delta_pos, Delta_reg and irregular points");

    int dom_n = 1;
    std::string dom_point;
    auto* domain_cmd = app.add_subcommand("domain", "iterated domains and preimages");
    domain_cmd->add_option("--n", dom_n)->check(CLI::Range(0, 64));
    domain_cmd->add_option("--point", dom_point, "list phi^{-n}(point) with weights");

    std::string rep_kind, rep_seeds;
    int window = 3;
    auto* rep_cmd = app.add_subcommand("rep", "truncated orbit or regular representation");
    rep_cmd->add_option("kind", rep_kind)->required()->check(CLI::IsMember({"orbit", "regular"}));
    rep_cmd->add_option("--window", window)->check(CLI::Range(0, 64));
    rep_cmd->add_option("--seeds", rep_seeds, "seed points separated by ';'");

    std::size_t battery = 50;
    auto* rel_cmd = app.add_subcommand("relations", "relation battery on the truncated representations");
    rel_cmd->add_option("--battery", battery)->check(CLI::Range(1, 10000));
    rel_cmd->add_option("--window", window)->check(CLI::Range(0, 64));

    int spec_n = 1, irrep_k = 0;
    std::string irrep;
    auto* spec_cmd = app.add_subcommand("spectrum", "stratified spectrum of the core filtration");
    spec_cmd->add_option("--n", spec_n)->check(CLI::Range(0, 32));
    spec_cmd->add_option("--irrep", irrep, "point y for the irreducible representation at level --k");
    spec_cmd->add_option("--k", irrep_k)->check(CLI::Range(0, 32));

    int samples = 15;
    auto* qo_cmd = app.add_subcommand("quasi-orbits", "quasi-orbit partition of sample points");
    qo_cmd->add_option("--samples", samples)->check(CLI::Range(1, 4096));

    std::string prop, check_psi = "one";
    bool witness = false;
    auto* check_cmd = app.add_subcommand("check", "decide a dynamical property");
    check_cmd->add_option("property", prop)
        ->required()
        ->check(CLI::IsMember({"free", "minimal", "contracting", "simple", "pure-infinite", "one-circuit",
                               "positive-energy"}));
    check_cmd->add_option("--psi", check_psi, "potential for positive-energy");
    check_cmd->add_flag("--witness", witness, "measure the annihilation witness when freeness fails");

    ConformalArgs ca;
    double beta_arg = 0;
    auto* conf_cmd = app.add_subcommand("conformal", "conformal measure at a given beta or solved for beta");
    conf_cmd->add_option("--psi", ca.psi, "one, zero, const:c or a psi file");
    auto* beta_opt = conf_cmd->add_option("--beta", beta_arg)->check(CLI::PositiveNumber);
    auto* solve_flag = conf_cmd->add_flag("--solve", ca.solve);
    conf_cmd->add_option("--bracket", ca.bracket, "a,b");
    conf_cmd->add_flag("--family", ca.family, "truncated measure family at --beta and --depth");
    beta_opt->excludes(solve_flag);

    std::string candidate;
    std::size_t kms_n = 20;
    auto* kms_cmd = app.add_subcommand("kms-verify", "KMS residuals of a candidate over monomial pairs");
    kms_cmd->add_option("--candidate", candidate)->required();
    kms_cmd->add_option("--battery", kms_n)->check(CLI::Range(1, 10000));

    std::string gsub;
    bool restrict_regular = false;
    int gap_n = 1;
    std::size_t iso_n = 20;
    auto* g_cmd = app.add_subcommand("groupoid", "Deaconu groupoid and graph generators");
    g_cmd->add_option("kind", gsub)->required()->check(CLI::IsMember({"build", "gap", "iso-check", "graph-gen"}));
    g_cmd->add_flag("--restrict-regular", restrict_regular, "build on Delta_reg only");
    g_cmd->add_option("--n", gap_n)->check(CLI::Range(0, 32));
    g_cmd->add_option("--samples", samples)->check(CLI::Range(1, 4096));
    g_cmd->add_option("--battery", iso_n)->check(CLI::Range(1, 10000));
    g_cmd->add_option("--window", window)->check(CLI::Range(0, 64));

    std::size_t report_battery = 20;
    auto* report_cmd = app.add_subcommand("report", "validation, regions, verdicts and a relation battery");
    report_cmd->add_option("--battery", report_battery)->check(CLI::Range(1, 10000));

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        int rc = app.exit(e);
        return rc == 0 ? kOk : kInputError;
    }

    try {
        Output out;
        if (*kms_cmd) {
            out = cmd_kms_verify(cfg, candidate, kms_n);
        } else {
            if (cfg.spec_arg.empty()) throw parse_error("--spec is required");
            cfg.spec = load_spec_or_bundled(cfg.spec_arg);
            if (*validate_cmd) {
                out = cmd_validate(cfg, canonical);
                if (canonical && cfg.format == "text" && cfg.out.empty()) {
                    std::cout << canonical_spec_text(cfg.spec);
                    return out.code;
                }
                emit(cfg, out);
                return out.code;
            }
            require_valid(cfg.spec.sys, cfg.spec.pot);
            if (app.got_subcommand("region")) out = cmd_region(cfg);
            else if (*domain_cmd) out = cmd_domain(cfg, dom_n, dom_point);
            else if (*rep_cmd) out = cmd_rep(cfg, rep_kind, window, rep_seeds);
            else if (*rel_cmd) out = cmd_relations(cfg, battery, window);
            else if (*spec_cmd) out = cmd_spectrum(cfg, spec_n, irrep, irrep_k);
            else if (*qo_cmd) out = cmd_quasi_orbits(cfg, samples);
            else if (*check_cmd) {
                if (prop == "positive-energy") cfg.hash_extra = check_psi;
                out = cmd_check(cfg, prop, check_psi, witness);
            } else if (*conf_cmd) {
                if (beta_opt->count()) ca.beta = beta_arg;
                cfg.hash_extra = ca.psi;
                out = cmd_conformal(cfg, ca);
            } else if (*g_cmd) out = cmd_groupoid(cfg, gsub, restrict_regular, gap_n, samples, iso_n, window);
            else if (*report_cmd) out = cmd_report(cfg, report_battery);
        }
        emit(cfg, out);
        return out.code;
    } catch (const Error& e) {
        std::cerr << "error: " << e.code() << ": " << e.what() << "\n";
        return kInputError;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kInputError;
    }
}
