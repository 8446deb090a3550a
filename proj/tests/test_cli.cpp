#include "xferop/errors.hpp"
#include "xferop/io.hpp"
#include "xferop/report.hpp"
#include "xferop/thermo.hpp"
#include "xferop/verdicts.hpp"

#include <doctest.h>

#include <sys/wait.h>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <numbers>
#include <sstream>

using namespace xferop;

namespace {

struct Run {
    int code = -1;
    std::string out;
};

Run run_cli(const std::string& args) {
    std::string cmd = std::string(XFEROP_CLI) + " " + args + " 2>/dev/null";
    Run r;
    FILE* p = popen(cmd.c_str(), "r");
    REQUIRE(p);
    char buf[4096];
    std::size_t got;
    while ((got = fread(buf, 1, sizeof buf, p)) > 0) r.out.append(buf, got);
    int status = pclose(p);
    r.code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
    return r;
}

std::string without_timestamp(const std::string& s) {
    std::istringstream in(s);
    std::string line, out;
    while (std::getline(in, line))
        if (line.find("\"timestamp\"") == std::string::npos) out += line + "\n";
    return out;
}

std::filesystem::path scratch(const std::string& name) {
    auto dir = std::filesystem::temp_directory_path() / "xferop_cli_tests";
    std::filesystem::create_directories(dir);
    return dir / name;
}

const char* kSpec = R"({"name":"t","backend":"interval",
  "space":[{"lo":"0","hi":"1","lo_closed":true,"hi_closed":true}],
  "branches":[{"domain":{"lo":"0","hi":"2/4","lo_closed":true,"hi_closed":true},"slope":"2","intercept":"0"},
              {"domain":{"lo":"1/2","hi":"1","lo_closed":false,"hi_closed":true},"slope":"-2","intercept":"2"}],
  "potential":{"pieces":[{"domain":{"lo":"0","hi":"1","lo_closed":true,"hi_closed":true},"slope":"0","intercept":"2/4"}],
               "overrides":[{"point":"1/2","value":"1"}]},
  "depth_bound":32})";

}  // namespace

TEST_SUITE("cli") {

TEST_CASE("spec serialisation round-trips and canonicalises rationals") {
    for (const char* name : {"tent_std", "tent_half", "doubling", "halving", "loop1", "loops2", "fullshift2"}) {
        Spec s = load_spec_or_bundled(name);
        std::string text = canonical_spec_text(s);
        Spec back = parse_spec_text(text, name);
        CHECK_MESSAGE(canonical_spec_text(back) == text, name);
    }
    Spec s = parse_spec_text(kSpec, "t");
    std::string canon = canonical_spec_text(s);
    CHECK(canon.find("2/4") == std::string::npos);
    CHECK(canon.find("\"1/2\"") != std::string::npos);
    // the hand-written tent is the bundled one up to its name
    Spec bundled = load_spec_or_bundled("tent_std");
    Json a = serialize_spec(s), b = serialize_spec(bundled);
    a.erase("name");
    b.erase("name");
    CHECK(a == b);
}

TEST_CASE("parse errors name the offending field") {
    std::string bad = kSpec;
    bad.replace(bad.find("\"lo\":\"1/2\""), 10, "\"lo\":\"3/2\"");
    try {
        parse_spec_text(bad, "bad");
        FAIL("expected ParseError");
    } catch (const Error& e) {
        CHECK(e.code() == "ParseError");
        CHECK(std::string(e.what()).find("branches[1]") != std::string::npos);
    }
    CHECK_THROWS_AS(parse_spec_text("{", "x"), Error);
    CHECK_THROWS_AS(parse_spec_text(R"({"name":"x","backend":"other"})", "x"), Error);
}

TEST_CASE("FNV-1a reference vectors") {
    CHECK(hex64(fnv1a64("")) == "cbf29ce484222325");
    CHECK(hex64(fnv1a64("a")) == "af63dc4c8601ec8c");
    CHECK(hex64(fnv1a64("foobar")) == "85944171f73967e8");
}

TEST_CASE("candidate files round-trip") {
    Spec s = load_spec_or_bundled("tent_std");
    Potential psi = parse_psi(s, "one");
    KMSCandidate c = candidate_at(s.sys, s.pot, psi, std::numbers::ln2, 64);
    auto path = scratch("candidate.json");
    std::ofstream(path) << candidate_json(s, "one", c).dump(2);
    LoadedCandidate back = load_candidate(path.string());
    CHECK(back.beta == c.beta);
    CHECK(canonical_spec_text(back.spec) == canonical_spec_text(s));
    const auto& u0 = std::get<UlamMeasure>(c.mu);
    const auto& u1 = std::get<UlamMeasure>(back.mu);
    CHECK(u0.densities == u1.densities);
    CHECK(u0.lo == u1.lo);
    CHECK(u0.hi == u1.hi);

    Spec f = load_spec_or_bundled("fullshift2");
    KMSCandidate g = solve_conformal(f.sys, f.pot, parse_psi(f, "one"), SolveOptions{});
    std::ofstream(path) << candidate_json(f, "one", g).dump(2);
    LoadedCandidate gb = load_candidate(path.string());
    CHECK(std::get<GraphMeasure>(gb.mu).vertex_mass == std::get<GraphMeasure>(g.mu).vertex_mass);
}

TEST_CASE("reports are deterministic apart from the timestamp") {
    for (const char* args : {"--spec tent_std spectrum --n 3", "--spec fullshift2 relations --battery 8 --depth 4",
                             "--spec loop1 check free --witness", "--spec doubling --seed 3 quasi-orbits"}) {
        Run a = run_cli(args), b = run_cli(args);
        CHECK(a.code == b.code);
        CHECK_MESSAGE(without_timestamp(a.out) == without_timestamp(b.out), args);
        CHECK(!a.out.empty());
    }
    Run csv = run_cli("--spec tent_std --format csv spectrum --n 2");
    CHECK(csv.code == 0);
    CHECK(csv.out.find(',') != std::string::npos);
    CHECK(csv.out.find('{') == std::string::npos);
}

TEST_CASE("report header and output directory") {
    auto dir = scratch("out_rep");
    std::filesystem::remove_all(dir);
    Run r = run_cli("--spec tent_std --out " + dir.string() + " rep orbit --depth 3");
    CHECK(r.code == 0);
    Json j = parse_json(read_file((dir / "report.json").string()), "report.json");
    for (const char* key : {"command", "argv", "spec", "input_hash", "seed", "depth", "version", "timestamp", "warnings"})
        CHECK_MESSAGE(j.contains(key), key);
    CHECK(j["depth"] == 3);
    CHECK(std::filesystem::exists(dir / "T.csv"));
    CHECK(std::filesystem::exists(dir / "basis.csv"));
}

TEST_CASE("exit codes") {
    CHECK(run_cli("--spec fullshift2 check simple").code == 0);
    CHECK(run_cli("--spec loop1 check simple").code == 1);
    CHECK(run_cli("--spec no_such_spec region").code == 3);
    CHECK(run_cli("--spec tent_std --depth -1 region").code == 3);
    CHECK(run_cli("--spec tent_std groupoid build").code == 3);
    CHECK(run_cli("--spec tent_std conformal --psi zero --solve --bracket 0.1,3").code == 1);
    CHECK(run_cli("--spec tent_std conformal --psi one --solve --bracket 0.1,3 --bins 128").code == 0);
    CHECK(run_cli("--spec tent_std validate").code == 0);
    CHECK(exit_code(Status::Unknown) == 2);
    auto bad = scratch("bad.json");
    std::ofstream(bad) << R"({"name":"neg","backend":"interval",
      "space":[{"lo":"0","hi":"1","lo_closed":true,"hi_closed":true}],
      "branches":[{"domain":{"lo":"0","hi":"1","lo_closed":true,"hi_closed":true},"slope":"1/2","intercept":"0"}],
      "potential":{"pieces":[{"domain":{"lo":"0","hi":"1","lo_closed":true,"hi_closed":true},"slope":"0","intercept":"-1"}],"overrides":[]}})";
    CHECK(run_cli("--spec " + bad.string() + " validate").code == 1);
    CHECK(run_cli("--spec " + bad.string() + " region").code == 3);
}

TEST_CASE("kms-verify accepts a solved candidate and rejects a shifted temperature") {
    auto dir = scratch("out_kms");
    std::filesystem::remove_all(dir);
    Run solve = run_cli("--spec tent_std --bins 256 --out " + dir.string() + " conformal --psi one --solve --bracket 0.1,3");
    REQUIRE(solve.code == 0);
    Run ok = run_cli("kms-verify --candidate " + (dir / "candidate.json").string() + " --battery 10");
    CHECK(ok.code == 0);
    Json j = parse_json(read_file((dir / "candidate.json").string()), "candidate");
    j["beta"] = 1.0;
    auto shifted = scratch("shifted.json");
    std::ofstream(shifted) << j.dump();
    CHECK(run_cli("kms-verify --candidate " + shifted.string() + " --battery 10").code == 1);
}

}
