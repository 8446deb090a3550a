#pragma once

#include "xferop/system.hpp"
#include "xferop/transfer.hpp"

#include <json.hpp>

#include <string>

namespace xferop {

using Json = nlohmann::ordered_json;

std::string read_file(const std::string& path);
// Throws ParseError with the byte offset.
Json parse_json(const std::string& text, const std::string& name);

// Spec files are JSON. Rationals are strings "p/q" (integers may also be bare
// JSON integers). Every ParseError names the offending field path.
Spec parse_spec(const Json& j, const std::string& name = "");
Spec parse_spec_text(const std::string& text, const std::string& name = "");
Spec load_spec(const std::string& path);
// Looks for NAME, NAME.spec, or a bundled spec named NAME.
Spec load_spec_or_bundled(const std::string& path_or_name);
Json serialize_spec(const Spec& s);
std::string canonical_spec_text(const Spec& s);

Json rational_json(const Rational& r);
Rational parse_rational(const Json& j, const std::string& field);
Json interval_json(const Interval& iv);
Interval parse_interval(const Json& j, const std::string& field);
Json region_json(const Region& r);

// psi files: {"pieces": [{domain, slope, intercept}]} on the interval backend,
// {"weights": {edge: value}} on the graph backend; "one" and "zero" are
// shorthands for the constants.
Potential parse_psi(const Spec& spec, const std::string& path_or_keyword);
Potential parse_psi_json(const Spec& spec, const Json& j);

Json measure_json(const UlamMeasure& mu);
Json measure_json(const PartialSystem& sys, const AtomicMeasure& mu);

std::string bundled_spec_dir();

}  // namespace xferop
