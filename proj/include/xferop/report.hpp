#pragma once

#include "xferop/io.hpp"
#include "xferop/thermo.hpp"

#include <cstdint>
#include <string>

namespace xferop {

std::uint64_t fnv1a64(const std::string& bytes);
std::string hex64(std::uint64_t v);

Json measure_to_json(const PartialSystem& sys, const Measure& mu);
// psi is needed to rebuild graph measures, which carry it.
Measure measure_from_json(const Json& j, const Potential& psi);

// Candidate file: the spec it was solved on (canonical text), the psi
// argument, beta and the measure.
Json candidate_json(const Spec& spec, const std::string& psi_arg, const KMSCandidate& c);
struct LoadedCandidate {
    Spec spec;
    std::string psi_arg;
    Potential psi;
    double beta = 0;
    Measure mu;
};
LoadedCandidate load_candidate(const std::string& path);

}  // namespace xferop
