#pragma once

#include "xferop/io.hpp"
#include "xferop/rep.hpp"
#include "xferop/system.hpp"

#include <optional>
#include <string>
#include <utility>
#include <vector>

namespace xferop {

enum class Property { TopFree, Minimal, Contracting, Simple, PurelyInfiniteSimple, OneCircuit, PositiveEnergy };
enum class Status { Holds, Fails, Unknown };

std::string property_str(Property p);
std::string status_str(Status s);
// CLI exit status: 0 Holds, 1 Fails, 2 Unknown.
int exit_code(Status s);

// One branch of phi^n restricted to orbits that stay in a given set:
// x in domain means x, phi x, ..., phi^{n-1} x follow the branches of seq.
struct CompositeBranch {
    std::vector<std::size_t> seq;
    IntervalSet domain;
    Affine map;
};
std::vector<CompositeBranch> composite_branches(const PartialSystem& sys, const IntervalSet& within, int n);

// V with pairwise disjoint U_k ⊆ Delta_reg,n_k ∩ V, V not inside the closure
// of their union, and closure(V) ⊆ union of phi^{n_k}(U_k).
struct ContractingTuple {
    Region V;
    std::vector<Region> U;
    std::vector<int> n;
};
struct ContractingCheck {
    bool ok = false;
    std::string violated;  // first failing condition, empty when ok
};
ContractingCheck check_contracting_set(const PartialSystem& sys, const Potential& pot, const ContractingTuple& t);

struct Verdict {
    Property property = Property::TopFree;
    Status status = Status::Unknown;
    int depth = 0;
    std::string reason;
    Json certificate = Json::object();

    // Replayable witnesses.
    std::optional<CompositeBranch> identity_branch;  // TopFree Fails, interval
    std::vector<int> circuit;                        // TopFree Fails / OneCircuit, graph
    std::optional<Region> invariant_set;             // Minimal Fails
    std::optional<Point> x0;                         // Contracting Holds
    std::vector<ContractingTuple> contracting;       // one per neighbourhood scale
    std::vector<Verdict> parts;                      // conjunction inputs
};

Json verdict_json(const PartialSystem& sys, const Verdict& v);

// (positively invariant, negatively invariant)
std::pair<bool, bool> check_invariant(const PartialSystem& sys, const Potential& pot, const Region& U);

Verdict check_top_free(const PartialSystem& sys, const Potential& pot, int depth);
Verdict check_one_circuit(const PartialSystem& sys, const Potential& pot);
Verdict check_minimal(const PartialSystem& sys, const Potential& pot, int depth);
Verdict check_contracting(const PartialSystem& sys, const Potential& pot, int depth);
Verdict verdict_simple(const PartialSystem& sys, const Potential& pot, int depth);
Verdict verdict_purely_infinite(const PartialSystem& sys, const Potential& pot, int depth);

// Re-checks the witness carried by a Holds or Fails verdict.
bool verify_certificate(const PartialSystem& sys, const Potential& pot, const Verdict& v);

// a t^n - a sqrt(rho_n) for a supported on a periodic witness of a failed
// topological-freeness verdict, measured in both representations.
struct AnnihilationWitness {
    int n = 0;
    std::string support;
    double orbit_norm = 0;
    double regular_norm = 0;
};
AnnihilationWitness annihilation_witness(const PartialSystem& sys, const Potential& pot, const Verdict& top_free,
                                      int depth);

}  // namespace xferop
