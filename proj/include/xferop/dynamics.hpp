#pragma once

#include "xferop/system.hpp"

#include <string>
#include <vector>

namespace xferop {

// Delta_n = phi^{-n}(X); Delta_0 = X.
Region iterate_domain(const PartialSystem& sys, int n);

struct PreimageEntry {
    Point x;
    Rational weight;  // rho_n(x)
};

// phi^{-n}(y) with exact cocycle weights. drop_zero removes points with
// rho_n(x) = 0. Throws DepthExceeded when n > depth_bound.
std::vector<PreimageEntry> preimages(const PartialSystem& sys, const Potential& pot, const Point& y, int n,
                                     bool drop_zero, int depth_bound = 32);

// rho_n(x) = prod_{i<n} rho(phi^i x). Throws OutOfDomain if x is not in Delta_n.
Rational cocycle(const PartialSystem& sys, const Potential& pot, int n, const Point& x);

enum class IrregularReason { ZeroPotential, RhoDiscontinuous, NotLocallyInjective };
std::string reason_str(IrregularReason r);

struct IrregularPoint {
    Point x;
    std::vector<IrregularReason> reasons;
};

struct RegionReport {
    Region delta;
    Region delta_pos;
    Region delta_reg;
    std::vector<IrregularPoint> irregular;  // candidates in Delta that fail regularity
};

// Delta_pos and Delta_reg. Validates (sys, pot) first; throws NotValidated.
RegionReport regular_set(const PartialSystem& sys, const Potential& pot);
// Same computation without the validation gate (used by validate itself and
// by callers that already hold a valid handle).
RegionReport regular_set_unchecked(const PartialSystem& sys, const Potential& pot);
Region positive_set(const PartialSystem& sys, const Potential& pot);

struct PoweredSystem {
    PartialSystem sys;
    Potential pot;
};
// The system of phi^n on Delta_n with potential rho_n.
PoweredSystem power(const PartialSystem& sys, const Potential& pot, int n);

struct EssentialDomain {
    Region set;
    bool stabilized = false;
    int depth_reached = 0;
};
// Intersection over n <= depth of Delta_n ∩ phi^n(Delta_n).
EssentialDomain essential_domain(const PartialSystem& sys, int depth);

// Points x in Delta_n ∩ Delta_reg-orbit: x, phi x, ..., phi^{n-1} x all in reg.
Region regular_domain_n(const PartialSystem& sys, const Region& reg, int n);

}  // namespace xferop
