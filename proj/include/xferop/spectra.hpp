#pragma once

#include "xferop/system.hpp"

#include <Eigen/Dense>

#include <string>
#include <vector>

namespace xferop {

struct SpectrumPoint {
    int k = 0;
    Point y;
    std::size_t dim = 0;      // |phi^{-k}(y) \ rho_k^{-1}(0)|
    bool top = false;         // k == n stratum
};

// (U_0, ..., U_n) with U_k open in Y_k = phi^k(Delta_pos,k) and
// U_k ∩ Delta_reg = phi^{-1}(U_{k+1}) ∩ Y_k ∩ Delta_reg.
struct TopologyGenerator {
    std::string seed;  // point and level the neighbourhood was grown from
    std::vector<Region> U;
    bool compatible = false;
    bool open = false;
};

struct KnSpectrum {
    int n = 0;
    Region stratum;  // phi^n(Delta_pos,n)
    std::vector<SpectrumPoint> samples;
};

struct SpectrumDescription {
    int n = 0;
    std::vector<Region> images;  // Y_k, k = 0..n
    std::vector<Region> strata;  // Y_k \ Delta_reg for k < n, Y_n for k = n
    std::vector<SpectrumPoint> samples;
    std::vector<TopologyGenerator> generators;
    // True when rho is continuous on Delta_pos, where the pushout topology is
    // the spectrum topology. Otherwise it is only known to be coarser.
    bool topology_exact = false;
    std::vector<std::string> warnings;
};

// Delta_pos,k = {x in Delta_k : rho_k(x) > 0}
Region positive_domain(const PartialSystem& sys, const Potential& pot, int k);
// Y_k = phi^k(Delta_pos,k)
Region spectrum_image(const PartialSystem& sys, const Potential& pot, int k);

KnSpectrum spectrum_Kn(const PartialSystem& sys, const Potential& pot, int n,
                       const std::vector<Point>& extra_samples = {});
SpectrumDescription spectrum_An(const PartialSystem& sys, const Potential& pot, int n,
                                const std::vector<Point>& extra_samples = {});
std::string spectrum_csv(const PartialSystem& sys, const std::vector<SpectrumPoint>& pts);

// pi_y^k realised on l^2 of the fibre with the orbit-representation basis.
struct PiYK {
    Point y;
    int k = 0;
    std::vector<Point> fibre;     // phi^{-k}(y) \ rho_k^{-1}(0)
    std::vector<double> weights;  // rho_k on the fibre
    std::vector<std::pair<std::string, Eigen::MatrixXd>> samples;  // pi(a t^i t*^i b)
    double sigma_min = 0;  // smallest singular value of the orthonormalised cyclic span
    std::size_t span_rank = 0;
    bool irreducible = false;
};
// Throws OutOfSpectrum when the fibre is empty.
PiYK rep_pi_y_k(const PartialSystem& sys, const Potential& pot, const Point& y, int k, std::uint64_t seed = 0);

struct QuasiOrbitPartition {
    std::vector<Point> samples;
    std::vector<Point> representatives;
    std::vector<std::size_t> class_of;  // index into representatives, per sample
    std::vector<std::string> closures;  // truncated orbit closure per representative
    int depth = 0;
    int resolution = 0;
    bool brute_force_agrees = false;
};
// Throws HypothesisViolated when rho is not continuous on Delta_pos.
QuasiOrbitPartition quasi_orbits(const PartialSystem& sys, const Potential& pot, int depth,
                                 const std::vector<Point>& samples);

}  // namespace xferop
