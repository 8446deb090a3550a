#pragma once

#include "xferop/rep.hpp"
#include "xferop/transfer.hpp"
#include "xferop/verdicts.hpp"

#include <complex>
#include <optional>
#include <variant>

namespace xferop {

// psi is stored like a potential: affine pieces on the interval backend,
// one value per edge on the graph backend.
double psi_at(const PartialSystem& sys, const Potential& psi, const Point& x);
// S_n psi(x) = sum_{k<n} psi(phi^k x); 0 outside Delta_n.
Fn fn_birkhoff(const PartialSystem& sys, const Potential& psi, int n);

using CFn = std::function<std::complex<double>(const Point&)>;
struct CMonomial {
    CFn a;
    int n = 0;
    int m = 0;
    CFn b;
};
CMonomial to_complex(const Monomial& M);
// a -> exp(i lambda S_n psi) a, b -> b exp(-i lambda S_m psi)
CMonomial sigma_action(const PartialSystem& sys, const Potential& psi, const CMonomial& M, std::complex<double> lambda);
// sigma_{i beta}, which stays real.
Monomial sigma_i_beta(const PartialSystem& sys, const Potential& psi, const Monomial& M, double beta);

Verdict check_positive_energy(const PartialSystem& sys, const Potential& psi, int depth);

// Conformal measure on the graph backend: mass of Z(v) per vertex; the mass
// of Z(w) is exp(-beta S psi(w)) times the mass of Z(s(w)).
struct GraphMeasure {
    std::vector<double> vertex_mass;
    double beta = 0;
    Potential psi;
    double cylinder(const PartialSystem& sys, const Word& w) const;
};

// (1 - q) sum_{n <= depth} e^{-n beta} sum_{x in phi^{-n}(y0)} delta_x with
// q = 2 e^{-beta}; integrals of piecewise polynomials are computed by
// iterating the unweighted transfer operator, so no atoms are enumerated.
struct SeriesMeasure {
    Rational y0;
    double beta = 0;
    int depth = 0;
    double q() const { return 2.0 * std::exp(-beta); }
    double tail() const;  // mass beyond depth, exact
};
SeriesMeasure mu_beta(double beta, int depth, const Rational& y0 = Rational(1, 2));

using Measure = std::variant<AtomicMeasure, UlamMeasure, GraphMeasure, SeriesMeasure>;

// Integral of f; Ulam densities are integrated with Gauss-Legendre nodes per
// bin, graph measures over cylinders of the given length.
double integrate(const PartialSystem& sys, const Measure& mu, const Fn& f, int graph_level = 8);
double integrate_pw(const PartialSystem& sys, const SeriesMeasure& mu, const PwPoly& f);
double total_mass(const PartialSystem& sys, const Measure& mu);

struct FamilyResidual {
    double value = 0;
    std::size_t worst = 0;  // index of the worst test function
    std::vector<double> per_function;
    std::optional<double> tail_bound;
};

// max |∫ L(a) dmu - ∫ a e^{beta psi} rho dmu|
FamilyResidual conformal_residual(const PartialSystem& sys, const Potential& pot, const Potential& psi, double beta,
                                  const Measure& mu, const std::vector<TestFunction>& tests);
// max |∫ sum_{phi^{-1}(y)} a dmu - ∫ a e^{beta psi} dmu| over tests supported
// compactly in Delta_reg. Throws SupportViolation otherwise.
FamilyResidual weakly_conformal_residual(const PartialSystem& sys, const Potential& pot, const Potential& psi,
                                         double beta, const Measure& mu, const std::vector<TestFunction>& tests);

struct KMSCandidate {
    double beta = 0;
    std::string kind = "conformal";
    Measure mu;
    bool degenerate = false;  // r(beta) flat across the bracket
    double perron = 0;        // r(beta) at the returned beta
    double eigen_residual = 0;
    int bisection_steps = 0;
};
struct SolveOptions {
    double lo = 0.1;
    double hi = 3.0;
    int bins = 1024;
    double root_tol = 1e-10;
    double eigen_tol = 1e-12;
};
// Perron root of the discretised operator b -> sum_{phi x = y} e^{-beta psi(x)} b(x).
struct PerronResult {
    double r = 0;
    Eigen::VectorXd vec;
    double residual = 0;
    int iterations = 0;
};
PerronResult perron(const PartialSystem& sys, const Potential& psi, double beta, int bins, double tol = 1e-12);
// Throws Error("NoSolution") when r - 1 keeps its sign on the bracket.
KMSCandidate solve_conformal(const PartialSystem& sys, const Potential& pot, const Potential& psi,
                             const SolveOptions& opt);

// Candidate at a fixed beta, without checking r(beta) = 1.
KMSCandidate candidate_at(const PartialSystem& sys, const Potential& pot, const Potential& psi, double beta,
                          int bins, double eigen_tol = 1e-12);

double total_variation_to_uniform(const UlamMeasure& mu);

struct KMSResidual {
    double lhs = 0;  // phi(M1 sigma_{i beta}(M2))
    double rhs = 0;  // phi(M2 M1)
    double value = 0;
    bool certifying = true;
};
// phi_mu(W) = ∫ G(W) dmu with G from the untruncated regular-representation walk.
double phi_mu(const PartialSystem& sys, const Potential& pot, const Measure& mu, const FactorWord& w);
KMSResidual kms_residual(const PartialSystem& sys, const Potential& pot, const Potential& psi, double beta,
                         const Measure& mu, const Monomial& M1, const Monomial& M2);
// |phi(a t^n t*^n b) - mu(L^n(e^{-beta S_n psi} a b))|
double core_kms_check(const PartialSystem& sys, const Potential& pot, const Potential& psi, double beta,
                      const Measure& mu, const Fn& a, const Fn& b, int n);

}  // namespace xferop
