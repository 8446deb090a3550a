#pragma once

#include "xferop/system.hpp"

#include <Eigen/Sparse>

#include <complex>
#include <map>
#include <optional>
#include <string>
#include <vector>

namespace xferop {

using SpMat = Eigen::SparseMatrix<double, Eigen::RowMajor>;

// Truncated orbit: all points of phi^{-k}(seeds), k <= depth.
struct OrbitBasis {
    std::vector<Point> seeds;
    int depth = 0;
    std::vector<Point> points;
    std::vector<int> level;      // smallest k with the point in phi^{-k}(seeds)
    std::vector<bool> interior;  // every preimage with rho > 0 is listed
    std::map<Point, std::size_t> index;

    std::size_t size() const { return points.size(); }
    std::optional<std::size_t> find(const Point& x) const;
};

OrbitBasis orbit_basis(const PartialSystem& sys, const Potential& pot, const std::vector<Point>& seeds, int depth);
std::vector<Point> default_seeds(const PartialSystem& sys);

enum class RepKind { Orbit, Regular };

// Matrix factor letters used for truncation bookkeeping. 'T' is the
// weighted composition operator, 'S' its adjoint.
using Letters = std::string;

struct RepPair {
    PartialSystem sys;
    Potential pot;
    OrbitBasis basis;
    RepKind kind = RepKind::Orbit;
    int window = 0;  // regular: z in [-window, window]
    std::function<double(const Point&)> weight;  // rho used for the entries
    SpMat T;

    // Per basis point: index of phi(x) (-1 when the weight vanishes or x is
    // outside Delta, -2 when phi(x) is not listed), positive-weight preimages,
    // and whether all of them are listed.
    std::vector<long> up;
    std::vector<std::vector<std::size_t>> down;
    std::vector<bool> down_complete;

    std::size_t dim() const;
    std::size_t row(std::size_t point, int z) const;
    std::size_t point_of(std::size_t row) const;
    int z_of(std::size_t row) const;
    Eigen::VectorXd pi_diag(const Fn& a) const;
    SpMat pi(const Fn& a) const;
    SpMat T_star() const { return SpMat(T.transpose()); }
    // Rows on which the truncated product of the word equals the true one:
    // following the row through every factor never leaves the basis.
    std::vector<bool> exact_rows(const Letters& word) const;
    std::string row_str(std::size_t row) const;
};

RepPair orbit_rep(const PartialSystem& sys, const Potential& pot, const std::vector<Point>& seeds, int depth);
RepPair regular_rep(const PartialSystem& sys, const Potential& pot, const std::vector<Point>& seeds, int depth,
                    int window);
// Regular representation whose entries use sqrt(weight) instead of sqrt(rho).
RepPair regular_rep_weighted(const PartialSystem& sys, const Potential& pot, const std::vector<Point>& seeds,
                             int depth, int window, std::function<double(const Point&)> weight);

struct Residual {
    std::string name;
    double value = 0;
    double tol = 1e-10;
    std::size_t interior = 0;
    std::size_t boundary = 0;
    std::string witness;
    bool pass() const { return value <= tol; }
};

// Largest |A - B| entry over the given rows (all columns).
Residual masked_residual(const RepPair& rep, const SpMat& A, const SpMat& B, const std::vector<bool>& rows,
                         const std::string& name);

// a t^n t*^m b
struct Monomial {
    Fn a;
    int n = 0;
    int m = 0;
    Fn b;
    std::string label;
};

Fn fn_const(double c);
Fn fn_product(const Fn& f, const Fn& g);
// x -> f(phi^k x) on Delta_k, 0 elsewhere.
Fn fn_alpha(const PartialSystem& sys, const Fn& f, int k);
// L^k f evaluated by exact fibre enumeration.
Fn fn_transfer(const PartialSystem& sys, const Potential& pot, const Fn& f, int k);
Fn fn_cocycle(const PartialSystem& sys, const Potential& pot, int k);

Residual check_transfer_relation(const RepPair& rep, const Fn& a);
Residual check_commutation(const RepPair& rep, const Fn& a, const Fn& b);

struct QuasiBasis {
    std::vector<Fn> u;
    std::vector<std::string> cover;  // support description of each u_i
    Region K;
    double margin = 0;  // interval backend: ramp half-width
    bool forced = false;
};
// Throws NotRegular when K is not a compact subset of Delta_reg.
QuasiBasis quasi_basis(const PartialSystem& sys, const Potential& pot, const Region& K);
// u = sqrt(1/rho) on a neighbourhood of K with no injectivity or regularity
// checks. Only for negative controls.
QuasiBasis forced_quasi_basis(const PartialSystem& sys, const Potential& pot, const IntervalSet& K);
Residual check_covariance(const RepPair& rep, const Fn& a, const QuasiBasis& qb);

Letters monomial_word(const Monomial& M);
SpMat monomial_matrix(const RepPair& rep, const Monomial& M);
// Closed form of M1*M2 as a single monomial.
Monomial product_closed_form(const PartialSystem& sys, const Potential& pot, const Monomial& M1, const Monomial& M2);
Residual product_check(const RepPair& rep, const Monomial& M1, const Monomial& M2);

struct Term {
    double coeff = 1;
    Monomial mono;
};
struct ExpectationReport {
    std::vector<Term> kept;
    double norm_input = 0;
    double norm_output = 0;
    double pinching_residual = 0;  // | Z-diagonal compression - retained terms |
    bool contractive = false;
};
std::vector<Term> expectation_E(const std::vector<Term>& terms);
ExpectationReport expectation_E_check(const RepPair& regular, const std::vector<Term>& terms, double tol = 1e-8);

struct DiagonalEntry {
    Point x;
    int z;
    double value;
};
// Sum over (x,n) of P M P, i.e. the diagonal.
std::vector<DiagonalEntry> expectation_G(const RepPair& regular, const SpMat& M, const std::vector<bool>& rows);
Residual g_check(const RepPair& regular, const Monomial& M);
Residual check_gauge(const RepPair& regular, std::complex<double> z, const Monomial& M);
Residual rescale_check(const PartialSystem& sys, const Potential& pot, const std::function<double(const Point&)>& omega,
                       const Fn& a, const std::vector<Point>& seeds, int depth, int window);

// Spectral norm; exact SVD for small matrices, power iteration otherwise.
double spectral_norm(const SpMat& M);
double spectral_norm_rows(const SpMat& M, const std::vector<bool>& rows);

// Untruncated action on the regular representation. Factors are applied
// right to left to 1_{(x,0)}.
struct Factor {
    enum Kind { Mul, T, TStar } kind;
    Fn f;
};
using FactorWord = std::vector<Factor>;
FactorWord factors_of(const Monomial& M);
FactorWord concat(const FactorWord& a, const FactorWord& b);
std::map<std::pair<Point, int>, double> apply_word(const PartialSystem& sys, const Potential& pot,
                                                   const FactorWord& w, const Point& x);
// Diagonal coefficient <W 1_{(x,0)}, 1_{(x,0)}>, which is G(W)(x).
double g_value(const PartialSystem& sys, const Potential& pot, const FactorWord& w, const Point& x);

// Coordinate list export (row, col, value).
std::string coo_csv(const SpMat& M);

}  // namespace xferop
