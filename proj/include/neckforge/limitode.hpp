#pragma once

#include <functional>
#include <vector>

#include "neckforge/fit.hpp"
#include "neckforge/grid.hpp"
#include "neckforge/potentials.hpp"

namespace neckforge::limitode {

using potentials::HornPotential;
using potentials::LimitProfile;

// Second-order operator a2 u'' + a1 u' + a0 u on (domain_lo, domain_hi).
// When p and mu are set the operator equals (p u')'/mu + a0 u exactly, and
// the finite-difference solves use that conservation form (the discrete
// system is then self-adjoint in the mu-weighted inner product).
struct OdeOperator {
  std::function<double(double)> a2, a1, a0;
  std::function<double(double)> p, mu;
  double domain_lo = 0.0;
  double domain_hi = 1.0;

  bool has_divergence_form() const { return static_cast<bool>(p); }
  double apply(double x, double u, double du, double d2u) const {
    return a2(x) * d2u + a1(x) * du + a0(x) * u;
  }
};

// L_T = Delta - Id for radial functions of t over the given potential:
// a2 = 1/psi'', a1 = (n-1)/psi', a0 = -1; divergence pair
// p = (psi')^{n-1}, mu = (psi')^{n-1} psi''.
OdeOperator radial_laplacian_op(const potentials::RadialPotential& psi, int n);

// The same operator in the collapsed coordinate s = 1 - t/T on the neck.
OdeOperator horn_neck_op(const HornPotential& horn);

// Collapsed operator L_infinity on (0,1): a2 = 1/Q, a1 = (n-1)/P, a0 = -1;
// divergence pair p = (n+1) P^{n-1} / c^{n+1}, mu = e^{psi_inf}.
OdeOperator assemble_L_infinity(const LimitProfile& profile);

// Endpoint models (the minus model acts in s at the left end, the plus
// model in eta = 1-s at the right end).
OdeOperator endpoint_model_minus(int n);
OdeOperator endpoint_model_plus(int n);

struct FundamentalPair {
  std::function<double(double)> h1, h2;
  std::function<double(double)> dh1, dh2;
  std::function<double(double)> d2h1, d2h2;
  std::function<double(double)> wronskian;  // closed form
};

FundamentalPair fundamental_solutions_plus(int n);
FundamentalPair fundamental_solutions_minus(int n);

// Dirichlet solve of L u = f on the given nodes with u = (u_lo, u_hi) at the
// ends.  Conservation-form discretization when available, else coefficient
// form; either way the matrix is tridiagonal and satisfies the discrete
// maximum principle.
GridFunction solve_dirichlet(const OdeOperator& L, const Eigen::ArrayXd& nodes,
                             double u_lo, double u_hi,
                             const std::function<double(double)>& rhs = nullptr);

struct UhatOptions {
  std::vector<double> eps_sequence = {1e-2, 3e-3, 1e-3, 3e-4};
  Eigen::Index nodes = 4001;
  double grading_ratio = 1.05;
  double grading_h0 = 1e-9;
  double fit_window_lo = 2e-3;
  double fit_window_hi = 5e-2;
};

struct ObstructionPair {
  GridFunction uhat;
  GridFunction vhat;
  double C1_u = 0.0;
  double C2_u = 0.0;
  double C0_v = 0.0;
  double C2_v = 0.0;
  double C1_v_residual = 0.0;  // fitted s^{1/n} coefficient of vhat
  double fit_residual_u = 0.0;
  double fit_residual_v = 0.0;
  double lambda_neumann = 0.0;  // multiple of uhat added to v
  // the uncorrected Dirichlet solution (retains its s^{1/n} term); kept for
  // the transplant negative control
  GridFunction v_dirichlet;
};

// The unique bounded solution of L_infinity u = 0 with u(0+) = 1, u(1-) = 0,
// via Dirichlet approximations on [eps, 1-eps] and endpoint-exponent-aware
// extrapolation.  Throws NonMonotone if a solve loses monotonicity beyond
// discretization noise.
GridFunction solve_uhat(const OdeOperator& L, int n,
                        const UhatOptions& opts = {});

// Expansion coefficients of f against {s^{p_0}, s^{p_1}, ...} on the window,
// plus a binned power fit of the remainder.
struct ExpansionFit {
  Eigen::VectorXd coefficients;
  PowerFit remainder;
};
ExpansionFit extract_expansion(const GridFunction& f,
                               const std::vector<double>& exponents,
                               double window_lo, double window_hi);

// Solve L vhat = uhat with vhat(1-) = 0 and no s^{1/n} term at 0 (Neumann
// normalization vhat := v + lambda uhat).
ObstructionPair solve_vhat(const OdeOperator& L, int n,
                           const UhatOptions& opts = {});

struct DensityPair {
  std::function<double(double)> mu_T;
  std::function<double(double)> mu_inf;
};

DensityPair densities(const HornPotential& horn);
DensityPair densities(const LimitProfile& profile);

// Quadrature of f * g * mu * s^{-weight_exponent} over the grid range, with
// a power-law guard at the left endpoint.
double pairing(const GridFunction& f, const GridFunction& g,
               const std::function<double(double)>& mu,
               double weight_exponent = 0.0);

}  // namespace neckforge::limitode
