#pragma once

#include <string>
#include <vector>

#include "neckforge/fit.hpp"
#include "neckforge/grid.hpp"
#include "neckforge/potentials.hpp"

namespace neckforge::asymptotics {

using potentials::HornPotential;
using potentials::NeckParams;

struct ScalingCheck {
  std::string name;
  double observed_min = 0.0;
  double observed_max = 0.0;
  std::string predicted;     // "bounded" or "exponent <target>"
  double factor = 3.0;       // allowed max/min band for bounded checks
  double residual_frac = 0.0;
  bool pass = false;

  double ratio() const {
    return observed_min > 0.0 ? observed_max / observed_min
                              : std::numeric_limits<double>::infinity();
  }
};

// sup over t in [2 tau, tau] of |t^k psi_T^(k) - (-1)^k (n+1)(k-1)!|,
// normalized by |b| |tau|^{n+1}; one check per k, stable over the b grid.
std::vector<ScalingCheck> check_interior_derivatives(
    const NeckParams& base, int k_max, const std::vector<double>& b_grid);

// Two-term decomposition of psi_T(eta T) - psi_cusp(eta T) into the
// |b|^{1/(n+1)}|tau| and eta^{n+1} parts, plus their individual scalings.
std::vector<ScalingCheck> check_eta_expansion(const NeckParams& base,
                                              const std::vector<double>& eta_grid,
                                              const std::vector<double>& b_grid);

struct TipErrorReport {
  GridFunction error;            // E(t) on the orange window
  double fitted_coefficient;     // leading coefficient against (|b|^{1/n} psi_C)^2
  double sup_error;
  double predicted_sup;          // |b|^{2/n} T0^{2(n+1)/n}
};

TipErrorReport horn_tip_error(const HornPotential& horn, const Eigen::ArrayXd& t_grid);

// E evaluated at common values of x = |b|^{1/n} (t-T)^{(n+1)/n} across a b
// ladder; the profiles coincide b-independently.
ScalingCheck check_tip_analyticity(const NeckParams& base,
                                   const std::vector<double>& b_grid,
                                   const Eigen::ArrayXd& x_grid);

// Drift of the solve_horn tip from the exact bandT partner, in units of |tau|.
ScalingCheck check_bT_drift(int n, const std::vector<double>& T_grid, double tau);

}  // namespace neckforge::asymptotics
