#pragma once

#include <Eigen/Core>
#include <vector>

namespace neckforge {

// Result of a log-log power-law fit y ~ coefficient * x^exponent.
struct PowerFit {
  double exponent = 0.0;
  double coefficient = 0.0;
  double residual_norm = 0.0;  // RMS of log-space residuals
  double window_lo = 0.0;
  double window_hi = 0.0;
};

// Least squares in log-log coordinates on the interior window (a fraction of
// samples is dropped at each end to avoid endpoint contamination).
PowerFit fit_power_law(const Eigen::ArrayXd& x, const Eigen::ArrayXd& y,
                       double drop_frac = 0.1);

// Coefficients of f(x) ~ sum_i c_i x^{p_i} by linear least squares.
Eigen::VectorXd fit_exponent_basis(const Eigen::ArrayXd& x,
                                   const Eigen::ArrayXd& y,
                                   const std::vector<double>& exponents);

}  // namespace neckforge
