#include "neckforge/fit.hpp"

#include <Eigen/QR>
#include <cmath>

#include "neckforge/errors.hpp"

namespace neckforge {

PowerFit fit_power_law(const Eigen::ArrayXd& x, const Eigen::ArrayXd& y,
                       double drop_frac) {
  if (x.size() != y.size() || x.size() < 4) {
    throw IllConditioned("power-law fit needs at least 4 samples");
  }
  const Eigen::Index n = x.size();
  const Eigen::Index skip = static_cast<Eigen::Index>(drop_frac * n);
  std::vector<double> lx, ly;
  for (Eigen::Index i = skip; i < n - skip; ++i) {
    if (x[i] > 0.0 && std::abs(y[i]) > 0.0) {
      lx.push_back(std::log(x[i]));
      ly.push_back(std::log(std::abs(y[i])));
    }
  }
  if (lx.size() < 3) throw IllConditioned("power-law fit window too narrow");
  const Eigen::Index m = static_cast<Eigen::Index>(lx.size());
  Eigen::MatrixXd A(m, 2);
  Eigen::VectorXd b(m);
  for (Eigen::Index i = 0; i < m; ++i) {
    A(i, 0) = 1.0;
    A(i, 1) = lx[i];
    b(i) = ly[i];
  }
  const Eigen::Vector2d sol = A.colPivHouseholderQr().solve(b);
  PowerFit out;
  out.coefficient = std::exp(sol(0));
  out.exponent = sol(1);
  out.residual_norm = std::sqrt((A * sol - b).squaredNorm() / m);
  out.window_lo = std::exp(lx.front());
  out.window_hi = std::exp(lx.back());
  if (!(out.window_hi > out.window_lo) || !std::isfinite(out.residual_norm)) {
    throw IllConditioned("degenerate power-law fit window");
  }
  return out;
}

Eigen::VectorXd fit_exponent_basis(const Eigen::ArrayXd& x,
                                   const Eigen::ArrayXd& y,
                                   const std::vector<double>& exponents) {
  const Eigen::Index n = x.size();
  const Eigen::Index k = static_cast<Eigen::Index>(exponents.size());
  if (n < 2 * k) throw IllConditioned("exponent-basis fit window too narrow");
  Eigen::MatrixXd A(n, k);
  // Column scaling keeps the normal equations well conditioned when the
  // exponents are close.
  Eigen::VectorXd colscale(k);
  for (Eigen::Index j = 0; j < k; ++j) {
    for (Eigen::Index i = 0; i < n; ++i) A(i, j) = std::pow(x[i], exponents[j]);
    colscale(j) = A.col(j).norm();
    if (colscale(j) == 0.0) throw IllConditioned("zero basis column");
    A.col(j) /= colscale(j);
  }
  const Eigen::VectorXd sol = A.colPivHouseholderQr().solve(y.matrix());
  return sol.cwiseQuotient(colscale);
}

}  // namespace neckforge
