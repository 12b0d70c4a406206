#include "neckforge/grid.hpp"

#include <cmath>
#include <vector>

#include "neckforge/errors.hpp"

namespace neckforge {

void GridFunction::validate() const {
  if (nodes.size() != values.size() || nodes.size() < 2) {
    throw DomainError("grid function needs matching nodes/values, size >= 2");
  }
  for (Eigen::Index i = 1; i < nodes.size(); ++i) {
    if (!(nodes[i] > nodes[i - 1])) {
      throw DomainError("grid nodes must be strictly increasing");
    }
  }
  if (!values.isFinite().all()) {
    throw DomainError("grid values must be finite");
  }
}

double GridFunction::interp(double x) const {
  const Eigen::Index n = nodes.size();
  if (x <= nodes[0]) return values[0];
  if (x >= nodes[n - 1]) return values[n - 1];
  // binary search for the bracketing cell
  Eigen::Index lo = 0, hi = n - 1;
  while (hi - lo > 1) {
    const Eigen::Index mid = (lo + hi) / 2;
    if (nodes[mid] <= x) {
      lo = mid;
    } else {
      hi = mid;
    }
  }
  const double w = (x - nodes[lo]) / (nodes[hi] - nodes[lo]);
  return (1.0 - w) * values[lo] + w * values[hi];
}

GridFunction GridFunction::derivative() const {
  const Eigen::Index n = nodes.size();
  GridFunction out{nodes, Eigen::ArrayXd(n), grading};
  for (Eigen::Index i = 1; i + 1 < n; ++i) {
    const double hm = nodes[i] - nodes[i - 1];
    const double hp = nodes[i + 1] - nodes[i];
    out.values[i] = (-hp / (hm * (hm + hp))) * values[i - 1] +
                    ((hp - hm) / (hm * hp)) * values[i] +
                    (hm / (hp * (hm + hp))) * values[i + 1];
  }
  out.values[0] = (values[1] - values[0]) / (nodes[1] - nodes[0]);
  out.values[n - 1] = (values[n - 1] - values[n - 2]) / (nodes[n - 1] - nodes[n - 2]);
  return out;
}

GridFunction GridFunction::second_derivative() const {
  const Eigen::Index n = nodes.size();
  GridFunction out{nodes, Eigen::ArrayXd(n), grading};
  for (Eigen::Index i = 1; i + 1 < n; ++i) {
    const double hm = nodes[i] - nodes[i - 1];
    const double hp = nodes[i + 1] - nodes[i];
    out.values[i] = 2.0 * (values[i - 1] / (hm * (hm + hp)) -
                           values[i] / (hm * hp) +
                           values[i + 1] / (hp * (hm + hp)));
  }
  out.values[0] = out.values[1];
  out.values[n - 1] = out.values[n - 2];
  return out;
}

Eigen::ArrayXd uniform_nodes(double lo, double hi, Eigen::Index n) {
  return Eigen::ArrayXd::LinSpaced(n, lo, hi);
}

Eigen::ArrayXd geometric_nodes(double lo, double hi, Eigen::Index n) {
  if (!(lo > 0.0 && hi > lo)) throw DomainError("geometric_nodes needs 0 < lo < hi");
  Eigen::ArrayXd out(n);
  const double q = std::log(hi / lo);
  for (Eigen::Index i = 0; i < n; ++i) {
    out[i] = lo * std::exp(q * static_cast<double>(i) / (n - 1));
  }
  out[n - 1] = hi;
  return out;
}

namespace {

// Geometric spacings from each refined end with the given ratio, capped at
// the uniform middle width.  k is chosen as the smallest count for which the
// first spacing reaches h0.
std::vector<double> graded_spacings(double span, Eigen::Index n, double ratio,
                                    double h0, bool both_ends) {
  const Eigen::Index nspace = n - 1;
  const int sides = both_ends ? 2 : 1;
  Eigen::Index k_max = both_ends ? (nspace - 1) / 2 : nspace - 1;
  Eigen::Index k = 0;
  double h_first = span;  // k = 0 means uniform
  for (Eigen::Index kk = 0; kk <= k_max; ++kk) {
    const double R = std::pow(ratio, static_cast<double>(kk));
    const double m = static_cast<double>(nspace - sides * kk);
    const double denom = sides * (R - 1.0) / (ratio - 1.0) + m * R;
    const double h = span / denom;
    k = kk;
    h_first = h;
    if (h <= h0) break;
  }
  std::vector<double> sp;
  sp.reserve(nspace);
  const double R = std::pow(ratio, static_cast<double>(k));
  for (Eigen::Index i = 0; i < k; ++i) {
    sp.push_back(h_first * std::pow(ratio, static_cast<double>(i)));
  }
  const Eigen::Index m = nspace - sides * k;
  for (Eigen::Index i = 0; i < m; ++i) sp.push_back(h_first * R);
  if (both_ends) {
    for (Eigen::Index i = k; i-- > 0;) {
      sp.push_back(h_first * std::pow(ratio, static_cast<double>(i)));
    }
  }
  // rescale so the spacings sum to span exactly
  double total = 0.0;
  for (double h : sp) total += h;
  for (double& h : sp) h *= span / total;
  return sp;
}

Eigen::ArrayXd accumulate(double lo, double hi, const std::vector<double>& sp) {
  Eigen::ArrayXd out(static_cast<Eigen::Index>(sp.size()) + 1);
  out[0] = lo;
  for (size_t i = 0; i < sp.size(); ++i) out[static_cast<Eigen::Index>(i) + 1] = out[static_cast<Eigen::Index>(i)] + sp[i];
  out[out.size() - 1] = hi;
  return out;
}

}  // namespace

Eigen::ArrayXd graded_nodes_toward_lo(double lo, double hi, Eigen::Index n,
                                      double ratio, double h0) {
  if (!(hi > lo) || n < 3) throw DomainError("bad graded grid request");
  return accumulate(lo, hi, graded_spacings(hi - lo, n, ratio, h0, false));
}

Eigen::ArrayXd double_graded_nodes(double lo, double hi, Eigen::Index n,
                                   double ratio, double h0) {
  if (!(hi > lo) || n < 5) throw DomainError("bad graded grid request");
  return accumulate(lo, hi, graded_spacings(hi - lo, n, ratio, h0, true));
}

}  // namespace neckforge
