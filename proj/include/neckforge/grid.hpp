#pragma once

#include <Eigen/Core>

namespace neckforge {

enum class Grading {
  Uniform,
  GeometricTowardLo,
  GeometricTowardHi,
  DoubleGraded,
};

// A 1-D grid with values; the carrier for the BVP solutions and all sweeps.
struct GridFunction {
  Eigen::ArrayXd nodes;   // strictly increasing, no duplicates
  Eigen::ArrayXd values;  // finite
  Grading grading = Grading::Uniform;

  Eigen::Index size() const { return nodes.size(); }
  void validate() const;

  // Piecewise-linear interpolation; clamps to the end values outside the
  // node range.
  double interp(double x) const;

  // 3-point finite differences on the (nonuniform) grid; one-sided at the
  // two boundary nodes for the first derivative.
  GridFunction derivative() const;
  GridFunction second_derivative() const;

  double max_abs() const { return values.abs().maxCoeff(); }
};

Eigen::ArrayXd uniform_nodes(double lo, double hi, Eigen::Index n);

// Spacings grow geometrically away from the refined end(s) with the given
// ratio, starting at h0 and capped when they reach the uniform middle width.
Eigen::ArrayXd graded_nodes_toward_lo(double lo, double hi, Eigen::Index n,
                                      double ratio, double h0);
Eigen::ArrayXd double_graded_nodes(double lo, double hi, Eigen::Index n,
                                   double ratio, double h0);

Eigen::ArrayXd geometric_nodes(double lo, double hi, Eigen::Index n);

}  // namespace neckforge
