#pragma once

#include <stdexcept>
#include <string>

namespace neckforge {

struct DomainError : std::domain_error {
  using std::domain_error::domain_error;
};

struct NonIntegrableSingularity : std::domain_error {
  using std::domain_error::domain_error;
};

struct NoConvergence : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct InvalidMatching : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

struct NonMonotone : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct IllConditioned : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct NonIntegrable : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct CutoffOutsideNeck : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

struct ConvexityLoss : std::runtime_error {
  ConvexityLoss(const std::string& what, double where)
      : std::runtime_error(what), location(where) {}
  double location;
};

struct NoContraction : std::runtime_error {
  NoContraction(const std::string& what, double r_prev, double r_last)
      : std::runtime_error(what), residual_prev(r_prev), residual_last(r_last) {}
  double residual_prev;
  double residual_last;
};

struct NoRoot : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct InvalidRegionOrder : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

struct NewtonDiverged : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct DegeneratePoint : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct ConfigError : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

}  // namespace neckforge
