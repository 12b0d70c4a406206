#include "neckforge/potentials.hpp"

#include <cmath>
#include <mutex>

#include "neckforge/errors.hpp"
#include "neckforge/special.hpp"

namespace neckforge::potentials {

double NeckParams::default_a(int n) { return -(2.0 / n) * std::log(static_cast<double>(n)); }

void NeckParams::check_region_order() const {
  if (!(T < T + 2.0 * T0 && T + 2.0 * T0 < 2.0 * tau && 2.0 * tau < tau && tau < 0.0)) {
    throw InvalidRegionOrder("region ordering T < T+2T0 < 2tau < tau < 0 violated");
  }
}

Jet psi_cusp(const NeckParams& params, double t, int order) {
  if (!(t < 0.0)) throw DomainError("psi_cusp requires t < 0");
  if (order > kMaxOrder) throw DomainError("max derivative order is 6");
  const double np1 = params.n + 1.0;
  Jet jet;
  jet.order = order;
  jet.d[0] = -np1 * std::log(-t) + params.n * std::log(np1) - params.a;
  double fact = 1.0;  // (k-1)!
  double tk = t;
  for (int k = 1; k <= order; ++k) {
    if (k > 1) fact *= (k - 1);
    jet.d[static_cast<size_t>(k)] = ((k % 2 == 0) ? 1.0 : -1.0) * np1 * fact / tk;
    tk *= t;
  }
  return jet;
}

Jet psi_calabi(const NeckParams& params, double t, int order) {
  if (!(t > params.T)) throw DomainError("psi_calabi requires t > T");
  if (order > kMaxOrder) throw DomainError("max derivative order is 6");
  const double n = params.n;
  const double p = (n + 1.0) / n;
  const double y = t - params.T;
  Jet jet;
  jet.order = order;
  double coeff = n / (n + 1.0);
  double expo = p;
  jet.d[0] = coeff * std::pow(y, expo);
  for (int k = 1; k <= order; ++k) {
    coeff *= expo;
    expo -= 1.0;
    jet.d[static_cast<size_t>(k)] = coeff * std::pow(y, expo);
  }
  return jet;
}

// ---------------------------------------------------------------------------
// HornProfile

HornProfile::HornProfile(int n, double tol) : n_(n), nu_(1.0 / (n + 1.0)), tol_(tol) {
  if (n < 1) throw DomainError("horn profile requires n >= 1");
  c_ = special::c_n(n, tol);
}

double HornProfile::slope(double y) const {
  if (!(y > 0.0)) throw DomainError("profile slope requires y > 0");
  // (e^y - 1)^(-nu) = e^{-nu y} (1 - e^{-y})^{-nu}, stable for large y
  return std::exp(-nu_ * y) * std::pow(-std::expm1(-y), -nu_);
}

double HornProfile::tail(double y) const {
  // int_y^inf (e^s-1)^{-nu} ds = sum_k (nu)_k/k! e^{-(nu+k)y}/(nu+k)
  const double u = std::exp(-y);
  double poch = 1.0;  // (nu)_k / k!
  double uk = 1.0;
  double sum = 0.0;
  for (int k = 0; k < 200; ++k) {
    const double term = poch * uk * std::exp(-nu_ * y) / (nu_ + k);
    sum += term;
    if (term <= 1e-17 * sum) break;
    poch *= (nu_ + k) / (k + 1.0);
    uk *= u;
  }
  return sum;
}

double HornProfile::value(double y) const {
  if (!(y >= 0.0)) throw DomainError("profile argument must be >= 0");
  if (y == 0.0) return 0.0;
  if (y >= 1.0) return c_ - tail(y);
  special::QuadratureSpec spec;
  const double nu = nu_;
  spec.integrand = [nu](double s) {
    return std::exp(-nu * s) * std::pow(-std::expm1(-s), -nu);
  };
  spec.lo = 0.0;
  spec.hi = y;
  spec.singularity_exponent_lo = -nu;
  spec.tol = tol_;
  return special::integrate_singular(spec);
}

double HornProfile::inverse(double g) const {
  if (!(g > 0.0 && g < c_)) throw DomainError("profile inverse requires g in (0, c(n))");
  if (c_ - g <= 1e-14 * c_) {
    throw DomainError("profile inverse requested at the blowup edge");
  }
  // seed from the two endpoint expansions
  double y;
  if (g >= value(1.0)) {
    y = -std::log(nu_ * (c_ - g)) / nu_;
  } else {
    y = std::pow(n_ * g / (n_ + 1.0), (n_ + 1.0) / n_);
  }
  double lo = 0.0, hi = std::numeric_limits<double>::infinity();
  for (int it = 0; it < 80; ++it) {
    const double f = value(y) - g;
    if (f > 0.0) {
      hi = y;
    } else {
      lo = y;
    }
    const double step = f / slope(y);
    double ynew = y - step;
    if (!(ynew > lo && ynew < hi)) {
      ynew = std::isinf(hi) ? 2.0 * y : 0.5 * (lo + hi);
    }
    if (std::abs(ynew - y) <= 1e-15 * std::max(1.0, std::abs(y))) {
      return ynew;
    }
    y = ynew;
  }
  throw NoConvergence("profile inversion did not converge");
}

std::shared_ptr<const HornProfile> horn_profile(int n) {
  static std::mutex mu;
  static std::map<int, std::shared_ptr<const HornProfile>> cache;
  std::lock_guard<std::mutex> lock(mu);
  auto it = cache.find(n);
  if (it != cache.end()) return it->second;
  auto made = std::make_shared<const HornProfile>(n);
  cache.emplace(n, made);
  return made;
}

// ---------------------------------------------------------------------------
// HornPotential

HornPotential::HornPotential(const NeckParams& params)
    : params_(params), profile_(horn_profile(params.n)) {
  if (!(params.b < 0.0)) throw InvalidMatching("horn requires b < 0");
  if (!(params.tau < 0.0)) throw InvalidMatching("horn requires tau < 0");
  const double nu = 1.0 / (params.n + 1.0);
  lambda_b_ = std::pow(params.n + 1.0, nu) * std::pow(-params.b, nu);
  psi_tip_ = std::log(-params.b) - params.a;
  const double psi_match = psi_cusp(params, params.tau, 0)[0];
  const double y_tau = psi_match - psi_tip_;
  if (!(y_tau > 0.0)) {
    throw InvalidMatching("matching value psi_cusp(tau) must exceed the tip value");
  }
  T_ = params.tau - profile_->value(y_tau) / lambda_b_;
  params_.T = T_;
  // Evaluation stays to the left of the blowup edge G(y) -> c(n).
  t_sup_ = T_ + profile_->c_total() * (1.0 - 1e-12) / lambda_b_;
}

double HornPotential::profile_y(double t) const {
  if (!(t > T_ && t < t_sup_)) {
    throw DomainError("horn evaluation point outside (T, t_sup)");
  }
  return profile_->inverse(lambda_b_ * (t - T_));
}

namespace {

// psi^{(k)}, k >= 2, as a polynomial in E = e^{psi+a} and P = psi'.
// d/dt E^l P^m = l E^l P^{m+1} + m E^{l+1} P^{m-n}, seeded by psi'' = E P^{1-n}.
using TermMap = std::map<std::pair<int, int>, double>;

const std::vector<TermMap>& derivative_terms(int n) {
  static std::mutex mu;
  static std::map<int, std::vector<TermMap>> cache;
  std::lock_guard<std::mutex> lock(mu);
  auto it = cache.find(n);
  if (it != cache.end()) return it->second;
  std::vector<TermMap> terms;
  TermMap cur;
  cur[{1, 1 - n}] = 1.0;
  terms.push_back(cur);  // k = 2
  for (int k = 3; k <= kMaxOrder; ++k) {
    TermMap next;
    for (const auto& [key, coeff] : cur) {
      const auto [l, m] = key;
      next[{l, m + 1}] += coeff * l;
      if (m != 0) next[{l + 1, m - n}] += coeff * m;
    }
    terms.push_back(next);
    cur = next;
  }
  cache.emplace(n, terms);
  return cache.at(n);
}

}  // namespace

Jet HornPotential::eval(double t, int order) const {
  if (order > kMaxOrder) throw DomainError("max derivative order is 6");
  const double y = profile_y(t);
  Jet jet;
  jet.order = order;
  jet.d[0] = psi_tip_ + y;
  if (order == 0) return jet;
  // psi' = lambda_b (e^y - 1)^{1/(n+1)}, written stably in y
  const double nu = 1.0 / (params_.n + 1.0);
  const double P = lambda_b_ * std::exp(nu * y) * std::pow(-std::expm1(-y), nu);
  jet.d[1] = P;
  if (order == 1) return jet;
  const double E = -params_.b * std::exp(y);
  const auto& terms = derivative_terms(params_.n);
  for (int k = 2; k <= order; ++k) {
    double val = 0.0;
    for (const auto& [key, coeff] : terms[static_cast<size_t>(k - 2)]) {
      const auto [l, m] = key;
      val += coeff * std::pow(E, l) * std::pow(P, m);
    }
    jet.d[static_cast<size_t>(k)] = val;
  }
  return jet;
}

std::shared_ptr<HornPotential> solve_horn(const NeckParams& params) {
  return std::make_shared<HornPotential>(params);
}

double horn_derivative(const HornPotential& horn, double t, int k) {
  if (k < 1) throw DomainError("horn_derivative requires k >= 1");
  return horn.eval(t, k)[k];
}

double solve_b_from_T(int n, double T) {
  if (!(T < 0.0)) throw DomainError("solve_b_from_T requires T < 0");
  const double c = horn_profile(n)->c_total();
  const double nu = 1.0 / (n + 1.0);
  return -std::pow(c / (std::pow(n + 1.0, nu) * (-T)), n + 1.0);
}

double solve_T_from_b(int n, double b) {
  if (!(b < 0.0)) throw DomainError("solve_T_from_b requires b < 0");
  const double c = horn_profile(n)->c_total();
  const double nu = 1.0 / (n + 1.0);
  return -c / (std::pow(n + 1.0, nu) * std::pow(-b, nu));
}

// ---------------------------------------------------------------------------
// LimitProfile

LimitProfile::LimitProfile(int n) : n_(n), profile_(horn_profile(n)) {
  c_ = profile_->c_total();
  d_ = std::pow(n / (n + 1.0), 1.0 / n) * std::pow(c_, (n + 1.0) / n);
}

double LimitProfile::psi_inf(double s) const {
  if (!(s > 0.0 && s < 1.0)) throw DomainError("psi_inf requires s in (0,1)");
  return profile_->inverse(c_ * s);
}

double LimitProfile::P(double s) const {
  const double y = psi_inf(s);
  const double nu = 1.0 / (n_ + 1.0);
  return c_ * std::exp(nu * y) * std::pow(-std::expm1(-y), nu);
}

double LimitProfile::Q(double s) const {
  const double y = psi_inf(s);
  const double q = (n_ - 1.0) / (n_ + 1.0);
  // c^2/(n+1) e^y (e^y - 1)^{-q}, stable for large y
  return c_ * c_ / (n_ + 1.0) * std::exp(y * (1.0 - q)) * std::pow(-std::expm1(-y), -q);
}

LimitProfile limit_profile(int n) {
  if (n < 2) throw DomainError("limit_profile requires n >= 2");
  return LimitProfile(n);
}

}  // namespace neckforge::potentials
