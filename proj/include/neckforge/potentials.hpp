#pragma once

#include <array>
#include <limits>
#include <map>
#include <memory>

#include "neckforge/grid.hpp"

namespace neckforge::potentials {

// Full parameter tuple of one gluing instance.  Only (n, a, b, tau) feed the
// horn solver; the rest belong to the schedule and weighted norms.
struct NeckParams {
  int n = 2;
  double a = 0.0;          // normalization constant of the radial KE equation
  double b = -1e-6;        // < 0
  double T = 0.0;          // < 0, horn tip; filled by solve_horn / schedule
  double tau = -10.0;      // < 0, cusp matching point
  double T0 = 0.0;         // > 0, orange width |T|^alpha
  double alpha = 0.05;     // in (0,1)
  double delta0 = 1.0;     // decay-rate stand-in, > 0
  double sigma_abs = 0.0;  // |sigma|, informational (schedule works in log)
  double delta = 0.01;     // weight exponent, in (0, 0.2)
  double a_bold = 0.15;    // budget exponent, in (alpha, 1/5)

  // a = -(2/n) log n makes the tip Ricci defect vanish for n = 2.
  static double default_a(int n);
  void check_region_order() const;  // T < T+2T0 < 2tau < tau < 0
};

// Values (psi, psi', ..., psi^(order)) at one point.
struct Jet {
  int order = 0;
  std::array<double, 7> d{};
  double operator[](int k) const { return d[static_cast<size_t>(k)]; }
};

inline constexpr int kMaxOrder = 6;

enum class PotentialKind { Cusp, Calabi, Horn, Glued };

class RadialPotential {
 public:
  virtual ~RadialPotential() = default;
  virtual PotentialKind kind() const = 0;
  // Open domain (lo, hi) of valid evaluation points.
  virtual double domain_lo() const = 0;
  virtual double domain_hi() const = 0;
  virtual Jet eval(double t, int order) const = 0;

  double psi(double t) const { return eval(t, 0)[0]; }
  double dpsi(double t) const { return eval(t, 1)[1]; }
  double d2psi(double t) const { return eval(t, 2)[2]; }
};

Jet psi_cusp(const NeckParams& params, double t, int order);
Jet psi_calabi(const NeckParams& params, double t, int order);

class CuspPotential : public RadialPotential {
 public:
  explicit CuspPotential(const NeckParams& params) : params_(params) {}
  PotentialKind kind() const override { return PotentialKind::Cusp; }
  double domain_lo() const override { return -std::numeric_limits<double>::infinity(); }
  double domain_hi() const override { return 0.0; }
  Jet eval(double t, int order) const override { return psi_cusp(params_, t, order); }

 private:
  NeckParams params_;
};

class CalabiPotential : public RadialPotential {
 public:
  explicit CalabiPotential(const NeckParams& params) : params_(params) {}
  PotentialKind kind() const override { return PotentialKind::Calabi; }
  double domain_lo() const override { return params_.T; }
  double domain_hi() const override { return std::numeric_limits<double>::infinity(); }
  Jet eval(double t, int order) const override { return psi_calabi(params_, t, order); }

 private:
  NeckParams params_;
};

// The universal profile G(y) = int_0^y (e^s - 1)^(-1/(n+1)) ds together with
// its inverse.  G is increasing from 0 to c(n); everything about the horn
// family reduces to it.
class HornProfile {
 public:
  explicit HornProfile(int n, double tol = 1e-12);

  int n() const { return n_; }
  double c_total() const { return c_; }
  double value(double y) const;      // G(y)
  double slope(double y) const;      // G'(y) = (e^y - 1)^(-1/(n+1))
  double inverse(double g) const;    // y with G(y) = g, g in (0, c(n))

 private:
  double tail(double y) const;  // c(n) - G(y) as a convergent series, y >= 1
  int n_;
  double nu_;
  double c_;
  double tol_;
};

std::shared_ptr<const HornProfile> horn_profile(int n);

// Horn solution psi_T of the radial KE equation with e^{psi_T(T)+a} + b = 0
// and psi_T(tau) = psi_cusp(tau).  Evaluation is exact inversion of the
// monotone profile; derivatives use the closed recursion, never finite
// differences.
class HornPotential : public RadialPotential {
 public:
  HornPotential(const NeckParams& params);

  PotentialKind kind() const override { return PotentialKind::Horn; }
  double domain_lo() const override { return T_; }
  double domain_hi() const override { return t_sup_; }
  Jet eval(double t, int order) const override;

  double tip() const { return T_; }
  double tau() const { return params_.tau; }
  double psi_at_tip() const { return psi_tip_; }  // limit value log|b| - a
  const NeckParams& params() const { return params_; }

  // y(t) = psi_T(t) - psi_T(T), the profile coordinate.
  double profile_y(double t) const;

 private:
  NeckParams params_;
  std::shared_ptr<const HornProfile> profile_;
  double lambda_b_;  // (n+1)^{1/(n+1)} |b|^{1/(n+1)}
  double psi_tip_;
  double T_;
  double t_sup_;
};

std::shared_ptr<HornPotential> solve_horn(const NeckParams& params);

double horn_derivative(const HornPotential& horn, double t, int k);

// Exact bandT identity c(n) = (n+1)^{1/(n+1)} |b|^{1/(n+1)} |T|.
double solve_b_from_T(int n, double T);
double solve_T_from_b(int n, double b);

// Collapsed neck profile psi_inf(s) = G^{-1}(c(n) s) with the derived
// coefficient functions of the limit operator.
class LimitProfile {
 public:
  explicit LimitProfile(int n);

  int n() const { return n_; }
  double c() const { return c_; }
  double d() const { return d_; }
  double psi_inf(double s) const;
  double P(double s) const;  // lim |T| psi_T'((1-s)T) = d psi_inf / ds
  double Q(double s) const;  // lim T^2 psi_T''((1-s)T)

 private:
  int n_;
  double c_;
  double d_;
  std::shared_ptr<const HornProfile> profile_;
};

LimitProfile limit_profile(int n);

}  // namespace neckforge::potentials
