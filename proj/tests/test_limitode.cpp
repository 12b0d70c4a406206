#include <cmath>

#include "doctest.h"
#include "neckforge/errors.hpp"
#include "neckforge/limitode.hpp"
#include "neckforge/potentials.hpp"
#include "neckforge/special.hpp"

using namespace neckforge;
using namespace neckforge::limitode;
using namespace neckforge::potentials;

namespace {
NeckParams base_params() {
  NeckParams p;
  p.n = 2;
  p.a = NeckParams::default_a(2);
  p.b = -1e-6;
  p.tau = -10.0;
  return p;
}
}  // namespace

TEST_CASE("cusp operator annihilates (-t)^3 and (-t)^{-1} for n=2") {
  NeckParams p = base_params();
  CuspPotential cusp(p);
  OdeOperator L = radial_laplacian_op(cusp, 2);
  for (double t : {-30.0, -10.0, -2.0}) {
    const double m = -t;
    // u = m^3 in t: u' = -3 m^2, u'' = 6 m
    const double r1 = L.apply(t, m * m * m, -3.0 * m * m, 6.0 * m);
    CHECK(std::abs(r1) <= 1e-11 * m * m * m);
    // u = m^{-1}: u' = m^{-2}, u'' = 2 m^{-3}
    const double r2 = L.apply(t, 1.0 / m, 1.0 / (m * m), 2.0 / (m * m * m));
    CHECK(std::abs(r2) <= 1e-11 / m);
    // constants: L c = -c
    CHECK(L.apply(t, 4.2, 0.0, 0.0) == doctest::Approx(-4.2).epsilon(1e-14));
  }
}

TEST_CASE("L_infinity endpoint coefficient laws and defect slopes") {
  LimitProfile prof = limit_profile(2);
  OdeOperator L = assemble_L_infinity(prof);
  const double d2 = special::d_n(2);

  // s -> 0: a2(s) d / (n s^{1/2}) -> 1
  CHECK(L.a2(1e-7) * d2 / (2.0 * std::sqrt(1e-7)) == doctest::Approx(1.0).epsilon(1e-4));
  // eta -> 0: a2(1-eta) (n+1) / eta^2 -> 1
  CHECK(L.a2(1.0 - 1e-7) * 3.0 / 1e-14 == doctest::Approx(1.0).epsilon(1e-4));

  // defect slopes: (n+1)/n at the left end, n+1 at the right end
  {
    Eigen::ArrayXd s = geometric_nodes(1e-5, 1e-2, 40);
    Eigen::ArrayXd dev(40);
    for (int i = 0; i < 40; ++i) {
      dev[i] = std::abs(L.a2(s[i]) * d2 / (2.0 * std::sqrt(s[i])) - 1.0);
    }
    PowerFit f = fit_power_law(s, dev, 0.0);
    INFO("left slope ", f.exponent);
    CHECK(f.exponent >= 1.4);
  }
  {
    Eigen::ArrayXd eta = geometric_nodes(3e-4, 3e-2, 40);
    Eigen::ArrayXd dev(40);
    for (int i = 0; i < 40; ++i) {
      dev[i] = std::abs(L.a2(1.0 - eta[i]) * 3.0 / (eta[i] * eta[i]) - 1.0);
    }
    PowerFit f = fit_power_law(eta, dev, 0.0);
    INFO("right slope ", f.exponent);
    CHECK(f.exponent >= 2.8);
  }
  // a1 endpoint law on the right: a1(1-eta) ~ (n-1) eta / (n+1)
  CHECK(L.a1(1.0 - 1e-6) / 1e-6 == doctest::Approx(1.0 / 3.0).epsilon(1e-3));
}

TEST_CASE("finite-T neck operator converges to L_infinity") {
  NeckParams p = base_params();
  LimitProfile prof = limit_profile(2);
  OdeOperator Linf = assemble_L_infinity(prof);
  auto sup_dev = [&](double b) {
    NeckParams q = p;
    q.b = b;
    auto horn = solve_horn(q);
    OdeOperator LT = horn_neck_op(*horn);
    double sup = 0.0;
    for (int i = 0; i <= 80; ++i) {
      const double s = 0.1 + 0.8 * i / 80.0;
      sup = std::max(sup, std::abs(LT.a2(s) - Linf.a2(s)));
    }
    return sup;
  };
  const double e1 = sup_dev(-1e-6);
  const double e2 = sup_dev(-5e-7);
  const double predicted = std::pow(2.0, 1.0 / 3.0);
  const double measured = e1 / e2;
  INFO("measured ratio ", measured);
  // within factor 2.5 of the predicted |b|^{1/3} rate
  CHECK(measured / predicted <= 2.5);
  CHECK(predicted / measured <= 2.5);
  // the bound C |b|^{1/3} |tau| itself
  CHECK(e1 <= std::pow(1e-6, 1.0 / 3.0) * 10.0);
}

TEST_CASE("fundamental solutions of the plus model") {
  auto pair = fundamental_solutions_plus(2);
  OdeOperator Lp = endpoint_model_plus(2);
  for (double eta : {0.1, 0.5, 0.9}) {
    CHECK(std::abs(Lp.apply(eta, pair.h1(eta), pair.dh1(eta), pair.d2h1(eta))) <=
          1e-12 * std::abs(pair.h1(eta)));
    CHECK(std::abs(Lp.apply(eta, pair.h2(eta), pair.dh2(eta), pair.d2h2(eta))) <=
          1e-12 * std::abs(pair.h2(eta)));
    const double w = pair.h1(eta) * pair.dh2(eta) - pair.dh1(eta) * pair.h2(eta);
    CHECK(w == doctest::Approx(pair.wronskian(eta)).epsilon(1e-12));
  }
  CHECK(pair.wronskian(0.5) == doctest::Approx(-2.0).epsilon(1e-14));
}

TEST_CASE("fundamental solutions of the minus model (Bessel)") {
  const double lam = special::lambda_n(2);
  CHECK(lam == doctest::Approx(2.23942).epsilon(1e-5));
  auto pair = fundamental_solutions_minus(2);
  OdeOperator Lm = endpoint_model_minus(2);
  for (int i = 0; i <= 30; ++i) {
    const double s = 1e-3 * std::pow(0.9 / 1e-3, i / 30.0);
    const double r1 = Lm.apply(s, pair.h1(s), pair.dh1(s), pair.d2h1(s));
    const double r2 = Lm.apply(s, pair.h2(s), pair.dh2(s), pair.d2h2(s));
    CHECK(std::abs(r1) <= 1e-6 * std::abs(pair.h1(s)));
    CHECK(std::abs(r2) <= 1e-6 * std::abs(pair.h2(s)));
    const double w = pair.h1(s) * pair.dh2(s) - pair.dh1(s) * pair.h2(s);
    CHECK(std::abs(w - pair.wronskian(s)) <= 1e-8 * std::abs(pair.wronskian(s)));
  }
  CHECK(pair.wronskian(1.0) == doctest::Approx(-0.75).epsilon(1e-14));
  // h2 is finite and nonzero at 0+
  const double v1 = pair.h2(1e-8);
  const double v2 = pair.h2(1e-10);
  CHECK(std::abs(v1 - v2) <= 1e-3 * std::abs(v1));
  CHECK(std::abs(v1) > 0.1);
}

TEST_CASE("uhat: monotone, in [0,1], endpoint laws, uniqueness") {
  LimitProfile prof = limit_profile(2);
  OdeOperator L = assemble_L_infinity(prof);
  UhatOptions opts;
  GridFunction uhat = solve_uhat(L, 2, opts);

  for (Eigen::Index i = 1; i < uhat.size(); ++i) {
    CHECK(uhat.values[i] <= uhat.values[i - 1] + 1e-9);
  }
  CHECK(uhat.values.minCoeff() >= -1e-9);
  CHECK(uhat.values.maxCoeff() <= 1.0 + 1e-6);

  // right-endpoint law: uhat(1-eta)/eta^3 approaches a positive constant
  double q_lo = std::numeric_limits<double>::infinity(), q_hi = 0.0;
  for (Eigen::Index i = 0; i < uhat.size(); ++i) {
    const double eta = 1.0 - uhat.nodes[i];
    if (eta >= 2e-3 && eta <= 2e-2) {
      const double q = uhat.values[i] / (eta * eta * eta);
      q_lo = std::min(q_lo, q);
      q_hi = std::max(q_hi, q);
    }
  }
  INFO("uhat(1-eta)/eta^3 in [", q_lo, ", ", q_hi, "]");
  CHECK(q_lo > 0.0);
  CHECK(q_hi / q_lo <= 1.5);

  // uniqueness: a different eps sequence gives the same function
  UhatOptions other;
  other.eps_sequence = {5e-3, 1.5e-3, 5e-4};
  GridFunction uhat2 = solve_uhat(L, 2, other);
  double dev = 0.0;
  for (int i = 0; i <= 50; ++i) {
    const double s = 0.05 + 0.90 * i / 50.0;
    dev = std::max(dev, std::abs(uhat.interp(s) - uhat2.interp(s)));
  }
  INFO("eps-sequence agreement ", dev);
  CHECK(dev <= 2e-4);
}

TEST_CASE("uhat expansion: C1, C2 > 0, remainder slope") {
  LimitProfile prof = limit_profile(2);
  OdeOperator L = assemble_L_infinity(prof);
  ObstructionPair pair = solve_vhat(L, 2);
  INFO("C1_u=", pair.C1_u, " C2_u=", pair.C2_u);
  CHECK(pair.C1_u > 0.0);
  CHECK(pair.C2_u > 0.0);
  ExpansionFit fit = extract_expansion(pair.uhat, {0.0, 0.5, 1.5}, 5e-3, 8e-2);
  INFO("remainder slope ", fit.remainder.exponent);
  CHECK(fit.remainder.exponent >= 1.9);
}

TEST_CASE("extract_expansion control: h2^- series signature") {
  auto pair = fundamental_solutions_minus(2);
  const double lam = special::lambda_n(2);
  Eigen::ArrayXd nodes = geometric_nodes(1e-6, 0.2, 1200);
  GridFunction h2{nodes, Eigen::ArrayXd(nodes.size()), Grading::GeometricTowardLo};
  for (Eigen::Index i = 0; i < nodes.size(); ++i) h2.values[i] = pair.h2(nodes[i]);
  ExpansionFit fit = extract_expansion(h2, {0.0, 0.5, 1.5}, 1e-5, 5e-2);
  const double pref = 0.5 * M_PI / std::sin(M_PI / 3.0);
  const double cA = pref * std::pow(lam / 2.0, -1.0 / 3.0) / special::gamma_fn(2.0 / 3.0);
  const double cB = -pref * std::pow(lam / 2.0, 1.0 / 3.0) / special::gamma_fn(4.0 / 3.0);
  const double cC = cA * lam * lam * 3.0 / 8.0;
  CHECK(fit.coefficients(0) == doctest::Approx(cA).epsilon(1e-6));
  CHECK(fit.coefficients(1) == doctest::Approx(cB).epsilon(1e-4));
  CHECK(fit.coefficients(2) == doctest::Approx(cC).epsilon(1e-2));
}

TEST_CASE("vhat: sign, Neumann coefficient, residual") {
  LimitProfile prof = limit_profile(2);
  OdeOperator L = assemble_L_infinity(prof);
  ObstructionPair pair = solve_vhat(L, 2);

  CHECK(pair.vhat.values.maxCoeff() <= 1e-8);
  CHECK(pair.C0_v < 0.0);
  INFO("C1 residual ", pair.C1_v_residual, " C1_u ", pair.C1_u);
  CHECK(std::abs(pair.C1_v_residual) <= 1e-3 * pair.C1_u);

  // interior residual of L vhat = uhat with independent FD derivatives
  GridFunction d1 = pair.vhat.derivative();
  GridFunction d2 = pair.vhat.second_derivative();
  double worst = 0.0;
  for (Eigen::Index i = 0; i < pair.vhat.size(); ++i) {
    const double s = pair.vhat.nodes[i];
    if (s < 0.05 || s > 0.9) continue;
    const double res = L.apply(s, pair.vhat.values[i], d1.values[i], d2.values[i]) -
                       pair.uhat.values[i];
    worst = std::max(worst, std::abs(res));
  }
  INFO("interior residual ", worst);
  CHECK(worst <= 5e-3);

  // vhat(1-eta) = O(eta^{n+1})
  double q_hi = 0.0;
  for (Eigen::Index i = 0; i < pair.vhat.size(); ++i) {
    const double eta = 1.0 - pair.vhat.nodes[i];
    if (eta >= 2e-3 && eta <= 2e-2) {
      q_hi = std::max(q_hi, std::abs(pair.vhat.values[i]) / (eta * eta * eta));
    }
  }
  CHECK(q_hi < 10.0);
}

TEST_CASE("discrete Liouville property") {
  LimitProfile prof = limit_profile(2);
  OdeOperator L = assemble_L_infinity(prof);
  UhatOptions opts;
  GridFunction uhat = solve_uhat(L, 2, opts);

  // another kernel vector must be a multiple of uhat
  const double eps = 3e-4;
  Eigen::ArrayXd nodes = double_graded_nodes(eps, 1.0 - eps, opts.nodes, 1.05, 1e-9);
  GridFunction w = solve_dirichlet(L, nodes, 0.7, 0.0);
  double worst = 0.0;
  for (int i = 0; i <= 60; ++i) {
    const double s = 0.01 + 0.97 * i / 60.0;
    worst = std::max(worst, std::abs(w.interp(s) - 0.7 * uhat.interp(s) * 
                                     (w.interp(0.3) / (0.7 * uhat.interp(0.3)))));
  }
  CHECK(worst <= 1e-6);

  // the eta^{-1} growth mode is absent from uhat near s = 1
  std::vector<double> eta_basis = {3.0, -1.0};
  Eigen::ArrayXd etas = geometric_nodes(2e-3, 5e-2, 200);
  Eigen::ArrayXd vals(etas.size());
  for (Eigen::Index i = 0; i < etas.size(); ++i) {
    vals[i] = uhat.interp(1.0 - etas[i]);
  }
  Eigen::VectorXd coef = fit_exponent_basis(etas, vals, eta_basis);
  INFO("eta^3 coeff ", coef(0), " eta^-1 coeff ", coef(1));
  CHECK(std::abs(coef(1)) <= 1e-6 * std::abs(coef(0)));
}

TEST_CASE("densities: normalization and two-sided bounds") {
  LimitProfile prof = limit_profile(2);
  DensityPair d_inf = densities(prof);
  CHECK(d_inf.mu_inf(1e-9) == doctest::Approx(1.0).epsilon(1e-6));
  const double want = std::pow(3.0 / prof.c(), 3.0);
  CHECK(1e-18 * d_inf.mu_inf(1.0 - 1e-6) == doctest::Approx(want).epsilon(1e-4));

  for (double Tval : {-50.0, -100.0, -200.0}) {
    NeckParams p = base_params();
    p.b = potentials::solve_b_from_T(2, Tval);
    auto horn = solve_horn(p);
    DensityPair dp = densities(*horn);
    for (int i = 0; i <= 40; ++i) {
      const double eta = 1e-3 * std::pow((1.0 - 1e-3) / 1e-3, i / 40.0);
      const double mu = dp.mu_T(1.0 - eta);
      CHECK(mu >= 0.999);                      // lower bound e(n)
      CHECK(mu * eta * eta * eta <= 2.0);      // upper bound e'(n) eta^{-3}
      CHECK(mu * eta * eta * eta >= 0.2);      // two-sided comparability
    }
  }
}

TEST_CASE("pairing: basics, positivity, convergence, guard") {
  // f = g = 1, mu = 1 on [~0,1] -> 1
  Eigen::ArrayXd nodes = double_graded_nodes(1e-8, 1.0 - 1e-8, 2001, 1.05, 1e-10);
  GridFunction one{nodes, Eigen::ArrayXd::Ones(nodes.size()), Grading::DoubleGraded};
  CHECK(pairing(one, one, [](double) { return 1.0; }) ==
        doctest::Approx(1.0).epsilon(1e-6));

  LimitProfile prof = limit_profile(2);
  OdeOperator L = assemble_L_infinity(prof);
  GridFunction uhat = solve_uhat(L, 2);
  DensityPair dens = densities(prof);
  const double val = pairing(uhat, uhat, dens.mu_inf);
  INFO("int uhat^2 mu_inf = ", val);
  CHECK(val > 0.0);

  // dominated convergence: weight s^{-0.1} stays stable under refinement
  const double v1 = pairing(uhat, uhat, dens.mu_inf, 0.1);
  UhatOptions fine;
  fine.eps_sequence = {1e-2, 3e-3, 1e-3, 1e-4};
  GridFunction uhat_f = solve_uhat(L, 2, fine);
  const double v2 = pairing(uhat_f, uhat_f, dens.mu_inf, 0.1);
  CHECK(std::abs(v1 - v2) <= 2e-3 * std::abs(v1));

  // guard: s^{-1.2} total growth is rejected
  Eigen::ArrayXd gn = geometric_nodes(1e-8, 1.0, 400);
  GridFunction bad{gn, gn.pow(-0.6), Grading::GeometricTowardLo};
  CHECK_THROWS_AS(pairing(bad, bad, [](double) { return 1.0; }), NonIntegrable);
}
