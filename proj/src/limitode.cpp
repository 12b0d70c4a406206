#include "neckforge/limitode.hpp"

#include <algorithm>
#include <cmath>

#include "neckforge/errors.hpp"
#include "neckforge/special.hpp"

namespace neckforge::limitode {

using potentials::Jet;

OdeOperator radial_laplacian_op(const potentials::RadialPotential& psi, int n) {
  OdeOperator op;
  op.domain_lo = psi.domain_lo();
  op.domain_hi = psi.domain_hi();
  op.a2 = [&psi](double t) {
    const Jet j = psi.eval(t, 2);
    if (!(j[1] > 0.0 && j[2] > 0.0)) {
      throw ConvexityLoss("potential not strictly convex", t);
    }
    return 1.0 / j[2];
  };
  op.a1 = [&psi, n](double t) { return (n - 1.0) / psi.eval(t, 1)[1]; };
  op.a0 = [](double) { return -1.0; };
  op.p = [&psi, n](double t) { return std::pow(psi.eval(t, 1)[1], n - 1); };
  op.mu = [&psi, n](double t) {
    const Jet j = psi.eval(t, 2);
    return std::pow(j[1], n - 1) * j[2];
  };
  return op;
}

OdeOperator horn_neck_op(const HornPotential& horn) {
  const int n = horn.params().n;
  const double T = horn.tip();
  const double b = horn.params().b;
  OdeOperator op;
  op.domain_lo = 0.0;
  op.domain_hi = 1.0 - horn.domain_hi() / T;
  auto jet_at = [&horn, T](double s, int order) {
    return horn.eval((1.0 - s) * T, order);
  };
  op.a2 = [jet_at, T](double s) { return 1.0 / (T * T * jet_at(s, 2)[2]); };
  op.a1 = [jet_at, T, n](double s) { return (n - 1.0) / (-T * jet_at(s, 1)[1]); };
  op.a0 = [](double) { return -1.0; };
  op.p = [jet_at, T, b, n](double s) {
    return std::pow(jet_at(s, 1)[1], n - 1) / (-b * T * T);
  };
  op.mu = [&horn, T](double s) {
    return std::exp(horn.profile_y((1.0 - s) * T));
  };
  return op;
}

OdeOperator assemble_L_infinity(const LimitProfile& profile) {
  const int n = profile.n();
  const double c = profile.c();
  OdeOperator op;
  op.domain_lo = 0.0;
  op.domain_hi = 1.0;
  op.a2 = [profile](double s) { return 1.0 / profile.Q(s); };
  op.a1 = [profile, n](double s) { return (n - 1.0) / profile.P(s); };
  op.a0 = [](double) { return -1.0; };
  const double cpow = std::pow(c, n + 1.0);
  op.p = [profile, n, cpow](double s) {
    return (n + 1.0) * std::pow(profile.P(s), n - 1) / cpow;
  };
  op.mu = [profile](double s) { return std::exp(profile.psi_inf(s)); };
  return op;
}

OdeOperator endpoint_model_minus(int n) {
  const double d = special::d_n(n);
  OdeOperator op;
  op.domain_lo = 0.0;
  op.domain_hi = 1.0;
  op.a2 = [n](double s) { return n * std::pow(s, (n - 1.0) / n); };
  op.a1 = [n](double s) { return (n - 1.0) * std::pow(s, -1.0 / n); };
  op.a0 = [d](double) { return -d; };
  return op;
}

OdeOperator endpoint_model_plus(int n) {
  OdeOperator op;
  op.domain_lo = 0.0;
  op.domain_hi = 1.0;
  op.a2 = [](double eta) { return eta * eta; };
  op.a1 = [n](double eta) { return -(n - 1.0) * eta; };
  op.a0 = [n](double) { return -(n + 1.0); };
  return op;
}

FundamentalPair fundamental_solutions_plus(int n) {
  FundamentalPair pair;
  pair.h1 = [n](double eta) { return std::pow(eta, n + 1.0); };
  pair.dh1 = [n](double eta) { return (n + 1.0) * std::pow(eta, static_cast<double>(n)); };
  pair.d2h1 = [n](double eta) { return (n + 1.0) * n * std::pow(eta, n - 1.0); };
  pair.h2 = [](double eta) { return 1.0 / eta; };
  pair.dh2 = [](double eta) { return -1.0 / (eta * eta); };
  pair.d2h2 = [](double eta) { return 2.0 / (eta * eta * eta); };
  pair.wronskian = [n](double eta) { return -(n + 2.0) * std::pow(eta, n - 1.0); };
  return pair;
}

FundamentalPair fundamental_solutions_minus(int n) {
  const double lam = special::lambda_n(n);
  const double nu = 1.0 / (n + 1.0);
  const double beta = 1.0 / (2.0 * n);
  const double gamma = (n + 1.0) / (2.0 * n);
  auto make = [=](bool first) {
    return [=](double s) {
      const double z = lam * std::pow(s, gamma);
      const double f = first ? special::bessel_i({nu}, z) : special::bessel_k({nu}, z);
      return std::pow(s, beta) * f;
    };
  };
  auto make_d = [=](bool first) {
    return [=](double s) {
      const double z = lam * std::pow(s, gamma);
      const double f = first ? special::bessel_i({nu}, z) : special::bessel_k({nu}, z);
      const double df =
          first ? special::bessel_i_prime({nu}, z) : special::bessel_k_prime({nu}, z);
      return beta * std::pow(s, beta - 1.0) * f +
             std::pow(s, beta) * df * lam * gamma * std::pow(s, gamma - 1.0);
    };
  };
  // second derivative via the modified Bessel equation
  // f''(z) = (1 + nu^2/z^2) f(z) - f'(z)/z
  auto make_d2 = [=](bool first) {
    return [=](double s) {
      const double z = lam * std::pow(s, gamma);
      const double f = first ? special::bessel_i({nu}, z) : special::bessel_k({nu}, z);
      const double df =
          first ? special::bessel_i_prime({nu}, z) : special::bessel_k_prime({nu}, z);
      const double d2f = (1.0 + nu * nu / (z * z)) * f - df / z;
      const double zp = lam * gamma * std::pow(s, gamma - 1.0);   // dz/ds
      const double zpp = lam * gamma * (gamma - 1.0) * std::pow(s, gamma - 2.0);
      return beta * (beta - 1.0) * std::pow(s, beta - 2.0) * f +
             2.0 * beta * std::pow(s, beta - 1.0) * df * zp +
             std::pow(s, beta) * (d2f * zp * zp + df * zpp);
    };
  };
  FundamentalPair pair;
  pair.h1 = make(true);
  pair.h2 = make(false);
  pair.dh1 = make_d(true);
  pair.dh2 = make_d(false);
  pair.d2h1 = make_d2(true);
  pair.d2h2 = make_d2(false);
  pair.wronskian = [n](double s) {
    return -(n + 1.0) / (2.0 * n) * std::pow(s, (1.0 - n) / static_cast<double>(n));
  };
  return pair;
}

GridFunction solve_dirichlet(const OdeOperator& L, const Eigen::ArrayXd& nodes,
                             double u_lo, double u_hi,
                             const std::function<double(double)>& rhs) {
  const Eigen::Index N = nodes.size();
  if (N < 3) throw DomainError("Dirichlet solve needs at least 3 nodes");
  Eigen::ArrayXd lower(N), diag(N), upper(N), f(N);
  lower[0] = 0.0;
  diag[0] = 1.0;
  upper[0] = 0.0;
  f[0] = u_lo;
  diag[N - 1] = 1.0;
  lower[N - 1] = 0.0;
  upper[N - 1] = 0.0;
  f[N - 1] = u_hi;
  const bool div = L.has_divergence_form();
  for (Eigen::Index i = 1; i + 1 < N; ++i) {
    const double s = nodes[i];
    const double hm = nodes[i] - nodes[i - 1];
    const double hp = nodes[i + 1] - nodes[i];
    const double hbar = 0.5 * (nodes[i + 1] - nodes[i - 1]);
    double alo, ahi;
    if (div) {
      const double mu = L.mu(s);
      alo = L.p(s - 0.5 * hm) / (hm * hbar * mu);
      ahi = L.p(s + 0.5 * hp) / (hp * hbar * mu);
    } else {
      const double a2 = L.a2(s);
      if (!(a2 > 0.0)) throw ConvexityLoss("operator lost ellipticity", s);
      const double a1 = L.a1(s);
      alo = 2.0 * a2 / (hm * (hm + hp)) - a1 * hp / (hm * (hm + hp));
      ahi = 2.0 * a2 / (hp * (hm + hp)) + a1 * hm / (hp * (hm + hp));
    }
    lower[i] = alo;
    upper[i] = ahi;
    diag[i] = -(alo + ahi) + L.a0(s);
    f[i] = rhs ? rhs(s) : 0.0;
  }
  // Thomas sweep
  Eigen::ArrayXd cp(N), dp(N);
  cp[0] = upper[0] / diag[0];
  dp[0] = f[0] / diag[0];
  for (Eigen::Index i = 1; i < N; ++i) {
    const double m = diag[i] - lower[i] * cp[i - 1];
    cp[i] = (i + 1 < N) ? upper[i] / m : 0.0;
    dp[i] = (f[i] - lower[i] * dp[i - 1]) / m;
  }
  GridFunction out;
  out.nodes = nodes;
  out.values.resize(N);
  out.values[N - 1] = dp[N - 1];
  for (Eigen::Index i = N - 2; i >= 0; --i) {
    out.values[i] = dp[i] - cp[i] * out.values[i + 1];
  }
  out.grading = Grading::DoubleGraded;
  out.validate();
  return out;
}

namespace {

Eigen::ArrayXd window_slice(const GridFunction& f, double lo, double hi,
                            Eigen::ArrayXd* vals) {
  std::vector<double> xs, ys;
  for (Eigen::Index i = 0; i < f.size(); ++i) {
    if (f.nodes[i] >= lo && f.nodes[i] <= hi) {
      xs.push_back(f.nodes[i]);
      ys.push_back(f.values[i]);
    }
  }
  Eigen::ArrayXd x = Eigen::Map<Eigen::ArrayXd>(xs.data(), static_cast<Eigen::Index>(xs.size()));
  *vals = Eigen::Map<Eigen::ArrayXd>(ys.data(), static_cast<Eigen::Index>(ys.size()));
  return x;
}

// Binned RMS power fit; robust against sign changes of the remainder.
PowerFit binned_power_fit(const Eigen::ArrayXd& x, const Eigen::ArrayXd& r) {
  const int nbins = 6;
  const double lo = x.minCoeff(), hi = x.maxCoeff();
  const double lr = std::log(hi / lo);
  std::vector<double> cx, cy;
  for (int bin = 0; bin < nbins; ++bin) {
    const double blo = lo * std::exp(lr * bin / nbins);
    const double bhi = lo * std::exp(lr * (bin + 1) / nbins);
    double sum = 0.0;
    int cnt = 0;
    for (Eigen::Index i = 0; i < x.size(); ++i) {
      if (x[i] >= blo && x[i] <= bhi) {
        sum += r[i] * r[i];
        ++cnt;
      }
    }
    if (cnt > 0) {
      cx.push_back(std::sqrt(blo * bhi));
      cy.push_back(std::sqrt(sum / cnt));
    }
  }
  if (cx.size() < 3) throw IllConditioned("remainder fit window too narrow");
  Eigen::ArrayXd bx = Eigen::Map<Eigen::ArrayXd>(cx.data(), static_cast<Eigen::Index>(cx.size()));
  Eigen::ArrayXd by = Eigen::Map<Eigen::ArrayXd>(cy.data(), static_cast<Eigen::Index>(cy.size()));
  return fit_power_law(bx, by, 0.0);
}

}  // namespace

ExpansionFit extract_expansion(const GridFunction& f,
                               const std::vector<double>& exponents,
                               double window_lo, double window_hi) {
  Eigen::ArrayXd vals;
  const Eigen::ArrayXd x = window_slice(f, window_lo, window_hi, &vals);
  if (x.size() < 2 * static_cast<Eigen::Index>(exponents.size()) + 2) {
    throw IllConditioned("expansion fit window too narrow");
  }
  ExpansionFit out;
  out.coefficients = fit_exponent_basis(x, vals, exponents);
  Eigen::ArrayXd resid = vals;
  for (size_t j = 0; j < exponents.size(); ++j) {
    resid -= out.coefficients(static_cast<Eigen::Index>(j)) * x.pow(exponents[j]);
  }
  out.remainder = binned_power_fit(x, resid);
  return out;
}

namespace {

struct UhatLevel {
  double eps;
  GridFunction u;
  double const_term;
};

UhatLevel solve_uhat_level(const OdeOperator& L, int n, double eps,
                           const UhatOptions& opts) {
  const Eigen::ArrayXd nodes =
      double_graded_nodes(eps, 1.0 - eps, opts.nodes, opts.grading_ratio,
                          opts.grading_h0);
  GridFunction u = solve_dirichlet(L, nodes, 1.0, 0.0);
  // discrete maximum principle: monotone nonincreasing, values in [0,1]
  for (Eigen::Index i = 1; i < u.size(); ++i) {
    if (u.values[i] > u.values[i - 1] + 1e-10) {
      throw NonMonotone("Dirichlet approximation lost monotonicity");
    }
  }
  if (u.values.minCoeff() < -1e-10 || u.values.maxCoeff() > 1.0 + 1e-10) {
    throw NonMonotone("Dirichlet approximation left [0,1]");
  }
  const double wlo = std::max(3.0 * eps, opts.fit_window_lo);
  const double whi = std::max(opts.fit_window_hi, 20.0 * wlo);
  const std::vector<double> expo = {0.0, 1.0 / n, (n + 1.0) / n};
  ExpansionFit fit = extract_expansion(u, expo, wlo, whi);
  return {eps, std::move(u), fit.coefficients(0)};
}

}  // namespace

GridFunction solve_uhat(const OdeOperator& L, int n, const UhatOptions& opts) {
  if (opts.eps_sequence.empty()) throw DomainError("eps sequence empty");
  std::vector<double> eps = opts.eps_sequence;
  std::sort(eps.begin(), eps.end(), std::greater<double>());
  // The Dirichlet error at level eps is (1/uhat(eps) - 1) * uhat plus an
  // O(eps^{n+1}) transverse part, so dividing by the fitted constant term
  // removes it to the known leading orders.
  UhatLevel finest = solve_uhat_level(L, n, eps.back(), opts);
  GridFunction out = finest.u;
  out.values /= finest.const_term;
  return out;
}

ObstructionPair solve_vhat(const OdeOperator& L, int n, const UhatOptions& opts) {
  std::vector<double> eps = opts.eps_sequence;
  std::sort(eps.begin(), eps.end(), std::greater<double>());
  const double eps_min = eps.back();

  ObstructionPair pair;
  pair.uhat = solve_uhat(L, n, opts);
  const GridFunction& uhat = pair.uhat;

  const double wlo = std::max(3.0 * eps_min, opts.fit_window_lo);
  const double whi = std::max(opts.fit_window_hi, 20.0 * wlo);
  const std::vector<double> expo = {0.0, 1.0 / n, (n + 1.0) / n};
  ExpansionFit ufit = extract_expansion(uhat, expo, wlo, whi);
  pair.C1_u = -ufit.coefficients(1);
  pair.C2_u = ufit.coefficients(2);
  pair.fit_residual_u = ufit.remainder.coefficient;

  auto rhs = [&uhat](double s) { return uhat.interp(s); };
  pair.v_dirichlet = solve_dirichlet(L, uhat.nodes, -1.0, 0.0, rhs);
  ExpansionFit vfit = extract_expansion(pair.v_dirichlet, expo, wlo, whi);

  // Neumann correction: cancel the fitted s^{1/n} coefficient
  pair.lambda_neumann = -vfit.coefficients(1) / ufit.coefficients(1);
  pair.vhat = pair.v_dirichlet;
  pair.vhat.values += pair.lambda_neumann * uhat.values;

  ExpansionFit vhfit = extract_expansion(pair.vhat, expo, wlo, whi);
  pair.C0_v = vhfit.coefficients(0);
  pair.C1_v_residual = vhfit.coefficients(1);
  pair.C2_v = vhfit.coefficients(2);
  pair.fit_residual_v = vhfit.remainder.coefficient;
  return pair;
}

DensityPair densities(const HornPotential& horn) {
  const double T = horn.tip();
  DensityPair out;
  out.mu_T = [&horn, T](double s) {
    return std::exp(horn.profile_y((1.0 - s) * T));
  };
  potentials::LimitProfile prof(horn.params().n);
  out.mu_inf = [prof](double s) { return std::exp(prof.psi_inf(s)); };
  return out;
}

DensityPair densities(const LimitProfile& profile) {
  DensityPair out;
  out.mu_inf = [profile](double s) { return std::exp(profile.psi_inf(s)); };
  out.mu_T = out.mu_inf;
  return out;
}

double pairing(const GridFunction& f, const GridFunction& g,
               const std::function<double(double)>& mu,
               double weight_exponent) {
  f.validate();
  const Eigen::Index N = f.size();
  Eigen::ArrayXd integrand(N);
  for (Eigen::Index i = 0; i < N; ++i) {
    const double s = f.nodes[i];
    integrand[i] = f.values[i] * g.interp(s) * mu(s) * std::pow(s, -weight_exponent);
  }
  // power-law guard at the left endpoint: the integrand must not grow
  // faster than s^{-0.9}
  {
    const double lo = f.nodes[0];
    Eigen::ArrayXd vals;
    GridFunction probe{f.nodes, integrand, f.grading};
    Eigen::ArrayXd x = window_slice(probe, lo, lo * 32.0, &vals);
    if (x.size() >= 6 && vals.abs().maxCoeff() > 0.0) {
      try {
        const PowerFit pf = fit_power_law(x, vals, 0.0);
        if (pf.exponent < -0.9 && pf.coefficient * std::pow(lo, pf.exponent) >
                                      1e-12 * integrand.abs().maxCoeff()) {
          throw NonIntegrable("pairing integrand grows faster than s^-0.9");
        }
      } catch (const IllConditioned&) {
        // flat or signed integrand near the endpoint; nothing to guard
      }
    }
  }
  double total = 0.0;
  for (Eigen::Index i = 0; i + 1 < N; ++i) {
    total += 0.5 * (integrand[i] + integrand[i + 1]) * (f.nodes[i + 1] - f.nodes[i]);
  }
  return total;
}

}  // namespace neckforge::limitode
