#include <cmath>
#include <limits>
#include <random>

#include "doctest.h"
#include "neckforge/errors.hpp"
#include "neckforge/special.hpp"

using namespace neckforge;
using namespace neckforge::special;

namespace {
constexpr double kInf = std::numeric_limits<double>::infinity();

// Closed-form oracle: substituting u = e^{-s} turns the c(n) integrand into
// a Beta integral, giving pi/sin(pi/(n+1)).
double c_closed(int n) { return M_PI / std::sin(M_PI / (n + 1.0)); }
}  // namespace

TEST_CASE("integrate_singular: elementary oracles") {
  QuadratureSpec spec;
  spec.integrand = [](double s) { return std::pow(s, -1.0 / 3.0); };
  spec.lo = 0.0;
  spec.hi = 1.0;
  spec.singularity_exponent_lo = -1.0 / 3.0;
  spec.tol = 1e-12;
  CHECK(integrate_singular(spec) == doctest::Approx(1.5).epsilon(1e-11));

  spec.integrand = [](double s) { return std::exp(-s); };
  spec.hi = kInf;
  spec.singularity_exponent_lo = 0.0;
  CHECK(integrate_singular(spec) == doctest::Approx(1.0).epsilon(1e-11));

  spec.integrand = [](double s) { return std::pow(std::expm1(s), -1.0 / 3.0); };
  spec.singularity_exponent_lo = -1.0 / 3.0;
  const double want = 2.0 * M_PI / std::sqrt(3.0);
  CHECK(integrate_singular(spec) == doctest::Approx(want).epsilon(1e-11));
}

TEST_CASE("integrate_singular: error paths") {
  QuadratureSpec spec;
  spec.integrand = [](double s) { return 1.0 / s; };
  spec.lo = 0.0;
  spec.hi = 1.0;
  spec.singularity_exponent_lo = -1.0;
  CHECK_THROWS_AS(integrate_singular(spec), NonIntegrableSingularity);

  spec.integrand = [](double x) { return std::sin(1e8 * x * x); };
  spec.singularity_exponent_lo = 0.0;
  spec.tol = 1e-14;
  CHECK_THROWS_AS(integrate_singular(spec), NoConvergence);
}

TEST_CASE("integrate_singular: affine reparametrization invariance") {
  std::mt19937_64 rng(20240811);
  std::uniform_real_distribution<double> shift(-3.0, 3.0);
  std::uniform_real_distribution<double> scale(0.2, 5.0);
  for (int trial = 0; trial < 12; ++trial) {
    const double a = shift(rng);
    const double b = scale(rng);
    QuadratureSpec direct;
    direct.integrand = [](double x) { return std::pow(x, -0.25) * std::cos(x); };
    direct.lo = 0.0;
    direct.hi = 2.0;
    direct.singularity_exponent_lo = -0.25;
    direct.tol = 1e-12;
    // x = a + b u maps [(0-a)/b, (2-a)/b] back onto [0,2].
    QuadratureSpec mapped;
    mapped.integrand = [a, b](double u) {
      const double x = a + b * u;
      return b * std::pow(x, -0.25) * std::cos(x);
    };
    mapped.lo = (0.0 - a) / b;
    mapped.hi = (2.0 - a) / b;
    mapped.singularity_exponent_lo = -0.25;
    mapped.tol = 1e-12;
    const double v1 = integrate_singular(direct);
    const double v2 = integrate_singular(mapped);
    CHECK(std::abs(v1 - v2) <= 1e-11 * std::abs(v1));
  }
}

TEST_CASE("c_n against the Beta-substitution closed form") {
  for (int n = 1; n <= 6; ++n) {
    const double got = c_n(n);
    CHECK(std::abs(got - c_closed(n)) <= 1e-10 * got);
  }
  CHECK(c_n(2) == doctest::Approx(3.6275987284684357).epsilon(1e-10));
  CHECK(c_n(1) == doctest::Approx(M_PI).epsilon(1e-10));
  CHECK(c_n(3) == doctest::Approx(M_PI * std::sqrt(2.0)).epsilon(1e-10));
}

TEST_CASE("c_1_const solves its defining identity") {
  CHECK(c_1_const(2) == doctest::Approx(3.0 * std::log(2.0)).epsilon(1e-12));
  CHECK(c_1_const(1) == doctest::Approx(2.0 * std::log(2.0)).epsilon(1e-12));
  for (int n = 1; n <= 4; ++n) {
    const double c1 = c_1_const(n);
    const double np1 = n + 1.0;
    const double integral = integrate_smooth(
        [np1](double s) { return std::exp(-s / np1); }, -c1, 0.0, 1e-13);
    CHECK(integral == doctest::Approx(np1).epsilon(1e-12));
  }
}

TEST_CASE("d_n compositions") {
  const double d2 = std::sqrt(2.0 / 3.0) * std::pow(c_closed(2), 1.5);
  CHECK(d_n(2) == doctest::Approx(d2).epsilon(1e-10));
  CHECK(d_n(1) == doctest::Approx(0.5 * M_PI * M_PI).epsilon(1e-10));
  // Determinism under tol refinement.
  CHECK(std::abs(d_n(3, 1e-10) - d_n(3, 1e-11)) <= 1e-10 * d_n(3));
}

TEST_CASE("bessel_i small-argument law") {
  const BesselOrder nu{1.0 / 3.0};
  for (double x : {1e-6, 1e-4, 1e-3}) {
    const double lead = std::pow(0.5 * x, nu.nu) / gamma_fn(1.0 + nu.nu);
    CHECK(bessel_i(nu, x) / lead == doctest::Approx(1.0).epsilon(1e-6));
  }
}

TEST_CASE("bessel Wronskian at 20 log-spaced points") {
  const BesselOrder nu{1.0 / 3.0};
  for (int i = 0; i < 20; ++i) {
    const double y =
        1e-3 * std::pow(30.0 / 1e-3, i / 19.0);
    const double w = bessel_i(nu, y) * bessel_k_prime(nu, y) -
                     bessel_i_prime(nu, y) * bessel_k(nu, y);
    CHECK(std::abs(w * y + 1.0) <= 1e-8);
  }
  // The anchor value y = 1.
  const double w1 = bessel_i(nu, 1.0) * bessel_k_prime(nu, 1.0) -
                    bessel_i_prime(nu, 1.0) * bessel_k(nu, 1.0);
  CHECK(w1 == doctest::Approx(-1.0).epsilon(1e-10));
}

TEST_CASE("bessel_i satisfies the modified Bessel ODE (FD oracle)") {
  const BesselOrder nu{1.0 / 3.0};
  for (double y : {0.5, 1.0, 3.0, 7.0, 15.0}) {
    const double h = std::min(0.02, y / 150.0);
    auto f = [&](double x) { return bessel_i(nu, x); };
    // 5-point central stencils, O(h^4).
    const double d1 =
        (-f(y + 2 * h) + 8 * f(y + h) - 8 * f(y - h) + f(y - 2 * h)) / (12 * h);
    const double d2 = (-f(y + 2 * h) + 16 * f(y + h) - 30 * f(y) +
                       16 * f(y - h) - f(y - 2 * h)) /
                      (12 * h * h);
    const double res = y * y * d2 + y * d1 - (nu.nu * nu.nu + y * y) * f(y);
    const double scale = (nu.nu * nu.nu + y * y) * f(y);
    CHECK(std::abs(res) <= 1e-8 * std::abs(scale));
  }
}

TEST_CASE("bessel domain errors") {
  CHECK_THROWS_AS(bessel_i({0.5}, 0.0), DomainError);
  CHECK_THROWS_AS(bessel_k({0.5}, -1.0), DomainError);
}

TEST_CASE("lambda_n composition") {
  const double d2 = d_n(2);
  CHECK(lambda_n(2) == doctest::Approx(std::sqrt(8.0 * d2 / 9.0)).epsilon(1e-12));
}
