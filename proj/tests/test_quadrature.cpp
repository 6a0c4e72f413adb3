#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <cmath>
#include <complex>
#include <vector>

#include "doctest.h"
#include "resodecay/quadrature.hpp"
#include "resodecay/simulate.hpp"

using resodecay::AnalyticIntegrand;
using resodecay::Complex;
using resodecay::IntegralResult;
using resodecay::OscStrategy;
using resodecay::PoleInfo;
using resodecay::QuadratureSpec;

namespace {

bool rel_close(Complex a, Complex b, double tol) {
  return std::abs(a - b) <= tol * (std::abs(b) + 1e-300);
}

bool rel_close(double a, double b, double tol) {
  return std::abs(a - b) <= tol * (std::abs(b) + 1e-300);
}

// Full-line Lorentzian density with unit area, E_R = 2, Gamma = 0.2.
AnalyticIntegrand lorentzian_density() {
  const Complex z_r(2.0, -0.1);
  const Complex z_c = std::conj(z_r);
  const double n = 0.2 / (2.0 * M_PI);
  AnalyticIntegrand rho;
  rho.eval = [=](Complex z) { return n / ((z - z_r) * (z - z_c)); };
  rho.poles = {{z_r, n / (z_r - z_c), 1}, {z_c, n / (z_c - z_r), 1}};
  rho.decay_order = 2;
  return rho;
}

}  // namespace

TEST_CASE("finite interval matches the arctangent oracle") {
  QuadratureSpec spec;
  spec.rel_tol = 1e-12;
  const auto f = [](double x) { return Complex(1.0 / (1.0 + x * x), 0.0); };
  const IntegralResult r = resodecay::integrate_interval(f, -10.0, 10.0, spec);
  CHECK(rel_close(r.value.real(), 2.9422553486074691837, 1e-12));
  CHECK(r.value.imag() == doctest::Approx(0.0).epsilon(1e-14));
  CHECK(r.subdivisions > 0);
}

TEST_CASE("full line integral of the Cauchy density is pi") {
  QuadratureSpec spec;
  const auto f = [](double x) { return Complex(1.0 / (1.0 + x * x), 0.0); };
  const IntegralResult r = resodecay::integrate_real_line(f, 2, spec);
  CHECK(rel_close(r.value.real(), M_PI, 1e-9));
  CHECK(r.tail_bound < 1e-9);
}

TEST_CASE("half line integrals match arctangent differences") {
  QuadratureSpec spec;
  const auto f = [](double x) { return Complex(1.0 / (1.0 + x * x), 0.0); };
  const IntegralResult from0 = resodecay::integrate_half_line(f, 0.0, 2, spec);
  const IntegralResult from1 = resodecay::integrate_half_line(f, 1.0, 2, spec);
  CHECK(rel_close(from0.value.real(), M_PI / 2.0, 1e-9));
  CHECK(rel_close(from1.value.real(), M_PI / 4.0, 1e-9));
}

TEST_CASE("a sharp peak is found without a seed knot") {
  QuadratureSpec spec;
  spec.rel_tol = 1e-11;
  const double g = 1e-3;
  const auto f = [=](double x) { return Complex(g / (x * x + g * g), 0.0); };
  const IntegralResult r = resodecay::integrate_interval(f, -1.0, 1.0, spec);
  CHECK(rel_close(r.value.real(), 2.0 * std::atan(1.0 / g), 1e-10));
}

TEST_CASE("seed knots do not change the value") {
  QuadratureSpec spec;
  spec.rel_tol = 1e-12;
  const auto f = [](double x) { return Complex(std::exp(-x * x), 0.0); };
  const IntegralResult plain = resodecay::integrate_interval(f, -3.0, 3.0, spec);
  const IntegralResult seeded =
      resodecay::integrate_interval(f, -3.0, 3.0, spec, {0.3, 1.7, -2.9});
  CHECK(rel_close(seeded.value, plain.value, 1e-12));
}

TEST_CASE("non-finite integrand values are reported, not averaged over") {
  QuadratureSpec spec;
  const auto f = [](double x) {
    return x > 0.5 ? Complex(std::nan(""), 0.0) : Complex(1.0, 0.0);
  };
  CHECK_THROWS_AS(resodecay::integrate_interval(f, 0.0, 1.0, spec),
                  resodecay::NonFiniteIntegrand);
}

TEST_CASE("linearity over random rational integrands") {
  QuadratureSpec spec;
  spec.rel_tol = 1e-11;
  resodecay::SplitMix64 rng(7);
  for (int trial = 0; trial < 10; ++trial) {
    const double p1 = -4.0 + 8.0 * rng.next_double();
    const double p2 = -4.0 + 8.0 * rng.next_double();
    const double w1 = 0.1 + rng.next_double();
    const double w2 = 0.1 + rng.next_double();
    const double alpha = -2.0 + 4.0 * rng.next_double();
    const double beta = -2.0 + 4.0 * rng.next_double();
    const auto f = [=](double x) { return Complex(w1 / ((x - p1) * (x - p1) + w1 * w1), 0.0); };
    const auto g = [=](double x) { return Complex(w2 / ((x - p2) * (x - p2) + w2 * w2), 0.0); };
    const auto combo = [=](double x) { return alpha * f(x) + beta * g(x); };
    const Complex lhs = resodecay::integrate_interval(combo, -5.0, 5.0, spec).value;
    const Complex rhs = alpha * resodecay::integrate_interval(f, -5.0, 5.0, spec).value +
                        beta * resodecay::integrate_interval(g, -5.0, 5.0, spec).value;
    CHECK(std::abs(lhs - rhs) <= 1e-10 * (1.0 + std::abs(rhs)));
  }
}

TEST_CASE("interval additivity at an arbitrary split point") {
  QuadratureSpec spec;
  spec.rel_tol = 1e-12;
  resodecay::SplitMix64 rng(11);
  const auto f = [](double x) { return Complex(std::cos(3.0 * x) / (1.0 + x * x), 0.0); };
  for (int trial = 0; trial < 5; ++trial) {
    const double b = -2.0 + 4.0 * rng.next_double();
    const Complex whole = resodecay::integrate_interval(f, -2.5, 2.5, spec).value;
    const Complex parts = resodecay::integrate_interval(f, -2.5, b, spec).value +
                          resodecay::integrate_interval(f, b, 2.5, spec).value;
    CHECK(rel_close(parts, whole, 1e-11));
  }
}

TEST_CASE("Cauchy kernel reproduces a lower-class function below the axis") {
  QuadratureSpec spec;
  const auto g = [](double e) { return 1.0 / ((Complex(e, 0.0) - Complex(0.0, 1.0)) *
                                              (Complex(e, 0.0) - Complex(0.0, 1.0))); };
  const Complex inside =
      resodecay::cauchy_kernel_integral(g, 2, Complex(1.0, -1.5), spec).value;
  CHECK(rel_close(inside, Complex(-0.099881093935790725, 0.095124851367419738), 1e-8));
  const Complex outside =
      resodecay::cauchy_kernel_integral(g, 2, Complex(2.0, 3.0), spec).value;
  CHECK(std::abs(outside) <= 1e-8);
}

TEST_CASE("Cauchy kernel flips sign for an upper-class function") {
  QuadratureSpec spec;
  const auto f = [](double e) { return 1.0 / ((Complex(e, 0.0) + Complex(0.0, 1.0)) *
                                              (Complex(e, 0.0) + Complex(0.0, 1.0))); };
  // f is analytic above the axis; there the kernel returns -f(z).
  const Complex above =
      resodecay::cauchy_kernel_integral(f, 2, Complex(2.0, 3.0), spec).value;
  CHECK(rel_close(above, Complex(0.03, 0.04), 1e-8));
  const Complex below =
      resodecay::cauchy_kernel_integral(f, 2, Complex(1.0, -1.5), spec).value;
  CHECK(std::abs(below) <= 1e-8);
}

TEST_CASE("Cauchy kernel refuses points pinned to the axis") {
  QuadratureSpec spec;
  const auto g = [](double e) { return 1.0 / (Complex(e, 0.0) - Complex(0.0, 1.0)); };
  CHECK_THROWS_AS(
      resodecay::cauchy_kernel_integral(g, 1, Complex(1.0, 1e-12), spec),
      resodecay::PoleOnAxis);
}

TEST_CASE("Fourier transform of the Lorentzian density has the closed form") {
  QuadratureSpec spec;
  const AnalyticIntegrand rho = lorentzian_density();

  const Complex at0 = resodecay::fourier_real_line(rho, 0.0, spec).value;
  CHECK(rel_close(at0, Complex(1.0, 0.0), 1e-9));

  const Complex at3 = resodecay::fourier_real_line(rho, 3.0, spec).value;
  CHECK(rel_close(at3, Complex(0.71131164330777915657, 0.20699609220662400819), 1e-9));

  // The density is real, so A(-t) = conj(A(t)).
  const Complex atm3 = resodecay::fourier_real_line(rho, -3.0, spec).value;
  CHECK(rel_close(atm3, std::conj(at3), 1e-9));
}

TEST_CASE("direct and rotated strategies agree on a half-line transform") {
  // Four simple poles, |f| ~ |E|^-4, so the direct truncation error is tiny.
  const std::vector<Complex> poles = {{1.0, -0.2}, {1.0, 0.3}, {3.0, -1.0}, {3.0, 2.0}};
  AnalyticIntegrand f;
  f.eval = [=](Complex z) {
    Complex denom(1.0, 0.0);
    for (const Complex& p : poles) denom *= (z - p);
    return 1.0 / denom;
  };
  for (const Complex& p : poles) {
    Complex res(1.0, 0.0);
    for (const Complex& q : poles)
      if (q != p) res /= (p - q);
    f.poles.push_back({p, res, 1});
  }
  f.decay_order = 4;

  QuadratureSpec direct;
  direct.strategy = OscStrategy::Direct;
  direct.trunc_radius = 3000.0;
  QuadratureSpec rotated;
  rotated.strategy = OscStrategy::RotatedContour;

  const Complex a = resodecay::oscillatory_fourier_integral(f, 2.0, 0.0, direct).value;
  const Complex b = resodecay::oscillatory_fourier_integral(f, 2.0, 0.0, rotated).value;
  CHECK(rel_close(a, b, 1e-7));
}

TEST_CASE("long-time transform of a cut density decays like the edge over t") {
  // Truncated Lorentzian on [0, inf), E_R = 2, Gamma = 0.2: after the
  // resonance term dies the edge contribution rho(0) / t is all that's left.
  const double n = 0.032345352541463015095;
  const double rho0 = 0.0080661727036067369314;
  const Complex z_r(2.0, -0.1);
  const Complex z_c = std::conj(z_r);
  AnalyticIntegrand rho;
  rho.eval = [=](Complex z) { return n / ((z - z_r) * (z - z_c)); };
  rho.poles = {{z_r, n / (z_r - z_c), 1}, {z_c, n / (z_c - z_r), 1}};
  rho.decay_order = 2;

  QuadratureSpec spec;
  const double t = 3000.0;
  const Complex a = resodecay::oscillatory_fourier_integral(rho, t, 0.0, spec).value;
  CHECK(std::abs(a) * t / rho0 == doctest::Approx(1.0).epsilon(0.1));
}

TEST_CASE("rotation refuses a pole pinned at the cut") {
  const Complex p(0.0, -0.1);
  AnalyticIntegrand f;
  f.eval = [=](Complex z) { return 1.0 / ((z - p) * (z - std::conj(p))); };
  f.poles = {{p, 1.0 / (p - std::conj(p)), 1}, {std::conj(p), 1.0 / (std::conj(p) - p), 1}};
  f.decay_order = 2;
  QuadratureSpec spec;
  spec.strategy = OscStrategy::RotatedContour;
  CHECK_THROWS_AS(resodecay::oscillatory_fourier_integral(f, 10.0, 0.0, spec),
                  resodecay::StrategyUnavailable);
}

TEST_CASE("an overstated decay order trips the tail bound") {
  QuadratureSpec spec;
  spec.trunc_radius = 1e6;
  const auto f = [](double x) { return Complex(1.0 / (1.0 + std::abs(x)), 0.0); };
  CHECK_THROWS_AS(resodecay::integrate_real_line(f, 2, spec),
                  resodecay::TailBoundExceeded);
}

TEST_CASE("tighter tolerances give a smaller reported error") {
  const auto f = [](double x) { return Complex(std::sin(5.0 * x) / (1.0 + x * x), 1.0 / (4.0 + x * x)); };
  QuadratureSpec loose;
  loose.rel_tol = 1e-5;
  loose.abs_tol = 1e-6;
  QuadratureSpec tight;
  tight.rel_tol = 1e-12;
  tight.abs_tol = 1e-13;
  const IntegralResult a = resodecay::integrate_interval(f, -6.0, 6.0, loose);
  const IntegralResult b = resodecay::integrate_interval(f, -6.0, 6.0, tight);
  CHECK(b.error <= a.error);
  CHECK(std::abs(a.value - b.value) <= a.error + b.error + 1e-15);
}

TEST_CASE("spec validation rejects nonsense tolerances") {
  QuadratureSpec spec;
  spec.rel_tol = -1.0;
  CHECK_THROWS_AS(spec.validate(), resodecay::BadParams);
  QuadratureSpec spec2;
  spec2.max_subdivisions = 0;
  CHECK_THROWS_AS(spec2.validate(), resodecay::BadParams);
}
