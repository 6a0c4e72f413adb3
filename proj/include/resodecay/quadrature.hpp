#pragma once

#include <complex>
#include <functional>
#include <optional>
#include <vector>

#include "resodecay/errors.hpp"

namespace resodecay {

using Complex = std::complex<double>;

// How oscillatory Fourier-type integrals are evaluated. Auto switches from
// plain adaptive panels to the rotated-contour representation once
// |t| * truncation radius passes QuadratureSpec::osc_switch.
enum class OscStrategy { Auto, Direct, RotatedContour };

struct QuadratureSpec {
  double rel_tol = 1e-9;
  double abs_tol = 1e-10;
  // Improper integrals are cut at +-trunc_radius and the remainder is
  // bounded analytically from the declared decay order.
  double trunc_radius = 1e12;
  int max_subdivisions = 50000;
  OscStrategy strategy = OscStrategy::Auto;
  double osc_switch = 20.0;
  // Cauchy kernels refuse evaluation points closer to the real axis.
  double pole_axis_floor = 1e-8;

  void validate() const;
};

struct IntegralResult {
  Complex value{0.0, 0.0};
  double error = 0.0;        // accumulated panel error estimate
  int subdivisions = 0;      // panels evaluated
  double tail_bound = 0.0;   // analytic bound on the truncated remainder
};

using Integrand = std::function<Complex(double)>;

// Definite integral over [a, b] by adaptive Gauss-Kronrod 7-15.
// extra_knots seeds the panel set at known feature locations (peaks, kinks);
// values outside (a, b) are ignored.
IntegralResult integrate_interval(const Integrand& f, double a, double b,
                                  const QuadratureSpec& spec,
                                  const std::vector<double>& extra_knots = {});

// Integral over the whole real line for integrands that decay at least like
// |E|^-decay_order with decay_order >= 2. The axis is cut at
// +-spec.trunc_radius and the remainder bounded by C/((p-1) R^(p-1)).
IntegralResult integrate_real_line(const Integrand& f, int decay_order,
                                   const QuadratureSpec& spec,
                                   const std::vector<double>& extra_knots = {});

// Integral over [a, inf) under the same decay contract.
IntegralResult integrate_half_line(const Integrand& f, double a, int decay_order,
                                   const QuadratureSpec& spec,
                                   const std::vector<double>& extra_knots = {});

// (i / 2 pi) * Int_R f(E) / (E - z) dE for z off the real axis.
// f must decay like |E|^-decay_order with decay_order >= 1.
IntegralResult cauchy_kernel_integral(const Integrand& f, int decay_order,
                                      Complex z, const QuadratureSpec& spec,
                                      const std::vector<double>& extra_knots = {});

// A pole of an analytically continued integrand. residue is meaningful only
// for multiplicity 1; rotated contours refuse to sweep past higher orders.
struct PoleInfo {
  Complex location{0.0, 0.0};
  Complex residue{0.0, 0.0};
  int multiplicity = 1;
};

// An integrand with enough analytic structure for contour rotation: the
// continuation off the real axis plus the catalogue of its poles and the
// power-law decay rate at large |z|.
struct AnalyticIntegrand {
  std::function<Complex(Complex)> eval;
  std::vector<PoleInfo> poles;
  int decay_order = 2;

  Complex operator()(double x) const { return eval(Complex(x, 0.0)); }
  bool continuable() const { return static_cast<bool>(eval); }
  // Real parts of the poles, for panel seeding on the axis.
  std::vector<double> feature_knots() const;
};

// Int_lower^inf rho(E) exp(-i E t) dE with hbar = 1. Direct strategy
// integrates the oscillating product on the axis; the rotated strategy sweeps
// the tail onto a vertical ray where the exponential decays, picking up
// 2 pi i residues for every pole the sweep crosses.
IntegralResult oscillatory_fourier_integral(const AnalyticIntegrand& rho,
                                            double t, double lower,
                                            const QuadratureSpec& spec);

// Int_R f(E) exp(-i E t) dE. The axis is kept on a central segment
// [-r0, r0] wide enough to contain every pole's real part, and both tails are
// rotated into the decaying half-plane (down for t >= 0, up for t < 0).
// Pass r0 to override the automatic choice.
IntegralResult fourier_real_line(const AnalyticIntegrand& f, double t,
                                 const QuadratureSpec& spec,
                                 std::optional<double> r0 = std::nullopt);

// Same contour as fourier_real_line at t >= 0 (central segment plus downward
// rays) but evaluated verbatim at negative t with the rays cut at ray_length.
// For t < 0 the downward exponential grows, so the value blows up roughly
// like exp(ray_length * |t|); this is the probe used to exhibit the
// out-of-half-plane catastrophe. ray_length * |t| beyond ~600 overflows.
IntegralResult fourier_real_line_truncated(const AnalyticIntegrand& f, double t,
                                           double ray_length,
                                           const QuadratureSpec& spec,
                                           std::optional<double> r0 = std::nullopt);

}  // namespace resodecay
