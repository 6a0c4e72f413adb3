#pragma once

#include <string>
#include <vector>

#include "resodecay/quadrature.hpp"

namespace resodecay {

enum class DensityShape { TruncatedLorentzian, FullLineLorentzian };

// Energy distribution of the decaying state. The truncated shape lives on
// [lower_edge, inf), the semibounded-spectrum case; the full-line shape is
// the idealization whose survival amplitude is exactly exponential.
struct SpectralDensity {
  DensityShape shape = DensityShape::TruncatedLorentzian;
  double er = 1.0;
  double gamma = 0.1;
  double lower_edge = 0.0;  // ignored for the full-line shape
  double n = 0.0;           // normalization constant, set by normalize_density

  void validate() const;
  double operator()(double e) const;
  AnalyticIntegrand integrand() const;
  Complex pole() const { return Complex(er, -0.5 * gamma); }
};

// Fixes N so the density integrates to one: N = Gamma / (2 pi) on the full
// line, N = Gamma / (2 (pi/2 + atan(2 (E_R - a) / Gamma))) above threshold a.
SpectralDensity normalize_density(DensityShape shape, double er, double gamma,
                                  double lower_edge = 0.0);

struct SurvivalPoint {
  Complex amplitude{0.0, 0.0};
  double probability = 0.0;
};

// A(t) = Int rho(E) exp(-i E t) dE and P(t) = |A(t)|^2, any real t.
SurvivalPoint survival_probability(const SpectralDensity& rho, double t,
                                   const QuadratureSpec& spec);

// P(t) - exp(-Gamma t), the deviation from the pure exponential law; t >= 0.
double ww_deviation(const SpectralDensity& rho, double t, const QuadratureSpec& spec);

struct SurvivalCurve {
  std::vector<double> times;
  std::vector<Complex> amplitudes;
  std::vector<double> probabilities;
  std::vector<double> exponential;  // exp(-Gamma t) reference
  std::vector<double> deviations;
};

SurvivalCurve survival_curve(const SpectralDensity& rho,
                             const std::vector<double>& times,
                             const QuadratureSpec& spec);

// Mean lifetime Int_0^inf P(t) dt, integrated to T = horizon_lifetimes / Gamma
// with the long-time power-law tail estimated as C / t^2, C = P(T) T^2, which
// adds P(T) T.
double mean_lifetime(const SpectralDensity& rho, const QuadratureSpec& spec,
                     double horizon_lifetimes = 30.0);

// Same estimate from an already tabulated curve (trapezoid plus tail); the
// grid must start at t = 0 and be strictly ascending.
double mean_lifetime(const SurvivalCurve& curve);

// Exponential decay split across channels: R_eta(t) = r_eta exp(-R t) with
// R = sum r_eta the total rate (1 / tau).
struct ChannelRates {
  std::vector<std::string> labels;
  std::vector<double> rates;  // r_eta at t = 0, units 1 / time

  double total() const;
  void validate() const;
};

struct RateCurves {
  std::vector<double> times;
  std::vector<std::string> labels;
  // indexed [channel][time]
  std::vector<std::vector<double>> rates;
  std::vector<std::vector<double>> cumulative;
};

RateCurves rate_curves(const ChannelRates& channels, const std::vector<double>& times);

}  // namespace resodecay
