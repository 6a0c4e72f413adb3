#pragma once

#include <optional>
#include <string>
#include <vector>

#include "resodecay/simulate.hpp"

namespace resodecay {

struct FitQuality {
  double chi2 = 0.0;
  int dof = 0;
  int iterations = 0;
  bool converged = false;
};

struct FitOptions {
  int max_iterations = 200;
  // Declared converged when both the relative step and the relative chi2
  // change drop below these.
  double step_tol = 1e-9;
  double chi2_tol = 1e-12;
  std::optional<double> er_init;
  std::optional<double> gamma_init;
  std::optional<double> tau_init;
};

// Weighted least squares of binned counts against the bin-integrated
// cross section norm * Int_bin |amplitude + background|^2 dE, with Poisson
// weights 1 / max(count, 1). Internally E_R is free, Gamma and norm run in
// log space, and the background polynomial has real coefficients.
struct LineshapeFit {
  double er = 0.0;
  double gamma = 0.0;
  double norm = 0.0;
  std::vector<double> background;

  double se_er = 0.0;
  double se_gamma = 0.0;
  double se_norm = 0.0;
  std::vector<double> se_background;

  std::vector<std::string> parameter_names;
  std::vector<double> covariance;  // row-major, reported parameter order

  FitQuality quality;
};

LineshapeFit fit_lineshape(const BinnedCounts& counts, int background_order,
                           const FitOptions& options = {});

enum class DecayFitMode { Joint, PerChannel };

// Exponential decay fit on binned times. The model for channel eta in bin
// [t0, t1) is c_eta (exp(-t0 / tau) - exp(-t1 / tau)): the exact bin content
// for c_eta = N_eta, so no midpoint approximation enters. Joint mode shares
// one tau across channels; per-channel mode fits each channel alone and the
// reported tau is the inverse-variance weighted mean.
struct DecayFit {
  double tau = 0.0;
  double se_tau = 0.0;
  std::vector<std::string> channels;
  std::vector<double> amplitudes;
  std::vector<double> se_amplitudes;

  std::vector<std::string> parameter_names;
  std::vector<double> covariance;

  DecayFitMode mode = DecayFitMode::Joint;
  std::vector<double> tau_by_channel;
  std::vector<double> se_tau_by_channel;

  FitQuality quality;
};

DecayFit fit_decay(const BinnedCounts& counts, DecayFitMode mode,
                   const FitOptions& options = {});

// The headline consistency check: tau * Gamma / hbar with its propagated
// standard error and the pull away from 1.
struct RatioReport {
  double product = 0.0;
  double se = 0.0;
  double pull = 0.0;
  double tau = 0.0;
  double gamma = 0.0;
  double hbar = 1.0;
  bool consistent = false;  // |pull| <= 3
};

RatioReport width_lifetime_ratio(const LineshapeFit& lineshape, const DecayFit& decay,
                                 double hbar = 1.0);

}  // namespace resodecay
