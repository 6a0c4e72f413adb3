#include "resodecay/decay.hpp"

#include <cmath>
#include <sstream>

namespace resodecay {

namespace {
constexpr double kPi = 3.141592653589793238462643383279502884;
}

void SpectralDensity::validate() const {
  if (!(gamma > 0.0) || !std::isfinite(gamma))
    throw BadParams("density width must be positive and finite");
  if (!std::isfinite(er)) throw BadParams("density position must be finite");
  if (shape == DensityShape::TruncatedLorentzian && !std::isfinite(lower_edge))
    throw BadParams("density lower edge must be finite");
  if (!(n > 0.0)) throw BadParams("density is not normalized; use normalize_density");
}

double SpectralDensity::operator()(double e) const {
  if (shape == DensityShape::TruncatedLorentzian && e < lower_edge) return 0.0;
  const double de = e - er;
  return n / (de * de + 0.25 * gamma * gamma);
}

AnalyticIntegrand SpectralDensity::integrand() const {
  validate();
  AnalyticIntegrand g;
  const double nn = n;
  const Complex zr = pole();
  const Complex zrc = std::conj(zr);
  g.eval = [nn, zr, zrc](Complex z) -> Complex { return nn / ((z - zr) * (z - zrc)); };
  // 1/((z - z_R)(z - conj z_R)) has residues +-1/(z_R - conj z_R) = -+ i/Gamma.
  PoleInfo lower;
  lower.location = zr;
  lower.residue = nn / (zr - zrc);
  PoleInfo upper;
  upper.location = zrc;
  upper.residue = nn / (zrc - zr);
  g.poles = {lower, upper};
  g.decay_order = 2;
  return g;
}

SpectralDensity normalize_density(DensityShape shape, double er, double gamma,
                                  double lower_edge) {
  SpectralDensity rho;
  rho.shape = shape;
  rho.er = er;
  rho.gamma = gamma;
  rho.lower_edge = lower_edge;
  if (!(gamma > 0.0) || !std::isfinite(gamma))
    throw BadParams("density width must be positive and finite");
  if (shape == DensityShape::FullLineLorentzian) {
    rho.n = gamma / (2.0 * kPi);
  } else {
    if (!std::isfinite(lower_edge)) throw BadParams("density lower edge must be finite");
    const double span = kPi / 2.0 + std::atan(2.0 * (er - lower_edge) / gamma);
    if (!(span > 0.0)) throw BadParams("density has no weight above the lower edge");
    rho.n = gamma / (2.0 * span);
  }
  rho.validate();
  return rho;
}

SurvivalPoint survival_probability(const SpectralDensity& rho, double t,
                                   const QuadratureSpec& spec) {
  rho.validate();
  const AnalyticIntegrand g = rho.integrand();
  SurvivalPoint out;
  if (rho.shape == DensityShape::FullLineLorentzian)
    out.amplitude = fourier_real_line(g, t, spec).value;
  else
    out.amplitude = oscillatory_fourier_integral(g, t, rho.lower_edge, spec).value;
  out.probability = std::norm(out.amplitude);
  return out;
}

double ww_deviation(const SpectralDensity& rho, double t, const QuadratureSpec& spec) {
  if (!(t >= 0.0)) throw BadParams("the exponential-law comparison is made at t >= 0");
  return survival_probability(rho, t, spec).probability - std::exp(-rho.gamma * t);
}

SurvivalCurve survival_curve(const SpectralDensity& rho,
                             const std::vector<double>& times,
                             const QuadratureSpec& spec) {
  SurvivalCurve out;
  out.times = times;
  out.amplitudes.reserve(times.size());
  for (double t : times) {
    const SurvivalPoint p = survival_probability(rho, t, spec);
    out.amplitudes.push_back(p.amplitude);
    out.probabilities.push_back(p.probability);
    out.exponential.push_back(std::exp(-rho.gamma * t));
    out.deviations.push_back(p.probability - out.exponential.back());
  }
  return out;
}

double mean_lifetime(const SpectralDensity& rho, const QuadratureSpec& spec,
                     double horizon_lifetimes) {
  rho.validate();
  if (!(horizon_lifetimes > 1.0)) throw BadParams("lifetime horizon must exceed one lifetime");
  const double horizon = horizon_lifetimes / rho.gamma;

  QuadratureSpec inner = spec;
  inner.rel_tol = std::max(spec.rel_tol, 1e-10);
  auto p_of_t = [&rho, &inner](double t) -> Complex {
    return Complex(survival_probability(rho, t, inner).probability, 0.0);
  };
  QuadratureSpec outer = spec;
  outer.rel_tol = std::max(spec.rel_tol, 1e-8);
  outer.abs_tol = std::max(spec.abs_tol, 1e-10 / rho.gamma);
  std::vector<double> knots;
  for (int k = 1; k * 2.0 < horizon_lifetimes; k *= 2) knots.push_back(k / rho.gamma);
  const Complex integral = integrate_interval(p_of_t, 0.0, horizon, outer, knots).value;

  const double p_horizon = survival_probability(rho, horizon, inner).probability;
  return integral.real() + p_horizon * horizon;
}

double mean_lifetime(const SurvivalCurve& curve) {
  const std::size_t n = curve.times.size();
  if (n < 3) throw BadParams("survival curve too short for a lifetime estimate");
  if (std::abs(curve.times.front()) > 1e-12)
    throw BadParams("survival curve must start at t = 0");
  double acc = 0.0;
  for (std::size_t i = 0; i + 1 < n; ++i) {
    const double dt = curve.times[i + 1] - curve.times[i];
    if (!(dt > 0.0)) throw BadParams("survival curve times must be strictly ascending");
    acc += 0.5 * dt * (curve.probabilities[i] + curve.probabilities[i + 1]);
  }
  return acc + curve.probabilities.back() * curve.times.back();
}

double ChannelRates::total() const {
  double r = 0.0;
  for (double x : rates) r += x;
  return r;
}

void ChannelRates::validate() const {
  if (labels.size() != rates.size())
    throw BadWeights("channel labels and rates differ in length");
  if (rates.empty()) throw BadWeights("no decay channels given");
  for (double r : rates)
    if (!(r >= 0.0) || !std::isfinite(r)) throw BadWeights("channel rates must be >= 0");
  if (!(total() > 0.0)) throw BadWeights("total decay rate must be positive");
  for (const std::string& l : labels)
    if (l.empty()) throw BadWeights("channel labels must be non-empty");
}

RateCurves rate_curves(const ChannelRates& channels, const std::vector<double>& times) {
  channels.validate();
  for (double t : times)
    if (!(t >= 0.0)) throw BadParams("rate curves are defined for t >= 0");

  RateCurves out;
  out.times = times;
  out.labels = channels.labels;
  const double r_total = channels.total();
  out.rates.resize(channels.rates.size());
  out.cumulative.resize(channels.rates.size());
  for (std::size_t c = 0; c < channels.rates.size(); ++c) {
    out.rates[c].reserve(times.size());
    out.cumulative[c].reserve(times.size());
    for (double t : times) {
      const double decay = std::exp(-r_total * t);
      out.rates[c].push_back(channels.rates[c] * decay);
      out.cumulative[c].push_back(channels.rates[c] / r_total * (1.0 - decay));
    }
  }
  return out;
}

}  // namespace resodecay
