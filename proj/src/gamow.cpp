#include "resodecay/gamow.hpp"

#include <cmath>
#include <sstream>

namespace resodecay {

namespace {

constexpr double kPi = 3.141592653589793238462643383279502884;
constexpr double kResidualFloor = 1e-12;

void require_lower_class(const RationalHardyFunction& psi) {
  if (psi.hardy_class() != HardyClass::LowerHalfPlane)
    throw WrongClass("Gamow pairings take H2- wave functions");
}

// psi(E) / (E - z_R) continued off the axis, with the kernel pole appended
// to psi's own catalogue.
AnalyticIntegrand paired_integrand(const RationalHardyFunction& psi, Complex z_r) {
  AnalyticIntegrand g = psi.as_integrand();
  auto base = g.eval;
  g.eval = [base, z_r](Complex z) -> Complex { return base(z) / (z - z_r); };
  PoleInfo kernel;
  kernel.location = z_r;
  kernel.residue = psi(z_r);
  kernel.multiplicity = 1;
  g.poles.push_back(kernel);
  g.decay_order += 1;
  return g;
}

}  // namespace

void GamowKet::validate() const {
  if (!(z_r.imag() < 0.0))
    throw BadParams("Gamow pole must lie in the lower half-plane");
  if (!std::isfinite(z_r.real()) || !std::isfinite(z_r.imag()))
    throw BadParams("Gamow pole must be finite");
  if (!std::isfinite(normalization.real()) || !std::isfinite(normalization.imag()) ||
      std::abs(normalization) == 0.0)
    throw BadParams("Gamow normalization must be finite and non-zero");
}

GamowKet GamowKet::from_pole(Complex z_r, Complex f) {
  GamowKet ket;
  ket.z_r = z_r;
  if (std::abs(f) == 0.0) throw BadParams("normalization reference f must be non-zero");
  const double gamma = -2.0 * z_r.imag();
  if (!(gamma > 0.0)) throw BadParams("Gamow pole must lie in the lower half-plane");
  ket.normalization = std::sqrt(2.0 * kPi * gamma) / f;
  ket.validate();
  return ket;
}

PairingResult gamow_pairing(const RationalHardyFunction& psi, const GamowKet& ket,
                            const QuadratureSpec& spec) {
  require_lower_class(psi);
  ket.validate();

  PairingResult out;
  out.residue_route = ket.normalization * psi(ket.z_r);

  auto on_axis = [&psi](double e) -> Complex { return psi(Complex(e, 0.0)); };
  std::vector<double> knots;
  for (const RationalTerm& t : psi.terms()) {
    knots.push_back(t.pole.real());
    knots.push_back(t.pole.real() - std::abs(t.pole.imag()));
    knots.push_back(t.pole.real() + std::abs(t.pole.imag()));
  }
  const Complex k =
      cauchy_kernel_integral(on_axis, std::min(psi.decay_order(), 64), ket.z_r, spec, knots)
          .value;
  out.quadrature_route = ket.normalization * k;
  out.discrepancy = std::abs(out.quadrature_route - out.residue_route);
  return out;
}

double eigenvalue_residual(const RationalHardyFunction& psi, const GamowKet& ket,
                           const QuadratureSpec& spec) {
  require_lower_class(psi);
  ket.validate();
  if (psi.decay_order() < 2)
    throw DecayOrderTooLow(
        "energy-weighted pairing needs psi decaying at least like E^-2");

  auto weighted = [&psi](double e) -> Complex { return e * psi(Complex(e, 0.0)); };
  std::vector<double> knots;
  for (const RationalTerm& t : psi.terms()) {
    knots.push_back(t.pole.real());
    knots.push_back(t.pole.real() - std::abs(t.pole.imag()));
    knots.push_back(t.pole.real() + std::abs(t.pole.imag()));
  }
  const Complex lhs =
      ket.normalization *
      cauchy_kernel_integral(weighted, std::min(psi.decay_order(), 64) - 1, ket.z_r, spec,
                             knots)
          .value;
  const Complex rhs = ket.z_r * ket.normalization * psi(ket.z_r);
  return std::abs(lhs - rhs) / (std::abs(rhs) + kResidualFloor);
}

Complex evolved_pairing(const RationalHardyFunction& psi, const GamowKet& ket,
                        double t, EvolutionRoute route, const QuadratureSpec& spec) {
  require_lower_class(psi);
  ket.validate();
  if (t < 0.0) {
    std::ostringstream os;
    os << "semigroup evolution is defined for t >= 0 only, got t = " << t;
    throw NegativeTime(os.str());
  }

  if (route == EvolutionRoute::Closed)
    return std::exp(Complex(0.0, -1.0) * ket.z_r * t) * ket.normalization * psi(ket.z_r);

  if (t == 0.0) return gamow_pairing(psi, ket, spec).quadrature_route;

  const AnalyticIntegrand g = paired_integrand(psi, ket.z_r);
  const Complex integral = fourier_real_line(g, t, spec).value;
  return ket.normalization * Complex(0.0, 1.0) / (2.0 * kPi) * integral;
}

std::vector<double> catastrophe_probe(const RationalHardyFunction& psi,
                                      const GamowKet& ket, double t,
                                      const std::vector<double>& ray_lengths,
                                      const QuadratureSpec& spec) {
  require_lower_class(psi);
  ket.validate();
  if (!(t < 0.0)) {
    std::ostringstream os;
    os << "the catastrophe probe is a negative-time construction, got t = " << t;
    throw NonNegativeTime(os.str());
  }
  if (ray_lengths.empty()) throw BadParams("no probe ray lengths given");
  for (std::size_t i = 0; i < ray_lengths.size(); ++i) {
    if (!(ray_lengths[i] > 0.0)) throw BadParams("probe ray lengths must be positive");
    if (i > 0 && !(ray_lengths[i] > ray_lengths[i - 1]))
      throw BadParams("probe ray lengths must be strictly ascending");
  }

  const AnalyticIntegrand g = paired_integrand(psi, ket.z_r);
  std::vector<double> out;
  out.reserve(ray_lengths.size());
  for (double len : ray_lengths) {
    const Complex integral = fourier_real_line_truncated(g, t, len, spec).value;
    out.push_back(std::abs(ket.normalization * Complex(0.0, 1.0) / (2.0 * kPi) * integral));
  }
  return out;
}

std::vector<ChannelProbability> decay_probability_gamow(
    double gamma_total, const std::vector<double>& partial_widths, double t,
    double hbar) {
  if (!(gamma_total > 0.0)) throw BadWeights("total width must be positive");
  if (!(hbar > 0.0)) throw BadParams("hbar must be positive");
  if (t < 0.0) throw BadParams("decay probabilities are defined for t >= 0");
  if (partial_widths.empty()) throw BadWeights("no partial widths given");
  double sum = 0.0;
  for (double g : partial_widths) {
    if (!(g >= 0.0)) throw BadWeights("partial widths must be >= 0");
    sum += g;
  }
  if (std::abs(sum - gamma_total) > 1e-12 * gamma_total)
    throw BadWeights("partial widths must sum to the total width");

  const double decay = std::exp(-gamma_total * t / hbar);
  std::vector<ChannelProbability> out;
  out.reserve(partial_widths.size());
  for (double g : partial_widths) {
    ChannelProbability c;
    c.probability = (g / gamma_total) * (1.0 - decay);
    c.rate = (g / hbar) * decay;
    out.push_back(c);
  }
  return out;
}

}  // namespace resodecay
