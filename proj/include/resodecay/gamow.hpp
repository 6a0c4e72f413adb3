#pragma once

#include <vector>

#include "resodecay/hardy.hpp"
#include "resodecay/quadrature.hpp"

namespace resodecay {

// State vector attached to a resonance pole z_R = E_R - i Gamma/2 in the
// lower half-plane, normalized by sqrt(2 pi Gamma) / f.
struct GamowKet {
  Complex z_r{1.0, -0.05};
  Complex normalization{1.0, 0.0};

  double gamma() const { return -2.0 * z_r.imag(); }
  void validate() const;

  static GamowKet from_pole(Complex z_r, Complex f = Complex(1.0, 0.0));
};

// The pairing (psi, ket) computed two independent ways: as the Cauchy-kernel
// integral norm * (i / 2 pi) Int psi(E) / (E - z_R) dE, and as the closed
// form norm * psi(z_R) that the kernel must reproduce for psi in H2-.
struct PairingResult {
  Complex quadrature_route{0.0, 0.0};
  Complex residue_route{0.0, 0.0};
  double discrepancy = 0.0;
};

PairingResult gamow_pairing(const RationalHardyFunction& psi, const GamowKet& ket,
                            const QuadratureSpec& spec);

// | (psi, H ket) - z_R (psi, ket) | / (|z_R (psi, ket)| + floor), with the
// left side evaluated by quadrature of E psi(E) / (E - z_R). Zero up to
// quadrature error exactly when the ket is an eigenvector with eigenvalue
// z_R. psi must decay at least like E^-2 so that E psi(E) is integrable.
double eigenvalue_residual(const RationalHardyFunction& psi, const GamowKet& ket,
                           const QuadratureSpec& spec);

enum class EvolutionRoute { Closed, Quadrature };

// (psi, e^{-iHt} ket) for t >= 0 only. Closed: exp(-i z_R t) * pairing.
// Quadrature: the full-line Fourier representation with tails rotated into
// the decaying half-plane; independent of the closed form. t < 0 is refused:
// the semigroup has no inverse here, see catastrophe_probe.
Complex evolved_pairing(const RationalHardyFunction& psi, const GamowKet& ket,
                        double t, EvolutionRoute route, const QuadratureSpec& spec);

// Applies the t >= 0 contour construction verbatim at t < 0, with the
// rotated rays cut at each given length (in energy units, measured from the
// axis). The exponential grows instead of decaying, so the magnitudes must
// blow up roughly like exp(length * |t|) as the cut is pushed out; returned
// in the order of the ascending input lengths. Lengths with
// length * |t| beyond ~600 overflow to non-finite values and throw.
std::vector<double> catastrophe_probe(const RationalHardyFunction& psi,
                                      const GamowKet& ket, double t,
                                      const std::vector<double>& ray_lengths,
                                      const QuadratureSpec& spec);

struct ChannelProbability {
  double probability = 0.0;  // P_eta(t), saturates at Gamma_eta / Gamma
  double rate = 0.0;         // dP_eta/dt = (Gamma_eta / hbar) exp(-Gamma t / hbar)
};

// Channel-resolved decay probabilities for partial widths summing to the
// total width.
std::vector<ChannelProbability> decay_probability_gamow(
    double gamma_total, const std::vector<double>& partial_widths, double t,
    double hbar = 1.0);

}  // namespace resodecay
