#pragma once

#include <functional>
#include <string>
#include <vector>

#include "resodecay/hardy.hpp"
#include "resodecay/quadrature.hpp"

namespace resodecay {

struct ResonanceParams {
  double er = 1.0;      // resonance position
  double gamma = 0.1;   // full width, > 0
  Complex residue{1.0, 0.0};  // channel coupling r_eta

  Complex pole() const { return Complex(er, -0.5 * gamma); }
  void validate() const;
};

// Smooth non-resonant background, a polynomial in the energy.
class BackgroundModel {
 public:
  BackgroundModel() = default;
  explicit BackgroundModel(std::vector<Complex> coeffs);

  Complex operator()(Complex z) const;
  int degree() const { return coeffs_.empty() ? -1 : static_cast<int>(coeffs_.size()) - 1; }
  const std::vector<Complex>& coefficients() const { return coeffs_; }

 private:
  std::vector<Complex> coeffs_;  // c0 + c1 z + c2 z^2 + ...
};

struct PartialWaveChannel {
  int j = 0;
  std::string in = "0";
  std::string out = "0";

  bool elastic() const { return in == out; }
  void validate() const;
};

// Resonant amplitude r / (z - z_R), the single-pole approximation near E_R.
Complex bw_amplitude(Complex z, const ResonanceParams& params);

// norm * |amplitude + background|^2 at real E >= 0.
double cross_section(double e, const ResonanceParams& params,
                     const BackgroundModel& background, double norm);

// Partial-wave S-matrix element: 1 + 2i (a + B) on the elastic diagonal,
// 2i (a + B) off it.
Complex s_matrix_value(Complex z, const ResonanceParams& params,
                       const BackgroundModel& background,
                       const PartialWaveChannel& channel);

// Everything the synthetic-data pipeline needs to evaluate one channel.
struct SMatrixModel {
  ResonanceParams params;
  BackgroundModel background;
  PartialWaveChannel channel;
  double norm = 1.0;

  void validate() const;
  Complex amplitude(Complex z) const { return bw_amplitude(z, params); }
  Complex s(Complex z) const { return s_matrix_value(z, params, background, channel); }
  double sigma(double e) const { return cross_section(e, params, background, norm); }
  // Residue of S at the resonance pole; the background is regular there.
  Complex pole_residue() const { return Complex(0.0, 2.0) * params.residue; }

  // One resonance with r = -Gamma/2 and no background; S is unitary on the
  // axis and equals (z - conj(z_R)) / (z - z_R).
  static SMatrixModel canonical_unitary(double er, double gamma);

  std::string to_json() const;
  static SMatrixModel from_json(const std::string& text);
};

struct LaurentCoefficients {
  Complex expansion_point{0.0, 0.0};
  double radius = 0.0;
  std::vector<int> orders;     // k in sum R_k (z - z_R)^k
  std::vector<Complex> values;
  int nodes = 0;               // contour nodes at convergence

  Complex at(int k) const;
};

// Laurent coefficients of S around z_r by trapezoid sums on a circle of the
// given radius, node count doubling from 64 until every requested order is
// stable to spec tolerances. The circle must not cross other poles of S.
LaurentCoefficients laurent_coefficients(const std::function<Complex(Complex)>& s,
                                         Complex z_r, std::vector<int> orders,
                                         double radius, const QuadratureSpec& spec);

enum class BornMode { Direct, PoleExtracted };

// Transition amplitude Int_0^inf psi_out(E) S(E) phi_in(E) dE. Direct
// integrates along the axis. PoleExtracted deforms the contour below the
// resonance pole, returning -2 pi i R_-1 psi_out(z_R) phi_in(z_R) plus the
// deformed-path remainder; the two must agree for H2- wave functions.
Complex born_amplitude(const RationalHardyFunction& psi_out,
                       const RationalHardyFunction& phi_in, const SMatrixModel& model,
                       BornMode mode, const QuadratureSpec& spec);

}  // namespace resodecay
