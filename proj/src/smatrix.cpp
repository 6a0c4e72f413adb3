#include "resodecay/smatrix.hpp"

#include <cmath>
#include <sstream>

#include "json.hpp"

namespace resodecay {

namespace {
constexpr double kPi = 3.141592653589793238462643383279502884;
}

void ResonanceParams::validate() const {
  if (!std::isfinite(er)) throw BadParams("resonance position must be finite");
  if (!(gamma > 0.0) || !std::isfinite(gamma))
    throw BadParams("resonance width must be positive and finite");
  if (!std::isfinite(residue.real()) || !std::isfinite(residue.imag()))
    throw BadParams("channel residue must be finite");
}

BackgroundModel::BackgroundModel(std::vector<Complex> coeffs) : coeffs_(std::move(coeffs)) {
  for (const Complex& c : coeffs_)
    if (!std::isfinite(c.real()) || !std::isfinite(c.imag()))
      throw BadParams("background coefficient must be finite");
}

Complex BackgroundModel::operator()(Complex z) const {
  Complex out{0.0, 0.0};
  for (auto it = coeffs_.rbegin(); it != coeffs_.rend(); ++it) out = out * z + *it;
  return out;
}

void PartialWaveChannel::validate() const {
  if (j < 0) throw BadParams("partial wave index must be >= 0");
  if (in.empty() || out.empty()) throw BadParams("channel labels must be non-empty");
}

Complex bw_amplitude(Complex z, const ResonanceParams& params) {
  params.validate();
  const Complex d = z - params.pole();
  if (std::abs(d) < 1e-14 * (1.0 + std::abs(params.pole())))
    throw EvalAtPole("amplitude evaluated at the resonance pole");
  return params.residue / d;
}

double cross_section(double e, const ResonanceParams& params,
                     const BackgroundModel& background, double norm) {
  if (!(e >= 0.0)) throw BadParams("cross section defined for E >= 0");
  if (!(norm > 0.0)) throw BadParams("cross-section normalization must be positive");
  const Complex a = bw_amplitude(Complex(e, 0.0), params) + background(Complex(e, 0.0));
  return norm * std::norm(a);
}

Complex s_matrix_value(Complex z, const ResonanceParams& params,
                       const BackgroundModel& background,
                       const PartialWaveChannel& channel) {
  channel.validate();
  const Complex a = bw_amplitude(z, params) + background(z);
  const Complex two_i_a = Complex(0.0, 2.0) * a;
  return channel.elastic() ? Complex(1.0, 0.0) + two_i_a : two_i_a;
}

void SMatrixModel::validate() const {
  params.validate();
  channel.validate();
  if (!(norm > 0.0) || !std::isfinite(norm))
    throw BadParams("model normalization must be positive and finite");
}

SMatrixModel SMatrixModel::canonical_unitary(double er, double gamma) {
  SMatrixModel m;
  m.params.er = er;
  m.params.gamma = gamma;
  m.params.residue = Complex(-0.5 * gamma, 0.0);
  m.params.validate();
  return m;
}

std::string SMatrixModel::to_json() const {
  nlohmann::json j;
  j["E_R"] = params.er;
  j["Gamma"] = params.gamma;
  j["residues"] = {
      {channel.out, {params.residue.real(), params.residue.imag()}}};
  j["background"] = nlohmann::json::array();
  for (const Complex& c : background.coefficients())
    j["background"].push_back({c.real(), c.imag()});
  j["norm"] = norm;
  j["channel"] = {{"j", channel.j}, {"in", channel.in}, {"out", channel.out}};
  return j.dump(2);
}

SMatrixModel SMatrixModel::from_json(const std::string& text) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(text);
  } catch (const nlohmann::json::exception& e) {
    throw InvalidData(std::string("model JSON does not parse: ") + e.what());
  }
  try {
    SMatrixModel m;
    m.params.er = j.at("E_R").get<double>();
    m.params.gamma = j.at("Gamma").get<double>();
    if (j.contains("channel")) {
      m.channel.j = j["channel"].value("j", 0);
      m.channel.in = j["channel"].value("in", "0");
      m.channel.out = j["channel"].value("out", "0");
    }
    const auto& res = j.at("residues");
    if (res.contains(m.channel.out)) {
      const auto& r = res.at(m.channel.out);
      m.params.residue = Complex(r.at(0).get<double>(), r.at(1).get<double>());
    } else if (!res.empty()) {
      const auto& item = res.items().begin();
      m.channel.in = m.channel.out = item.key();
      m.params.residue =
          Complex(item.value().at(0).get<double>(), item.value().at(1).get<double>());
    } else {
      throw InvalidData("model JSON has an empty residues table");
    }
    std::vector<Complex> bg;
    if (j.contains("background"))
      for (const auto& c : j["background"])
        bg.emplace_back(c.at(0).get<double>(), c.at(1).get<double>());
    m.background = BackgroundModel(std::move(bg));
    m.norm = j.value("norm", 1.0);
    m.validate();
    return m;
  } catch (const nlohmann::json::exception& e) {
    throw InvalidData(std::string("model JSON is missing fields: ") + e.what());
  }
}

Complex LaurentCoefficients::at(int k) const {
  for (std::size_t i = 0; i < orders.size(); ++i)
    if (orders[i] == k) return values[i];
  throw BadParams("Laurent order was not requested");
}

LaurentCoefficients laurent_coefficients(const std::function<Complex(Complex)>& s,
                                         Complex z_r, std::vector<int> orders,
                                         double radius, const QuadratureSpec& spec) {
  spec.validate();
  if (!(radius > 0.0) || !std::isfinite(radius))
    throw BadParams("Laurent contour radius must be positive and finite");
  if (orders.empty()) throw BadParams("no Laurent orders requested");

  LaurentCoefficients out;
  out.expansion_point = z_r;
  out.radius = radius;
  out.orders = orders;
  out.values.assign(orders.size(), Complex(0.0, 0.0));

  // R_k = (1 / 2 pi) Int_0^{2pi} S(z_R + rho e^{i theta}) rho^-k e^{-i k theta}
  // dtheta; the trapezoid rule on a periodic analytic integrand converges
  // geometrically in the node count.
  std::vector<Complex> prev(orders.size(), Complex(0.0, 0.0));
  bool have_prev = false;
  for (int n = 64; n <= (1 << 20); n *= 2) {
    std::vector<Complex> cur(orders.size(), Complex(0.0, 0.0));
    for (int j = 0; j < n; ++j) {
      const double theta = 2.0 * kPi * j / n;
      const Complex e(std::cos(theta), std::sin(theta));
      const Complex sv = s(z_r + radius * e);
      if (!std::isfinite(sv.real()) || !std::isfinite(sv.imag()))
        throw NonFiniteIntegrand("S-matrix value not finite on the Laurent contour");
      for (std::size_t q = 0; q < orders.size(); ++q) {
        const int k = orders[q];
        // e^{-i k theta} = conj(e)^k for k >= 0, e^|k| for k < 0.
        Complex phase(1.0, 0.0);
        const Complex base = k >= 0 ? std::conj(e) : e;
        for (int m = 0; m < std::abs(k); ++m) phase *= base;
        cur[q] += sv * phase;
      }
    }
    for (std::size_t q = 0; q < orders.size(); ++q)
      cur[q] *= std::pow(radius, -orders[q]) / static_cast<double>(n);

    if (have_prev) {
      bool stable = true;
      for (std::size_t q = 0; q < orders.size(); ++q) {
        const double d = std::abs(cur[q] - prev[q]);
        if (d > std::max(spec.abs_tol, spec.rel_tol * std::abs(cur[q]))) stable = false;
      }
      if (stable) {
        out.values = cur;
        out.nodes = n;
        return out;
      }
    }
    prev = cur;
    have_prev = true;
  }
  throw NonConvergence("Laurent trapezoid sums did not stabilize");
}

Complex born_amplitude(const RationalHardyFunction& psi_out,
                       const RationalHardyFunction& phi_in, const SMatrixModel& model,
                       BornMode mode, const QuadratureSpec& spec) {
  spec.validate();
  model.validate();
  if (psi_out.hardy_class() != HardyClass::LowerHalfPlane ||
      phi_in.hardy_class() != HardyClass::LowerHalfPlane)
    throw WrongClass("transition amplitudes take H2- wave functions");
  if (psi_out.terms().empty() || phi_in.terms().empty()) return Complex(0.0, 0.0);

  const int order = std::min(psi_out.decay_order(), 32) + std::min(phi_in.decay_order(), 32);
  auto product = [&](Complex z) -> Complex { return psi_out(z) * model.s(z) * phi_in(z); };

  if (mode == BornMode::Direct) {
    auto on_axis = [&](double e) -> Complex { return product(Complex(e, 0.0)); };
    std::vector<double> knots{model.params.er, model.params.er - model.params.gamma,
                              model.params.er + model.params.gamma};
    for (const RationalTerm& t : psi_out.terms()) knots.push_back(t.pole.real());
    for (const RationalTerm& t : phi_in.terms()) knots.push_back(t.pole.real());
    return integrate_half_line(on_axis, 0.0, order, spec, knots).value;
  }

  // Contour deformation below the pole: three straight legs 0 -> -iY ->
  // X - iY -> X, plus the untouched tail [X, inf). Sweeping past z_R inside
  // the rectangle contributes -2 pi i times the residue of the product.
  const Complex z_r = model.params.pole();
  const double gamma = model.params.gamma;
  const double y = 1.5 * std::abs(z_r.imag()) + std::max(1.0, gamma);
  const double x = std::max({2.0 * std::abs(model.params.er), model.params.er + 10.0 * gamma,
                             10.0});

  Complex pole_term{0.0, 0.0};
  if (z_r.real() > 0.0 && z_r.real() < x && z_r.imag() > -y && z_r.imag() < 0.0)
    pole_term = Complex(0.0, -2.0 * kPi) * model.pole_residue() * psi_out(z_r) * phi_in(z_r);

  // Legs are parametrized over [0, 1]; dz is constant on each.
  auto leg = [&](Complex z0, Complex z1, const std::vector<double>& knots) -> Complex {
    const Complex dz = z1 - z0;
    auto g = [&](double s) -> Complex { return product(z0 + s * dz) * dz; };
    return integrate_interval(g, 0.0, 1.0, spec, knots).value;
  };
  const Complex c0(0.0, 0.0), c1(0.0, -y), c2(x, -y), c3(x, 0.0);
  std::vector<double> mid_knots;
  if (model.params.er > 0.0 && model.params.er < x) {
    mid_knots.push_back(model.params.er / x);
    mid_knots.push_back(std::min(1.0, (model.params.er + gamma) / x));
    mid_knots.push_back(std::max(0.0, (model.params.er - gamma) / x));
  }
  const Complex deformed = leg(c0, c1, {}) + leg(c1, c2, mid_knots) + leg(c2, c3, {});

  auto on_axis = [&](double e) -> Complex { return product(Complex(e, 0.0)); };
  const Complex tail = integrate_half_line(on_axis, x, order, spec).value;

  return pole_term + deformed + tail;
}

}  // namespace resodecay
