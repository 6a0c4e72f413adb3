#include "resodecay/hardy.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "json.hpp"

namespace resodecay {

namespace {

constexpr double kAxisFloor = 1e-8;
constexpr int kZeroFunctionOrder = 1000000;

// Binomial coefficient as a double; arguments stay small here.
double binom(int n, int k) {
  double r = 1.0;
  for (int i = 1; i <= k; ++i) r = r * (n - k + i) / i;
  return r;
}

// Detects the leading power of the large-|z| expansion
// f(z) = sum_k A_k z^-k,  A_k = sum_terms c * binom(m-1+j, j) * p^j, j = k-m.
int detect_decay_order(const std::vector<RationalTerm>& terms) {
  if (terms.empty()) return kZeroFunctionOrder;
  int degree = 0;
  for (const RationalTerm& t : terms) degree += t.multiplicity;
  for (int k = 1; k <= degree; ++k) {
    Complex a{0.0, 0.0};
    double scale = 0.0;
    for (const RationalTerm& t : terms) {
      const int j = k - t.multiplicity;
      if (j < 0) continue;
      const Complex contrib =
          t.coefficient * binom(t.multiplicity - 1 + j, j) * std::pow(t.pole, j);
      a += contrib;
      scale += std::abs(contrib);
    }
    if (scale > 0.0 && std::abs(a) > 1e-10 * scale) return k;
  }
  return kZeroFunctionOrder;
}

}  // namespace

std::string hardy_class_name(HardyClass c) {
  return c == HardyClass::LowerHalfPlane ? "H2-" : "H2+";
}

HardyClass hardy_class_from_name(const std::string& name) {
  if (name == "H2-" || name == "h2-" || name == "lower") return HardyClass::LowerHalfPlane;
  if (name == "H2+" || name == "h2+" || name == "upper") return HardyClass::UpperHalfPlane;
  throw BadParams("unknown Hardy class name: " + name);
}

RationalHardyFunction::RationalHardyFunction(std::vector<RationalTerm> terms,
                                             HardyClass cls)
    : terms_(std::move(terms)), cls_(cls), decay_order_(0) {
  for (const RationalTerm& t : terms_) {
    if (t.multiplicity < 1) throw BadParams("rational term multiplicity must be >= 1");
    if (!std::isfinite(t.coefficient.real()) || !std::isfinite(t.coefficient.imag()) ||
        !std::isfinite(t.pole.real()) || !std::isfinite(t.pole.imag()))
      throw BadParams("rational term with non-finite pole or coefficient");
    const double im = t.pole.imag();
    if (std::abs(im) < kAxisFloor) {
      std::ostringstream os;
      os << "pole too close to the real axis: Im p = " << im;
      throw BadParams(os.str());
    }
    const bool above = im > 0.0;
    if (above != (cls_ == HardyClass::LowerHalfPlane)) {
      std::ostringstream os;
      os << "pole at (" << t.pole.real() << ", " << t.pole.imag()
         << ") lies in the analyticity half-plane of " << hardy_class_name(cls_);
      throw WrongClass(os.str());
    }
  }
  decay_order_ = detect_decay_order(terms_);
}

Complex RationalHardyFunction::operator()(Complex z) const {
  Complex out{0.0, 0.0};
  for (const RationalTerm& t : terms_) {
    const Complex d = z - t.pole;
    if (std::abs(d) < 1e-12 * (1.0 + std::abs(t.pole))) {
      std::ostringstream os;
      os << "evaluation at a pole: z = (" << z.real() << ", " << z.imag() << ")";
      throw EvalAtPole(os.str());
    }
    Complex dm = d;
    for (int i = 1; i < t.multiplicity; ++i) dm *= d;
    out += t.coefficient / dm;
  }
  return out;
}

RationalHardyFunction RationalHardyFunction::conjugate() const {
  std::vector<RationalTerm> terms;
  terms.reserve(terms_.size());
  for (const RationalTerm& t : terms_)
    terms.push_back({std::conj(t.pole), t.multiplicity, std::conj(t.coefficient)});
  const HardyClass flipped = cls_ == HardyClass::LowerHalfPlane
                                 ? HardyClass::UpperHalfPlane
                                 : HardyClass::LowerHalfPlane;
  return RationalHardyFunction(std::move(terms), flipped);
}

AnalyticIntegrand RationalHardyFunction::as_integrand() const {
  AnalyticIntegrand g;
  auto terms = terms_;
  g.eval = [terms](Complex z) -> Complex {
    Complex out{0.0, 0.0};
    for (const RationalTerm& t : terms) {
      Complex dm = z - t.pole;
      const Complex d = dm;
      for (int i = 1; i < t.multiplicity; ++i) dm *= d;
      out += t.coefficient / dm;
    }
    return out;
  };
  for (const RationalTerm& t : terms_) {
    PoleInfo p;
    p.location = t.pole;
    p.multiplicity = t.multiplicity;
    p.residue = (t.multiplicity == 1) ? t.coefficient : Complex(0.0, 0.0);
    g.poles.push_back(p);
  }
  g.decay_order = std::min(decay_order_, 64);
  return g;
}

std::string RationalHardyFunction::to_json() const {
  nlohmann::json j;
  j["class"] = hardy_class_name(cls_);
  j["terms"] = nlohmann::json::array();
  for (const RationalTerm& t : terms_) {
    j["terms"].push_back({{"re_pole", t.pole.real()},
                          {"im_pole", t.pole.imag()},
                          {"multiplicity", t.multiplicity},
                          {"re_coeff", t.coefficient.real()},
                          {"im_coeff", t.coefficient.imag()}});
  }
  return j.dump(2);
}

RationalHardyFunction RationalHardyFunction::from_json(const std::string& text) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(text);
  } catch (const nlohmann::json::exception& e) {
    throw InvalidData(std::string("rational function JSON does not parse: ") + e.what());
  }
  try {
    const HardyClass cls = hardy_class_from_name(j.at("class").get<std::string>());
    std::vector<RationalTerm> terms;
    for (const auto& jt : j.at("terms")) {
      RationalTerm t;
      t.pole = Complex(jt.at("re_pole").get<double>(), jt.at("im_pole").get<double>());
      t.multiplicity = jt.value("multiplicity", 1);
      t.coefficient =
          Complex(jt.at("re_coeff").get<double>(), jt.at("im_coeff").get<double>());
      terms.push_back(t);
    }
    return RationalHardyFunction(std::move(terms), cls);
  } catch (const nlohmann::json::exception& e) {
    throw InvalidData(std::string("rational function JSON is missing fields: ") + e.what());
  }
}

namespace {

// Probe points at +-0.1 and +-1 characteristic widths off the axis, two real
// positions spanning the pole cluster. Probes landing near a pole of f are
// nudged sideways.
std::vector<Complex> probe_points(const RationalHardyFunction& f) {
  double w = 0.0;
  double re_lo = std::numeric_limits<double>::infinity();
  double re_hi = -std::numeric_limits<double>::infinity();
  for (const RationalTerm& t : f.terms()) {
    w = std::max(w, std::abs(t.pole.imag()));
    re_lo = std::min(re_lo, t.pole.real());
    re_hi = std::max(re_hi, t.pole.real());
  }
  if (!(w > 0.0)) w = 1.0;
  if (!(re_lo <= re_hi)) {
    re_lo = -1.0;
    re_hi = 1.0;
  }
  if (re_hi - re_lo < w) {
    const double c = 0.5 * (re_lo + re_hi);
    re_lo = c - 0.5 * w;
    re_hi = c + 0.5 * w;
  }

  std::vector<Complex> probes;
  for (double re : {re_lo, re_hi}) {
    for (double im : {-1.0 * w, -0.1 * w, 0.1 * w, 1.0 * w}) {
      Complex z(re, im);
      for (int tries = 0; tries < 8; ++tries) {
        double dmin = std::numeric_limits<double>::infinity();
        for (const RationalTerm& t : f.terms())
          dmin = std::min(dmin, std::abs(z - t.pole));
        if (dmin > 0.05 * w) break;
        z += Complex(0.37 * w, 0.0);
      }
      probes.push_back(z);
    }
  }
  return probes;
}

}  // namespace

MembershipReport hardy_membership_check(const RationalHardyFunction& f,
                                        HardyClass claimed, double tol,
                                        const QuadratureSpec& spec) {
  if (!(tol > 0.0)) throw BadParams("membership tolerance must be positive");
  QuadratureSpec tight = spec;
  tight.rel_tol = std::min(spec.rel_tol, tol * 1e-2);
  tight.abs_tol = std::min(spec.abs_tol, tol * 1e-2);

  MembershipReport report;
  report.probes = probe_points(f);
  if (f.terms().empty()) {
    report.pass = true;
    return report;
  }

  auto on_axis = [&f](double e) -> Complex { return f(Complex(e, 0.0)); };
  std::vector<double> knots;
  for (const RationalTerm& t : f.terms()) {
    knots.push_back(t.pole.real());
    knots.push_back(t.pole.real() - std::abs(t.pole.imag()));
    knots.push_back(t.pole.real() + std::abs(t.pole.imag()));
  }

  const int order = std::min(f.decay_order(), 64);
  for (const Complex& z : report.probes) {
    const Complex k = cauchy_kernel_integral(on_axis, order, z, tight, knots).value;
    const bool analytic_side = (claimed == HardyClass::LowerHalfPlane)
                                   ? (z.imag() < 0.0)
                                   : (z.imag() > 0.0);
    if (analytic_side) {
      // Kernel sign convention: +K reproduces f below the axis for H2-,
      // -K reproduces f above the axis for H2+.
      const Complex recon = (claimed == HardyClass::LowerHalfPlane) ? k : -k;
      report.residual = std::max(report.residual, std::abs(recon - f(z)));
    } else {
      report.leakage = std::max(report.leakage, std::abs(k));
    }
  }
  report.pass = report.residual <= tol && report.leakage <= tol;
  return report;
}

Complex titchmarsh_reconstruct(const RationalHardyFunction& f, Complex z,
                               const QuadratureSpec& spec) {
  if (f.hardy_class() != HardyClass::LowerHalfPlane)
    throw WrongClass("Cauchy reconstruction implemented for H2- functions");
  if (!(z.imag() < 0.0))
    throw BadParams("reconstruction point must lie below the real axis");
  auto on_axis = [&f](double e) -> Complex { return f(Complex(e, 0.0)); };
  std::vector<double> knots;
  for (const RationalTerm& t : f.terms()) {
    knots.push_back(t.pole.real());
    knots.push_back(t.pole.real() - std::abs(t.pole.imag()));
    knots.push_back(t.pole.real() + std::abs(t.pole.imag()));
  }
  return cauchy_kernel_integral(on_axis, std::min(f.decay_order(), 64), z, spec, knots)
      .value;
}

}  // namespace resodecay
