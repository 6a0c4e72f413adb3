#include "resodecay/quadrature.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <set>
#include <sstream>

namespace resodecay {

namespace {

constexpr double kPi = 3.141592653589793238462643383279502884;

// Gauss-Kronrod 7-15 abscissae and weights on [-1, 1] (QUADPACK dqk15).
// Odd indices are the embedded Gauss-7 nodes.
constexpr double kXgk[8] = {
    0.991455371120812639206854697526329,
    0.949107912342758524526189684047851,
    0.864864423359769072789712788640926,
    0.741531185599394439863864773280788,
    0.586087235467691130294144838258730,
    0.405845151377397166906606412076961,
    0.207784955007898467600689403773245,
    0.000000000000000000000000000000000};
constexpr double kWgk[8] = {
    0.022935322010529224963732008058970,
    0.063092092629978553290700663189204,
    0.104790010322250183839876322541518,
    0.140653259715525918745189590510238,
    0.169004726639267902826583426598550,
    0.190350578064785409913256402421014,
    0.204432940075298892414161999234649,
    0.209482141084727828012999174891714};
constexpr double kWg[4] = {
    0.129484966168869693270611432679082,
    0.279705391489276667901467771423780,
    0.381830050505118944950369775488975,
    0.417959183673469387755102040816327};

struct Panel {
  double a = 0.0, b = 0.0;
  Complex value{0.0, 0.0};
  double error = 0.0;
};

Complex eval_checked(const Integrand& f, double x) {
  Complex v = f(x);
  if (!std::isfinite(v.real()) || !std::isfinite(v.imag())) {
    std::ostringstream os;
    os << "integrand is not finite at x = " << x;
    throw NonFiniteIntegrand(os.str());
  }
  return v;
}

Panel gk15(const Integrand& f, double a, double b) {
  const double center = 0.5 * (a + b);
  const double half = 0.5 * (b - a);

  Complex fc = eval_checked(f, center);
  Complex resk = kWgk[7] * fc;
  Complex resg = kWg[3] * fc;
  double resabs = kWgk[7] * std::abs(fc);

  Complex fv[14];
  for (int j = 0; j < 7; ++j) {
    const double dx = half * kXgk[j];
    Complex f1 = eval_checked(f, center - dx);
    Complex f2 = eval_checked(f, center + dx);
    fv[2 * j] = f1;
    fv[2 * j + 1] = f2;
    resk += kWgk[j] * (f1 + f2);
    resabs += kWgk[j] * (std::abs(f1) + std::abs(f2));
    if (j % 2 == 1) resg += kWg[(j - 1) / 2] * (f1 + f2);
  }

  const Complex mean = resk * 0.5;
  double resasc = kWgk[7] * std::abs(fc - mean);
  for (int j = 0; j < 7; ++j)
    resasc += kWgk[j] * (std::abs(fv[2 * j] - mean) + std::abs(fv[2 * j + 1] - mean));

  Panel p;
  p.a = a;
  p.b = b;
  p.value = resk * half;
  resabs *= std::abs(half);
  resasc *= std::abs(half);

  double err = std::abs((resk - resg) * half);
  if (resasc != 0.0 && err != 0.0)
    err = resasc * std::min(1.0, std::pow(200.0 * err / resasc, 1.5));
  const double eps50 = 50.0 * std::numeric_limits<double>::epsilon();
  if (resabs > std::numeric_limits<double>::min() / eps50)
    err = std::max(err, eps50 * resabs);
  p.error = err;
  return p;
}

struct HeapOrder {
  bool operator()(const Panel& x, const Panel& y) const { return x.error < y.error; }
};

struct AdaptiveOut {
  Complex value{0.0, 0.0};
  double error = 0.0;
  int panels = 0;
};

// Refines the worst panel until the summed error estimate meets tolerance or
// the subdivision budget runs out.
AdaptiveOut adapt(const Integrand& f, const std::vector<double>& knots,
                  const QuadratureSpec& spec) {
  std::vector<Panel> heap, frozen;
  heap.reserve(knots.size() + 64);
  Complex total{0.0, 0.0};
  double toterr = 0.0;
  int used = 0;

  for (std::size_t i = 0; i + 1 < knots.size(); ++i) {
    if (!(knots[i] < knots[i + 1])) continue;
    Panel p = gk15(f, knots[i], knots[i + 1]);
    total += p.value;
    toterr += p.error;
    heap.push_back(p);
    ++used;
  }
  std::make_heap(heap.begin(), heap.end(), HeapOrder{});

  auto tol = [&]() { return std::max(spec.abs_tol, spec.rel_tol * std::abs(total)); };

  while (toterr > tol() && used < spec.max_subdivisions && !heap.empty()) {
    std::pop_heap(heap.begin(), heap.end(), HeapOrder{});
    Panel worst = heap.back();
    heap.pop_back();
    const double mid = 0.5 * (worst.a + worst.b);
    if (!(worst.a < mid && mid < worst.b)) {
      // Width at machine resolution; keep the panel but stop touching it.
      frozen.push_back(worst);
      continue;
    }
    Panel left = gk15(f, worst.a, mid);
    Panel right = gk15(f, mid, worst.b);
    total += left.value + right.value - worst.value;
    toterr += left.error + right.error - worst.error;
    heap.push_back(left);
    std::push_heap(heap.begin(), heap.end(), HeapOrder{});
    heap.push_back(right);
    std::push_heap(heap.begin(), heap.end(), HeapOrder{});
    ++used;
  }

  // Clean final sum over all surviving panels.
  Complex value{0.0, 0.0};
  double error = 0.0;
  for (const Panel& p : heap) {
    value += p.value;
    error += p.error;
  }
  for (const Panel& p : frozen) {
    value += p.value;
    error += p.error;
  }

  if (error > std::max(spec.abs_tol, spec.rel_tol * std::abs(value))) {
    std::ostringstream os;
    os << "adaptive quadrature did not reach tolerance: error estimate " << error
       << " after " << used << " panels";
    throw NonConvergence(os.str());
  }

  AdaptiveOut out;
  out.value = value;
  out.error = error;
  out.panels = used;
  return out;
}

// Sorted, deduplicated knot list covering [lo, hi]: endpoints, requested
// interior features, and a geometric ladder from the feature cluster out to
// the endpoints so that far-away structure cannot hide inside one huge panel.
std::vector<double> build_knots(double lo, double hi,
                                const std::vector<double>& features) {
  std::set<double> s;
  s.insert(lo);
  s.insert(hi);
  double flo = std::numeric_limits<double>::infinity();
  double fhi = -std::numeric_limits<double>::infinity();
  for (double x : features) {
    if (x > lo && x < hi) {
      s.insert(x);
      flo = std::min(flo, x);
      fhi = std::max(fhi, x);
    }
  }
  if (!(flo <= fhi)) {
    // No interior features. Integrands here decay away from the origin, so
    // anchor the ladder at 0 when it is inside, otherwise at the endpoint
    // nearest the origin; panel widths then grow with the distance from the
    // remaining mass. A midpoint anchor on a huge interval would leave the
    // near-edge panel so wide that no quadrature node lands on the mass.
    const double anchor = (lo < 0.0 && hi > 0.0)
                              ? 0.0
                              : (std::abs(lo) <= std::abs(hi) ? lo : hi);
    flo = fhi = anchor;
    s.insert(anchor);
  }
  double d0 = std::max(1.0, 0.25 * (fhi - flo));
  for (double d = d0; fhi + d < hi; d *= 2.0) s.insert(fhi + d);
  for (double d = d0; flo - d > lo; d *= 2.0) s.insert(flo - d);
  return std::vector<double>(s.begin(), s.end());
}

// Inserts uniform knots so no panel spans more than a few oscillation
// periods of exp(-i E t).
void add_oscillation_knots(std::vector<double>& knots, double t) {
  if (knots.size() < 2 || t == 0.0) return;
  const double period = 2.0 * kPi / std::abs(t);
  std::set<double> s(knots.begin(), knots.end());
  int budget = 30000;  // total insertions across all gaps
  for (std::size_t i = 0; i + 1 < knots.size() && budget > 0; ++i) {
    const double a = knots[i], b = knots[i + 1];
    const double w = b - a;
    if (w <= period * 1.5) continue;
    const int n = std::min(budget, static_cast<int>(std::ceil(w / period)));
    for (int k = 1; k < n; ++k) s.insert(a + w * k / n);
    budget -= n - 1;
  }
  knots.assign(s.begin(), s.end());
}

// Largest |f(x)| x^p over a few probe points on one side; used for tail bounds.
double tail_coefficient(const Integrand& f, double sign_radius, int order) {
  const double probes[3] = {1.0, 0.75, 0.5};
  double c = 0.0;
  for (double frac : probes) {
    const double x = sign_radius * frac;
    const Complex v = f(x);
    if (std::isfinite(v.real()) && std::isfinite(v.imag()))
      c = std::max(c, std::abs(v) * std::pow(std::abs(x), order));
  }
  return c;
}

double power_tail_bound(const Integrand& f, double radius, int order, bool both_sides) {
  const double cp = tail_coefficient(f, radius, order);
  const double cm = both_sides ? tail_coefficient(f, -radius, order) : 0.0;
  return (cp + cm) / ((order - 1) * std::pow(radius, order - 1));
}

void check_tail(double tail, const QuadratureSpec& spec, const Complex& value) {
  if (tail > std::max(spec.abs_tol, spec.rel_tol * std::abs(value)) && tail > spec.abs_tol) {
    std::ostringstream os;
    os << "analytic tail bound " << tail << " exceeds tolerance at truncation radius "
       << spec.trunc_radius;
    throw TailBoundExceeded(os.str());
  }
}

// Int_0^len g(s) ds where g already contains its exponential damping factor.
// Expands geometric windows until the analytic remainder bound passes below
// tolerance; remainder_bound(s) must bound |Int_s^inf g|.
struct RayOut {
  Complex value{0.0, 0.0};
  double error = 0.0;
  int panels = 0;
  double tail = 0.0;
};

RayOut integrate_ray(const Integrand& g, const QuadratureSpec& spec, double window0,
                     const std::function<double(double)>& remainder_bound) {
  RayOut out;
  QuadratureSpec piece = spec;
  double s0 = 0.0;
  double w = window0;
  for (int k = 0; k < 200; ++k) {
    const double s1 = std::min(s0 + w, spec.trunc_radius);
    piece.abs_tol = std::max(spec.abs_tol * 0.1, spec.rel_tol * std::abs(out.value) * 0.1);
    if (piece.abs_tol <= 0.0) piece.abs_tol = spec.abs_tol * 0.1;
    AdaptiveOut a = adapt(g, {s0, 0.5 * (s0 + s1), s1}, piece);
    out.value += a.value;
    out.error += a.error;
    out.panels += a.panels;
    const double rem = remainder_bound(s1);
    if (rem <= std::max(spec.abs_tol, spec.rel_tol * std::abs(out.value))) {
      out.tail = rem;
      return out;
    }
    if (s1 >= spec.trunc_radius) {
      std::ostringstream os;
      os << "ray remainder bound " << rem << " still above tolerance at s = " << s1;
      throw TailBoundExceeded(os.str());
    }
    s0 = s1;
    w *= 2.0;
  }
  throw NonConvergence("ray integration failed to terminate");
}

// One rotated vertical ray starting at the real anchor. direction = -1 drops
// into the lower half-plane, +1 climbs into the upper one. Returns
// Int_path f(z) exp(-i z t) dz with path z(s) = anchor + direction * i s,
// s from 0 to len (infinity when len is nullopt).
RayOut fourier_ray(const AnalyticIntegrand& f, double anchor, double t, int direction,
                   std::optional<double> len, const QuadratureSpec& spec) {
  const Complex unit(0.0, static_cast<double>(direction));
  auto g = [&f, anchor, t, unit](double s) -> Complex {
    const Complex z = anchor + unit * s;
    return f.eval(z) * std::exp(Complex(0.0, -1.0) * z * t) * unit;
  };

  if (len) {
    // Fixed-length ray; with t * direction > 0 the integrand grows toward the
    // far end, so seed knots accumulate there.
    std::vector<double> knots{0.0, *len};
    const double rate = std::abs(t);
    if (rate > 0.0) {
      for (int j = 1; j <= 24; ++j) {
        const double s = *len - j * (2.0 / rate);
        if (s <= 0.0) break;
        knots.push_back(s);
      }
    }
    std::sort(knots.begin(), knots.end());
    QuadratureSpec local = spec;
    local.abs_tol = 0.0;  // pure relative control; magnitudes vary wildly
    local.rel_tol = std::max(spec.rel_tol, 1e-12);
    AdaptiveOut a = adapt(g, knots, local);
    RayOut out;
    out.value = a.value;
    out.error = a.error;
    out.panels = a.panels;
    return out;
  }

  // Infinite ray: the factor exp(-|t| s) (or the declared power decay when
  // t == 0) drives the remainder bound.
  const double damp = std::abs(t);
  const int p = f.decay_order;
  auto remainder = [&f, anchor, unit, damp, p](double s) -> double {
    const Complex z = anchor + unit * s;
    const double mag = std::abs(f.eval(z));
    if (!std::isfinite(mag)) return std::numeric_limits<double>::infinity();
    if (damp > 0.0) {
      // |f| keeps shrinking beyond s, so Int_s^inf |f(z(u))| e^{-damp u} du
      // <= |f(z(s))| e^{-damp s} / damp; the 2 is slack.
      return 2.0 * mag * std::exp(-damp * s) / damp;
    }
    // Undamped: fall back on the declared power-law decay along the ray.
    const double c = mag * std::pow(std::hypot(anchor, s), p);
    return c / ((p - 1) * std::pow(std::max(s, 1e-300), p - 1));
  };
  const double w0 = damp > 0.0 ? std::max(1.0 / damp, 1e-3) : std::max(1.0, std::abs(anchor));
  return integrate_ray(g, spec, w0, remainder);
}

}  // namespace

void QuadratureSpec::validate() const {
  if (!(rel_tol > 0.0) || !(abs_tol >= 0.0))
    throw BadParams("quadrature tolerances must be positive");
  if (!(trunc_radius > 0.0) || !std::isfinite(trunc_radius))
    throw BadParams("truncation radius must be positive and finite");
  if (max_subdivisions < 1) throw BadParams("max_subdivisions must be >= 1");
  if (!(osc_switch > 0.0)) throw BadParams("osc_switch must be positive");
  if (!(pole_axis_floor > 0.0)) throw BadParams("pole_axis_floor must be positive");
}

std::vector<double> AnalyticIntegrand::feature_knots() const {
  std::vector<double> out;
  out.reserve(poles.size() * 3);
  for (const PoleInfo& p : poles) {
    const double re = p.location.real();
    const double im = std::abs(p.location.imag());
    out.push_back(re);
    out.push_back(re - std::max(im, 1e-6));
    out.push_back(re + std::max(im, 1e-6));
  }
  return out;
}

IntegralResult integrate_interval(const Integrand& f, double a, double b,
                                  const QuadratureSpec& spec,
                                  const std::vector<double>& extra_knots) {
  spec.validate();
  if (!(a < b) || !std::isfinite(a) || !std::isfinite(b))
    throw BadParams("integration interval must satisfy a < b and be finite");
  std::set<double> s{a, b};
  for (double x : extra_knots)
    if (x > a && x < b) s.insert(x);
  AdaptiveOut out = adapt(f, std::vector<double>(s.begin(), s.end()), spec);
  IntegralResult r;
  r.value = out.value;
  r.error = out.error;
  r.subdivisions = out.panels;
  return r;
}

IntegralResult integrate_real_line(const Integrand& f, int decay_order,
                                   const QuadratureSpec& spec,
                                   const std::vector<double>& extra_knots) {
  spec.validate();
  if (decay_order < 2)
    throw BadParams("real-line integration requires declared decay order >= 2");
  const double R = spec.trunc_radius;
  AdaptiveOut out = adapt(f, build_knots(-R, R, extra_knots), spec);
  IntegralResult r;
  r.value = out.value;
  r.error = out.error;
  r.subdivisions = out.panels;
  r.tail_bound = power_tail_bound(f, R, decay_order, true);
  check_tail(r.tail_bound, spec, r.value);
  return r;
}

IntegralResult integrate_half_line(const Integrand& f, double a, int decay_order,
                                   const QuadratureSpec& spec,
                                   const std::vector<double>& extra_knots) {
  spec.validate();
  if (decay_order < 2)
    throw BadParams("half-line integration requires declared decay order >= 2");
  if (!std::isfinite(a)) throw BadParams("half-line lower edge must be finite");
  const double R = std::max(spec.trunc_radius, std::abs(a) * 2.0 + 1.0);
  AdaptiveOut out = adapt(f, build_knots(a, R, extra_knots), spec);
  IntegralResult r;
  r.value = out.value;
  r.error = out.error;
  r.subdivisions = out.panels;
  r.tail_bound = power_tail_bound(f, R, decay_order, false);
  check_tail(r.tail_bound, spec, r.value);
  return r;
}

IntegralResult cauchy_kernel_integral(const Integrand& f, int decay_order,
                                      Complex z, const QuadratureSpec& spec,
                                      const std::vector<double>& extra_knots) {
  spec.validate();
  if (decay_order < 1)
    throw BadParams("Cauchy kernel integration requires declared decay order >= 1");
  if (std::abs(z.imag()) < spec.pole_axis_floor) {
    std::ostringstream os;
    os << "kernel point too close to the real axis: Im z = " << z.imag()
       << ", floor = " << spec.pole_axis_floor;
    throw PoleOnAxis(os.str());
  }
  auto g = [&f, z](double e) -> Complex { return f(e) / (Complex(e, 0.0) - z); };
  std::vector<double> knots = extra_knots;
  const double w = std::abs(z.imag());
  for (double k : {0.0, 1.0, 3.0, 10.0}) {
    knots.push_back(z.real() - k * w);
    knots.push_back(z.real() + k * w);
  }
  IntegralResult r = integrate_real_line(g, decay_order + 1, spec, knots);
  r.value *= Complex(0.0, 1.0) / (2.0 * kPi);
  r.error /= 2.0 * kPi;
  r.tail_bound /= 2.0 * kPi;
  return r;
}

IntegralResult oscillatory_fourier_integral(const AnalyticIntegrand& rho, double t,
                                            double lower, const QuadratureSpec& spec) {
  spec.validate();
  if (!std::isfinite(lower)) throw BadParams("lower edge must be finite");
  if (rho.decay_order < 2)
    throw BadParams("oscillatory integration requires declared decay order >= 2");

  bool rotate;
  switch (spec.strategy) {
    case OscStrategy::Direct: rotate = false; break;
    case OscStrategy::RotatedContour: rotate = true; break;
    case OscStrategy::Auto:
    default: rotate = std::abs(t) * spec.trunc_radius > spec.osc_switch; break;
  }
  if (t == 0.0) rotate = false;

  if (!rotate) {
    auto g = [&rho, t](double e) -> Complex {
      return rho.eval(Complex(e, 0.0)) * std::exp(Complex(0.0, -e * t));
    };
    const double R = std::max(spec.trunc_radius, std::abs(lower) * 2.0 + 1.0);
    std::vector<double> knots = build_knots(lower, R, rho.feature_knots());
    add_oscillation_knots(knots, t);
    AdaptiveOut out = adapt(g, knots, spec);
    IntegralResult r;
    r.value = out.value;
    r.error = out.error;
    r.subdivisions = out.panels;
    r.tail_bound = power_tail_bound(g, R, rho.decay_order, false);
    check_tail(r.tail_bound, spec, r.value);
    return r;
  }

  if (!rho.continuable())
    throw StrategyUnavailable(
        "rotated contour requires an analytic continuation; none was supplied");

  const int dir = (t >= 0.0) ? -1 : +1;
  Complex residue_part{0.0, 0.0};
  for (const PoleInfo& p : rho.poles) {
    const double im = p.location.imag();
    const bool swept = (dir == -1) ? (im < 0.0) : (im > 0.0);
    if (!swept) continue;
    if (std::abs(p.location.real() - lower) < spec.pole_axis_floor)
      throw StrategyUnavailable("pole sits on the rotated ray; shift the lower edge");
    if (p.location.real() < lower) continue;
    if (p.multiplicity != 1)
      throw StrategyUnavailable("rotation would sweep past a higher-order pole");
    residue_part += p.residue * std::exp(Complex(0.0, -1.0) * p.location * t);
  }
  residue_part *= Complex(0.0, 2.0 * kPi * dir);

  RayOut ray = fourier_ray(rho, lower, t, dir, std::nullopt, spec);
  // Int_lower^inf = swept residues + the vertical ray contribution; the ray
  // as parametrized already carries its orientation (0 -> i*dir*inf), and the
  // closed-contour bookkeeping leaves exactly +ray for dir = -1 (quarter turn
  // down) and +ray for dir = +1 as well, with the residue sign absorbed above.
  IntegralResult r;
  r.value = residue_part + ray.value;
  r.error = ray.error;
  r.subdivisions = ray.panels;
  r.tail_bound = ray.tail;
  return r;
}

namespace {

double auto_central_halfwidth(const AnalyticIntegrand& f) {
  double re = 0.0, im = 0.0;
  for (const PoleInfo& p : f.poles) {
    re = std::max(re, std::abs(p.location.real()));
    im = std::max(im, std::abs(p.location.imag()));
  }
  return std::max(1.0, re + std::max(2.0, 2.0 * im));
}

}  // namespace

IntegralResult fourier_real_line(const AnalyticIntegrand& f, double t,
                                 const QuadratureSpec& spec,
                                 std::optional<double> r0) {
  spec.validate();
  if (!f.continuable())
    throw StrategyUnavailable("full-line Fourier transform requires a continuation");
  if (f.decay_order < 2)
    throw BadParams("full-line Fourier transform requires decay order >= 2");
  const double R0 = r0.value_or(auto_central_halfwidth(f));
  for (const PoleInfo& p : f.poles)
    if (std::abs(p.location.real()) >= R0 - spec.pole_axis_floor)
      throw StrategyUnavailable("central segment too narrow: pole beyond +-r0");

  auto g = [&f, t](double e) -> Complex {
    return f.eval(Complex(e, 0.0)) * std::exp(Complex(0.0, -e * t));
  };
  std::vector<double> knots = build_knots(-R0, R0, f.feature_knots());
  add_oscillation_knots(knots, t);
  AdaptiveOut central = adapt(g, knots, spec);

  const int dir = (t >= 0.0) ? -1 : +1;
  RayOut right = fourier_ray(f, R0, t, dir, std::nullopt, spec);
  RayOut left = fourier_ray(f, -R0, t, dir, std::nullopt, spec);

  IntegralResult r;
  r.value = central.value + right.value - left.value;
  r.error = central.error + right.error + left.error;
  r.subdivisions = central.panels + right.panels + left.panels;
  r.tail_bound = right.tail + left.tail;
  return r;
}

IntegralResult fourier_real_line_truncated(const AnalyticIntegrand& f, double t,
                                           double ray_length,
                                           const QuadratureSpec& spec,
                                           std::optional<double> r0) {
  spec.validate();
  if (!f.continuable())
    throw StrategyUnavailable("truncated Fourier contour requires a continuation");
  if (!(ray_length > 0.0)) throw BadParams("ray_length must be positive");
  const double R0 = r0.value_or(auto_central_halfwidth(f));
  for (const PoleInfo& p : f.poles)
    if (std::abs(p.location.real()) >= R0 - spec.pole_axis_floor)
      throw StrategyUnavailable("central segment too narrow: pole beyond +-r0");

  auto g = [&f, t](double e) -> Complex {
    return f.eval(Complex(e, 0.0)) * std::exp(Complex(0.0, -e * t));
  };
  std::vector<double> knots = build_knots(-R0, R0, f.feature_knots());
  add_oscillation_knots(knots, t);
  AdaptiveOut central = adapt(g, knots, spec);

  // Rays always point down, exactly as the t >= 0 contour would; at t < 0
  // the integrand grows along them, which is the point of the probe.
  RayOut right = fourier_ray(f, R0, t, -1, ray_length, spec);
  RayOut left = fourier_ray(f, -R0, t, -1, ray_length, spec);

  IntegralResult r;
  r.value = central.value + right.value - left.value;
  r.error = central.error + right.error + left.error;
  r.subdivisions = central.panels + right.panels + left.panels;
  return r;
}

}  // namespace resodecay
