#include "resodecay/fit.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <sstream>

namespace resodecay {

namespace {

constexpr double kPi = 3.141592653589793238462643383279502884;

// Gauss-Legendre nodes and weights on [-1, 1] by Newton iteration on P_n.
void gauss_legendre(int n, std::vector<double>& x, std::vector<double>& w) {
  x.assign(n, 0.0);
  w.assign(n, 0.0);
  for (int i = 0; i < (n + 1) / 2; ++i) {
    double t = std::cos(kPi * (i + 0.75) / (n + 0.5));
    double dp = 0.0;
    for (int it = 0; it < 100; ++it) {
      double p0 = 1.0, p1 = 0.0;
      for (int j = 0; j < n; ++j) {
        const double p2 = p1;
        p1 = p0;
        p0 = ((2.0 * j + 1.0) * t * p1 - j * p2) / (j + 1.0);
      }
      dp = n * (t * p0 - p1) / (t * t - 1.0);
      const double dt = -p0 / dp;
      t += dt;
      if (std::abs(dt) < 1e-15) break;
    }
    x[i] = -t;
    x[n - 1 - i] = t;
    w[i] = w[n - 1 - i] = 2.0 / ((1.0 - t * t) * dp * dp);
  }
}

const std::vector<double>& gl16_nodes() {
  static std::vector<double> x, w;
  if (x.empty()) gauss_legendre(16, x, w);
  return x;
}
const std::vector<double>& gl16_weights() {
  static std::vector<double> x, w;
  if (w.empty()) gauss_legendre(16, x, w);
  return w;
}

// model(theta, mu, jac): fills the predicted bin contents and, when jac is
// non-null, d mu / d theta.
using ModelFn =
    std::function<void(const Eigen::VectorXd&, Eigen::VectorXd&, Eigen::MatrixXd*)>;

struct EngineResult {
  Eigen::VectorXd theta;
  Eigen::MatrixXd covariance;
  double chi2 = 0.0;
  int iterations = 0;
  bool converged = false;
};

double weighted_chi2(const Eigen::VectorXd& y, const Eigen::VectorXd& w,
                     const Eigen::VectorXd& mu) {
  const Eigen::VectorXd r = y - mu;
  return (w.array() * r.array().square()).sum();
}

// Damped Gauss-Newton: the damping factor grows tenfold on a rejected step
// and shrinks threefold on an accepted one. guard may throw BoundaryStuck
// when an iterate runs off to a parameter-space boundary.
EngineResult gauss_newton(const ModelFn& model, const Eigen::VectorXd& y,
                          const Eigen::VectorXd& w, Eigen::VectorXd theta,
                          const FitOptions& opt,
                          const std::function<void(const Eigen::VectorXd&)>& guard) {
  const int n = static_cast<int>(y.size());
  const int p = static_cast<int>(theta.size());
  if (n < p) throw DegenerateData("fewer bins than fit parameters");

  Eigen::VectorXd mu(n);
  Eigen::MatrixXd jac(n, p);
  model(theta, mu, &jac);
  double chi2 = weighted_chi2(y, w, mu);
  if (!std::isfinite(chi2)) throw DegenerateData("initial fit point is not finite");

  auto normal_matrix = [&](const Eigen::MatrixXd& j) -> Eigen::MatrixXd {
    return j.transpose() * w.asDiagonal() * j;
  };

  Eigen::MatrixXd a = normal_matrix(jac);
  double lambda = 1e-3 * a.diagonal().maxCoeff();
  if (!(lambda > 0.0)) throw DegenerateData("flat model: normal matrix has zero diagonal");

  EngineResult out;
  bool converged = false;
  int iter = 0;
  for (; iter < opt.max_iterations && !converged; ++iter) {
    const Eigen::VectorXd r = y - mu;
    const Eigen::VectorXd g = jac.transpose() * (w.asDiagonal() * r);

    bool accepted = false;
    Eigen::VectorXd trial, mu_trial(n);
    double chi2_trial = 0.0, step_rel = 0.0;
    for (int rejects = 0; rejects < 80; ++rejects) {
      Eigen::MatrixXd damped = a;
      damped.diagonal().array() += lambda;
      const Eigen::VectorXd delta = damped.ldlt().solve(g);
      trial = theta + delta;
      if (guard) guard(trial);
      bool finite = trial.allFinite();
      if (finite) {
        model(trial, mu_trial, nullptr);
        chi2_trial = weighted_chi2(y, w, mu_trial);
        finite = std::isfinite(chi2_trial);
      }
      if (finite && chi2_trial <= chi2) {
        accepted = true;
        lambda /= 3.0;
        step_rel = delta.norm() / (theta.norm() + 1e-300);
        break;
      }
      lambda *= 10.0;
      if (lambda > 1e18 * std::max(a.diagonal().maxCoeff(), 1e-300))
        throw FitNonConvergence("damping factor exploded; no downhill step exists");
    }
    if (!accepted) throw FitNonConvergence("no acceptable step after 80 damping rejects");

    const double chi2_rel = (chi2 - chi2_trial) / std::max(chi2, 1e-300);
    theta = trial;
    chi2 = chi2_trial;
    model(theta, mu, &jac);
    a = normal_matrix(jac);
    if (step_rel < opt.step_tol && chi2_rel < opt.chi2_tol) converged = true;
  }

  out.theta = theta;
  out.chi2 = chi2;
  out.iterations = iter;
  out.converged = converged;

  // Covariance from the undamped normal matrix at the optimum.
  Eigen::FullPivLU<Eigen::MatrixXd> lu(a);
  if (!lu.isInvertible())
    throw DegenerateData("singular normal matrix at the fit optimum");
  out.covariance = lu.inverse();
  return out;
}

std::vector<double> flatten(const Eigen::MatrixXd& m) {
  std::vector<double> out;
  out.reserve(m.rows() * m.cols());
  for (int i = 0; i < m.rows(); ++i)
    for (int j = 0; j < m.cols(); ++j) out.push_back(m(i, j));
  return out;
}

}  // namespace

LineshapeFit fit_lineshape(const BinnedCounts& counts, int background_order,
                           const FitOptions& options) {
  if (counts.channels.size() != 1)
    throw BadParams("the lineshape fit takes single-channel counts");
  if (background_order < -1 || background_order > 6)
    throw BadParams("background order must be between -1 (none) and 6");
  const std::size_t nb = counts.n_bins();
  if (nb < 5) throw DegenerateData("too few bins for a lineshape fit");

  const std::vector<double>& edges = counts.edges;
  const std::vector<std::uint64_t>& c = counts.counts[0];
  const double span = edges.back() - edges.front();

  std::size_t nonzero = 0;
  double total = 0.0;
  for (std::uint64_t k : c) {
    if (k > 0) ++nonzero;
    total += static_cast<double>(k);
  }
  const int nbg = background_order + 1;
  const int npar = 3 + nbg;
  if (nonzero < static_cast<std::size_t>(npar) + 1)
    throw DegenerateData("too few occupied bins for a lineshape fit");

  // Peak and crude FWHM for the start point.
  std::size_t peak_bin = 0;
  for (std::size_t i = 0; i < nb; ++i)
    if (c[i] > c[peak_bin]) peak_bin = i;
  const double peak = static_cast<double>(c[peak_bin]);
  auto center = [&edges](std::size_t i) { return 0.5 * (edges[i] + edges[i + 1]); };
  double lo_half = edges.front(), hi_half = edges.back();
  for (std::size_t i = peak_bin; i-- > 0;)
    if (static_cast<double>(c[i]) < 0.5 * peak) {
      lo_half = center(i);
      break;
    }
  for (std::size_t i = peak_bin + 1; i < nb; ++i)
    if (static_cast<double>(c[i]) < 0.5 * peak) {
      hi_half = center(i);
      break;
    }
  const double min_width = (edges[1] - edges[0]);
  double er0 = options.er_init.value_or(center(peak_bin));
  double gamma0 = options.gamma_init.value_or(std::max(hi_half - lo_half, min_width));
  const double binw = span / static_cast<double>(nb);
  double norm0 = peak / (binw * 4.0 / (gamma0 * gamma0));
  if (!(norm0 > 0.0)) norm0 = 1.0;

  Eigen::VectorXd y(nb), w(nb);
  for (std::size_t i = 0; i < nb; ++i) {
    y(static_cast<int>(i)) = static_cast<double>(c[i]);
    w(static_cast<int>(i)) = 1.0 / std::max(1.0, static_cast<double>(c[i]));
  }

  const std::vector<double>& gx = gl16_nodes();
  const std::vector<double>& gw = gl16_weights();

  // theta = (er, log gamma, log norm, b_0..b_k)
  auto model = [&](const Eigen::VectorXd& th, Eigen::VectorXd& mu, Eigen::MatrixXd* jac) {
    const double er = th(0);
    const double gamma = std::exp(th(1));
    const double nu = std::exp(th(2));
    const Complex zr(er, -0.5 * gamma);

    for (std::size_t i = 0; i < nb; ++i) {
      double integral = 0.0;
      Eigen::VectorXd dint = Eigen::VectorXd::Zero(npar);
      // Split wide bins so the pole region is always resolved.
      const double a0 = edges[i], b0 = edges[i + 1];
      const int pieces = std::min(
          16, std::max(1, static_cast<int>(std::ceil(2.0 * (b0 - a0) / gamma))));
      for (int s = 0; s < pieces; ++s) {
        const double a = a0 + (b0 - a0) * s / pieces;
        const double b = a0 + (b0 - a0) * (s + 1) / pieces;
        const double mid = 0.5 * (a + b), half = 0.5 * (b - a);
        for (std::size_t q = 0; q < gx.size(); ++q) {
          const double e = mid + half * gx[q];
          const double wt = gw[q] * half;
          const Complex d = Complex(e, 0.0) - zr;
          const Complex pole_amp = 1.0 / d;
          Complex amp = pole_amp;
          double epow = 1.0;
          for (int j = 0; j < nbg; ++j) {
            amp += th(3 + j) * epow;
            epow *= e;
          }
          integral += wt * std::norm(amp);
          if (jac) {
            const Complex damp_der = pole_amp * pole_amp;  // d amp / d er
            dint(0) += wt * 2.0 * (std::conj(amp) * damp_der).real();
            dint(1) += wt * 2.0 *
                       (std::conj(amp) * (damp_der * Complex(0.0, -0.5 * gamma))).real();
            epow = 1.0;
            for (int j = 0; j < nbg; ++j) {
              dint(3 + j) += wt * 2.0 * (std::conj(amp) * epow).real();
              epow *= e;
            }
          }
        }
      }
      mu(static_cast<int>(i)) = nu * integral;
      if (jac) {
        for (int j = 0; j < npar; ++j) jac->coeffRef(static_cast<int>(i), j) = nu * dint(j);
        jac->coeffRef(static_cast<int>(i), 2) = nu * integral;  // d mu / d log norm
      }
    }
  };

  auto guard = [&](const Eigen::VectorXd& th) {
    if (th(1) < std::log(1e-9 * span))
      throw BoundaryStuck("width collapsed toward zero during the fit");
    if (th(1) > std::log(1e6 * span))
      throw BoundaryStuck("width ran away during the fit");
    if (std::abs(th(0) - 0.5 * (edges.front() + edges.back())) > 20.0 * span)
      throw BoundaryStuck("resonance position left the data window");
  };

  Eigen::VectorXd theta0(npar);
  theta0(0) = er0;
  theta0(1) = std::log(gamma0);
  theta0(2) = std::log(norm0);
  for (int j = 0; j < nbg; ++j) theta0(3 + j) = 0.0;

  const EngineResult res = gauss_newton(model, y, w, theta0, options, guard);

  LineshapeFit fit;
  fit.er = res.theta(0);
  fit.gamma = std::exp(res.theta(1));
  fit.norm = std::exp(res.theta(2));
  for (int j = 0; j < nbg; ++j) fit.background.push_back(res.theta(3 + j));

  // Report in (er, gamma, norm, b...) coordinates; the log parameters carry
  // a diagonal Jacobian.
  Eigen::VectorXd scale(npar);
  scale(0) = 1.0;
  scale(1) = fit.gamma;
  scale(2) = fit.norm;
  for (int j = 0; j < nbg; ++j) scale(3 + j) = 1.0;
  const Eigen::MatrixXd cov =
      scale.asDiagonal() * res.covariance * scale.asDiagonal();

  fit.se_er = std::sqrt(std::max(0.0, cov(0, 0)));
  fit.se_gamma = std::sqrt(std::max(0.0, cov(1, 1)));
  fit.se_norm = std::sqrt(std::max(0.0, cov(2, 2)));
  for (int j = 0; j < nbg; ++j)
    fit.se_background.push_back(std::sqrt(std::max(0.0, cov(3 + j, 3 + j))));
  fit.covariance = flatten(cov);
  fit.parameter_names = {"E_R", "Gamma", "norm"};
  for (int j = 0; j < nbg; ++j) fit.parameter_names.push_back("b" + std::to_string(j));

  fit.quality.chi2 = res.chi2;
  fit.quality.dof = static_cast<int>(nb) - npar;
  fit.quality.iterations = res.iterations;
  fit.quality.converged = res.converged;
  return fit;
}

namespace {

struct DecayChannelData {
  std::vector<double> y;
  double total = 0.0;
  std::size_t nonzero = 0;
};

double slope_tau_guess(const BinnedCounts& counts) {
  // Least-squares slope of log(count) over occupied bins, channels summed.
  const std::size_t nb = counts.n_bins();
  double sx = 0.0, sy = 0.0, sxx = 0.0, sxy = 0.0;
  std::size_t n = 0;
  for (std::size_t i = 0; i < nb; ++i) {
    double tot = 0.0;
    for (const auto& ch : counts.counts) tot += static_cast<double>(ch[i]);
    if (tot <= 0.0) continue;
    const double t = 0.5 * (counts.edges[i] + counts.edges[i + 1]);
    const double l = std::log(tot);
    sx += t;
    sy += l;
    sxx += t * t;
    sxy += t * l;
    ++n;
  }
  const double span = counts.edges.back() - counts.edges.front();
  if (n < 2) return 0.5 * span;
  const double denom = n * sxx - sx * sx;
  if (std::abs(denom) < 1e-300) return 0.5 * span;
  const double slope = (n * sxy - sx * sy) / denom;
  if (!(slope < 0.0)) return 0.5 * span;
  return -1.0 / slope;
}

// One shared-tau exponential fit over the given channels of the histogram.
DecayFit fit_decay_joint(const BinnedCounts& counts,
                         const std::vector<std::size_t>& which,
                         const FitOptions& options) {
  const std::size_t nb = counts.n_bins();
  const std::size_t nc = which.size();
  const std::vector<double>& edges = counts.edges;
  const double span = edges.back() - edges.front();

  for (std::size_t q : which) {
    double tot = 0.0;
    std::size_t nz = 0;
    for (std::uint64_t k : counts.counts[q]) {
      tot += static_cast<double>(k);
      if (k > 0) ++nz;
    }
    if (tot <= 0.0)
      throw DegenerateData("decay channel '" + counts.channels[q] + "' has no events");
    if (nz < 2)
      throw DegenerateData("decay channel '" + counts.channels[q] +
                           "' occupies fewer than two bins");
  }

  const int npar = 1 + static_cast<int>(nc);
  Eigen::VectorXd y(nc * nb), w(nc * nb);
  for (std::size_t a = 0; a < nc; ++a)
    for (std::size_t i = 0; i < nb; ++i) {
      const double v = static_cast<double>(counts.counts[which[a]][i]);
      y(static_cast<int>(a * nb + i)) = v;
      w(static_cast<int>(a * nb + i)) = 1.0 / std::max(1.0, v);
    }

  double tau0 = options.tau_init.value_or(slope_tau_guess(counts));
  tau0 = std::min(std::max(tau0, 1e-6 * span), 1e6 * span);

  Eigen::VectorXd theta0(npar);
  theta0(0) = std::log(tau0);
  for (std::size_t a = 0; a < nc; ++a) {
    double tot = 0.0;
    for (std::uint64_t k : counts.counts[which[a]]) tot += static_cast<double>(k);
    const double window = std::exp(-edges.front() / tau0) - std::exp(-edges.back() / tau0);
    theta0(1 + static_cast<int>(a)) = std::log(tot / std::max(window, 1e-12));
  }

  // theta = (log tau, log c_1..log c_C);
  // mu = c (exp(-t0 / tau) - exp(-t1 / tau)), the exact bin integral of an
  // exponential with unit amplitude at t = 0 times tau... normalized so that
  // c equals the channel total over an infinite window.
  auto model = [&](const Eigen::VectorXd& th, Eigen::VectorXd& mu, Eigen::MatrixXd* jac) {
    const double tau = std::exp(th(0));
    if (jac) jac->setZero();
    for (std::size_t a = 0; a < nc; ++a) {
      const double cc = std::exp(th(1 + static_cast<int>(a)));
      for (std::size_t i = 0; i < nb; ++i) {
        const double t0 = edges[i], t1 = edges[i + 1];
        const double e0 = std::exp(-t0 / tau), e1 = std::exp(-t1 / tau);
        const int row = static_cast<int>(a * nb + i);
        mu(row) = cc * (e0 - e1);
        if (jac) {
          jac->coeffRef(row, 0) = cc * ((t0 / tau) * e0 - (t1 / tau) * e1);
          jac->coeffRef(row, 1 + static_cast<int>(a)) = mu(row);
        }
      }
    }
  };

  auto guard = [&](const Eigen::VectorXd& th) {
    if (th(0) < std::log(1e-9 * span) || th(0) > std::log(1e9 * span))
      throw BoundaryStuck("lifetime ran to a boundary during the fit");
  };

  const EngineResult res = gauss_newton(model, y, w, theta0, options, guard);

  DecayFit fit;
  fit.mode = DecayFitMode::Joint;
  fit.tau = std::exp(res.theta(0));
  Eigen::VectorXd scale(npar);
  scale(0) = fit.tau;
  for (std::size_t a = 0; a < nc; ++a) {
    const double cc = std::exp(res.theta(1 + static_cast<int>(a)));
    fit.channels.push_back(counts.channels[which[a]]);
    fit.amplitudes.push_back(cc);
    scale(1 + static_cast<int>(a)) = cc;
  }
  const Eigen::MatrixXd cov = scale.asDiagonal() * res.covariance * scale.asDiagonal();
  fit.se_tau = std::sqrt(std::max(0.0, cov(0, 0)));
  for (std::size_t a = 0; a < nc; ++a)
    fit.se_amplitudes.push_back(
        std::sqrt(std::max(0.0, cov(1 + static_cast<int>(a), 1 + static_cast<int>(a)))));
  fit.covariance = flatten(cov);
  fit.parameter_names = {"tau"};
  for (std::size_t a = 0; a < nc; ++a) fit.parameter_names.push_back("c_" + fit.channels[a]);

  fit.quality.chi2 = res.chi2;
  fit.quality.dof = static_cast<int>(nc * nb) - npar;
  fit.quality.iterations = res.iterations;
  fit.quality.converged = res.converged;
  return fit;
}

}  // namespace

DecayFit fit_decay(const BinnedCounts& counts, DecayFitMode mode,
                   const FitOptions& options) {
  if (counts.channels.empty() || counts.counts.empty())
    throw DegenerateData("decay histogram has no channels");
  if (counts.n_bins() < 3) throw DegenerateData("too few bins for a decay fit");

  std::vector<std::size_t> all(counts.channels.size());
  for (std::size_t i = 0; i < all.size(); ++i) all[i] = i;

  if (mode == DecayFitMode::Joint) return fit_decay_joint(counts, all, options);

  // Independent single-channel fits, then an inverse-variance combination of
  // the lifetimes. Cross-channel covariances are zero by construction.
  DecayFit fit;
  fit.mode = DecayFitMode::PerChannel;
  double wsum = 0.0, wmean = 0.0;
  double chi2 = 0.0;
  int dof = 0, iterations = 0;
  bool converged = true;
  for (std::size_t q = 0; q < counts.channels.size(); ++q) {
    const DecayFit one = fit_decay_joint(counts, {q}, options);
    fit.channels.push_back(counts.channels[q]);
    fit.amplitudes.push_back(one.amplitudes[0]);
    fit.se_amplitudes.push_back(one.se_amplitudes[0]);
    fit.tau_by_channel.push_back(one.tau);
    fit.se_tau_by_channel.push_back(one.se_tau);
    if (!(one.se_tau > 0.0))
      throw DegenerateData("per-channel lifetime has no uncertainty; cannot combine");
    const double wt = 1.0 / (one.se_tau * one.se_tau);
    wsum += wt;
    wmean += wt * one.tau;
    chi2 += one.quality.chi2;
    dof += one.quality.dof;
    iterations = std::max(iterations, one.quality.iterations);
    converged = converged && one.quality.converged;
  }
  fit.tau = wmean / wsum;
  fit.se_tau = std::sqrt(1.0 / wsum);

  fit.parameter_names = {"tau"};
  for (const std::string& l : fit.channels) fit.parameter_names.push_back("c_" + l);
  const int npar = 1 + static_cast<int>(fit.channels.size());
  Eigen::MatrixXd cov = Eigen::MatrixXd::Zero(npar, npar);
  cov(0, 0) = fit.se_tau * fit.se_tau;
  for (std::size_t a = 0; a < fit.channels.size(); ++a) {
    const int i = 1 + static_cast<int>(a);
    cov(i, i) = fit.se_amplitudes[a] * fit.se_amplitudes[a];
  }
  fit.covariance = flatten(cov);

  fit.quality.chi2 = chi2;
  fit.quality.dof = dof;
  fit.quality.iterations = iterations;
  fit.quality.converged = converged;
  return fit;
}

RatioReport width_lifetime_ratio(const LineshapeFit& lineshape, const DecayFit& decay,
                                 double hbar) {
  if (!(hbar > 0.0)) throw BadParams("hbar must be positive");
  if (!lineshape.quality.converged)
    throw UnconvergedInput("lineshape fit did not converge; ratio not meaningful");
  if (!decay.quality.converged)
    throw UnconvergedInput("decay fit did not converge; ratio not meaningful");
  if (!(lineshape.gamma > 0.0) || !(decay.tau > 0.0))
    throw BadParams("ratio needs positive width and lifetime");

  RatioReport r;
  r.tau = decay.tau;
  r.gamma = lineshape.gamma;
  r.hbar = hbar;
  r.product = decay.tau * lineshape.gamma / hbar;
  const double rel_tau = decay.se_tau / decay.tau;
  const double rel_gamma = lineshape.se_gamma / lineshape.gamma;
  r.se = r.product * std::sqrt(rel_tau * rel_tau + rel_gamma * rel_gamma);
  if (r.se > 0.0) {
    r.pull = (r.product - 1.0) / r.se;
  } else {
    r.pull = (r.product == 1.0) ? 0.0 : std::numeric_limits<double>::infinity();
  }
  r.consistent = std::abs(r.pull) <= 3.0;
  return r;
}

}  // namespace resodecay
