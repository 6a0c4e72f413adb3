// Command-line front end: synthetic resonance data, fits, and the
// width-lifetime consistency pipeline.

#include <algorithm>
#include <chrono>
#include <cstdint>
#include <filesystem>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"
#include "resodecay/decay.hpp"
#include "resodecay/fit.hpp"
#include "resodecay/gamow.hpp"
#include "resodecay/hardy.hpp"
#include "resodecay/io.hpp"
#include "resodecay/simulate.hpp"
#include "resodecay/smatrix.hpp"

namespace fs = std::filesystem;
namespace rd = resodecay;
using nlohmann::json;

namespace {

struct BinsSpec {
  double lo = 0.0, hi = 1.0;
  int n = 1;
};

BinsSpec parse_bins(const std::string& text) {
  BinsSpec b;
  const auto c1 = text.find(':');
  const auto c2 = text.find(':', c1 == std::string::npos ? c1 : c1 + 1);
  if (c1 == std::string::npos || c2 == std::string::npos)
    throw rd::BadParams("bin spec must look like lo:hi:n, got '" + text + "'");
  try {
    b.lo = std::stod(text.substr(0, c1));
    b.hi = std::stod(text.substr(c1 + 1, c2 - c1 - 1));
    b.n = std::stoi(text.substr(c2 + 1));
  } catch (const std::exception&) {
    throw rd::BadParams("bin spec must look like lo:hi:n, got '" + text + "'");
  }
  if (!(b.lo < b.hi) || b.n < 1)
    throw rd::BadParams("bin spec needs lo < hi and n >= 1, got '" + text + "'");
  return b;
}

std::vector<double> bin_edges(const BinsSpec& b) {
  std::vector<double> edges(b.n + 1);
  for (int i = 0; i <= b.n; ++i) edges[i] = b.lo + (b.hi - b.lo) * i / b.n;
  return edges;
}

// The full experiment description: resolved from built-in defaults, then the
// config file, then command-line flags, in that order.
struct Experiment {
  rd::SMatrixModel model;
  double window_lo = 1.0, window_hi = 3.0;
  std::uint64_t seed = 42;
  std::uint64_t events = 100000;
  BinsSpec energy_bins{1.0, 3.0, 16};
  bool energy_bins_explicit = false;
  BinsSpec time_bins{0.0, 15.0, 12};
  bool time_bins_explicit = false;
  rd::ChannelRates channels;
  bool channels_explicit = false;
  double hbar = 1.0;
  int background_order = 0;
  std::string decay_mode = "joint";

  Experiment() {
    model.params.er = 2.0;
    model.params.gamma = 0.2;
    model.params.residue = rd::Complex(1.0, 0.0);
    model.norm = 1.0;
  }
};

void apply_config_file(Experiment& ex, const fs::path& path) {
  json j;
  try {
    j = json::parse(rd::read_text_file(path));
  } catch (const json::exception& e) {
    throw rd::BadParams("config " + path.string() + " does not parse: " + e.what());
  }
  try {
    if (j.contains("model")) ex.model = rd::SMatrixModel::from_json(j["model"].dump());
    if (j.contains("window")) {
      ex.window_lo = j["window"].at(0).get<double>();
      ex.window_hi = j["window"].at(1).get<double>();
    }
    if (j.contains("seed")) ex.seed = j["seed"].get<std::uint64_t>();
    if (j.contains("events")) ex.events = j["events"].get<std::uint64_t>();
    auto read_bins = [](const json& jb) {
      BinsSpec b;
      b.lo = jb.at("lo").get<double>();
      b.hi = jb.at("hi").get<double>();
      b.n = jb.at("n").get<int>();
      if (!(b.lo < b.hi) || b.n < 1) throw rd::BadParams("config bins need lo < hi, n >= 1");
      return b;
    };
    if (j.contains("energy_bins")) {
      ex.energy_bins = read_bins(j["energy_bins"]);
      ex.energy_bins_explicit = true;
    }
    if (j.contains("time_bins")) {
      ex.time_bins = read_bins(j["time_bins"]);
      ex.time_bins_explicit = true;
    }
    if (j.contains("channels")) {
      ex.channels.labels.clear();
      ex.channels.rates.clear();
      for (const auto& [k, v] : j["channels"].items()) {
        ex.channels.labels.push_back(k);
        ex.channels.rates.push_back(v.get<double>());
      }
      ex.channels_explicit = true;
    }
    if (j.contains("hbar")) ex.hbar = j["hbar"].get<double>();
    if (j.contains("background_order")) ex.background_order = j["background_order"].get<int>();
    if (j.contains("decay_mode")) ex.decay_mode = j["decay_mode"].get<std::string>();
  } catch (const json::exception& e) {
    throw rd::BadParams("config " + path.string() + " is malformed: " + e.what());
  }
}

// Flags shared by every data-pipeline subcommand.
struct CommonFlags {
  std::string config;
  std::optional<std::uint64_t> seed;
  std::string out = ".";
  std::optional<double> er, gamma;
  std::optional<std::uint64_t> events;
  std::optional<std::string> bins;
  std::optional<double> hbar;
  std::optional<std::string> window;
};

void add_common_flags(CLI::App* cmd, CommonFlags& flags) {
  cmd->add_option("--config", flags.config, "experiment config JSON");
  cmd->add_option("--seed", flags.seed, "base RNG seed");
  cmd->add_option("--out", flags.out, "output directory");
  cmd->add_option("--er", flags.er, "resonance position");
  cmd->add_option("--gamma", flags.gamma, "resonance width");
  cmd->add_option("--events", flags.events, "number of events");
  cmd->add_option("--bins", flags.bins, "bin spec lo:hi:n for this command's axis");
  cmd->add_option("--hbar", flags.hbar, "hbar in your unit system (default 1)");
  cmd->add_option("--window", flags.window, "sampling window lo:hi");
}

Experiment resolve_experiment(const CommonFlags& flags, bool bins_are_time) {
  Experiment ex;
  if (!flags.config.empty()) apply_config_file(ex, flags.config);
  if (flags.seed) ex.seed = *flags.seed;
  if (flags.er) ex.model.params.er = *flags.er;
  if (flags.gamma) ex.model.params.gamma = *flags.gamma;
  if (flags.events) ex.events = *flags.events;
  if (flags.hbar) {
    if (!(*flags.hbar > 0.0)) throw rd::BadParams("--hbar must be positive");
    ex.hbar = *flags.hbar;
  }
  if (flags.window) {
    const auto c = flags.window->find(':');
    if (c == std::string::npos)
      throw rd::BadParams("--window must look like lo:hi");
    try {
      ex.window_lo = std::stod(flags.window->substr(0, c));
      ex.window_hi = std::stod(flags.window->substr(c + 1));
    } catch (const std::exception&) {
      throw rd::BadParams("--window must look like lo:hi");
    }
  }
  if (flags.bins) {
    if (bins_are_time) {
      ex.time_bins = parse_bins(*flags.bins);
      ex.time_bins_explicit = true;
    } else {
      ex.energy_bins = parse_bins(*flags.bins);
      ex.energy_bins_explicit = true;
    }
  }
  ex.model.validate();
  if (!(ex.window_lo < ex.window_hi) || ex.window_lo < 0.0)
    throw rd::BadWindow("sampling window must satisfy 0 <= lo < hi");

  // Unconfigured pieces follow the model: total decay rate Gamma / hbar split
  // 1:3 over two channels. Default binning is deliberately coarse: with
  // 1/max(count,1) weights, every low-count bin drags the estimate down a
  // little, so bins are kept wide enough to stay in the high-count regime.
  const double tau = ex.hbar / ex.model.params.gamma;
  if (!ex.channels_explicit) {
    const double r_total = 1.0 / tau;
    ex.channels.labels = {"a", "b"};
    ex.channels.rates = {0.25 * r_total, 0.75 * r_total};
  }
  ex.channels.validate();
  if (!ex.energy_bins_explicit) {
    const double er = ex.model.params.er;
    const double gamma = ex.model.params.gamma;
    double lo = std::max(ex.window_lo, er - 3.0 * gamma);
    double hi = std::min(ex.window_hi, er + 3.0 * gamma);
    if (!(lo < hi)) {
      lo = ex.window_lo;
      hi = ex.window_hi;
    }
    ex.energy_bins = BinsSpec{lo, hi, 16};
  }
  if (!ex.time_bins_explicit) ex.time_bins = BinsSpec{0.0, 3.0 * tau, 12};
  return ex;
}

json experiment_json(const Experiment& ex) {
  json j;
  j["model"] = json::parse(ex.model.to_json());
  j["window"] = {ex.window_lo, ex.window_hi};
  j["seed"] = ex.seed;
  j["events"] = ex.events;
  j["energy_bins"] = {{"lo", ex.energy_bins.lo}, {"hi", ex.energy_bins.hi},
                      {"n", ex.energy_bins.n}};
  j["time_bins"] = {{"lo", ex.time_bins.lo}, {"hi", ex.time_bins.hi},
                    {"n", ex.time_bins.n}};
  j["channels"] = json::object();
  for (std::size_t i = 0; i < ex.channels.labels.size(); ++i)
    j["channels"][ex.channels.labels[i]] = ex.channels.rates[i];
  j["hbar"] = ex.hbar;
  j["background_order"] = ex.background_order;
  j["decay_mode"] = ex.decay_mode;
  return j;
}

fs::path prepare_out_dir(const std::string& out) {
  fs::path dir(out);
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw rd::BadParams("cannot create output directory " + dir.string());
  return dir;
}

void write_config_echo(const fs::path& dir, const Experiment& ex) {
  rd::write_text_file(dir / "config_used.json", experiment_json(ex).dump(2) + "\n");
}

void write_run_meta(const fs::path& dir, const std::string& command) {
  // The one file that is allowed to differ between reruns.
  const auto now = std::chrono::system_clock::now().time_since_epoch();
  json j;
  j["command"] = command;
  j["unix_time"] =
      std::chrono::duration_cast<std::chrono::milliseconds>(now).count() / 1000.0;
  rd::write_text_file(dir / "run_meta.json", j.dump(2) + "\n");
}

int synth_xsec(const CommonFlags& flags) {
  const Experiment ex = resolve_experiment(flags, false);
  const fs::path dir = prepare_out_dir(flags.out);
  const rd::ScatteringEvents events = rd::sample_lineshape(
      ex.events, ex.model, ex.window_lo, ex.window_hi, ex.seed);
  rd::write_scattering_csv(dir / "xsec_events.csv", events);
  rd::write_binned_csv(dir / "xsec_binned.csv",
                       rd::bin_counts(events, bin_edges(ex.energy_bins)), "E");
  write_config_echo(dir, ex);
  write_run_meta(dir, "synth-xsec");
  std::cout << "wrote " << (dir / "xsec_events.csv").string() << " (" << events.energies.size()
            << " events)\n";
  return 0;
}

int synth_decay(const CommonFlags& flags) {
  const Experiment ex = resolve_experiment(flags, true);
  const fs::path dir = prepare_out_dir(flags.out);
  const rd::DecayEvents events = rd::sample_decays(ex.events, ex.channels, ex.seed);
  rd::write_decay_csv(dir / "decay_events.csv", events);
  rd::write_binned_csv(dir / "decay_binned.csv",
                       rd::bin_counts(events, bin_edges(ex.time_bins)), "t");
  write_config_echo(dir, ex);
  write_run_meta(dir, "synth-decay");
  std::cout << "wrote " << (dir / "decay_events.csv").string() << " ("
            << events.events.size() << " events)\n";
  return 0;
}

// Returns 2 (the fit-failure exit code) when the fit ran but did not
// converge; diagnostics land on stderr, output is still written.
int fit_xsec(const CommonFlags& flags, const std::string& input, int background_order_flag,
             bool background_order_set) {
  Experiment ex = resolve_experiment(flags, false);
  if (background_order_set) ex.background_order = background_order_flag;
  const fs::path dir = prepare_out_dir(flags.out);

  const std::vector<double> energies = rd::read_energies_csv(input);
  rd::ScatteringEvents events;
  events.energies = energies;
  events.model = ex.model;
  events.window_lo = ex.window_lo;
  events.window_hi = ex.window_hi;
  const rd::BinnedCounts counts = rd::bin_counts(events, bin_edges(ex.energy_bins));

  const rd::LineshapeFit fit = rd::fit_lineshape(counts, ex.background_order);
  rd::write_text_file(dir / "xsec_fit.json", rd::lineshape_fit_to_json(fit));
  write_config_echo(dir, ex);
  write_run_meta(dir, "fit-xsec");
  std::cout << "Gamma = " << rd::format_double(fit.gamma) << " +- "
            << rd::format_double(fit.se_gamma) << " (chi2/dof = "
            << rd::format_double(fit.quality.chi2) << "/" << fit.quality.dof << ")\n";
  if (!fit.quality.converged) {
    std::cerr << "fit-xsec: fit did not converge within the iteration budget\n";
    return 2;
  }
  return 0;
}

int fit_decay_cmd(const CommonFlags& flags, const std::string& input,
                  const std::string& mode_flag) {
  Experiment ex = resolve_experiment(flags, true);
  if (!mode_flag.empty()) ex.decay_mode = mode_flag;
  const fs::path dir = prepare_out_dir(flags.out);

  const rd::DecayEvents events = rd::decay_events_from_records(rd::read_decay_csv(input));
  const rd::BinnedCounts counts = rd::bin_counts(events, bin_edges(ex.time_bins));

  rd::DecayFitMode mode;
  if (ex.decay_mode == "joint")
    mode = rd::DecayFitMode::Joint;
  else if (ex.decay_mode == "per-channel")
    mode = rd::DecayFitMode::PerChannel;
  else
    throw rd::BadParams("decay mode must be 'joint' or 'per-channel'");

  rd::FitOptions options;
  const rd::LifetimeEstimate moment = rd::mean_lifetime_estimator(events);
  options.tau_init = moment.tau;

  const rd::DecayFit fit = rd::fit_decay(counts, mode, options);
  rd::write_text_file(dir / "decay_fit.json", rd::decay_fit_to_json(fit));
  write_config_echo(dir, ex);
  write_run_meta(dir, "fit-decay");
  std::cout << "tau = " << rd::format_double(fit.tau) << " +- "
            << rd::format_double(fit.se_tau) << " (chi2/dof = "
            << rd::format_double(fit.quality.chi2) << "/" << fit.quality.dof << ")\n";
  if (!fit.quality.converged) {
    std::cerr << "fit-decay: fit did not converge within the iteration budget\n";
    return 2;
  }
  return 0;
}

int ratio_cmd(const CommonFlags& flags) {
  const Experiment ex = resolve_experiment(flags, false);
  const fs::path dir = prepare_out_dir(flags.out);

  // Generation seeds differ per stream so the two data sets are independent.
  const rd::ScatteringEvents xsec = rd::sample_lineshape(
      ex.events, ex.model, ex.window_lo, ex.window_hi, ex.seed);
  const rd::DecayEvents decays =
      rd::sample_decays(ex.events, ex.channels, ex.seed ^ 0x9E3779B97F4A7C15ull);

  rd::write_scattering_csv(dir / "xsec_events.csv", xsec);
  rd::write_decay_csv(dir / "decay_events.csv", decays);

  const rd::BinnedCounts xsec_counts = rd::bin_counts(xsec, bin_edges(ex.energy_bins));
  const rd::BinnedCounts decay_counts = rd::bin_counts(decays, bin_edges(ex.time_bins));
  rd::write_binned_csv(dir / "xsec_binned.csv", xsec_counts, "E");
  rd::write_binned_csv(dir / "decay_binned.csv", decay_counts, "t");

  const rd::LineshapeFit lfit = rd::fit_lineshape(xsec_counts, ex.background_order);
  rd::write_text_file(dir / "xsec_fit.json", rd::lineshape_fit_to_json(lfit));

  rd::FitOptions options;
  options.tau_init = rd::mean_lifetime_estimator(decays).tau;
  const rd::DecayFitMode mode = ex.decay_mode == "per-channel"
                                    ? rd::DecayFitMode::PerChannel
                                    : rd::DecayFitMode::Joint;
  const rd::DecayFit dfit = rd::fit_decay(decay_counts, mode, options);
  rd::write_text_file(dir / "decay_fit.json", rd::decay_fit_to_json(dfit));

  write_config_echo(dir, ex);
  write_run_meta(dir, "ratio");

  if (!lfit.quality.converged || !dfit.quality.converged) {
    std::cerr << "ratio: a fit did not converge; no ratio written\n";
    return 2;
  }

  const rd::RatioReport report = rd::width_lifetime_ratio(lfit, dfit, ex.hbar);
  rd::write_text_file(dir / "ratio.json", rd::ratio_to_json(report));
  std::cout << "tau * Gamma / hbar = " << rd::format_double(report.product) << " +- "
            << rd::format_double(report.se) << " (pull "
            << rd::format_double(report.pull) << ")\n";
  return 0;
}

int gamow_verify(const CommonFlags& flags) {
  const Experiment ex = resolve_experiment(flags, false);
  const fs::path dir = prepare_out_dir(flags.out);
  const double gamma = ex.model.params.gamma;
  const rd::Complex z_r(ex.model.params.er, -0.5 * gamma);

  // A fixed well-behaved wave function off the pole.
  const rd::RationalHardyFunction psi(
      {{rd::Complex(0.0, 1.0), 2, rd::Complex(1.0, 0.0)}},
      rd::HardyClass::LowerHalfPlane);
  const rd::GamowKet ket = rd::GamowKet::from_pole(z_r);
  const rd::QuadratureSpec spec;

  json j;
  const rd::PairingResult pairing = rd::gamow_pairing(psi, ket, spec);
  j["pairing"] = {
      {"quadrature", {pairing.quadrature_route.real(), pairing.quadrature_route.imag()}},
      {"residue", {pairing.residue_route.real(), pairing.residue_route.imag()}},
      {"discrepancy", pairing.discrepancy}};
  j["eigenvalue_residual"] = rd::eigenvalue_residual(psi, ket, spec);

  const double tau = ex.hbar / gamma;
  j["evolution"] = json::array();
  for (double t : {0.0, 0.5 * tau, tau, 3.0 * tau}) {
    const rd::Complex closed =
        rd::evolved_pairing(psi, ket, t / ex.hbar, rd::EvolutionRoute::Closed, spec);
    const rd::Complex quad =
        rd::evolved_pairing(psi, ket, t / ex.hbar, rd::EvolutionRoute::Quadrature, spec);
    j["evolution"].push_back(
        {{"t", t},
         {"closed", {closed.real(), closed.imag()}},
         {"quadrature", {quad.real(), quad.imag()}},
         {"rel_diff", std::abs(closed - quad) / std::max(std::abs(closed), 1e-300)}});
  }

  const double t_neg = -tau / ex.hbar;
  const std::vector<double> lengths{50.0 * gamma, 100.0 * gamma};
  const std::vector<double> magnitudes =
      rd::catastrophe_probe(psi, ket, t_neg, lengths, spec);
  j["catastrophe"] = {{"t", -tau},
                      {"ray_lengths", lengths},
                      {"magnitudes", magnitudes},
                      {"growth_ratio", magnitudes[1] / magnitudes[0]}};

  rd::write_text_file(dir / "gamow_verify.json", j.dump(2) + "\n");
  write_run_meta(dir, "gamow-verify");
  std::cout << "pairing discrepancy " << rd::format_double(pairing.discrepancy)
            << ", eigenvalue residual " << rd::format_double(j["eigenvalue_residual"].get<double>())
            << ", catastrophe growth " << rd::format_double(magnitudes[1] / magnitudes[0])
            << "\n";
  return 0;
}

int survival_cmd(const CommonFlags& flags, const std::string& shape, double tmax_flag,
                 int points) {
  const Experiment ex = resolve_experiment(flags, false);
  const fs::path dir = prepare_out_dir(flags.out);
  const double gamma = ex.model.params.gamma;
  const double tau = ex.hbar / gamma;

  rd::DensityShape ds;
  if (shape == "truncated")
    ds = rd::DensityShape::TruncatedLorentzian;
  else if (shape == "full")
    ds = rd::DensityShape::FullLineLorentzian;
  else
    throw rd::BadParams("--shape must be 'truncated' or 'full'");
  const rd::SpectralDensity rho =
      rd::normalize_density(ds, ex.model.params.er, gamma, 0.0);

  const double tmax = tmax_flag > 0.0 ? tmax_flag : 5.0 * tau;
  if (points < 2) throw rd::BadParams("--points must be >= 2");
  std::vector<double> times(points);
  for (int i = 0; i < points; ++i) times[i] = tmax * i / (points - 1);
  for (double& t : times) t /= ex.hbar;  // core runs in hbar = 1 units

  const rd::QuadratureSpec spec;
  const rd::SurvivalCurve curve = rd::survival_curve(rho, times, spec);
  rd::SurvivalCurve display = curve;
  for (std::size_t i = 0; i < display.times.size(); ++i) display.times[i] *= ex.hbar;
  rd::write_survival_csv(dir / "survival.csv", display);

  double sup_dev = 0.0;
  for (double d : curve.deviations) sup_dev = std::max(sup_dev, std::abs(d));
  json j;
  j["shape"] = shape;
  j["tau_expected"] = tau;
  j["mean_lifetime"] = rd::mean_lifetime(rho, spec) * ex.hbar;
  j["sup_deviation_on_grid"] = sup_dev;
  rd::write_text_file(dir / "survival_summary.json", j.dump(2) + "\n");
  write_run_meta(dir, "survival");
  std::cout << "mean lifetime " << rd::format_double(j["mean_lifetime"].get<double>())
            << " (tau = " << rd::format_double(tau) << "), sup |P - exp| = "
            << rd::format_double(sup_dev) << "\n";
  return 0;
}

int hardy_check(const CommonFlags& flags, const std::string& input,
                const std::string& claimed, double tol) {
  const fs::path dir = prepare_out_dir(flags.out);
  const rd::RationalHardyFunction f =
      rd::RationalHardyFunction::from_json(rd::read_text_file(input));
  const rd::HardyClass cls =
      claimed.empty() ? f.hardy_class() : rd::hardy_class_from_name(claimed);

  const rd::QuadratureSpec spec;
  const rd::MembershipReport report = rd::hardy_membership_check(f, cls, tol, spec);

  json j;
  j["class_claimed"] = rd::hardy_class_name(cls);
  j["class_constructed"] = rd::hardy_class_name(f.hardy_class());
  j["residual"] = report.residual;
  j["leakage"] = report.leakage;
  j["pass"] = report.pass;
  j["tol"] = tol;
  j["probes"] = json::array();
  for (const rd::Complex& p : report.probes) j["probes"].push_back({p.real(), p.imag()});
  rd::write_text_file(dir / "membership.json", j.dump(2) + "\n");
  write_run_meta(dir, "hardy-check");
  std::cout << (report.pass ? "pass" : "fail") << " (residual "
            << rd::format_double(report.residual) << ", leakage "
            << rd::format_double(report.leakage) << ")\n";
  return 0;
}

int laurent_cmd(const CommonFlags& flags, double radius_flag) {
  const Experiment ex = resolve_experiment(flags, false);
  const fs::path dir = prepare_out_dir(flags.out);
  const double gamma = ex.model.params.gamma;
  const rd::SMatrixModel model =
      rd::SMatrixModel::canonical_unitary(ex.model.params.er, gamma);
  const double radius = radius_flag > 0.0 ? radius_flag : 0.5 * gamma;

  const rd::QuadratureSpec spec;
  const rd::LaurentCoefficients lc = rd::laurent_coefficients(
      [&model](rd::Complex z) { return model.s(z); }, model.params.pole(), {-1, 0, 1},
      radius, spec);

  json j;
  j["expansion_point"] = {lc.expansion_point.real(), lc.expansion_point.imag()};
  j["radius"] = lc.radius;
  j["nodes"] = lc.nodes;
  j["R_minus_1"] = {lc.at(-1).real(), lc.at(-1).imag()};
  j["R_0"] = {lc.at(0).real(), lc.at(0).imag()};
  j["R_plus_1"] = {lc.at(1).real(), lc.at(1).imag()};
  rd::write_text_file(dir / "laurent.json", j.dump(2) + "\n");
  write_run_meta(dir, "laurent");
  std::cout << "R_-1 = (" << rd::format_double(lc.at(-1).real()) << ", "
            << rd::format_double(lc.at(-1).imag()) << ")\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"resonance lineshapes, Gamow states, and decay-law pipelines"};
  app.require_subcommand(1);

  CommonFlags synth_xsec_flags, synth_decay_flags, fit_xsec_flags, fit_decay_flags,
      ratio_flags, gamow_flags, survival_flags, hardy_flags, laurent_flags;

  auto* c_synth_xsec =
      app.add_subcommand("synth-xsec", "sample scattering energies from the lineshape");
  add_common_flags(c_synth_xsec, synth_xsec_flags);

  auto* c_synth_decay =
      app.add_subcommand("synth-decay", "sample decay times and channels");
  add_common_flags(c_synth_decay, synth_decay_flags);

  std::string fit_xsec_input;
  int background_order_flag = 0;
  auto* c_fit_xsec = app.add_subcommand("fit-xsec", "fit the lineshape to event data");
  add_common_flags(c_fit_xsec, fit_xsec_flags);
  c_fit_xsec->add_option("--input", fit_xsec_input, "scattering events CSV")->required();
  auto* bg_opt = c_fit_xsec->add_option("--background-order", background_order_flag,
                                        "polynomial background order (-1 for none)");

  std::string fit_decay_input, fit_decay_mode;
  auto* c_fit_decay = app.add_subcommand("fit-decay", "fit the decay-time histogram");
  add_common_flags(c_fit_decay, fit_decay_flags);
  c_fit_decay->add_option("--input", fit_decay_input, "decay events CSV")->required();
  c_fit_decay->add_option("--mode", fit_decay_mode, "joint or per-channel");

  auto* c_ratio = app.add_subcommand(
      "ratio", "synthesize both data sets, fit both, and report tau * Gamma / hbar");
  add_common_flags(c_ratio, ratio_flags);

  auto* c_gamow = app.add_subcommand(
      "gamow-verify", "pairing routes, eigenvalue residual, semigroup checks");
  add_common_flags(c_gamow, gamow_flags);

  std::string survival_shape = "truncated";
  double survival_tmax = 0.0;
  int survival_points = 101;
  auto* c_survival =
      app.add_subcommand("survival", "survival amplitude and deviation curves");
  add_common_flags(c_survival, survival_flags);
  c_survival->add_option("--shape", survival_shape, "truncated or full");
  c_survival->add_option("--tmax", survival_tmax, "largest time on the grid");
  c_survival->add_option("--points", survival_points, "grid size");

  std::string hardy_input, hardy_class;
  double hardy_tol = 1e-8;
  auto* c_hardy = app.add_subcommand("hardy-check", "numerical Hardy-class membership");
  add_common_flags(c_hardy, hardy_flags);
  c_hardy->add_option("--input", hardy_input, "rational function JSON")->required();
  c_hardy->add_option("--class", hardy_class, "claimed class, H2- or H2+");
  c_hardy->add_option("--tol", hardy_tol, "pass threshold");

  double laurent_radius = 0.0;
  auto* c_laurent =
      app.add_subcommand("laurent", "Laurent coefficients of the canonical S-matrix");
  add_common_flags(c_laurent, laurent_flags);
  c_laurent->add_option("--radius", laurent_radius, "contour radius (default Gamma/2)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    std::cerr << e.what() << "\n";
    return 1;
  }

  try {
    if (c_synth_xsec->parsed()) return synth_xsec(synth_xsec_flags);
    if (c_synth_decay->parsed()) return synth_decay(synth_decay_flags);
    if (c_fit_xsec->parsed())
      return fit_xsec(fit_xsec_flags, fit_xsec_input, background_order_flag,
                      bg_opt->count() > 0);
    if (c_fit_decay->parsed())
      return fit_decay_cmd(fit_decay_flags, fit_decay_input, fit_decay_mode);
    if (c_ratio->parsed()) return ratio_cmd(ratio_flags);
    if (c_gamow->parsed()) return gamow_verify(gamow_flags);
    if (c_survival->parsed())
      return survival_cmd(survival_flags, survival_shape, survival_tmax, survival_points);
    if (c_hardy->parsed()) return hardy_check(hardy_flags, hardy_input, hardy_class, hardy_tol);
    if (c_laurent->parsed()) return laurent_cmd(laurent_flags, laurent_radius);
    std::cerr << "no subcommand\n";
    return 1;
  } catch (const rd::InvalidData& e) {
    std::cerr << "invalid input: " << e.what() << "\n";
    return 3;
  } catch (const rd::DegenerateData& e) {
    std::cerr << "invalid input: " << e.what() << "\n";
    return 3;
  } catch (const rd::FitNonConvergence& e) {
    std::cerr << "fit failed: " << e.what() << "\n";
    return 2;
  } catch (const rd::UnconvergedInput& e) {
    std::cerr << "fit failed: " << e.what() << "\n";
    return 2;
  } catch (const rd::BadParams& e) {
    std::cerr << "bad configuration: " << e.what() << "\n";
    return 1;
  } catch (const rd::Error& e) {
    std::cerr << "numerical failure: " << e.what() << "\n";
    return 4;
  } catch (const std::exception& e) {
    std::cerr << "internal error: " << e.what() << "\n";
    return 4;
  }
}
