// Python bindings for the main operations: lineshapes, S-matrix poles,
// Gamow pairings, survival curves, sampling, and the two fits.

#include <pybind11/complex.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "resodecay/decay.hpp"
#include "resodecay/fit.hpp"
#include "resodecay/gamow.hpp"
#include "resodecay/hardy.hpp"
#include "resodecay/io.hpp"
#include "resodecay/simulate.hpp"
#include "resodecay/smatrix.hpp"

namespace py = pybind11;
namespace rd = resodecay;

namespace {

rd::RationalHardyFunction make_rational(
    const std::vector<std::tuple<rd::Complex, int, rd::Complex>>& terms,
    const std::string& hardy_class) {
  std::vector<rd::RationalTerm> parsed;
  parsed.reserve(terms.size());
  for (const auto& [pole, mult, coeff] : terms)
    parsed.push_back({pole, mult, coeff});
  return rd::RationalHardyFunction(parsed, rd::hardy_class_from_name(hardy_class));
}

py::dict fit_quality_dict(const rd::FitQuality& q) {
  py::dict d;
  d["chi2"] = q.chi2;
  d["dof"] = q.dof;
  d["iterations"] = q.iterations;
  d["converged"] = q.converged;
  return d;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "resonance widths, Gamow states, and decay lifetimes";

  py::class_<rd::ResonanceParams>(m, "ResonanceParams")
      .def(py::init([](double er, double gamma, rd::Complex residue) {
             rd::ResonanceParams p{er, gamma, residue};
             p.validate();
             return p;
           }),
           py::arg("er"), py::arg("gamma"), py::arg("residue") = rd::Complex(1.0, 0.0))
      .def_readonly("er", &rd::ResonanceParams::er)
      .def_readonly("gamma", &rd::ResonanceParams::gamma)
      .def_readonly("residue", &rd::ResonanceParams::residue)
      .def("pole", &rd::ResonanceParams::pole);

  py::class_<rd::SMatrixModel>(m, "SMatrixModel")
      .def(py::init([](double er, double gamma, rd::Complex residue, double norm,
                       const std::vector<rd::Complex>& background) {
             rd::SMatrixModel model;
             model.params = {er, gamma, residue};
             model.norm = norm;
             model.background = rd::BackgroundModel(background);
             model.validate();
             return model;
           }),
           py::arg("er"), py::arg("gamma"), py::arg("residue") = rd::Complex(1.0, 0.0),
           py::arg("norm") = 1.0, py::arg("background") = std::vector<rd::Complex>{})
      .def_static("canonical_unitary", &rd::SMatrixModel::canonical_unitary,
                  py::arg("er"), py::arg("gamma"))
      .def("amplitude", &rd::SMatrixModel::amplitude, py::arg("z"))
      .def("s", &rd::SMatrixModel::s, py::arg("z"))
      .def("sigma", &rd::SMatrixModel::sigma, py::arg("e"))
      .def("pole_residue", &rd::SMatrixModel::pole_residue)
      .def("to_json", &rd::SMatrixModel::to_json)
      .def_property_readonly("er", [](const rd::SMatrixModel& mo) { return mo.params.er; })
      .def_property_readonly("gamma",
                             [](const rd::SMatrixModel& mo) { return mo.params.gamma; });

  m.def("bw_amplitude", &rd::bw_amplitude, py::arg("params"), py::arg("z"));

  m.def(
      "laurent_coefficients",
      [](const rd::SMatrixModel& model, double radius) {
        const rd::QuadratureSpec spec;
        const rd::LaurentCoefficients lc = rd::laurent_coefficients(
            [&model](rd::Complex z) { return model.s(z); }, model.params.pole(),
            {-1, 0, 1}, radius, spec);
        py::dict d;
        d["R_minus_1"] = lc.at(-1);
        d["R_0"] = lc.at(0);
        d["R_plus_1"] = lc.at(1);
        d["nodes"] = lc.nodes;
        return d;
      },
      py::arg("model"), py::arg("radius"));

  py::class_<rd::RationalHardyFunction>(m, "RationalHardyFunction")
      .def(py::init(&make_rational), py::arg("terms"), py::arg("hardy_class"))
      .def("__call__",
           [](const rd::RationalHardyFunction& f, rd::Complex z) { return f(z); })
      .def("decay_order", &rd::RationalHardyFunction::decay_order)
      .def("conjugate", &rd::RationalHardyFunction::conjugate)
      .def("to_json", &rd::RationalHardyFunction::to_json)
      .def_property_readonly("hardy_class", [](const rd::RationalHardyFunction& f) {
        return std::string(rd::hardy_class_name(f.hardy_class()));
      });

  m.def(
      "hardy_membership_check",
      [](const rd::RationalHardyFunction& f, const std::string& claimed, double tol) {
        const rd::QuadratureSpec spec;
        const rd::MembershipReport r =
            rd::hardy_membership_check(f, rd::hardy_class_from_name(claimed), tol, spec);
        py::dict d;
        d["pass"] = r.pass;
        d["residual"] = r.residual;
        d["leakage"] = r.leakage;
        d["probes"] = r.probes;
        return d;
      },
      py::arg("f"), py::arg("claimed"), py::arg("tol") = 1e-8);

  py::class_<rd::GamowKet>(m, "GamowKet")
      .def_static("from_pole", &rd::GamowKet::from_pole, py::arg("z_r"),
                  py::arg("f") = rd::Complex(1.0, 0.0))
      .def_readonly("z_r", &rd::GamowKet::z_r)
      .def_readonly("normalization", &rd::GamowKet::normalization)
      .def("gamma", &rd::GamowKet::gamma);

  m.def(
      "gamow_pairing",
      [](const rd::RationalHardyFunction& psi, const rd::GamowKet& ket) {
        const rd::QuadratureSpec spec;
        const rd::PairingResult r = rd::gamow_pairing(psi, ket, spec);
        py::dict d;
        d["quadrature_route"] = r.quadrature_route;
        d["residue_route"] = r.residue_route;
        d["discrepancy"] = r.discrepancy;
        return d;
      },
      py::arg("psi"), py::arg("ket"));

  m.def(
      "eigenvalue_residual",
      [](const rd::RationalHardyFunction& psi, const rd::GamowKet& ket) {
        const rd::QuadratureSpec spec;
        return rd::eigenvalue_residual(psi, ket, spec);
      },
      py::arg("psi"), py::arg("ket"));

  m.def(
      "evolved_pairing",
      [](const rd::RationalHardyFunction& psi, const rd::GamowKet& ket, double t,
         const std::string& route) {
        const rd::QuadratureSpec spec;
        const rd::EvolutionRoute r = route == "closed" ? rd::EvolutionRoute::Closed
                                                       : rd::EvolutionRoute::Quadrature;
        return rd::evolved_pairing(psi, ket, t, r, spec);
      },
      py::arg("psi"), py::arg("ket"), py::arg("t"), py::arg("route") = "closed");

  m.def(
      "catastrophe_probe",
      [](const rd::RationalHardyFunction& psi, const rd::GamowKet& ket, double t,
         const std::vector<double>& ray_lengths) {
        const rd::QuadratureSpec spec;
        return rd::catastrophe_probe(psi, ket, t, ray_lengths, spec);
      },
      py::arg("psi"), py::arg("ket"), py::arg("t"), py::arg("ray_lengths"));

  m.def("decay_probability_gamow", &rd::decay_probability_gamow, py::arg("gamma_total"),
        py::arg("partial_widths"), py::arg("t"), py::arg("hbar") = 1.0);

  py::class_<rd::SpectralDensity>(m, "SpectralDensity")
      .def("__call__", [](const rd::SpectralDensity& rho, double e) { return rho(e); })
      .def_readonly("er", &rd::SpectralDensity::er)
      .def_readonly("gamma", &rd::SpectralDensity::gamma)
      .def_readonly("lower_edge", &rd::SpectralDensity::lower_edge)
      .def_readonly("n", &rd::SpectralDensity::n);

  m.def(
      "normalize_density",
      [](const std::string& shape, double er, double gamma, double lower_edge) {
        const rd::DensityShape ds = shape == "full" ? rd::DensityShape::FullLineLorentzian
                                                    : rd::DensityShape::TruncatedLorentzian;
        return rd::normalize_density(ds, er, gamma, lower_edge);
      },
      py::arg("shape"), py::arg("er"), py::arg("gamma"), py::arg("lower_edge") = 0.0);

  m.def(
      "survival_probability",
      [](const rd::SpectralDensity& rho, double t) {
        const rd::QuadratureSpec spec;
        const rd::SurvivalPoint p = rd::survival_probability(rho, t, spec);
        py::dict d;
        d["amplitude"] = p.amplitude;
        d["probability"] = p.probability;
        return d;
      },
      py::arg("rho"), py::arg("t"));

  m.def(
      "ww_deviation",
      [](const rd::SpectralDensity& rho, double t) {
        const rd::QuadratureSpec spec;
        return rd::ww_deviation(rho, t, spec);
      },
      py::arg("rho"), py::arg("t"));

  m.def(
      "mean_lifetime",
      [](const rd::SpectralDensity& rho, double horizon_lifetimes) {
        const rd::QuadratureSpec spec;
        return rd::mean_lifetime(rho, spec, horizon_lifetimes);
      },
      py::arg("rho"), py::arg("horizon_lifetimes") = 30.0);

  m.def(
      "sample_lineshape",
      [](std::size_t n, const rd::SMatrixModel& model, double lo, double hi,
         std::uint64_t seed) {
        return rd::sample_lineshape(n, model, lo, hi, seed).energies;
      },
      py::arg("n"), py::arg("model"), py::arg("window_lo"), py::arg("window_hi"),
      py::arg("seed"));

  m.def(
      "sample_decays",
      [](std::size_t n, const std::vector<std::string>& labels,
         const std::vector<double>& rates, std::uint64_t seed) {
        rd::ChannelRates channels{labels, rates};
        const rd::DecayEvents ev = rd::sample_decays(n, channels, seed);
        std::vector<std::pair<double, std::string>> out;
        out.reserve(ev.events.size());
        for (const rd::DecayEvent& e : ev.events)
          out.emplace_back(e.time, ev.labels[e.channel]);
        return out;
      },
      py::arg("n"), py::arg("labels"), py::arg("rates"), py::arg("seed"));

  m.def(
      "fit_lineshape_events",
      [](const std::vector<double>& energies, const rd::SMatrixModel& model, double lo,
         double hi, const std::vector<double>& edges, int background_order) {
        rd::ScatteringEvents ev;
        ev.energies = energies;
        ev.model = model;
        ev.window_lo = lo;
        ev.window_hi = hi;
        const rd::LineshapeFit fit =
            rd::fit_lineshape(rd::bin_counts(ev, edges), background_order);
        py::dict d;
        d["er"] = fit.er;
        d["gamma"] = fit.gamma;
        d["se_er"] = fit.se_er;
        d["se_gamma"] = fit.se_gamma;
        d["quality"] = fit_quality_dict(fit.quality);
        return d;
      },
      py::arg("energies"), py::arg("model"), py::arg("window_lo"), py::arg("window_hi"),
      py::arg("edges"), py::arg("background_order") = 0);

  m.def(
      "fit_decay_events",
      [](const std::vector<double>& times, const std::vector<std::string>& channels,
         const std::vector<double>& edges, const std::string& mode) {
        rd::DecayRecords records{times, channels};
        const rd::DecayEvents ev = rd::decay_events_from_records(records);
        const rd::DecayFitMode m2 = mode == "per-channel" ? rd::DecayFitMode::PerChannel
                                                          : rd::DecayFitMode::Joint;
        const rd::DecayFit fit = rd::fit_decay(rd::bin_counts(ev, edges), m2, {});
        py::dict d;
        d["tau"] = fit.tau;
        d["se_tau"] = fit.se_tau;
        d["quality"] = fit_quality_dict(fit.quality);
        return d;
      },
      py::arg("times"), py::arg("channels"), py::arg("edges"),
      py::arg("mode") = "joint");

  m.def(
      "width_lifetime_product",
      [](double tau, double se_tau, double gamma, double se_gamma, double hbar) {
        rd::LineshapeFit lf;
        lf.gamma = gamma;
        lf.se_gamma = se_gamma;
        lf.er = 0.0;
        lf.se_er = 0.0;
        lf.quality.converged = true;
        rd::DecayFit df;
        df.tau = tau;
        df.se_tau = se_tau;
        df.quality.converged = true;
        const rd::RatioReport r = rd::width_lifetime_ratio(lf, df, hbar);
        py::dict d;
        d["product"] = r.product;
        d["se"] = r.se;
        d["pull"] = r.pull;
        d["consistent"] = r.consistent;
        return d;
      },
      py::arg("tau"), py::arg("se_tau"), py::arg("gamma"), py::arg("se_gamma"),
      py::arg("hbar") = 1.0);
}
