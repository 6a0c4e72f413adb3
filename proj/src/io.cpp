#include "resodecay/io.hpp"

#include <charconv>
#include <fstream>
#include <sstream>
#include <system_error>

#include "json.hpp"

namespace resodecay {

std::string format_double(double x) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof(buf), x);
  return std::string(buf, res.ptr);
}

std::uint64_t fnv1a64(std::string_view s) {
  std::uint64_t h = 0xCBF29CE484222325ull;
  for (unsigned char c : s) {
    h ^= c;
    h *= 0x100000001B3ull;
  }
  return h;
}

namespace {

std::string hex16(std::uint64_t v) {
  static const char* digits = "0123456789abcdef";
  std::string out(16, '0');
  for (int i = 15; i >= 0; --i) {
    out[i] = digits[v & 0xF];
    v >>= 4;
  }
  return out;
}

double parse_double_strict(std::string_view tok, const std::filesystem::path& path,
                           std::size_t line) {
  double v = 0.0;
  const char* first = tok.data();
  const char* last = tok.data() + tok.size();
  const auto res = std::from_chars(first, last, v);
  if (res.ec != std::errc() || res.ptr != last) {
    std::ostringstream os;
    os << path.string() << ":" << line << ": not a number: '" << tok << "'";
    throw InvalidData(os.str());
  }
  return v;
}

std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t' || s.front() == '\r'))
    s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r'))
    s.remove_suffix(1);
  return s;
}

}  // namespace

std::string model_digest(const SMatrixModel& model) {
  return hex16(fnv1a64(model.to_json()));
}

std::string rates_to_json(const ChannelRates& rates) {
  rates.validate();
  nlohmann::json j;
  j["channels"] = nlohmann::json::object();
  for (std::size_t i = 0; i < rates.labels.size(); ++i)
    j["channels"][rates.labels[i]] = rates.rates[i];
  return j.dump(2);
}

ChannelRates rates_from_json(const std::string& text) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(text);
  } catch (const nlohmann::json::exception& e) {
    throw InvalidData(std::string("channel rates JSON does not parse: ") + e.what());
  }
  ChannelRates rates;
  try {
    for (const auto& [k, v] : j.at("channels").items()) {
      rates.labels.push_back(k);
      rates.rates.push_back(v.get<double>());
    }
  } catch (const nlohmann::json::exception& e) {
    throw InvalidData(std::string("channel rates JSON is malformed: ") + e.what());
  }
  rates.validate();
  return rates;
}

std::string rates_digest(const ChannelRates& rates) {
  return hex16(fnv1a64(rates_to_json(rates)));
}

void write_text_file(const std::filesystem::path& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw InvalidData("cannot open for writing: " + path.string());
  out << content;
  if (!out) throw InvalidData("write failed: " + path.string());
}

std::string read_text_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw InvalidData("cannot open: " + path.string());
  std::ostringstream os;
  os << in.rdbuf();
  return os.str();
}

void write_scattering_csv(const std::filesystem::path& path, const ScatteringEvents& ev) {
  std::ostringstream os;
  os << "# seed=" << ev.seed << " model=" << model_digest(ev.model) << "\n";
  os << "E\n";
  for (double e : ev.energies) os << format_double(e) << "\n";
  write_text_file(path, os.str());
}

std::vector<double> read_energies_csv(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw InvalidData("cannot open: " + path.string());
  std::vector<double> out;
  std::string line;
  std::size_t lineno = 0;
  bool saw_header = false;
  while (std::getline(in, line)) {
    ++lineno;
    const std::string_view sv = trim(line);
    if (sv.empty() || sv.front() == '#') continue;
    if (!saw_header && (sv == "E" || sv == "e" || sv == "energy")) {
      saw_header = true;
      continue;
    }
    saw_header = true;
    out.push_back(parse_double_strict(sv, path, lineno));
  }
  if (out.empty()) throw InvalidData("no event rows in " + path.string());
  return out;
}

void write_decay_csv(const std::filesystem::path& path, const DecayEvents& ev) {
  std::ostringstream os;
  os << "# seed=" << ev.seed << " model=" << rates_digest(ev.rates) << "\n";
  os << "t,channel\n";
  for (const DecayEvent& e : ev.events) {
    if (e.channel >= ev.labels.size())
      throw InvalidData("decay event references an unknown channel");
    os << format_double(e.time) << "," << ev.labels[e.channel] << "\n";
  }
  write_text_file(path, os.str());
}

DecayRecords read_decay_csv(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw InvalidData("cannot open: " + path.string());
  DecayRecords out;
  std::string line;
  std::size_t lineno = 0;
  bool saw_header = false;
  while (std::getline(in, line)) {
    ++lineno;
    const std::string_view sv = trim(line);
    if (sv.empty() || sv.front() == '#') continue;
    const std::size_t comma = sv.find(',');
    if (comma == std::string_view::npos) {
      std::ostringstream os;
      os << path.string() << ":" << lineno << ": expected 't,channel'";
      throw InvalidData(os.str());
    }
    const std::string_view a = trim(sv.substr(0, comma));
    const std::string_view b = trim(sv.substr(comma + 1));
    if (!saw_header && (a == "t" || a == "time")) {
      saw_header = true;
      continue;
    }
    saw_header = true;
    if (b.empty()) {
      std::ostringstream os;
      os << path.string() << ":" << lineno << ": empty channel label";
      throw InvalidData(os.str());
    }
    out.times.push_back(parse_double_strict(a, path, lineno));
    out.channels.emplace_back(b);
  }
  if (out.times.empty()) throw InvalidData("no event rows in " + path.string());
  return out;
}

DecayEvents decay_events_from_records(const DecayRecords& records) {
  DecayEvents out;
  for (std::size_t i = 0; i < records.times.size(); ++i) {
    std::uint32_t idx = 0;
    for (; idx < out.labels.size(); ++idx)
      if (out.labels[idx] == records.channels[i]) break;
    if (idx == out.labels.size()) out.labels.push_back(records.channels[i]);
    DecayEvent ev;
    ev.time = records.times[i];
    ev.channel = idx;
    out.events.push_back(ev);
  }
  // Placeholder rates: uniform over observed labels. Consumers that need the
  // real configuration must carry it separately.
  out.rates.labels = out.labels;
  out.rates.rates.assign(out.labels.size(), 1.0);
  return out;
}

void write_binned_csv(const std::filesystem::path& path, const BinnedCounts& counts,
                      const std::string& axis) {
  std::ostringstream os;
  os << axis << "_lo," << axis << "_hi,channel,count\n";
  for (std::size_t c = 0; c < counts.channels.size(); ++c)
    for (std::size_t i = 0; i + 1 < counts.edges.size(); ++i)
      os << format_double(counts.edges[i]) << "," << format_double(counts.edges[i + 1])
         << "," << counts.channels[c] << "," << counts.counts[c][i] << "\n";
  for (std::size_t c = 0; c < counts.channels.size(); ++c)
    os << "# underflow channel=" << counts.channels[c] << " count=" << counts.underflow[c]
       << "\n";
  for (std::size_t c = 0; c < counts.channels.size(); ++c)
    os << "# overflow channel=" << counts.channels[c] << " count=" << counts.overflow[c]
       << "\n";
  write_text_file(path, os.str());
}

void write_survival_csv(const std::filesystem::path& path, const SurvivalCurve& curve) {
  std::ostringstream os;
  os << "t,re_A,im_A,P,P_exp,deviation\n";
  for (std::size_t i = 0; i < curve.times.size(); ++i)
    os << format_double(curve.times[i]) << "," << format_double(curve.amplitudes[i].real())
       << "," << format_double(curve.amplitudes[i].imag()) << ","
       << format_double(curve.probabilities[i]) << ","
       << format_double(curve.exponential[i]) << "," << format_double(curve.deviations[i])
       << "\n";
  write_text_file(path, os.str());
}

namespace {

nlohmann::json quality_json(const FitQuality& q) {
  return {{"chi2", q.chi2},
          {"dof", q.dof},
          {"iterations", q.iterations},
          {"converged", q.converged}};
}

}  // namespace

std::string lineshape_fit_to_json(const LineshapeFit& fit) {
  nlohmann::json j;
  j["estimates"]["E_R"] = fit.er;
  j["estimates"]["Gamma"] = fit.gamma;
  j["estimates"]["norm"] = fit.norm;
  j["standard_errors"]["E_R"] = fit.se_er;
  j["standard_errors"]["Gamma"] = fit.se_gamma;
  j["standard_errors"]["norm"] = fit.se_norm;
  for (std::size_t k = 0; k < fit.background.size(); ++k) {
    const std::string name = "b" + std::to_string(k);
    j["estimates"][name] = fit.background[k];
    j["standard_errors"][name] = fit.se_background[k];
  }
  j["parameter_names"] = fit.parameter_names;
  j["covariance"] = fit.covariance;
  j.update(quality_json(fit.quality));
  return j.dump(2) + "\n";
}

std::string decay_fit_to_json(const DecayFit& fit) {
  nlohmann::json j;
  j["mode"] = fit.mode == DecayFitMode::Joint ? "joint" : "per-channel";
  j["estimates"]["tau"] = fit.tau;
  j["standard_errors"]["tau"] = fit.se_tau;
  for (std::size_t a = 0; a < fit.channels.size(); ++a) {
    const std::string name = "c_" + fit.channels[a];
    j["estimates"][name] = fit.amplitudes[a];
    j["standard_errors"][name] = fit.se_amplitudes[a];
  }
  if (fit.mode == DecayFitMode::PerChannel) {
    for (std::size_t a = 0; a < fit.channels.size(); ++a) {
      j["tau_by_channel"][fit.channels[a]] = fit.tau_by_channel[a];
      j["se_tau_by_channel"][fit.channels[a]] = fit.se_tau_by_channel[a];
    }
  }
  j["parameter_names"] = fit.parameter_names;
  j["covariance"] = fit.covariance;
  j.update(quality_json(fit.quality));
  return j.dump(2) + "\n";
}

std::string ratio_to_json(const RatioReport& report) {
  nlohmann::json j;
  j["product"] = report.product;
  j["se"] = report.se;
  j["pull"] = report.pull;
  j["tau"] = report.tau;
  j["gamma"] = report.gamma;
  j["hbar"] = report.hbar;
  j["consistent"] = report.consistent;
  return j.dump(2) + "\n";
}

}  // namespace resodecay
