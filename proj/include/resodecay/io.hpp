#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

#include "resodecay/decay.hpp"
#include "resodecay/fit.hpp"
#include "resodecay/gamow.hpp"
#include "resodecay/simulate.hpp"

namespace resodecay {

// Shortest round-trip decimal form, locale independent.
std::string format_double(double x);

std::uint64_t fnv1a64(std::string_view s);

// 16 hex digits identifying the generating configuration; stamped into the
// event-file headers so fits can be traced to their model.
std::string model_digest(const SMatrixModel& model);
std::string rates_digest(const ChannelRates& rates);

std::string rates_to_json(const ChannelRates& rates);
ChannelRates rates_from_json(const std::string& text);

void write_text_file(const std::filesystem::path& path, const std::string& content);
std::string read_text_file(const std::filesystem::path& path);

// Event CSV, one energy per row under a header comment carrying seed and
// model digest.
void write_scattering_csv(const std::filesystem::path& path, const ScatteringEvents& ev);
std::vector<double> read_energies_csv(const std::filesystem::path& path);

// Decay events as t,channel rows; channel is the label string.
void write_decay_csv(const std::filesystem::path& path, const DecayEvents& ev);

struct DecayRecords {
  std::vector<double> times;
  std::vector<std::string> channels;
};
DecayRecords read_decay_csv(const std::filesystem::path& path);

// Regroups raw records into DecayEvents; labels ordered by first appearance.
DecayEvents decay_events_from_records(const DecayRecords& records);

// Binned counts as axis_lo,axis_hi,channel,count rows, with underflow and
// overflow in trailing comments.
void write_binned_csv(const std::filesystem::path& path, const BinnedCounts& counts,
                      const std::string& axis);

// t,re_A,im_A,P,P_exp,deviation rows.
void write_survival_csv(const std::filesystem::path& path, const SurvivalCurve& curve);

std::string lineshape_fit_to_json(const LineshapeFit& fit);
std::string decay_fit_to_json(const DecayFit& fit);
std::string ratio_to_json(const RatioReport& report);

}  // namespace resodecay
