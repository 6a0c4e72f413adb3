#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "resodecay/decay.hpp"
#include "resodecay/smatrix.hpp"

namespace resodecay {

// splitmix64 (Steele, Lea, Flood; Vigna's public-domain reference): the state
// advances by the 64-bit golden ratio and each output is the finalized state.
class SplitMix64 {
 public:
  explicit SplitMix64(std::uint64_t seed) : state_(seed) {}

  static std::uint64_t mix(std::uint64_t x);
  std::uint64_t next();
  // 53-bit mantissa uniform in [0, 1).
  double next_double();

 private:
  std::uint64_t state_;
};

inline constexpr std::uint64_t kGoldenGamma = 0x9E3779B97F4A7C15ull;
inline constexpr std::size_t kChunkSize = 4096;

// Seed of the generator owning events [chunk * kChunkSize, ...). Chunks are
// independent streams, so any chunk can be produced without generating its
// predecessors.
std::uint64_t chunk_seed(std::uint64_t run_seed, std::uint64_t chunk);

struct ScatteringEvents {
  std::vector<double> energies;
  double window_lo = 0.0;
  double window_hi = 0.0;
  std::uint64_t seed = 0;
  SMatrixModel model;
};

struct DecayEvent {
  double time = 0.0;
  std::uint32_t channel = 0;
};

struct DecayEvents {
  std::vector<DecayEvent> events;
  std::vector<std::string> labels;
  std::uint64_t seed = 0;
  ChannelRates rates;
};

// Rejection sampling of the cross section on [window_lo, window_hi] under a
// flat envelope set 20% above the densest of 2048 grid probes.
ScatteringEvents sample_lineshape(std::size_t n, const SMatrixModel& model,
                                  double window_lo, double window_hi,
                                  std::uint64_t seed);

// Inverse-transform exponential decay times with multinomial channel labels.
DecayEvents sample_decays(std::size_t n, const ChannelRates& channels,
                          std::uint64_t seed);

struct BinnedCounts {
  std::vector<double> edges;                        // size B + 1
  std::vector<std::string> channels;                // size C
  std::vector<std::vector<std::uint64_t>> counts;   // [C][B], half-open bins
  std::vector<std::uint64_t> underflow;             // per channel
  std::vector<std::uint64_t> overflow;
  std::uint64_t total = 0;

  std::size_t n_bins() const { return edges.size() < 2 ? 0 : edges.size() - 1; }
};

BinnedCounts bin_counts(const ScatteringEvents& events, const std::vector<double>& edges);
BinnedCounts bin_counts(const DecayEvents& events, const std::vector<double>& edges);

struct LifetimeEstimate {
  double tau = 0.0;
  double se = 0.0;
  std::size_t n = 0;
};

// Sample mean of the decay times; for exponential data the mean is the
// maximum-likelihood lifetime and its standard error is tau / sqrt(n).
LifetimeEstimate mean_lifetime_estimator(const DecayEvents& events);

}  // namespace resodecay
