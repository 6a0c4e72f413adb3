#include "resodecay/simulate.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace resodecay {

std::uint64_t SplitMix64::mix(std::uint64_t x) {
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ull;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBull;
  return x ^ (x >> 31);
}

std::uint64_t SplitMix64::next() {
  state_ += kGoldenGamma;
  return mix(state_);
}

double SplitMix64::next_double() {
  return static_cast<double>(next() >> 11) * 0x1.0p-53;
}

std::uint64_t chunk_seed(std::uint64_t run_seed, std::uint64_t chunk) {
  return SplitMix64::mix(run_seed + kGoldenGamma * (chunk + 1));
}

namespace {

// Flat envelope over the window: 1.2 times the largest of 2048 grid probes.
double envelope_height(const SMatrixModel& model, double lo, double hi) {
  constexpr int kProbes = 2048;
  double peak = 0.0;
  for (int i = 0; i < kProbes; ++i) {
    const double e = lo + (hi - lo) * (i + 0.5) / kProbes;
    peak = std::max(peak, model.sigma(e));
  }
  if (!(peak > 0.0)) throw BadParams("cross section vanishes on the whole window");
  return 1.2 * peak;
}

}  // namespace

ScatteringEvents sample_lineshape(std::size_t n, const SMatrixModel& model,
                                  double window_lo, double window_hi,
                                  std::uint64_t seed) {
  model.validate();
  if (!(window_lo < window_hi) || !(window_lo >= 0.0))
    throw BadWindow("sampling window must satisfy 0 <= lo < hi");

  const double height = envelope_height(model, window_lo, window_hi);

  ScatteringEvents out;
  out.energies.reserve(n);
  out.window_lo = window_lo;
  out.window_hi = window_hi;
  out.seed = seed;
  out.model = model;

  const std::size_t chunks = (n + kChunkSize - 1) / kChunkSize;
  for (std::size_t c = 0; c < chunks; ++c) {
    SplitMix64 rng(chunk_seed(seed, c));
    const std::size_t in_chunk = std::min(kChunkSize, n - c * kChunkSize);
    for (std::size_t k = 0; k < in_chunk; ++k) {
      for (;;) {
        const double e = window_lo + (window_hi - window_lo) * rng.next_double();
        const double sigma = model.sigma(e);
        if (sigma > height) {
          std::ostringstream os;
          os << "cross section " << sigma << " exceeds its envelope " << height
             << " at E = " << e;
          throw EnvelopeViolation(os.str());
        }
        if (rng.next_double() * height <= sigma) {
          out.energies.push_back(e);
          break;
        }
      }
    }
  }
  return out;
}

DecayEvents sample_decays(std::size_t n, const ChannelRates& channels,
                          std::uint64_t seed) {
  channels.validate();
  const double r_total = channels.total();
  std::vector<double> cumulative(channels.rates.size());
  double acc = 0.0;
  for (std::size_t c = 0; c < channels.rates.size(); ++c) {
    acc += channels.rates[c] / r_total;
    cumulative[c] = acc;
  }
  cumulative.back() = 1.0;

  DecayEvents out;
  out.events.reserve(n);
  out.labels = channels.labels;
  out.seed = seed;
  out.rates = channels;

  const std::size_t chunks = (n + kChunkSize - 1) / kChunkSize;
  for (std::size_t c = 0; c < chunks; ++c) {
    SplitMix64 rng(chunk_seed(seed, c));
    const std::size_t in_chunk = std::min(kChunkSize, n - c * kChunkSize);
    for (std::size_t k = 0; k < in_chunk; ++k) {
      DecayEvent ev;
      // 1 - u > 0, so the log is always finite.
      ev.time = -std::log1p(-rng.next_double()) / r_total;
      const double u = rng.next_double();
      ev.channel = static_cast<std::uint32_t>(
          std::lower_bound(cumulative.begin(), cumulative.end(), u) - cumulative.begin());
      if (ev.channel >= channels.rates.size())
        ev.channel = static_cast<std::uint32_t>(channels.rates.size()) - 1;
      out.events.push_back(ev);
    }
  }
  return out;
}

namespace {

void check_edges(const std::vector<double>& edges) {
  if (edges.size() < 2) throw BadEdges("need at least two bin edges");
  for (std::size_t i = 0; i + 1 < edges.size(); ++i)
    if (!(edges[i] < edges[i + 1])) throw BadEdges("bin edges must be strictly ascending");
}

// Half-open bins [e_i, e_{i+1}); the last edge belongs to overflow.
std::ptrdiff_t bin_index(const std::vector<double>& edges, double x) {
  if (x < edges.front()) return -1;
  if (x >= edges.back()) return static_cast<std::ptrdiff_t>(edges.size()) - 1;
  const auto it = std::upper_bound(edges.begin(), edges.end(), x);
  return it - edges.begin() - 1;
}

}  // namespace

BinnedCounts bin_counts(const ScatteringEvents& events, const std::vector<double>& edges) {
  check_edges(edges);
  BinnedCounts out;
  out.edges = edges;
  out.channels = {events.model.channel.out};
  out.counts.assign(1, std::vector<std::uint64_t>(edges.size() - 1, 0));
  out.underflow.assign(1, 0);
  out.overflow.assign(1, 0);
  for (double e : events.energies) {
    const std::ptrdiff_t b = bin_index(edges, e);
    if (b < 0)
      ++out.underflow[0];
    else if (b >= static_cast<std::ptrdiff_t>(edges.size()) - 1)
      ++out.overflow[0];
    else
      ++out.counts[0][b];
    ++out.total;
  }
  return out;
}

BinnedCounts bin_counts(const DecayEvents& events, const std::vector<double>& edges) {
  check_edges(edges);
  if (events.labels.empty()) throw BadWeights("decay events carry no channel labels");
  BinnedCounts out;
  out.edges = edges;
  out.channels = events.labels;
  out.counts.assign(events.labels.size(),
                    std::vector<std::uint64_t>(edges.size() - 1, 0));
  out.underflow.assign(events.labels.size(), 0);
  out.overflow.assign(events.labels.size(), 0);
  for (const DecayEvent& ev : events.events) {
    if (ev.channel >= events.labels.size())
      throw InvalidData("decay event references a channel that does not exist");
    const std::ptrdiff_t b = bin_index(edges, ev.time);
    if (b < 0)
      ++out.underflow[ev.channel];
    else if (b >= static_cast<std::ptrdiff_t>(edges.size()) - 1)
      ++out.overflow[ev.channel];
    else
      ++out.counts[ev.channel][b];
    ++out.total;
  }
  return out;
}

LifetimeEstimate mean_lifetime_estimator(const DecayEvents& events) {
  const std::size_t n = events.events.size();
  if (n < 2) throw TooFewEvents("lifetime estimation needs at least two events");
  double mean = 0.0;
  for (const DecayEvent& ev : events.events) mean += ev.time;
  mean /= static_cast<double>(n);
  double var = 0.0;
  for (const DecayEvent& ev : events.events) {
    const double d = ev.time - mean;
    var += d * d;
  }
  var /= static_cast<double>(n - 1);
  LifetimeEstimate out;
  out.tau = mean;
  out.se = std::sqrt(var / static_cast<double>(n));
  out.n = n;
  return out;
}

}  // namespace resodecay
