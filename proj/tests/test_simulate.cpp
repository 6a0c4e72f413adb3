#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <algorithm>
#include <cmath>
#include <cstdint>
#include <vector>

#include "doctest.h"
#include "resodecay/simulate.hpp"

using resodecay::BinnedCounts;
using resodecay::ChannelRates;
using resodecay::DecayEvents;
using resodecay::ScatteringEvents;
using resodecay::SMatrixModel;
using resodecay::SplitMix64;

TEST_CASE("splitmix64 reproduces the published reference sequences") {
  SplitMix64 a(0);
  CHECK(a.next() == 0xe220a8397b1dcdafull);
  CHECK(a.next() == 0x6e789e6aa1b965f4ull);
  CHECK(a.next() == 0x06c45d188009454full);

  SplitMix64 b(1234567);
  CHECK(b.next() == 6457827717110365317ull);
  CHECK(b.next() == 3203168211198807973ull);
  CHECK(b.next() == 9817491932198370423ull);
  CHECK(b.next() == 4593380528125082431ull);
  CHECK(b.next() == 16408922859458223821ull);
}

TEST_CASE("next_double fills [0, 1) with 53-bit resolution") {
  SplitMix64 rng(0);
  CHECK(rng.next_double() == doctest::Approx(0.88331080821364260647).epsilon(1e-16));

  SplitMix64 s(99);
  for (int i = 0; i < 10000; ++i) {
    const double u = s.next_double();
    REQUIRE(u >= 0.0);
    REQUIRE(u < 1.0);
  }
}

TEST_CASE("uniformity: Kolmogorov-Smirnov on the raw doubles") {
  const std::size_t n = 4096;
  SplitMix64 rng(2024);
  std::vector<double> u(n);
  for (double& x : u) x = rng.next_double();
  std::sort(u.begin(), u.end());
  double d = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double lo = static_cast<double>(i) / n;
    const double hi = static_cast<double>(i + 1) / n;
    d = std::max(d, std::max(u[i] - lo, hi - u[i]));
  }
  // 1.63 is the alpha = 0.01 critical value of sqrt(n) D.
  CHECK(d * std::sqrt(static_cast<double>(n)) < 1.63);
}

TEST_CASE("chunk seeds are the mixed golden-ratio offsets") {
  CHECK(resodecay::chunk_seed(42, 0) == 0xbdd732262feb6e95ull);
  CHECK(resodecay::chunk_seed(42, 1) == 0x28efe333b266f103ull);
  CHECK(resodecay::chunk_seed(42, 0) != resodecay::chunk_seed(43, 0));
}

TEST_CASE("chunked streams make prefixes independent of the total") {
  const SMatrixModel model = SMatrixModel::canonical_unitary(2.0, 0.2);
  const ScatteringEvents big = resodecay::sample_lineshape(10000, model, 1.0, 3.0, 7);
  const ScatteringEvents small = resodecay::sample_lineshape(4096, model, 1.0, 3.0, 7);
  REQUIRE(big.energies.size() == 10000);
  REQUIRE(small.energies.size() == 4096);
  for (std::size_t i = 0; i < small.energies.size(); ++i)
    REQUIRE(big.energies[i] == small.energies[i]);
}

TEST_CASE("sampled lineshape matches the bin-integrated cross section") {
  const SMatrixModel model = SMatrixModel::canonical_unitary(2.0, 0.2);
  const std::size_t n = 40000;
  const ScatteringEvents ev = resodecay::sample_lineshape(n, model, 1.0, 3.0, 11);
  REQUIRE(ev.energies.size() == n);
  for (double e : ev.energies) {
    REQUIRE(e >= 1.0);
    REQUIRE(e < 3.0);
  }

  // sigma is proportional to a Lorentzian, so bin masses follow from atan.
  const std::size_t nb = 20;
  std::vector<double> edges(nb + 1);
  for (std::size_t i = 0; i <= nb; ++i) edges[i] = 1.0 + 2.0 * i / nb;
  const BinnedCounts counts = resodecay::bin_counts(ev, edges);
  auto cdf = [](double e) { return std::atan((e - 2.0) / 0.1); };
  const double whole = cdf(3.0) - cdf(1.0);
  double chi2 = 0.0;
  for (std::size_t i = 0; i < nb; ++i) {
    const double expect = n * (cdf(edges[i + 1]) - cdf(edges[i])) / whole;
    const double diff = static_cast<double>(counts.counts[0][i]) - expect;
    chi2 += diff * diff / expect;
  }
  // 20 bins, no fitted parameters: chi2 beyond 45 would be p < 0.001.
  CHECK(chi2 < 45.0);
  CHECK(counts.total == n);
  CHECK(counts.underflow[0] == 0);
  CHECK(counts.overflow[0] == 0);
}

TEST_CASE("sampling is deterministic in the seed") {
  const SMatrixModel model = SMatrixModel::canonical_unitary(2.0, 0.2);
  const ScatteringEvents a = resodecay::sample_lineshape(500, model, 1.0, 3.0, 123);
  const ScatteringEvents b = resodecay::sample_lineshape(500, model, 1.0, 3.0, 123);
  const ScatteringEvents c = resodecay::sample_lineshape(500, model, 1.0, 3.0, 124);
  CHECK(a.energies == b.energies);
  CHECK(a.energies != c.energies);
}

TEST_CASE("sampling rejects bad windows") {
  const SMatrixModel model = SMatrixModel::canonical_unitary(2.0, 0.2);
  CHECK_THROWS_AS(resodecay::sample_lineshape(10, model, 3.0, 1.0, 1),
                  resodecay::BadWindow);
  CHECK_THROWS_AS(resodecay::sample_lineshape(10, model, -1.0, 3.0, 1),
                  resodecay::BadWindow);
}

TEST_CASE("a spike between envelope probes is detected, not silently clipped") {
  // The envelope scans 2048 midpoints; a resonance this narrow sits between
  // two probes and towers above the scanned maximum, so accepting draws from
  // it would distort the lineshape. The sampler must refuse.
  const SMatrixModel model = SMatrixModel::canonical_unitary(2.0, 1e-8);
  CHECK_THROWS_AS(resodecay::sample_lineshape(50, model, 1.0, 3.0, 7),
                  resodecay::EnvelopeViolation);
}

TEST_CASE("decay sampling reproduces rate and branching") {
  ChannelRates rates;
  rates.labels = {"a", "b"};
  rates.rates = {0.1, 0.3};
  const std::size_t n = 20000;
  const DecayEvents ev = resodecay::sample_decays(n, rates, 5);
  REQUIRE(ev.events.size() == n);

  double mean = 0.0;
  std::size_t count_a = 0;
  for (const resodecay::DecayEvent& e : ev.events) {
    REQUIRE(e.time >= 0.0);
    REQUIRE(e.channel < 2);
    mean += e.time;
    if (e.channel == 0) ++count_a;
  }
  mean /= static_cast<double>(n);
  // tau = 1 / 0.4 = 2.5 with standard error tau / sqrt(n).
  const double se = 2.5 / std::sqrt(static_cast<double>(n));
  CHECK(std::abs(mean - 2.5) < 5.0 * se);
  // Branching 1:3 with binomial error.
  const double frac_a = static_cast<double>(count_a) / n;
  CHECK(std::abs(frac_a - 0.25) < 5.0 * std::sqrt(0.25 * 0.75 / n));

  const DecayEvents again = resodecay::sample_decays(200, rates, 5);
  for (std::size_t i = 0; i < again.events.size(); ++i) {
    REQUIRE(again.events[i].time == ev.events[i].time);
    REQUIRE(again.events[i].channel == ev.events[i].channel);
  }
}

TEST_CASE("binning is half-open with explicit under- and overflow") {
  DecayEvents ev;
  ev.labels = {"a"};
  for (double t : {-0.5, 0.0, 0.99, 1.0, 2.5, 3.0, 7.0}) {
    resodecay::DecayEvent e;
    e.time = t;
    e.channel = 0;
    ev.events.push_back(e);
  }
  const BinnedCounts counts = resodecay::bin_counts(ev, {0.0, 1.0, 2.0, 3.0});
  REQUIRE(counts.n_bins() == 3);
  CHECK(counts.counts[0][0] == 2);  // 0.0 and 0.99
  CHECK(counts.counts[0][1] == 1);  // 1.0 lands in [1, 2)
  CHECK(counts.counts[0][2] == 1);  // 2.5
  CHECK(counts.underflow[0] == 1);  // -0.5
  CHECK(counts.overflow[0] == 2);   // 3.0 (the last edge) and 7.0
  CHECK(counts.total == 7);

  CHECK_THROWS_AS(resodecay::bin_counts(ev, {0.0}), resodecay::BadEdges);
  CHECK_THROWS_AS(resodecay::bin_counts(ev, {0.0, 0.0, 1.0}), resodecay::BadEdges);
  CHECK_THROWS_AS(resodecay::bin_counts(ev, {1.0, 0.0}), resodecay::BadEdges);
}

TEST_CASE("the sample mean is the lifetime estimator") {
  DecayEvents ev;
  ev.labels = {"a"};
  for (double t : {1.0, 2.0, 3.0}) {
    resodecay::DecayEvent e;
    e.time = t;
    e.channel = 0;
    ev.events.push_back(e);
  }
  const resodecay::LifetimeEstimate est = resodecay::mean_lifetime_estimator(ev);
  CHECK(est.tau == doctest::Approx(2.0).epsilon(1e-15));
  CHECK(est.se == doctest::Approx(std::sqrt(1.0 / 3.0)).epsilon(1e-12));
  CHECK(est.n == 3);

  DecayEvents one;
  one.labels = {"a"};
  one.events.resize(1);
  CHECK_THROWS_AS(resodecay::mean_lifetime_estimator(one), resodecay::TooFewEvents);
}
