#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <numbers>

#include "footfall/event_extraction.hpp"
#include "footfall/signal_core.hpp"
#include "test_support.hpp"

using namespace footfall;

namespace {

// Noise plus a single enveloped burst of the given width.
TimeSeries noise_with_burst(double burst_width_s, double rate, double total_s,
                            std::uint64_t seed, double burst_amp = 6.0,
                            int bursts = 1, double gap_s = 0.0) {
  Rng rng(seed);
  TimeSeries ts;
  ts.sample_rate_hz = rate;
  const auto n = static_cast<Eigen::Index>(std::llround(total_s * rate));
  ts.samples.resize(n);
  for (Eigen::Index i = 0; i < n; ++i) ts.samples[i] = 0.05 * rng.normal();

  double onset = total_s / 2.0;
  for (int b = 0; b < bursts; ++b) {
    const auto start = static_cast<Eigen::Index>(std::llround(onset * rate));
    const auto len = static_cast<Eigen::Index>(std::llround(burst_width_s * rate));
    for (Eigen::Index i = 0; i < len && start + i < n; ++i) {
      const double u = static_cast<double>(i) / static_cast<double>(len - 1);
      const double env = std::exp(-4.0 * std::pow(u - 0.3, 2));
      ts.samples[start + i] += burst_amp * env * std::sin(2.0 * std::numbers::pi * 45.0 *
                                                          static_cast<double>(i) / rate);
    }
    onset += burst_width_s + gap_s;
  }
  return ts;
}

}  // namespace

TEST_CASE("synthetic walk: onsets recovered within 20 ms") {
  SyntheticPersonProfile profile = testing::test_profile(1, 30.0, /*noise*/ 0.1);
  int matched = 0, total = 0;
  for (std::uint64_t seed : {101u, 102u, 103u}) {
    const Walk walk = generate_walk(profile, 10.0, 8000.0, seed);
    const ExtractionResult res = extract_events(walk.signal);

    // Every returned onset must sit near some true onset.
    for (const EventWindow& w : res.events) {
      double best = 1e9;
      for (const double t : walk.onsets_s) best = std::min(best, std::abs(t - w.onset_time_s));
      CHECK(best <= 0.020);
    }
    // And at least 90% of true onsets must be found. The detector needs its
    // baseline window, so onsets inside the first 2 s are exempt.
    for (const double t : walk.onsets_s) {
      if (t < 2.1) continue;
      ++total;
      for (const EventWindow& w : res.events) {
        if (std::abs(t - w.onset_time_s) <= 0.020) {
          ++matched;
          break;
        }
      }
    }
  }
  CHECK(static_cast<double>(matched) >= 0.9 * static_cast<double>(total));
}

TEST_CASE("width gate: 0.10 s burst is rejected as too narrow") {
  const TimeSeries ts = noise_with_burst(0.10, 8000.0, 6.0, 7);
  const ExtractionResult res = extract_events(ts);
  CHECK(res.events.empty());
  REQUIRE(!res.rejected.empty());
  CHECK(res.rejected.front().reason == RejectReason::TooNarrow);
}

TEST_CASE("width gate: fused 0.50 s excursion is rejected as too wide") {
  // Two bursts with no gap fuse into one long excursion.
  const TimeSeries ts = noise_with_burst(0.25, 8000.0, 6.0, 8, 6.0, 2, 0.0);
  const ExtractionResult res = extract_events(ts);
  CHECK(res.events.empty());
  bool saw_wide = false;
  for (const auto& r : res.rejected) saw_wide |= r.reason == RejectReason::TooWide;
  CHECK(saw_wide);
}

TEST_CASE("accepted windows are sorted, non-overlapping, width-bounded") {
  const Walk walk = generate_walk(testing::test_profile(2, 40.0, 0.08), 12.0, 8000.0, 55);
  const ExtractionResult res = extract_events(walk.signal);
  REQUIRE(!res.events.empty());
  for (std::size_t i = 0; i < res.events.size(); ++i) {
    const EventWindow& w = res.events[i];
    const double width = static_cast<double>(w.length()) / 8000.0;
    CHECK(width >= kMinEventWidthS);
    CHECK(width <= kMaxEventWidthS);
    CHECK(w.end_index > w.start_index);
    if (i > 0) CHECK(w.start_index >= res.events[i - 1].end_index);
  }
}

TEST_CASE("detection is invariant to amplitude scaling") {
  const Walk walk = generate_walk(testing::test_profile(3, 35.0, 0.1), 8.0, 8000.0, 77);
  const ExtractionResult base = extract_events(walk.signal);

  TimeSeries doubled = walk.signal;
  doubled.samples *= 2.0;
  const ExtractionResult scaled = extract_events(doubled);

  REQUIRE(base.events.size() == scaled.events.size());
  for (std::size_t i = 0; i < base.events.size(); ++i) {
    CHECK(base.events[i].start_index == scaled.events[i].start_index);
    CHECK(base.events[i].end_index == scaled.events[i].end_index);
  }
}

TEST_CASE("pure noise yields zero accepted events in nearly all seeds") {
  int clean = 0;
  const int trials = 100;
  for (int t = 0; t < trials; ++t) {
    Rng rng(static_cast<std::uint64_t>(9000 + t));
    TimeSeries ts;
    ts.sample_rate_hz = 8000.0;
    ts.samples.resize(4 * 8000);
    for (Eigen::Index i = 0; i < ts.size(); ++i) ts.samples[i] = rng.normal();
    if (extract_events(ts).events.empty()) ++clean;
  }
  CHECK(clean >= 95);
}

TEST_CASE("signal shorter than the baseline window throws") {
  TimeSeries ts;
  ts.sample_rate_hz = 8000.0;
  ts.samples = Eigen::VectorXd::Random(8000);  // 1 s < 2 s baseline
  CHECK_THROWS_AS(extract_events(ts), InvalidArgument);
}

TEST_CASE("detector config validation") {
  DetectorConfig bad;
  bad.frame_s = 0.005;  // below hop
  CHECK_THROWS_AS(validate(bad), InvalidArgument);
  bad = DetectorConfig{};
  bad.k_sigma = 0.0;
  CHECK_THROWS_AS(validate(bad), InvalidArgument);
}

TEST_CASE("slice_event basics") {
  const Walk walk = generate_walk(testing::test_profile(), 3.0, 8000.0, 5);
  const TimeSeries& sig = walk.signal;

  const EventWindow full{0, sig.size(), 0.0};
  const TimeSeries whole = slice_event(sig, full);
  CHECK(whole.samples == sig.samples);
  CHECK(whole.sample_rate_hz == sig.sample_rate_hz);

  const EventWindow one{10, 11, 10.0 / 8000.0};
  CHECK(slice_event(sig, one).size() == 1);

  // Slicing a slice with its own full window is idempotent.
  const EventWindow w{100, 500, 100.0 / 8000.0};
  const TimeSeries cut = slice_event(sig, w);
  const TimeSeries again = slice_event(cut, EventWindow{0, cut.size(), 0.0});
  CHECK(again.samples == cut.samples);

  CHECK_THROWS_AS(slice_event(sig, EventWindow{-1, 5, 0.0}), InvalidArgument);
  CHECK_THROWS_AS(slice_event(sig, EventWindow{0, sig.size() + 1, 0.0}), InvalidArgument);
  CHECK_THROWS_AS(slice_event(sig, EventWindow{5, 5, 0.0}), InvalidArgument);
}
