#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <numbers>

#include "footfall/features.hpp"
#include "test_support.hpp"

using namespace footfall;

namespace {

TimeSeries tone(double freq_hz, double rate, double duration_s, bool cosine = false,
                double amp = 1.0) {
  TimeSeries ts;
  ts.sample_rate_hz = rate;
  const auto n = static_cast<Eigen::Index>(std::llround(duration_s * rate));
  ts.samples.resize(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    const double phase = 2.0 * std::numbers::pi * freq_hz * static_cast<double>(i) / rate;
    ts.samples[i] = amp * (cosine ? std::cos(phase) : std::sin(phase));
  }
  return ts;
}

}  // namespace

TEST_CASE("pure 10 Hz tone concentrates in the (10,12] band") {
  const TimeSeries s = tone(10.0, 500.0, 1.0);
  const FeatureVector fv = extract_features(s, std::nullopt, 0.0);
  CHECK(fv.band_energies.sum() == doctest::Approx(1.0).epsilon(1e-9));
  CHECK(fv.band_energies[5] >= 0.95);  // [10, 12) Hz
}

TEST_CASE("constant-amplitude tone has a flat envelope") {
  const TimeSeries s = tone(50.0, 500.0, 1.0, /*cosine=*/true);
  const FeatureVector fv = extract_features(s, std::nullopt, 0.0);
  CHECK(fv.hilbert_stats[1] / fv.hilbert_stats[0] <= 0.05);  // std / mean
}

TEST_CASE("amplitude scaling: normalized features invariant, std scales") {
  const Walk walk = generate_walk(testing::test_profile(), 2.5, 1000.0, 31);
  TimeSeries event;
  event.sample_rate_hz = 1000.0;
  event.samples = walk.signal.samples.segment(
      static_cast<Eigen::Index>(walk.onsets_s[0] * 1000.0), 250);

  const FeatureVector base = extract_features(event, 0.0, 0.6);
  TimeSeries doubled = event;
  doubled.samples *= 2.0;
  const FeatureVector scaled = extract_features(doubled, 0.0, 0.6);

  CHECK(scaled.time_stats[0] == doctest::Approx(2.0 * base.time_stats[0]).epsilon(1e-12));
  CHECK(scaled.time_stats[1] == doctest::Approx(base.time_stats[1]).epsilon(1e-9));
  CHECK(scaled.time_stats[2] == doctest::Approx(base.time_stats[2]).epsilon(1e-9));
  CHECK(scaled.hilbert_stats[0] ==
        doctest::Approx(2.0 * base.hilbert_stats[0]).epsilon(1e-12));
  CHECK(scaled.hilbert_stats[1] ==
        doctest::Approx(2.0 * base.hilbert_stats[1]).epsilon(1e-12));
  CHECK(scaled.hilbert_stats[2] == doctest::Approx(base.hilbert_stats[2]).epsilon(1e-9));
  CHECK(scaled.hilbert_stats[3] == doctest::Approx(base.hilbert_stats[3]).epsilon(1e-9));
  CHECK((scaled.band_energies - base.band_energies).cwiseAbs().maxCoeff() < 1e-12);
  CHECK(scaled.cadence_s == base.cadence_s);
  CHECK(scaled.duration_samples == base.duration_samples);
}

TEST_CASE("time reversal leaves band energies and std unchanged") {
  const Walk walk = generate_walk(testing::test_profile(2, 45.0, 0.05), 2.5, 1000.0, 77);
  TimeSeries event;
  event.sample_rate_hz = 1000.0;
  event.samples = walk.signal.samples.segment(
      static_cast<Eigen::Index>(walk.onsets_s[0] * 1000.0), 200);
  const FeatureVector fwd = extract_features(event, std::nullopt, 0.0);
  TimeSeries rev = event;
  rev.samples = event.samples.reverse();
  const FeatureVector bwd = extract_features(rev, std::nullopt, 0.0);
  CHECK((fwd.band_energies - bwd.band_energies).cwiseAbs().maxCoeff() < 1e-9);
  CHECK(fwd.time_stats[0] == doctest::Approx(bwd.time_stats[0]).epsilon(1e-12));
}

TEST_CASE("constant event is degenerate") {
  TimeSeries flat;
  flat.sample_rate_hz = 1000.0;
  flat.samples = Eigen::VectorXd::Constant(100, 3.5);
  CHECK_THROWS_AS(extract_features(flat, std::nullopt, 0.0), DegenerateEvent);
}

TEST_CASE("cadence handling") {
  const TimeSeries s = tone(25.0, 1000.0, 0.3);
  const FeatureVector no_prev = extract_features(s, std::nullopt, 1.0);
  CHECK(!no_prev.cadence_s.has_value());
  const FeatureVector with_prev = extract_features(s, 0.4, 1.0);
  REQUIRE(with_prev.cadence_s.has_value());
  CHECK(*with_prev.cadence_s == doctest::Approx(0.6));
  CHECK_THROWS_AS(extract_features(s, 1.5, 1.0), InvalidArgument);
}

TEST_CASE("bands at 500 Hz stop at 225 Hz and still normalize") {
  // 240 Hz tone at 500 Hz rate sits beyond the 0.45*rate limit; in-range
  // leakage still normalizes to 1.
  TimeSeries s = tone(100.0, 500.0, 0.5);
  const FeatureVector fv = extract_features(s, std::nullopt, 0.0);
  CHECK(fv.band_energies.sum() == doctest::Approx(1.0).epsilon(1e-9));
  // Bands above 225 Hz are zero-filled at this rate.
  for (int b = 113; b < kBandCount; ++b) CHECK(fv.band_energies[b] == 0.0);
}

TEST_CASE("feature vector layout and dimensions") {
  CHECK(feature_dimension(true) == 134);
  CHECK(feature_dimension(false) == 133);
  CHECK(feature_column_names(true).size() == 134);
  CHECK(feature_column_names(false).size() == 133);
  CHECK(feature_order_hash(true) != feature_order_hash(false));

  const TimeSeries s = tone(25.0, 1000.0, 0.3);
  const FeatureVector fv = extract_features(s, 0.4, 1.0);
  const Eigen::VectorXd flat = flatten(fv, true);
  REQUIRE(flat.size() == 134);
  CHECK(flat[0] == fv.time_stats[0]);
  CHECK(flat[3] == fv.hilbert_stats[0]);
  CHECK(flat[7] == fv.band_energies[0]);
  CHECK(flat[132] == *fv.cadence_s);
  CHECK(flat[133] == fv.duration_samples);
}

TEST_CASE("aggregate_sample: F = 1 drops cadence") {
  const TimeSeries s = tone(25.0, 1000.0, 0.3);
  const FeatureVector fv = extract_features(s, 0.4, 1.0);
  const AggregatedSample one = aggregate_sample({fv}, 1);
  CHECK(one.features.size() == 133);
  CHECK(one.features == flatten(fv, false));
}

TEST_CASE("aggregate_sample: mean of identical vectors is that vector") {
  const TimeSeries s = tone(40.0, 1000.0, 0.25);
  const FeatureVector fv = extract_features(s, 0.5, 1.0);
  const AggregatedSample agg = aggregate_sample({fv, fv, fv}, 3);
  REQUIRE(agg.features.size() == 134);
  CHECK((agg.features - flatten(fv, true)).cwiseAbs().maxCoeff() < 1e-12);
}

TEST_CASE("aggregate_sample: cadence means over the defined entries") {
  const TimeSeries s = tone(40.0, 1000.0, 0.25);
  FeatureVector a = extract_features(s, std::nullopt, 0.0);  // no cadence
  FeatureVector b = extract_features(s, 0.0, 0.5);           // 0.5
  FeatureVector c = extract_features(s, 0.5, 1.2);           // 0.7
  const AggregatedSample agg = aggregate_sample({a, b, c}, 3);
  CHECK(agg.features[132] == doctest::Approx(0.6));

  const AggregatedSample two = aggregate_sample({b, c}, 2);
  CHECK(two.features[132] == doctest::Approx(0.6));

  CHECK_THROWS_AS(aggregate_sample({a, a}, 2), InvalidArgument);  // no cadence at all
  CHECK_THROWS_AS(aggregate_sample({}, 0), InvalidArgument);
  CHECK_THROWS_AS(aggregate_sample({a, b}, 3), InvalidArgument);  // size mismatch
}
