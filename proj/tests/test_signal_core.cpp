#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cstdio>
#include <numbers>

#include "footfall/signal_core.hpp"
#include "test_support.hpp"

using namespace footfall;

namespace {

TimeSeries sine(double freq_hz, double rate_hz, double duration_s, double amp = 1.0) {
  TimeSeries ts;
  ts.sample_rate_hz = rate_hz;
  const auto n = static_cast<Eigen::Index>(std::llround(duration_s * rate_hz));
  ts.samples.resize(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    ts.samples[i] = amp * std::sin(2.0 * std::numbers::pi * freq_hz * i / rate_hz);
  }
  return ts;
}

}  // namespace

TEST_CASE("decimate: factor 1 is the identity") {
  const TimeSeries s = sine(40.0, 8000.0, 0.5);
  const TimeSeries out = decimate(s, 1);
  CHECK(out.sample_rate_hz == s.sample_rate_hz);
  CHECK(out.samples == s.samples);
}

TEST_CASE("decimate: length and rate arithmetic") {
  TimeSeries s;
  s.sample_rate_hz = 8000.0;
  s.samples = Eigen::VectorXd::Random(2000);
  const TimeSeries out = decimate(s, 8);
  CHECK(out.size() == 250);
  CHECK(out.sample_rate_hz == doctest::Approx(1000.0));

  const TimeSeries odd = decimate(
      TimeSeries{Eigen::VectorXd::Random(2005), 8000.0}, 16);
  CHECK(odd.size() == 125);  // floor(2005 / 16)
  CHECK(odd.sample_rate_hz == doctest::Approx(500.0));
}

TEST_CASE("decimate: 300 Hz tone is rejected at factor 16") {
  // 300 Hz sits beyond the 225 Hz cutoff of the 500 Hz output rate; the
  // direct-evaluation oracle is the RMS of the surviving samples.
  const TimeSeries s = sine(300.0, 8000.0, 2.0);
  const TimeSeries out = decimate(s, 16);
  CHECK(out.sample_rate_hz == doctest::Approx(500.0));
  CHECK(rms(out.samples) < 0.05 * rms(s.samples));
}

TEST_CASE("decimate: passband tone survives") {
  const TimeSeries s = sine(20.0, 8000.0, 2.0);
  const TimeSeries out = decimate(s, 16);
  CHECK(rms(out.samples) == doctest::Approx(rms(s.samples)).epsilon(0.02));
}

TEST_CASE("decimate: composition of factors matches the combined factor") {
  // Power-of-two factors share one prime pipeline, so a*b equals a then b.
  const SyntheticPersonProfile profile = testing::test_profile();
  const Walk walk = generate_walk(profile, 4.0, 8000.0, 11);
  const TimeSeries direct = decimate(walk.signal, 8);
  const TimeSeries staged = decimate(decimate(walk.signal, 2), 4);
  REQUIRE(direct.size() == staged.size());
  CHECK(relative_l2_error(staged.samples, direct.samples) < 1e-6);
}

TEST_CASE("decimate: error cases") {
  TimeSeries s;
  s.sample_rate_hz = 8000.0;
  s.samples = Eigen::VectorXd::Random(100);
  CHECK_THROWS_AS(decimate(s, 0), InvalidArgument);
  CHECK_THROWS_AS(decimate(TimeSeries{Eigen::VectorXd::Random(4), 8000.0}, 8),
                  InvalidArgument);
  // Shorter than the 63-tap warm-up.
  CHECK_THROWS_AS(decimate(TimeSeries{Eigen::VectorXd::Random(50), 8000.0}, 2),
                  InvalidArgument);
}

TEST_CASE("generate_walk: onset count matches the cadence budget") {
  SyntheticPersonProfile p = testing::test_profile();
  p.cadence_mean_s = 0.6;
  p.cadence_std_s = 0.05;
  const Walk walk = generate_walk(p, 10.0, 8000.0, 3);
  CHECK(walk.onsets_s.size() >= 12);
  CHECK(walk.onsets_s.size() <= 20);
}

TEST_CASE("generate_walk: zero noise floor leaves exact silence between bursts") {
  SyntheticPersonProfile p = testing::test_profile();
  p.noise_floor = 0.0;
  p.cadence_mean_s = 1.2;  // one footstep in a short window
  const Walk walk = generate_walk(p, 1.6, 8000.0, 5);
  REQUIRE(walk.onsets_s.size() == 1);
  const auto start = static_cast<Eigen::Index>(std::llround(walk.onsets_s[0] * 8000.0));
  const auto len = static_cast<Eigen::Index>(std::llround(walk.durations_s[0] * 8000.0));
  CHECK(walk.signal.samples.head(start).cwiseAbs().maxCoeff() == 0.0);
  CHECK(walk.signal.samples.tail(walk.signal.size() - start - len).cwiseAbs().maxCoeff() ==
        0.0);
  CHECK(walk.signal.samples.segment(start, len).cwiseAbs().maxCoeff() > 0.0);
}

TEST_CASE("generate_walk: deterministic for a fixed seed") {
  const SyntheticPersonProfile p = testing::test_profile();
  const Walk a = generate_walk(p, 6.0, 8000.0, 123);
  const Walk b = generate_walk(p, 6.0, 8000.0, 123);
  CHECK(a.signal.samples == b.signal.samples);
  CHECK(a.onsets_s == b.onsets_s);
  const Walk c = generate_walk(p, 6.0, 8000.0, 124);
  CHECK(a.signal.samples != c.signal.samples);
}

TEST_CASE("generate_walk: onsets strictly increasing, separated by the width floor") {
  const SyntheticPersonProfile p = testing::test_profile();
  for (std::uint64_t seed : {1u, 2u, 3u, 4u, 5u}) {
    const Walk walk = generate_walk(p, 10.0, 8000.0, seed);
    for (std::size_t i = 1; i < walk.onsets_s.size(); ++i) {
      CHECK(walk.onsets_s[i] - walk.onsets_s[i - 1] >= 0.144);
    }
  }
}

TEST_CASE("generate_walk: too-short duration throws") {
  const SyntheticPersonProfile p = testing::test_profile();
  CHECK_THROWS_AS(generate_walk(p, 0.05, 8000.0, 1), EmptyWalk);
}

TEST_CASE("wav round trip preserves the signal to quantization accuracy") {
  const Walk walk = generate_walk(testing::test_profile(), 2.5, 8000.0, 9);
  const std::string path = "test_signal_core_tmp.wav";
  write_wav(walk.signal, path);
  const TimeSeries back = read_wav(path);
  REQUIRE(back.size() == walk.signal.size());
  CHECK(back.sample_rate_hz == doctest::Approx(8000.0));
  CHECK((back.samples - walk.signal.samples).cwiseAbs().maxCoeff() < 1.0 / 8192.0);
  std::remove(path.c_str());
}

TEST_CASE("csv signal round trip is lossless") {
  const Walk walk = generate_walk(testing::test_profile(), 1.8, 8000.0, 10);
  const std::string path = "test_signal_core_tmp.csv";
  write_csv_signal(walk.signal, path);
  const TimeSeries back = read_csv_signal(path, 8000.0);
  REQUIRE(back.size() == walk.signal.size());
  CHECK(back.samples == walk.signal.samples);
  std::remove(path.c_str());
}
