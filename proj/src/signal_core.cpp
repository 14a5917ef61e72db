#include "footfall/signal_core.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <fstream>
#include <numbers>

#include "footfall/rng.hpp"

namespace footfall {

namespace {

constexpr int kFilterTaps = 63;

// Hamming-windowed sinc low-pass, normalized to unity DC gain.
Eigen::VectorXd lowpass_taps(double cutoff_hz, double sample_rate_hz) {
  constexpr int kHalf = (kFilterTaps - 1) / 2;
  Eigen::VectorXd h(kFilterTaps);
  const double fc = cutoff_hz / sample_rate_hz;  // cycles per sample
  for (int i = 0; i < kFilterTaps; ++i) {
    const int n = i - kHalf;
    const double sinc = n == 0 ? 2.0 * fc
                               : std::sin(2.0 * std::numbers::pi * fc * n) /
                                     (std::numbers::pi * n);
    const double window =
        0.54 - 0.46 * std::cos(2.0 * std::numbers::pi * i / (kFilterTaps - 1));
    h[i] = sinc * window;
  }
  h /= h.sum();
  return h;
}

std::vector<int> prime_factors(int n) {
  std::vector<int> out;
  for (int d = 2; d * d <= n; ++d) {
    while (n % d == 0) {
      out.push_back(d);
      n /= d;
    }
  }
  if (n > 1) out.push_back(n);
  return out;
}

// One filtered keep-every-p-th stage. The filter is applied centered
// (linear phase compensated) with zero padding outside the signal.
TimeSeries decimate_stage(const TimeSeries& in, int p) {
  constexpr int kHalf = (kFilterTaps - 1) / 2;
  const double out_rate = in.sample_rate_hz / p;
  const Eigen::VectorXd h = lowpass_taps(0.45 * out_rate, in.sample_rate_hz);
  const Eigen::Index n = in.size();
  const Eigen::Index n_out = n / p;

  TimeSeries out;
  out.sample_rate_hz = out_rate;
  out.samples.resize(n_out);
  for (Eigen::Index k = 0; k < n_out; ++k) {
    const Eigen::Index center = k * p;
    double acc = 0.0;
    const Eigen::Index lo = std::max<Eigen::Index>(0, center - kHalf);
    const Eigen::Index hi = std::min<Eigen::Index>(n - 1, center + kHalf);
    for (Eigen::Index i = lo; i <= hi; ++i) {
      acc += h[kHalf + (center - i)] * in.samples[i];
    }
    out.samples[k] = acc;
  }
  return out;
}

}  // namespace

TimeSeries decimate(const TimeSeries& signal, int factor) {
  validate(signal);
  if (factor < 1) throw InvalidArgument("decimate: factor must be >= 1");
  if (factor == 1) return signal;
  if (signal.size() < factor)
    throw InvalidArgument("decimate: signal shorter than decimation factor");
  if (signal.size() < kFilterTaps)
    throw InvalidArgument("decimate: signal shorter than filter warm-up");

  TimeSeries cur = signal;
  for (const int p : prime_factors(factor)) {
    cur = decimate_stage(cur, p);
  }
  return cur;
}

namespace {

constexpr double kOmegaStep = 5.0;
constexpr double kOmegaMax = 250.0;
constexpr double kMinFootstepS = 0.144;
constexpr double kMaxFootstepS = 0.437;

// Draws a physical frequency (Hz) from the normalized band weights:
// pick a 2-Hz band by weight, then uniform within the band.
double draw_band_frequency(const Eigen::VectorXd& weights, Rng& rng) {
  const double u = rng.uniform();
  double acc = 0.0;
  int band = static_cast<int>(weights.size()) - 1;
  for (int k = 0; k < weights.size(); ++k) {
    acc += weights[k];
    if (u < acc) {
      band = k;
      break;
    }
  }
  return 2.0 * band + 2.0 * rng.uniform();
}

// One footfall burst of n samples, built as a sparse combination of 8-25
// Gaussian-envelope atoms. A heel-strike envelope atom opens the event;
// each resonance mode contributes a phase-coherent cos/sin atom pair at a
// few decaying envelope positions, which models a damped floor resonance
// while staying exactly sparse in the atom family.
Eigen::VectorXd synthesize_burst(const SyntheticPersonProfile& profile,
                                 const Eigen::VectorXd& weights, int n,
                                 double duration_s, Rng& rng) {
  Eigen::VectorXd t = Eigen::VectorXd::LinSpaced(n, 0.0, 1.0);
  Eigen::VectorXd burst = Eigen::VectorXd::Zero(n);

  const auto add_atom = [&](double tau, double omega, bool sine, double coeff) {
    const Eigen::ArrayXd env = (-4.0 * (t.array() - tau).square()).exp();
    if (omega == 0.0) {
      burst.array() += coeff * env;
    } else if (sine) {
      burst.array() += coeff * env * (omega * t.array()).sin();
    } else {
      burst.array() += coeff * env * (omega * t.array()).cos();
    }
  };

  // Heel strike: dominant envelope-only atom, sharp onset.
  add_atom(rng.uniform(0.0, 0.1), 0.0, false, 1.2 + 0.6 * rng.uniform());

  // Resonance modes, each a phase-coherent cos/sin pair at a few decaying
  // envelope positions: a dominant mode, a weaker overtone, occasionally a
  // third. Total atom count stays in the 9-19 range.
  const int n_modes = rng.uniform() < 0.2 ? 3 : 2;
  for (int m = 0; m < n_modes; ++m) {
    const double f_hz = draw_band_frequency(weights, rng);
    double omega = 2.0 * std::numbers::pi * f_hz * duration_s;
    omega = std::clamp(std::round(omega / kOmegaStep) * kOmegaStep, kOmegaStep,
                       kOmegaMax);
    const double phase = rng.uniform(0.0, 2.0 * std::numbers::pi);
    const double amp = (m == 0 ? 1.0 : 0.45) * (0.8 + 0.8 * rng.uniform());
    const double decay = rng.uniform(1.5, 2.5);
    const double tau0 = rng.uniform(0.0, 0.12);
    const int positions = static_cast<int>(rng.uniform_int(2, 3));
    for (int p = 0; p < positions; ++p) {
      const double tau = std::min(1.0, tau0 + 0.3 * p * (0.9 + 0.2 * rng.uniform()));
      const double c = amp * std::exp(-decay * tau);
      add_atom(tau, omega, /*sine=*/false, c * std::cos(phase));
      add_atom(tau, omega, /*sine=*/true, -c * std::sin(phase));
    }
  }

  // Footfalls rise from and settle to the floor: a short raised-cosine
  // taper at the burst edges. This also keeps the decimation filter from
  // smearing a hard onset step into content no smooth atom can carry.
  const int taper = std::min<int>(n / 8, static_cast<int>(std::lround(0.008 * (n / duration_s))));
  for (int i = 0; i < taper; ++i) {
    const double w = 0.5 - 0.5 * std::cos(std::numbers::pi * (i + 1) / (taper + 1));
    burst[i] *= w;
    burst[n - 1 - i] *= w;
  }

  const double burst_rms = rms(burst);
  if (burst_rms > 0.0) burst /= burst_rms;
  const double gain =
      1.0 + profile.amplitude_jitter * rng.uniform(-1.0, 1.0);
  return burst * gain;
}

}  // namespace

Walk generate_walk(const SyntheticPersonProfile& profile, double duration_s,
                   double sample_rate_hz, std::uint64_t rng_seed) {
  if (!(duration_s > 0.0) || !(sample_rate_hz > 0.0))
    throw InvalidArgument("generate_walk: duration and rate must be positive");
  if (profile.band_weights.size() != 125)
    throw InvalidArgument("generate_walk: profile needs 125 band weights");
  if (profile.band_weights.minCoeff() < 0.0)
    throw InvalidArgument("generate_walk: band weights must be non-negative");
  const double weight_sum = profile.band_weights.sum();
  if (!(weight_sum > 0.0))
    throw InvalidArgument("generate_walk: band weights sum to zero");
  if (!(profile.cadence_mean_s > 0.0) || !(profile.footstep_duration_mean_s > 0.0))
    throw InvalidArgument("generate_walk: cadence and duration must be positive");

  const Eigen::VectorXd weights = profile.band_weights / weight_sum;
  Rng rng(rng_seed);

  const Eigen::Index n = static_cast<Eigen::Index>(std::llround(duration_s * sample_rate_hz));
  Walk walk;
  walk.signal.sample_rate_hz = sample_rate_hz;
  walk.signal.samples = Eigen::VectorXd::Zero(n);

  double onset = std::max(0.25, profile.cadence_mean_s / 2.0);
  while (true) {
    const double dur = std::clamp(
        rng.normal(profile.footstep_duration_mean_s, profile.footstep_duration_std_s),
        kMinFootstepS, kMaxFootstepS);
    if (onset + dur + 0.02 > duration_s) break;

    const Eigen::Index start = static_cast<Eigen::Index>(std::llround(onset * sample_rate_hz));
    const int len = static_cast<int>(std::llround(dur * sample_rate_hz));
    if (len < 2 || start + len > n) break;

    walk.signal.samples.segment(start, len) +=
        synthesize_burst(profile, weights, len, dur, rng);
    walk.onsets_s.push_back(onset);
    walk.durations_s.push_back(dur);

    // Next onset: cadence draw, floored so consecutive bursts never overlap.
    const double gap = std::max(rng.normal(profile.cadence_mean_s, profile.cadence_std_s),
                                dur + 0.06);
    onset += gap;
  }

  if (walk.onsets_s.empty())
    throw EmptyWalk("generate_walk: duration too short for one footstep");

  if (profile.noise_floor > 0.0) {
    for (Eigen::Index i = 0; i < n; ++i) {
      walk.signal.samples[i] += profile.noise_floor * rng.normal();
    }
  }
  return walk;
}

namespace {

constexpr double kWavScale = 8192.0;  // amplitude 1.0 <-> 8192 counts

void put_u32(std::ofstream& f, std::uint32_t v) {
  char b[4] = {static_cast<char>(v & 0xff), static_cast<char>((v >> 8) & 0xff),
               static_cast<char>((v >> 16) & 0xff), static_cast<char>((v >> 24) & 0xff)};
  f.write(b, 4);
}

void put_u16(std::ofstream& f, std::uint16_t v) {
  char b[2] = {static_cast<char>(v & 0xff), static_cast<char>((v >> 8) & 0xff)};
  f.write(b, 2);
}

std::uint32_t get_u32(const unsigned char* p) {
  return static_cast<std::uint32_t>(p[0]) | (static_cast<std::uint32_t>(p[1]) << 8) |
         (static_cast<std::uint32_t>(p[2]) << 16) | (static_cast<std::uint32_t>(p[3]) << 24);
}

std::uint16_t get_u16(const unsigned char* p) {
  return static_cast<std::uint16_t>(p[0] | (p[1] << 8));
}

}  // namespace

void write_wav(const TimeSeries& ts, const std::string& path) {
  validate(ts);
  std::ofstream f(path, std::ios::binary);
  if (!f) throw IoError("write_wav: cannot open " + path);

  const auto n = static_cast<std::uint32_t>(ts.size());
  const auto rate = static_cast<std::uint32_t>(std::llround(ts.sample_rate_hz));
  const std::uint32_t data_bytes = n * 2;

  f.write("RIFF", 4);
  put_u32(f, 36 + data_bytes);
  f.write("WAVE", 4);
  f.write("fmt ", 4);
  put_u32(f, 16);
  put_u16(f, 1);  // PCM
  put_u16(f, 1);  // mono
  put_u32(f, rate);
  put_u32(f, rate * 2);
  put_u16(f, 2);
  put_u16(f, 16);
  f.write("data", 4);
  put_u32(f, data_bytes);
  for (Eigen::Index i = 0; i < ts.size(); ++i) {
    const double scaled = std::clamp(ts.samples[i] * kWavScale, -32768.0, 32767.0);
    const auto v = static_cast<std::int16_t>(std::lround(scaled));
    put_u16(f, static_cast<std::uint16_t>(v));
  }
  if (!f) throw IoError("write_wav: write failed for " + path);
}

TimeSeries read_wav(const std::string& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw IoError("read_wav: cannot open " + path);
  std::vector<unsigned char> bytes((std::istreambuf_iterator<char>(f)),
                                   std::istreambuf_iterator<char>());
  if (bytes.size() < 44 || std::memcmp(bytes.data(), "RIFF", 4) != 0 ||
      std::memcmp(bytes.data() + 8, "WAVE", 4) != 0)
    throw IoError("read_wav: not a RIFF/WAVE file: " + path);

  double rate = 0.0;
  std::size_t pos = 12;
  TimeSeries ts;
  while (pos + 8 <= bytes.size()) {
    const std::uint32_t chunk_len = get_u32(bytes.data() + pos + 4);
    const unsigned char* body = bytes.data() + pos + 8;
    if (std::memcmp(bytes.data() + pos, "fmt ", 4) == 0) {
      if (chunk_len < 16) throw IoError("read_wav: short fmt chunk");
      if (get_u16(body) != 1 || get_u16(body + 2) != 1 || get_u16(body + 14) != 16)
        throw IoError("read_wav: only 16-bit PCM mono supported");
      rate = get_u32(body + 4);
    } else if (std::memcmp(bytes.data() + pos, "data", 4) == 0) {
      if (rate <= 0.0) throw IoError("read_wav: data before fmt chunk");
      const std::size_t count = chunk_len / 2;
      if (pos + 8 + chunk_len > bytes.size())
        throw IoError("read_wav: truncated data chunk");
      ts.samples.resize(static_cast<Eigen::Index>(count));
      for (std::size_t i = 0; i < count; ++i) {
        const auto v = static_cast<std::int16_t>(get_u16(body + 2 * i));
        ts.samples[static_cast<Eigen::Index>(i)] = v / kWavScale;
      }
      ts.sample_rate_hz = rate;
      return ts;
    }
    pos += 8 + chunk_len + (chunk_len & 1);
  }
  throw IoError("read_wav: no data chunk in " + path);
}

void write_csv_signal(const TimeSeries& ts, const std::string& path) {
  validate(ts);
  std::ofstream f(path);
  if (!f) throw IoError("write_csv_signal: cannot open " + path);
  f.precision(17);
  for (Eigen::Index i = 0; i < ts.size(); ++i) f << ts.samples[i] << '\n';
  if (!f) throw IoError("write_csv_signal: write failed for " + path);
}

TimeSeries read_csv_signal(const std::string& path, double sample_rate_hz) {
  if (!(sample_rate_hz > 0.0))
    throw InvalidArgument("read_csv_signal: sample rate must be positive");
  std::ifstream f(path);
  if (!f) throw IoError("read_csv_signal: cannot open " + path);
  std::vector<double> vals;
  std::string line;
  while (std::getline(f, line)) {
    if (line.empty()) continue;
    vals.push_back(std::stod(line));
  }
  if (vals.empty()) throw IoError("read_csv_signal: no samples in " + path);
  TimeSeries ts;
  ts.sample_rate_hz = sample_rate_hz;
  ts.samples = Eigen::Map<const Eigen::VectorXd>(vals.data(),
                                                 static_cast<Eigen::Index>(vals.size()));
  return ts;
}

void write_onsets_csv(const std::vector<double>& onsets_s, int person_id,
                      const std::string& path) {
  std::ofstream f(path);
  if (!f) throw IoError("write_onsets_csv: cannot open " + path);
  f << "onset_s,person_id\n";
  f.precision(17);
  for (const double t : onsets_s) f << t << ',' << person_id << '\n';
  if (!f) throw IoError("write_onsets_csv: write failed for " + path);
}

}  // namespace footfall
