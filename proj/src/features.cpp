#include "footfall/features.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <complex>

#include <unsupported/Eigen/FFT>

#include "footfall/errors.hpp"

namespace footfall {

namespace {

struct Moments {
  double mean, stddev, skewness, kurtosis;
};

// Bias-uncorrected central moments. Zero variance throws only when the
// caller asks (time-domain stats); envelope stats fall back to zeros.
Moments moments(const Eigen::VectorXd& v, bool throw_on_degenerate) {
  const double n = static_cast<double>(v.size());
  const double mean = v.mean();
  const Eigen::ArrayXd c = v.array() - mean;
  const double m2 = c.square().mean();
  if (m2 <= 0.0) {
    if (throw_on_degenerate)
      throw DegenerateEvent("extract_features: constant event has no moments");
    return {mean, 0.0, 0.0, 0.0};
  }
  const double m3 = c.cube().mean();
  const double m4 = c.square().square().mean();
  (void)n;
  return {mean, std::sqrt(m2), m3 / std::pow(m2, 1.5), m4 / (m2 * m2)};
}

Eigen::Index next_pow2(Eigen::Index n) {
  Eigen::Index p = 1;
  while (p < n) p <<= 1;
  return p;
}

// Envelope of the analytic signal, Hilbert transform done in the frequency
// domain on the zero-padded event, truncated back to the event support.
Eigen::VectorXd analytic_envelope(const Eigen::VectorXd& x) {
  const Eigen::Index n = x.size();
  const Eigen::Index padded = next_pow2(n);

  std::vector<double> buf(static_cast<std::size_t>(padded), 0.0);
  Eigen::Map<Eigen::VectorXd>(buf.data(), n) = x;

  Eigen::FFT<double> fft;
  std::vector<std::complex<double>> spectrum;
  fft.fwd(spectrum, buf);

  // Zero the negative frequencies, double the positive ones.
  for (Eigen::Index k = 1; k < padded / 2; ++k) spectrum[static_cast<std::size_t>(k)] *= 2.0;
  for (Eigen::Index k = padded / 2 + 1; k < padded; ++k)
    spectrum[static_cast<std::size_t>(k)] = 0.0;

  std::vector<std::complex<double>> analytic;
  fft.inv(analytic, spectrum);

  Eigen::VectorXd env(n);
  for (Eigen::Index i = 0; i < n; ++i) env[i] = std::abs(analytic[static_cast<std::size_t>(i)]);
  return env;
}

// Relative energies in 2-Hz bands from the unpadded spectrum. A bin at
// m * df is treated as covering [m*df, (m+1)*df) and its one-sided energy is
// split across the bands it straddles in proportion to overlap.
Eigen::VectorXd band_energy_fractions(const Eigen::VectorXd& x, double rate) {
  const Eigen::Index n = x.size();
  Eigen::FFT<double> fft;
  std::vector<double> buf(x.data(), x.data() + n);
  std::vector<std::complex<double>> spectrum;
  fft.fwd(spectrum, buf);

  const double df = rate / static_cast<double>(n);
  const double f_limit = std::min(kBandWidthHz * kBandCount, 0.45 * rate);

  Eigen::VectorXd bands = Eigen::VectorXd::Zero(kBandCount);
  const Eigen::Index half = n / 2;
  for (Eigen::Index m = 0; m <= half; ++m) {
    const double lo = m * df;
    if (lo >= f_limit) break;
    double e = std::norm(spectrum[static_cast<std::size_t>(m)]);
    const bool paired = m != 0 && !(n % 2 == 0 && m == half);
    if (paired) e *= 2.0;  // fold the conjugate half
    if (e == 0.0) continue;

    const double hi = std::min(lo + df, f_limit);
    if (hi <= lo) break;
    const int first_band = static_cast<int>(lo / kBandWidthHz);
    const int last_band = std::min(kBandCount - 1,
                                   static_cast<int>(std::ceil(hi / kBandWidthHz)) - 1);
    for (int b = first_band; b <= last_band; ++b) {
      const double overlap = std::min(hi, (b + 1) * kBandWidthHz) -
                             std::max(lo, b * kBandWidthHz);
      if (overlap > 0.0) bands[b] += e * (overlap / df);
    }
  }

  const double total = bands.sum();
  if (total > 0.0) bands /= total;
  return bands;
}

}  // namespace

FeatureVector extract_features(const TimeSeries& event,
                               std::optional<double> prev_onset_s, double onset_s) {
  validate(event, "extract_features");
  if (event.size() < 4)
    throw InvalidArgument("extract_features: event too short");
  if (prev_onset_s && !(*prev_onset_s < onset_s))
    throw InvalidArgument("extract_features: onsets must be increasing");

  FeatureVector fv;
  const Moments tm = moments(event.samples, /*throw_on_degenerate=*/true);
  fv.time_stats << tm.stddev, tm.skewness, tm.kurtosis;

  const Eigen::VectorXd env = analytic_envelope(event.samples);
  const Moments hm = moments(env, /*throw_on_degenerate=*/false);
  fv.hilbert_stats << hm.mean, hm.stddev, hm.skewness, hm.kurtosis;

  fv.band_energies = band_energy_fractions(event.samples, event.sample_rate_hz);
  if (prev_onset_s) fv.cadence_s = onset_s - *prev_onset_s;
  fv.duration_samples = static_cast<int>(event.size());
  return fv;
}

AggregatedSample aggregate_sample(const std::vector<FeatureVector>& footsteps,
                                  int f_count) {
  if (footsteps.empty()) throw InvalidArgument("aggregate_sample: empty footstep list");
  if (f_count != static_cast<int>(footsteps.size()))
    throw InvalidArgument("aggregate_sample: f_count must match list length");

  const bool with_cadence = f_count >= 2;
  // Mean of the cadence-free layout; cadence averages separately over the
  // footsteps that carry one and is inserted before the duration column.
  Eigen::VectorXd acc = Eigen::VectorXd::Zero(feature_dimension(false));
  double cadence_sum = 0.0;
  int cadence_count = 0;
  for (const FeatureVector& fv : footsteps) {
    if (fv.band_energies.size() != kBandCount)
      throw InvalidArgument("aggregate_sample: malformed feature vector");
    acc += flatten(fv, false);
    if (fv.cadence_s) {
      cadence_sum += *fv.cadence_s;
      ++cadence_count;
    }
  }
  acc /= static_cast<double>(footsteps.size());

  AggregatedSample sample;
  sample.f_count = f_count;
  if (!with_cadence) {
    sample.features = acc;
    return sample;
  }
  if (cadence_count == 0)
    throw InvalidArgument("aggregate_sample: no cadence among F >= 2 footsteps");

  const int d_no_cad = feature_dimension(false);
  Eigen::VectorXd out(d_no_cad + 1);
  out.head(d_no_cad - 1) = acc.head(d_no_cad - 1);
  out[d_no_cad - 1] = cadence_sum / cadence_count;  // cadence before duration
  out[d_no_cad] = acc[d_no_cad - 1];                // duration mean
  sample.features = out;
  return sample;
}

Eigen::VectorXd flatten(const FeatureVector& fv, bool with_cadence) {
  Eigen::VectorXd out(feature_dimension(with_cadence));
  out.segment(0, 3) = fv.time_stats;
  out.segment(3, 4) = fv.hilbert_stats;
  out.segment(7, kBandCount) = fv.band_energies;
  int pos = 7 + kBandCount;
  if (with_cadence) {
    out[pos++] = fv.cadence_s ? *fv.cadence_s : std::numeric_limits<double>::quiet_NaN();
  }
  out[pos] = static_cast<double>(fv.duration_samples);
  return out;
}

int feature_dimension(bool with_cadence) {
  return 3 + 4 + kBandCount + (with_cadence ? 1 : 0) + 1;
}

std::vector<std::string> feature_column_names(bool with_cadence) {
  std::vector<std::string> names = {"time_std", "time_skewness", "time_kurtosis",
                                    "hilbert_mean", "hilbert_std",
                                    "hilbert_skewness", "hilbert_kurtosis"};
  for (int b = 0; b < kBandCount; ++b) {
    names.push_back("band_" + std::to_string(2 * b) + "_" + std::to_string(2 * b + 2) + "hz");
  }
  if (with_cadence) names.push_back("cadence_s");
  names.push_back("duration_samples");
  return names;
}

std::uint64_t feature_order_hash(bool with_cadence) {
  std::uint64_t h = 14695981039346656037ull;
  for (const std::string& name : feature_column_names(with_cadence)) {
    for (const char c : name) {
      h ^= static_cast<std::uint8_t>(c);
      h *= 1099511628211ull;
    }
    h ^= ',';
    h *= 1099511628211ull;
  }
  return h;
}

}  // namespace footfall
