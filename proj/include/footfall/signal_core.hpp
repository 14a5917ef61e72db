#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "footfall/time_series.hpp"

namespace footfall {

// Anti-aliased integer-factor decimation. The factor is decomposed into
// prime stages (ascending); each stage low-pass filters with a 63-tap
// Hamming-windowed sinc cut off at 0.45x the stage output rate, then keeps
// every p-th sample. Output length is floor(n / factor) and the output rate
// is sample_rate_hz / factor. factor == 1 returns the input unchanged.
TimeSeries decimate(const TimeSeries& signal, int factor);

// Energy distribution and gait statistics for one synthetic walker.
// band_weights[k] is the relative energy the walker puts into the
// [2k, 2k+2) Hz band; the generator normalizes the vector to sum to 1.
struct SyntheticPersonProfile {
  int person_id = 0;
  Eigen::VectorXd band_weights;        // 125 non-negative entries, 0-250 Hz
  double cadence_mean_s = 0.55;
  double cadence_std_s = 0.05;
  double footstep_duration_mean_s = 0.25;
  double footstep_duration_std_s = 0.04;
  double amplitude_jitter = 0.3;       // burst gain drawn from 1 +- jitter
  double noise_floor = 0.0;            // white-noise stddev (bursts have RMS 1)
};

struct Walk {
  TimeSeries signal;
  std::vector<double> onsets_s;     // ground-truth footstep onsets, increasing
  std::vector<double> durations_s;  // matching burst durations
};

// Synthesizes a walk: cadence-spaced footfall bursts plus white noise.
// Each burst is a sparse combination of 8-25 Gaussian-envelope atoms whose
// frequencies are drawn from band_weights; one envelope-only atom near the
// burst start gives every footstep a sharp heel-strike onset. Bursts are
// normalized to unit RMS over their own support before the jitter gain.
// Deterministic for a fixed seed. Throws EmptyWalk when duration_s cannot
// fit a single footstep.
Walk generate_walk(const SyntheticPersonProfile& profile, double duration_s,
                   double sample_rate_hz, std::uint64_t rng_seed);

// Signal file I/O. WAV is 16-bit PCM mono with a fixed amplitude convention
// (1.0 <-> 8192 counts, clipped at +-3.9999); CSV stores one full-precision
// amplitude per line and carries no rate, so the caller supplies it.
void write_wav(const TimeSeries& ts, const std::string& path);
TimeSeries read_wav(const std::string& path);
void write_csv_signal(const TimeSeries& ts, const std::string& path);
TimeSeries read_csv_signal(const std::string& path, double sample_rate_hz);

// Ground-truth onsets as CSV rows "onset_s,person_id".
void write_onsets_csv(const std::vector<double>& onsets_s, int person_id,
                      const std::string& path);

}  // namespace footfall
