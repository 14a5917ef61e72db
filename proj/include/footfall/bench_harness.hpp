#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "footfall/classify.hpp"
#include "footfall/codec.hpp"
#include "footfall/event_extraction.hpp"
#include "footfall/signal_core.hpp"

namespace footfall {

// Synthetic corpus configuration. Walkers get distinct resonance bands and
// gait statistics; separability is tuned so aggregation over consecutive
// footsteps shows the expected accuracy growth without saturating at F = 1.
struct CorpusConfig {
  int num_profiles = 8;
  int footsteps_per_profile = 2000;
  double walk_duration_s = 12.0;
  double noise_floor = 0.05;       // bursts have unit RMS
  double sample_rate_hz = 8000.0;
  std::uint64_t seed = 42;
  DetectorConfig detector;
  GateConfig gates;
  LassoConfig lasso;
  double energy_fraction = 0.99;
};

// Deterministic walker profiles on an irregular frequency grid.
std::vector<SyntheticPersonProfile> build_default_profiles(int count,
                                                           double noise_floor);

enum class Codec { None, Ds16, Ds8bp };

const char* to_string(Codec codec);

// One extracted footstep with features under each codec path. Events the
// DS8BP gate discards are dropped from every path so the three feature
// streams stay aligned.
struct CorpusEvent {
  FeatureVector nc;     // raw 8 kHz event
  FeatureVector ds16;   // decimated to 500 Hz
  FeatureVector ds8bp;  // DS8BP round trip at 1 kHz
  double onset_s = 0.0;
  int atom_count = 0;
  double compression_factor = 0.0;
  std::size_t datagram_bytes = 0;
};

struct CorpusWalk {
  int person_id = 0;
  std::vector<CorpusEvent> events;
};

struct Corpus {
  std::vector<CorpusWalk> walks;
  CorpusConfig config;
  int discarded_too_few = 0;
  int discarded_too_many = 0;
  int discarded_solver = 0;
  int rejected_windows = 0;

  std::size_t total_events() const;
  double mean_atom_count() const;
  double mean_airtime_s() const;
};

// Generates, extracts, and compresses the whole corpus, keeping features
// only. Deterministic for a fixed config.
Corpus build_corpus(const CorpusConfig& config);

// Per-walk grouping of F consecutive footsteps into samples.
std::vector<AggregatedSample> build_samples(const Corpus& corpus, Codec codec,
                                            int f_count);

// Hash over the corpus/sweep configuration, stamped into every table so
// results are traceable to their settings.
std::uint64_t config_fingerprint(const CorpusConfig& config);

struct FootstepsSweepRow {
  ClassifierKind kind;
  int f_count = 1;
  double accuracy_mean = 0.0;
  double accuracy_std = 0.0;
  int sample_count = 0;
  bool skipped = false;  // F exceeded the available consecutive footsteps
};

struct FootstepsSweepResult {
  std::vector<FootstepsSweepRow> rows;
  std::uint64_t fingerprint = 0;
  std::string to_csv() const;
};

// Accuracy as a function of footsteps per sample (uncompressed features).
FootstepsSweepResult sweep_footsteps(const Corpus& corpus,
                                     const std::vector<ClassifierKind>& kinds,
                                     const std::vector<int>& f_values, int folds,
                                     std::uint64_t seed);

struct SamplingSweepRow {
  int rate_hz = 0;
  double accuracy_mean = 0.0;
  double accuracy_std = 0.0;
  double edt_s = 0.0;  // median event-detection time per event
  double fet_s = 0.0;  // median feature-extraction time per sample
};

struct SamplingSweepResult {
  std::vector<SamplingSweepRow> rows;
  std::uint64_t fingerprint = 0;
  std::string to_csv() const;
};

// Re-runs extraction/features/classification at decimated rates. Rates must
// divide the corpus rate; rates below 250 Hz are rejected (the band features
// need Nyquist headroom). Timings are medians of 5 runs after a warm-up.
SamplingSweepResult sweep_sampling(const CorpusConfig& config,
                                   const std::vector<int>& rates_hz,
                                   ClassifierKind kind, int f_count, int folds,
                                   std::uint64_t seed);

struct CodecSweepRow {
  Codec codec;
  ClassifierKind kind;
  int f_count = 1;
  double accuracy_mean = 0.0;
  double accuracy_std = 0.0;
};

struct CodecSweepResult {
  std::vector<CodecSweepRow> rows;
  std::uint64_t fingerprint = 0;
  std::string to_csv() const;
};

// Classifier accuracy on raw, DS16, and DS8BP-recovered events.
CodecSweepResult compare_codecs(const Corpus& corpus,
                                const std::vector<ClassifierKind>& kinds,
                                const std::vector<int>& f_values, int folds,
                                std::uint64_t seed);

struct CompressionHistogram {
  std::vector<int> bin_lo;      // factor bins [lo, lo+1)
  std::vector<int> counts;
  double mean_factor = 0.0;
  double std_factor = 0.0;
  double mean_atoms = 0.0;
  int total_events = 0;
  std::uint64_t fingerprint = 0;
  std::string to_csv() const;
};

// Distribution of per-event compression factors L/M over accepted events
// whose factor falls inside the gate range.
CompressionHistogram histogram_compression(const Corpus& corpus);

}  // namespace footfall
