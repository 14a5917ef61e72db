#include "footfall/bench_harness.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <sstream>

#include "footfall/errors.hpp"
#include "footfall/rng.hpp"

namespace footfall {

const char* to_string(Codec codec) {
  switch (codec) {
    case Codec::None: return "nc";
    case Codec::Ds16: return "ds16";
    case Codec::Ds8bp: return "ds8bp";
  }
  return "unknown";
}

std::vector<SyntheticPersonProfile> build_default_profiles(int count,
                                                           double noise_floor) {
  if (count < 1) throw InvalidArgument("profiles: count must be >= 1");
  // Primary resonance centers on an irregular grid, a weaker overtone above,
  // and per-person gait statistics. Neighbouring walkers overlap enough that
  // single footsteps stay ambiguous.
  static constexpr double kCenters[] = {18.0, 25.0, 31.0, 38.0, 46.0, 53.0, 61.0, 70.0};
  static constexpr double kCadence[] = {0.47, 0.50, 0.53, 0.56, 0.49, 0.52, 0.55, 0.58};
  static constexpr double kDuration[] = {0.20, 0.22, 0.24, 0.26, 0.21, 0.23, 0.25, 0.27};

  std::vector<SyntheticPersonProfile> profiles;
  profiles.reserve(static_cast<std::size_t>(count));
  for (int p = 0; p < count; ++p) {
    SyntheticPersonProfile prof;
    prof.person_id = p + 1;
    const double center = kCenters[p % 8] + 90.0 * (p / 8);
    const double overtone = center + 17.0;
    prof.band_weights = Eigen::VectorXd::Zero(kBandCount);
    for (int b = 0; b < kBandCount; ++b) {
      const double f = 2.0 * b + 1.0;
      prof.band_weights[b] = 0.7 * std::exp(-0.5 * std::pow((f - center) / 4.0, 2)) +
                             0.3 * std::exp(-0.5 * std::pow((f - overtone) / 5.0, 2));
    }
    prof.band_weights /= prof.band_weights.sum();
    prof.cadence_mean_s = kCadence[p % 8];
    prof.cadence_std_s = 0.04;
    prof.footstep_duration_mean_s = kDuration[p % 8];
    prof.footstep_duration_std_s = 0.03;
    prof.amplitude_jitter = 0.3;
    prof.noise_floor = noise_floor;
    profiles.push_back(std::move(prof));
  }
  return profiles;
}

std::size_t Corpus::total_events() const {
  std::size_t n = 0;
  for (const CorpusWalk& w : walks) n += w.events.size();
  return n;
}

double Corpus::mean_atom_count() const {
  double sum = 0.0;
  std::size_t n = 0;
  for (const CorpusWalk& w : walks) {
    for (const CorpusEvent& e : w.events) {
      sum += e.atom_count;
      ++n;
    }
  }
  return n ? sum / static_cast<double>(n) : 0.0;
}

double Corpus::mean_airtime_s() const {
  double sum = 0.0;
  std::size_t n = 0;
  for (const CorpusWalk& w : walks) {
    for (const CorpusEvent& e : w.events) {
      sum += airtime_s(e.datagram_bytes);
      ++n;
    }
  }
  return n ? sum / static_cast<double>(n) : 0.0;
}

Corpus build_corpus(const CorpusConfig& config) {
  if (config.num_profiles < 1 || config.footsteps_per_profile < 1)
    throw InvalidArgument("corpus: bad size configuration");

  Corpus corpus;
  corpus.config = config;
  const std::vector<SyntheticPersonProfile> profiles =
      build_default_profiles(config.num_profiles, config.noise_floor);

  for (const SyntheticPersonProfile& profile : profiles) {
    int collected = 0;
    int walk_index = 0;
    // Cap walk count defensively; the expected count is footsteps per walk
    // divided into the target, plus slack for gate discards.
    const int max_walks = 4 * config.footsteps_per_profile /
                              std::max(1, static_cast<int>(config.walk_duration_s /
                                                           profile.cadence_mean_s)) +
                          8;
    while (collected < config.footsteps_per_profile && walk_index < max_walks) {
      const std::uint64_t walk_seed = derive_seed(
          config.seed, "walk/" + std::to_string(profile.person_id) + "/" +
                           std::to_string(walk_index));
      ++walk_index;
      const Walk walk = generate_walk(profile, config.walk_duration_s,
                                      config.sample_rate_hz, walk_seed);
      const ExtractionResult extraction = extract_events(walk.signal, config.detector);
      corpus.rejected_windows += static_cast<int>(extraction.rejected.size());

      CorpusWalk cw;
      cw.person_id = profile.person_id;
      std::optional<double> prev_onset;
      for (const EventWindow& w : extraction.events) {
        if (collected >= config.footsteps_per_profile) break;
        const TimeSeries event = slice_event(walk.signal, w);
        const CompressOutcome outcome =
            compress_ds8bp(event, config.gates, config.lasso, config.energy_fraction);
        if (const auto* discarded = std::get_if<Discarded>(&outcome)) {
          switch (discarded->reason) {
            case DiscardReason::TooFewAtoms: ++corpus.discarded_too_few; break;
            case DiscardReason::TooManyAtoms: ++corpus.discarded_too_many; break;
            case DiscardReason::SolverNonConvergence: ++corpus.discarded_solver; break;
          }
          continue;  // keep the three codec streams aligned
        }
        const auto& compressed = std::get<CompressedEvent>(outcome);

        CorpusEvent ce;
        ce.onset_s = w.onset_time_s;
        ce.atom_count = compressed.atom_count();
        ce.compression_factor = compressed.compression_factor();
        ce.datagram_bytes = datagram_size_bytes(static_cast<std::size_t>(ce.atom_count));
        ce.nc = extract_features(event, prev_onset, w.onset_time_s);
        ce.ds16 = extract_features(compress_ds16(event), prev_onset, w.onset_time_s);
        ce.ds8bp = extract_features(decompress(compressed), prev_onset, w.onset_time_s);
        prev_onset = w.onset_time_s;
        cw.events.push_back(std::move(ce));
        ++collected;
      }
      if (!cw.events.empty()) corpus.walks.push_back(std::move(cw));
    }
  }
  return corpus;
}

std::vector<AggregatedSample> build_samples(const Corpus& corpus, Codec codec,
                                            int f_count) {
  if (f_count < 1) throw InvalidArgument("build_samples: f_count must be >= 1");
  std::vector<AggregatedSample> samples;
  for (const CorpusWalk& walk : corpus.walks) {
    std::vector<FeatureVector> group;
    group.reserve(static_cast<std::size_t>(f_count));
    for (const CorpusEvent& e : walk.events) {
      switch (codec) {
        case Codec::None: group.push_back(e.nc); break;
        case Codec::Ds16: group.push_back(e.ds16); break;
        case Codec::Ds8bp: group.push_back(e.ds8bp); break;
      }
      if (static_cast<int>(group.size()) == f_count) {
        AggregatedSample s = aggregate_sample(group, f_count);
        s.label = walk.person_id;
        samples.push_back(std::move(s));
        group.clear();
      }
    }
  }
  return samples;
}

std::uint64_t config_fingerprint(const CorpusConfig& config) {
  std::ostringstream os;
  os.precision(17);
  os << config.num_profiles << '|' << config.footsteps_per_profile << '|'
     << config.walk_duration_s << '|' << config.noise_floor << '|'
     << config.sample_rate_hz << '|' << config.seed << '|'
     << config.detector.frame_s << '|' << config.detector.hop_s << '|'
     << config.detector.k_sigma << '|' << config.detector.baseline_window_s << '|'
     << config.detector.hangover_frames << '|' << config.gates.l_gc << '|'
     << config.gates.h_gc << '|' << config.lasso.lambda_rel << '|'
     << config.lasso.max_iters << '|' << config.lasso.tol << '|'
     << config.energy_fraction;
  return derive_seed(0, os.str());
}

FootstepsSweepResult sweep_footsteps(const Corpus& corpus,
                                     const std::vector<ClassifierKind>& kinds,
                                     const std::vector<int>& f_values, int folds,
                                     std::uint64_t seed) {
  FootstepsSweepResult result;
  result.fingerprint = config_fingerprint(corpus.config);
  for (const ClassifierKind kind : kinds) {
    for (const int f : f_values) {
      FootstepsSweepRow row;
      row.kind = kind;
      row.f_count = f;
      const std::vector<AggregatedSample> samples = build_samples(corpus, Codec::None, f);
      row.sample_count = static_cast<int>(samples.size());
      if (samples.size() < static_cast<std::size_t>(2 * folds)) {
        row.skipped = true;  // not enough consecutive footsteps at this F
        result.rows.push_back(row);
        continue;
      }
      const CvResult cv =
          cross_validate(samples, kind, Hyperparams::defaults(kind), folds,
                         derive_seed(seed, "footsteps"));
      row.accuracy_mean = cv.accuracy.mean;
      row.accuracy_std = cv.accuracy.stddev;
      result.rows.push_back(row);
    }
  }
  return result;
}

std::string FootstepsSweepResult::to_csv() const {
  std::ostringstream os;
  os << "kind,f_count,accuracy_mean,accuracy_std,samples,skipped,config\n";
  for (const FootstepsSweepRow& r : rows) {
    os << to_string(r.kind) << ',' << r.f_count << ',' << r.accuracy_mean << ','
       << r.accuracy_std << ',' << r.sample_count << ',' << (r.skipped ? 1 : 0)
       << ',' << std::hex << fingerprint << std::dec << '\n';
  }
  return os.str();
}

namespace {

double median_of(std::vector<double> v) {
  std::sort(v.begin(), v.end());
  const std::size_t n = v.size();
  return n % 2 ? v[n / 2] : 0.5 * (v[n / 2 - 1] + v[n / 2]);
}

}  // namespace

SamplingSweepResult sweep_sampling(const CorpusConfig& config,
                                   const std::vector<int>& rates_hz,
                                   ClassifierKind kind, int f_count, int folds,
                                   std::uint64_t seed) {
  SamplingSweepResult result;
  result.fingerprint = config_fingerprint(config);
  const auto base_rate = static_cast<int>(config.sample_rate_hz);
  for (const int rate : rates_hz) {
    if (rate < 250)
      throw InvalidArgument("sweep_sampling: rates below 250 Hz are not supported");
    if (rate > base_rate || base_rate % rate != 0)
      throw InvalidArgument("sweep_sampling: rate must divide the corpus rate");
  }

  const std::vector<SyntheticPersonProfile> profiles =
      build_default_profiles(config.num_profiles, config.noise_floor);

  for (const int rate : rates_hz) {
    const int factor = base_rate / rate;
    SamplingSweepRow row;
    row.rate_hz = rate;

    std::vector<AggregatedSample> samples;
    std::vector<TimeSeries> timing_signals;  // first walks reused for timing
    std::vector<TimeSeries> timing_events;

    for (const SyntheticPersonProfile& profile : profiles) {
      int collected = 0;
      int walk_index = 0;
      while (collected < config.footsteps_per_profile && walk_index < 4096) {
        const std::uint64_t walk_seed = derive_seed(
            config.seed, "walk/" + std::to_string(profile.person_id) + "/" +
                             std::to_string(walk_index));
        ++walk_index;
        Walk walk = generate_walk(profile, config.walk_duration_s,
                                  config.sample_rate_hz, walk_seed);
        const TimeSeries at_rate =
            factor == 1 ? std::move(walk.signal) : decimate(walk.signal, factor);
        if (timing_signals.size() < 8) timing_signals.push_back(at_rate);

        const ExtractionResult extraction = extract_events(at_rate, config.detector);
        std::vector<FeatureVector> group;
        std::optional<double> prev_onset;
        for (const EventWindow& w : extraction.events) {
          if (collected >= config.footsteps_per_profile) break;
          const TimeSeries event = slice_event(at_rate, w);
          if (timing_events.size() < 64) timing_events.push_back(event);
          group.push_back(extract_features(event, prev_onset, w.onset_time_s));
          prev_onset = w.onset_time_s;
          ++collected;
          if (static_cast<int>(group.size()) == f_count) {
            AggregatedSample s = aggregate_sample(group, f_count);
            s.label = profile.person_id;
            samples.push_back(std::move(s));
            group.clear();
          }
        }
      }
    }

    const CvResult cv = cross_validate(samples, kind, Hyperparams::defaults(kind),
                                       folds, derive_seed(seed, "sampling"));
    row.accuracy_mean = cv.accuracy.mean;
    row.accuracy_std = cv.accuracy.stddev;

    // EDT: extraction wall time per detected event; FET: feature time per
    // footstep. Median of 5 runs after one warm-up.
    using Clock = std::chrono::steady_clock;
    std::vector<double> edt_runs, fet_runs;
    for (int run = 0; run < 6; ++run) {
      int events = 0;
      const auto t0 = Clock::now();
      for (const TimeSeries& sig : timing_signals) {
        events += static_cast<int>(extract_events(sig, config.detector).events.size());
      }
      const auto t1 = Clock::now();
      for (const TimeSeries& ev : timing_events) {
        (void)extract_features(ev, std::nullopt, 0.0);
      }
      const auto t2 = Clock::now();
      if (run == 0) continue;  // warm-up
      edt_runs.push_back(std::chrono::duration<double>(t1 - t0).count() /
                         std::max(1, events));
      fet_runs.push_back(std::chrono::duration<double>(t2 - t1).count() /
                         std::max<std::size_t>(1, timing_events.size()));
    }
    row.edt_s = median_of(edt_runs);
    row.fet_s = median_of(fet_runs);
    result.rows.push_back(row);
  }
  return result;
}

std::string SamplingSweepResult::to_csv() const {
  std::ostringstream os;
  os << "rate_hz,accuracy_mean,accuracy_std,edt_s,fet_s,config\n";
  for (const SamplingSweepRow& r : rows) {
    os << r.rate_hz << ',' << r.accuracy_mean << ',' << r.accuracy_std << ','
       << r.edt_s << ',' << r.fet_s << ',' << std::hex << fingerprint << std::dec
       << '\n';
  }
  return os.str();
}

CodecSweepResult compare_codecs(const Corpus& corpus,
                                const std::vector<ClassifierKind>& kinds,
                                const std::vector<int>& f_values, int folds,
                                std::uint64_t seed) {
  CodecSweepResult result;
  result.fingerprint = config_fingerprint(corpus.config);
  for (const Codec codec : {Codec::None, Codec::Ds16, Codec::Ds8bp}) {
    for (const ClassifierKind kind : kinds) {
      for (const int f : f_values) {
        const std::vector<AggregatedSample> samples = build_samples(corpus, codec, f);
        if (samples.size() < static_cast<std::size_t>(2 * folds)) continue;
        const CvResult cv =
            cross_validate(samples, kind, Hyperparams::defaults(kind), folds,
                           derive_seed(seed, "codecs"));
        result.rows.push_back({codec, kind, f, cv.accuracy.mean, cv.accuracy.stddev});
      }
    }
  }
  return result;
}

std::string CodecSweepResult::to_csv() const {
  std::ostringstream os;
  os << "codec,kind,f_count,accuracy_mean,accuracy_std,config\n";
  for (const CodecSweepRow& r : rows) {
    os << to_string(r.codec) << ',' << to_string(r.kind) << ',' << r.f_count << ','
       << r.accuracy_mean << ',' << r.accuracy_std << ',' << std::hex << fingerprint
       << std::dec << '\n';
  }
  return os.str();
}

CompressionHistogram histogram_compression(const Corpus& corpus) {
  CompressionHistogram hist;
  hist.fingerprint = config_fingerprint(corpus.config);
  const int lo = corpus.config.gates.l_gc;
  const int hi = corpus.config.gates.h_gc;
  hist.bin_lo.resize(static_cast<std::size_t>(hi - lo + 1));
  hist.counts.assign(hist.bin_lo.size(), 0);
  for (std::size_t i = 0; i < hist.bin_lo.size(); ++i)
    hist.bin_lo[i] = lo + static_cast<int>(i);

  double sum = 0.0, sum_sq = 0.0, atom_sum = 0.0;
  int n = 0;
  for (const CorpusWalk& w : corpus.walks) {
    for (const CorpusEvent& e : w.events) {
      const double factor = e.compression_factor;
      if (factor < lo || factor >= hi + 1) continue;  // outside the gate range
      const auto bin = static_cast<std::size_t>(static_cast<int>(factor) - lo);
      ++hist.counts[bin];
      sum += factor;
      sum_sq += factor * factor;
      atom_sum += e.atom_count;
      ++n;
    }
  }
  hist.total_events = n;
  if (n > 0) {
    hist.mean_factor = sum / n;
    hist.std_factor = std::sqrt(std::max(0.0, sum_sq / n - hist.mean_factor * hist.mean_factor));
    hist.mean_atoms = atom_sum / n;
  }
  return hist;
}

std::string CompressionHistogram::to_csv() const {
  std::ostringstream os;
  os << "factor_bin_lo,count,config\n";
  for (std::size_t i = 0; i < bin_lo.size(); ++i) {
    os << bin_lo[i] << ',' << counts[i] << ',' << std::hex << fingerprint << std::dec
       << '\n';
  }
  os << "# mean_factor=" << mean_factor << " std_factor=" << std_factor
     << " mean_atoms=" << mean_atoms << " events=" << total_events << '\n';
  return os.str();
}

}  // namespace footfall
