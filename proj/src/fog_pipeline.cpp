#include "footfall/fog_pipeline.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

#include "footfall/errors.hpp"

namespace footfall {

void validate(const Topology& topo) {
  if (topo.zones.empty()) throw InvalidArgument("topology: no zones");
  std::set<std::string> zone_ids;
  for (const Zone& z : topo.zones) {
    if (z.id.empty()) throw InvalidArgument("topology: empty zone id");
    if (!zone_ids.insert(z.id).second)
      throw InvalidArgument("topology: duplicate zone id " + z.id);
    if (z.subzones.empty())
      throw InvalidArgument("topology: zone " + z.id + " has no sub-zones");
    std::set<std::string> sub_ids;
    for (const std::string& s : z.subzones) {
      if (s.empty() || !sub_ids.insert(s).second)
        throw InvalidArgument("topology: bad sub-zone id in zone " + z.id);
    }
  }
}

ThingRunResult run_thing(const TimeSeries& signal, const DetectorConfig& detector,
                         const GateConfig& gates, const LassoConfig& lasso,
                         const LinkModel& link, const std::string& zone_id,
                         const std::string& subzone_id, double capture_window_s) {
  validate(signal, "run_thing");
  if (!(capture_window_s > 0.0))
    throw InvalidArgument("run_thing: capture window must be positive");

  const double rate = signal.sample_rate_hz;
  const double total_s = signal.duration_s();

  // Overlap long enough to carry the detector baseline and one full event
  // across window edges; a short lookahead completes events straddling the
  // window end.
  const double overlap_s = detector.baseline_window_s + kMaxEventWidthS + 0.1;
  const double lookahead_s = kMaxEventWidthS + 0.1;

  ThingRunResult result;
  double window_start = 0.0;
  while (window_start < total_s) {
    const double window_end = std::min(window_start + capture_window_s, total_s);
    const double seg_start = std::max(0.0, window_start - overlap_s);
    const double seg_end = std::min(total_s, window_end + lookahead_s);

    const auto first = static_cast<Eigen::Index>(std::llround(seg_start * rate));
    const auto last = static_cast<Eigen::Index>(std::llround(seg_end * rate));
    TimeSeries segment;
    segment.sample_rate_hz = rate;
    segment.samples = signal.samples.segment(first, last - first);
    if (segment.duration_s() < detector.baseline_window_s) break;

    const ExtractionResult extraction = extract_events(segment, detector);
    result.rejected_windows += static_cast<int>(extraction.rejected.size());

    for (const EventWindow& w : extraction.events) {
      const double onset = seg_start + w.onset_time_s;
      if (onset < window_start || onset >= window_end) continue;  // other window

      const TimeSeries event = slice_event(segment, w);
      const CompressOutcome outcome = compress_ds8bp(event, gates, lasso);
      if (const auto* discarded = std::get_if<Discarded>(&outcome)) {
        result.discarded.push_back({onset, discarded->reason});
        continue;
      }
      const auto& compressed = std::get<CompressedEvent>(outcome);
      Transmission tx;
      tx.zone_id = zone_id;
      tx.subzone_id = subzone_id;
      tx.onset_s = onset;
      tx.datagram = encode_datagram(compressed);
      tx.airtime_s = link.airtime_s(tx.datagram.size());
      result.sent.push_back(std::move(tx));
    }
    window_start += capture_window_s;
  }
  return result;
}

namespace {

std::string escape_field(const std::string& s) {
  std::string out;
  for (const char c : s) {
    if (c == '|' || c == '\\' || c == '\n') out.push_back('\\');
    out.push_back(c);
  }
  return out;
}

}  // namespace

RecordStore::RecordStore(std::string file_path) : file_path_(std::move(file_path)) {}

const IdentificationRecord& RecordStore::append(IdentificationRecord rec) {
  rec.seq = next_seq_++;
  records_.push_back(std::move(rec));
  const IdentificationRecord& stored = records_.back();
  if (!file_path_.empty()) {
    std::ofstream out(file_path_, std::ios::app);
    if (!out) throw IoError("record store: cannot append to " + file_path_);
    out.precision(17);
    out << stored.seq << '|' << stored.timestamp_s << '|' << escape_field(stored.zone_id)
        << '|' << escape_field(stored.subzone_id) << '|' << stored.predicted_person
        << '|' << stored.confidence << '|' << stored.f_count << '\n';
    if (!out) throw IoError("record store: write failed for " + file_path_);
  }
  return stored;
}

RecordStore RecordStore::load(const std::string& file_path) {
  std::ifstream in(file_path);
  if (!in) throw IoError("record store: cannot open " + file_path);
  RecordStore store;
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::vector<std::string> fields;
    std::string cur;
    for (std::size_t i = 0; i < line.size(); ++i) {
      if (line[i] == '\\' && i + 1 < line.size()) {
        cur.push_back(line[++i]);
      } else if (line[i] == '|') {
        fields.push_back(std::move(cur));
        cur.clear();
      } else {
        cur.push_back(line[i]);
      }
    }
    fields.push_back(std::move(cur));
    if (fields.size() != 7) throw IoError("record store: malformed line in " + file_path);
    IdentificationRecord rec;
    rec.seq = std::stoull(fields[0]);
    rec.timestamp_s = std::stod(fields[1]);
    rec.zone_id = fields[2];
    rec.subzone_id = fields[3];
    rec.predicted_person = std::stoi(fields[4]);
    rec.confidence = std::stod(fields[5]);
    rec.f_count = std::stoi(fields[6]);
    store.next_seq_ = std::max(store.next_seq_, rec.seq + 1);
    store.records_.push_back(std::move(rec));
  }
  return store;
}

FogNode::FogNode(std::string zone_id, const ClassifierModel& model, int f_count,
                 RecordStore* store)
    : zone_id_(std::move(zone_id)), model_(&model), f_count_(f_count), store_(store) {
  if (f_count < 1) throw InvalidArgument("fog: f_count must be >= 1");
  if (store == nullptr) throw InvalidArgument("fog: store required");
}

std::optional<IdentificationRecord> FogNode::process(const Transmission& tx) {
  CompressedEvent event;
  try {
    event = decode_datagram(tx.datagram);
  } catch (const MalformedDatagram&) {
    ++malformed_;
    return std::nullopt;
  } catch (const CorruptEvent&) {
    ++malformed_;
    return std::nullopt;
  }

  SubzoneState& state = subzones_[tx.subzone_id];
  const TimeSeries recovered = decompress(event);
  const FeatureVector fv = extract_features(recovered, state.prev_onset_s, tx.onset_s);
  state.prev_onset_s = tx.onset_s;
  state.last_onset_s = tx.onset_s;
  state.buffer.push_back(fv);
  if (static_cast<int>(state.buffer.size()) < f_count_) return std::nullopt;

  AggregatedSample sample = aggregate_sample(state.buffer, f_count_);
  state.buffer.clear();
  const Prediction pred = predict(*model_, sample);

  IdentificationRecord rec;
  rec.timestamp_s = state.last_onset_s;  // onset of the sample's last footstep
  rec.zone_id = zone_id_;
  rec.subzone_id = tx.subzone_id;
  rec.predicted_person = pred.label;
  rec.confidence = pred.confidence;
  rec.f_count = f_count_;
  return store_->append(rec);
}

std::vector<IdentificationRecord> run_fog(const std::vector<Transmission>& datagrams,
                                          const ClassifierModel& model, int f_count,
                                          RecordStore* store) {
  RecordStore local;
  FogNode node("fog", model, f_count, store ? store : &local);
  std::vector<IdentificationRecord> out;
  for (const Transmission& tx : datagrams) {
    if (auto rec = node.process(tx)) out.push_back(std::move(*rec));
  }
  return out;
}

namespace {

std::string dedup_key(const IdentificationRecord& rec) {
  std::ostringstream key;
  key.precision(17);
  key << rec.zone_id << '\x1f' << rec.subzone_id << '\x1f' << rec.timestamp_s;
  return key.str();
}

}  // namespace

SyncResult sync_cloud(const std::vector<const RecordStore*>& fog_stores,
                      RecordStore& cloud_store) {
  std::set<std::string> present;
  for (const IdentificationRecord& rec : cloud_store.records()) {
    present.insert(dedup_key(rec));
  }
  SyncResult result;
  for (const RecordStore* fog : fog_stores) {
    if (fog == nullptr) throw InvalidArgument("sync_cloud: null store");
    for (const IdentificationRecord& rec : fog->records()) {
      if (present.insert(dedup_key(rec)).second) {
        cloud_store.append(rec);  // re-sequenced by the cloud store
        ++result.added;
      }
    }
  }
  return result;
}

SyncResult sync_cloud_files(const std::vector<std::string>& fog_store_paths,
                            const std::string& cloud_store_path) {
  RecordStore cloud = [&] {
    try {
      return RecordStore::load(cloud_store_path);
    } catch (const IoError&) {
      return RecordStore();  // fresh cloud store
    }
  }();

  std::vector<RecordStore> loaded;
  SyncResult result;
  for (const std::string& path : fog_store_paths) {
    try {
      loaded.push_back(RecordStore::load(path));
    } catch (const IoError&) {
      result.failed_stores.push_back(path);
    }
  }
  std::vector<const RecordStore*> ptrs;
  ptrs.reserve(loaded.size());
  for (const RecordStore& s : loaded) ptrs.push_back(&s);
  const SyncResult merged = sync_cloud(ptrs, cloud);
  result.added = merged.added;

  std::ofstream out(cloud_store_path, std::ios::trunc);
  if (!out) throw IoError("sync_cloud_files: cannot write " + cloud_store_path);
  out.close();
  RecordStore rewritten(cloud_store_path);
  for (const IdentificationRecord& rec : cloud.records()) rewritten.append(rec);
  return result;
}

}  // namespace footfall
