#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "footfall/classify.hpp"
#include "footfall/codec.hpp"
#include "footfall/event_extraction.hpp"

namespace footfall {

// Radio link accounting: airtime only, no loss or retransmission model.
struct LinkModel {
  double data_rate_bps = 80000.0;
  double airtime_s(std::size_t bytes) const {
    return static_cast<double>(bytes) * 8.0 / data_rate_bps;
  }
};

struct Zone {
  std::string id;
  std::vector<std::string> subzones;  // one Thing per sub-zone
};

// Zones each own one Fog node; every sub-zone hosts exactly one Thing.
struct Topology {
  std::vector<Zone> zones;
};

void validate(const Topology& topo);

struct IdentificationRecord {
  std::uint64_t seq = 0;  // store-assigned, monotone per store
  double timestamp_s = 0.0;
  std::string zone_id;
  std::string subzone_id;
  int predicted_person = 0;
  double confidence = 0.0;
  int f_count = 1;
};

// What travels Thing -> Fog: the datagram plus the envelope metadata the
// radio layer would carry (addressing and the capture timestamp).
struct Transmission {
  std::string zone_id;
  std::string subzone_id;
  double onset_s = 0.0;
  std::vector<std::uint8_t> datagram;
  double airtime_s = 0.0;
};

struct DiscardLogEntry {
  double onset_s = 0.0;
  DiscardReason reason;
};

struct ThingRunResult {
  std::vector<Transmission> sent;            // onset order
  std::vector<DiscardLogEntry> discarded;    // gate / solver discards
  int rejected_windows = 0;                  // width-gate rejections
};

// Thing-side pipeline: extract events from the capture signal, compress each
// with DS8BP, encode accepted events as datagrams. Signals longer than the
// capture window are processed in overlapping windows; events are assigned
// to the window containing their onset so none are double-counted.
ThingRunResult run_thing(const TimeSeries& signal, const DetectorConfig& detector,
                         const GateConfig& gates, const LassoConfig& lasso,
                         const LinkModel& link, const std::string& zone_id,
                         const std::string& subzone_id,
                         double capture_window_s = 10.0);

// Append-only record store; optionally mirrored to a newline-delimited file.
class RecordStore {
 public:
  RecordStore() = default;
  explicit RecordStore(std::string file_path);

  // Assigns the next sequence number and appends (and persists when backed
  // by a file). Returns the stored record.
  const IdentificationRecord& append(IdentificationRecord rec);

  const std::vector<IdentificationRecord>& records() const { return records_; }
  std::size_t size() const { return records_.size(); }

  static RecordStore load(const std::string& file_path);

 private:
  std::vector<IdentificationRecord> records_;
  std::string file_path_;
  std::uint64_t next_seq_ = 1;
};

// Fog-side consumer for one zone. Datagrams from each Thing are buffered
// per sub-zone until f_count footsteps are available, then aggregated,
// classified, and stored. Malformed datagrams are counted and skipped.
class FogNode {
 public:
  FogNode(std::string zone_id, const ClassifierModel& model, int f_count,
          RecordStore* store);

  std::optional<IdentificationRecord> process(const Transmission& tx);

  int malformed_count() const { return malformed_; }
  const RecordStore& store() const { return *store_; }

 private:
  struct SubzoneState {
    std::vector<FeatureVector> buffer;
    std::optional<double> prev_onset_s;
    double last_onset_s = 0.0;
  };

  std::string zone_id_;
  const ClassifierModel* model_;
  int f_count_;
  RecordStore* store_;
  std::map<std::string, SubzoneState> subzones_;
  int malformed_ = 0;
};

// Convenience wrapper: feeds an ordered stream through a fresh FogNode.
std::vector<IdentificationRecord> run_fog(const std::vector<Transmission>& datagrams,
                                          const ClassifierModel& model, int f_count,
                                          RecordStore* store = nullptr);

struct SyncResult {
  int added = 0;
  std::vector<std::string> failed_stores;
};

// Cloud sync: union of all fog records into the cloud store, deduplicated
// by (zone, subzone, timestamp). Idempotent.
SyncResult sync_cloud(const std::vector<const RecordStore*>& fog_stores,
                      RecordStore& cloud_store);

// File-level variant used by the CLI; unreadable stores are reported in
// failed_stores rather than aborting the sync.
SyncResult sync_cloud_files(const std::vector<std::string>& fog_store_paths,
                            const std::string& cloud_store_path);

}  // namespace footfall
