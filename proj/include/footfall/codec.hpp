#pragma once

#include <cstdint>
#include <span>
#include <variant>
#include <vector>

#include "footfall/sparse_coder.hpp"
#include "footfall/time_series.hpp"

namespace footfall {

// One compressed footfall event: the retained atom indices I, their
// least-squares coefficients, and the down-sampled length L that regenerates
// the dictionary on the receiving side.
struct CompressedEvent {
  Eigen::VectorXd coefficients;   // length M
  std::vector<int> atom_indices;  // length M, order matches coefficients
  int length_l = 0;

  int atom_count() const { return static_cast<int>(atom_indices.size()); }
  double compression_factor() const {
    return static_cast<double>(length_l) / static_cast<double>(atom_count());
  }
};

// Throws InvalidArgument / CorruptEvent when the event violates its
// invariants (M >= 1, equal lengths, indices unique and inside 101*L,
// L and indices within 16 bits).
void validate(const CompressedEvent& event);

// Atom-count acceptance gate. Events needing more than h_gc atoms are
// broadband noise; events under l_gc carry too little structure to recover.
struct GateConfig {
  int l_gc = 5;
  int h_gc = 40;
};

void validate(const GateConfig& cfg);

enum class DiscardReason { TooFewAtoms, TooManyAtoms, SolverNonConvergence };

const char* to_string(DiscardReason reason);

struct Discarded {
  DiscardReason reason;
  int atom_count = 0;  // selected atoms at the gate (0 for solver failures)
};

using CompressOutcome = std::variant<CompressedEvent, Discarded>;

inline bool accepted(const CompressOutcome& outcome) {
  return std::holds_alternative<CompressedEvent>(outcome);
}

// DS8BP: decimate the 8 kHz event by 8, sparse-code it over the Gabor
// dictionary for its length, keep the atoms carrying energy_fraction of the
// coefficient energy, gate on the atom count, and re-project the
// down-sampled signal onto the kept atoms.
CompressOutcome compress_ds8bp(const TimeSeries& event, const GateConfig& gates = {},
                               const LassoConfig& lasso = {},
                               double energy_fraction = 0.99);

// Inverse: regenerate the dictionary for L, weight the indexed columns by
// the coefficients. Output is the recovered down-sampled signal at 1 kHz.
TimeSeries decompress(const CompressedEvent& event);

// Baseline codec: plain decimation by 16 (8 kHz -> 500 Hz).
TimeSeries compress_ds16(const TimeSeries& event);

// Wire format, little-endian: [u16 L][M x u16 atom_index][M x f64 coefficient].
// Total length is exactly 10*M + 2 bytes; M is implied by the length.
std::vector<std::uint8_t> encode_datagram(const CompressedEvent& event);
CompressedEvent decode_datagram(std::span<const std::uint8_t> bytes);

constexpr std::size_t datagram_size_bytes(std::size_t atom_count) {
  return 10 * atom_count + 2;
}

inline double airtime_s(std::size_t bytes, double data_rate_bps = 80000.0) {
  return static_cast<double>(bytes) * 8.0 / data_rate_bps;
}

}  // namespace footfall
