#include "footfall/codec.hpp"

#include <bit>
#include <cmath>
#include <unordered_set>

#include "footfall/errors.hpp"
#include "footfall/signal_core.hpp"

namespace footfall {

namespace {

constexpr int kDownsampleFactor = 8;
constexpr int kDs16Factor = 16;
constexpr double kRecoveredRateHz = 1000.0;
constexpr std::uint32_t kMaxU16 = 0xffff;

}  // namespace

void validate(const CompressedEvent& event) {
  const auto m = static_cast<std::size_t>(event.coefficients.size());
  if (m == 0 || event.atom_indices.size() != m)
    throw CorruptEvent("compressed event: need equal-length, nonempty fields");
  if (event.length_l < 2 || static_cast<std::uint32_t>(event.length_l) > kMaxU16)
    throw CorruptEvent("compressed event: length out of range");
  const long total = 101L * event.length_l;
  std::unordered_set<int> seen;
  seen.reserve(m);
  for (const int idx : event.atom_indices) {
    if (idx < 0 || idx >= total)
      throw CorruptEvent("compressed event: atom index out of dictionary range");
    if (!seen.insert(idx).second)
      throw CorruptEvent("compressed event: duplicate atom index");
  }
}

void validate(const GateConfig& cfg) {
  if (cfg.l_gc < 1 || cfg.l_gc > cfg.h_gc)
    throw InvalidArgument("gate: need 0 < l_gc <= h_gc");
}

const char* to_string(DiscardReason reason) {
  switch (reason) {
    case DiscardReason::TooFewAtoms: return "too-few-atoms";
    case DiscardReason::TooManyAtoms: return "too-many-atoms";
    case DiscardReason::SolverNonConvergence: return "solver";
  }
  return "unknown";
}

CompressOutcome compress_ds8bp(const TimeSeries& event, const GateConfig& gates,
                               const LassoConfig& lasso, double energy_fraction) {
  validate(event, "compress_ds8bp");
  validate(gates);
  if (!(energy_fraction > 0.0) || energy_fraction > 1.0)
    throw InvalidArgument("compress_ds8bp: energy fraction must be in (0, 1]");
  if (event.size() / kDownsampleFactor < 2)
    throw InvalidArgument("compress_ds8bp: event too short to down-sample");

  const TimeSeries ds = decimate(event, kDownsampleFactor);
  const int length = static_cast<int>(ds.size());
  const auto dict = shared_dictionary(length);

  const SparseCode code = solve_lasso(*dict, ds, lasso);
  if (!code.converged) return Discarded{DiscardReason::SolverNonConvergence, 0};
  if (code.coefficients.empty()) return Discarded{DiscardReason::TooFewAtoms, 0};

  const std::vector<int> kept =
      select_atoms_by_energy(code, length, energy_fraction, dict->column_norms());
  const int m = static_cast<int>(kept.size());
  if (m < gates.l_gc) return Discarded{DiscardReason::TooFewAtoms, m};
  if (m > gates.h_gc) return Discarded{DiscardReason::TooManyAtoms, m};

  const Eigen::MatrixXd selected = select_columns(*dict, kept);
  const ProjectionResult proj = project_least_squares(selected, ds.samples);

  CompressedEvent out;
  out.coefficients = proj.coefficients;
  out.atom_indices = kept;
  out.length_l = length;
  return out;
}

TimeSeries decompress(const CompressedEvent& event) {
  validate(event);
  const auto dict = shared_dictionary(event.length_l);
  const Eigen::MatrixXd selected = select_columns(*dict, event.atom_indices);
  TimeSeries out;
  out.sample_rate_hz = kRecoveredRateHz;
  out.samples = selected * event.coefficients;
  return out;
}

TimeSeries compress_ds16(const TimeSeries& event) {
  return decimate(event, kDs16Factor);
}

namespace {

void put_u16_le(std::vector<std::uint8_t>& out, std::uint16_t v) {
  out.push_back(static_cast<std::uint8_t>(v & 0xff));
  out.push_back(static_cast<std::uint8_t>(v >> 8));
}

void put_f64_le(std::vector<std::uint8_t>& out, double v) {
  const auto bits = std::bit_cast<std::uint64_t>(v);
  for (int b = 0; b < 8; ++b) {
    out.push_back(static_cast<std::uint8_t>((bits >> (8 * b)) & 0xff));
  }
}

std::uint16_t get_u16_le(const std::uint8_t* p) {
  return static_cast<std::uint16_t>(p[0] | (p[1] << 8));
}

double get_f64_le(const std::uint8_t* p) {
  std::uint64_t bits = 0;
  for (int b = 7; b >= 0; --b) bits = (bits << 8) | p[b];
  return std::bit_cast<double>(bits);
}

}  // namespace

std::vector<std::uint8_t> encode_datagram(const CompressedEvent& event) {
  validate(event);
  if (static_cast<std::uint32_t>(event.length_l) > kMaxU16)
    throw EncodingOverflow("encode_datagram: length exceeds 16 bits");
  for (const int idx : event.atom_indices) {
    if (static_cast<std::uint32_t>(idx) > kMaxU16)
      throw EncodingOverflow("encode_datagram: atom index exceeds 16 bits");
  }

  const auto m = static_cast<std::size_t>(event.atom_count());
  std::vector<std::uint8_t> out;
  out.reserve(datagram_size_bytes(m));
  put_u16_le(out, static_cast<std::uint16_t>(event.length_l));
  for (const int idx : event.atom_indices) {
    put_u16_le(out, static_cast<std::uint16_t>(idx));
  }
  for (Eigen::Index i = 0; i < event.coefficients.size(); ++i) {
    put_f64_le(out, event.coefficients[i]);
  }
  return out;
}

CompressedEvent decode_datagram(std::span<const std::uint8_t> bytes) {
  if (bytes.size() < datagram_size_bytes(1) || (bytes.size() - 2) % 10 != 0)
    throw MalformedDatagram("decode_datagram: length must be 10*M + 2 with M >= 1");

  const std::size_t m = (bytes.size() - 2) / 10;
  CompressedEvent event;
  event.length_l = get_u16_le(bytes.data());
  event.atom_indices.resize(m);
  for (std::size_t i = 0; i < m; ++i) {
    event.atom_indices[i] = get_u16_le(bytes.data() + 2 + 2 * i);
  }
  event.coefficients.resize(static_cast<Eigen::Index>(m));
  const std::size_t coeff_base = 2 + 2 * m;
  for (std::size_t i = 0; i < m; ++i) {
    event.coefficients[static_cast<Eigen::Index>(i)] =
        get_f64_le(bytes.data() + coeff_base + 8 * i);
  }
  validate(event);
  return event;
}

}  // namespace footfall
