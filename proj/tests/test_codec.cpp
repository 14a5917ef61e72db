#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <complex>
#include <numbers>

#include <unsupported/Eigen/FFT>

#include "footfall/codec.hpp"
#include "footfall/signal_core.hpp"
#include "test_support.hpp"

using namespace footfall;

namespace {

// An 8 kHz event whose 1 kHz decimation is a known atom combination: the
// atoms are evaluated on the fine grid so the decimated signal matches the
// dictionary columns up to filter ripple.
TimeSeries event8k_from_atoms(int length_l, int n_atoms, std::uint64_t seed,
                              double noise_std = 0.0) {
  const auto dict = shared_dictionary(length_l);
  Rng rng(seed);
  const auto built = testing::build_event_from_atoms(*dict, n_atoms, rng, 0.0);

  // Upsample by evaluating the same analytic atoms on the 8x grid.
  const int n8 = length_l * 8;
  const Eigen::VectorXd t8 =
      Eigen::VectorXd::LinSpaced(n8, 0.0, static_cast<double>(n8 - 1) / (8.0 * (length_l - 1)));
  TimeSeries ts;
  ts.sample_rate_hz = 8000.0;
  ts.samples = Eigen::VectorXd::Zero(n8);
  const Eigen::VectorXd grid = Eigen::VectorXd::LinSpaced(length_l, 0.0, 1.0);
  for (Eigen::Index a = 0; a < built.coefficients.size(); ++a) {
    const int j = built.atom_indices[static_cast<std::size_t>(a)];
    const int k = j / GaborDictionary::kBlockSize;
    const int q = j % GaborDictionary::kBlockSize;
    const double tau = grid[k];
    const double c = built.coefficients[a];
    for (int i = 0; i < n8; ++i) {
      const double env = std::exp(-4.0 * std::pow(t8[i] - tau, 2));
      double osc = 1.0;
      if (q > 0) {
        const double omega = 5.0 * ((q - 1) / 2 + 1);
        osc = (q % 2 == 1) ? std::cos(omega * t8[i]) : std::sin(omega * t8[i]);
      }
      ts.samples[i] += c * env * osc;
    }
  }
  if (noise_std > 0.0) {
    for (int i = 0; i < n8; ++i) ts.samples[i] += noise_std * rng.normal();
  }
  return ts;
}

CompressedEvent make_event(std::vector<int> indices, std::vector<double> coeffs, int L) {
  CompressedEvent e;
  e.atom_indices = std::move(indices);
  e.coefficients = Eigen::Map<Eigen::VectorXd>(coeffs.data(),
                                               static_cast<Eigen::Index>(coeffs.size()));
  e.length_l = L;
  return e;
}

}  // namespace

TEST_CASE("ds8bp round trip on a known atom combination") {
  const TimeSeries event = event8k_from_atoms(250, 12, 42, 0.02);
  const CompressOutcome outcome = compress_ds8bp(event);
  REQUIRE(accepted(outcome));
  const auto& compressed = std::get<CompressedEvent>(outcome);
  CHECK(compressed.length_l == 250);

  const TimeSeries ds = decimate(event, 8);
  const TimeSeries rec = decompress(compressed);
  REQUIRE(rec.size() == ds.size());
  CHECK(rec.sample_rate_hz == doctest::Approx(1000.0));
  CHECK(relative_l2_error(rec.samples, ds.samples) <= 0.05);
}

TEST_CASE("broadband noise bursts are discarded as too-many-atoms") {
  int discarded_noise = 0;
  for (int t = 0; t < 20; ++t) {
    Rng rng(static_cast<std::uint64_t>(300 + t));
    TimeSeries burst;
    burst.sample_rate_hz = 8000.0;
    burst.samples.resize(2000);  // 0.25 s footstep-like width
    for (Eigen::Index i = 0; i < burst.size(); ++i) burst.samples[i] = rng.normal();
    const CompressOutcome outcome = compress_ds8bp(burst);
    if (const auto* d = std::get_if<Discarded>(&outcome)) {
      if (d->reason == DiscardReason::TooManyAtoms) ++discarded_noise;
    }
  }
  CHECK(discarded_noise == 20);
}

TEST_CASE("decompress: single atom with unit coefficient returns that column") {
  const auto dict = shared_dictionary(150);
  const CompressedEvent e = make_event({321}, {1.0}, 150);
  const TimeSeries rec = decompress(e);
  Eigen::VectorXd col(150);
  dict->column(321, col);
  CHECK(rec.samples == col);
}

TEST_CASE("decompress: zero coefficients give the zero signal") {
  const CompressedEvent e = make_event({0, 101, 202}, {0.0, 0.0, 0.0}, 64);
  CHECK(decompress(e).samples.isZero(0.0));
}

TEST_CASE("decompress: out-of-range index is a corrupt event") {
  const CompressedEvent e = make_event({101 * 64}, {1.0}, 64);
  CHECK_THROWS_AS(decompress(e), CorruptEvent);
  const CompressedEvent dup = make_event({5, 5}, {1.0, 2.0}, 64);
  CHECK_THROWS_AS(decompress(dup), CorruptEvent);
}

TEST_CASE("ds16 is plain decimation by 16") {
  TimeSeries event;
  event.sample_rate_hz = 8000.0;
  event.samples = Eigen::VectorXd::Random(2005);
  const TimeSeries out = compress_ds16(event);
  CHECK(out.size() == 125);
  CHECK(out.sample_rate_hz == doctest::Approx(500.0));
  // Transmission arithmetic: 125 samples x 8 bytes at 80 kbps = 100 ms.
  CHECK(airtime_s(125 * 8) == doctest::Approx(0.100));
}

TEST_CASE("datagram layout: 10M + 2 bytes, little-endian") {
  std::vector<int> idx(18);
  std::vector<double> coeffs(18);
  for (int i = 0; i < 18; ++i) {
    idx[static_cast<std::size_t>(i)] = 100 + i;
    coeffs[static_cast<std::size_t>(i)] = 0.5 * i;
  }
  const CompressedEvent e = make_event(idx, coeffs, 300);
  const std::vector<std::uint8_t> bytes = encode_datagram(e);
  CHECK(bytes.size() == 182);  // M = 18
  CHECK(bytes.size() == datagram_size_bytes(18));

  // Little-endian L = 300 = 0x012c.
  CHECK(bytes[0] == 0x2c);
  CHECK(bytes[1] == 0x01);
  // First atom index 100 = 0x0064.
  CHECK(bytes[2] == 0x64);
  CHECK(bytes[3] == 0x00);

  // Mean-length airtime arithmetic from the wire format.
  CHECK(airtime_s(datagram_size_bytes(18)) == doctest::Approx(0.0182));
  CHECK((10.0 * 18.51 + 2.0) * 8.0 / 80000.0 == doctest::Approx(0.018712));
}

TEST_CASE("minimal 12-byte datagram decodes to one atom") {
  const CompressedEvent e = make_event({7}, {1.25}, 32);
  const std::vector<std::uint8_t> bytes = encode_datagram(e);
  REQUIRE(bytes.size() == 12);
  const CompressedEvent back = decode_datagram(bytes);
  CHECK(back.length_l == 32);
  CHECK(back.atom_indices == std::vector<int>{7});
  CHECK(back.coefficients[0] == 1.25);
}

TEST_CASE("encode/decode round trip is bitwise over random events") {
  Rng rng(2024);
  for (int t = 0; t < 1000; ++t) {
    const int L = static_cast<int>(rng.uniform_int(2, 437));
    const int m = static_cast<int>(rng.uniform_int(1, std::min(40L, 101L * L / 2)));
    std::vector<int> idx;
    std::vector<double> coeffs;
    while (static_cast<int>(idx.size()) < m) {
      const int j = static_cast<int>(rng.uniform_int(0, 101 * L - 1));
      if (j > 0xffff) continue;
      if (std::find(idx.begin(), idx.end(), j) == idx.end()) {
        idx.push_back(j);
        coeffs.push_back(rng.normal() * std::pow(10.0, rng.uniform(-3.0, 3.0)));
      }
    }
    const CompressedEvent e = make_event(idx, coeffs, L);
    const std::vector<std::uint8_t> bytes = encode_datagram(e);
    CHECK(bytes.size() == datagram_size_bytes(static_cast<std::size_t>(m)));
    const CompressedEvent back = decode_datagram(bytes);
    CHECK(back.length_l == e.length_l);
    CHECK(back.atom_indices == e.atom_indices);
    CHECK(back.coefficients == e.coefficients);  // bitwise
  }
}

TEST_CASE("malformed datagrams are rejected") {
  const CompressedEvent e = make_event({1, 2, 3}, {1.0, 2.0, 3.0}, 64);
  std::vector<std::uint8_t> bytes = encode_datagram(e);

  std::vector<std::uint8_t> truncated(bytes.begin(), bytes.end() - 3);
  CHECK_THROWS_AS(decode_datagram(truncated), MalformedDatagram);
  CHECK_THROWS_AS(decode_datagram(std::vector<std::uint8_t>{}), MalformedDatagram);
  CHECK_THROWS_AS(decode_datagram(std::vector<std::uint8_t>(11, 0)), MalformedDatagram);

  // Structurally fine but duplicate indices: corrupt.
  std::vector<std::uint8_t> dup = encode_datagram(make_event({4, 9}, {1.0, 2.0}, 64));
  dup[2] = dup[4];
  dup[3] = dup[5];
  CHECK_THROWS_AS(decode_datagram(dup), CorruptEvent);

  // Index beyond 101*L: corrupt.
  std::vector<std::uint8_t> oob = encode_datagram(make_event({4}, {1.0}, 2));
  oob[2] = 0xff;
  oob[3] = 0x01;  // 511 >= 202
  CHECK_THROWS_AS(decode_datagram(oob), CorruptEvent);
}

TEST_CASE("encoding overflow guards") {
  // length_l beyond 16 bits is already a corrupt event; an index beyond
  // 16 bits but inside the dictionary is an encoding overflow.
  const int L = 700;  // 101*L = 70700 > 65535
  const CompressedEvent e = make_event({70000}, {1.0}, L);
  CHECK_THROWS_AS(encode_datagram(e), EncodingOverflow);
}

TEST_CASE("accepted events satisfy the atom-count gate") {
  for (std::uint64_t seed : {10u, 11u, 12u, 13u}) {
    const TimeSeries event = event8k_from_atoms(200, 10, seed, 0.02);
    const GateConfig gates;
    const CompressOutcome outcome = compress_ds8bp(event, gates);
    if (accepted(outcome)) {
      const auto& c = std::get<CompressedEvent>(outcome);
      CHECK(c.atom_count() >= gates.l_gc);
      CHECK(c.atom_count() <= gates.h_gc);
    }
  }
}

TEST_CASE("recovered signal has no energy above the dictionary band") {
  // The dictionary's top oscillation runs 250/(2*pi) cycles per unit time,
  // i.e. ~40/(duration) Hz-equivalent cycles over the event. A smooth window
  // suppresses the finite-support leakage, so everything beyond the band
  // edge plus the window spread must be at the numerical floor.
  const TimeSeries event = event8k_from_atoms(250, 12, 99, 0.0);
  const CompressOutcome outcome = compress_ds8bp(event);
  REQUIRE(accepted(outcome));
  const TimeSeries rec = decompress(std::get<CompressedEvent>(outcome));

  const Eigen::Index n = rec.size();
  Eigen::VectorXd windowed(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    const double u = static_cast<double>(i) / static_cast<double>(n - 1);
    windowed[i] = rec.samples[i] * std::exp(-0.5 * std::pow((u - 0.5) / 0.12, 2));
  }
  Eigen::FFT<double> fft;
  std::vector<double> buf(windowed.data(), windowed.data() + n);
  std::vector<std::complex<double>> spectrum;
  fft.fwd(spectrum, buf);

  const double duration = static_cast<double>(n - 1) / 1000.0;
  const double top_hz = 250.0 / (2.0 * std::numbers::pi) / duration;
  const double guard_hz = top_hz + 5.0 / duration + 10.0;  // window spread margin
  const double df = 1000.0 / static_cast<double>(n);
  double high = 0.0, total = 0.0;
  for (Eigen::Index k = 0; k <= n / 2; ++k) {
    const double f = k * df;
    const double e = std::norm(spectrum[static_cast<std::size_t>(k)]);
    total += e;
    if (f > guard_hz) high += e;
  }
  CHECK(high / total <= 1e-9);
}
