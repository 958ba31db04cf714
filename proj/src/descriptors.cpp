#include "gdpkit/descriptors.hpp"

#include <bit>
#include <cassert>

namespace gdpkit {

LbpCode lbp_code(const Neighborhood& nbhd) {
  int code = 0;
  for (int k = 0; k < 8; ++k) {
    if (nbhd.ring[k] >= nbhd.center) {
      code |= 1 << (7 - k);
    }
  }
  return static_cast<LbpCode>(code);
}

namespace {

// r_d = 5*T_d - 3*(total - T_d) = 8*T_d - 3*total, where T_d sums the three
// contiguous ring entries centered at d. Exact for both int and double
// inputs in the ranges this toolkit produces.
template <typename T>
std::array<T, 8> compass_responses(const std::array<T, 8>& ring) {
  T total = 0;
  for (T v : ring) total += v;
  std::array<T, 8> out{};
  for (int d = 0; d < 8; ++d) {
    T t = ring[(d + 7) % 8] + ring[d] + ring[(d + 1) % 8];
    out[d] = 8 * t - 3 * total;
  }
  return out;
}

template <typename T>
GdpCode opposite_pair_code(const std::array<T, 8>& r) {
  int code = 0;
  if (r[0] >= r[4]) code |= 8;  // NW vs SE
  if (r[1] >= r[5]) code |= 4;  // N  vs S
  if (r[2] >= r[6]) code |= 2;  // NE vs SW
  if (r[3] >= r[7]) code |= 1;  // E  vs W
  return static_cast<GdpCode>(code);
}

}  // namespace

KirschResponses kirsch_responses(const Neighborhood& nbhd) {
  return KirschResponses{compass_responses(nbhd.ring)};
}

std::array<double, 8> kirsch_responses(const std::array<double, 8>& ring) {
  return compass_responses(ring);
}

GdpCode gdp_code(const KirschResponses& resp) {
  return opposite_pair_code(resp.r);
}

GdpCode gdp_code(const std::array<double, 8>& responses) {
  return opposite_pair_code(responses);
}

int transition_count(GdpCode code) {
  assert(code < 16);
  return std::popcount(static_cast<unsigned>((code ^ (code >> 1)) & 0b111));
}

bool is_uniform(GdpCode code) { return transition_count(code) <= 1; }

namespace {

constexpr std::array<std::int8_t, 16> make_gdp_bin_table() {
  std::array<std::int8_t, 16> table{};
  std::int8_t next = 0;
  for (int code = 0; code < 16; ++code) {
    int transitions = std::popcount(static_cast<unsigned>((code ^ (code >> 1)) & 0b111));
    table[code] = transitions <= 1 ? next++ : std::int8_t{-1};
  }
  return table;
}

constexpr std::array<std::uint8_t, 256> make_lbp_bin_table() {
  std::array<std::uint8_t, 256> table{};
  std::uint8_t next = 0;
  for (int code = 0; code < 256; ++code) {
    unsigned rotated = ((code >> 1) | (code << 7)) & 0xFF;
    int transitions = std::popcount(static_cast<unsigned>(code) ^ rotated);
    table[code] = transitions <= 2 ? next++ : std::uint8_t{58};
  }
  return table;
}

constexpr auto kGdpBinTable = make_gdp_bin_table();
constexpr auto kLbpBinTable = make_lbp_bin_table();

}  // namespace

std::optional<int> uniform_bin(GdpCode code) {
  assert(code < 16);
  std::int8_t bin = kGdpBinTable[code];
  if (bin < 0) return std::nullopt;
  return bin;
}

int lbp_uniform_bin(LbpCode code) { return kLbpBinTable[code]; }

}  // namespace gdpkit
