#pragma once

#include <array>
#include <cstdint>
#include <optional>

// Pixel-level descriptor kernels. All of them consume a 3x3 neighborhood
// flattened onto a ring in clockwise order starting at the top-left:
//
//   ring[0]=NW  ring[1]=N  ring[2]=NE
//   ring[7]=W    center    ring[3]=E
//   ring[6]=SW  ring[5]=S  ring[4]=SE
//
// The kernels are pure and never look at anything but their arguments.

namespace gdpkit {

enum class Direction : int { nw = 0, n, ne, e, se, s, sw, w };

struct Neighborhood {
  int center = 0;
  std::array<int, 8> ring{};  // clockwise from NW, see diagram above
};

using LbpCode = std::uint8_t;  // [0, 255]
using GdpCode = std::uint8_t;  // [0, 15]

// Signed compass edge responses, one per ring direction. Each response is
// 5x the three contiguous ring values centered at that direction minus 3x
// the remaining five; the center coefficient is 0, so constant regions give
// all zeros.
struct KirschResponses {
  std::array<int, 8> r{};

  int operator[](Direction d) const { return r[static_cast<int>(d)]; }
};

// 8-bit code, bit 2^(7-k) set iff ring[k] >= center. NW carries the MSB.
LbpCode lbp_code(const Neighborhood& nbhd);

KirschResponses kirsch_responses(const Neighborhood& nbhd);

// Real-valued variant for unclamped arithmetic; same geometry.
std::array<double, 8> kirsch_responses(const std::array<double, 8>& ring);

// 4-bit code from the four opposite-direction response comparisons,
// MSB to LSB: NW>=SE, N>=S, NE>=SW, E>=W. Ties count as 1.
GdpCode gdp_code(const KirschResponses& resp);
GdpCode gdp_code(const std::array<double, 8>& responses);

// Adjacent bit changes reading the 4 bits left to right (non-circular).
int transition_count(GdpCode code);

// At most one transition; exactly 8 of the 16 codes qualify.
bool is_uniform(GdpCode code);

inline constexpr int kGdpUniformBins = 8;
inline constexpr int kLbpUniformBins = 59;

// Uniform codes map to 0..7 in ascending code order; others are discarded.
std::optional<int> uniform_bin(GdpCode code);

// 59-bin uniform LBP map: the 58 codes with at most two circular
// transitions go to 0..57 in ascending order, everything else to 58.
int lbp_uniform_bin(LbpCode code);

}  // namespace gdpkit
