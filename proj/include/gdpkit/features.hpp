#pragma once

#include <cstdint>
#include <optional>
#include <string_view>
#include <vector>

#include "gdpkit/descriptors.hpp"
#include "gdpkit/imagecore.hpp"

namespace gdpkit {

enum class DescriptorKind { gdp, lbp, lbp_u };

int bins(DescriptorKind kind);                        // 8 / 256 / 59
std::string_view kind_name(DescriptorKind kind);      // "GDP", "LBP", "LBP_U"
std::string_view kind_id(DescriptorKind kind);        // "gdp", "lbp", "lbp_u"
std::optional<DescriptorKind> parse_kind(std::string_view id);

// Near-equal N x N partition; bound i = floor(i * dim / n), so block sizes
// along an axis differ by at most one pixel.
struct BlockGrid {
  int n = 0;
  std::vector<int> row_bounds;  // n + 1 offsets, 0 .. height
  std::vector<int> col_bounds;  // n + 1 offsets, 0 .. width
};

BlockGrid block_grid(int width, int height, int n);

// Raw per-pixel codes over the image interior (coordinates 1..dim-2).
// GDP stores 4-bit codes, LBP and LBP_U the raw 8-bit LBP code; the
// kind-specific binning happens at histogram time.
struct CodeMap {
  int width = 0;   // source image width
  int height = 0;  // source image height
  std::vector<std::uint16_t> codes;  // (width-2) * (height-2), row-major

  std::uint16_t code_at(int x, int y) const {
    return codes[static_cast<std::size_t>(y - 1) * (width - 2) + (x - 1)];
  }
};

Neighborhood neighborhood_at(const GrayImage& img, int x, int y);

CodeMap extract_codes(const GrayImage& img, DescriptorKind kind);

// Concatenated per-block histograms, row-major block order. Each block's
// slice is L1-normalized by its own counted total; a block with no counted
// codes stays all-zero.
struct FeatureVector {
  DescriptorKind kind = DescriptorKind::gdp;
  int n = 0;
  std::vector<double> values;  // n * n * bins(kind)
};

FeatureVector feature_vector(const GrayImage& img, DescriptorKind kind, int n);

}  // namespace gdpkit
