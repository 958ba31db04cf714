#include "gdpkit/features.hpp"

#include <stdexcept>

namespace gdpkit {

int bins(DescriptorKind kind) {
  switch (kind) {
    case DescriptorKind::gdp: return kGdpUniformBins;
    case DescriptorKind::lbp: return 256;
    case DescriptorKind::lbp_u: return kLbpUniformBins;
  }
  throw std::invalid_argument("unknown descriptor kind");
}

std::string_view kind_name(DescriptorKind kind) {
  switch (kind) {
    case DescriptorKind::gdp: return "GDP";
    case DescriptorKind::lbp: return "LBP";
    case DescriptorKind::lbp_u: return "LBP_U";
  }
  throw std::invalid_argument("unknown descriptor kind");
}

std::string_view kind_id(DescriptorKind kind) {
  switch (kind) {
    case DescriptorKind::gdp: return "gdp";
    case DescriptorKind::lbp: return "lbp";
    case DescriptorKind::lbp_u: return "lbp_u";
  }
  throw std::invalid_argument("unknown descriptor kind");
}

std::optional<DescriptorKind> parse_kind(std::string_view id) {
  if (id == "gdp" || id == "GDP") return DescriptorKind::gdp;
  if (id == "lbp" || id == "LBP") return DescriptorKind::lbp;
  if (id == "lbp_u" || id == "LBP_U" || id == "lbp-u") return DescriptorKind::lbp_u;
  return std::nullopt;
}

BlockGrid block_grid(int width, int height, int n) {
  if (n < 1) {
    throw std::invalid_argument("block_grid: n must be >= 1");
  }
  if (width < n || height < n) {
    throw std::invalid_argument("block_grid: image smaller than the grid");
  }
  BlockGrid grid;
  grid.n = n;
  grid.row_bounds.resize(n + 1);
  grid.col_bounds.resize(n + 1);
  for (int i = 0; i <= n; ++i) {
    grid.row_bounds[i] = static_cast<int>(static_cast<long>(i) * height / n);
    grid.col_bounds[i] = static_cast<int>(static_cast<long>(i) * width / n);
  }
  return grid;
}

Neighborhood neighborhood_at(const GrayImage& img, int x, int y) {
  Neighborhood nbhd;
  nbhd.center = img.at(x, y);
  nbhd.ring = {img.at(x - 1, y - 1), img.at(x, y - 1), img.at(x + 1, y - 1),
               img.at(x + 1, y),     img.at(x + 1, y + 1), img.at(x, y + 1),
               img.at(x - 1, y + 1), img.at(x - 1, y)};
  return nbhd;
}

CodeMap extract_codes(const GrayImage& img, DescriptorKind kind) {
  if (img.width < 3 || img.height < 3) {
    throw std::invalid_argument("extract_codes: image must be at least 3x3");
  }
  CodeMap map;
  map.width = img.width;
  map.height = img.height;
  map.codes.resize(static_cast<std::size_t>(img.width - 2) * (img.height - 2));
  std::size_t idx = 0;
  for (int y = 1; y < img.height - 1; ++y) {
    for (int x = 1; x < img.width - 1; ++x) {
      Neighborhood nbhd = neighborhood_at(img, x, y);
      std::uint16_t code = kind == DescriptorKind::gdp
                               ? gdp_code(kirsch_responses(nbhd))
                               : lbp_code(nbhd);
      map.codes[idx++] = code;
    }
  }
  return map;
}

FeatureVector feature_vector(const GrayImage& img, DescriptorKind kind, int n) {
  BlockGrid grid = block_grid(img.width, img.height, n);
  CodeMap map = extract_codes(img, kind);
  const int nbins = bins(kind);

  // Coordinate -> block index lookups, from the grid bounds.
  std::vector<int> row_block(img.height), col_block(img.width);
  for (int b = 0; b < n; ++b) {
    for (int y = grid.row_bounds[b]; y < grid.row_bounds[b + 1]; ++y) row_block[y] = b;
    for (int x = grid.col_bounds[b]; x < grid.col_bounds[b + 1]; ++x) col_block[x] = b;
  }

  std::vector<long> counts(static_cast<std::size_t>(n) * n * nbins, 0);
  std::vector<long> totals(static_cast<std::size_t>(n) * n, 0);
  for (int y = 1; y < img.height - 1; ++y) {
    for (int x = 1; x < img.width - 1; ++x) {
      std::uint16_t code = map.code_at(x, y);
      int bin;
      if (kind == DescriptorKind::gdp) {
        auto ub = uniform_bin(static_cast<GdpCode>(code));
        if (!ub) continue;  // non-uniform codes are discarded
        bin = *ub;
      } else if (kind == DescriptorKind::lbp_u) {
        bin = lbp_uniform_bin(static_cast<LbpCode>(code));
      } else {
        bin = code;
      }
      std::size_t block = static_cast<std::size_t>(row_block[y]) * n + col_block[x];
      ++counts[block * nbins + bin];
      ++totals[block];
    }
  }

  FeatureVector fv;
  fv.kind = kind;
  fv.n = n;
  fv.values.resize(counts.size());
  for (std::size_t block = 0; block < totals.size(); ++block) {
    if (totals[block] == 0) continue;
    for (int b = 0; b < nbins; ++b) {
      fv.values[block * nbins + b] =
          static_cast<double>(counts[block * nbins + b]) /
          static_cast<double>(totals[block]);
    }
  }
  return fv;
}

}  // namespace gdpkit
