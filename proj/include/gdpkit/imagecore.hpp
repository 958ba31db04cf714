#pragma once

#include <cstdint>
#include <filesystem>
#include <span>
#include <vector>

namespace gdpkit {

// 8-bit single-channel raster, row-major.
struct GrayImage {
  int width = 0;
  int height = 0;
  std::vector<std::uint8_t> pixels;  // size == width * height

  GrayImage() = default;
  GrayImage(int w, int h, std::vector<std::uint8_t> px);
  static GrayImage filled(int w, int h, std::uint8_t value);

  std::uint8_t at(int x, int y) const {
    return pixels[static_cast<std::size_t>(y) * width + x];
  }
  std::uint8_t& at(int x, int y) {
    return pixels[static_cast<std::size_t>(y) * width + x];
  }

  bool operator==(const GrayImage&) const = default;
};

// Binary PGM (P5), maxval 255 only. '#' comments allowed in the header.
GrayImage load_pgm(std::span<const std::uint8_t> bytes);
std::vector<std::uint8_t> save_pgm(const GrayImage& img);
GrayImage load_pgm_file(const std::filesystem::path& path);
void save_pgm_file(const GrayImage& img, const std::filesystem::path& path);

// Additive Gaussian noise on the [0,1] intensity scale; variance is in
// normalized units squared (so 0.001 means sigma ~= 8 gray levels).
struct NoiseSpec {
  double mean = 0.0;
  double variance = 0.0;
  std::uint64_t seed = 0;
};

// out = clamp(round((p/255 + n) * 255), 0, 255), n ~ N(mean, variance),
// pixels visited row-major. Pure function of (img, spec).
GrayImage add_gaussian_noise(const GrayImage& img, const NoiseSpec& spec);

// Sinusoidal grating corpus: class A images vary along y only (each row
// constant), class B along x only. Plays the role of a labeled face set
// for desk-scale runs.
struct SyntheticSpec {
  int images_per_class = 0;
  int image_size = 0;      // square images
  int grating_period = 0;  // pixels; 2 <= period <= image_size / 2
  double jitter_amplitude = 0.0;  // [0, 0.5], normalized intensity
  std::uint64_t seed = 0;
};

struct SyntheticCorpus {
  std::vector<GrayImage> horizontal;  // class A
  std::vector<GrayImage> vertical;    // class B
};

SyntheticCorpus make_synthetic_textures(const SyntheticSpec& spec);

}  // namespace gdpkit
