#include "gdpkit/imagecore.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <stdexcept>
#include <string>

#include "gdpkit/rng.hpp"

namespace gdpkit {

GrayImage::GrayImage(int w, int h, std::vector<std::uint8_t> px)
    : width(w), height(h), pixels(std::move(px)) {
  if (w <= 0 || h <= 0) {
    throw std::invalid_argument("GrayImage: dimensions must be positive");
  }
  if (pixels.size() != static_cast<std::size_t>(w) * h) {
    throw std::invalid_argument("GrayImage: pixel count != width * height");
  }
}

GrayImage GrayImage::filled(int w, int h, std::uint8_t value) {
  if (w <= 0 || h <= 0) {
    throw std::invalid_argument("GrayImage: dimensions must be positive");
  }
  GrayImage img;
  img.width = w;
  img.height = h;
  img.pixels.assign(static_cast<std::size_t>(w) * h, value);
  return img;
}

namespace {

class PgmReader {
 public:
  explicit PgmReader(std::span<const std::uint8_t> bytes) : bytes_(bytes) {}

  // Skips whitespace and '#' comments between header tokens.
  void skip_separators() {
    while (pos_ < bytes_.size()) {
      std::uint8_t c = bytes_[pos_];
      if (c == '#') {
        while (pos_ < bytes_.size() && bytes_[pos_] != '\n') ++pos_;
      } else if (c == ' ' || c == '\t' || c == '\r' || c == '\n' ||
                 c == '\v' || c == '\f') {
        ++pos_;
      } else {
        break;
      }
    }
  }

  long read_number(const char* what) {
    skip_separators();
    if (pos_ >= bytes_.size() || bytes_[pos_] < '0' || bytes_[pos_] > '9') {
      throw std::runtime_error(std::string("PGM: malformed header, expected ") +
                               what);
    }
    long value = 0;
    while (pos_ < bytes_.size() && bytes_[pos_] >= '0' && bytes_[pos_] <= '9') {
      value = value * 10 + (bytes_[pos_] - '0');
      if (value > 1 << 30) {
        throw std::runtime_error(std::string("PGM: ") + what + " out of range");
      }
      ++pos_;
    }
    return value;
  }

  std::size_t pos() const { return pos_; }
  void advance(std::size_t n) { pos_ += n; }

 private:
  std::span<const std::uint8_t> bytes_;
  std::size_t pos_ = 0;
};

}  // namespace

GrayImage load_pgm(std::span<const std::uint8_t> bytes) {
  if (bytes.size() < 2 || bytes[0] != 'P' || bytes[1] != '5') {
    throw std::runtime_error("PGM: malformed magic, expected P5");
  }
  PgmReader reader(bytes.subspan(2));

  long width = reader.read_number("width");
  long height = reader.read_number("height");
  if (width == 0 || height == 0) {
    throw std::runtime_error("PGM: zero image dimensions");
  }
  long maxval = reader.read_number("maxval");
  if (maxval != 255) {
    throw std::runtime_error("PGM: unsupported maxval " +
                             std::to_string(maxval) + ", expected 255");
  }
  // Exactly one whitespace byte separates the header from the payload.
  std::size_t sep = 2 + reader.pos();
  if (sep >= bytes.size() || !(bytes[sep] == ' ' || bytes[sep] == '\t' ||
                               bytes[sep] == '\r' || bytes[sep] == '\n')) {
    throw std::runtime_error("PGM: malformed header, expected whitespace after maxval");
  }
  reader.advance(1);

  std::size_t payload = 2 + reader.pos();
  std::size_t need = static_cast<std::size_t>(width) * height;
  if (bytes.size() < payload + need) {
    throw std::runtime_error("PGM: truncated pixel payload");
  }
  std::vector<std::uint8_t> px(bytes.begin() + payload,
                               bytes.begin() + payload + need);
  return GrayImage(static_cast<int>(width), static_cast<int>(height),
                   std::move(px));
}

std::vector<std::uint8_t> save_pgm(const GrayImage& img) {
  std::string header = "P5\n" + std::to_string(img.width) + " " +
                       std::to_string(img.height) + "\n255\n";
  std::vector<std::uint8_t> out(header.begin(), header.end());
  out.insert(out.end(), img.pixels.begin(), img.pixels.end());
  return out;
}

GrayImage load_pgm_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    throw std::runtime_error("cannot open image file: " + path.string());
  }
  std::vector<std::uint8_t> bytes((std::istreambuf_iterator<char>(in)),
                                  std::istreambuf_iterator<char>());
  try {
    return load_pgm(bytes);
  } catch (const std::runtime_error& e) {
    throw std::runtime_error(path.string() + ": " + e.what());
  }
}

void save_pgm_file(const GrayImage& img, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) {
    throw std::runtime_error("cannot open file for writing: " + path.string());
  }
  auto bytes = save_pgm(img);
  out.write(reinterpret_cast<const char*>(bytes.data()),
            static_cast<std::streamsize>(bytes.size()));
  if (!out) {
    throw std::runtime_error("write failed: " + path.string());
  }
}

namespace {

// Round half away from zero, clamp to the byte range.
std::uint8_t quantize(double normalized) {
  long v = std::lround(normalized * 255.0);
  if (v < 0) v = 0;
  if (v > 255) v = 255;
  return static_cast<std::uint8_t>(v);
}

}  // namespace

GrayImage add_gaussian_noise(const GrayImage& img, const NoiseSpec& spec) {
  if (spec.variance < 0.0) {
    throw std::invalid_argument("NoiseSpec: variance must be >= 0");
  }
  double sigma = std::sqrt(spec.variance);
  GaussianSampler gauss(spec.seed);
  GrayImage out;
  out.width = img.width;
  out.height = img.height;
  out.pixels.resize(img.pixels.size());
  for (std::size_t i = 0; i < img.pixels.size(); ++i) {
    double n = spec.mean + sigma * gauss.next();
    out.pixels[i] = quantize(img.pixels[i] / 255.0 + n);
  }
  return out;
}

namespace {

// One grating image. coord_of(x, y) picks the axis the sinusoid runs along.
template <typename CoordOf>
GrayImage make_grating(const SyntheticSpec& spec, double phase,
                       std::mt19937_64& jitter_rng, CoordOf coord_of) {
  const int size = spec.image_size;
  GrayImage img = GrayImage::filled(size, size, 0);
  const double two_pi = 2.0 * 3.141592653589793238462643383279502884;
  for (int y = 0; y < size; ++y) {
    for (int x = 0; x < size; ++x) {
      double t = coord_of(x, y) + phase;
      double v = 0.5 + 0.25 * std::sin(two_pi * t / spec.grating_period);
      if (spec.jitter_amplitude > 0.0) {
        v += spec.jitter_amplitude * (2.0 * uniform_unit(jitter_rng) - 1.0);
        if (v < 0.0) v = 0.0;
        if (v > 1.0) v = 1.0;
      }
      img.at(x, y) = quantize(v);
    }
  }
  return img;
}

}  // namespace

SyntheticCorpus make_synthetic_textures(const SyntheticSpec& spec) {
  if (spec.images_per_class <= 0) {
    throw std::invalid_argument("SyntheticSpec: images_per_class must be > 0");
  }
  if (spec.image_size <= 0) {
    throw std::invalid_argument("SyntheticSpec: image_size must be > 0");
  }
  if (spec.grating_period < 2 || spec.grating_period > spec.image_size / 2) {
    throw std::invalid_argument(
        "SyntheticSpec: grating_period must be in [2, image_size/2]");
  }
  if (spec.jitter_amplitude < 0.0 || spec.jitter_amplitude > 0.5) {
    throw std::invalid_argument(
        "SyntheticSpec: jitter_amplitude must be in [0, 0.5]");
  }

  // One sequential stream: per image, first the phase draw, then (when
  // jitter is enabled) one draw per pixel in row-major order.
  std::mt19937_64 rng(spec.seed);
  SyntheticCorpus corpus;
  for (int i = 0; i < spec.images_per_class; ++i) {
    double phase = uniform_unit(rng) * spec.grating_period;
    corpus.horizontal.push_back(
        make_grating(spec, phase, rng, [](int, int y) { return double(y); }));
  }
  for (int i = 0; i < spec.images_per_class; ++i) {
    double phase = uniform_unit(rng) * spec.grating_period;
    corpus.vertical.push_back(
        make_grating(spec, phase, rng, [](int x, int) { return double(x); }));
  }
  return corpus;
}

}  // namespace gdpkit
