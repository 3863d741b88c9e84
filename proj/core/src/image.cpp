#include "ffrfd/image.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <fstream>
#include <iterator>
#include <string_view>

#include "ffrfd/error.hpp"
#include "ffrfd/text.hpp"

namespace ffrfd {

GrayImage::GrayImage(int width, int height, std::uint8_t fill) : width_(width), height_(height) {
  if (width < 1 || height < 1) fail(ErrorKind::data, "image dimensions must be >= 1");
  data_.assign(static_cast<std::size_t>(width) * height, fill);
}

GrayImage::GrayImage(int width, int height, std::vector<std::uint8_t> data)
    : width_(width), height_(height), data_(std::move(data)) {
  if (width < 1 || height < 1) fail(ErrorKind::data, "image dimensions must be >= 1");
  if (data_.size() != static_cast<std::size_t>(width) * height)
    fail(ErrorKind::data, "pixel buffer size does not match width*height");
}

std::uint8_t GrayImage::clamped(int x, int y) const {
  x = std::clamp(x, 0, width_ - 1);
  y = std::clamp(y, 0, height_ - 1);
  return at(x, y);
}

namespace {

class HeaderReader {
 public:
  explicit HeaderReader(std::span<const std::uint8_t> bytes) : bytes_(bytes) {}

  // Skips whitespace and '#' comments, then reads a decimal field.
  bool next_number(long long& out) {
    skip_space_and_comments();
    std::size_t start = pos_;
    while (pos_ < bytes_.size() && std::isdigit(bytes_[pos_])) ++pos_;
    if (pos_ == start || pos_ - start > 9) return false;
    out = 0;
    for (auto i = start; i < pos_; ++i) out = out * 10 + (bytes_[i] - '0');
    return true;
  }

  // Exactly one whitespace byte separates maxval from the raster.
  bool single_space() {
    if (pos_ >= bytes_.size() || !std::isspace(bytes_[pos_])) return false;
    ++pos_;
    return true;
  }

  std::size_t pos() const { return pos_; }

 private:
  void skip_space_and_comments() {
    while (pos_ < bytes_.size()) {
      if (std::isspace(bytes_[pos_])) {
        ++pos_;
      } else if (bytes_[pos_] == '#') {
        while (pos_ < bytes_.size() && bytes_[pos_] != '\n') ++pos_;
      } else {
        break;
      }
    }
  }

  std::span<const std::uint8_t> bytes_;
  std::size_t pos_ = 2;
};

}  // namespace

GrayImage decode_pgm(std::span<const std::uint8_t> bytes) {
  if (bytes.size() < 2 || bytes[0] != 'P') fail(ErrorKind::format, "not a PGM file");
  if (bytes[1] != '5') fail(ErrorKind::format, "unsupported format: P" + std::string(1, char(bytes[1])));

  HeaderReader hdr(bytes);
  long long w = 0, h = 0, maxval = 0;
  if (!hdr.next_number(w) || !hdr.next_number(h) || !hdr.next_number(maxval) || !hdr.single_space())
    fail(ErrorKind::format, "malformed PGM header");
  if (w < 1 || h < 1) fail(ErrorKind::format, "malformed PGM header: zero dimension");
  if (maxval != 255) fail(ErrorKind::format, "unsupported maxval " + std::to_string(maxval) + " (expected 255)");

  const auto n = static_cast<std::size_t>(w * h);
  if (bytes.size() - hdr.pos() < n)
    fail(ErrorKind::format, "truncated PGM payload: expected " + std::to_string(n) + " bytes, got " +
                                std::to_string(bytes.size() - hdr.pos()));
  std::vector<std::uint8_t> data(bytes.begin() + static_cast<std::ptrdiff_t>(hdr.pos()),
                                 bytes.begin() + static_cast<std::ptrdiff_t>(hdr.pos() + n));
  return GrayImage(static_cast<int>(w), static_cast<int>(h), std::move(data));
}

GrayImage load_pgm(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) fail(ErrorKind::io, "cannot open image '" + path + "'");
  std::vector<std::uint8_t> bytes((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  try {
    return decode_pgm(bytes);
  } catch (const Error& e) {
    fail(e.kind(), path + ": " + e.what());
  }
}

std::vector<std::uint8_t> encode_pgm(const GrayImage& img) {
  const std::string header =
      "P5\n" + std::to_string(img.width()) + " " + std::to_string(img.height()) + "\n255\n";
  std::vector<std::uint8_t> out(header.begin(), header.end());
  out.insert(out.end(), img.pixels().begin(), img.pixels().end());
  return out;
}

void save_pgm(const GrayImage& img, const std::string& path) {
  const auto bytes = encode_pgm(img);
  text::write_file(path, std::string_view(reinterpret_cast<const char*>(bytes.data()), bytes.size()));
}

std::vector<double> gaussian_kernel(double sigma, int size) {
  if (size < 1 || size % 2 == 0) fail(ErrorKind::data, "kernel size must be odd and >= 1");
  if (!(sigma > 0.0)) fail(ErrorKind::data, "sigma must be positive");
  const int half = size / 2;
  std::vector<double> k(static_cast<std::size_t>(size));
  double sum = 0.0;
  for (int i = -half; i <= half; ++i) {
    const double w = std::exp(-(i * i) / (2.0 * sigma * sigma));
    k[static_cast<std::size_t>(i + half)] = w;
    sum += w;
  }
  for (auto& w : k) w /= sum;
  return k;
}

GrayImage gaussian_blur(const GrayImage& img, double sigma, int kernel_size) {
  const auto k = gaussian_kernel(sigma, kernel_size);
  const int half = kernel_size / 2;
  const int w = img.width(), h = img.height();

  // Horizontal pass into a double buffer, then vertical pass with final rounding.
  std::vector<double> tmp(static_cast<std::size_t>(w) * h);
  for (int y = 0; y < h; ++y) {
    const auto* src = img.row(y);
    for (int x = 0; x < w; ++x) {
      double acc = 0.0;
      for (int i = -half; i <= half; ++i) acc += k[i + half] * src[std::clamp(x + i, 0, w - 1)];
      tmp[static_cast<std::size_t>(y) * w + x] = acc;
    }
  }

  GrayImage out(w, h);
  std::vector<double> acc(static_cast<std::size_t>(w));
  for (int y = 0; y < h; ++y) {
    std::fill(acc.begin(), acc.end(), 0.0);
    for (int i = -half; i <= half; ++i) {
      const double* src = tmp.data() + static_cast<std::size_t>(std::clamp(y + i, 0, h - 1)) * w;
      const double wi = k[i + half];
      for (int x = 0; x < w; ++x) acc[x] += wi * src[x];
    }
    for (int x = 0; x < w; ++x)
      out.at(x, y) = static_cast<std::uint8_t>(std::clamp(std::lround(acc[x]), 0L, 255L));
  }
  return out;
}

}  // namespace ffrfd
