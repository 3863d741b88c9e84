#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

namespace ffrfd {

/// 8-bit single-channel raster, row-major. Immutable once built apart from explicit
/// pixel writes by its owner.
class GrayImage {
 public:
  GrayImage() = default;
  /// Zero-filled image. Throws Error(data) unless width, height >= 1.
  GrayImage(int width, int height, std::uint8_t fill = 0);
  /// Throws Error(data) unless data.size() == width * height.
  GrayImage(int width, int height, std::vector<std::uint8_t> data);

  int width() const { return width_; }
  int height() const { return height_; }
  bool empty() const { return data_.empty(); }

  std::uint8_t at(int x, int y) const { return data_[static_cast<std::size_t>(y) * width_ + x]; }
  std::uint8_t& at(int x, int y) { return data_[static_cast<std::size_t>(y) * width_ + x]; }

  /// Row-clamped access for border handling.
  std::uint8_t clamped(int x, int y) const;

  const std::uint8_t* row(int y) const { return data_.data() + static_cast<std::size_t>(y) * width_; }
  std::span<const std::uint8_t> pixels() const { return data_; }
  std::span<std::uint8_t> pixels() { return data_; }

  bool operator==(const GrayImage&) const = default;

 private:
  int width_ = 0;
  int height_ = 0;
  std::vector<std::uint8_t> data_;
};

/// Reads a binary PGM (P5, maxval 255). Distinct errors for a missing file (io),
/// non-P5 magic ("unsupported format"), malformed header, maxval != 255 and a
/// truncated payload (all format).
GrayImage load_pgm(const std::string& path);
GrayImage decode_pgm(std::span<const std::uint8_t> bytes);

void save_pgm(const GrayImage& img, const std::string& path);
std::vector<std::uint8_t> encode_pgm(const GrayImage& img);

/// Normalized 1-D Gaussian weights of odd length `size`, centered.
std::vector<double> gaussian_kernel(double sigma, int size);

/// Separable Gaussian blur with edge-clamp borders. Both passes run in double;
/// the result is rounded to nearest and clamped to [0, 255].
/// Throws Error(data) for an even or non-positive kernel size or sigma <= 0.
GrayImage gaussian_blur(const GrayImage& img, double sigma, int kernel_size);

}  // namespace ffrfd
