#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>
#include <tuple>

#include "ffrfd/error.hpp"
#include "ffrfd/features.hpp"
#include "pair_tests.hpp"

namespace ffrfd {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

int harris_margin(int block) { return block / 2 + 1; }

bool within(const GrayImage& img, int x, int y, int margin) {
  return x >= margin && y >= margin && x <= img.width() - 1 - margin && y <= img.height() - 1 - margin;
}

}  // namespace

double harris_response(const GrayImage& img, int x, int y, int block) {
  if (block < 1 || block % 2 == 0) fail(ErrorKind::data, "Harris block size must be odd");
  const int half = block / 2;
  if (!within(img, x, y, harris_margin(block)))
    fail(ErrorKind::data, "Harris window at (" + std::to_string(x) + ", " + std::to_string(y) + ") leaves the image");

  const std::ptrdiff_t stride = img.width();
  std::int64_t sxx = 0, syy = 0, sxy = 0;
  for (int v = -half; v <= half; ++v) {
    const std::uint8_t* p = img.row(y + v) + x;
    for (int u = -half; u <= half; ++u) {
      const std::int64_t ix = int(p[u + 1]) - int(p[u - 1]);
      const std::int64_t iy = int(p[u + stride]) - int(p[u - stride]);
      sxx += ix * ix;
      syy += iy * iy;
      sxy += ix * iy;
    }
  }
  const double a = static_cast<double>(sxx), b = static_cast<double>(syy), c = static_cast<double>(sxy);
  const double trace = a + b;
  return (a * b - c * c) - kHarrisK * trace * trace;
}

double intensity_centroid_orientation(const GrayImage& img, const Keypoint& kp, int radius) {
  if (radius < 1) fail(ErrorKind::data, "centroid radius must be >= 1");
  if (!within(img, kp.x, kp.y, radius))
    fail(ErrorKind::data, "centroid disc at (" + std::to_string(kp.x) + ", " + std::to_string(kp.y) +
                              ") leaves the image");
  std::int64_t m10 = 0, m01 = 0;
  const int r2 = radius * radius;
  for (int dy = -radius; dy <= radius; ++dy) {
    const std::uint8_t* row = img.row(kp.y + dy) + kp.x;
    std::int64_t row_sum = 0;
    for (int dx = -radius; dx <= radius; ++dx) {
      if (dx * dx + dy * dy > r2) continue;
      const int v = row[dx];
      m10 += std::int64_t(dx) * v;
      row_sum += v;
    }
    m01 += std::int64_t(dy) * row_sum;
  }
  if (m10 == 0 && m01 == 0) return 0.0;
  double theta = std::atan2(static_cast<double>(m01), static_cast<double>(m10));
  if (theta < 0.0) theta += kTwoPi;
  if (theta >= kTwoPi) theta = 0.0;
  return theta;
}

int orientation_bin(double theta, int bins) {
  const long b = std::lround(theta / (kTwoPi / bins));
  return static_cast<int>(((b % bins) + bins) % bins);
}

SteeredPattern::SteeredPattern(const SamplingPattern& base, int bins) : base_(base), bins_(bins) {
  if (bins < 1) fail(ErrorKind::data, "orientation bin count must be >= 1");
  rotated_.resize(static_cast<std::size_t>(bins));
  int extent = 0;
  auto rotate = [&](Offset o, double c, double s) {
    Offset r{static_cast<int>(std::lround(c * o.dx - s * o.dy)), static_cast<int>(std::lround(s * o.dx + c * o.dy))};
    extent = std::max({extent, std::abs(r.dx), std::abs(r.dy)});
    return r;
  };
  for (int b = 0; b < bins; ++b) {
    const double angle = b * kTwoPi / bins;
    const double c = std::cos(angle), s = std::sin(angle);
    auto& out = rotated_[static_cast<std::size_t>(b)];
    out.reserve(base.n_pairs());
    for (const auto& p : base.pairs()) out.push_back({rotate(p.first, c, s), rotate(p.second, c, s)});
  }
  margin_ = extent + 1;
}

BinaryDescriptor steered_brief_describe(const GrayImage& smoothed, const Keypoint& kp, const SteeredPattern& pattern,
                                        int bin) {
  if (bin < 0 || bin >= pattern.bins()) fail(ErrorKind::data, "orientation bin out of range");
  if (!within(smoothed, kp.x, kp.y, pattern.margin()))
    fail(ErrorKind::data, "keypoint (" + std::to_string(kp.x) + ", " + std::to_string(kp.y) +
                              ") too close to the border for steered BRIEF");
  return detail::compare_pairs(smoothed, kp.x, kp.y, pattern.rotated(bin));
}

Extraction fast_brief_detect_describe(const GrayImage& img, const FastBriefParams& params,
                                      const SamplingPattern& pattern) {
  Extraction out;
  const auto corners = fast_detect(img, params.threshold, true, params.arc_length);
  const int m = pattern.margin();
  std::vector<Keypoint> usable;
  usable.reserve(corners.size());
  for (const auto& kp : corners) {
    if (within(img, kp.x, kp.y, m))
      usable.push_back(kp);
    else
      ++out.dropped;
  }
  if (usable.empty()) return out;

  const auto smoothed = gaussian_blur(img, params.blur_sigma, params.blur_kernel);
  out.features.reserve(usable.size());
  for (const auto& kp : usable) out.features.push_back({kp, brief_describe(smoothed, kp, pattern)});
  return out;
}

Extraction orb_detect_describe(const GrayImage& img, const OrbParams& params, const SteeredPattern& pattern) {
  if (params.n_top < 1) fail(ErrorKind::data, "ORB n_top must be >= 1");
  Extraction out;
  const auto corners = fast_detect(img, params.threshold, true, params.arc_length);
  const int m = std::max({pattern.margin(), params.centroid_radius + 1, harris_margin(params.harris_block) + 1});

  struct Ranked {
    Keypoint kp;
    double harris;
  };
  std::vector<Ranked> ranked;
  ranked.reserve(corners.size());
  for (const auto& kp : corners) {
    if (within(img, kp.x, kp.y, m))
      ranked.push_back({kp, harris_response(img, kp.x, kp.y, params.harris_block)});
    else
      ++out.dropped;
  }

  // Corners arrive in row-major order, so a stable sort keeps (y, x) order among ties.
  std::stable_sort(ranked.begin(), ranked.end(), [](const Ranked& a, const Ranked& b) { return a.harris > b.harris; });
  if (ranked.size() > static_cast<std::size_t>(params.n_top)) ranked.resize(static_cast<std::size_t>(params.n_top));
  std::sort(ranked.begin(), ranked.end(),
            [](const Ranked& a, const Ranked& b) { return std::tie(a.kp.y, a.kp.x) < std::tie(b.kp.y, b.kp.x); });
  if (ranked.empty()) return out;

  const auto smoothed = gaussian_blur(img, params.blur_sigma, params.blur_kernel);
  out.features.reserve(ranked.size());
  for (auto& r : ranked) {
    Keypoint kp = r.kp;
    kp.orientation = intensity_centroid_orientation(img, kp, params.centroid_radius);
    const int bin = orientation_bin(kp.orientation, pattern.bins());
    out.features.push_back({kp, steered_brief_describe(smoothed, kp, pattern, bin)});
  }
  return out;
}

}  // namespace ffrfd
