#include <algorithm>
#include <string>

#include "ffrfd/error.hpp"
#include "ffrfd/features.hpp"

namespace ffrfd {

namespace {

void check_params(int threshold, int arc_length) {
  if (threshold < 1 || threshold > 254) fail(ErrorKind::data, "FAST threshold must be in [1, 254]");
  if (arc_length < 9 || arc_length > 16) fail(ErrorKind::data, "FAST arc length must be in [9, 16]");
}

struct CircleOffsets {
  std::array<std::ptrdiff_t, 16> at{};
  explicit CircleOffsets(int stride) {
    for (std::size_t i = 0; i < 16; ++i) at[i] = kFastCircle[i].dy * stride + kFastCircle[i].dx;
  }
};

// True if `mask` (16 circle bits) contains a circular run of at least n set bits.
inline bool has_run(unsigned mask, int n) {
  const unsigned doubled = mask | (mask << 16);
  unsigned run = doubled;
  for (int k = 1; k < n; ++k) run &= doubled >> k;
  return run != 0;
}

inline bool segment_test_at(const std::uint8_t* p, const CircleOffsets& c, int t, int n) {
  const int center = *p;
  const int hi = center + t;
  const int lo = center - t;

  // Any run of n contiguous pixels covers at least n/4 of the compass points 0, 4, 8, 12.
  const int need = n / 4;
  int brighter = 0, darker = 0;
  for (int i : {0, 8, 4, 12}) {
    const int v = p[c.at[static_cast<std::size_t>(i)]];
    brighter += v > hi;
    darker += v < lo;
  }
  if (brighter < need && darker < need) return false;

  unsigned bmask = 0, dmask = 0;
  for (unsigned i = 0; i < 16; ++i) {
    const int v = p[c.at[i]];
    bmask |= unsigned(v > hi) << i;
    dmask |= unsigned(v < lo) << i;
  }
  return has_run(bmask, n) || has_run(dmask, n);
}

int score_at(const std::uint8_t* p, const CircleOffsets& c, int threshold, int n) {
  int lo = threshold, hi = 254;
  while (lo < hi) {
    const int mid = (lo + hi + 1) / 2;
    if (segment_test_at(p, c, mid, n))
      lo = mid;
    else
      hi = mid - 1;
  }
  return lo;
}

void check_inside(const GrayImage& img, int x, int y) {
  if (x < kFastRadius || y < kFastRadius || x >= img.width() - kFastRadius || y >= img.height() - kFastRadius)
    fail(ErrorKind::data, "segment test needs a 3 pixel margin around (" + std::to_string(x) + ", " +
                              std::to_string(y) + ")");
}

}  // namespace

bool segment_test(const GrayImage& img, int x, int y, int threshold, int arc_length) {
  check_params(threshold, arc_length);
  check_inside(img, x, y);
  const CircleOffsets c(img.width());
  return segment_test_at(&img.row(y)[x], c, threshold, arc_length);
}

int fast_score(const GrayImage& img, int x, int y, int threshold, int arc_length) {
  check_params(threshold, arc_length);
  check_inside(img, x, y);
  const CircleOffsets c(img.width());
  return score_at(&img.row(y)[x], c, threshold, arc_length);
}

std::vector<Keypoint> fast_detect(const GrayImage& img, int threshold, bool use_nms, int arc_length) {
  check_params(threshold, arc_length);
  const int w = img.width(), h = img.height();
  if (w < 2 * kFastRadius + 1 || h < 2 * kFastRadius + 1) fail(ErrorKind::data, "image too small for FAST (min 7x7)");

  const CircleOffsets c(w);
  std::vector<Keypoint> corners;
  // Score map for NMS; 0 marks "not a corner" since scores are >= threshold >= 1.
  std::vector<int> scores;
  if (use_nms) scores.assign(static_cast<std::size_t>(w) * h, 0);

  for (int y = kFastRadius; y < h - kFastRadius; ++y) {
    const std::uint8_t* row = img.row(y);
    for (int x = kFastRadius; x < w - kFastRadius; ++x) {
      const std::uint8_t* p = row + x;
      if (!segment_test_at(p, c, threshold, arc_length)) continue;
      const int s = score_at(p, c, threshold, arc_length);
      corners.push_back(Keypoint{x, y, static_cast<double>(s), 0.0});
      if (use_nms) scores[static_cast<std::size_t>(y) * w + x] = s;
    }
  }
  if (!use_nms) return corners;

  std::vector<Keypoint> kept;
  kept.reserve(corners.size());
  for (const auto& kp : corners) {
    const int s = static_cast<int>(kp.score);
    bool keep = true;
    for (int dy = -1; dy <= 1 && keep; ++dy) {
      for (int dx = -1; dx <= 1; ++dx) {
        if (dx == 0 && dy == 0) continue;
        const int q = scores[static_cast<std::size_t>(kp.y + dy) * w + kp.x + dx];
        // Neighbours in scan order before p are lexicographically smaller.
        const bool neighbour_first = dy < 0 || (dy == 0 && dx < 0);
        if (q > s || (q == s && neighbour_first)) {
          keep = false;
          break;
        }
      }
    }
    if (keep) kept.push_back(kp);
  }
  return kept;
}

}  // namespace ffrfd
