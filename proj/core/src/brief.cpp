#include <algorithm>
#include <cmath>
#include <string>

#include "ffrfd/error.hpp"
#include "ffrfd/features.hpp"
#include "ffrfd/rng.hpp"
#include "pair_tests.hpp"

namespace ffrfd {

SamplingPattern::SamplingPattern(std::vector<PointPair> pairs, int patch_size, std::uint64_t seed)
    : pairs_(std::move(pairs)), patch_size_(patch_size), seed_(seed) {
  if (patch_size < 1 || patch_size % 2 == 0) fail(ErrorKind::data, "patch size must be odd and >= 1");
  const int half = (patch_size - 1) / 2;
  auto inside = [half](Offset o) { return std::abs(o.dx) <= half && std::abs(o.dy) <= half; };
  for (const auto& p : pairs_)
    if (!inside(p.first) || !inside(p.second)) fail(ErrorKind::data, "pattern offset outside the patch");
}

SamplingPattern SamplingPattern::generate(std::uint64_t seed, int n_pairs, int patch_size) {
  if (n_pairs < 1 || n_pairs % 8 != 0) fail(ErrorKind::data, "pair count must be a positive multiple of 8");
  if (patch_size < 3 || patch_size % 2 == 0) fail(ErrorKind::data, "patch size must be odd and >= 3");
  Rng rng(seed);
  const int half = (patch_size - 1) / 2;
  const double sd = patch_size / 5.0;
  auto draw = [&] {
    return std::clamp(static_cast<int>(std::lround(rng.normal() * sd)), -half, half);
  };
  std::vector<PointPair> pairs;
  pairs.reserve(static_cast<std::size_t>(n_pairs));
  while (static_cast<int>(pairs.size()) < n_pairs) {
    PointPair p;
    p.first = {draw(), draw()};
    p.second = {draw(), draw()};
    if (p.first != p.second) pairs.push_back(p);
  }
  return SamplingPattern(std::move(pairs), patch_size, seed);
}

BinaryDescriptor brief_describe(const GrayImage& smoothed, const Keypoint& kp, const SamplingPattern& pattern) {
  const int m = pattern.margin();
  if (kp.x < m || kp.y < m || kp.x > smoothed.width() - 1 - m || kp.y > smoothed.height() - 1 - m)
    fail(ErrorKind::data, "keypoint (" + std::to_string(kp.x) + ", " + std::to_string(kp.y) +
                              ") too close to the border for BRIEF");
  return detail::compare_pairs(smoothed, kp.x, kp.y, pattern.pairs());
}

}  // namespace ffrfd
