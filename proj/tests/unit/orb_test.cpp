#include <gtest/gtest.h>

#include <numbers>

#include "ffrfd/features.hpp"
#include "helpers.hpp"
#include "oracles.hpp"

namespace {

using ffrfd::GrayImage;
using ffrfd::Keypoint;

constexpr double kTwoPi = 2.0 * std::numbers::pi;

GrayImage quadrant(int size, int cx, int cy, std::uint8_t lo, std::uint8_t hi) {
  GrayImage img(size, size, lo);
  for (int y = cy; y < size; ++y)
    for (int x = cx; x < size; ++x) img.at(x, y) = hi;
  return img;
}

/// Rotates about the image centre so a direction (dx, dy) becomes (-dy, dx).
GrayImage rotate90(const GrayImage& in) {
  const int n = in.width();
  GrayImage out(n, n);
  for (int y = 0; y < n; ++y)
    for (int x = 0; x < n; ++x) out.at(x, y) = in.at(y, n - 1 - x);
  return out;
}

double angle_distance(double a, double b) {
  const double d = std::fmod(std::abs(a - b), kTwoPi);
  return std::min(d, kTwoPi - d);
}

TEST(Harris, ConstantImageIsZero) { EXPECT_EQ(ffrfd::harris_response(GrayImage(20, 20, 50), 10, 10), 0.0); }

TEST(Harris, CornerBeatsEdge) {
  const auto corner = quadrant(21, 10, 10, 0, 100);
  GrayImage edge(21, 21, 0);
  for (int y = 0; y < 21; ++y)
    for (int x = 10; x < 21; ++x) edge.at(x, y) = 100;
  EXPECT_GT(ffrfd::harris_response(corner, 10, 10), ffrfd::harris_response(edge, 10, 10));
  EXPECT_LT(ffrfd::harris_response(edge, 10, 10), 0.0);
}

TEST(Harris, MatchesDenseStructureTensor) {
  ffrfd::Rng rng(31);
  for (int i = 0; i < 20; ++i) {
    const auto img = oracle::random_image(rng, 24, 24);
    const int x = 4 + static_cast<int>(rng.below(16)), y = 4 + static_cast<int>(rng.below(16));
    EXPECT_EQ(ffrfd::harris_response(img, x, y), oracle::harris(img, x, y));
  }
}

TEST(Harris, WindowOutsideImageRejected) {
  using testing_support::kind_of;
  EXPECT_EQ(kind_of([] { ffrfd::harris_response(GrayImage(20, 20), 3, 10); }), ffrfd::ErrorKind::data);
  EXPECT_EQ(kind_of([] { ffrfd::harris_response(GrayImage(20, 20), 10, 10, 6); }), ffrfd::ErrorKind::data);
}

TEST(Centroid, SymmetricPatchGivesZero) {
  GrayImage img(41, 41);
  for (int y = 0; y < 41; ++y)
    for (int x = 0; x < 41; ++x) img.at(x, y) = static_cast<std::uint8_t>(std::min(255, (x - 20) * (x - 20) + (y - 20) * (y - 20)));
  EXPECT_EQ(ffrfd::intensity_centroid_orientation(img, Keypoint{20, 20}), 0.0);
}

TEST(Centroid, BrightRightSideGivesZero) {
  GrayImage img(41, 41, 10);
  for (int y = 0; y < 41; ++y)
    for (int x = 21; x < 41; ++x) img.at(x, y) = 200;
  EXPECT_EQ(ffrfd::intensity_centroid_orientation(img, Keypoint{20, 20}), 0.0);
}

TEST(Centroid, MatchesMomentOracle) {
  ffrfd::Rng rng(32);
  for (int i = 0; i < 50; ++i) {
    const auto img = oracle::random_image(rng, 40, 40);
    const int x = 15 + static_cast<int>(rng.below(10)), y = 15 + static_cast<int>(rng.below(10));
    const auto [m10, m01] = oracle::moments(img, x, y, 15);
    double ref = std::atan2(m01, m10);
    if (ref < 0) ref += kTwoPi;
    const double theta = ffrfd::intensity_centroid_orientation(img, Keypoint{x, y});
    EXPECT_GE(theta, 0.0);
    EXPECT_LT(theta, kTwoPi);
    EXPECT_DOUBLE_EQ(theta, ref);
  }
}

TEST(Centroid, DiscOutsideImageRejected) {
  using testing_support::kind_of;
  EXPECT_EQ(kind_of([] { ffrfd::intensity_centroid_orientation(GrayImage(40, 40), Keypoint{14, 20}); }),
            ffrfd::ErrorKind::data);
}

TEST(OrientationBin, RoundsToNearestSector) {
  const double w = kTwoPi / 30;
  EXPECT_EQ(ffrfd::orientation_bin(0.0), 0);
  EXPECT_EQ(ffrfd::orientation_bin(0.49 * w), 0);
  EXPECT_EQ(ffrfd::orientation_bin(0.51 * w), 1);
  EXPECT_EQ(ffrfd::orientation_bin(kTwoPi - 0.2 * w), 0);
  EXPECT_EQ(ffrfd::orientation_bin(15 * w), 15);
}

TEST(SteeredPattern, BinZeroIsBasePatternAndMarginCoversRotations) {
  const auto base = ffrfd::SamplingPattern::generate();
  const ffrfd::SteeredPattern steered(base);
  ASSERT_EQ(steered.rotated(0).size(), base.n_pairs());
  for (std::size_t j = 0; j < base.n_pairs(); ++j) EXPECT_EQ(steered.rotated(0)[j], base.pairs()[j]);
  int extent = 0;
  for (int b = 0; b < steered.bins(); ++b)
    for (const auto& p : steered.rotated(b))
      extent = std::max({extent, std::abs(p.first.dx), std::abs(p.first.dy), std::abs(p.second.dx),
                         std::abs(p.second.dy)});
  EXPECT_EQ(steered.margin(), extent + 1);
}

TEST(SteeredBrief, MatchesDirectComparisonOnRotatedPairs) {
  ffrfd::Rng rng(33);
  const ffrfd::SteeredPattern steered(ffrfd::SamplingPattern::generate());
  for (int i = 0; i < 60; ++i) {
    const auto img = ffrfd::gaussian_blur(oracle::random_image(rng, 64, 64), 2.0, 9);
    const int bin = static_cast<int>(rng.below(30));
    const Keypoint kp{steered.margin() + static_cast<int>(rng.below(8)), 32};
    const std::vector<ffrfd::PointPair> pairs(steered.rotated(bin).begin(), steered.rotated(bin).end());
    const auto d = ffrfd::steered_brief_describe(img, kp, steered, bin);
    const auto ref = oracle::brief_bits(img, kp.x, kp.y, pairs);
    for (std::size_t j = 0; j < ref.size(); ++j) ASSERT_EQ(d.bit(j), ref[j]);
  }
}

TEST(Orb, NTopLargerThanCandidatesReturnsAll) {
  ffrfd::Rng rng(34);
  const auto img = oracle::blocky_image(rng, 96, 96);
  const ffrfd::SteeredPattern steered(ffrfd::SamplingPattern::generate());
  ffrfd::OrbParams params;
  params.n_top = 100000;
  const auto ex = ffrfd::orb_detect_describe(img, params, steered);
  EXPECT_EQ(ex.features.size() + ex.dropped, ffrfd::fast_detect(img, 20, true).size());
}

TEST(Orb, OutputSizeCappedAtNTop) {
  ffrfd::Rng rng(35);
  const auto img = oracle::blocky_image(rng, 128, 128);
  const ffrfd::SteeredPattern steered(ffrfd::SamplingPattern::generate());
  ffrfd::OrbParams params;
  params.n_top = 25;
  const auto ex = ffrfd::orb_detect_describe(img, params, steered);
  ASSERT_EQ(ex.features.size(), 25u);
  for (std::size_t i = 1; i < ex.features.size(); ++i) {
    const auto& a = ex.features[i - 1].keypoint;
    const auto& b = ex.features[i].keypoint;
    EXPECT_TRUE(std::pair(a.y, a.x) < std::pair(b.y, b.x));
  }
  // The kept corners are the strongest by Harris response.
  params.n_top = 100000;
  const auto all = ffrfd::orb_detect_describe(img, params, steered);
  std::vector<double> responses;
  for (const auto& f : all.features) responses.push_back(ffrfd::harris_response(img, f.keypoint.x, f.keypoint.y));
  std::sort(responses.rbegin(), responses.rend());
  for (const auto& f : ex.features) EXPECT_GE(ffrfd::harris_response(img, f.keypoint.x, f.keypoint.y), responses[24]);
}

TEST(Orb, DescriptorsAre32BytesAndSteered) {
  ffrfd::Rng rng(36);
  const auto img = oracle::blocky_image(rng, 96, 96);
  const ffrfd::SteeredPattern steered(ffrfd::SamplingPattern::generate());
  const auto ex = ffrfd::orb_detect_describe(img, {}, steered);
  ASSERT_FALSE(ex.features.empty());
  const auto smoothed = ffrfd::gaussian_blur(img, 2.0, 9);
  for (const auto& f : ex.features) {
    EXPECT_EQ(f.descriptor.size(), 32u);
    EXPECT_EQ(f.keypoint.orientation, ffrfd::intensity_centroid_orientation(img, f.keypoint));
    EXPECT_EQ(f.descriptor,
              ffrfd::steered_brief_describe(smoothed, f.keypoint, steered, ffrfd::orientation_bin(f.keypoint.orientation)));
  }
}

TEST(Orb, RotatingTheImageRotatesTheOrientation) {
  const auto img = quadrant(64, 32, 32, 20, 220);
  const ffrfd::SteeredPattern steered(ffrfd::SamplingPattern::generate());
  ffrfd::OrbParams params;
  params.n_top = 1;
  const auto a = ffrfd::orb_detect_describe(img, params, steered);
  const auto b = ffrfd::orb_detect_describe(rotate90(img), params, steered);
  ASSERT_EQ(a.features.size(), 1u);
  ASSERT_EQ(b.features.size(), 1u);
  const double expected = std::fmod(a.features[0].keypoint.orientation + std::numbers::pi / 2, kTwoPi);
  EXPECT_LE(angle_distance(b.features[0].keypoint.orientation, expected), kTwoPi / 30);
}

}  // namespace
