#include <gtest/gtest.h>

#include "ffrfd/features.hpp"
#include "helpers.hpp"
#include "oracles.hpp"

namespace {

using ffrfd::GrayImage;
using ffrfd::Keypoint;
using ffrfd::SamplingPattern;

TEST(SamplingPattern, DeterministicAndWithinPatch) {
  const auto a = SamplingPattern::generate();
  const auto b = SamplingPattern::generate();
  EXPECT_EQ(a, b);
  EXPECT_EQ(a.n_pairs(), 256u);
  EXPECT_EQ(a.seed(), 0x5DEEC6u);
  EXPECT_EQ(a.margin(), 16);
  for (const auto& p : a.pairs()) {
    for (auto o : {p.first, p.second}) {
      EXPECT_LE(std::abs(o.dx), 15);
      EXPECT_LE(std::abs(o.dy), 15);
    }
    EXPECT_NE(p.first, p.second);
  }
  EXPECT_NE(SamplingPattern::generate(1), a);
}

TEST(SamplingPattern, SpreadFollowsPatchSize) {
  // sd S/5 = 6.2; the clamped, rounded sample sd stays close to it.
  const auto p = SamplingPattern::generate(99, 4096);
  double ss = 0.0;
  for (const auto& pr : p.pairs()) ss += pr.first.dx * pr.first.dx + pr.second.dy * pr.second.dy;
  const double sd = std::sqrt(ss / (2.0 * 4096));
  EXPECT_NEAR(sd, 6.2, 0.4);
}

TEST(SamplingPattern, ExplicitPairsOutsidePatchRejected) {
  using testing_support::kind_of;
  EXPECT_EQ(kind_of([] { SamplingPattern({{{0, 0}, {16, 0}}}, 31); }), ffrfd::ErrorKind::data);
}

TEST(BriefDescribe, UniformPatchGivesZeroBits) {
  const GrayImage img(40, 40, 90);
  const auto d = ffrfd::brief_describe(img, Keypoint{20, 20}, SamplingPattern::generate());
  EXPECT_EQ(d.size(), 32u);
  for (auto byte : d.bytes()) EXPECT_EQ(byte, 0);
}

TEST(BriefDescribe, RampWithHandPattern) {
  GrayImage img(40, 40);
  for (int y = 0; y < 40; ++y)
    for (int x = 0; x < 40; ++x) img.at(x, y) = static_cast<std::uint8_t>(5 * x);
  const SamplingPattern pattern({{{-3, 0}, {2, 0}}, {{4, 1}, {-4, -1}}, {{1, 5}, {1, -5}}, {{-2, 3}, {0, 3}}}, 31);
  const auto d = ffrfd::brief_describe(img, Keypoint{20, 20}, pattern);
  // Intensity grows with x: bit = (first.dx < second.dx).
  EXPECT_TRUE(d.bit(0));
  EXPECT_FALSE(d.bit(1));
  EXPECT_FALSE(d.bit(2));  // equal x, tie
  EXPECT_TRUE(d.bit(3));
  EXPECT_EQ(d.bytes()[0], 0b1001);
}

TEST(BriefDescribe, MatchesDirectComparison) {
  ffrfd::Rng rng(21);
  const auto pattern = SamplingPattern::generate(rng.next());
  const std::vector<ffrfd::PointPair> pairs(pattern.pairs().begin(), pattern.pairs().end());
  for (int i = 0; i < 200; ++i) {
    const auto img = ffrfd::gaussian_blur(oracle::random_image(rng, 48, 48), 2.0, 9);
    const Keypoint kp{16 + static_cast<int>(rng.below(16)), 16 + static_cast<int>(rng.below(16))};
    const auto d = ffrfd::brief_describe(img, kp, pattern);
    const auto ref = oracle::brief_bits(img, kp.x, kp.y, pairs);
    for (std::size_t j = 0; j < ref.size(); ++j) ASSERT_EQ(d.bit(j), ref[j]) << "case " << i << " bit " << j;
  }
}

TEST(BriefDescribe, BorderKeypointRejected) {
  using testing_support::kind_of;
  const GrayImage img(40, 40);
  const auto pattern = SamplingPattern::generate();
  EXPECT_EQ(kind_of([&] { ffrfd::brief_describe(img, Keypoint{15, 20}, pattern); }), ffrfd::ErrorKind::data);
  EXPECT_EQ(kind_of([&] { ffrfd::brief_describe(img, Keypoint{20, 24}, pattern); }), ffrfd::ErrorKind::data);
  EXPECT_NO_THROW(ffrfd::brief_describe(img, Keypoint{16, 23}, pattern));
}

TEST(FastBrief, DescriptorsAre32BytesAndDroppedCounted) {
  ffrfd::Rng rng(22);
  const auto img = oracle::blocky_image(rng, 64, 64);
  const auto pattern = SamplingPattern::generate();
  const auto ex = ffrfd::fast_brief_detect_describe(img, {}, pattern);
  const auto all = ffrfd::fast_detect(img, 20, true);
  EXPECT_EQ(ex.features.size() + ex.dropped, all.size());
  const auto smoothed = ffrfd::gaussian_blur(img, 2.0, 9);
  for (const auto& f : ex.features) {
    EXPECT_EQ(f.descriptor.size(), 32u);
    EXPECT_GE(f.keypoint.x, 16);
    EXPECT_LE(f.keypoint.x, 47);
    EXPECT_EQ(f.descriptor, ffrfd::brief_describe(smoothed, f.keypoint, pattern));
  }
}

}  // namespace
