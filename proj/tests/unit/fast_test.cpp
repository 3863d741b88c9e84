#include <gtest/gtest.h>

#include <set>

#include "ffrfd/features.hpp"
#include "helpers.hpp"
#include "oracles.hpp"

namespace {

using ffrfd::GrayImage;
using ffrfd::Keypoint;

std::set<std::pair<int, int>> positions(const std::vector<Keypoint>& kps) {
  std::set<std::pair<int, int>> out;
  for (const auto& k : kps) out.insert({k.x, k.y});
  return out;
}

GrayImage square_image() {
  GrayImage img(32, 32, 0);
  for (int y = 8; y < 24; ++y)
    for (int x = 8; x < 24; ++x) img.at(x, y) = 255;
  return img;
}

TEST(FastDetect, ConstantImageHasNoCorners) {
  EXPECT_TRUE(ffrfd::fast_detect(GrayImage(40, 30, 77), 20, false).empty());
  EXPECT_TRUE(ffrfd::fast_detect(GrayImage(40, 30, 77), 20, true).empty());
}

TEST(FastDetect, WhiteSquareMatchesSegmentTestOracle) {
  const auto img = square_image();
  const auto found = positions(ffrfd::fast_detect(img, 20, false));
  EXPECT_EQ(found, oracle::fast_corners(img, 20));
  EXPECT_FALSE(found.empty());
  // The four square corners themselves respond.
  for (auto p : {std::pair{8, 8}, std::pair{23, 8}, std::pair{8, 23}, std::pair{23, 23}}) EXPECT_TRUE(found.count(p));
}

TEST(FastDetect, RandomImagesMatchOracle) {
  ffrfd::Rng rng(11);
  for (int i = 0; i < 30; ++i) {
    const auto img = i % 2 ? oracle::random_image(rng, 40, 40) : oracle::blocky_image(rng, 40, 40);
    for (int t : {10, 20, 40}) ASSERT_EQ(positions(ffrfd::fast_detect(img, t, false)), oracle::fast_corners(img, t));
  }
}

TEST(FastDetect, OtherArcLengthsMatchOracle) {
  ffrfd::Rng rng(12);
  for (int arc : {12, 16}) {
    const auto img = oracle::blocky_image(rng, 40, 40);
    EXPECT_EQ(positions(ffrfd::fast_detect(img, 15, false, arc)), oracle::fast_corners(img, 15, arc));
  }
}

TEST(FastDetect, ScoresMatchLinearScan) {
  ffrfd::Rng rng(13);
  int checked = 0;
  while (checked < 50) {
    const auto img = oracle::blocky_image(rng, 32, 32);
    for (const auto& kp : ffrfd::fast_detect(img, 20, false)) {
      ASSERT_EQ(kp.score, oracle::fast_score_linear(img, kp.x, kp.y, 20));
      ASSERT_EQ(ffrfd::fast_score(img, kp.x, kp.y, 20), oracle::fast_score_linear(img, kp.x, kp.y, 20));
      if (++checked == 50) break;
    }
  }
}

TEST(FastScore, BoundaryThreshold) {
  // Nine bright ring pixels exactly 21 above the centre: passes at 20, fails at 21.
  GrayImage img(7, 7, 100);
  const auto ring = oracle::circle16();
  for (int k = 0; k < 9; ++k) img.at(3 + ring[static_cast<std::size_t>(k)].first, 3 + ring[static_cast<std::size_t>(k)].second) = 121;
  ASSERT_TRUE(ffrfd::segment_test(img, 3, 3, 20));
  EXPECT_FALSE(ffrfd::segment_test(img, 3, 3, 21));
  EXPECT_EQ(ffrfd::fast_score(img, 3, 3, 20), 20);
}

TEST(FastScore, StepEdgeScoresBelowContrast) {
  // A corner of a 100-contrast step: the score cannot reach the contrast itself.
  GrayImage img(16, 16, 50);
  for (int y = 8; y < 16; ++y)
    for (int x = 8; x < 16; ++x) img.at(x, y) = 150;
  const auto kps = ffrfd::fast_detect(img, 20, false);
  ASSERT_FALSE(kps.empty());
  for (const auto& kp : kps) {
    EXPECT_LT(kp.score, 100.0);
    EXPECT_EQ(kp.score, oracle::fast_score_linear(img, kp.x, kp.y, 20));
  }
}

TEST(FastDetect, NmsLeavesNoAdjacentCorners) {
  ffrfd::Rng rng(14);
  for (int i = 0; i < 20; ++i) {
    const auto img = oracle::blocky_image(rng, 48, 48);
    const auto all = ffrfd::fast_detect(img, 20, false);
    const auto kept = ffrfd::fast_detect(img, 20, true);
    const auto kept_set = positions(kept);
    for (const auto& a : kept)
      for (int dy = -1; dy <= 1; ++dy)
        for (int dx = -1; dx <= 1; ++dx)
          if (dx || dy) EXPECT_FALSE(kept_set.count({a.x + dx, a.y + dy}));
    // Every suppressed corner has a neighbour that beats it.
    std::map<std::pair<int, int>, double> score;
    for (const auto& k : all) score[{k.x, k.y}] = k.score;
    for (const auto& k : all) {
      if (kept_set.count({k.x, k.y})) continue;
      bool beaten = false;
      for (int dy = -1; dy <= 1; ++dy)
        for (int dx = -1; dx <= 1; ++dx) {
          auto it = score.find({k.x + dx, k.y + dy});
          if ((dx || dy) && it != score.end())
            beaten = beaten || it->second > k.score ||
                     (it->second == k.score && std::pair{k.y + dy, k.x + dx} < std::pair{k.y, k.x});
        }
      EXPECT_TRUE(beaten);
    }
  }
}

TEST(FastDetect, TieGoesToSmallerRowMajorPosition) {
  // Two horizontally adjacent pixels with identical neighbourhoods score the same.
  GrayImage img(13, 9, 0);
  for (int y = 0; y < 9; ++y)
    for (int x = 0; x < 13; ++x) img.at(x, y) = (y >= 4 && x >= 6) ? 200 : 0;
  const auto kps = ffrfd::fast_detect(img, 20, true);
  for (const auto& a : kps)
    for (const auto& b : kps)
      if (&a != &b) EXPECT_GT(std::max(std::abs(a.x - b.x), std::abs(a.y - b.y)), 1);
}

TEST(FastDetect, RejectsTinyImagesAndBadThresholds) {
  using testing_support::kind_of;
  EXPECT_EQ(kind_of([] { ffrfd::fast_detect(GrayImage(6, 20), 20, true); }), ffrfd::ErrorKind::data);
  EXPECT_EQ(kind_of([] { ffrfd::fast_detect(GrayImage(20, 20), 0, true); }), ffrfd::ErrorKind::data);
  EXPECT_EQ(kind_of([] { ffrfd::fast_detect(GrayImage(20, 20), 255, true); }), ffrfd::ErrorKind::data);
}

TEST(FastDetect, BlurRarelyAddsCorners) {
  ffrfd::Rng rng(15);
  int not_more = 0;
  for (int i = 0; i < 40; ++i) {
    const auto img = oracle::blocky_image(rng, 64, 64);
    const auto blurred = ffrfd::gaussian_blur(img, 2.0, 9);
    not_more += ffrfd::fast_detect(blurred, 20, true).size() <= ffrfd::fast_detect(img, 20, true).size();
  }
  EXPECT_GE(not_more, 38);
}

}  // namespace
