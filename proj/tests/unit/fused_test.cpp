#include <gtest/gtest.h>

#include <cmath>

#include "ffrfd/fused.hpp"
#include "ffrfd/rng.hpp"
#include "ffrfd/synth.hpp"
#include "ffrfd/text.hpp"
#include "helpers.hpp"
#include "oracles.hpp"

namespace {

using ffrfd::BinaryDescriptor;
using ffrfd::DescribedKeypoint;
using ffrfd::FfrFd;
using ffrfd::Mode;
using ffrfd::Point2;
using ffrfd::RegionId;

BinaryDescriptor from_bytes(const std::vector<std::uint8_t>& bytes) {
  BinaryDescriptor d(bytes.size() * 8);
  for (std::size_t i = 0; i < bytes.size(); ++i)
    for (std::size_t b = 0; b < 8; ++b)
      if ((bytes[i] >> b) & 1u) d.set(8 * i + b);
  return d;
}

BinaryDescriptor random_descriptor(ffrfd::Rng& rng, std::size_t d = 32) {
  std::vector<std::uint8_t> bytes(d);
  for (auto& b : bytes) b = static_cast<std::uint8_t>(rng.below(256));
  return from_bytes(bytes);
}

std::vector<double> as_doubles(const BinaryDescriptor& d) {
  return {d.bytes().begin(), d.bytes().end()};
}

const ffrfd::RegionPartition& partition() {
  static const auto p = ffrfd::build_partition(ffrfd::synth::template_landmarks(128));
  return p;
}

Point2 mouth_centre() {
  const auto lm = ffrfd::synth::template_landmarks(128);
  Point2 c{0, 0};
  for (std::size_t k = 60; k < 68; ++k) c = {c.x + lm.points[k].x / 8, c.y + lm.points[k].y / 8};
  return c;
}

std::vector<DescribedKeypoint> random_keypoints(ffrfd::Rng& rng, std::size_t n) {
  std::vector<DescribedKeypoint> out;
  for (std::size_t i = 0; i < n; ++i)
    out.push_back({{static_cast<int>(rng.below(128)), static_cast<int>(rng.below(128))}, random_descriptor(rng)});
  return out;
}

TEST(AccumulateFdR, EmptyGivesZeros) {
  EXPECT_EQ(ffrfd::accumulate_fd_r(std::span<const BinaryDescriptor* const>{}, 32), std::vector<std::uint64_t>(32, 0));
  EXPECT_EQ(ffrfd::accumulate_fd_r(std::span<const std::vector<double>* const>{}, 5), std::vector<double>(5, 0.0));
}

TEST(AccumulateFdR, ElementwiseSum) {
  const auto a = from_bytes({1, 2, 3}), b = from_bytes({3, 4, 250});
  const std::vector<const BinaryDescriptor*> both{&a, &b};
  EXPECT_EQ(ffrfd::accumulate_fd_r(both, 3), (std::vector<std::uint64_t>{4, 6, 253}));
  const std::vector<double> x{1, 2}, y{3, 4};
  const std::vector<const std::vector<double>*> reals{&x, &y};
  EXPECT_EQ(ffrfd::accumulate_fd_r(reals, 2), (std::vector<double>{4, 6}));
}

TEST(AccumulateFdR, RaggedInputRejected) {
  const auto a = from_bytes({1, 2, 3}), b = from_bytes({3, 4});
  const std::vector<const BinaryDescriptor*> both{&a, &b};
  EXPECT_EQ(testing_support::kind_of([&] { ffrfd::accumulate_fd_r(both, 3); }), ffrfd::ErrorKind::data);
}

TEST(AccumulateFdR, MatchesFoldOracle) {
  ffrfd::Rng rng(61);
  for (int i = 0; i < 100; ++i) {
    std::vector<BinaryDescriptor> descs;
    for (std::size_t k = rng.below(50); k-- > 0;) descs.push_back(random_descriptor(rng));
    std::vector<const BinaryDescriptor*> ptrs;
    std::vector<std::vector<double>> values;
    for (const auto& d : descs) {
      ptrs.push_back(&d);
      values.push_back(as_doubles(d));
    }
    const auto sum = ffrfd::accumulate_fd_r(ptrs, 32);
    const auto ref = oracle::fold_sum(values, 32);
    for (std::size_t k = 0; k < 32; ++k) ASSERT_EQ(static_cast<double>(sum[k]), ref[k]);
  }
}

TEST(BuildFfrFd, NoKeypointsGivesZeros) {
  for (Mode mode : {Mode::ave, Mode::no_ave}) {
    const auto f = ffrfd::build_ffr_fd(std::span<const DescribedKeypoint>{}, 32, partition(), mode, "fast_brief");
    EXPECT_EQ(f.values, std::vector<double>(256, 0.0));
    EXPECT_EQ(f.mode, mode);
  }
}

TEST(BuildFfrFd, DimensionsFollowDescriptorLength) {
  EXPECT_EQ(ffrfd::build_ffr_fd(std::span<const DescribedKeypoint>{}, 32, partition(), Mode::no_ave, "x").values.size(),
            256u);
  for (std::size_t d : {128u, 64u, 61u})
    EXPECT_EQ(
        ffrfd::build_ffr_fd(std::span<const ffrfd::ExternalKeypoint>{}, d, partition(), Mode::no_ave, "x").values.size(),
        8 * d);
}

TEST(BuildFfrFd, TwoMouthKeypoints) {
  ffrfd::Rng rng(62);
  const auto c = mouth_centre();
  const std::vector<DescribedKeypoint> kps{
      {{static_cast<int>(c.x), static_cast<int>(c.y)}, random_descriptor(rng)},
      {{static_cast<int>(c.x) + 1, static_cast<int>(c.y)}, random_descriptor(rng)}};
  ASSERT_TRUE(ffrfd::assign_regions(ffrfd::to_point(kps[1].keypoint), partition()).contains(RegionId::mouth));
  const auto sum = ffrfd::build_ffr_fd(kps, 32, partition(), Mode::no_ave, "fast_brief");
  const auto ave = ffrfd::build_ffr_fd(kps, 32, partition(), Mode::ave, "fast_brief");
  const auto a = as_doubles(kps[0].descriptor), b = as_doubles(kps[1].descriptor);
  for (std::size_t k = 0; k < 32; ++k) {
    EXPECT_EQ(sum.segment(RegionId::mouth)[k], a[k] + b[k]);
    EXPECT_EQ(ave.segment(RegionId::mouth)[k], (a[k] + b[k]) / 2);
    EXPECT_EQ(sum.segment(RegionId::entire_face)[k], a[k] + b[k]);
    EXPECT_EQ(sum.segment(RegionId::nose)[k], 0.0);
  }
}

TEST(BuildFfrFd, NoAveIsAdditiveOverDisjointSets) {
  ffrfd::Rng rng(63);
  for (int i = 0; i < 50; ++i) {
    const auto s1 = random_keypoints(rng, rng.below(40));
    const auto s2 = random_keypoints(rng, rng.below(40));
    auto both = s1;
    both.insert(both.end(), s2.begin(), s2.end());
    const auto f1 = ffrfd::build_ffr_fd(s1, 32, partition(), Mode::no_ave, "fast_brief");
    const auto f2 = ffrfd::build_ffr_fd(s2, 32, partition(), Mode::no_ave, "fast_brief");
    const auto f = ffrfd::build_ffr_fd(both, 32, partition(), Mode::no_ave, "fast_brief");
    for (std::size_t k = 0; k < 256; ++k) ASSERT_EQ(f.values[k], f1.values[k] + f2.values[k]);
  }
}

TEST(BuildFfrFd, AveIsNoAveDividedByCount) {
  ffrfd::Rng rng(64);
  for (int i = 0; i < 50; ++i) {
    const auto kps = random_keypoints(rng, 1 + rng.below(80));
    const auto sum = ffrfd::build_ffr_fd(kps, 32, partition(), Mode::no_ave, "fast_brief");
    const auto ave = ffrfd::build_ffr_fd(kps, 32, partition(), Mode::ave, "fast_brief");
    std::vector<Point2> pts;
    for (const auto& k : kps) pts.push_back(ffrfd::to_point(k.keypoint));
    const auto counts = ffrfd::region_counts(pts, partition());
    for (auto id : ffrfd::kRegions) {
      const auto n = static_cast<double>(counts[ffrfd::region_index(id)]);
      for (std::size_t k = 0; k < 32; ++k) {
        if (n == 0) {
          ASSERT_EQ(ave.segment(id)[k], 0.0);
          ASSERT_EQ(sum.segment(id)[k], 0.0);
        } else {
          ASSERT_EQ(ave.segment(id)[k], sum.segment(id)[k] / n);
          // ave * N reproduces the integer sum to within rounding of the quotient.
          const double a = ave.segment(id)[k];
          const double half_ulp = a == 0.0 ? 0.0 : std::ldexp(1.0, std::ilogb(a) - 53);
          ASSERT_LE(std::abs(std::fma(a, n, -sum.segment(id)[k])), n * half_ulp);
        }
      }
    }
  }
}

TEST(BuildFfrFd, PermutationInvariant) {
  ffrfd::Rng rng(65);
  for (int i = 0; i < 30; ++i) {
    auto kps = random_keypoints(rng, 60);
    const auto ref = ffrfd::build_ffr_fd(kps, 32, partition(), Mode::ave, "fast_brief");
    rng.shuffle(kps.begin(), kps.end());
    ASSERT_EQ(ffrfd::build_ffr_fd(kps, 32, partition(), Mode::ave, "fast_brief"), ref);

    std::vector<ffrfd::ExternalKeypoint> ext;
    for (int k = 0; k < 60; ++k) {
      ffrfd::ExternalKeypoint e{rng.uniform(0, 128), rng.uniform(0, 128), 0, 0, {}};
      for (int j = 0; j < 61; ++j) e.descriptor.push_back(rng.normal());
      ext.push_back(e);
    }
    const auto eref = ffrfd::build_ffr_fd(ext, 61, partition(), Mode::no_ave, "akaze");
    rng.shuffle(ext.begin(), ext.end());
    ASSERT_EQ(ffrfd::build_ffr_fd(ext, 61, partition(), Mode::no_ave, "akaze"), eref);
  }
}

TEST(BuildFfrFd, RaggedExternalDescriptorsRejected) {
  std::vector<ffrfd::ExternalKeypoint> ext{{1, 1, 0, 0, {1, 2}}, {2, 2, 0, 0, {1}}};
  EXPECT_EQ(testing_support::kind_of([&] { ffrfd::build_ffr_fd(ext, 2, partition(), Mode::ave, "sift"); }),
            ffrfd::ErrorKind::data);
}

TEST(RegionCounts, EmptyAndOutside) {
  EXPECT_EQ(ffrfd::region_counts({}, partition()), ffrfd::RegionCounts{});
  const std::vector<Point2> corners{{0, 0}, {1, 0}, {0, 1}, {127, 127}, {127, 0}};
  const auto c = ffrfd::region_counts(corners, partition());
  EXPECT_EQ(c[0], 5u);
  for (std::size_t k = 1; k < 8; ++k) EXPECT_EQ(c[k], 0u);
}

TEST(RegionCounts, MatchesPerPointTally) {
  ffrfd::Rng rng(66);
  std::vector<Point2> pts(2000);
  for (auto& p : pts) p = {rng.uniform(0, 128), rng.uniform(0, 128)};
  const auto counts = ffrfd::region_counts(pts, partition());
  for (std::size_t r = 1; r < 8; ++r) {
    const auto& shape = partition().shape(ffrfd::kRegions[r]);
    std::size_t tally = 0;
    for (auto p : pts) tally += oracle::ray_cast(shape.vertices, p);
    EXPECT_EQ(counts[r], tally) << ffrfd::region_name(ffrfd::kRegions[r]);
  }
  EXPECT_EQ(counts[0], pts.size());
}

FfrFd toy(double first) {
  FfrFd f;
  f.d = 1;
  f.mode = Mode::no_ave;
  f.detector_name = "toy";
  f.values.assign(8, 0.0);
  f.values[0] = first;
  return f;
}

TEST(DimensionDiff, ToyExample) {
  const std::vector<FfrFd> real{toy(2)}, fake{toy(1)};
  const auto diff = ffrfd::dimension_diff(real, fake);
  ASSERT_EQ(diff.mean_diff.size(), 8u);
  EXPECT_EQ(diff.mean_diff[0], 1.0);
  EXPECT_EQ(diff.var_diff[0], 0.0);
}

TEST(DimensionDiff, IdenticalSetsGiveZeros) {
  ffrfd::Rng rng(67);
  std::vector<FfrFd> set;
  for (int i = 0; i < 20; ++i) set.push_back(toy(rng.normal()));
  const auto diff = ffrfd::dimension_diff(set, set);
  for (std::size_t k = 0; k < 8; ++k) {
    EXPECT_EQ(diff.mean_diff[k], 0.0);
    EXPECT_EQ(diff.var_diff[k], 0.0);
  }
}

TEST(DimensionDiff, MatchesTwoPassOracle) {
  ffrfd::Rng rng(68);
  std::vector<FfrFd> real, fake;
  for (int i = 0; i < 200; ++i) {
    FfrFd f = toy(0);
    for (auto& v : f.values) v = rng.normal() * 100 + 50;
    (i % 3 ? real : fake).push_back(f);
  }
  const auto diff = ffrfd::dimension_diff(real, fake);
  for (std::size_t k = 0; k < 8; ++k) {
    std::vector<double> xr, xf;
    for (const auto& f : real) xr.push_back(f.values[k]);
    for (const auto& f : fake) xf.push_back(f.values[k]);
    const auto a = oracle::two_pass(xr), b = oracle::two_pass(xf);
    EXPECT_NEAR(diff.mean_diff[k], a.mean - b.mean, 1e-9);
    EXPECT_NEAR(diff.var_diff[k], a.var - b.var, 1e-9);
  }
}

TEST(DimensionDiff, Errors) {
  using testing_support::kind_of;
  const std::vector<FfrFd> one{toy(1)};
  auto ave = toy(1);
  ave.mode = Mode::ave;
  const std::vector<FfrFd> other{ave};
  EXPECT_EQ(kind_of([&] { ffrfd::dimension_diff({}, one); }), ffrfd::ErrorKind::data);
  EXPECT_EQ(kind_of([&] { ffrfd::dimension_diff(one, other); }), ffrfd::ErrorKind::compatibility);
}

TEST(RegionStatsCsv, TableShape) {
  ffrfd::RegionStats stats;
  stats.real_mean[1] = 5.0;
  stats.detector_name = "fast_brief";
  stats.threshold = 20;
  const auto csv = ffrfd::format_region_stats_csv(stats);
  const auto lines = ffrfd::text::split(csv, '\n');
  EXPECT_EQ(lines[0], "region,real,fake");
  EXPECT_EQ(lines[2], "mouth,5,0");
  EXPECT_TRUE(lines[9].starts_with("# detector=fast_brief threshold=20"));
}

TEST(Mode, Names) {
  EXPECT_EQ(ffrfd::parse_mode("ave"), Mode::ave);
  EXPECT_EQ(ffrfd::parse_mode(ffrfd::mode_name(Mode::no_ave)), Mode::no_ave);
  EXPECT_EQ(testing_support::kind_of([] { ffrfd::parse_mode("mean"); }), ffrfd::ErrorKind::data);
}

}  // namespace
