#pragma once

#include <array>
#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "ffrfd/image.hpp"

namespace ffrfd {

struct Keypoint {
  int x = 0;
  int y = 0;
  double score = 0.0;
  double orientation = 0.0;  // radians in [0, 2*pi); 0 when not computed

  bool operator==(const Keypoint&) const = default;
};

struct Offset {
  int dx = 0;
  int dy = 0;
  bool operator==(const Offset&) const = default;
};

/// Packed comparison bits. Bit j lives in byte j/8 at bit position j%8 (LSB first).
class BinaryDescriptor {
 public:
  BinaryDescriptor() = default;
  explicit BinaryDescriptor(std::size_t n_bits) : n_bits_(n_bits), bytes_((n_bits + 7) / 8, 0) {}

  std::size_t n_bits() const { return n_bits_; }
  std::size_t size() const { return bytes_.size(); }
  std::span<const std::uint8_t> bytes() const { return bytes_; }

  bool bit(std::size_t j) const { return (bytes_[j >> 3] >> (j & 7)) & 1u; }
  void set(std::size_t j) { bytes_[j >> 3] |= static_cast<std::uint8_t>(1u << (j & 7)); }
  void set_byte(std::size_t i, std::uint8_t v) { bytes_[i] = v; }

  bool operator==(const BinaryDescriptor&) const = default;

 private:
  std::size_t n_bits_ = 0;
  std::vector<std::uint8_t> bytes_;
};

struct PointPair {
  Offset first;
  Offset second;
  bool operator==(const PointPair&) const = default;
};

inline constexpr std::uint64_t kDefaultPatternSeed = 0x5DEEC6;
inline constexpr int kDefaultPatchSize = 31;
inline constexpr int kDefaultPairs = 256;

/// BRIEF test locations: n pairs of integer offsets drawn from an isotropic Gaussian
/// (sd = patch/5), rounded and clamped to the patch. Identical points within a pair
/// are redrawn since they can only produce a constant bit.
class SamplingPattern {
 public:
  static SamplingPattern generate(std::uint64_t seed = kDefaultPatternSeed, int n_pairs = kDefaultPairs,
                                  int patch_size = kDefaultPatchSize);
  /// Explicit pattern, mostly for tests. Offsets must lie within the patch.
  SamplingPattern(std::vector<PointPair> pairs, int patch_size, std::uint64_t seed = 0);

  std::span<const PointPair> pairs() const { return pairs_; }
  std::size_t n_pairs() const { return pairs_.size(); }
  int patch_size() const { return patch_size_; }
  std::uint64_t seed() const { return seed_; }
  /// Required keypoint distance from every border: (S-1)/2 + 1.
  int margin() const { return (patch_size_ - 1) / 2 + 1; }

  bool operator==(const SamplingPattern&) const = default;

 private:
  std::vector<PointPair> pairs_;
  int patch_size_;
  std::uint64_t seed_;
};

// ---- FAST -----------------------------------------------------------------

/// Bresenham circle of radius 3, clockwise from 12 o'clock.
inline constexpr std::array<Offset, 16> kFastCircle{{{0, -3}, {1, -3}, {2, -2}, {3, -1},
                                                     {3, 0},  {3, 1},  {2, 2},  {1, 3},
                                                     {0, 3},  {-1, 3}, {-2, 2}, {-3, 1},
                                                     {-3, 0}, {-3, -1}, {-2, -2}, {-1, -3}}};
inline constexpr int kFastRadius = 3;
inline constexpr int kDefaultFastThreshold = 20;
inline constexpr int kDefaultArcLength = 9;

/// Segment test at (x, y): at least `arc_length` contiguous circle pixels all
/// brighter than I(p)+t or all darker than I(p)-t. (x, y) must be >= 3 px from every border.
bool segment_test(const GrayImage& img, int x, int y, int threshold, int arc_length = kDefaultArcLength);

/// Largest t >= threshold at which the segment test still passes (binary search).
/// Precondition: the test passes at `threshold`.
int fast_score(const GrayImage& img, int x, int y, int threshold, int arc_length = kDefaultArcLength);

/// FAST corners in row-major order, each scored by fast_score. With NMS a corner is
/// kept only if it beats every 8-neighbour corner: strictly higher score, or equal
/// score and lexicographically smaller (y, x).
/// Throws Error(data) if the image is smaller than 7x7 or parameters are out of range.
std::vector<Keypoint> fast_detect(const GrayImage& img, int threshold, bool use_nms,
                                  int arc_length = kDefaultArcLength);

// ---- BRIEF ----------------------------------------------------------------

inline constexpr double kBriefSigma = 2.0;
inline constexpr int kBriefKernel = 9;

/// bit j = smoothed(kp + first_j) < smoothed(kp + second_j).
/// Throws Error(data) if kp is closer than pattern.margin() to a border.
BinaryDescriptor brief_describe(const GrayImage& smoothed, const Keypoint& kp, const SamplingPattern& pattern);

// ---- ORB ------------------------------------------------------------------

inline constexpr double kHarrisK = 0.04;
inline constexpr int kDefaultHarrisBlock = 7;
inline constexpr int kDefaultCentroidRadius = 15;
inline constexpr int kOrientationBins = 30;
inline constexpr int kDefaultTopN = 500;

/// det(M) - 0.04 trace(M)^2, M the uniformly weighted structure tensor of central
/// differences over a block x block window. Throws Error(data) if the window (plus the
/// one-pixel gradient stencil) leaves the image or block is even.
double harris_response(const GrayImage& img, int x, int y, int block = kDefaultHarrisBlock);

/// atan2(m01, m10) over the disc of `radius` around kp, mapped to [0, 2*pi).
/// Zero moments give 0. Throws Error(data) if the disc leaves the image.
double intensity_centroid_orientation(const GrayImage& img, const Keypoint& kp,
                                      int radius = kDefaultCentroidRadius);

/// Orientation bin (round to nearest of `bins` equal sectors).
int orientation_bin(double theta, int bins = kOrientationBins);

/// A sampling pattern pre-rotated for every orientation bin.
class SteeredPattern {
 public:
  explicit SteeredPattern(const SamplingPattern& base, int bins = kOrientationBins);

  int bins() const { return bins_; }
  const SamplingPattern& base() const { return base_; }
  std::span<const PointPair> rotated(int bin) const { return rotated_[static_cast<std::size_t>(bin)]; }
  /// Largest |offset| component over all rotations, plus one.
  int margin() const { return margin_; }

 private:
  SamplingPattern base_;
  int bins_;
  int margin_ = 0;
  std::vector<std::vector<PointPair>> rotated_;
};

BinaryDescriptor steered_brief_describe(const GrayImage& smoothed, const Keypoint& kp,
                                        const SteeredPattern& pattern, int bin);

struct DescribedKeypoint {
  Keypoint keypoint;
  BinaryDescriptor descriptor;
};

/// Detector output ready for aggregation. `dropped` counts corners that were detected
/// but sat inside the descriptor margin.
struct Extraction {
  std::vector<DescribedKeypoint> features;
  std::size_t dropped = 0;
};

struct FastBriefParams {
  int threshold = kDefaultFastThreshold;
  int arc_length = kDefaultArcLength;
  double blur_sigma = kBriefSigma;
  int blur_kernel = kBriefKernel;
};

struct OrbParams {
  int n_top = kDefaultTopN;
  int threshold = kDefaultFastThreshold;
  int arc_length = kDefaultArcLength;
  int harris_block = kDefaultHarrisBlock;
  int centroid_radius = kDefaultCentroidRadius;
  double blur_sigma = kBriefSigma;
  int blur_kernel = kBriefKernel;
};

/// FAST-9 with NMS, margin filter, then BRIEF on the Gaussian-smoothed image.
Extraction fast_brief_detect_describe(const GrayImage& img, const FastBriefParams& params,
                                      const SamplingPattern& pattern);

/// FAST-9 with NMS, margin filter, Harris top-N (ties by (y, x)), intensity-centroid
/// orientation, and BRIEF steered by the binned angle. Output is in row-major order.
Extraction orb_detect_describe(const GrayImage& img, const OrbParams& params, const SteeredPattern& pattern);

// ---- External keypoint files ----------------------------------------------

struct ExternalKeypoint {
  double x = 0.0;
  double y = 0.0;
  double score = 0.0;
  double orientation = 0.0;
  std::vector<double> descriptor;

  bool operator==(const ExternalKeypoint&) const = default;
};

/// Text format: header `detector=<name> d=<int>`, then one row per keypoint
/// `x y score orientation v0 ... v{d-1}`.
struct KeypointFile {
  std::string detector_name;
  std::size_t d = 0;
  std::vector<ExternalKeypoint> entries;

  bool operator==(const KeypointFile&) const = default;
};

KeypointFile parse_keypoint_file(std::string_view content);
KeypointFile ingest_keypoint_file(const std::string& path);
std::string format_keypoint_file(const KeypointFile& file);
void write_keypoint_file(const KeypointFile& file, const std::string& path);

}  // namespace ffrfd
