#pragma once

#include <array>
#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "ffrfd/features.hpp"
#include "ffrfd/regions.hpp"

namespace ffrfd {

/// ave divides each region sum by its keypoint count; no_ave keeps the raw sum and
/// with it the keypoint-quantity information.
enum class Mode { ave, no_ave };

std::string_view mode_name(Mode mode);
/// Throws Error(data) for anything other than "ave" / "no_ave".
Mode parse_mode(std::string_view name);

/// Fused facial-region feature descriptor: eight d-long region segments in
/// canonical RegionId order.
struct FfrFd {
  std::vector<double> values;
  Mode mode = Mode::no_ave;
  std::string detector_name;
  std::size_t d = 0;

  std::span<const double> segment(RegionId id) const {
    return std::span<const double>(values).subspan(region_index(id) * d, d);
  }
  bool operator==(const FfrFd&) const = default;
};

using RegionCounts = std::array<std::size_t, kRegionCount>;

/// Elementwise sum of byte-valued descriptors, exact. Empty input gives d zeros.
/// Throws Error(data) if any descriptor is not d bytes long.
std::vector<std::uint64_t> accumulate_fd_r(std::span<const BinaryDescriptor* const> descriptors, std::size_t d);
/// Elementwise sum of real-valued descriptors in the given order.
std::vector<double> accumulate_fd_r(std::span<const std::vector<double>* const> descriptors, std::size_t d);

/// FFR_FD from binary descriptors; d is the descriptor length in bytes.
FfrFd build_ffr_fd(std::span<const DescribedKeypoint> features, std::size_t d, const RegionPartition& partition,
                   Mode mode, std::string detector_name);

/// FFR_FD from externally computed real descriptors. Region members are summed in a
/// canonical order so the result does not depend on input order.
FfrFd build_ffr_fd(std::span<const ExternalKeypoint> features, std::size_t d, const RegionPartition& partition,
                   Mode mode, std::string detector_name);

RegionCounts region_counts(std::span<const Point2> points, const RegionPartition& partition);

inline Point2 to_point(const Keypoint& kp) { return {static_cast<double>(kp.x), static_cast<double>(kp.y)}; }
inline Point2 to_point(const ExternalKeypoint& kp) { return {kp.x, kp.y}; }

/// Per-dimension real-minus-fake differences of mean and population variance.
struct DimensionDiff {
  std::vector<double> mean_diff;
  std::vector<double> var_diff;
  std::size_t d = 0;
};

/// Throws Error(data) on an empty class, Error(compatibility) on mismatched
/// mode, detector or d.
DimensionDiff dimension_diff(std::span<const FfrFd> real, std::span<const FfrFd> fake);

/// Mean keypoint count per region and class.
struct RegionStats {
  std::array<double, kRegionCount> real_mean{};
  std::array<double, kRegionCount> fake_mean{};
  std::size_t n_real = 0;
  std::size_t n_fake = 0;
  std::string detector_name;
  int threshold = 0;
  std::size_t dropped_keypoints = 0;
  std::size_t skipped_files = 0;
  int min_width = 0, max_width = 0, min_height = 0, max_height = 0;
};

std::string format_region_stats_csv(const RegionStats& stats);

}  // namespace ffrfd
