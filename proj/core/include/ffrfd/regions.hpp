#pragma once

#include <array>
#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace ffrfd {

struct Point2 {
  double x = 0.0;
  double y = 0.0;
  bool operator==(const Point2&) const = default;
};

inline constexpr std::size_t kLandmarkCount = 68;

/// 68 facial landmarks in iBUG order (jaw 0-16, brows 17-26, nose 27-35,
/// eyes 36-47, mouth 48-67).
struct LandmarkSet {
  std::array<Point2, kLandmarkCount> points{};
  bool operator==(const LandmarkSet&) const = default;
};

/// Canonical region order. Every per-region vector in the project uses it.
enum class RegionId : std::uint8_t {
  entire_face,
  mouth,
  inner_mouth,
  right_eyebrow,
  left_eyebrow,
  right_eye,
  left_eye,
  nose,
};

inline constexpr std::size_t kRegionCount = 8;
inline constexpr std::array<RegionId, kRegionCount> kRegions{
    RegionId::entire_face, RegionId::mouth,    RegionId::inner_mouth, RegionId::right_eyebrow,
    RegionId::left_eyebrow, RegionId::right_eye, RegionId::left_eye,  RegionId::nose};

std::string_view region_name(RegionId id);
inline std::size_t region_index(RegionId id) { return static_cast<std::size_t>(id); }

/// Inclusive 0-based iBUG index range of a polygonal region (entire_face has none).
struct LandmarkRange {
  std::size_t first;
  std::size_t last;
};
LandmarkRange landmark_range(RegionId id);

struct RegionShape {
  enum class Kind {
    polygon,  // convex hull with >= 3 vertices, counter-clockwise
    segment,  // collinear landmarks; vertices are the two extreme points
    empty,    // all landmarks coincide; no point belongs to the region
  };
  Kind kind = Kind::empty;
  std::vector<Point2> vertices;
};

/// Set of regions a point belongs to.
class RegionSet {
 public:
  void insert(RegionId id) { bits_ |= static_cast<std::uint8_t>(1u << region_index(id)); }
  bool contains(RegionId id) const { return (bits_ >> region_index(id)) & 1u; }
  std::uint8_t bits() const { return bits_; }
  bool operator==(const RegionSet&) const = default;

 private:
  std::uint8_t bits_ = 0;
};

class RegionPartition {
 public:
  RegionPartition() = default;
  explicit RegionPartition(std::array<RegionShape, kRegionCount> shapes) : shapes_(std::move(shapes)) {}

  /// Shape of a polygonal region; entire_face's entry is unused.
  const RegionShape& shape(RegionId id) const { return shapes_[region_index(id)]; }

 private:
  std::array<RegionShape, kRegionCount> shapes_;
};

/// Convex hull by monotone chain; counter-clockwise (in x-right/y-up terms), no
/// collinear vertices. Returns 1 point for coincident input and 2 for collinear input.
std::vector<Point2> convex_hull(std::span<const Point2> points);

/// Inside-or-on test against a convex counter-clockwise polygon (>= 3 vertices).
bool inside_convex_polygon(std::span<const Point2> polygon, Point2 p);

/// True iff p lies on the closed segment [a, b] (exact arithmetic test).
bool on_segment(Point2 a, Point2 b, Point2 p);

bool shape_contains(const RegionShape& shape, Point2 p);

/// Builds one convex hull per polygonal region from its landmark subset.
RegionPartition build_partition(const LandmarkSet& landmarks);

/// entire_face always; each other region iff p is inside or on its hull.
RegionSet assign_regions(Point2 p, const RegionPartition& partition);

/// True when every inner_mouth hull vertex lies inside the mouth hull. Landmark noise
/// can break this, so callers treat false as a data warning.
bool inner_mouth_contained(const RegionPartition& partition);

/// Landmark JSON: {"points": [[x, y], ... 68 entries]}.
LandmarkSet parse_landmarks(std::string_view json_text);
LandmarkSet load_landmarks(const std::string& path);
std::string format_landmarks(const LandmarkSet& landmarks);
void save_landmarks(const LandmarkSet& landmarks, const std::string& path);

}  // namespace ffrfd
