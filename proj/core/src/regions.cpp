#include "ffrfd/regions.hpp"

#include <algorithm>
#include <cmath>

#include <nlohmann/json.hpp>

#include "ffrfd/error.hpp"
#include "ffrfd/text.hpp"

namespace ffrfd {

namespace {

double cross(Point2 o, Point2 a, Point2 b) { return (a.x - o.x) * (b.y - o.y) - (a.y - o.y) * (b.x - o.x); }

}  // namespace

std::string_view region_name(RegionId id) {
  switch (id) {
    case RegionId::entire_face: return "entire_face";
    case RegionId::mouth: return "mouth";
    case RegionId::inner_mouth: return "inner_mouth";
    case RegionId::right_eyebrow: return "right_eyebrow";
    case RegionId::left_eyebrow: return "left_eyebrow";
    case RegionId::right_eye: return "right_eye";
    case RegionId::left_eye: return "left_eye";
    case RegionId::nose: return "nose";
  }
  return "unknown";
}

LandmarkRange landmark_range(RegionId id) {
  switch (id) {
    case RegionId::mouth: return {48, 67};
    case RegionId::inner_mouth: return {60, 67};
    case RegionId::right_eyebrow: return {17, 21};
    case RegionId::left_eyebrow: return {22, 26};
    case RegionId::right_eye: return {36, 41};
    case RegionId::left_eye: return {42, 47};
    case RegionId::nose: return {27, 35};
    case RegionId::entire_face: break;
  }
  fail(ErrorKind::data, "entire_face has no landmark subset");
}

std::vector<Point2> convex_hull(std::span<const Point2> points) {
  std::vector<Point2> pts(points.begin(), points.end());
  std::sort(pts.begin(), pts.end(), [](Point2 a, Point2 b) { return a.x < b.x || (a.x == b.x && a.y < b.y); });
  pts.erase(std::unique(pts.begin(), pts.end()), pts.end());
  if (pts.size() < 3) return pts;

  std::vector<Point2> hull(2 * pts.size());
  std::size_t k = 0;
  for (const auto& p : pts) {
    while (k >= 2 && cross(hull[k - 2], hull[k - 1], p) <= 0) --k;
    hull[k++] = p;
  }
  for (std::size_t i = pts.size() - 1, lower = k + 1; i-- > 0;) {
    while (k >= lower && cross(hull[k - 2], hull[k - 1], pts[i]) <= 0) --k;
    hull[k++] = pts[i];
  }
  hull.resize(k - 1);
  if (hull.size() < 3) {
    // All points collinear: keep the two extremes.
    return {pts.front(), pts.back()};
  }
  return hull;
}

bool inside_convex_polygon(std::span<const Point2> polygon, Point2 p) {
  const std::size_t n = polygon.size();
  for (std::size_t i = 0; i < n; ++i)
    if (cross(polygon[i], polygon[(i + 1) % n], p) < 0) return false;
  return true;
}

bool on_segment(Point2 a, Point2 b, Point2 p) {
  if (cross(a, b, p) != 0) return false;
  return std::min(a.x, b.x) <= p.x && p.x <= std::max(a.x, b.x) && std::min(a.y, b.y) <= p.y &&
         p.y <= std::max(a.y, b.y);
}

bool shape_contains(const RegionShape& shape, Point2 p) {
  switch (shape.kind) {
    case RegionShape::Kind::polygon: return inside_convex_polygon(shape.vertices, p);
    case RegionShape::Kind::segment: return on_segment(shape.vertices[0], shape.vertices[1], p);
    case RegionShape::Kind::empty: return false;
  }
  return false;
}

RegionPartition build_partition(const LandmarkSet& landmarks) {
  std::array<RegionShape, kRegionCount> shapes;
  for (RegionId id : kRegions) {
    if (id == RegionId::entire_face) continue;
    const auto range = landmark_range(id);
    const std::span<const Point2> subset(landmarks.points.data() + range.first, range.last - range.first + 1);
    auto& shape = shapes[region_index(id)];
    shape.vertices = convex_hull(subset);
    if (shape.vertices.size() >= 3)
      shape.kind = RegionShape::Kind::polygon;
    else if (shape.vertices.size() == 2)
      shape.kind = RegionShape::Kind::segment;
    else
      shape.kind = RegionShape::Kind::empty;
  }
  return RegionPartition(std::move(shapes));
}

RegionSet assign_regions(Point2 p, const RegionPartition& partition) {
  RegionSet set;
  set.insert(RegionId::entire_face);
  for (std::size_t i = 1; i < kRegionCount; ++i)
    if (shape_contains(partition.shape(kRegions[i]), p)) set.insert(kRegions[i]);
  return set;
}

bool inner_mouth_contained(const RegionPartition& partition) {
  const auto& outer = partition.shape(RegionId::mouth);
  const auto& inner = partition.shape(RegionId::inner_mouth);
  return std::all_of(inner.vertices.begin(), inner.vertices.end(),
                     [&](Point2 p) { return shape_contains(outer, p); });
}

LandmarkSet parse_landmarks(std::string_view json_text) {
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(json_text);
  } catch (const nlohmann::json::parse_error& e) {
    fail(ErrorKind::format, std::string("landmarks: invalid JSON: ") + e.what());
  }
  if (!doc.is_object() || !doc.contains("points") || !doc["points"].is_array())
    fail(ErrorKind::format, "landmarks: expected an object with a \"points\" array");
  const auto& pts = doc["points"];
  if (pts.size() != kLandmarkCount)
    fail(ErrorKind::format, "landmarks: expected 68 points, got " + std::to_string(pts.size()));
  LandmarkSet set;
  for (std::size_t i = 0; i < kLandmarkCount; ++i) {
    const auto& p = pts[i];
    if (!p.is_array() || p.size() != 2 || !p[0].is_number() || !p[1].is_number())
      fail(ErrorKind::format, "landmarks: point " + std::to_string(i) + " is not a numeric [x, y] pair");
    set.points[i] = {p[0].get<double>(), p[1].get<double>()};
    if (!std::isfinite(set.points[i].x) || !std::isfinite(set.points[i].y))
      fail(ErrorKind::format, "landmarks: point " + std::to_string(i) + " is not finite");
  }
  return set;
}

LandmarkSet load_landmarks(const std::string& path) {
  const auto content = text::read_file(path);
  try {
    return parse_landmarks(content);
  } catch (const Error& e) {
    fail(e.kind(), path + ": " + e.what());
  }
}

std::string format_landmarks(const LandmarkSet& landmarks) {
  // Hand-formatted so coordinates keep their shortest round-trip spelling.
  std::string out = "{\"points\": [";
  for (std::size_t i = 0; i < kLandmarkCount; ++i) {
    if (i) out += ", ";
    out += '[';
    text::append_real(out, landmarks.points[i].x);
    out += ", ";
    text::append_real(out, landmarks.points[i].y);
    out += ']';
  }
  out += "]}\n";
  return out;
}

void save_landmarks(const LandmarkSet& landmarks, const std::string& path) {
  text::write_file(path, format_landmarks(landmarks));
}

}  // namespace ffrfd
