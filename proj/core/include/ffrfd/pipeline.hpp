#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <string_view>
#include <vector>

#include "ffrfd/dataset.hpp"
#include "ffrfd/features.hpp"
#include "ffrfd/fused.hpp"
#include "ffrfd/regions.hpp"

namespace ffrfd {

enum class DetectorKind { fast_brief, orb, external };

std::string_view detector_kind_name(DetectorKind kind);
DetectorKind parse_detector_kind(std::string_view name);

struct DetectorConfig {
  DetectorKind kind = DetectorKind::fast_brief;
  FastBriefParams fast;
  OrbParams orb;
  std::uint64_t pattern_seed = kDefaultPatternSeed;
};

/// Keypoints of one face plus their descriptors, from either a built-in detector
/// (binary descriptors) or an ingested keypoint file (real descriptors).
struct FaceKeypoints {
  std::string detector_name;
  std::size_t d = 0;
  std::vector<DescribedKeypoint> binary;
  std::vector<ExternalKeypoint> external;
  std::size_t dropped = 0;
  bool external_source = false;

  std::vector<Point2> points() const;
};

/// Detector with its sampling patterns built once; safe to share across threads.
class Detector {
 public:
  explicit Detector(DetectorConfig config);

  const DetectorConfig& config() const { return config_; }
  /// Built-in detectors only.
  FaceKeypoints detect(const GrayImage& img) const;
  /// Loads the row's input: a PGM for built-in detectors, a keypoint file for external.
  FaceKeypoints detect_row(const ManifestRow& row, int* width = nullptr, int* height = nullptr) const;
  /// Threshold recorded in stats and provenance (0 for external).
  int threshold() const;
  /// Provenance key/values recorded in feature tables.
  std::map<std::string, std::string> provenance() const;

 private:
  DetectorConfig config_;
  SamplingPattern pattern_;
  SteeredPattern steered_;
};

FfrFd build_face_ffr_fd(const FaceKeypoints& face, const RegionPartition& partition, Mode mode);
RegionCounts face_region_counts(const FaceKeypoints& face, const RegionPartition& partition);

/// Full per-face construction: detection, region partition from landmarks, FFR_FD.
FfrFd construct_ffr_fd(const Detector& detector, const GrayImage& img, const LandmarkSet& landmarks, Mode mode);

struct RowFailure {
  std::string sample_id;
  std::string message;
};

/// Per-class mean keypoint counts over a manifest. Unreadable rows are skipped and
/// counted. Throws Error(data) for an empty manifest or when every row failed.
RegionStats corpus_stats(const DatasetManifest& manifest, const Detector& detector, unsigned n_threads = 1,
                         std::vector<RowFailure>* failures = nullptr);

struct ExtractResult {
  FeatureTable table;
  std::vector<RowFailure> failures;
  std::size_t partition_warnings = 0;
};

/// One FFR_FD row per manifest row, in manifest order. Failed rows are skipped and
/// reported. Rows carry the manifest's split column unchanged.
ExtractResult extract_features(const DatasetManifest& manifest, const Detector& detector, Mode mode,
                               unsigned n_threads = 1);

}  // namespace ffrfd
