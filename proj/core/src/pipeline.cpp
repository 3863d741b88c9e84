#include "ffrfd/pipeline.hpp"

#include <algorithm>
#include <optional>

#include "ffrfd/error.hpp"
#include "ffrfd/parallel.hpp"
#include "ffrfd/text.hpp"

namespace ffrfd {

namespace {

constexpr int kMinFaceSide = 32;

}  // namespace

std::string_view detector_kind_name(DetectorKind kind) {
  switch (kind) {
    case DetectorKind::fast_brief: return "fast_brief";
    case DetectorKind::orb: return "orb";
    case DetectorKind::external: return "external";
  }
  return "unknown";
}

DetectorKind parse_detector_kind(std::string_view name) {
  if (name == "fast_brief") return DetectorKind::fast_brief;
  if (name == "orb") return DetectorKind::orb;
  if (name == "external") return DetectorKind::external;
  fail(ErrorKind::data, "unknown detector '" + std::string(name) + "' (expected fast_brief, orb or external)");
}

std::vector<Point2> FaceKeypoints::points() const {
  std::vector<Point2> out;
  out.reserve(binary.size() + external.size());
  for (const auto& f : binary) out.push_back(to_point(f.keypoint));
  for (const auto& e : external) out.push_back(to_point(e));
  return out;
}

Detector::Detector(DetectorConfig config)
    : config_(config), pattern_(SamplingPattern::generate(config.pattern_seed)), steered_(pattern_) {
  if (config_.orb.n_top < 1) fail(ErrorKind::data, "ORB n_top must be >= 1");
  for (int t : {config_.fast.threshold, config_.orb.threshold})
    if (t < 1 || t > 254) fail(ErrorKind::data, "FAST threshold must be in [1, 254]");
}

FaceKeypoints Detector::detect(const GrayImage& img) const {
  FaceKeypoints face;
  face.d = pattern_.n_pairs() / 8;
  Extraction ex;
  switch (config_.kind) {
    case DetectorKind::fast_brief: ex = fast_brief_detect_describe(img, config_.fast, pattern_); break;
    case DetectorKind::orb: ex = orb_detect_describe(img, config_.orb, steered_); break;
    case DetectorKind::external: fail(ErrorKind::data, "external detector has no image path; use detect_row");
  }
  face.detector_name = std::string(detector_kind_name(config_.kind));
  face.binary = std::move(ex.features);
  face.dropped = ex.dropped;
  return face;
}

FaceKeypoints Detector::detect_row(const ManifestRow& row, int* width, int* height) const {
  if (config_.kind == DetectorKind::external) {
    auto file = ingest_keypoint_file(row.image_path);
    FaceKeypoints face;
    face.detector_name = std::move(file.detector_name);
    face.d = file.d;
    face.external = std::move(file.entries);
    face.external_source = true;
    return face;
  }
  const auto img = load_pgm(row.image_path);
  if (img.width() < kMinFaceSide || img.height() < kMinFaceSide)
    fail(ErrorKind::data, row.image_path + ": face crops must be at least 32x32");
  if (width) *width = img.width();
  if (height) *height = img.height();
  return detect(img);
}

int Detector::threshold() const {
  switch (config_.kind) {
    case DetectorKind::fast_brief: return config_.fast.threshold;
    case DetectorKind::orb: return config_.orb.threshold;
    case DetectorKind::external: break;
  }
  return 0;
}

std::map<std::string, std::string> Detector::provenance() const {
  std::map<std::string, std::string> meta;
  meta["source"] = std::string(detector_kind_name(config_.kind));
  if (config_.kind == DetectorKind::external) return meta;
  meta["pattern_seed"] = std::to_string(config_.pattern_seed);
  meta["fast_threshold"] = std::to_string(threshold());
  const auto& blur_sigma = config_.kind == DetectorKind::orb ? config_.orb.blur_sigma : config_.fast.blur_sigma;
  const auto& blur_kernel = config_.kind == DetectorKind::orb ? config_.orb.blur_kernel : config_.fast.blur_kernel;
  meta["blur_sigma"] = text::format_real(blur_sigma);
  meta["blur_kernel"] = std::to_string(blur_kernel);
  if (config_.kind == DetectorKind::orb) meta["n_top"] = std::to_string(config_.orb.n_top);
  return meta;
}

FfrFd build_face_ffr_fd(const FaceKeypoints& face, const RegionPartition& partition, Mode mode) {
  if (face.external_source) return build_ffr_fd(face.external, face.d, partition, mode, face.detector_name);
  return build_ffr_fd(face.binary, face.d, partition, mode, face.detector_name);
}

RegionCounts face_region_counts(const FaceKeypoints& face, const RegionPartition& partition) {
  return region_counts(face.points(), partition);
}

FfrFd construct_ffr_fd(const Detector& detector, const GrayImage& img, const LandmarkSet& landmarks, Mode mode) {
  const auto face = detector.detect(img);
  return build_face_ffr_fd(face, build_partition(landmarks), mode);
}

RegionStats corpus_stats(const DatasetManifest& manifest, const Detector& detector, unsigned n_threads,
                         std::vector<RowFailure>* failures) {
  if (manifest.rows.empty()) fail(ErrorKind::data, "manifest is empty");
  struct RowResult {
    RegionCounts counts{};
    std::size_t dropped = 0;
    int width = 0, height = 0;
    std::string detector_name;
    std::string error;
    bool ok = false;
  };
  std::vector<RowResult> results(manifest.rows.size());
  parallel_for(results.size(), n_threads, [&](std::size_t i) {
    auto& r = results[i];
    try {
      const auto face = detector.detect_row(manifest.rows[i], &r.width, &r.height);
      const auto partition = build_partition(load_landmarks(manifest.rows[i].landmarks_path));
      r.counts = face_region_counts(face, partition);
      r.dropped = face.dropped;
      r.detector_name = face.detector_name;
      r.ok = true;
    } catch (const Error& e) {
      r.error = e.what();
    }
  });

  RegionStats stats;
  stats.detector_name = std::string(detector_kind_name(detector.config().kind));
  stats.threshold = detector.threshold();
  std::array<std::size_t, kRegionCount> real_sum{}, fake_sum{};
  bool first_dims = true;
  for (std::size_t i = 0; i < results.size(); ++i) {
    const auto& r = results[i];
    if (!r.ok) {
      ++stats.skipped_files;
      if (failures) failures->push_back({manifest.rows[i].sample_id, r.error});
      continue;
    }
    if (stats.n_real + stats.n_fake == 0) stats.detector_name = r.detector_name;
    const bool fake = manifest.rows[i].label == Label::fake;
    auto& sum = fake ? fake_sum : real_sum;
    ++(fake ? stats.n_fake : stats.n_real);
    for (std::size_t k = 0; k < kRegionCount; ++k) sum[k] += r.counts[k];
    stats.dropped_keypoints += r.dropped;
    if (r.width > 0) {
      if (first_dims) {
        stats.min_width = stats.max_width = r.width;
        stats.min_height = stats.max_height = r.height;
        first_dims = false;
      }
      stats.min_width = std::min(stats.min_width, r.width);
      stats.max_width = std::max(stats.max_width, r.width);
      stats.min_height = std::min(stats.min_height, r.height);
      stats.max_height = std::max(stats.max_height, r.height);
    }
  }
  if (stats.n_real + stats.n_fake == 0) fail(ErrorKind::data, "no manifest row could be processed");
  for (std::size_t k = 0; k < kRegionCount; ++k) {
    stats.real_mean[k] = stats.n_real ? static_cast<double>(real_sum[k]) / static_cast<double>(stats.n_real) : 0.0;
    stats.fake_mean[k] = stats.n_fake ? static_cast<double>(fake_sum[k]) / static_cast<double>(stats.n_fake) : 0.0;
  }
  return stats;
}

ExtractResult extract_features(const DatasetManifest& manifest, const Detector& detector, Mode mode,
                               unsigned n_threads) {
  struct RowResult {
    std::optional<FfrFd> features;
    bool partition_warning = false;
    std::string error;
  };
  std::vector<RowResult> results(manifest.rows.size());
  parallel_for(results.size(), n_threads, [&](std::size_t i) {
    auto& r = results[i];
    try {
      const auto face = detector.detect_row(manifest.rows[i]);
      const auto partition = build_partition(load_landmarks(manifest.rows[i].landmarks_path));
      r.partition_warning = !inner_mouth_contained(partition);
      r.features = build_face_ffr_fd(face, partition, mode);
    } catch (const Error& e) {
      r.error = e.what();
    }
  });

  ExtractResult out;
  out.table.meta = detector.provenance();
  for (std::size_t i = 0; i < results.size(); ++i) {
    auto& r = results[i];
    const auto& row = manifest.rows[i];
    if (!r.features) {
      out.failures.push_back({row.sample_id, r.error});
      continue;
    }
    if (!out.table.rows.empty()) {
      const auto& ref = out.table.rows.front().features;
      if (ref.detector_name != r.features->detector_name || ref.d != r.features->d) {
        out.failures.push_back({row.sample_id, "detector/d differs from earlier rows (" + r.features->detector_name +
                                                   ", d=" + std::to_string(r.features->d) + ")"});
        continue;
      }
    }
    out.partition_warnings += r.partition_warning;
    out.table.rows.push_back({row.sample_id, row.label, row.video_id, row.split, std::move(*r.features)});
  }
  return out;
}

}  // namespace ffrfd
