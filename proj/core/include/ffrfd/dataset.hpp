#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <string_view>
#include <vector>

#include "ffrfd/fused.hpp"

namespace ffrfd {

/// Fake is the positive class everywhere (scores are P(fake)).
enum class Label : std::uint8_t { real = 0, fake = 1 };
enum class Split : std::uint8_t { unassigned, train, test };

std::string_view label_name(Label label);
Label parse_label(std::string_view name);
std::string_view split_name(Split split);
/// Empty string parses as unassigned.
Split parse_split(std::string_view name);

struct ManifestRow {
  std::string sample_id;
  std::string image_path;
  std::string landmarks_path;
  Label label = Label::real;
  std::string video_id;
  Split split = Split::unassigned;

  bool operator==(const ManifestRow&) const = default;
};

/// CSV `sample_id,image_path,landmarks_path,label,video_id,split`. Relative paths
/// are resolved against the manifest's directory when loaded from a file.
struct DatasetManifest {
  std::vector<ManifestRow> rows;

  bool operator==(const DatasetManifest&) const = default;
};

inline constexpr std::string_view kManifestHeader = "sample_id,image_path,landmarks_path,label,video_id,split";

DatasetManifest parse_manifest(std::string_view csv);
DatasetManifest load_manifest(const std::string& path);
std::string format_manifest(const DatasetManifest& manifest);
void save_manifest(const DatasetManifest& manifest, const std::string& path);

struct FeatureRow {
  std::string sample_id;
  Label label = Label::real;
  std::string video_id;
  Split split = Split::unassigned;
  FfrFd features;

  bool operator==(const FeatureRow&) const = default;
};

/// CSV `sample_id,label,video_id,split,detector,mode,d,f0..f{8d-1}`, preceded by
/// optional `# key=value ...` provenance lines (pattern seed, threshold, ...).
struct FeatureTable {
  std::map<std::string, std::string> meta;
  std::vector<FeatureRow> rows;

  bool operator==(const FeatureTable&) const = default;
};

FeatureTable parse_feature_table(std::string_view csv);
FeatureTable load_feature_table(const std::string& path);
std::string format_feature_table(const FeatureTable& table);
void save_feature_table(const FeatureTable& table, const std::string& path);

}  // namespace ffrfd
