#include "ffrfd/dataset.hpp"

#include <cmath>
#include <filesystem>
#include <set>

#include "ffrfd/error.hpp"
#include "ffrfd/text.hpp"

namespace ffrfd {

std::string_view label_name(Label label) { return label == Label::fake ? "fake" : "real"; }

Label parse_label(std::string_view name) {
  if (name == "real") return Label::real;
  if (name == "fake") return Label::fake;
  fail(ErrorKind::format, "invalid label '" + std::string(name) + "' (expected real or fake)");
}

std::string_view split_name(Split split) {
  switch (split) {
    case Split::train: return "train";
    case Split::test: return "test";
    case Split::unassigned: break;
  }
  return "unassigned";
}

Split parse_split(std::string_view name) {
  if (name.empty() || name == "unassigned") return Split::unassigned;
  if (name == "train") return Split::train;
  if (name == "test") return Split::test;
  fail(ErrorKind::format, "invalid split '" + std::string(name) + "'");
}

namespace {

std::vector<std::string_view> data_lines(std::string_view content) {
  std::vector<std::string_view> out;
  for (auto line : text::split(content, '\n')) {
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    out.push_back(line);
  }
  while (!out.empty() && out.back().empty()) out.pop_back();
  return out;
}

void check_field(std::string_view v, const std::string& where) {
  if (v.find_first_of(",\n\"") != std::string_view::npos)
    fail(ErrorKind::data, where + ": field '" + std::string(v) + "' contains a CSV delimiter");
}

}  // namespace

DatasetManifest parse_manifest(std::string_view csv) {
  const auto lines = data_lines(csv);
  if (lines.empty() || text::trim(lines[0]) != kManifestHeader)
    fail(ErrorKind::format, "manifest: expected header '" + std::string(kManifestHeader) + "'");
  DatasetManifest manifest;
  std::set<std::string, std::less<>> ids;
  for (std::size_t i = 1; i < lines.size(); ++i) {
    if (text::trim(lines[i]).empty()) continue;
    const std::string where = "manifest line " + std::to_string(i + 1);
    const auto f = text::split(lines[i], ',');
    if (f.size() != 6) fail(ErrorKind::format, where + ": expected 6 fields, got " + std::to_string(f.size()));
    ManifestRow row;
    row.sample_id = std::string(f[0]);
    row.image_path = std::string(f[1]);
    row.landmarks_path = std::string(f[2]);
    try {
      row.label = parse_label(f[3]);
      row.split = parse_split(f[5]);
    } catch (const Error& e) {
      fail(ErrorKind::format, where + ": " + e.what());
    }
    row.video_id = std::string(f[4]);
    if (row.sample_id.empty()) fail(ErrorKind::format, where + ": empty sample_id");
    if (!ids.insert(row.sample_id).second) fail(ErrorKind::format, where + ": duplicate sample_id '" + row.sample_id + "'");
    manifest.rows.push_back(std::move(row));
  }
  return manifest;
}

DatasetManifest load_manifest(const std::string& path) {
  auto manifest = [&] {
    const auto content = text::read_file(path);
    try {
      return parse_manifest(content);
    } catch (const Error& e) {
      fail(e.kind(), path + ": " + e.what());
    }
  }();
  const auto base = std::filesystem::path(path).parent_path();
  auto resolve = [&](std::string& p) {
    if (!p.empty() && std::filesystem::path(p).is_relative()) p = (base / p).lexically_normal().string();
  };
  for (auto& row : manifest.rows) {
    resolve(row.image_path);
    resolve(row.landmarks_path);
  }
  return manifest;
}

std::string format_manifest(const DatasetManifest& manifest) {
  std::string out(kManifestHeader);
  out += '\n';
  for (const auto& r : manifest.rows) {
    for (const auto* v : {&r.sample_id, &r.image_path, &r.landmarks_path, &r.video_id}) check_field(*v, "manifest");
    out += r.sample_id + ',' + r.image_path + ',' + r.landmarks_path + ',' + std::string(label_name(r.label)) + ',' +
           r.video_id + ',' + std::string(split_name(r.split)) + '\n';
  }
  return out;
}

void save_manifest(const DatasetManifest& manifest, const std::string& path) {
  text::write_file(path, format_manifest(manifest));
}

FeatureTable parse_feature_table(std::string_view csv) {
  const auto lines = data_lines(csv);
  FeatureTable table;
  std::size_t i = 0;
  for (; i < lines.size() && lines[i].starts_with('#'); ++i) {
    for (auto tok : text::split_whitespace(lines[i].substr(1))) {
      const auto eq = tok.find('=');
      if (eq == std::string_view::npos) continue;
      table.meta[std::string(tok.substr(0, eq))] = std::string(tok.substr(eq + 1));
    }
  }
  if (i == lines.size()) fail(ErrorKind::format, "feature table: missing header");
  const auto header = text::split(lines[i], ',');
  const std::vector<std::string_view> fixed{"sample_id", "label", "video_id", "split", "detector", "mode", "d"};
  if (header.size() < fixed.size() + 1 || !std::equal(fixed.begin(), fixed.end(), header.begin()))
    fail(ErrorKind::format, "feature table: unexpected header");
  const std::size_t n_features = header.size() - fixed.size();
  for (std::size_t k = 0; k < n_features; ++k)
    if (header[fixed.size() + k] != "f" + std::to_string(k))
      fail(ErrorKind::format, "feature table: unexpected feature column '" + std::string(header[fixed.size() + k]) + "'");
  if (n_features % kRegionCount != 0)
    fail(ErrorKind::format, "feature table: feature count is not a multiple of 8");

  for (++i; i < lines.size(); ++i) {
    if (text::trim(lines[i]).empty()) continue;
    const std::string where = "feature table line " + std::to_string(i + 1);
    const auto f = text::split(lines[i], ',');
    if (f.size() != header.size()) fail(ErrorKind::format, where + ": wrong number of fields");
    FeatureRow row;
    row.sample_id = std::string(f[0]);
    row.video_id = std::string(f[2]);
    try {
      row.label = parse_label(f[1]);
      row.split = parse_split(f[3]);
      row.features.mode = parse_mode(f[5]);
    } catch (const Error& e) {
      fail(ErrorKind::format, where + ": " + e.what());
    }
    row.features.detector_name = std::string(f[4]);
    unsigned long long d = 0;
    if (!text::parse_uint(f[6], d) || d * kRegionCount != n_features)
      fail(ErrorKind::format, where + ": d does not match the feature column count");
    row.features.d = static_cast<std::size_t>(d);
    row.features.values.resize(n_features);
    for (std::size_t k = 0; k < n_features; ++k)
      if (!text::parse_real(f[7 + k], row.features.values[k]) || !std::isfinite(row.features.values[k]))
        fail(ErrorKind::format, where + ": malformed feature value f" + std::to_string(k));
    if (!table.rows.empty()) {
      const auto& first = table.rows.front().features;
      if (first.detector_name != row.features.detector_name || first.mode != row.features.mode)
        fail(ErrorKind::compatibility, where + ": mixed detector/mode within one feature table");
    }
    table.rows.push_back(std::move(row));
  }
  return table;
}

FeatureTable load_feature_table(const std::string& path) {
  const auto content = text::read_file(path);
  try {
    return parse_feature_table(content);
  } catch (const Error& e) {
    fail(e.kind(), path + ": " + e.what());
  }
}

std::string format_feature_table(const FeatureTable& table) {
  std::string out;
  if (!table.meta.empty()) {
    out += '#';
    for (const auto& [k, v] : table.meta) out += ' ' + k + '=' + v;
    out += '\n';
  }
  std::size_t n_features = table.rows.empty() ? 0 : table.rows.front().features.values.size();
  out += "sample_id,label,video_id,split,detector,mode,d";
  for (std::size_t k = 0; k < n_features; ++k) out += ",f" + std::to_string(k);
  out += '\n';
  for (const auto& r : table.rows) {
    if (r.features.values.size() != n_features) fail(ErrorKind::data, "feature table rows differ in length");
    check_field(r.sample_id, "feature table");
    check_field(r.video_id, "feature table");
    out += r.sample_id + ',' + std::string(label_name(r.label)) + ',' + r.video_id + ',' +
           std::string(split_name(r.split)) + ',' + r.features.detector_name + ',' +
           std::string(mode_name(r.features.mode)) + ',' + std::to_string(r.features.d);
    for (double v : r.features.values) {
      out += ',';
      text::append_real(out, v);
    }
    out += '\n';
  }
  return out;
}

void save_feature_table(const FeatureTable& table, const std::string& path) {
  text::write_file(path, format_feature_table(table));
}

}  // namespace ffrfd
