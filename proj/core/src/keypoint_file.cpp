#include <cmath>
#include <string>

#include "ffrfd/error.hpp"
#include "ffrfd/features.hpp"
#include "ffrfd/text.hpp"

namespace ffrfd {

namespace {

bool parse_header(std::string_view line, std::string& name, std::size_t& d) {
  const auto fields = text::split_whitespace(line);
  if (fields.size() != 2) return false;
  if (!fields[0].starts_with("detector=") || !fields[1].starts_with("d=")) return false;
  name = std::string(fields[0].substr(9));
  unsigned long long v = 0;
  if (name.empty() || !text::parse_uint(fields[1].substr(2), v) || v == 0) return false;
  d = static_cast<std::size_t>(v);
  return true;
}

}  // namespace

KeypointFile parse_keypoint_file(std::string_view content) {
  KeypointFile file;
  const auto lines = text::split(content, '\n');
  std::size_t i = 0;
  while (i < lines.size() && text::trim(lines[i]).empty()) ++i;
  if (i == lines.size() || !parse_header(text::trim(lines[i]), file.detector_name, file.d))
    fail(ErrorKind::format, "keypoint file: expected header 'detector=<name> d=<int>'");

  for (++i; i < lines.size(); ++i) {
    const auto line = text::trim(lines[i]);
    if (line.empty()) continue;
    const std::string where = "keypoint file line " + std::to_string(i + 1);
    const auto fields = text::split_whitespace(line);
    if (fields.size() != 4 + file.d)
      fail(ErrorKind::format, where + ": expected " + std::to_string(file.d) + " descriptor values, got " +
                                  std::to_string(fields.size() < 4 ? 0 : fields.size() - 4));
    ExternalKeypoint kp;
    double* head[4] = {&kp.x, &kp.y, &kp.score, &kp.orientation};
    for (std::size_t k = 0; k < 4; ++k)
      if (!text::parse_real(fields[k], *head[k]) || !std::isfinite(*head[k]))
        fail(ErrorKind::format, where + ": malformed value '" + std::string(fields[k]) + "'");
    kp.descriptor.resize(file.d);
    for (std::size_t k = 0; k < file.d; ++k)
      if (!text::parse_real(fields[4 + k], kp.descriptor[k]) || !std::isfinite(kp.descriptor[k]))
        fail(ErrorKind::format, where + ": malformed value '" + std::string(fields[4 + k]) + "'");
    file.entries.push_back(std::move(kp));
  }
  return file;
}

KeypointFile ingest_keypoint_file(const std::string& path) {
  const auto content = text::read_file(path);
  try {
    return parse_keypoint_file(content);
  } catch (const Error& e) {
    fail(e.kind(), path + ": " + e.what());
  }
}

std::string format_keypoint_file(const KeypointFile& file) {
  if (file.detector_name.empty() || file.detector_name.find_first_of(" \t\n") != std::string::npos)
    fail(ErrorKind::data, "detector name must be a non-empty token");
  std::string out = "detector=" + file.detector_name + " d=" + std::to_string(file.d) + "\n";
  for (const auto& e : file.entries) {
    if (e.descriptor.size() != file.d) fail(ErrorKind::data, "descriptor length does not match d");
    text::append_real(out, e.x);
    for (double v : {e.y, e.score, e.orientation}) {
      out += ' ';
      text::append_real(out, v);
    }
    for (double v : e.descriptor) {
      out += ' ';
      text::append_real(out, v);
    }
    out += '\n';
  }
  return out;
}

void write_keypoint_file(const KeypointFile& file, const std::string& path) {
  text::write_file(path, format_keypoint_file(file));
}

}  // namespace ffrfd
