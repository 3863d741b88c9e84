#pragma once

#include <string>
#include <string_view>
#include <vector>

namespace ffrfd::text {

/// Shortest decimal that parses back to the same double.
std::string format_real(double v);
void append_real(std::string& out, double v);

/// Strict parsers: the whole token must be consumed. Return false on failure.
bool parse_real(std::string_view token, double& out);
bool parse_int(std::string_view token, long long& out);
bool parse_uint(std::string_view token, unsigned long long& out);

std::vector<std::string_view> split(std::string_view line, char sep);
std::vector<std::string_view> split_whitespace(std::string_view line);
std::string_view trim(std::string_view s);

/// Reads a whole file; throws Error(io) on failure.
std::string read_file(const std::string& path);
/// Writes a whole file; throws Error(io) on failure.
void write_file(const std::string& path, std::string_view content);

}  // namespace ffrfd::text
