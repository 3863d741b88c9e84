#pragma once

#include <filesystem>
#include <string>

#include <gtest/gtest.h>
#include <unistd.h>

#include "ffrfd/error.hpp"

namespace testing_support {

/// Unique scratch directory removed on destruction.
class TempDir {
 public:
  explicit TempDir(const std::string& tag) {
    static int counter = 0;
    path_ = std::filesystem::temp_directory_path() /
            ("ffrfd_test_" + tag + "_" + std::to_string(::getpid()) + "_" + std::to_string(counter++));
    std::filesystem::remove_all(path_);
    std::filesystem::create_directories(path_);
  }
  ~TempDir() {
    std::error_code ec;
    std::filesystem::remove_all(path_, ec);
  }
  TempDir(const TempDir&) = delete;
  TempDir& operator=(const TempDir&) = delete;

  std::string file(const std::string& name) const { return (path_ / name).string(); }
  const std::filesystem::path& path() const { return path_; }

 private:
  std::filesystem::path path_;
};

struct Caught {
  bool thrown = false;
  ffrfd::ErrorKind kind = ffrfd::ErrorKind::data;
  std::string message;
};

template <typename Fn>
Caught catch_error(Fn&& fn) {
  try {
    fn();
  } catch (const ffrfd::Error& e) {
    return {true, e.kind(), e.what()};
  }
  return {};
}

template <typename Fn>
ffrfd::ErrorKind kind_of(Fn&& fn) {
  const auto c = catch_error(fn);
  if (!c.thrown) ADD_FAILURE() << "expected an ffrfd::Error";
  return c.kind;
}

template <typename Fn>
std::string message_of(Fn&& fn) {
  const auto c = catch_error(fn);
  if (!c.thrown) ADD_FAILURE() << "expected an ffrfd::Error";
  return c.message;
}

inline bool contains(const std::string& haystack, const std::string& needle) {
  return haystack.find(needle) != std::string::npos;
}

}  // namespace testing_support
