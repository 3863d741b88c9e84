#pragma once

#include <stdexcept>
#include <string>

namespace ffrfd {

enum class ErrorKind {
  io,             // file missing, unreadable or unwritable
  format,         // malformed input file
  data,           // well-formed input that violates a precondition
  compatibility,  // artifacts produced under different detector/mode/d
};

/// Single exception type for the library. The kind drives CLI exit codes.
class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what) : std::runtime_error(what), kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

[[noreturn]] inline void fail(ErrorKind kind, const std::string& what) { throw Error(kind, what); }

}  // namespace ffrfd
