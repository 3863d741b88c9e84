#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "ffrfd/pipeline.hpp"
#include "ffrfd/regions.hpp"

namespace ffrfd::cli {

enum ExitCode : int {
  kOk = 0,
  kUsage = 1,
  kDataError = 2,
  kCompatibility = 3,
};

/// Entry point shared by the binary and the tests. argv[0] is the program name.
int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

struct BenchFace {
  GrayImage image;
  LandmarkSet landmarks;
};

struct ConstructionTiming {
  std::string detector;
  std::size_t d = 0;
  std::size_t n_faces = 0;
  std::size_t n_timed = 0;
  double mean_ms = 0.0;
  double median_ms = 0.0;
  double stddev_ms = 0.0;
  std::vector<FfrFd> features;  // one per face, in input order
};

/// Wall time of building one FFR_FD per face (detection, partition, aggregation),
/// excluding the first `warmup` faces from the summary.
ConstructionTiming time_construction(const Detector& detector, const std::vector<BenchFace>& faces, Mode mode,
                                     std::size_t warmup);

}  // namespace ffrfd::cli
