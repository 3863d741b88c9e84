#include "ffrfd/fused.hpp"

#include <algorithm>
#include <tuple>

#include "ffrfd/error.hpp"
#include "ffrfd/text.hpp"

namespace ffrfd {

std::string_view mode_name(Mode mode) { return mode == Mode::ave ? "ave" : "no_ave"; }

Mode parse_mode(std::string_view name) {
  if (name == "ave") return Mode::ave;
  if (name == "no_ave") return Mode::no_ave;
  fail(ErrorKind::data, "unknown mode '" + std::string(name) + "' (expected ave or no_ave)");
}

std::vector<std::uint64_t> accumulate_fd_r(std::span<const BinaryDescriptor* const> descriptors, std::size_t d) {
  std::vector<std::uint64_t> sum(d, 0);
  for (const auto* desc : descriptors) {
    if (desc->size() != d)
      fail(ErrorKind::data, "ragged descriptors: expected " + std::to_string(d) + " bytes, got " +
                                std::to_string(desc->size()));
    const auto bytes = desc->bytes();
    for (std::size_t i = 0; i < d; ++i) sum[i] += bytes[i];
  }
  return sum;
}

std::vector<double> accumulate_fd_r(std::span<const std::vector<double>* const> descriptors, std::size_t d) {
  std::vector<double> sum(d, 0.0);
  for (const auto* desc : descriptors) {
    if (desc->size() != d)
      fail(ErrorKind::data, "ragged descriptors: expected length " + std::to_string(d) + ", got " +
                                std::to_string(desc->size()));
    for (std::size_t i = 0; i < d; ++i) sum[i] += (*desc)[i];
  }
  return sum;
}

namespace {

template <typename Sum>
void write_segment(FfrFd& out, RegionId id, const std::vector<Sum>& sum, std::size_t count) {
  auto* seg = out.values.data() + region_index(id) * out.d;
  if (count == 0) return;  // zero-fill
  for (std::size_t i = 0; i < out.d; ++i) {
    const double v = static_cast<double>(sum[i]);
    seg[i] = out.mode == Mode::ave ? v / static_cast<double>(count) : v;
  }
}

FfrFd empty_ffr_fd(std::size_t d, Mode mode, std::string detector_name) {
  if (d == 0) fail(ErrorKind::data, "descriptor dimension must be >= 1");
  FfrFd out;
  out.d = d;
  out.mode = mode;
  out.detector_name = std::move(detector_name);
  out.values.assign(kRegionCount * d, 0.0);
  return out;
}

}  // namespace

FfrFd build_ffr_fd(std::span<const DescribedKeypoint> features, std::size_t d, const RegionPartition& partition,
                   Mode mode, std::string detector_name) {
  FfrFd out = empty_ffr_fd(d, mode, std::move(detector_name));
  std::array<std::vector<const BinaryDescriptor*>, kRegionCount> members;
  for (const auto& f : features) {
    const auto set = assign_regions(to_point(f.keypoint), partition);
    for (RegionId id : kRegions)
      if (set.contains(id)) members[region_index(id)].push_back(&f.descriptor);
  }
  for (RegionId id : kRegions) {
    const auto& m = members[region_index(id)];
    write_segment(out, id, accumulate_fd_r(m, d), m.size());
  }
  return out;
}

FfrFd build_ffr_fd(std::span<const ExternalKeypoint> features, std::size_t d, const RegionPartition& partition,
                   Mode mode, std::string detector_name) {
  FfrFd out = empty_ffr_fd(d, mode, std::move(detector_name));
  for (const auto& f : features)
    if (f.descriptor.size() != d) fail(ErrorKind::data, "ragged descriptors in external keypoint set");

  // Floating-point sums depend on order, so members are summed in a canonical order.
  std::vector<const ExternalKeypoint*> order;
  order.reserve(features.size());
  for (const auto& f : features) order.push_back(&f);
  std::sort(order.begin(), order.end(), [](const ExternalKeypoint* a, const ExternalKeypoint* b) {
    return std::tie(a->y, a->x, a->descriptor, a->score, a->orientation) <
           std::tie(b->y, b->x, b->descriptor, b->score, b->orientation);
  });

  std::array<std::vector<const std::vector<double>*>, kRegionCount> members;
  for (const auto* f : order) {
    const auto set = assign_regions(to_point(*f), partition);
    for (RegionId id : kRegions)
      if (set.contains(id)) members[region_index(id)].push_back(&f->descriptor);
  }
  for (RegionId id : kRegions) {
    const auto& m = members[region_index(id)];
    write_segment(out, id, accumulate_fd_r(m, d), m.size());
  }
  return out;
}

RegionCounts region_counts(std::span<const Point2> points, const RegionPartition& partition) {
  RegionCounts counts{};
  for (const auto& p : points) {
    const auto set = assign_regions(p, partition);
    for (RegionId id : kRegions)
      if (set.contains(id)) ++counts[region_index(id)];
  }
  return counts;
}

DimensionDiff dimension_diff(std::span<const FfrFd> real, std::span<const FfrFd> fake) {
  if (real.empty() || fake.empty()) fail(ErrorKind::data, "dimension_diff needs at least one real and one fake sample");
  const auto& ref = real.front();
  auto check = [&](const FfrFd& f) {
    if (f.mode != ref.mode) fail(ErrorKind::compatibility, "dimension_diff: mixed ave/no_ave features");
    if (f.d != ref.d || f.values.size() != ref.values.size())
      fail(ErrorKind::compatibility, "dimension_diff: mismatched descriptor dimension");
    if (f.detector_name != ref.detector_name) fail(ErrorKind::compatibility, "dimension_diff: mixed detectors");
  };

  const std::size_t n = ref.values.size();
  // Welford running moments per dimension.
  auto moments = [&](std::span<const FfrFd> set, std::vector<double>& mean, std::vector<double>& var) {
    mean.assign(n, 0.0);
    std::vector<double> m2(n, 0.0);
    std::size_t k = 0;
    for (const auto& f : set) {
      check(f);
      ++k;
      for (std::size_t i = 0; i < n; ++i) {
        const double delta = f.values[i] - mean[i];
        mean[i] += delta / static_cast<double>(k);
        m2[i] += delta * (f.values[i] - mean[i]);
      }
    }
    var.resize(n);
    for (std::size_t i = 0; i < n; ++i) var[i] = m2[i] / static_cast<double>(k);
  };

  std::vector<double> mr, vr, mf, vf;
  moments(real, mr, vr);
  moments(fake, mf, vf);
  DimensionDiff diff;
  diff.d = ref.d;
  diff.mean_diff.resize(n);
  diff.var_diff.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    diff.mean_diff[i] = mr[i] - mf[i];
    diff.var_diff[i] = vr[i] - vf[i];
  }
  return diff;
}

std::string format_region_stats_csv(const RegionStats& stats) {
  std::string out = "region,real,fake\n";
  for (RegionId id : kRegions) {
    out += region_name(id);
    out += ',';
    text::append_real(out, stats.real_mean[region_index(id)]);
    out += ',';
    text::append_real(out, stats.fake_mean[region_index(id)]);
    out += '\n';
  }
  out += "# detector=" + stats.detector_name + " threshold=" + std::to_string(stats.threshold) +
         " n_real=" + std::to_string(stats.n_real) + " n_fake=" + std::to_string(stats.n_fake) +
         " dropped_keypoints=" + std::to_string(stats.dropped_keypoints) +
         " skipped_files=" + std::to_string(stats.skipped_files) + " image_width=" + std::to_string(stats.min_width) +
         "-" + std::to_string(stats.max_width) + " image_height=" + std::to_string(stats.min_height) + "-" +
         std::to_string(stats.max_height) + "\n";
  return out;
}

}  // namespace ffrfd
