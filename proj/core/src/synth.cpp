#include "ffrfd/synth.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <numbers>

#include "ffrfd/error.hpp"
#include "ffrfd/rng.hpp"

namespace ffrfd::synth {

namespace {

constexpr int kCell = 3;
constexpr double kBlurPad = 4.0;

void ellipse(LandmarkSet& lm, std::size_t first, std::size_t count, double cx, double cy, double rx, double ry) {
  // Starts at the left corner and runs clockwise over the top, as iBUG does.
  for (std::size_t k = 0; k < count; ++k) {
    const double a = std::numbers::pi + 2.0 * std::numbers::pi * static_cast<double>(k) / static_cast<double>(count);
    lm.points[first + k] = {cx + rx * std::cos(a), cy + ry * std::sin(a)};
  }
}

}  // namespace

LandmarkSet template_landmarks(int size) {
  LandmarkSet lm;
  const double pi = std::numbers::pi;
  for (std::size_t i = 0; i <= 16; ++i) {
    const double a = pi * static_cast<double>(i) / 16.0;
    lm.points[i] = {0.5 - 0.37 * std::cos(a), 0.42 + 0.48 * std::sin(a)};
  }
  for (std::size_t k = 0; k < 5; ++k) {
    const double arch = 0.035 * std::sin(pi * static_cast<double>(k) / 4.0);
    lm.points[17 + k] = {0.20 + 0.055 * static_cast<double>(k), 0.29 - arch};
    lm.points[22 + k] = {0.58 + 0.055 * static_cast<double>(k), 0.29 - arch};
  }
  for (std::size_t k = 0; k < 4; ++k) lm.points[27 + k] = {0.5, 0.38 + 0.06 * static_cast<double>(k)};
  for (std::size_t k = 0; k < 5; ++k) {
    const double dx = -0.07 + 0.035 * static_cast<double>(k);
    lm.points[31 + k] = {0.5 + dx, 0.61 + (k == 2 ? 0.015 : 0.0)};
  }
  ellipse(lm, 36, 6, 0.32, 0.40, 0.075, 0.032);
  ellipse(lm, 42, 6, 0.68, 0.40, 0.075, 0.032);
  ellipse(lm, 48, 12, 0.50, 0.76, 0.15, 0.065);
  ellipse(lm, 60, 8, 0.50, 0.76, 0.095, 0.028);
  for (auto& p : lm.points) p = {p.x * size, p.y * size};
  return lm;
}

GrayImage texture(int size, std::uint64_t seed) {
  Rng rng(seed);
  const int cells = (size + kCell - 1) / kCell + 1;
  std::vector<int> value(static_cast<std::size_t>(cells) * cells);
  for (auto& v : value) v = 30 + static_cast<int>(rng.below(196));
  // Low-frequency shading so the texture is not stationary.
  const double gx = rng.uniform(-20.0, 20.0), gy = rng.uniform(-20.0, 20.0);
  GrayImage img(size, size);
  for (int y = 0; y < size; ++y) {
    for (int x = 0; x < size; ++x) {
      const double shade = gx * (x / double(size) - 0.5) + gy * (y / double(size) - 0.5);
      const int v = value[static_cast<std::size_t>(y / kCell) * cells + x / kCell] + static_cast<int>(std::lround(shade));
      img.at(x, y) = static_cast<std::uint8_t>(std::clamp(v, 0, 255));
    }
  }
  return img;
}

std::size_t corpus_size(const SynthParams& params) { return params.n_real + params.n_fake; }

SynthFace make_face(const SynthParams& params, std::size_t index) {
  if (index >= corpus_size(params)) fail(ErrorKind::data, "synthetic face index out of range");
  if (params.frames_per_video == 0) fail(ErrorKind::data, "frames_per_video must be >= 1");
  if (params.size < 64) fail(ErrorKind::data, "synthetic faces must be at least 64x64");

  SynthFace face;
  face.label = index < params.n_real ? Label::real : Label::fake;
  const std::size_t local = face.label == Label::real ? index : index - params.n_real;
  const std::size_t video = local / params.frames_per_video;
  const std::size_t frame = local % params.frames_per_video;
  const char* prefix = face.label == Label::real ? "real" : "fake";
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%s_v%04zu", prefix, video);
  face.video_id = buf;
  std::snprintf(buf, sizeof(buf), "%s_v%04zu_f%02zu", prefix, video, frame);
  face.sample_id = buf;

  const std::uint64_t video_seed = derive_seed(params.seed, (face.label == Label::fake ? 1ull << 40 : 0) + video);
  Rng vrng(video_seed);
  Rng frng(derive_seed(video_seed, frame + 1));

  // Identity: a texture rendered with a margin so frames can shift within it.
  const int pad = 2;
  const auto base = texture(params.size + 2 * pad, video_seed);
  const int ox = pad + static_cast<int>(frng.below(3)) - 1;
  const int oy = pad + static_cast<int>(frng.below(3)) - 1;
  face.image = GrayImage(params.size, params.size);
  for (int y = 0; y < params.size; ++y)
    for (int x = 0; x < params.size; ++x) {
      const int v = base.at(x + ox, y + oy) + static_cast<int>(std::lround(frng.normal() * 2.0));
      face.image.at(x, y) = static_cast<std::uint8_t>(std::clamp(v, 0, 255));
    }

  const double scale = vrng.uniform(0.95, 1.05);
  const double sx = vrng.uniform(-3.0, 3.0), sy = vrng.uniform(-3.0, 3.0);
  const double fx = frng.uniform(-1.0, 1.0), fy = frng.uniform(-1.0, 1.0);
  const double c = params.size / 2.0;
  face.landmarks = template_landmarks(params.size);
  for (auto& p : face.landmarks.points) {
    p.x = c + (p.x - c) * scale + sx + fx + frng.normal() * 0.3;
    p.y = c + (p.y - c) * scale + sy + fy + frng.normal() * 0.3;
  }

  if (face.label == Label::fake) {
    const auto blurred = gaussian_blur(face.image, params.blur_sigma, params.blur_kernel);
    for (RegionId id : {RegionId::mouth, RegionId::right_eye, RegionId::left_eye}) {
      const auto range = landmark_range(id);
      double x0 = 1e9, y0 = 1e9, x1 = -1e9, y1 = -1e9;
      for (std::size_t i = range.first; i <= range.last; ++i) {
        x0 = std::min(x0, face.landmarks.points[i].x);
        y0 = std::min(y0, face.landmarks.points[i].y);
        x1 = std::max(x1, face.landmarks.points[i].x);
        y1 = std::max(y1, face.landmarks.points[i].y);
      }
      const int xa = std::max(0, static_cast<int>(std::floor(x0 - kBlurPad)));
      const int ya = std::max(0, static_cast<int>(std::floor(y0 - kBlurPad)));
      const int xb = std::min(params.size - 1, static_cast<int>(std::ceil(x1 + kBlurPad)));
      const int yb = std::min(params.size - 1, static_cast<int>(std::ceil(y1 + kBlurPad)));
      for (int y = ya; y <= yb; ++y)
        for (int x = xa; x <= xb; ++x) face.image.at(x, y) = blurred.at(x, y);
    }
  }
  return face;
}

DatasetManifest write_corpus(const SynthParams& params, const std::string& out_dir) {
  namespace fs = std::filesystem;
  std::error_code ec;
  fs::create_directories(fs::path(out_dir) / "images", ec);
  if (!ec) fs::create_directories(fs::path(out_dir) / "landmarks", ec);
  if (ec) fail(ErrorKind::io, "cannot create corpus directory '" + out_dir + "': " + ec.message());

  DatasetManifest manifest;
  const std::size_t n = corpus_size(params);
  manifest.rows.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    const auto face = make_face(params, i);
    const std::string image_rel = "images/" + face.sample_id + ".pgm";
    const std::string lm_rel = "landmarks/" + face.sample_id + ".json";
    save_pgm(face.image, (fs::path(out_dir) / image_rel).string());
    save_landmarks(face.landmarks, (fs::path(out_dir) / lm_rel).string());
    manifest.rows[i] = {face.sample_id, image_rel, lm_rel, face.label, face.video_id, Split::unassigned};
  }
  save_manifest(manifest, (fs::path(out_dir) / "manifest.csv").string());
  return manifest;
}

}  // namespace ffrfd::synth
