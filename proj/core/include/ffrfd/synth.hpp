#pragma once

#include <cstdint>
#include <string>

#include "ffrfd/dataset.hpp"
#include "ffrfd/image.hpp"
#include "ffrfd/regions.hpp"

namespace ffrfd::synth {

/// Synthetic real/fake corpus. Every face is a blocky random texture with a
/// jittered 68-point landmark layout; fakes additionally have their mouth and eye
/// regions Gaussian-blurred, which is the only class signal.
struct SynthParams {
  std::size_t n_real = 200;
  std::size_t n_fake = 200;
  std::size_t frames_per_video = 5;
  int size = 128;
  std::uint64_t seed = 7;
  double blur_sigma = 2.0;
  int blur_kernel = 9;
};

struct SynthFace {
  std::string sample_id;
  std::string video_id;
  Label label = Label::real;
  GrayImage image;
  LandmarkSet landmarks;
};

/// Canonical landmark layout for a square face crop of side `size`.
LandmarkSet template_landmarks(int size);

/// Blocky random texture; deterministic in seed.
GrayImage texture(int size, std::uint64_t seed);

/// The index-th face of the corpus (reals first, then fakes).
SynthFace make_face(const SynthParams& params, std::size_t index);

std::size_t corpus_size(const SynthParams& params);

/// Writes images/<id>.pgm, landmarks/<id>.json and manifest.csv under out_dir and
/// returns the manifest (with paths relative to out_dir, splits unassigned).
DatasetManifest write_corpus(const SynthParams& params, const std::string& out_dir);

}  // namespace ffrfd::synth
