#include <benchmark/benchmark.h>

#include "ffrfd/evaluation.hpp"
#include "ffrfd/forest.hpp"
#include "ffrfd/pipeline.hpp"
#include "ffrfd/rng.hpp"
#include "ffrfd/synth.hpp"

namespace {

ffrfd::synth::SynthFace face(std::size_t index) {
  ffrfd::synth::SynthParams params;
  return ffrfd::synth::make_face(params, index);
}

void BM_FastDetect(benchmark::State& state) {
  const auto f = face(0);
  for (auto _ : state) benchmark::DoNotOptimize(ffrfd::fast_detect(f.image, 20, true));
}
BENCHMARK(BM_FastDetect);

void BM_GaussianBlur(benchmark::State& state) {
  const auto f = face(0);
  for (auto _ : state) benchmark::DoNotOptimize(ffrfd::gaussian_blur(f.image, 2.0, 9));
}
BENCHMARK(BM_GaussianBlur);

void BM_ConstructFfrFd(benchmark::State& state) {
  ffrfd::DetectorConfig config;
  config.kind = state.range(0) == 0 ? ffrfd::DetectorKind::fast_brief : ffrfd::DetectorKind::orb;
  const ffrfd::Detector detector(config);
  const auto f = face(0);
  for (auto _ : state)
    benchmark::DoNotOptimize(ffrfd::construct_ffr_fd(detector, f.image, f.landmarks, ffrfd::Mode::no_ave));
  state.SetLabel(std::string(ffrfd::detector_kind_name(config.kind)));
}
BENCHMARK(BM_ConstructFfrFd)->Arg(0)->Arg(1);

void BM_TrainForest(benchmark::State& state) {
  ffrfd::Rng rng(3);
  ffrfd::FeatureMatrix data(256);
  std::vector<double> row(256);
  for (int i = 0; i < 320; ++i) {
    const auto label = i % 2 ? ffrfd::Label::fake : ffrfd::Label::real;
    for (auto& v : row) v = rng.uniform() + (label == ffrfd::Label::fake ? 0.2 : 0.0);
    data.add(row, label);
  }
  ffrfd::ForestParams params;
  params.n_trees = static_cast<std::size_t>(state.range(0));
  for (auto _ : state)
    benchmark::DoNotOptimize(ffrfd::train_forest(data, params, {"fast_brief", ffrfd::Mode::no_ave, 32, {}}));
}
BENCHMARK(BM_TrainForest)->Arg(50)->Unit(benchmark::kMillisecond);

void BM_RocAuc(benchmark::State& state) {
  ffrfd::Rng rng(5);
  std::vector<double> scores(10000);
  std::vector<ffrfd::Label> labels(scores.size());
  for (std::size_t i = 0; i < scores.size(); ++i) {
    scores[i] = static_cast<double>(rng.below(100)) / 100.0;
    labels[i] = rng.below(2) ? ffrfd::Label::fake : ffrfd::Label::real;
  }
  for (auto _ : state) benchmark::DoNotOptimize(ffrfd::roc_auc(scores, labels));
}
BENCHMARK(BM_RocAuc);

}  // namespace

BENCHMARK_MAIN();
