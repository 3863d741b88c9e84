#include "commands.hpp"

#include <CLI11.hpp>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <optional>

#include "ffrfd/error.hpp"
#include "ffrfd/evaluation.hpp"
#include "ffrfd/forest.hpp"
#include "ffrfd/synth.hpp"
#include "ffrfd/text.hpp"

namespace ffrfd::cli {

namespace {

using Clock = std::chrono::steady_clock;

constexpr double kMaxSkippedFraction = 0.10;
constexpr std::size_t kMinBenchFaces = 10;
constexpr std::size_t kMinWarmup = 5;

struct RunConfig {
  std::string detector = "fast_brief";
  int fast_threshold = kDefaultFastThreshold;
  int n_top = kDefaultTopN;
  std::uint64_t pattern_seed = kDefaultPatternSeed;
  std::string mode = "no_ave";
  std::uint64_t seed = 42;
  std::size_t n_trees = 500;
  std::size_t max_features = 0;
  std::size_t min_samples_leaf = 1;
  std::size_t max_depth = 0;
  double train_fraction = 0.8;
  std::string split = "";
  std::string manifest;
  std::string features;
  std::string model;
  std::string output;
  std::string scores;
  std::vector<std::string> detectors{"fast_brief", "orb"};
  std::size_t warmup = kMinWarmup;
  synth::SynthParams synth;
  unsigned jobs = 1;
};

/// Throws Error(data) on invalid detector-specific fields; called before any work.
DetectorConfig detector_config(const RunConfig& cfg, const std::string& name) {
  DetectorConfig dc;
  dc.kind = parse_detector_kind(name);
  dc.fast.threshold = cfg.fast_threshold;
  dc.orb.threshold = cfg.fast_threshold;
  dc.orb.n_top = cfg.n_top;
  dc.pattern_seed = cfg.pattern_seed;
  return dc;
}

void report_failures(const std::vector<RowFailure>& failures, std::ostream& err) {
  for (const auto& f : failures) err << "skipped " << f.sample_id << ": " << f.message << "\n";
}

std::vector<FeatureRow> select_rows(const FeatureTable& table, std::optional<Split> split) {
  std::vector<FeatureRow> rows;
  for (const auto& r : table.rows)
    if (!split || r.split == *split) rows.push_back(r);
  return rows;
}

/// Empty selects every row.
std::optional<Split> split_filter(const std::string& name, std::optional<Split> fallback) {
  if (name.empty()) return fallback;
  if (name == "all") return std::nullopt;
  const Split s = parse_split(name);
  if (s == Split::unassigned) fail(ErrorKind::data, "split filter must be train, test or all");
  return s;
}

std::string dimension_label(std::size_t dim, std::size_t d) {
  const auto region = kRegions[dim / d];
  return std::string(region_name(region)) + "," + std::to_string(dim % d);
}

void write_output(const std::string& path, const std::string& content, std::ostream& out) {
  if (path.empty() || path == "-")
    out << content;
  else
    text::write_file(path, content);
}

ModelProvenance provenance_of(const FeatureTable& table, const std::vector<FeatureRow>& rows) {
  ModelProvenance prov;
  prov.detector_name = rows.front().features.detector_name;
  prov.mode = rows.front().features.mode;
  prov.d = rows.front().features.d;
  if (auto it = table.meta.find("pattern_seed"); it != table.meta.end()) {
    unsigned long long seed = 0;
    if (!text::parse_uint(it->second, seed)) fail(ErrorKind::format, "bad pattern_seed in feature table meta");
    prov.pattern_seed = seed;
  }
  return prov;
}

ForestParams forest_params(const RunConfig& cfg) {
  ForestParams p;
  p.n_trees = cfg.n_trees;
  p.max_features = cfg.max_features;
  p.min_samples_leaf = cfg.min_samples_leaf;
  p.max_depth = cfg.max_depth;
  p.seed = cfg.seed;
  p.n_threads = cfg.jobs;
  return p;
}

FeatureMatrix matrix_of(const std::vector<FeatureRow>& rows) {
  FeatureMatrix m(rows.front().features.values.size());
  for (const auto& r : rows) m.add(r.features.values, r.label);
  return m;
}

int cmd_stats(const RunConfig& cfg, std::ostream& out, std::ostream& err) {
  const Detector detector(detector_config(cfg, cfg.detector));
  const auto manifest = load_manifest(cfg.manifest);
  std::vector<RowFailure> failures;
  const auto stats = corpus_stats(manifest, detector, cfg.jobs, &failures);
  report_failures(failures, err);
  write_output(cfg.output, format_region_stats_csv(stats), out);
  return kOk;
}

int cmd_extract(const RunConfig& cfg, std::ostream& out, std::ostream& err) {
  const Detector detector(detector_config(cfg, cfg.detector));
  const Mode mode = parse_mode(cfg.mode);
  if (cfg.train_fraction < 0.0 || cfg.train_fraction > 1.0)
    fail(ErrorKind::data, "train fraction must be in [0, 1]");
  const auto manifest = split_manifest(load_manifest(cfg.manifest), cfg.train_fraction, cfg.seed);
  if (manifest.rows.empty()) fail(ErrorKind::data, "manifest is empty");

  auto result = extract_features(manifest, detector, mode, cfg.jobs);
  report_failures(result.failures, err);
  if (result.table.rows.empty()) fail(ErrorKind::data, "no manifest row could be processed");
  result.table.meta["split_seed"] = std::to_string(cfg.seed);
  result.table.meta["train_fraction"] = text::format_real(cfg.train_fraction);
  write_output(cfg.output, format_feature_table(result.table), out);

  if (result.partition_warnings > 0)
    err << "warning: " << result.partition_warnings << " face(s) have inner-mouth landmarks outside the mouth hull\n";
  const double skipped = static_cast<double>(result.failures.size()) / static_cast<double>(manifest.rows.size());
  if (skipped > kMaxSkippedFraction) {
    err << "error: " << result.failures.size() << " of " << manifest.rows.size() << " rows skipped\n";
    return kDataError;
  }
  return kOk;
}

int cmd_train(const RunConfig& cfg, std::ostream& out, std::ostream&) {
  const auto table = load_feature_table(cfg.features);
  const auto rows = select_rows(table, split_filter(cfg.split, Split::train));
  if (rows.empty()) fail(ErrorKind::data, "feature table has no rows in the requested split");
  const auto data = matrix_of(rows);

  const auto t0 = Clock::now();
  const auto model = train_forest(data, forest_params(cfg), provenance_of(table, rows));
  const double seconds = std::chrono::duration<double>(Clock::now() - t0).count();
  save_model(model, cfg.model);
  out << "trained " << model.trees().size() << " trees on " << rows.size() << " samples x " << data.n_features()
      << " features in " << text::format_real(seconds) << " s\n";
  return kOk;
}

int cmd_eval(const RunConfig& cfg, std::ostream& out, std::ostream&) {
  const auto model = load_model(cfg.model);
  const auto table = load_feature_table(cfg.features);
  check_compatible(model, table);
  const auto rows = select_rows(table, split_filter(cfg.split, Split::test));
  if (rows.empty()) fail(ErrorKind::data, "feature table has no rows in the requested split");

  const auto scored = score_rows(model, rows, cfg.jobs);
  const auto report = summarize_scores(scored);
  if (!cfg.output.empty()) text::write_file(cfg.output, format_report_csv(report));
  if (!cfg.scores.empty()) {
    auto by_id = scored;
    std::sort(by_id.begin(), by_id.end(), [](const auto& a, const auto& b) { return a.sample_id < b.sample_id; });
    std::string csv = "sample_id,label,score\n";
    for (const auto& s : by_id) {
      csv += s.sample_id + "," + std::string(label_name(s.label)) + ",";
      text::append_real(csv, s.score);
      csv += "\n";
    }
    text::write_file(cfg.scores, csv);
  }
  out << format_report_text(report);
  return kOk;
}

int cmd_importance(const RunConfig& cfg, std::ostream& out, std::ostream&) {
  const auto model = load_model(cfg.model);
  const auto importances = feature_importances(model);
  const std::size_t d = model.provenance().d;
  if (d == 0 || importances.size() != kRegionCount * d)
    fail(ErrorKind::compatibility, "model dimension is not 8 x d");
  std::string csv = "dimension,region,offset,importance\n";
  for (std::size_t i = 0; i < importances.size(); ++i) {
    csv += std::to_string(i) + "," + dimension_label(i, d) + ",";
    text::append_real(csv, importances[i]);
    csv += "\n";
  }
  write_output(cfg.output, csv, out);
  return kOk;
}

int cmd_diff(const RunConfig& cfg, std::ostream& out, std::ostream&) {
  const auto table = load_feature_table(cfg.features);
  std::vector<FfrFd> real, fake;
  for (const auto& r : select_rows(table, split_filter(cfg.split, std::nullopt)))
    (r.label == Label::fake ? fake : real).push_back(r.features);
  const auto diff = dimension_diff(real, fake);
  std::string csv = "dimension,region,offset,mean_diff,var_diff\n";
  for (std::size_t i = 0; i < diff.mean_diff.size(); ++i) {
    csv += std::to_string(i) + "," + dimension_label(i, diff.d) + ",";
    text::append_real(csv, diff.mean_diff[i]);
    csv += ",";
    text::append_real(csv, diff.var_diff[i]);
    csv += "\n";
  }
  write_output(cfg.output, csv, out);
  return kOk;
}

int cmd_bench(const RunConfig& cfg, std::ostream& out, std::ostream& err) {
  const Mode mode = parse_mode(cfg.mode);
  if (cfg.detectors.empty()) fail(ErrorKind::data, "bench needs at least one detector");
  std::vector<Detector> detectors;
  for (const auto& name : cfg.detectors) {
    auto dc = detector_config(cfg, name);
    if (dc.kind == DetectorKind::external) fail(ErrorKind::data, "bench times built-in detectors only");
    detectors.emplace_back(dc);
  }
  const std::size_t warmup = std::max(cfg.warmup, kMinWarmup);

  const auto manifest = load_manifest(cfg.manifest);
  std::vector<BenchFace> faces;
  std::vector<Label> labels;
  for (const auto& row : manifest.rows) {
    try {
      faces.push_back({load_pgm(row.image_path), load_landmarks(row.landmarks_path)});
      labels.push_back(row.label);
    } catch (const Error& e) {
      err << "skipped " << row.sample_id << ": " << e.what() << "\n";
    }
  }
  if (faces.size() < kMinBenchFaces)
    fail(ErrorKind::data, "bench needs at least 10 faces, got " + std::to_string(faces.size()));
  if (faces.size() <= warmup) fail(ErrorKind::data, "bench needs more faces than warmup faces");

  std::string csv = "detector,d,n_faces,n_timed,mean_ms,median_ms,stddev_ms,train_s\n";
  for (const auto& detector : detectors) {
    const auto timing = time_construction(detector, faces, mode, warmup);
    double train_s = 0.0;
    const bool both = std::count(labels.begin(), labels.end(), Label::fake) > 0 &&
                      std::count(labels.begin(), labels.end(), Label::real) > 0;
    if (both && cfg.n_trees > 0) {
      FeatureMatrix data(timing.features.front().values.size());
      for (std::size_t i = 0; i < faces.size(); ++i) data.add(timing.features[i].values, labels[i]);
      const auto t0 = Clock::now();
      train_forest(data, forest_params(cfg), {timing.detector, mode, timing.d, cfg.pattern_seed});
      train_s = std::chrono::duration<double>(Clock::now() - t0).count();
    }
    csv += timing.detector + "," + std::to_string(timing.d) + "," + std::to_string(timing.n_faces) + "," +
           std::to_string(timing.n_timed) + ",";
    for (double v : {timing.mean_ms, timing.median_ms, timing.stddev_ms, train_s}) {
      text::append_real(csv, v);
      csv += ",";
    }
    csv.back() = '\n';
  }
  write_output(cfg.output, csv, out);
  return kOk;
}

int cmd_synth(const RunConfig& cfg, std::ostream& out, std::ostream&) {
  if (cfg.output.empty()) fail(ErrorKind::data, "synth needs an output directory");
  const auto manifest = synth::write_corpus(cfg.synth, cfg.output);
  out << "wrote " << manifest.rows.size() << " faces to " << cfg.output << "\n";
  return kOk;
}

void add_detector_options(CLI::App* cmd, RunConfig& cfg) {
  cmd->add_option("--detector", cfg.detector, "fast_brief, orb or external")
      ->check(CLI::IsMember({"fast_brief", "orb", "external"}))
      ->capture_default_str();
  cmd->add_option("--fast-threshold", cfg.fast_threshold, "FAST intensity threshold")
      ->check(CLI::Range(1, 254))
      ->capture_default_str();
  cmd->add_option("--n-top", cfg.n_top, "ORB: keypoints kept by Harris response")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();
  cmd->add_option("--pattern-seed", cfg.pattern_seed, "BRIEF sampling pattern seed")->capture_default_str();
}

void add_mode_option(CLI::App* cmd, RunConfig& cfg) {
  cmd->add_option("--mode", cfg.mode, "ave or no_ave")->check(CLI::IsMember({"ave", "no_ave"}))->capture_default_str();
}

void add_forest_options(CLI::App* cmd, RunConfig& cfg) {
  cmd->add_option("--n-trees", cfg.n_trees, "number of trees")->check(CLI::PositiveNumber)->capture_default_str();
  cmd->add_option("--max-features", cfg.max_features, "features per split (0: floor(sqrt(D)))")
      ->capture_default_str();
  cmd->add_option("--min-samples-leaf", cfg.min_samples_leaf)->check(CLI::PositiveNumber)->capture_default_str();
  cmd->add_option("--max-depth", cfg.max_depth, "0 is unbounded")->capture_default_str();
  cmd->add_option("--seed", cfg.seed, "training seed")->capture_default_str();
}

}  // namespace

ConstructionTiming time_construction(const Detector& detector, const std::vector<BenchFace>& faces, Mode mode,
                                     std::size_t warmup) {
  if (faces.size() <= warmup) fail(ErrorKind::data, "need more faces than warmup faces");
  ConstructionTiming timing;
  timing.detector = std::string(detector_kind_name(detector.config().kind));
  timing.n_faces = faces.size();
  timing.features.reserve(faces.size());
  std::vector<double> ms;
  ms.reserve(faces.size() - warmup);
  for (std::size_t i = 0; i < faces.size(); ++i) {
    const auto t0 = Clock::now();
    auto f = construct_ffr_fd(detector, faces[i].image, faces[i].landmarks, mode);
    const double elapsed = std::chrono::duration<double, std::milli>(Clock::now() - t0).count();
    if (i >= warmup) ms.push_back(elapsed);
    timing.d = f.d;
    timing.features.push_back(std::move(f));
  }
  timing.n_timed = ms.size();
  double sum = 0.0;
  for (double v : ms) sum += v;
  timing.mean_ms = sum / static_cast<double>(ms.size());
  double ss = 0.0;
  for (double v : ms) ss += (v - timing.mean_ms) * (v - timing.mean_ms);
  timing.stddev_ms = std::sqrt(ss / static_cast<double>(ms.size()));
  std::sort(ms.begin(), ms.end());
  const std::size_t mid = ms.size() / 2;
  timing.median_ms = ms.size() % 2 ? ms[mid] : 0.5 * (ms[mid - 1] + ms[mid]);
  return timing;
}

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  RunConfig cfg;
  CLI::App app{"Fused facial-region keypoint descriptors and random-forest DeepFake scoring", "ffrfd"};
  app.set_config("--config", "", "TOML/INI file with option defaults; command-line flags win");
  app.add_option("-j,--jobs", cfg.jobs, "worker threads")->check(CLI::Range(1u, 1024u))->capture_default_str();
  app.require_subcommand(1);
  app.fallthrough();

  auto* stats = app.add_subcommand("stats", "mean keypoint count per facial region and class");
  stats->add_option("--manifest", cfg.manifest)->required();
  stats->add_option("-o,--output", cfg.output, "CSV path (stdout if omitted)");
  add_detector_options(stats, cfg);

  auto* extract = app.add_subcommand("extract", "one FFR_FD row per manifest row");
  extract->add_option("--manifest", cfg.manifest)->required();
  extract->add_option("-o,--output", cfg.output, "feature CSV path (stdout if omitted)");
  extract->add_option("--train-fraction", cfg.train_fraction, "fraction of videos assigned to train")
      ->capture_default_str();
  extract->add_option("--seed", cfg.seed, "video split seed")->capture_default_str();
  add_detector_options(extract, cfg);
  add_mode_option(extract, cfg);

  auto* train = app.add_subcommand("train", "fit a random forest on the train rows");
  train->add_option("--features", cfg.features)->required();
  train->add_option("--model", cfg.model, "output model path")->required();
  train->add_option("--split", cfg.split, "train (default), test or all");
  add_forest_options(train, cfg);

  auto* eval = app.add_subcommand("eval", "ROC-AUC of a model on the test rows");
  eval->add_option("--features", cfg.features)->required();
  eval->add_option("--model", cfg.model)->required();
  eval->add_option("--split", cfg.split, "test (default), train or all");
  eval->add_option("-o,--output", cfg.output, "report CSV path");
  eval->add_option("--scores", cfg.scores, "per-sample score CSV path");

  auto* importance = app.add_subcommand("importance", "Gini importance per FFR_FD dimension");
  importance->add_option("--model", cfg.model)->required();
  importance->add_option("-o,--output", cfg.output, "CSV path (stdout if omitted)");

  auto* diff = app.add_subcommand("diff", "per-dimension real-minus-fake mean and variance");
  diff->add_option("--features", cfg.features)->required();
  diff->add_option("--split", cfg.split, "all (default), train or test");
  diff->add_option("-o,--output", cfg.output, "CSV path (stdout if omitted)");

  auto* bench = app.add_subcommand("bench", "per-face FFR_FD construction time per detector");
  bench->add_option("--manifest", cfg.manifest)->required();
  bench->add_option("--detectors", cfg.detectors, "built-in detectors to time")
      ->delimiter(',')
      ->check(CLI::IsMember({"fast_brief", "orb"}))
      ->capture_default_str();
  bench->add_option("--warmup", cfg.warmup, "untimed leading faces (at least 5)")->capture_default_str();
  bench->add_option("-o,--output", cfg.output, "CSV path (stdout if omitted)");
  bench->add_option("--fast-threshold", cfg.fast_threshold)->check(CLI::Range(1, 254))->capture_default_str();
  bench->add_option("--n-top", cfg.n_top)->check(CLI::PositiveNumber)->capture_default_str();
  bench->add_option("--pattern-seed", cfg.pattern_seed)->capture_default_str();
  add_mode_option(bench, cfg);
  add_forest_options(bench, cfg);

  auto* synth_cmd = app.add_subcommand("synth", "generate a synthetic real/blurred-fake corpus");
  synth_cmd->add_option("-o,--output", cfg.output, "output directory")->required();
  synth_cmd->add_option("--n-real", cfg.synth.n_real)->capture_default_str();
  synth_cmd->add_option("--n-fake", cfg.synth.n_fake)->capture_default_str();
  synth_cmd->add_option("--frames-per-video", cfg.synth.frames_per_video)
      ->check(CLI::PositiveNumber)
      ->capture_default_str();
  synth_cmd->add_option("--size", cfg.synth.size)->check(CLI::Range(64, 4096))->capture_default_str();
  synth_cmd->add_option("--seed", cfg.synth.seed)->capture_default_str();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e, out, err);
    return rc == 0 ? kOk : kUsage;
  }

  try {
    if (*stats) return cmd_stats(cfg, out, err);
    if (*extract) return cmd_extract(cfg, out, err);
    if (*train) return cmd_train(cfg, out, err);
    if (*eval) return cmd_eval(cfg, out, err);
    if (*importance) return cmd_importance(cfg, out, err);
    if (*diff) return cmd_diff(cfg, out, err);
    if (*bench) return cmd_bench(cfg, out, err);
    if (*synth_cmd) return cmd_synth(cfg, out, err);
  } catch (const Error& e) {
    err << "error: " << e.what() << "\n";
    return e.kind() == ErrorKind::compatibility ? kCompatibility : kDataError;
  }
  return kUsage;
}

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  std::vector<const char*> argv;
  argv.reserve(args.size() + 1);
  argv.push_back("ffrfd");
  for (const auto& a : args) argv.push_back(a.c_str());
  return run(static_cast<int>(argv.size()), argv.data(), out, err);
}

}  // namespace ffrfd::cli
