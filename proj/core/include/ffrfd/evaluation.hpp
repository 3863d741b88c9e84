#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "ffrfd/dataset.hpp"
#include "ffrfd/forest.hpp"

namespace ffrfd {

/// Assigns whole videos to train/test. Distinct unassigned video ids are sorted,
/// shuffled with `seed`, and the first round(train_fraction * n) go to train.
/// Rows that already carry a split keep it, and unassigned frames of such a video
/// inherit it. Throws Error(data) for a missing video_id or a video whose
/// preassigned rows disagree.
DatasetManifest split_manifest(DatasetManifest manifest, double train_fraction, std::uint64_t seed);

/// Midrank Mann-Whitney statistic for fake-vs-real, doubled so it stays integral:
/// u_x2 = 2 * (R_fake - n_fake (n_fake + 1) / 2).
struct MannWhitney {
  std::uint64_t u_x2 = 0;
  std::uint64_t n_real = 0;
  std::uint64_t n_fake = 0;
};

/// Throws Error(data) on NaN scores or a length mismatch.
MannWhitney mann_whitney(std::span<const double> scores, std::span<const Label> labels);

/// Mann-Whitney AUC with midranks, fake as the positive class.
/// Throws Error(data) unless both classes are present and sizes match.
double roc_auc(std::span<const double> scores, std::span<const Label> labels);

struct EvalReport {
  double auc = 0.0;
  std::size_t n_real = 0;
  std::size_t n_fake = 0;
  double accuracy = 0.0;  // fake iff score > 0.5; auxiliary only
  double mean_score_real = 0.0;
  double mean_score_fake = 0.0;
};

/// Refuses feature rows from a different detector, mode, d or pattern seed.
void check_compatible(const RandomForestModel& model, const FeatureTable& table);

struct ScoredSample {
  std::string sample_id;
  Label label;
  double score;
};

/// Scores every row (in row order) with predict_proba.
std::vector<ScoredSample> score_rows(const RandomForestModel& model, std::span<const FeatureRow> rows,
                                     unsigned n_threads = 1);
EvalReport summarize_scores(std::span<const ScoredSample> scored);
EvalReport evaluate(const RandomForestModel& model, std::span<const FeatureRow> rows, unsigned n_threads = 1);

/// Flat `key,value` rows.
std::string format_report_csv(const EvalReport& report);
std::string format_report_text(const EvalReport& report);

}  // namespace ffrfd
