#include "ffrfd/evaluation.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>
#include <set>
#include <sstream>

#include "ffrfd/error.hpp"
#include "ffrfd/parallel.hpp"
#include "ffrfd/rng.hpp"
#include "ffrfd/text.hpp"

namespace ffrfd {

DatasetManifest split_manifest(DatasetManifest manifest, double train_fraction, std::uint64_t seed) {
  if (!(train_fraction >= 0.0 && train_fraction <= 1.0)) fail(ErrorKind::data, "train fraction must be in [0, 1]");

  std::map<std::string, Split> fixed;
  for (const auto& row : manifest.rows) {
    if (row.video_id.empty()) fail(ErrorKind::data, "sample '" + row.sample_id + "' has no video_id");
    if (row.split == Split::unassigned) continue;
    const auto [it, inserted] = fixed.emplace(row.video_id, row.split);
    if (!inserted && it->second != row.split)
      fail(ErrorKind::data, "video '" + row.video_id + "' is preassigned to both train and test");
  }

  std::set<std::string> open;
  for (const auto& row : manifest.rows)
    if (!fixed.contains(row.video_id)) open.insert(row.video_id);

  std::vector<std::string> videos(open.begin(), open.end());
  Rng rng(seed);
  rng.shuffle(videos.begin(), videos.end());
  const auto n_train = static_cast<std::size_t>(std::llround(train_fraction * static_cast<double>(videos.size())));
  for (std::size_t i = 0; i < videos.size(); ++i) fixed[videos[i]] = i < n_train ? Split::train : Split::test;

  for (auto& row : manifest.rows) row.split = fixed.at(row.video_id);
  return manifest;
}

MannWhitney mann_whitney(std::span<const double> scores, std::span<const Label> labels) {
  if (scores.size() != labels.size()) fail(ErrorKind::data, "roc_auc: scores and labels differ in length");
  for (double s : scores)
    if (std::isnan(s)) fail(ErrorKind::data, "roc_auc: NaN score");
  const std::size_t n = scores.size();
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return scores[a] < scores[b]; });

  // Midranks are (i + j + 1) / 2 for a tie group occupying sorted positions [i, j);
  // doubled to stay in integers.
  std::uint64_t rank_sum_x2 = 0;
  std::uint64_t n_fake = 0;
  for (std::size_t i = 0; i < n;) {
    std::size_t j = i + 1;
    while (j < n && scores[order[j]] == scores[order[i]]) ++j;
    std::uint64_t fakes = 0;
    for (std::size_t k = i; k < j; ++k) fakes += labels[order[k]] == Label::fake;
    rank_sum_x2 += fakes * (i + j + 1);
    n_fake += fakes;
    i = j;
  }
  const std::uint64_t n_real = n - n_fake;
  return {rank_sum_x2 - n_fake * (n_fake + 1), n_real, n_fake};
}

double roc_auc(std::span<const double> scores, std::span<const Label> labels) {
  const auto mw = mann_whitney(scores, labels);
  if (mw.n_fake == 0 || mw.n_real == 0) fail(ErrorKind::data, "roc_auc needs both real and fake samples");
  return static_cast<double>(mw.u_x2) / (2.0 * static_cast<double>(mw.n_fake) * static_cast<double>(mw.n_real));
}

void check_compatible(const RandomForestModel& model, const FeatureTable& table) {
  const auto& prov = model.provenance();
  for (const auto& row : table.rows) {
    const auto& f = row.features;
    if (f.detector_name != prov.detector_name)
      fail(ErrorKind::compatibility, "model was trained on detector '" + prov.detector_name +
                                         "' but features come from '" + f.detector_name + "'");
    if (f.mode != prov.mode)
      fail(ErrorKind::compatibility, "model was trained on mode '" + std::string(mode_name(prov.mode)) +
                                         "' but features are '" + std::string(mode_name(f.mode)) + "'");
    if (f.d != prov.d || f.values.size() != model.n_features())
      fail(ErrorKind::compatibility, "descriptor dimension mismatch: model d=" + std::to_string(prov.d) +
                                         ", features d=" + std::to_string(f.d));
  }
  const auto it = table.meta.find("pattern_seed");
  if (prov.pattern_seed && it != table.meta.end() && it->second != std::to_string(*prov.pattern_seed))
    fail(ErrorKind::compatibility, "sampling pattern seed mismatch: model " + std::to_string(*prov.pattern_seed) +
                                       ", features " + it->second);
}

std::vector<ScoredSample> score_rows(const RandomForestModel& model, std::span<const FeatureRow> rows,
                                     unsigned n_threads) {
  std::vector<ScoredSample> out(rows.size());
  parallel_for(rows.size(), n_threads, [&](std::size_t i) {
    out[i] = {rows[i].sample_id, rows[i].label, predict_proba(model, rows[i].features.values)};
  });
  return out;
}

EvalReport summarize_scores(std::span<const ScoredSample> scored) {
  std::vector<double> scores;
  std::vector<Label> labels;
  EvalReport r;
  std::size_t correct = 0;
  double sum_real = 0.0, sum_fake = 0.0;
  for (const auto& s : scored) {
    scores.push_back(s.score);
    labels.push_back(s.label);
    const bool predicted_fake = s.score > 0.5;
    if (s.label == Label::fake) {
      ++r.n_fake;
      sum_fake += s.score;
      correct += predicted_fake;
    } else {
      ++r.n_real;
      sum_real += s.score;
      correct += !predicted_fake;
    }
  }
  r.auc = roc_auc(scores, labels);
  r.accuracy = static_cast<double>(correct) / static_cast<double>(scored.size());
  r.mean_score_real = sum_real / static_cast<double>(r.n_real);
  r.mean_score_fake = sum_fake / static_cast<double>(r.n_fake);
  return r;
}

EvalReport evaluate(const RandomForestModel& model, std::span<const FeatureRow> rows, unsigned n_threads) {
  const auto scored = score_rows(model, rows, n_threads);
  return summarize_scores(scored);
}

std::string format_report_csv(const EvalReport& r) {
  std::string out = "key,value\n";
  auto add = [&](const std::string& k, double v) {
    out += k + ",";
    text::append_real(out, v);
    out += "\n";
  };
  out += "positive_class,fake\n";
  add("auc", r.auc);
  out += "n_real," + std::to_string(r.n_real) + "\n";
  out += "n_fake," + std::to_string(r.n_fake) + "\n";
  add("accuracy_at_0.5", r.accuracy);
  add("mean_score_real", r.mean_score_real);
  add("mean_score_fake", r.mean_score_fake);
  return out;
}

std::string format_report_text(const EvalReport& r) {
  std::ostringstream ss;
  ss.precision(4);
  ss << std::fixed;
  ss << "frame-level ROC-AUC (positive class: fake): " << r.auc << "\n"
     << "samples: " << r.n_real << " real, " << r.n_fake << " fake\n"
     << "accuracy at 0.5: " << r.accuracy << "\n"
     << "mean score: real " << r.mean_score_real << ", fake " << r.mean_score_fake << "\n";
  return ss.str();
}

}  // namespace ffrfd
