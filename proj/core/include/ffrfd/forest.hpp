#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "ffrfd/dataset.hpp"
#include "ffrfd/fused.hpp"

namespace ffrfd {

/// Dense sample matrix, row-major, with one label per row.
class FeatureMatrix {
 public:
  FeatureMatrix(std::size_t n_features) : n_features_(n_features) {}

  void add(std::span<const double> row, Label label);

  std::size_t n_samples() const { return labels_.size(); }
  std::size_t n_features() const { return n_features_; }
  double at(std::size_t sample, std::size_t feature) const { return values_[sample * n_features_ + feature]; }
  std::span<const double> row(std::size_t sample) const {
    return std::span<const double>(values_).subspan(sample * n_features_, n_features_);
  }
  Label label(std::size_t sample) const { return labels_[sample]; }
  std::span<const Label> labels() const { return labels_; }

 private:
  std::size_t n_features_;
  std::vector<double> values_;
  std::vector<Label> labels_;
};

struct ClassCounts {
  std::uint32_t n_real = 0;
  std::uint32_t n_fake = 0;
  std::uint32_t total() const { return n_real + n_fake; }
};

/// 1 - p_real^2 - p_fake^2. Throws Error(data) for an empty node.
double gini_impurity(ClassCounts counts);

/// Weighted Gini decrease of splitting `parent` into `left` and the remainder.
double gini_decrease(ClassCounts parent, ClassCounts left, ClassCounts right);

/// Splits must improve impurity by more than this to count.
inline constexpr double kMinImpurityDecrease = 1e-12;

struct SplitChoice {
  std::size_t feature = 0;
  double threshold = 0.0;
  double impurity_decrease = 0.0;
};

/// Best Gini split over the candidate features. `samples` may repeat indices
/// (bootstrap multiplicity). Thresholds are midpoints between consecutive distinct
/// values; value < threshold goes left. Decreases are compared exactly on class
/// counts, and equal ones go to the lowest feature index, then the lowest threshold.
/// Returns nullopt when nothing beats kMinImpurityDecrease.
std::optional<SplitChoice> best_split(const FeatureMatrix& data, std::span<const std::size_t> samples,
                                      std::span<const std::size_t> candidate_features,
                                      std::size_t min_samples_leaf = 1);

struct TreeNode {
  std::int32_t feature = -1;  // -1 for leaves
  double threshold = 0.0;
  std::int32_t left = -1;
  std::int32_t right = -1;
  double impurity_decrease = 0.0;
  std::uint32_t n_samples = 0;
  ClassCounts counts;

  bool is_leaf() const { return feature < 0; }
};

/// Flattened tree; node 0 is the root, children follow in depth-first order.
struct DecisionTree {
  std::vector<TreeNode> nodes;

  const TreeNode& leaf_for(std::span<const double> x) const;
  /// Fraction of fake samples in the leaf reached by x.
  double predict_fake_fraction(std::span<const double> x) const;
};

struct ForestParams {
  std::size_t n_trees = 500;
  std::size_t max_features = 0;  // 0 selects floor(sqrt(n_features))
  std::size_t min_samples_leaf = 1;
  std::size_t max_depth = 0;  // 0 is unbounded
  std::uint64_t seed = 42;
  unsigned n_threads = 1;  // does not affect the result
};

/// Provenance carried by a model so that inference can refuse foreign features.
struct ModelProvenance {
  std::string detector_name;
  Mode mode = Mode::no_ave;
  std::size_t d = 0;
  std::optional<std::uint64_t> pattern_seed;
};

class RandomForestModel {
 public:
  RandomForestModel() = default;
  RandomForestModel(ForestParams params, std::size_t n_features, ModelProvenance provenance,
                    std::vector<DecisionTree> trees);

  const ForestParams& params() const { return params_; }
  std::size_t n_features() const { return n_features_; }
  const ModelProvenance& provenance() const { return provenance_; }
  std::span<const DecisionTree> trees() const { return trees_; }

 private:
  ForestParams params_;
  std::size_t n_features_ = 0;
  ModelProvenance provenance_;
  std::vector<DecisionTree> trees_;
};

/// Bagged CART forest. Tree i uses a seed derived from (params.seed, i), so the
/// result does not depend on params.n_threads. Throws Error(data) for fewer than 2
/// samples or a single class.
RandomForestModel train_forest(const FeatureMatrix& data, const ForestParams& params, ModelProvenance provenance);

/// Mean over trees of the leaf fake fraction. Throws Error(compatibility) on a
/// dimension mismatch.
double predict_proba(const RandomForestModel& model, std::span<const double> x);

/// Per-tree normalized weighted impurity decrease, averaged over trees and
/// renormalized. All zeros when no tree has a split.
std::vector<double> feature_importances(const RandomForestModel& model);

std::string format_model(const RandomForestModel& model);
RandomForestModel parse_model(std::string_view content);
void save_model(const RandomForestModel& model, const std::string& path);
RandomForestModel load_model(const std::string& path);

}  // namespace ffrfd
