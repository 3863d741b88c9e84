#include "ffrfd/forest.hpp"

#include <algorithm>
#include <cmath>

#include "ffrfd/error.hpp"
#include "ffrfd/parallel.hpp"
#include "ffrfd/rng.hpp"
#include "ffrfd/text.hpp"

namespace ffrfd {

void FeatureMatrix::add(std::span<const double> row, Label label) {
  if (row.size() != n_features_)
    fail(ErrorKind::data, "sample has " + std::to_string(row.size()) + " features, expected " +
                              std::to_string(n_features_));
  values_.insert(values_.end(), row.begin(), row.end());
  labels_.push_back(label);
}

double gini_impurity(ClassCounts counts) {
  const auto n = counts.total();
  if (n == 0) fail(ErrorKind::data, "Gini impurity of an empty node");
  const double pr = static_cast<double>(counts.n_real) / n;
  const double pf = static_cast<double>(counts.n_fake) / n;
  return 1.0 - pr * pr - pf * pf;
}

double gini_decrease(ClassCounts parent, ClassCounts left, ClassCounts right) {
  const double n = parent.total();
  return gini_impurity(parent) - (left.total() / n) * gini_impurity(left) - (right.total() / n) * gini_impurity(right);
}

namespace {

struct ValueLabel {
  double value;
  Label label;
};

double midpoint(double lo, double hi) {
  double mid = (lo + hi) / 2.0;
  // Adjacent doubles: make sure lo still satisfies `lo < threshold`.
  if (!(lo < mid)) mid = hi;
  return mid;
}

__extension__ typedef unsigned __int128 Wide;

// Exact ordering key of a split within one node. For fixed parent counts the Gini
// decrease grows with (l_r^2 + l_f^2) / n_l + (r_r^2 + r_f^2) / n_r, kept here as
// a fraction so equal decreases compare equal.
struct SplitKey {
  Wide num = 0;
  Wide den = 1;

  static SplitKey of(ClassCounts left, ClassCounts right) {
    const Wide nl = left.total(), nr = right.total();
    const Wide sl = Wide(left.n_real) * left.n_real + Wide(left.n_fake) * left.n_fake;
    const Wide sr = Wide(right.n_real) * right.n_real + Wide(right.n_fake) * right.n_fake;
    return {sl * nr + sr * nl, nl * nr};
  }
  bool operator>(const SplitKey& o) const { return num * o.den > o.num * den; }
};

struct Candidate {
  SplitChoice choice;
  SplitKey key;
};

// Best threshold on one feature; improves `best` only on a strictly larger decrease.
void scan_feature(const FeatureMatrix& data, std::span<const std::size_t> samples, std::size_t feature,
                  std::size_t min_leaf, ClassCounts parent, std::vector<ValueLabel>& buf,
                  std::optional<Candidate>& best) {
  buf.clear();
  for (auto s : samples) buf.push_back({data.at(s, feature), data.label(s)});
  std::sort(buf.begin(), buf.end(), [](const ValueLabel& a, const ValueLabel& b) { return a.value < b.value; });
  if (buf.front().value == buf.back().value) return;

  ClassCounts left;
  const std::size_t n = buf.size();
  for (std::size_t i = 0; i + 1 < n; ++i) {
    if (buf[i].label == Label::fake)
      ++left.n_fake;
    else
      ++left.n_real;
    if (buf[i].value == buf[i + 1].value) continue;
    const std::size_t n_left = i + 1;
    if (n_left < min_leaf || n - n_left < min_leaf) continue;
    const ClassCounts right{parent.n_real - left.n_real, parent.n_fake - left.n_fake};
    const double dec = gini_decrease(parent, left, right);
    if (!(dec > kMinImpurityDecrease)) continue;
    const auto key = SplitKey::of(left, right);
    if (!best || key > best->key)
      best = Candidate{{feature, midpoint(buf[i].value, buf[i + 1].value), dec}, key};
  }
}

ClassCounts count_classes(const FeatureMatrix& data, std::span<const std::size_t> samples) {
  ClassCounts c;
  for (auto s : samples) {
    if (data.label(s) == Label::fake)
      ++c.n_fake;
    else
      ++c.n_real;
  }
  return c;
}

class TreeBuilder {
 public:
  TreeBuilder(const FeatureMatrix& data, const ForestParams& params, std::size_t max_features, std::uint64_t seed)
      : data_(data), params_(params), max_features_(max_features), rng_(seed) {
    features_.resize(data.n_features());
    for (std::size_t f = 0; f < features_.size(); ++f) features_[f] = f;
  }

  DecisionTree build() {
    const std::size_t n = data_.n_samples();
    std::vector<std::size_t> samples(n);
    for (auto& s : samples) s = static_cast<std::size_t>(rng_.below(n));
    // Sorting makes node contents independent of draw order.
    std::sort(samples.begin(), samples.end());

    DecisionTree tree;
    struct Task {
      std::size_t begin, end, depth;
      std::int32_t parent;
      bool is_left;
    };
    std::vector<Task> stack{{0, n, 0, -1, false}};
    while (!stack.empty()) {
      const Task t = stack.back();
      stack.pop_back();
      const std::span<std::size_t> node_samples(samples.data() + t.begin, t.end - t.begin);

      const auto index = static_cast<std::int32_t>(tree.nodes.size());
      TreeNode node;
      node.n_samples = static_cast<std::uint32_t>(node_samples.size());
      node.counts = count_classes(data_, node_samples);
      if (t.parent >= 0) (t.is_left ? tree.nodes[t.parent].left : tree.nodes[t.parent].right) = index;

      const bool pure = node.counts.n_real == 0 || node.counts.n_fake == 0;
      const bool depth_ok = params_.max_depth == 0 || t.depth < params_.max_depth;
      std::optional<SplitChoice> split;
      if (!pure && depth_ok && node_samples.size() >= 2 * params_.min_samples_leaf) split = choose_split(node_samples);

      if (!split) {
        tree.nodes.push_back(node);
        continue;
      }
      node.feature = static_cast<std::int32_t>(split->feature);
      node.threshold = split->threshold;
      node.impurity_decrease = split->impurity_decrease;
      tree.nodes.push_back(node);

      const auto mid = std::stable_partition(node_samples.begin(), node_samples.end(), [&](std::size_t s) {
        return data_.at(s, split->feature) < split->threshold;
      });
      const std::size_t cut = t.begin + static_cast<std::size_t>(mid - node_samples.begin());
      // Right pushed first so the left subtree is laid out first.
      stack.push_back({cut, t.end, t.depth + 1, index, false});
      stack.push_back({t.begin, cut, t.depth + 1, index, true});
    }
    return tree;
  }

 private:
  std::size_t draw_feature(std::size_t k) {
    const std::size_t j = k + static_cast<std::size_t>(rng_.below(features_.size() - k));
    std::swap(features_[k], features_[j]);
    return features_[k];
  }

  // Draws max_features candidates; if none of them splits, keeps drawing the
  // remaining features one at a time until one does.
  std::optional<SplitChoice> choose_split(std::span<const std::size_t> node_samples) {
    const std::size_t total = features_.size();
    std::vector<std::size_t> candidates;
    candidates.reserve(max_features_);
    std::size_t k = 0;
    for (; k < max_features_; ++k) candidates.push_back(draw_feature(k));
    std::sort(candidates.begin(), candidates.end());
    auto split = best_split(data_, node_samples, candidates, params_.min_samples_leaf);
    for (; !split && k < total; ++k) {
      const std::size_t f = draw_feature(k);
      split = best_split(data_, node_samples, std::span<const std::size_t>(&f, 1), params_.min_samples_leaf);
    }
    return split;
  }

  const FeatureMatrix& data_;
  const ForestParams& params_;
  std::size_t max_features_;
  Rng rng_;
  std::vector<std::size_t> features_;
};

}  // namespace

std::optional<SplitChoice> best_split(const FeatureMatrix& data, std::span<const std::size_t> samples,
                                      std::span<const std::size_t> candidate_features, std::size_t min_samples_leaf) {
  if (samples.size() < 2) return std::nullopt;
  const ClassCounts parent = count_classes(data, samples);
  if (parent.n_real == 0 || parent.n_fake == 0) return std::nullopt;

  std::vector<std::size_t> order(candidate_features.begin(), candidate_features.end());
  std::sort(order.begin(), order.end());
  std::vector<ValueLabel> buf;
  buf.reserve(samples.size());
  std::optional<Candidate> best;
  for (auto f : order) {
    if (f >= data.n_features()) fail(ErrorKind::data, "candidate feature index out of range");
    scan_feature(data, samples, f, std::max<std::size_t>(min_samples_leaf, 1), parent, buf, best);
  }
  if (!best) return std::nullopt;
  return best->choice;
}

const TreeNode& DecisionTree::leaf_for(std::span<const double> x) const {
  std::size_t i = 0;
  while (!nodes[i].is_leaf()) {
    const auto& n = nodes[i];
    i = static_cast<std::size_t>(x[static_cast<std::size_t>(n.feature)] < n.threshold ? n.left : n.right);
  }
  return nodes[i];
}

double DecisionTree::predict_fake_fraction(std::span<const double> x) const {
  const auto& leaf = leaf_for(x);
  return static_cast<double>(leaf.counts.n_fake) / leaf.counts.total();
}

RandomForestModel::RandomForestModel(ForestParams params, std::size_t n_features, ModelProvenance provenance,
                                     std::vector<DecisionTree> trees)
    : params_(params), n_features_(n_features), provenance_(std::move(provenance)), trees_(std::move(trees)) {}

RandomForestModel train_forest(const FeatureMatrix& data, const ForestParams& params, ModelProvenance provenance) {
  if (data.n_samples() < 2) fail(ErrorKind::data, "training needs at least 2 samples");
  if (data.n_features() == 0) fail(ErrorKind::data, "training needs at least 1 feature");
  const auto classes = count_classes(data, [&] {
    std::vector<std::size_t> all(data.n_samples());
    for (std::size_t i = 0; i < all.size(); ++i) all[i] = i;
    return all;
  }());
  if (classes.n_real == 0 || classes.n_fake == 0) fail(ErrorKind::data, "training data contains a single class");
  if (params.n_trees == 0) fail(ErrorKind::data, "n_trees must be >= 1");
  if (params.min_samples_leaf == 0) fail(ErrorKind::data, "min_samples_leaf must be >= 1");

  ForestParams resolved = params;
  if (resolved.max_features == 0)
    resolved.max_features = std::max<std::size_t>(1, static_cast<std::size_t>(std::sqrt(double(data.n_features()))));
  resolved.max_features = std::min(resolved.max_features, data.n_features());

  std::vector<DecisionTree> trees(resolved.n_trees);
  parallel_for(trees.size(), resolved.n_threads, [&](std::size_t i) {
    trees[i] = TreeBuilder(data, resolved, resolved.max_features, derive_seed(resolved.seed, i)).build();
  });
  resolved.n_threads = 1;  // execution detail, not part of the model
  return RandomForestModel(resolved, data.n_features(), std::move(provenance), std::move(trees));
}

double predict_proba(const RandomForestModel& model, std::span<const double> x) {
  if (x.size() != model.n_features())
    fail(ErrorKind::compatibility, "feature vector has " + std::to_string(x.size()) + " dimensions, model expects " +
                                       std::to_string(model.n_features()));
  double sum = 0.0;
  for (const auto& tree : model.trees()) sum += tree.predict_fake_fraction(x);
  return sum / static_cast<double>(model.trees().size());
}

std::vector<double> feature_importances(const RandomForestModel& model) {
  std::vector<double> total(model.n_features(), 0.0);
  std::vector<double> per_tree(model.n_features());
  for (const auto& tree : model.trees()) {
    std::fill(per_tree.begin(), per_tree.end(), 0.0);
    double sum = 0.0;
    for (const auto& node : tree.nodes) {
      if (node.is_leaf()) continue;
      const double w = node.n_samples * node.impurity_decrease;
      per_tree[static_cast<std::size_t>(node.feature)] += w;
      sum += w;
    }
    if (sum <= 0.0) continue;
    for (std::size_t f = 0; f < total.size(); ++f) total[f] += per_tree[f] / sum;
  }
  double sum = 0.0;
  for (double v : total) sum += v;
  if (sum > 0.0)
    for (auto& v : total) v /= sum;
  return total;
}

// ---- serialization --------------------------------------------------------

namespace {

constexpr std::string_view kMagic = "ffrfd-forest";
constexpr std::string_view kVersion = "v1";

class LineReader {
 public:
  explicit LineReader(std::string_view content) : lines_(text::split(content, '\n')) {}

  std::vector<std::string_view> next() {
    while (pos_ < lines_.size()) {
      auto line = text::trim(lines_[pos_++]);
      if (!line.empty()) return text::split_whitespace(line);
    }
    corrupt("unexpected end of file");
  }

  std::string_view value(std::string_view key) {
    const auto f = next();
    if (f.size() != 2 || f[0] != key) corrupt("expected '" + std::string(key) + "'");
    return f[1];
  }

  unsigned long long uint_value(std::string_view key) {
    unsigned long long v = 0;
    if (!text::parse_uint(value(key), v)) corrupt("bad value for '" + std::string(key) + "'");
    return v;
  }

  [[noreturn]] void corrupt(const std::string& what) const {
    fail(ErrorKind::format, "corrupted model file (line " + std::to_string(pos_) + "): " + what);
  }

 private:
  std::vector<std::string_view> lines_;
  std::size_t pos_ = 0;
};

}  // namespace

std::string format_model(const RandomForestModel& model) {
  const auto& p = model.params();
  const auto& prov = model.provenance();
  std::string out;
  out += std::string(kMagic) + " " + std::string(kVersion) + "\n";
  out += "detector " + prov.detector_name + "\n";
  out += "mode " + std::string(mode_name(prov.mode)) + "\n";
  out += "d " + std::to_string(prov.d) + "\n";
  out += "pattern_seed " + (prov.pattern_seed ? std::to_string(*prov.pattern_seed) : std::string("none")) + "\n";
  out += "n_features " + std::to_string(model.n_features()) + "\n";
  out += "n_trees " + std::to_string(p.n_trees) + "\n";
  out += "max_features " + std::to_string(p.max_features) + "\n";
  out += "min_samples_leaf " + std::to_string(p.min_samples_leaf) + "\n";
  out += "max_depth " + std::to_string(p.max_depth) + "\n";
  out += "seed " + std::to_string(p.seed) + "\n";
  for (std::size_t t = 0; t < model.trees().size(); ++t) {
    const auto& tree = model.trees()[t];
    out += "tree " + std::to_string(t) + " " + std::to_string(tree.nodes.size()) + "\n";
    for (const auto& n : tree.nodes) {
      if (n.is_leaf()) {
        out += "L -1 0 -1 -1 0 ";
      } else {
        out += "I " + std::to_string(n.feature) + " ";
        text::append_real(out, n.threshold);
        out += " " + std::to_string(n.left) + " " + std::to_string(n.right) + " ";
        text::append_real(out, n.impurity_decrease);
        out += " ";
      }
      out += std::to_string(n.n_samples) + " " + std::to_string(n.counts.n_real) + " " +
             std::to_string(n.counts.n_fake) + "\n";
    }
  }
  out += "end\n";
  return out;
}

RandomForestModel parse_model(std::string_view content) {
  LineReader in(content);
  const auto head = in.next();
  if (head.size() != 2 || head[0] != kMagic) in.corrupt("not a forest model file");
  if (head[1] != kVersion)
    fail(ErrorKind::format, "unsupported model version '" + std::string(head[1]) + "' (expected v1)");

  ModelProvenance prov;
  prov.detector_name = std::string(in.value("detector"));
  try {
    prov.mode = parse_mode(in.value("mode"));
  } catch (const Error&) {
    in.corrupt("bad mode");
  }
  prov.d = in.uint_value("d");
  const auto seed_text = in.value("pattern_seed");
  if (seed_text != "none") {
    unsigned long long v = 0;
    if (!text::parse_uint(seed_text, v)) in.corrupt("bad pattern_seed");
    prov.pattern_seed = v;
  }
  const std::size_t n_features = in.uint_value("n_features");
  ForestParams p;
  p.n_trees = in.uint_value("n_trees");
  p.max_features = in.uint_value("max_features");
  p.min_samples_leaf = in.uint_value("min_samples_leaf");
  p.max_depth = in.uint_value("max_depth");
  p.seed = in.uint_value("seed");
  if (p.n_trees == 0 || n_features == 0) in.corrupt("empty forest");

  std::vector<DecisionTree> trees(p.n_trees);
  for (std::size_t t = 0; t < p.n_trees; ++t) {
    const auto h = in.next();
    unsigned long long idx = 0, count = 0;
    if (h.size() != 3 || h[0] != "tree" || !text::parse_uint(h[1], idx) || idx != t || !text::parse_uint(h[2], count) ||
        count == 0)
      in.corrupt("bad tree header");
    auto& nodes = trees[t].nodes;
    nodes.resize(count);
    for (auto& n : nodes) {
      const auto f = in.next();
      long long feature = 0, left = 0, right = 0;
      unsigned long long ns = 0, nr = 0, nf = 0;
      if (f.size() != 9 || (f[0] != "I" && f[0] != "L") || !text::parse_int(f[1], feature) ||
          !text::parse_real(f[2], n.threshold) || !text::parse_int(f[3], left) || !text::parse_int(f[4], right) ||
          !text::parse_real(f[5], n.impurity_decrease) || !text::parse_uint(f[6], ns) || !text::parse_uint(f[7], nr) ||
          !text::parse_uint(f[8], nf))
        in.corrupt("bad node");
      if (nr + nf == 0 || nr + nf > UINT32_MAX) in.corrupt("bad class counts");
      n.n_samples = static_cast<std::uint32_t>(ns);
      n.counts = {static_cast<std::uint32_t>(nr), static_cast<std::uint32_t>(nf)};
      if (f[0] == "L") {
        n.feature = -1;
        n.left = n.right = -1;
        n.threshold = 0.0;
        n.impurity_decrease = 0.0;
      } else {
        const auto size = static_cast<long long>(count);
        if (feature < 0 || static_cast<std::size_t>(feature) >= n_features || left <= 0 || right <= 0 ||
            left >= size || right >= size || !std::isfinite(n.threshold))
          in.corrupt("node references out of range");
        n.feature = static_cast<std::int32_t>(feature);
        n.left = static_cast<std::int32_t>(left);
        n.right = static_cast<std::int32_t>(right);
      }
    }
    // Children must come after their parent, which also rules out cycles.
    for (std::size_t i = 0; i < nodes.size(); ++i)
      if (!nodes[i].is_leaf() && (static_cast<std::size_t>(nodes[i].left) <= i || static_cast<std::size_t>(nodes[i].right) <= i))
        in.corrupt("node ordering");
  }
  const auto tail = in.next();
  if (tail.size() != 1 || tail[0] != "end") in.corrupt("missing end marker");
  return RandomForestModel(p, n_features, std::move(prov), std::move(trees));
}

void save_model(const RandomForestModel& model, const std::string& path) { text::write_file(path, format_model(model)); }

RandomForestModel load_model(const std::string& path) {
  if (path.empty()) fail(ErrorKind::io, "empty model path");
  const auto content = text::read_file(path);
  try {
    return parse_model(content);
  } catch (const Error& e) {
    fail(e.kind(), path + ": " + e.what());
  }
}

}  // namespace ffrfd
