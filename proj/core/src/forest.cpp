#include "metaqa/forest.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <numeric>
#include <thread>

#include "metaqa/errors.hpp"
#include "metaqa/rng.hpp"

namespace metaqa {
namespace {

// rng stream ids so split/bootstrap draws never collide
constexpr std::uint64_t kStreamSplit = 1;
constexpr std::uint64_t kStreamTree = 2;

struct BestSplit {
  int feature = -1;
  double threshold = 0.0;
  double decrease = -1.0;
};

// Grows one CART tree over a bootstrap sample. The sample index array is
// partitioned in place; node ranges always refer to [begin, end) of it.
class TreeGrower {
 public:
  TreeGrower(const Dataset& data, const ForestParams& params, int n_features, int mtry, Rng& rng)
      : data_(data), params_(params), n_features_(n_features), mtry_(mtry), rng_(rng) {}

  Tree grow(std::vector<int> sample, std::vector<double>& importance_out) {
    indices_ = std::move(sample);
    n_root_ = static_cast<double>(indices_.size());
    importance_.assign(static_cast<std::size_t>(n_features_), 0.0);
    nodes_.clear();
    build_node(0, static_cast<int>(indices_.size()), 0);
    importance_out = importance_;
    return std::move(nodes_);
  }

 private:
  int build_node(int begin, int end, int depth) {
    std::int64_t c0 = 0, c1 = 0;
    for (int k = begin; k < end; ++k) {
      (data_.labels[static_cast<std::size_t>(indices_[k])] == 0 ? c0 : c1) += 1;
    }
    const int node_id = static_cast<int>(nodes_.size());
    nodes_.emplace_back();

    const int n = end - begin;
    const bool pure = c0 == 0 || c1 == 0;
    const bool depth_ok = params_.max_depth == 0 || depth < params_.max_depth;
    if (!pure && depth_ok && n >= 2 * params_.min_samples_leaf) {
      const BestSplit best = find_best_split(begin, end, c0, c1);
      if (best.feature >= 0) {
        const auto first = indices_.begin() + begin;
        const auto last = indices_.begin() + end;
        const auto mid = std::stable_partition(first, last, [&](int i) {
          return data_.rows[static_cast<std::size_t>(i)][static_cast<std::size_t>(best.feature)] <=
                 best.threshold;
        });
        const int split_at = static_cast<int>(mid - indices_.begin());
        importance_[static_cast<std::size_t>(best.feature)] += best.decrease;
        const int left = build_node(begin, split_at, depth + 1);
        const int right = build_node(split_at, end, depth + 1);
        TreeNode& node = nodes_[static_cast<std::size_t>(node_id)];
        node.feature = best.feature;
        node.threshold = best.threshold;
        node.left = left;
        node.right = right;
        return node_id;
      }
    }
    TreeNode& leaf = nodes_[static_cast<std::size_t>(node_id)];
    leaf.feature = -1;
    leaf.counts = {c0, c1};
    return node_id;
  }

  // Candidate thresholds are midpoints between consecutive distinct values.
  // Features are examined in shuffled order: the first mtry always, further
  // ones only while no feature has produced a split (so a node whose sampled
  // features are all constant still splits when any feature can).
  BestSplit find_best_split(int begin, int end, std::int64_t c0, std::int64_t c1) {
    const int n = end - begin;
    const double parent = gini(c0, c1);

    feature_order_.resize(static_cast<std::size_t>(n_features_));
    std::iota(feature_order_.begin(), feature_order_.end(), 0);
    shuffle(feature_order_, rng_);

    BestSplit best;
    int examined = 0;
    for (int f : feature_order_) {
      ++examined;
      scratch_.clear();
      scratch_.reserve(static_cast<std::size_t>(n));
      for (int k = begin; k < end; ++k) {
        const int i = indices_[k];
        scratch_.emplace_back(data_.rows[static_cast<std::size_t>(i)][static_cast<std::size_t>(f)],
                              data_.labels[static_cast<std::size_t>(i)]);
      }
      std::sort(scratch_.begin(), scratch_.end());
      if (scratch_.front().first != scratch_.back().first) {
        std::int64_t l0 = 0, l1 = 0;
        for (int k = 1; k < n; ++k) {
          (scratch_[static_cast<std::size_t>(k - 1)].second == 0 ? l0 : l1) += 1;
          const double lo = scratch_[static_cast<std::size_t>(k - 1)].first;
          const double hi = scratch_[static_cast<std::size_t>(k)].first;
          if (lo == hi) continue;
          if (k < params_.min_samples_leaf || n - k < params_.min_samples_leaf) continue;
          double threshold = lo + (hi - lo) / 2.0;
          if (threshold >= hi) threshold = lo;  // midpoint rounded up to hi: fall back
          const double children =
              (static_cast<double>(k) * gini(l0, l1) +
               static_cast<double>(n - k) * gini(c0 - l0, c1 - l1)) /
              static_cast<double>(n);
          const double decrease = static_cast<double>(n) / n_root_ * (parent - children);
          if (decrease > best.decrease) {
            best = BestSplit{f, threshold, decrease};
          }
        }
      }
      if (examined >= mtry_ && best.feature >= 0) break;
    }
    return best;
  }

  const Dataset& data_;
  const ForestParams& params_;
  int n_features_;
  int mtry_;
  Rng& rng_;
  std::vector<int> indices_;
  double n_root_ = 0.0;
  Tree nodes_;
  std::vector<double> importance_;
  std::vector<int> feature_order_;
  std::vector<std::pair<double, int>> scratch_;
};

int predict_tree(const Tree& tree, std::span<const double> x) {
  int node = 0;
  while (tree[static_cast<std::size_t>(node)].feature >= 0) {
    const TreeNode& nd = tree[static_cast<std::size_t>(node)];
    node = x[static_cast<std::size_t>(nd.feature)] <= nd.threshold ? nd.left : nd.right;
  }
  const auto& counts = tree[static_cast<std::size_t>(node)].counts;
  return counts[1] > counts[0] ? 1 : 0;  // leaf tie goes to class 0
}

double f1_for_class(const std::array<std::array<std::int64_t, 2>, 2>& confusion, int cls) {
  const double tp = static_cast<double>(confusion[cls][cls]);
  const double fp = static_cast<double>(confusion[1 - cls][cls]);
  const double fn = static_cast<double>(confusion[cls][1 - cls]);
  const double denom = 2.0 * tp + fp + fn;
  return denom > 0.0 ? 2.0 * tp / denom : 0.0;
}

}  // namespace

int class_index(QualityControl label) {
  switch (label) {
    case QualityControl::WithoutControl: return 0;
    case QualityControl::WithControl: return 1;
    case QualityControl::Unknown: break;
  }
  throw FatalError("record with unknown quality-control label cannot be used here");
}

QualityControl class_label(int index) {
  return index == 0 ? QualityControl::WithoutControl : QualityControl::WithControl;
}

double gini(std::int64_t c0, std::int64_t c1) {
  const std::int64_t total = c0 + c1;
  if (total <= 0) throw InvariantError("gini of an empty node");
  const double p0 = static_cast<double>(c0) / static_cast<double>(total);
  const double p1 = static_cast<double>(c1) / static_cast<double>(total);
  return 1.0 - p0 * p0 - p1 * p1;
}

Dataset to_dataset(std::span<const LabeledFeatures> data) {
  Dataset out;
  out.rows.reserve(data.size());
  out.labels.reserve(data.size());
  for (const auto& row : data) {
    out.rows.emplace_back(row.features.begin(), row.features.end());
    out.labels.push_back(class_index(row.label));
  }
  return out;
}

std::pair<std::vector<LabeledFeatures>, std::vector<LabeledFeatures>> split_train_test(
    std::span<const LabeledFeatures> data, const SplitSpec& spec) {
  if (spec.train_fraction <= 0.0 || spec.train_fraction >= 1.0) {
    throw FatalError("train fraction must lie strictly between 0 and 1");
  }
  if (data.size() < 2) {
    throw FatalError("splitting needs at least two records");
  }

  // indices per class (one shared group when not stratified)
  std::array<std::vector<int>, 2> groups;
  if (spec.stratified) {
    for (std::size_t i = 0; i < data.size(); ++i) {
      groups[static_cast<std::size_t>(class_index(data[i].label))].push_back(
          static_cast<int>(i));
    }
    for (const auto& g : groups) {
      if (!g.empty() && g.size() < 2) {
        throw FatalError("stratified split needs at least two records per class");
      }
    }
  } else {
    groups[0].resize(data.size());
    std::iota(groups[0].begin(), groups[0].end(), 0);
  }

  std::vector<int> train_idx, test_idx;
  for (std::size_t g = 0; g < groups.size(); ++g) {
    auto& group = groups[g];
    if (group.empty()) continue;
    Rng rng = make_rng(spec.seed, kStreamSplit, g);
    shuffle(group, rng);
    const auto n = static_cast<long long>(group.size());
    long long k = std::llround(spec.train_fraction * static_cast<double>(n));
    k = std::clamp(k, 1LL, n - 1);  // both halves keep at least one record
    train_idx.insert(train_idx.end(), group.begin(), group.begin() + k);
    test_idx.insert(test_idx.end(), group.begin() + k, group.end());
  }
  std::sort(train_idx.begin(), train_idx.end());
  std::sort(test_idx.begin(), test_idx.end());

  std::pair<std::vector<LabeledFeatures>, std::vector<LabeledFeatures>> out;
  out.first.reserve(train_idx.size());
  out.second.reserve(test_idx.size());
  for (int i : train_idx) out.first.push_back(data[static_cast<std::size_t>(i)]);
  for (int i : test_idx) out.second.push_back(data[static_cast<std::size_t>(i)]);
  return out;
}

ForestModel train_forest(const Dataset& train, const ForestParams& params, std::uint64_t seed,
                         std::vector<std::string> feature_names) {
  const std::size_t n = train.rows.size();
  if (n == 0) throw FatalError("training needs at least one record");
  if (params.n_trees < 1) throw FatalError("forest needs at least one tree");
  if (params.min_samples_leaf < 1) throw FatalError("min samples per leaf must be positive");
  const int n_features = static_cast<int>(feature_names.size());
  if (n_features < 1) throw FatalError("training needs at least one feature");
  for (const auto& row : train.rows) {
    if (static_cast<int>(row.size()) != n_features) {
      throw InvariantError("feature row width differs from feature-name count");
    }
  }
  std::int64_t class_counts[2] = {0, 0};
  for (int label : train.labels) {
    if (label != 0 && label != 1) throw InvariantError("labels must be 0 or 1");
    ++class_counts[label];
  }

  const int mtry = params.n_candidate_features > 0
                       ? std::min(params.n_candidate_features, n_features)
                       : static_cast<int>(std::ceil(std::sqrt(static_cast<double>(n_features))));

  ForestModel model;
  model.params = params;
  model.seed = seed;
  model.feature_names = std::move(feature_names);
  model.trees.resize(static_cast<std::size_t>(params.n_trees));
  if (class_counts[0] == 0 || class_counts[1] == 0) {
    model.single_class = class_counts[0] == 0 ? 1 : 0;
  }

  std::vector<std::vector<double>> tree_importances(
      static_cast<std::size_t>(params.n_trees));

  const auto build_tree = [&](int t) {
    Rng rng = make_rng(seed, kStreamTree, static_cast<std::uint64_t>(t));
    std::vector<int> sample(n);
    if (params.bootstrap) {
      for (auto& s : sample) s = static_cast<int>(bounded(rng, n));
    } else {
      std::iota(sample.begin(), sample.end(), 0);
    }
    TreeGrower grower(train, params, n_features, mtry, rng);
    model.trees[static_cast<std::size_t>(t)] =
        grower.grow(std::move(sample), tree_importances[static_cast<std::size_t>(t)]);
  };

  const int threads = std::max(1, params.n_threads);
  if (threads == 1) {
    for (int t = 0; t < params.n_trees; ++t) build_tree(t);
  } else {
    std::atomic<int> next{0};
    std::vector<std::thread> pool;
    pool.reserve(static_cast<std::size_t>(threads));
    for (int w = 0; w < threads; ++w) {
      pool.emplace_back([&] {
        for (int t = next.fetch_add(1); t < params.n_trees; t = next.fetch_add(1)) {
          build_tree(t);
        }
      });
    }
    for (auto& th : pool) th.join();
  }

  // mean decrease in impurity: average of per-tree normalized vectors over
  // trees that split at all; uniform with a flag when none did
  std::vector<double> total(static_cast<std::size_t>(n_features), 0.0);
  int contributing = 0;
  for (const auto& imp : tree_importances) {
    const double sum = std::accumulate(imp.begin(), imp.end(), 0.0);
    if (sum <= 0.0) continue;
    ++contributing;
    for (std::size_t i = 0; i < total.size(); ++i) total[i] += imp[i] / sum;
  }
  if (contributing == 0) {
    model.degenerate_importances = true;
    model.importances.assign(static_cast<std::size_t>(n_features),
                             1.0 / static_cast<double>(n_features));
  } else {
    const double sum = std::accumulate(total.begin(), total.end(), 0.0);
    model.importances.resize(total.size());
    for (std::size_t i = 0; i < total.size(); ++i) model.importances[i] = total[i] / sum;
  }
  return model;
}

ForestModel train_forest(std::span<const LabeledFeatures> train, const ForestParams& params,
                         std::uint64_t seed) {
  const auto& names = feature_names();
  return train_forest(to_dataset(train), params, seed,
                      std::vector<std::string>(names.begin(), names.end()));
}

std::pair<int, double> predict_class(const ForestModel& model, std::span<const double> features) {
  if (static_cast<int>(features.size()) != model.n_features()) {
    throw InvariantError("feature vector length " + std::to_string(features.size()) +
                         " does not match model width " + std::to_string(model.n_features()));
  }
  if (model.trees.empty()) throw InvariantError("model holds no trees");
  std::int64_t votes[2] = {0, 0};
  for (const auto& tree : model.trees) {
    ++votes[predict_tree(tree, features)];
  }
  const int winner = votes[1] > votes[0] ? 1 : 0;  // tie breaks toward WithoutControl
  const double confidence =
      static_cast<double>(votes[winner]) / static_cast<double>(model.trees.size());
  return {winner, confidence};
}

std::pair<QualityControl, double> predict(const ForestModel& model,
                                          std::span<const double> features) {
  const auto [cls, confidence] = predict_class(model, features);
  return {class_label(cls), confidence};
}

std::vector<Prediction> predict_all(const ForestModel& model,
                                    std::span<const LabeledFeatures> rows) {
  std::vector<Prediction> out;
  out.reserve(rows.size());
  for (const auto& row : rows) {
    const auto [label, confidence] = predict(model, row.features);
    out.push_back(Prediction{row.url, label, confidence});
  }
  return out;
}

Metrics evaluate(const ForestModel& model, const Dataset& test) {
  if (test.rows.empty()) throw InvariantError("evaluation needs a non-empty test set");
  Metrics metrics;
  for (std::size_t i = 0; i < test.rows.size(); ++i) {
    const auto [predicted, confidence] = predict_class(model, test.rows[i]);
    (void)confidence;
    ++metrics.confusion[static_cast<std::size_t>(test.labels[i])]
                       [static_cast<std::size_t>(predicted)];
  }
  const auto n = static_cast<double>(metrics.test_size());
  metrics.accuracy =
      (static_cast<double>(metrics.confusion[0][0] + metrics.confusion[1][1])) / n;
  metrics.f1_without_control = f1_for_class(metrics.confusion, 0);
  metrics.f1_with_control = f1_for_class(metrics.confusion, 1);
  return metrics;
}

Metrics evaluate(const ForestModel& model, std::span<const LabeledFeatures> test) {
  return evaluate(model, to_dataset(test));
}

const std::vector<double>& feature_importances(const ForestModel& model) {
  return model.importances;
}

}  // namespace metaqa
