#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "metaqa/features.hpp"

namespace metaqa {

// Binary classes throughout the classifier: 0 = WithoutControl,
// 1 = WithControl. Ties always break toward class 0.
int class_index(QualityControl label);
QualityControl class_label(int index);

// Gini impurity 1 - sum p_i^2 of a two-class count pair. Total must be > 0.
double gini(std::int64_t c0, std::int64_t c1);

struct SplitSpec {
  double train_fraction = 0.8;
  bool stratified = true;
  std::uint64_t seed = 42;
};

struct ForestParams {
  int n_trees = 100;
  int max_depth = 0;             // 0 = unlimited
  int min_samples_leaf = 1;
  int n_candidate_features = 0;  // per-node feature subset; 0 = ceil(sqrt(n_features))
  bool bootstrap = true;         // sample train-size with replacement per tree
  int n_threads = 1;             // parallel == serial by per-tree rng streams

  bool operator==(const ForestParams&) const = default;
};

// Flat tree storage. feature == -1 marks a leaf carrying bootstrap class
// counts; internal nodes route x[feature] <= threshold to the left child.
struct TreeNode {
  std::int32_t feature = -1;
  double threshold = 0.0;
  std::int32_t left = -1;
  std::int32_t right = -1;
  std::array<std::int64_t, 2> counts{0, 0};  // populated on leaves only

  bool operator==(const TreeNode&) const = default;
};

using Tree = std::vector<TreeNode>;

struct ForestModel {
  ForestParams params;
  std::uint64_t seed = 0;
  std::vector<std::string> feature_names;
  std::vector<Tree> trees;
  std::vector<double> importances;        // mean decrease in impurity, sums to 1
  bool degenerate_importances = false;    // no tree split at all: uniform importances
  std::optional<int> single_class;        // training data held one class only
  std::string training_corpus_hash;       // provenance, may be empty

  int n_features() const { return static_cast<int>(feature_names.size()); }

  bool operator==(const ForestModel&) const = default;
};

struct Metrics {
  double accuracy = 0.0;
  double f1_with_control = 0.0;
  double f1_without_control = 0.0;
  std::array<std::array<std::int64_t, 2>, 2> confusion{};  // [actual][predicted]

  std::int64_t test_size() const {
    return confusion[0][0] + confusion[0][1] + confusion[1][0] + confusion[1][1];
  }

  bool operator==(const Metrics&) const = default;
};

struct Prediction {
  std::string url;
  QualityControl label = QualityControl::Unknown;
  double confidence = 0.0;

  bool operator==(const Prediction&) const = default;
};

// Row-major engine input; the feature count is free so oracle fixtures can
// train on two features while the pipeline always uses six.
struct Dataset {
  std::vector<std::vector<double>> rows;
  std::vector<int> labels;  // 0 or 1, aligned with rows
};

Dataset to_dataset(std::span<const LabeledFeatures> data);

// Deterministic (seeded) split. Stratified mode shuffles each class
// separately and preserves class proportions within one record; each class
// needs at least two members. Row order within the halves follows the input.
std::pair<std::vector<LabeledFeatures>, std::vector<LabeledFeatures>> split_train_test(
    std::span<const LabeledFeatures> data, const SplitSpec& spec);

// Grows params.n_trees CART trees on bootstrap samples, Gini splits at
// midpoints between consecutive distinct values of each candidate feature.
// Deterministic given (data, params, seed); tree t draws from stream
// (seed, t) so thread count never changes the model.
ForestModel train_forest(const Dataset& train, const ForestParams& params, std::uint64_t seed,
                         std::vector<std::string> feature_names);
ForestModel train_forest(std::span<const LabeledFeatures> train, const ForestParams& params,
                         std::uint64_t seed);

// Majority vote over trees; confidence is the winning vote fraction.
std::pair<int, double> predict_class(const ForestModel& model, std::span<const double> features);
std::pair<QualityControl, double> predict(const ForestModel& model,
                                          std::span<const double> features);
std::vector<Prediction> predict_all(const ForestModel& model,
                                    std::span<const LabeledFeatures> rows);

Metrics evaluate(const ForestModel& model, std::span<const LabeledFeatures> test);
Metrics evaluate(const ForestModel& model, const Dataset& test);

// The model's mean-decrease-in-impurity vector (non-negative, sums to 1).
const std::vector<double>& feature_importances(const ForestModel& model);

}  // namespace metaqa
