#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <map>
#include <set>

#include "metaqa/errors.hpp"
#include "metaqa/forest.hpp"
#include "metaqa/rng.hpp"

using namespace metaqa;

namespace {

LabeledFeatures labeled(std::array<double, 6> features, QualityControl label,
                        std::string url = "u") {
  LabeledFeatures row;
  row.url = std::move(url);
  row.features = features;
  row.label = label;
  return row;
}

// Single-leaf tree voting with the given class counts.
Tree leaf_tree(std::int64_t c0, std::int64_t c1) {
  TreeNode node;
  node.feature = -1;
  node.counts = {c0, c1};
  return Tree{node};
}

ForestModel hand_model(std::vector<Tree> trees, int n_features) {
  ForestModel model;
  model.params.n_trees = static_cast<int>(trees.size());
  model.trees = std::move(trees);
  for (int i = 0; i < n_features; ++i) model.feature_names.push_back("f" + std::to_string(i));
  model.importances.assign(static_cast<std::size_t>(n_features),
                           1.0 / static_cast<double>(n_features));
  model.degenerate_importances = true;
  return model;
}

// ---- brute-force split oracle ------------------------------------------------
//
// Enumerates every (feature, midpoint-between-distinct-values) split of the
// subset and returns the maximal node-local impurity decrease
//   gini(parent) - nl/n * gini(left) - nr/n * gini(right).
// Independent of the tree code on purpose: counts and midpoints are recomputed
// from scratch.

double node_local_decrease(const Dataset& data, const std::vector<int>& subset, int feature,
                           double threshold) {
  std::int64_t c0 = 0, c1 = 0, l0 = 0, l1 = 0;
  for (int i : subset) {
    const int label = data.labels[static_cast<std::size_t>(i)];
    (label == 0 ? c0 : c1) += 1;
    if (data.rows[static_cast<std::size_t>(i)][static_cast<std::size_t>(feature)] <=
        threshold) {
      (label == 0 ? l0 : l1) += 1;
    }
  }
  const auto n = static_cast<double>(c0 + c1);
  const auto nl = static_cast<double>(l0 + l1);
  const auto nr = n - nl;
  if (nl == 0 || nr == 0) return -1.0;
  return gini(c0, c1) - nl / n * gini(l0, l1) - (nr / n) * gini(c0 - l0, c1 - l1);
}

double best_enumerated_decrease(const Dataset& data, const std::vector<int>& subset) {
  const auto n_features = data.rows.front().size();
  double best = -1.0;
  for (std::size_t f = 0; f < n_features; ++f) {
    std::vector<double> values;
    values.reserve(subset.size());
    for (int i : subset) values.push_back(data.rows[static_cast<std::size_t>(i)][f]);
    std::sort(values.begin(), values.end());
    values.erase(std::unique(values.begin(), values.end()), values.end());
    for (std::size_t k = 1; k < values.size(); ++k) {
      const double threshold = values[k - 1] + (values[k] - values[k - 1]) / 2.0;
      best = std::max(best,
                      node_local_decrease(data, subset, static_cast<int>(f), threshold));
    }
  }
  return best;
}

// Walks a tree grown without bootstrap, checking at every internal node that
// the chosen split achieves the enumerated maximum decrease, and at every
// leaf that the stored counts match the subset.
void check_tree_against_oracle(const Dataset& data, const Tree& tree, int node,
                               std::vector<int> subset) {
  const TreeNode& nd = tree[static_cast<std::size_t>(node)];
  std::int64_t c0 = 0, c1 = 0;
  for (int i : subset) (data.labels[static_cast<std::size_t>(i)] == 0 ? c0 : c1) += 1;

  if (nd.feature < 0) {
    CHECK(nd.counts[0] == c0);
    CHECK(nd.counts[1] == c1);
    // a leaf is justified: pure, or no split possible at all
    if (c0 > 0 && c1 > 0) CHECK(best_enumerated_decrease(data, subset) < 0.0);
    return;
  }

  const double chosen = node_local_decrease(data, subset, nd.feature, nd.threshold);
  const double best = best_enumerated_decrease(data, subset);
  CHECK(chosen >= 0.0);
  // the implementation and the oracle sum terms in different orders, so allow
  // last-ulp noise and nothing more
  CHECK(std::abs(chosen - best) <= 1e-12);

  std::vector<int> left, right;
  for (int i : subset) {
    if (data.rows[static_cast<std::size_t>(i)][static_cast<std::size_t>(nd.feature)] <=
        nd.threshold) {
      left.push_back(i);
    } else {
      right.push_back(i);
    }
  }
  CHECK_FALSE(left.empty());
  CHECK_FALSE(right.empty());
  check_tree_against_oracle(data, tree, nd.left, std::move(left));
  check_tree_against_oracle(data, tree, nd.right, std::move(right));
}

bool contradiction_free(const Dataset& data) {
  std::map<std::vector<double>, int> seen;
  for (std::size_t i = 0; i < data.rows.size(); ++i) {
    const auto [it, inserted] = seen.emplace(data.rows[i], data.labels[i]);
    if (!inserted && it->second != data.labels[i]) return false;
  }
  return true;
}

ForestParams oracle_params() {
  ForestParams params;
  params.n_trees = 1;
  params.bootstrap = false;
  params.n_candidate_features = 2;  // examine every feature
  return params;
}

}  // namespace

TEST_CASE("gini impurity of two-class counts") {
  CHECK(gini(5, 5) == doctest::Approx(0.5));
  CHECK(gini(8, 0) == 0.0);
  CHECK(gini(3, 1) == doctest::Approx(0.375));
  CHECK_THROWS_AS(gini(0, 0), InvariantError);
}

TEST_CASE("stratified split preserves class proportions") {
  std::vector<LabeledFeatures> data;
  for (int i = 0; i < 10; ++i) {
    data.push_back(labeled({static_cast<double>(i), 0, 0, 0, 0, 0},
                           i < 5 ? QualityControl::WithControl
                                 : QualityControl::WithoutControl,
                           "u" + std::to_string(i)));
  }
  SplitSpec spec;
  spec.train_fraction = 0.8;
  spec.seed = 11;
  const auto [train, test] = split_train_test(data, spec);
  CHECK(train.size() == 8);
  CHECK(test.size() == 2);
  const auto count = [](const std::vector<LabeledFeatures>& rows, QualityControl qc) {
    return std::count_if(rows.begin(), rows.end(),
                         [&](const auto& r) { return r.label == qc; });
  };
  CHECK(count(train, QualityControl::WithControl) == 4);
  CHECK(count(train, QualityControl::WithoutControl) == 4);
  CHECK(count(test, QualityControl::WithControl) == 1);
  CHECK(count(test, QualityControl::WithoutControl) == 1);

  // deterministic: same seed, same partition
  const auto [train2, test2] = split_train_test(data, spec);
  CHECK(train2 == train);
  CHECK(test2 == test);

  // different seed draws a different partition eventually
  SplitSpec other = spec;
  other.seed = 12;
  bool differs = false;
  for (std::uint64_t s = 12; s < 22 && !differs; ++s) {
    other.seed = s;
    differs = split_train_test(data, other).first != train;
  }
  CHECK(differs);
}

TEST_CASE("split sizes at reference-corpus scale") {
  std::vector<LabeledFeatures> data;
  for (int i = 0; i < 4651; ++i) data.push_back(labeled({}, QualityControl::WithControl));
  for (int i = 0; i < 4236; ++i) data.push_back(labeled({}, QualityControl::WithoutControl));
  const auto [train, test] = split_train_test(data, SplitSpec{});
  CHECK(train.size() == 7110);  // llround(0.8 * 4651) + llround(0.8 * 4236)
  CHECK(test.size() == 1777);
}

TEST_CASE("stratified split rejects a class with fewer than two members") {
  std::vector<LabeledFeatures> data = {
      labeled({}, QualityControl::WithControl),
      labeled({}, QualityControl::WithControl),
      labeled({}, QualityControl::WithoutControl),
  };
  CHECK_THROWS_AS(split_train_test(data, SplitSpec{}), FatalError);

  SplitSpec loose;
  loose.stratified = false;
  CHECK_NOTHROW(split_train_test(data, loose));
}

TEST_CASE("unknown labels cannot be split or trained on") {
  std::vector<LabeledFeatures> data = {labeled({}, QualityControl::Unknown),
                                       labeled({}, QualityControl::WithControl)};
  CHECK_THROWS_AS(split_train_test(data, SplitSpec{}), FatalError);
  CHECK_THROWS_AS(train_forest(data, ForestParams{}, 1), FatalError);
}

TEST_CASE("single-class training yields a constant predictor, flagged") {
  std::vector<LabeledFeatures> data;
  for (int i = 0; i < 6; ++i) {
    data.push_back(labeled({static_cast<double>(i), 1, 0, 0, 0, 0},
                           QualityControl::WithControl));
  }
  ForestParams params;
  params.n_trees = 9;
  const ForestModel model = train_forest(data, params, 4);
  CHECK(model.single_class == 1);
  CHECK(model.degenerate_importances);
  for (double v : model.importances) CHECK(v == doctest::Approx(1.0 / 6));
  Rng rng = make_rng(2);
  for (int i = 0; i < 20; ++i) {
    std::array<double, 6> x{};
    for (auto& v : x) v = uniform01(rng) * 10;
    CHECK(predict(model, x).first == QualityControl::WithControl);
  }
}

TEST_CASE("four-point separable fixture splits where enumeration says") {
  Dataset data;
  data.rows = {{0.0, 0.0}, {1.0, 1.0}, {2.0, 0.0}, {3.0, 1.0}};
  data.labels = {0, 0, 1, 1};
  const ForestModel model =
      train_forest(data, oracle_params(), 7, {"f0", "f1"});
  REQUIRE(model.trees.size() == 1);
  const Tree& tree = model.trees[0];
  REQUIRE(tree.size() == 3);  // one split, two pure leaves
  CHECK(tree[0].feature == 0);
  CHECK(tree[0].threshold == doctest::Approx(1.5));
  // f0 at 1.5 separates perfectly: decrease = gini(2,2) = 0.5
  CHECK(node_local_decrease(data, {0, 1, 2, 3}, tree[0].feature, tree[0].threshold) ==
        doctest::Approx(0.5));
  CHECK(best_enumerated_decrease(data, {0, 1, 2, 3}) == doctest::Approx(0.5));
  CHECK(model.importances[0] == doctest::Approx(1.0));
  CHECK(model.importances[1] == 0.0);
}

TEST_CASE("every node of oracle-mode trees matches exhaustive enumeration") {
  Rng rng = make_rng(424242);
  int checked_fixtures = 0;
  for (int trial = 0; trial < 200; ++trial) {
    const int n = 2 + static_cast<int>(bounded(rng, 7));  // 2..8 points
    Dataset data;
    for (int i = 0; i < n; ++i) {
      // small integer grids make value ties frequent
      data.rows.push_back({static_cast<double>(bounded(rng, 4)),
                           static_cast<double>(bounded(rng, 3))});
      data.labels.push_back(static_cast<int>(bounded(rng, 2)));
    }
    const ForestModel model = train_forest(data, oracle_params(),
                                           1000 + static_cast<std::uint64_t>(trial),
                                           {"f0", "f1"});
    std::vector<int> all(n);
    for (int i = 0; i < n; ++i) all[static_cast<std::size_t>(i)] = i;
    check_tree_against_oracle(data, model.trees[0], 0, all);

    if (contradiction_free(data)) {
      ++checked_fixtures;
      const Metrics metrics = evaluate(model, data);
      CHECK(metrics.accuracy == 1.0);
    }
  }
  CHECK(checked_fixtures > 50);  // the sweep must actually exercise the property
}

TEST_CASE("xor-shaped data still trains to perfect accuracy") {
  // every single split has zero gini decrease at the root; the tree must
  // split anyway and resolve the classes one level down
  Dataset data;
  data.rows = {{0.0, 0.0}, {0.0, 1.0}, {1.0, 0.0}, {1.0, 1.0}};
  data.labels = {0, 1, 1, 0};
  const ForestModel model = train_forest(data, oracle_params(), 3, {"f0", "f1"});
  CHECK(evaluate(model, data).accuracy == 1.0);
}

TEST_CASE("no-bootstrap single tree fits contradiction-free data perfectly") {
  Rng rng = make_rng(77);
  for (int trial = 0; trial < 20; ++trial) {
    Dataset data;
    std::set<std::vector<double>> unique_rows;
    while (data.rows.size() < 40) {
      std::vector<double> row = {static_cast<double>(bounded(rng, 20)),
                                 static_cast<double>(bounded(rng, 20)),
                                 static_cast<double>(bounded(rng, 2))};
      if (unique_rows.insert(row).second) {
        data.rows.push_back(row);
        data.labels.push_back(static_cast<int>(bounded(rng, 2)));
      }
    }
    ForestParams params = oracle_params();
    params.n_candidate_features = 2;  // subset narrower than the 3 features
    const ForestModel model =
        train_forest(data, params, static_cast<std::uint64_t>(trial), {"f0", "f1", "f2"});
    CHECK(evaluate(model, data).accuracy == 1.0);
  }
}

TEST_CASE("prediction votes and tie-breaking") {
  const ForestModel unanimous = hand_model({leaf_tree(0, 5), leaf_tree(1, 9)}, 6);
  std::array<double, 6> x{};
  CHECK(predict(unanimous, x) ==
        std::pair<QualityControl, double>{QualityControl::WithControl, 1.0});

  const ForestModel tie = hand_model({leaf_tree(0, 5), leaf_tree(5, 0)}, 6);
  CHECK(predict(tie, x) ==
        std::pair<QualityControl, double>{QualityControl::WithoutControl, 0.5});

  // leaf-level tie also breaks toward WithoutControl
  const ForestModel leaf_tie = hand_model({leaf_tree(3, 3)}, 6);
  CHECK(predict(leaf_tie, x).first == QualityControl::WithoutControl);

  const std::vector<double> wrong_width = {1.0, 2.0};
  CHECK_THROWS_AS(predict(unanimous, wrong_width), InvariantError);
}

TEST_CASE("prediction is invariant under tree permutation") {
  Rng rng = make_rng(31337);
  std::vector<LabeledFeatures> data;
  for (int i = 0; i < 30; ++i) {
    std::array<double, 6> x{};
    for (auto& v : x) v = static_cast<double>(bounded(rng, 10));
    data.push_back(labeled(x, i % 2 == 0 ? QualityControl::WithControl
                                         : QualityControl::WithoutControl));
  }
  ForestParams params;
  params.n_trees = 15;
  ForestModel model = train_forest(data, params, 99);

  std::vector<std::pair<QualityControl, double>> before;
  std::vector<std::array<double, 6>> probes;
  for (int i = 0; i < 50; ++i) {
    std::array<double, 6> x{};
    for (auto& v : x) v = static_cast<double>(bounded(rng, 10));
    probes.push_back(x);
    before.push_back(predict(model, x));
  }
  shuffle(model.trees, rng);
  for (std::size_t i = 0; i < probes.size(); ++i) {
    CHECK(predict(model, probes[i]) == before[i]);
  }
}

TEST_CASE("training is deterministic and thread-count independent") {
  Rng rng = make_rng(555);
  std::vector<LabeledFeatures> data;
  for (int i = 0; i < 80; ++i) {
    std::array<double, 6> x{};
    for (auto& v : x) v = uniform01(rng);
    data.push_back(labeled(x, bounded(rng, 2) == 0 ? QualityControl::WithoutControl
                                                   : QualityControl::WithControl));
  }
  ForestParams params;
  params.n_trees = 24;
  const ForestModel a = train_forest(data, params, 7);
  const ForestModel b = train_forest(data, params, 7);
  CHECK(a == b);

  ForestParams parallel = params;
  parallel.n_threads = 4;
  ForestModel c = train_forest(data, parallel, 7);
  c.params.n_threads = params.n_threads;  // the only permitted difference
  CHECK(c == a);

  const ForestModel d = train_forest(data, params, 8);
  CHECK(d.trees != a.trees);
}

TEST_CASE("evaluation metrics on perfect and inverted predictors") {
  // model that reproduces the label from feature 2
  Tree stump(3);
  stump[0].feature = 2;
  stump[0].threshold = 0.5;
  stump[0].left = 1;
  stump[0].right = 2;
  stump[1].feature = -1;
  stump[1].counts = {7, 0};
  stump[2].feature = -1;
  stump[2].counts = {0, 7};
  const ForestModel model = hand_model({stump}, 6);

  std::vector<LabeledFeatures> test;
  for (int i = 0; i < 10; ++i) {
    std::array<double, 6> x{};
    x[2] = i % 2 == 0 ? 1.0 : 0.0;
    test.push_back(labeled(x, i % 2 == 0 ? QualityControl::WithControl
                                         : QualityControl::WithoutControl));
  }
  const Metrics good = evaluate(model, test);
  CHECK(good.accuracy == 1.0);
  CHECK(good.f1_with_control == 1.0);
  CHECK(good.f1_without_control == 1.0);
  CHECK(good.test_size() == 10);
  CHECK(good.confusion[0][0] == 5);
  CHECK(good.confusion[1][1] == 5);

  // flip the labels: everything is wrong
  for (auto& row : test) {
    row.label = row.label == QualityControl::WithControl ? QualityControl::WithoutControl
                                                         : QualityControl::WithControl;
  }
  const Metrics bad = evaluate(model, test);
  CHECK(bad.accuracy == 0.0);
  CHECK(bad.f1_with_control == 0.0);
  CHECK(bad.f1_without_control == 0.0);
}

TEST_CASE("importances are a distribution and zero for unused features") {
  Rng rng = make_rng(808);
  std::vector<LabeledFeatures> data;
  for (int i = 0; i < 60; ++i) {
    std::array<double, 6> x{};
    x[0] = static_cast<double>(i);  // only feature 0 carries signal (or varies)
    data.push_back(labeled(x, i < 30 ? QualityControl::WithoutControl
                                     : QualityControl::WithControl));
  }
  ForestParams params;
  params.n_trees = 12;
  const ForestModel model = train_forest(data, params, 6);
  double sum = 0.0;
  for (double v : model.importances) {
    CHECK(v >= 0.0);
    sum += v;
  }
  CHECK(sum == doctest::Approx(1.0).epsilon(1e-9));
  CHECK(model.importances[0] == doctest::Approx(1.0));
  for (int f = 1; f < 6; ++f) CHECK(model.importances[f] == 0.0);
  CHECK_FALSE(model.degenerate_importances);
  CHECK(feature_importances(model) == model.importances);
}

TEST_CASE("chosen splits never increase weighted child impurity") {
  Rng rng = make_rng(2024);
  Dataset data;
  for (int i = 0; i < 50; ++i) {
    data.rows.push_back({uniform01(rng), uniform01(rng)});
    data.labels.push_back(static_cast<int>(bounded(rng, 2)));
  }
  ForestParams params;
  params.n_trees = 5;
  params.n_candidate_features = 1;
  const ForestModel model = train_forest(data, params, 12, {"f0", "f1"});

  // replay every tree with its bootstrap sample is involved; instead verify
  // on the identity sample of a no-bootstrap tree
  ForestParams no_boot = params;
  no_boot.bootstrap = false;
  no_boot.n_trees = 1;
  const ForestModel single = train_forest(data, no_boot, 12, {"f0", "f1"});
  std::vector<int> all(data.rows.size());
  for (std::size_t i = 0; i < all.size(); ++i) all[i] = static_cast<int>(i);

  // every internal node must have non-negative local decrease
  struct Walker {
    const Dataset& data;
    const Tree& tree;
    void walk(int node, std::vector<int> subset) {
      const TreeNode& nd = tree[static_cast<std::size_t>(node)];
      if (nd.feature < 0) return;
      CHECK(node_local_decrease(data, subset, nd.feature, nd.threshold) >= 0.0);
      std::vector<int> left, right;
      for (int i : subset) {
        (data.rows[static_cast<std::size_t>(i)][static_cast<std::size_t>(nd.feature)] <=
                 nd.threshold
             ? left
             : right)
            .push_back(i);
      }
      walk(nd.left, std::move(left));
      walk(nd.right, std::move(right));
    }
  };
  Walker{data, single.trees[0]}.walk(0, all);
}
