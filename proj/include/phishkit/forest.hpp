#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "phishkit/sparse.hpp"

namespace phishkit::forest {

// Flat node pool; nodes[0] is the root. feature < 0 marks a leaf. Routing:
// value <= threshold goes left.
struct TreeNode {
    std::int32_t feature = -1;
    double threshold = 0.0;
    std::int32_t left = -1;
    std::int32_t right = -1;
    std::uint64_t count0 = 0;
    std::uint64_t count1 = 0;

    bool is_leaf() const { return feature < 0; }
};

struct Tree {
    std::vector<TreeNode> nodes;
};

struct ForestTrainConfig {
    int n_estimators = 100;
    bool bootstrap = true;       // with-replacement resample of size N per tree
    int max_depth = -1;          // -1 = unlimited
    int min_samples_leaf = 1;
    int max_features = 0;        // 0 = ceil(sqrt(V)), -1 = all, k > 0 = k
    std::uint64_t seed = 42;
    int n_threads = 1;           // trees are order-independent; result identical
};

struct RandomForest {
    std::vector<Tree> trees;
    ForestTrainConfig config;
    std::uint32_t n_features = 0;
};

enum class PredictMode { mean_proba, vote };

// 1 - sum(p_i^2) over the two class proportions. Total must be >= 1.
double gini(std::uint64_t c0, std::uint64_t c1);

struct SplitChoice {
    std::uint32_t feature = 0;
    double threshold = 0.0;
    double impurity_decrease = 0.0;
};

// Best threshold over the candidate features: midpoints between consecutive
// distinct sorted values among the rows, sparse zeros included as value 0.
// Ties break toward the lowest feature index, then lowest threshold. Returns
// nullopt when no split strictly decreases weighted Gini impurity. Rows may
// repeat (bootstrap multiplicity).
std::optional<SplitChoice> best_split(std::span<const SparseVector> X,
                                      std::span<const int> y,
                                      std::span<const std::size_t> rows,
                                      std::span<const std::uint32_t> candidate_features,
                                      int min_samples_leaf = 1);

// Recursive CART growth from the given rows. Per-node candidate features are
// drawn without replacement from the tree's generator, which advances through
// nodes in preorder (left subtree before right). With bootstrap enabled the
// resample is drawn from the same generator before any node work.
Tree grow_tree(std::span<const SparseVector> X, std::span<const int> y,
               std::uint32_t n_features, const ForestTrainConfig& config,
               std::uint64_t tree_seed);

// Trains config.n_estimators trees with per-tree seeds mix_seed(seed, index).
// Parallel training (config.n_threads > 1) yields the identical forest.
RandomForest train_forest(std::span<const SparseVector> X, std::span<const int> y,
                          std::uint32_t n_features, const ForestTrainConfig& config);

// Fraction of positive training samples in the leaf x routes to.
double tree_proba(const Tree& tree, const SparseVector& x);

struct ForestPrediction {
    int label = 0;
    double probability = 0.0;
};

// mean_proba averages per-tree leaf fractions; vote takes the majority of
// per-tree argmax labels. Ties classify as positive either way.
ForestPrediction predict_forest(const RandomForest& forest, const SparseVector& x,
                                PredictMode mode = PredictMode::mean_proba);

std::string to_json_string(const RandomForest& forest);
RandomForest from_json_string(const std::string& text);
void save(const RandomForest& forest, const std::string& path);
RandomForest load(const std::string& path);

} // namespace phishkit::forest
