#include "phishkit/forest.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <functional>
#include <limits>
#include <stdexcept>
#include <thread>

#include <nlohmann/json.hpp>

#include "phishkit/errors.hpp"
#include "phishkit/rng.hpp"

namespace phishkit::forest {

using nlohmann::json;

namespace {

constexpr int kFormatVersion = 1;

// Column-major (row, value) lists per feature, sorted by row. Shared read-only
// across trees, so parallel training needs no locking.
struct ColumnIndex {
    std::vector<std::vector<std::pair<std::uint32_t, double>>> cols;

    ColumnIndex(std::span<const SparseVector> X, std::uint32_t n_features)
        : cols(n_features) {
        for (std::uint32_t r = 0; r < X.size(); ++r) {
            const SparseVector& x = X[r];
            for (std::size_t j = 0; j < x.indices.size(); ++j) {
                cols[x.indices[j]].emplace_back(r, x.values[j]);
            }
        }
    }
};

struct ValueBucket {
    double value;
    std::uint64_t count;
    std::uint64_t count1;
};

// Per-tree scratch. mult holds the current node's per-row multiplicity and is
// cleared after each split search.
struct Workspace {
    std::vector<std::uint32_t> mult;
    std::vector<ValueBucket> buckets;

    explicit Workspace(std::size_t n_rows) : mult(n_rows, 0) {}
};

std::optional<SplitChoice> find_best_split(const ColumnIndex& columns,
                                           std::span<const int> y,
                                           std::span<const std::size_t> rows,
                                           std::span<const std::uint32_t> candidates,
                                           int min_samples_leaf, Workspace& ws) {
    const std::uint64_t total = rows.size();
    if (total < 2) return std::nullopt;

    std::uint64_t c1 = 0;
    for (std::size_t r : rows) {
        ++ws.mult[r];
        c1 += static_cast<std::uint64_t>(y[r]);
    }
    const std::uint64_t c0 = total - c1;

    std::optional<SplitChoice> best;
    if (c0 != 0 && c1 != 0) {
        const double parent = gini(c0, c1);
        const auto min_leaf = static_cast<std::uint64_t>(min_samples_leaf);
        const double inv_total = 1.0 / static_cast<double>(total);

        for (std::uint32_t f : candidates) {
            auto& buckets = ws.buckets;
            buckets.clear();
            std::uint64_t nz = 0, nz1 = 0;
            for (const auto& [row, value] : columns.cols[f]) {
                const std::uint32_t m = ws.mult[row];
                if (m == 0) continue;
                const auto m1 = static_cast<std::uint64_t>(m) * y[row];
                buckets.push_back({value, m, m1});
                nz += m;
                nz1 += m1;
            }
            if (nz < total) {
                buckets.push_back({0.0, total - nz, c1 - nz1});
            }
            if (buckets.size() < 2) continue;
            std::sort(buckets.begin(), buckets.end(),
                      [](const ValueBucket& a, const ValueBucket& b) {
                          return a.value < b.value;
                      });
            // Merge equal values so thresholds sit between distinct ones.
            std::size_t w = 0;
            for (std::size_t i = 1; i < buckets.size(); ++i) {
                if (buckets[i].value == buckets[w].value) {
                    buckets[w].count += buckets[i].count;
                    buckets[w].count1 += buckets[i].count1;
                } else {
                    buckets[++w] = buckets[i];
                }
            }
            buckets.resize(w + 1);

            std::uint64_t left_n = 0, left_1 = 0;
            for (std::size_t k = 0; k + 1 < buckets.size(); ++k) {
                left_n += buckets[k].count;
                left_1 += buckets[k].count1;
                const std::uint64_t right_n = total - left_n;
                if (left_n < min_leaf || right_n < min_leaf) continue;
                const double mid =
                    0.5 * (buckets[k].value + buckets[k + 1].value);
                if (!(mid < buckets[k + 1].value)) continue; // rounding collapse
                const std::uint64_t right_1 = c1 - left_1;
                const double decrease =
                    parent -
                    static_cast<double>(left_n) * inv_total * gini(left_n - left_1, left_1) -
                    static_cast<double>(right_n) * inv_total * gini(right_n - right_1, right_1);
                const bool better =
                    !best || decrease > best->impurity_decrease ||
                    (decrease == best->impurity_decrease &&
                     (f < best->feature ||
                      (f == best->feature && mid < best->threshold)));
                if (better) {
                    best = SplitChoice{f, mid, decrease};
                }
            }
        }
    }

    for (std::size_t r : rows) ws.mult[r] = 0;
    if (best && best->impurity_decrease > 0.0) return best;
    return std::nullopt;
}

std::uint32_t resolve_max_features(int max_features, std::uint32_t n_features) {
    if (max_features < 0) return n_features;
    if (max_features == 0) {
        const auto k = static_cast<std::uint32_t>(
            std::ceil(std::sqrt(static_cast<double>(n_features))));
        return std::min(std::max<std::uint32_t>(k, 1), n_features);
    }
    return std::min(static_cast<std::uint32_t>(max_features), n_features);
}

Tree grow_tree_impl(const ColumnIndex& columns, std::span<const SparseVector> X,
                    std::span<const int> y, std::uint32_t n_features,
                    const ForestTrainConfig& config, std::uint64_t tree_seed) {
    Rng rng(tree_seed);
    const std::size_t n = X.size();

    std::vector<std::size_t> root_rows;
    root_rows.reserve(n);
    if (config.bootstrap) {
        for (std::size_t i = 0; i < n; ++i) {
            root_rows.push_back(static_cast<std::size_t>(rng.below(n)));
        }
    } else {
        for (std::size_t i = 0; i < n; ++i) root_rows.push_back(i);
    }

    const std::uint32_t k = resolve_max_features(config.max_features, n_features);
    Workspace ws(n);
    Tree tree;

    std::function<std::int32_t(std::vector<std::size_t>&, int)> build =
        [&](std::vector<std::size_t>& rows, int depth) -> std::int32_t {
        const auto idx = static_cast<std::int32_t>(tree.nodes.size());
        tree.nodes.emplace_back();
        std::uint64_t c1 = 0;
        for (std::size_t r : rows) c1 += static_cast<std::uint64_t>(y[r]);
        tree.nodes[idx].count0 = rows.size() - c1;
        tree.nodes[idx].count1 = c1;

        const bool pure = (c1 == 0 || c1 == rows.size());
        const bool depth_capped = config.max_depth >= 0 && depth >= config.max_depth;
        const bool too_small =
            rows.size() < 2 * static_cast<std::size_t>(config.min_samples_leaf) ||
            rows.size() < 2;
        if (pure || depth_capped || too_small) return idx;

        const auto candidates = rng.sample_distinct_u32(n_features, k);
        const auto split = find_best_split(columns, y, rows, candidates,
                                           config.min_samples_leaf, ws);
        if (!split) return idx;

        std::vector<std::size_t> left_rows, right_rows;
        left_rows.reserve(rows.size());
        right_rows.reserve(rows.size());
        for (std::size_t r : rows) {
            if (X[r].at(split->feature) <= split->threshold) {
                left_rows.push_back(r);
            } else {
                right_rows.push_back(r);
            }
        }
        tree.nodes[idx].feature = static_cast<std::int32_t>(split->feature);
        tree.nodes[idx].threshold = split->threshold;
        rows.clear();
        rows.shrink_to_fit();
        const std::int32_t left = build(left_rows, depth + 1);
        tree.nodes[idx].left = left;
        const std::int32_t right = build(right_rows, depth + 1);
        tree.nodes[idx].right = right;
        return idx;
    };

    build(root_rows, 0);
    return tree;
}

void validate_rows(std::span<const SparseVector> X, std::uint32_t n_features) {
    for (const SparseVector& x : X) {
        if (!x.empty() && x.indices.back() >= n_features) {
            throw std::invalid_argument("forest: feature index exceeds n_features");
        }
    }
}

json tree_to_json(const Tree& tree, std::int32_t idx) {
    const TreeNode& node = tree.nodes[idx];
    if (node.is_leaf()) {
        return json{{"counts", json::array({node.count0, node.count1})}};
    }
    return json{{"feature", node.feature},
                {"threshold", node.threshold},
                {"left", tree_to_json(tree, node.left)},
                {"right", tree_to_json(tree, node.right)}};
}

std::int32_t tree_from_json(const json& j, Tree& tree) {
    const auto idx = static_cast<std::int32_t>(tree.nodes.size());
    tree.nodes.emplace_back();
    if (j.contains("counts")) {
        tree.nodes[idx].count0 = j.at("counts").at(0).get<std::uint64_t>();
        tree.nodes[idx].count1 = j.at("counts").at(1).get<std::uint64_t>();
        if (tree.nodes[idx].count0 + tree.nodes[idx].count1 == 0) {
            throw DataError("forest: leaf with zero counts");
        }
        return idx;
    }
    tree.nodes[idx].feature = j.at("feature").get<std::int32_t>();
    tree.nodes[idx].threshold = j.at("threshold").get<double>();
    if (tree.nodes[idx].feature < 0) throw DataError("forest: bad feature index");
    const std::int32_t left = tree_from_json(j.at("left"), tree);
    tree.nodes[idx].left = left;
    const std::int32_t right = tree_from_json(j.at("right"), tree);
    tree.nodes[idx].right = right;
    return idx;
}

} // namespace

double gini(std::uint64_t c0, std::uint64_t c1) {
    const std::uint64_t total = c0 + c1;
    if (total == 0) {
        throw std::invalid_argument("gini: zero total");
    }
    const double t = static_cast<double>(total);
    const double p0 = static_cast<double>(c0) / t;
    const double p1 = static_cast<double>(c1) / t;
    return 1.0 - (p0 * p0 + p1 * p1);
}

std::optional<SplitChoice> best_split(std::span<const SparseVector> X,
                                      std::span<const int> y,
                                      std::span<const std::size_t> rows,
                                      std::span<const std::uint32_t> candidate_features,
                                      int min_samples_leaf) {
    std::uint32_t n_features = 0;
    for (std::uint32_t f : candidate_features) n_features = std::max(n_features, f + 1);
    for (const SparseVector& x : X) {
        if (!x.empty()) n_features = std::max(n_features, x.indices.back() + 1);
    }
    const ColumnIndex columns(X, n_features);
    Workspace ws(X.size());
    return find_best_split(columns, y, rows, candidate_features, min_samples_leaf, ws);
}

Tree grow_tree(std::span<const SparseVector> X, std::span<const int> y,
               std::uint32_t n_features, const ForestTrainConfig& config,
               std::uint64_t tree_seed) {
    if (X.empty() || X.size() != y.size()) {
        throw std::invalid_argument("grow_tree: need |X| == |y| >= 1");
    }
    validate_rows(X, n_features);
    const ColumnIndex columns(X, n_features);
    return grow_tree_impl(columns, X, y, n_features, config, tree_seed);
}

RandomForest train_forest(std::span<const SparseVector> X, std::span<const int> y,
                          std::uint32_t n_features, const ForestTrainConfig& config) {
    if (config.n_estimators < 1) {
        throw std::invalid_argument("train_forest: n_estimators must be >= 1");
    }
    if (config.min_samples_leaf < 1) {
        throw std::invalid_argument("train_forest: min_samples_leaf must be >= 1");
    }
    if (X.empty() || X.size() != y.size()) {
        throw std::invalid_argument("train_forest: need |X| == |y| >= 1");
    }
    validate_rows(X, n_features);

    const ColumnIndex columns(X, n_features);
    RandomForest forest;
    forest.config = config;
    forest.n_features = n_features;
    forest.trees.resize(static_cast<std::size_t>(config.n_estimators));

    auto build_range = [&](std::size_t begin, std::size_t end) {
        for (std::size_t i = begin; i < end; ++i) {
            forest.trees[i] = grow_tree_impl(columns, X, y, n_features, config,
                                             mix_seed(config.seed, i));
        }
    };

    const int threads = std::max(config.n_threads, 1);
    if (threads == 1 || config.n_estimators == 1) {
        build_range(0, forest.trees.size());
    } else {
        std::vector<std::thread> pool;
        const std::size_t per =
            (forest.trees.size() + static_cast<std::size_t>(threads) - 1) /
            static_cast<std::size_t>(threads);
        for (int t = 0; t < threads; ++t) {
            const std::size_t begin = static_cast<std::size_t>(t) * per;
            const std::size_t end = std::min(begin + per, forest.trees.size());
            if (begin >= end) break;
            pool.emplace_back(build_range, begin, end);
        }
        for (auto& th : pool) th.join();
    }
    return forest;
}

double tree_proba(const Tree& tree, const SparseVector& x) {
    std::int32_t idx = 0;
    while (!tree.nodes[idx].is_leaf()) {
        const TreeNode& node = tree.nodes[idx];
        idx = x.at(static_cast<std::uint32_t>(node.feature)) <= node.threshold
                  ? node.left
                  : node.right;
    }
    const TreeNode& leaf = tree.nodes[idx];
    return static_cast<double>(leaf.count1) /
           static_cast<double>(leaf.count0 + leaf.count1);
}

ForestPrediction predict_forest(const RandomForest& forest, const SparseVector& x,
                                PredictMode mode) {
    if (!x.empty() && x.indices.back() >= forest.n_features) {
        throw std::out_of_range("forest: feature index " +
                                std::to_string(x.indices.back()) +
                                " out of range for " +
                                std::to_string(forest.n_features) + " features");
    }
    double p = 0.0;
    if (mode == PredictMode::mean_proba) {
        for (const Tree& tree : forest.trees) p += tree_proba(tree, x);
        p /= static_cast<double>(forest.trees.size());
    } else {
        std::size_t votes = 0;
        for (const Tree& tree : forest.trees) {
            if (tree_proba(tree, x) >= 0.5) ++votes; // per-tree ties go positive
        }
        p = static_cast<double>(votes) / static_cast<double>(forest.trees.size());
    }
    return {p >= 0.5 ? 1 : 0, p};
}

std::string to_json_string(const RandomForest& forest) {
    json trees = json::array();
    for (const Tree& tree : forest.trees) {
        trees.push_back(tree_to_json(tree, 0));
    }
    // n_threads is an execution detail, not part of the model.
    json config{{"n_estimators", forest.config.n_estimators},
                {"bootstrap", forest.config.bootstrap},
                {"max_depth", forest.config.max_depth},
                {"min_samples_leaf", forest.config.min_samples_leaf},
                {"max_features", forest.config.max_features},
                {"seed", forest.config.seed}};
    json j{{"format_version", kFormatVersion},
           {"model_type", "random_forest"},
           {"n_features", forest.n_features},
           {"config", std::move(config)},
           {"trees", std::move(trees)}};
    return j.dump();
}

RandomForest from_json_string(const std::string& text) {
    json j;
    try {
        j = json::parse(text);
    } catch (const json::exception& e) {
        throw DataError(std::string("forest: bad model json: ") + e.what());
    }
    if (j.value("format_version", -1) != kFormatVersion) {
        throw DataError("forest: unsupported format_version");
    }
    if (j.value("model_type", "") != "random_forest") {
        throw DataError("forest: wrong model_type");
    }
    RandomForest forest;
    forest.n_features = j.at("n_features").get<std::uint32_t>();
    const auto& config = j.at("config");
    forest.config.n_estimators = config.at("n_estimators").get<int>();
    forest.config.bootstrap = config.at("bootstrap").get<bool>();
    forest.config.max_depth = config.at("max_depth").get<int>();
    forest.config.min_samples_leaf = config.at("min_samples_leaf").get<int>();
    forest.config.max_features = config.at("max_features").get<int>();
    forest.config.seed = config.at("seed").get<std::uint64_t>();
    for (const auto& t : j.at("trees")) {
        Tree tree;
        tree_from_json(t, tree);
        forest.trees.push_back(std::move(tree));
    }
    if (forest.trees.empty()) throw DataError("forest: no trees");
    return forest;
}

void save(const RandomForest& forest, const std::string& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw DataError("forest: cannot write " + path);
    out << to_json_string(forest) << '\n';
}

RandomForest load(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw DataError("forest: cannot open " + path);
    std::string text((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
    return from_json_string(text);
}

} // namespace phishkit::forest
