#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "hyloc/features.hpp"

namespace hyloc {

struct ForestParams {
    int trees = 100;
    int max_depth = 0;  // 0 = unbounded
    int min_leaf = 1;
    int feature_subset_size = 0;  // 0 = ceil(sqrt(feature count))
    std::uint64_t master_seed = 0;
    int threads = 0;  // 0 = hardware concurrency; results do not depend on it

    void validate() const;
};

struct TreeNode {
    int feature = -1;  // -1 marks a leaf
    double threshold = 0.0;
    int left = -1;
    int right = -1;
    double p_buggy = 0.0;  // fraction of buggy training rows reaching the node
};

// Axis-aligned binary tree; rows with x[feature] <= threshold go left.
class DecisionTree {
public:
    DecisionTree() = default;
    DecisionTree(std::vector<TreeNode> nodes, std::uint64_t seed);

    double predict(std::span<const double> x) const;
    const std::vector<TreeNode>& nodes() const noexcept { return nodes_; }
    std::uint64_t seed() const noexcept { return seed_; }
    int depth() const;

private:
    std::vector<TreeNode> nodes_;
    std::uint64_t seed_ = 0;
};

class ForestModel {
public:
    ForestModel() = default;
    ForestModel(std::vector<std::string> feature_names, ForestParams params, std::vector<DecisionTree> trees,
                std::vector<double> importances);

    const std::vector<std::string>& feature_names() const noexcept { return feature_names_; }
    std::size_t feature_count() const noexcept { return feature_names_.size(); }
    const ForestParams& params() const noexcept { return params_; }
    const std::vector<DecisionTree>& trees() const noexcept { return trees_; }
    const std::vector<double>& importances() const noexcept { return importances_; }

    // Per-tree P(buggy | x) in tree order.
    std::vector<double> tree_probabilities(std::span<const double> x) const;

    // Names and importances sorted by decreasing importance (ties by index).
    std::vector<std::pair<std::string, double>> ranked_importances() const;

    std::string to_json() const;
    static ForestModel from_json(std::string_view text);

private:
    std::vector<std::string> feature_names_;
    ForestParams params_;
    std::vector<DecisionTree> trees_;
    std::vector<double> importances_;
};

// Bagged CART forest with Gini impurity. Each tree sees a bootstrap sample and
// draws a fresh random feature subset at every split; tree k is seeded from
// (master_seed, k). Throws DataError unless both classes are present.
ForestModel train_forest(const std::vector<LabeledInstance>& instances, const ForestParams& params,
                         std::vector<std::string> feature_names);

// Single CART tree on explicit rows (no bootstrap), used by train_forest.
// `importance` accumulates weighted impurity decrease per feature.
DecisionTree grow_tree(const std::vector<const LabeledInstance*>& rows, std::size_t feature_count,
                       const ForestParams& params, std::uint64_t seed, std::vector<double>& importance);

}  // namespace hyloc
