#include "hyloc/forest.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <numeric>
#include <random>
#include <thread>

#include "json.hpp"

#include "hyloc/random.hpp"

namespace hyloc {

namespace {

constexpr int kForestFormatVersion = 1;

double gini(double positives, double total) {
    if (total <= 0.0) return 0.0;
    const double p = positives / total;
    return 2.0 * p * (1.0 - p);
}

struct SplitCandidate {
    int feature = -1;
    double threshold = 0.0;
    double decrease = -1.0;
};

// Best Gini split of `rows` on one feature; decrease stays negative when
// the feature admits no split that respects min_leaf.
SplitCandidate best_split_on(const std::vector<const LabeledInstance*>& rows, const std::vector<int>& members,
                             int feature, int min_leaf, double parent_gini,
                             std::vector<std::pair<double, bool>>& scratch) {
    scratch.clear();
    for (int r : members) scratch.emplace_back(rows[static_cast<std::size_t>(r)]->features[static_cast<std::size_t>(feature)],
                                               rows[static_cast<std::size_t>(r)]->buggy);
    std::sort(scratch.begin(), scratch.end());
    const auto n = static_cast<double>(scratch.size());
    double total_pos = 0.0;
    for (const auto& [v, b] : scratch) total_pos += b ? 1.0 : 0.0;

    SplitCandidate best;
    best.feature = feature;
    double left_pos = 0.0;
    for (std::size_t i = 1; i < scratch.size(); ++i) {
        left_pos += scratch[i - 1].second ? 1.0 : 0.0;
        if (!(scratch[i - 1].first < scratch[i].first)) continue;
        const auto nl = static_cast<double>(i);
        const double nr = n - nl;
        if (nl < min_leaf || nr < min_leaf) continue;
        const double child = (nl / n) * gini(left_pos, nl) + (nr / n) * gini(total_pos - left_pos, nr);
        const double decrease = parent_gini - child;
        if (decrease > best.decrease) {
            const double lo = scratch[i - 1].first;
            const double hi = scratch[i].first;
            double threshold = lo + (hi - lo) / 2.0;
            if (!(threshold < hi)) threshold = lo;
            best.threshold = threshold;
            best.decrease = decrease;
        }
    }
    return best;
}

}  // namespace

void ForestParams::validate() const {
    if (trees < 1) throw UsageError("forest needs at least one tree");
    if (max_depth < 0) throw UsageError("max_depth must be >= 0 (0 = unbounded)");
    if (min_leaf < 1) throw UsageError("min_leaf must be >= 1");
    if (feature_subset_size < 0) throw UsageError("feature_subset_size must be >= 0");
}

// ---- DecisionTree ----

DecisionTree::DecisionTree(std::vector<TreeNode> nodes, std::uint64_t seed) : nodes_(std::move(nodes)), seed_(seed) {
    if (nodes_.empty()) throw DataError("decision tree has no nodes");
    const auto count = static_cast<int>(nodes_.size());
    for (const auto& node : nodes_) {
        if (node.feature >= 0 && (node.left <= 0 || node.left >= count || node.right <= 0 || node.right >= count))
            throw DataError("decision tree has a dangling child index");
    }
}

double DecisionTree::predict(std::span<const double> x) const {
    std::size_t i = 0;
    while (nodes_[i].feature >= 0) {
        const auto& node = nodes_[i];
        i = static_cast<std::size_t>(x[static_cast<std::size_t>(node.feature)] <= node.threshold ? node.left
                                                                                                  : node.right);
    }
    return nodes_[i].p_buggy;
}

int DecisionTree::depth() const {
    std::vector<int> depth(nodes_.size(), 0);
    int deepest = 0;
    for (std::size_t i = 0; i < nodes_.size(); ++i) {
        const auto& node = nodes_[i];
        deepest = std::max(deepest, depth[i]);
        if (node.feature >= 0) {
            depth[static_cast<std::size_t>(node.left)] = depth[i] + 1;
            depth[static_cast<std::size_t>(node.right)] = depth[i] + 1;
        }
    }
    return deepest;
}

DecisionTree grow_tree(const std::vector<const LabeledInstance*>& rows, std::size_t feature_count,
                       const ForestParams& params, std::uint64_t seed, std::vector<double>& importance) {
    std::mt19937_64 rng(seed);
    importance.assign(feature_count, 0.0);
    const std::size_t subset = params.feature_subset_size > 0
                                   ? std::min<std::size_t>(static_cast<std::size_t>(params.feature_subset_size), feature_count)
                                   : static_cast<std::size_t>(std::ceil(std::sqrt(static_cast<double>(feature_count))));
    const auto total = static_cast<double>(rows.size());

    struct Pending {
        std::vector<int> members;
        std::size_t node;
        int depth;
    };
    std::vector<TreeNode> nodes(1);
    std::vector<Pending> stack;
    {
        std::vector<int> all(rows.size());
        std::iota(all.begin(), all.end(), 0);
        stack.push_back({std::move(all), 0, 0});
    }
    std::vector<int> order(feature_count);
    std::vector<std::pair<double, bool>> scratch;

    while (!stack.empty()) {
        Pending work = std::move(stack.back());
        stack.pop_back();
        const auto n = static_cast<double>(work.members.size());
        double positives = 0.0;
        for (int r : work.members) positives += rows[static_cast<std::size_t>(r)]->buggy ? 1.0 : 0.0;
        nodes[work.node].p_buggy = n > 0 ? positives / n : 0.0;

        const bool pure = positives == 0.0 || positives == n;
        const bool too_deep = params.max_depth > 0 && work.depth >= params.max_depth;
        if (pure || too_deep || n < 2.0 * params.min_leaf) continue;

        const double parent_gini = gini(positives, n);
        SplitCandidate best;
        std::iota(order.begin(), order.end(), 0);
        // Draw features without replacement; look past the subset only while
        // no valid split has been found.
        for (std::size_t j = 0; j < feature_count; ++j) {
            const auto pick = j + static_cast<std::size_t>(uniform_index(rng, feature_count - j));
            std::swap(order[j], order[pick]);
            const auto candidate =
                best_split_on(rows, work.members, order[j], params.min_leaf, parent_gini, scratch);
            if (candidate.decrease > best.decrease) best = candidate;
            if (j + 1 >= subset && best.decrease >= 0.0) break;
        }
        if (best.decrease < 0.0) continue;

        importance[static_cast<std::size_t>(best.feature)] += (n / total) * best.decrease;
        Pending left{{}, nodes.size(), work.depth + 1};
        Pending right{{}, nodes.size() + 1, work.depth + 1};
        for (int r : work.members) {
            const double v = rows[static_cast<std::size_t>(r)]->features[static_cast<std::size_t>(best.feature)];
            (v <= best.threshold ? left.members : right.members).push_back(r);
        }
        auto& node = nodes[work.node];
        node.feature = best.feature;
        node.threshold = best.threshold;
        node.left = static_cast<int>(left.node);
        node.right = static_cast<int>(right.node);
        nodes.emplace_back();
        nodes.emplace_back();
        stack.push_back(std::move(right));
        stack.push_back(std::move(left));
    }
    return DecisionTree(std::move(nodes), seed);
}

// ---- ForestModel ----

ForestModel::ForestModel(std::vector<std::string> feature_names, ForestParams params, std::vector<DecisionTree> trees,
                         std::vector<double> importances)
    : feature_names_(std::move(feature_names)),
      params_(params),
      trees_(std::move(trees)),
      importances_(std::move(importances)) {
    if (trees_.empty()) throw DataError("forest has no trees");
    if (importances_.size() != feature_names_.size()) throw DataError("importance vector does not match features");
    for (const auto& tree : trees_)
        for (const auto& node : tree.nodes())
            if (node.feature >= static_cast<int>(feature_names_.size()))
                throw DataError("tree split references feature " + std::to_string(node.feature) +
                                " outside the layout");
}

std::vector<double> ForestModel::tree_probabilities(std::span<const double> x) const {
    if (x.size() != feature_names_.size())
        throw DataError("feature vector has " + std::to_string(x.size()) + " entries, model expects " +
                        std::to_string(feature_names_.size()));
    std::vector<double> out;
    out.reserve(trees_.size());
    for (const auto& tree : trees_) out.push_back(tree.predict(x));
    return out;
}

std::vector<std::pair<std::string, double>> ForestModel::ranked_importances() const {
    std::vector<std::size_t> idx(importances_.size());
    std::iota(idx.begin(), idx.end(), 0);
    std::stable_sort(idx.begin(), idx.end(), [&](std::size_t a, std::size_t b) { return importances_[a] > importances_[b]; });
    std::vector<std::pair<std::string, double>> out;
    for (auto i : idx) out.emplace_back(feature_names_[i], importances_[i]);
    return out;
}

std::string ForestModel::to_json() const {
    nlohmann::json trees = nlohmann::json::array();
    for (const auto& tree : trees_) {
        nlohmann::json nodes = nlohmann::json::array();
        for (const auto& n : tree.nodes()) nodes.push_back({n.feature, n.threshold, n.left, n.right, n.p_buggy});
        trees.push_back({{"seed", tree.seed()}, {"nodes", std::move(nodes)}});
    }
    nlohmann::json doc = {
        {"format", "hyloc-forest"},
        {"version", kForestFormatVersion},
        {"feature_names", feature_names_},
        {"params",
         {{"trees", params_.trees},
          {"max_depth", params_.max_depth},
          {"min_leaf", params_.min_leaf},
          {"feature_subset_size", params_.feature_subset_size},
          {"master_seed", params_.master_seed}}},
        {"importances", importances_},
        {"trees", std::move(trees)},
    };
    return doc.dump();
}

ForestModel ForestModel::from_json(std::string_view text) {
    try {
        const auto doc = nlohmann::json::parse(text);
        if (doc.at("format") != "hyloc-forest") throw DataError("not a forest model file");
        if (doc.at("version").get<int>() != kForestFormatVersion)
            throw DataError("unsupported forest model version " + doc.at("version").dump());
        ForestParams params;
        const auto& p = doc.at("params");
        params.trees = p.at("trees").get<int>();
        params.max_depth = p.at("max_depth").get<int>();
        params.min_leaf = p.at("min_leaf").get<int>();
        params.feature_subset_size = p.at("feature_subset_size").get<int>();
        params.master_seed = p.at("master_seed").get<std::uint64_t>();
        std::vector<DecisionTree> trees;
        for (const auto& t : doc.at("trees")) {
            std::vector<TreeNode> nodes;
            for (const auto& n : t.at("nodes"))
                nodes.push_back({n.at(0).get<int>(), n.at(1).get<double>(), n.at(2).get<int>(), n.at(3).get<int>(),
                                 n.at(4).get<double>()});
            trees.emplace_back(std::move(nodes), t.at("seed").get<std::uint64_t>());
        }
        return ForestModel(doc.at("feature_names").get<std::vector<std::string>>(), params, std::move(trees),
                           doc.at("importances").get<std::vector<double>>());
    } catch (const nlohmann::json::exception& e) {
        throw DataError(std::string("malformed forest model: ") + e.what());
    }
}

// ---- training ----

ForestModel train_forest(const std::vector<LabeledInstance>& instances, const ForestParams& params,
                         std::vector<std::string> feature_names) {
    params.validate();
    if (instances.empty()) throw DataError("cannot train a forest without instances");
    const std::size_t d = feature_names.size();
    std::size_t positives = 0;
    for (const auto& inst : instances) {
        if (inst.features.size() != d)
            throw DataError("instance " + inst.key.file + ":" + std::to_string(inst.key.line_no) + " has " +
                            std::to_string(inst.features.size()) + " features, layout has " + std::to_string(d));
        positives += inst.buggy ? 1 : 0;
    }
    if (positives == 0 || positives == instances.size())
        throw DataError("cannot train: training data contains a single relevance class");

    const auto tree_count = static_cast<std::size_t>(params.trees);
    std::vector<DecisionTree> trees(tree_count);
    std::vector<std::vector<double>> importances(tree_count);

    auto build = [&](std::size_t k) {
        const std::uint64_t tree_seed = derive_seed(params.master_seed, k);
        std::mt19937_64 rng(derive_seed(tree_seed, 0));
        std::vector<const LabeledInstance*> sample;
        sample.reserve(instances.size());
        for (std::size_t i = 0; i < instances.size(); ++i)
            sample.push_back(&instances[static_cast<std::size_t>(uniform_index(rng, instances.size()))]);
        trees[k] = grow_tree(sample, d, params, derive_seed(tree_seed, 1), importances[k]);
    };

    std::size_t workers = params.threads > 0 ? static_cast<std::size_t>(params.threads)
                                             : std::max(1u, std::thread::hardware_concurrency());
    workers = std::min(workers, tree_count);
    if (workers <= 1) {
        for (std::size_t k = 0; k < tree_count; ++k) build(k);
    } else {
        std::atomic<std::size_t> next{0};
        std::vector<std::jthread> pool;
        for (std::size_t w = 0; w < workers; ++w)
            pool.emplace_back([&] {
                for (std::size_t k = next++; k < tree_count; k = next++) build(k);
            });
    }

    // Mean of per-tree normalized importances over trees that split at least once.
    std::vector<double> mean(d, 0.0);
    std::size_t contributing = 0;
    for (const auto& imp : importances) {
        const double sum = std::accumulate(imp.begin(), imp.end(), 0.0);
        if (sum <= 0.0) continue;
        ++contributing;
        for (std::size_t f = 0; f < d; ++f) mean[f] += imp[f] / sum;
    }
    const double total = std::accumulate(mean.begin(), mean.end(), 0.0);
    if (contributing == 0 || total <= 0.0) {
        std::fill(mean.begin(), mean.end(), 1.0 / static_cast<double>(d));
    } else {
        for (auto& v : mean) v /= total;
    }
    return ForestModel(std::move(feature_names), params, std::move(trees), std::move(mean));
}

}  // namespace hyloc
