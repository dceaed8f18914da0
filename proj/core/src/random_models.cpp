/**
 * \file random_models.cpp
 *
 * Copyright 2026 the treeglitch authors.
 * License: Apache License 2.0
 */

#include "treeglitch/random_models.hpp"

#include <algorithm>
#include <random>

#include "treeglitch/errors.hpp"

namespace treeglitch {

namespace {

int build_random_subtree(Tree& tree, std::mt19937_64& rng, const RandomModelSpec& spec,
                         int depth, bool force_deep) {
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    const bool split =
        depth < spec.max_depth &&
        (depth == 0 || force_deep || unit(rng) < spec.split_prob);
    if (!split) {
        tree.nodes.push_back(
            Node::leaf(spec.leaf_lo + (spec.leaf_hi - spec.leaf_lo) * unit(rng)));
        return static_cast<int>(tree.nodes.size()) - 1;
    }
    const int me = static_cast<int>(tree.nodes.size());
    tree.nodes.emplace_back();
    const int feature = std::uniform_int_distribution<int>(0, spec.features - 1)(rng);
    const double threshold = unit(rng);
    const int t = build_random_subtree(tree, rng, spec, depth + 1, force_deep);
    const int f = build_random_subtree(tree, rng, spec, depth + 1, false);
    tree.nodes[me] = Node::internal(feature, threshold, t, f);
    return me;
}

FeatureSpace unit_space(int features) {
    std::vector<std::string> names;
    std::vector<FeatureBounds> bounds;
    for (int i = 0; i < features; ++i) {
        names.push_back("f" + std::to_string(i));
        bounds.push_back(FeatureBounds{0.0, 1.0});
    }
    return FeatureSpace(std::move(names), std::move(bounds));
}

} // namespace

Ensemble random_ensemble(const RandomModelSpec& spec) {
    if (spec.trees < 0 || spec.features <= 0 || spec.max_depth < 0)
        throw ArgumentError("random_ensemble: bad shape");
    std::mt19937_64 rng(spec.seed);
    Ensemble m;
    m.feature_space = unit_space(spec.features);
    for (int t = 0; t < spec.trees; ++t) {
        Tree tree;
        tree.root = build_random_subtree(tree, rng, spec, 0, spec.force_max_depth);
        m.trees.push_back(std::move(tree));
    }
    m.validate();
    return m;
}

Ensemble monotone_ensemble(std::uint64_t seed, int trees, int depth, int features) {
    if (trees <= 0 || depth <= 0 || features <= 0)
        throw ArgumentError("monotone_ensemble: bad shape");
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> unit(0.0, 1.0);

    Ensemble m;
    m.feature_space = unit_space(features);
    for (int t = 0; t < trees; ++t) {
        const int feature = std::uniform_int_distribution<int>(0, features - 1)(rng);
        std::vector<double> thresholds(depth);
        for (double& v : thresholds) v = unit(rng);
        std::sort(thresholds.begin(), thresholds.end());
        std::vector<double> leaves(depth + 1);
        for (double& v : leaves) v = unit(rng) * 2.0 - 1.0;
        std::sort(leaves.begin(), leaves.end());

        // staircase chain: v <= t_k ? leaf_k : next level
        Tree tree;
        for (int k = 0; k < depth; ++k) {
            const int node = static_cast<int>(tree.nodes.size());
            tree.nodes.push_back(Node::internal(feature, thresholds[k], node + 1, node + 2));
            tree.nodes.push_back(Node::leaf(leaves[k]));
        }
        tree.nodes.push_back(Node::leaf(leaves[depth]));
        tree.root = 0;
        m.trees.push_back(std::move(tree));
    }
    m.validate();
    return m;
}

} // namespace treeglitch
