/**
 * \file ensemble.cpp
 *
 * Copyright 2026 the treeglitch authors.
 * License: Apache License 2.0
 */

#include "treeglitch/ensemble.hpp"

#include <algorithm>
#include <cmath>
#include <set>
#include <unordered_set>

#include "treeglitch/errors.hpp"

namespace treeglitch {

FeatureSpace::FeatureSpace(std::vector<std::string> names, std::vector<FeatureBounds> bounds)
    : names_(std::move(names)), bounds_(std::move(bounds)) {
    if (names_.size() != bounds_.size())
        throw ArgumentError("feature space: names/bounds size mismatch");
    std::unordered_set<std::string> seen;
    for (const auto& n : names_) {
        if (n.empty())
            throw StructureError("feature space: empty feature name");
        if (!seen.insert(n).second)
            throw StructureError("feature space: duplicate feature name '" + n + "'");
    }
    for (size_t i = 0; i < bounds_.size(); ++i) {
        if (!(bounds_[i].lo <= bounds_[i].hi))
            throw StructureError("feature space: lo > hi for feature '" + names_[i] + "'");
    }
}

int FeatureSpace::index_of(const std::string& name) const {
    for (size_t i = 0; i < names_.size(); ++i)
        if (names_[i] == name) return static_cast<int>(i);
    return -1;
}

bool FeatureSpace::contains(std::span<const double> x) const {
    if (static_cast<int>(x.size()) != size()) return false;
    for (int i = 0; i < size(); ++i)
        if (!bounds_[i].contains(x[i])) return false;
    return true;
}

double Tree::eval(std::span<const double> x) const {
    int id = root;
    // Any malformed structure is caught by validate(); here we only guard
    // against running off the node table.
    for (size_t steps = 0; steps <= nodes.size(); ++steps) {
        if (id < 0 || id >= static_cast<int>(nodes.size()))
            throw StructureError("tree eval: dangling child index " + std::to_string(id));
        const Node& n = nodes[id];
        if (n.is_leaf()) return n.value;
        const double v = x[n.feature];
        if (std::isnan(v))
            throw ArgumentError("tree eval: NaN input on feature index " +
                                std::to_string(n.feature));
        id = (v <= n.threshold) ? n.true_child : n.false_child;
    }
    throw StructureError("tree eval: cycle detected");
}

int Tree::depth() const {
    // Iterative DFS carrying depth; validate() guarantees acyclicity so the
    // stack is bounded by the node count.
    int best = 0;
    std::vector<std::pair<int, int>> stack{{root, 0}};
    while (!stack.empty()) {
        auto [id, d] = stack.back();
        stack.pop_back();
        if (id < 0 || id >= static_cast<int>(nodes.size()))
            throw StructureError("tree depth: dangling child index " + std::to_string(id));
        const Node& n = nodes[id];
        if (n.is_leaf()) {
            best = std::max(best, d);
        } else {
            stack.emplace_back(n.true_child, d + 1);
            stack.emplace_back(n.false_child, d + 1);
        }
    }
    return best;
}

int Tree::leaf_count() const {
    int c = 0;
    for (const Node& n : nodes)
        if (n.is_leaf()) ++c;
    return c;
}

int Tree::internal_count() const { return static_cast<int>(nodes.size()) - leaf_count(); }

double Tree::max_abs_leaf() const {
    double m = 0.0;
    for (const Node& n : nodes)
        if (n.is_leaf()) m = std::max(m, std::abs(n.value));
    return m;
}

double Tree::min_leaf() const {
    double m = 0.0;
    bool first = true;
    for (const Node& n : nodes)
        if (n.is_leaf()) {
            m = first ? n.value : std::min(m, n.value);
            first = false;
        }
    return m;
}

double Tree::max_leaf() const {
    double m = 0.0;
    bool first = true;
    for (const Node& n : nodes)
        if (n.is_leaf()) {
            m = first ? n.value : std::max(m, n.value);
            first = false;
        }
    return m;
}

void Tree::validate(int num_features) const {
    const int n = static_cast<int>(nodes.size());
    if (n == 0) throw StructureError("tree: no nodes");
    if (root < 0 || root >= n)
        throw StructureError("tree: root index " + std::to_string(root) + " out of range");

    std::vector<int> parents(n, 0);
    for (int id = 0; id < n; ++id) {
        const Node& node = nodes[id];
        if (node.is_leaf()) continue;
        if (node.feature >= num_features)
            throw StructureError("tree: node " + std::to_string(id) + " references feature " +
                                 std::to_string(node.feature) + " outside the feature space");
        for (int child : {node.true_child, node.false_child}) {
            if (child < 0 || child >= n)
                throw StructureError("tree: node " + std::to_string(id) +
                                     " has dangling child " + std::to_string(child));
        }
        if (node.true_child == node.false_child)
            throw StructureError("tree: node " + std::to_string(id) +
                                 " has identical children");
        ++parents[node.true_child];
        ++parents[node.false_child];
    }
    if (parents[root] != 0)
        throw StructureError("tree: root has a parent");
    for (int id = 0; id < n; ++id) {
        if (id == root) continue;
        if (parents[id] == 0)
            throw StructureError("tree: node " + std::to_string(id) + " unreachable from root");
        if (parents[id] > 1)
            throw StructureError("tree: node " + std::to_string(id) + " has multiple parents");
    }
    // Single-parent + all-reachable over a binary out-degree graph implies
    // acyclicity, but depth() provides an independent guard.
    (void)depth();
}

double Ensemble::eval(std::span<const double> x) const {
    if (static_cast<int>(x.size()) != num_features())
        throw ArgumentError("ensemble eval: expected " + std::to_string(num_features()) +
                            " feature values, got " + std::to_string(x.size()));
    double sum = 0.0;
    for (const Tree& t : trees) sum += t.eval(x);
    return sum;
}

int Ensemble::max_depth() const {
    int d = 0;
    for (const Tree& t : trees) d = std::max(d, t.depth());
    return d;
}

double Ensemble::output_lower_bound() const {
    double s = 0.0;
    for (const Tree& t : trees) s += t.min_leaf();
    return s;
}

double Ensemble::output_upper_bound() const {
    double s = 0.0;
    for (const Tree& t : trees) s += t.max_leaf();
    return s;
}

void Ensemble::validate() const {
    for (size_t j = 0; j < trees.size(); ++j) {
        try {
            trees[j].validate(num_features());
        } catch (const StructureError& e) {
            throw StructureError("tree " + std::to_string(j) + ": " + e.what());
        }
    }
}

std::vector<std::pair<double, int>> thresholds_on_dimension(const Ensemble& m, int dim) {
    if (dim < 0 || dim >= m.num_features())
        throw ArgumentError("thresholds_on_dimension: invalid dimension " + std::to_string(dim));
    std::set<std::pair<double, int>> acc;
    for (int j = 0; j < m.num_trees(); ++j)
        for (const Node& n : m.trees[j].nodes)
            if (!n.is_leaf() && n.feature == dim) acc.emplace(n.threshold, j);
    return {acc.begin(), acc.end()};
}

std::vector<double> distinct_thresholds_on_dimension(const Ensemble& m, int dim) {
    std::vector<double> out;
    for (const auto& [eta, tree] : thresholds_on_dimension(m, dim))
        if (out.empty() || out.back() != eta) out.push_back(eta);
    return out;
}

} // namespace treeglitch
