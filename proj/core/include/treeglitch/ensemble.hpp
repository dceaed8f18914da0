/**
 * \file ensemble.hpp
 *
 * Copyright 2026 the treeglitch authors.
 * License: Apache License 2.0
 */

#ifndef TREEGLITCH_ENSEMBLE_HPP
#define TREEGLITCH_ENSEMBLE_HPP

#include <map>
#include <span>
#include <string>
#include <vector>

namespace treeglitch {

/** Closed interval of admissible values for one feature. */
struct FeatureBounds {
    double lo = 0.0;
    double hi = 1.0;

    double range() const { return hi - lo; }
    bool contains(double v) const { return lo <= v && v <= hi; }
    bool operator==(const FeatureBounds&) const = default;
};

/** Named feature variables with per-feature bounds. */
class FeatureSpace {
public:
    FeatureSpace() = default;
    FeatureSpace(std::vector<std::string> names, std::vector<FeatureBounds> bounds);

    int size() const { return static_cast<int>(names_.size()); }
    const std::string& name(int i) const { return names_.at(i); }
    const FeatureBounds& bounds(int i) const { return bounds_.at(i); }
    const std::vector<std::string>& names() const { return names_; }
    const std::vector<FeatureBounds>& all_bounds() const { return bounds_; }

    /** Index of a feature name, -1 if unknown. */
    int index_of(const std::string& name) const;

    bool contains(std::span<const double> x) const;

    bool operator==(const FeatureSpace&) const = default;

private:
    std::vector<std::string> names_;
    std::vector<FeatureBounds> bounds_;
};

/**
 * One tree node. Internal nodes carry the predicate "x[feature] <= threshold"
 * and route to true_child on satisfaction, false_child otherwise. Leaves carry
 * a constant value and have feature == -1.
 */
struct Node {
    int feature = -1;
    double threshold = 0.0;
    int true_child = -1;
    int false_child = -1;
    double value = 0.0;

    bool is_leaf() const { return feature < 0; }

    static Node leaf(double value) {
        Node n;
        n.value = value;
        return n;
    }
    static Node internal(int feature, double threshold, int true_child, int false_child) {
        Node n;
        n.feature = feature;
        n.threshold = threshold;
        n.true_child = true_child;
        n.false_child = false_child;
        return n;
    }

    bool operator==(const Node&) const = default;
};

/** A rooted binary decision tree; nodes are indexed into `nodes`. */
struct Tree {
    int root = 0;
    std::vector<Node> nodes;

    /** Walks the unique root-to-leaf path for x and returns the leaf value. */
    double eval(std::span<const double> x) const;

    /** Longest root-to-leaf path length in edges; 0 for a single-leaf tree. */
    int depth() const;

    int leaf_count() const;
    int internal_count() const;

    /** Largest absolute leaf value (0 for an impossible empty tree). */
    double max_abs_leaf() const;
    double min_leaf() const;
    double max_leaf() const;

    /**
     * Checks the structural invariants: children exist and are distinct, the
     * node graph is a rooted binary tree, every node is reachable from root.
     * Throws StructureError with a description of the first violation.
     */
    void validate(int num_features) const;

    bool operator==(const Tree&) const = default;
};

/** A sum-of-trees model over a shared feature space. */
struct Ensemble {
    FeatureSpace feature_space;
    std::vector<Tree> trees;
    std::map<std::string, std::string> metadata;

    /** Sum of per-tree evaluations at x; x must be in-bounds and NaN-free. */
    double eval(std::span<const double> x) const;

    int num_features() const { return feature_space.size(); }
    int num_trees() const { return static_cast<int>(trees.size()); }
    int max_depth() const;

    /** Sum over trees of the smallest/largest leaf value: output range. */
    double output_lower_bound() const;
    double output_upper_bound() const;

    /** Validates every tree against the feature space. */
    void validate() const;

    bool operator==(const Ensemble& other) const {
        return feature_space == other.feature_space && trees == other.trees;
    }
};

/**
 * All (threshold, tree index) pairs with a predicate on feature `dim`, sorted
 * by threshold then tree index. A pair appears once even if the same tree
 * tests the same threshold in several nodes.
 */
std::vector<std::pair<double, int>> thresholds_on_dimension(const Ensemble& m, int dim);

/** Distinct threshold values on `dim`, sorted ascending. */
std::vector<double> distinct_thresholds_on_dimension(const Ensemble& m, int dim);

} // namespace treeglitch

#endif // TREEGLITCH_ENSEMBLE_HPP
