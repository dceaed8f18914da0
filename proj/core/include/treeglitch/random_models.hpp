/**
 * \file random_models.hpp
 *
 * Copyright 2026 the treeglitch authors.
 * License: Apache License 2.0
 */

#ifndef TREEGLITCH_RANDOM_MODELS_HPP
#define TREEGLITCH_RANDOM_MODELS_HPP

#include <cstdint>

#include "treeglitch/ensemble.hpp"

namespace treeglitch {

struct RandomModelSpec {
    std::uint64_t seed = 1;
    int trees = 3;
    int max_depth = 3;
    int features = 2;
    double leaf_lo = -1.0;
    double leaf_hi = 1.0;
    /// chance of splitting again below the root; 1.0 grows complete trees
    double split_prob = 1.0;
    /// grow the leftmost path to max_depth even when split_prob < 1
    bool force_max_depth = false;
};

/** Seed-deterministic random ensemble over [0,1]^features. */
Ensemble random_ensemble(const RandomModelSpec& spec);

/**
 * Seed-deterministic ensemble that is monotone in every dimension: each tree
 * is a single-feature threshold staircase with nondecreasing leaf values, so
 * the sum is monotone per dimension and glitch-free.
 */
Ensemble monotone_ensemble(std::uint64_t seed, int trees, int depth, int features);

} // namespace treeglitch

#endif // TREEGLITCH_RANDOM_MODELS_HPP
