/**
 * \file analysis.hpp
 *
 * Copyright 2026 the treeglitch authors.
 * License: Apache License 2.0
 */

#ifndef TREEGLITCH_ANALYSIS_HPP
#define TREEGLITCH_ANALYSIS_HPP

#include <cstdint>
#include <string>
#include <vector>

#include "treeglitch/ensemble.hpp"
#include "treeglitch/glitch.hpp"

namespace treeglitch {

/** Feature points with binary labels, e.g. a training set. */
struct LabeledDataset {
    std::vector<std::vector<double>> points;
    std::vector<int> labels; ///< values in {0, 1}

    int size() const { return static_cast<int>(points.size()); }
    void validate(int num_features) const;

    /** CSV with a header row; the label column is selected by name. */
    static LabeledDataset load_csv(const std::string& path, const std::string& label_column);
};

enum class Verdict { anticipated, unanticipated, inconclusive };

const char* to_string(Verdict v);

enum class NeighborhoodNorm { linf, l2 };

struct ViolationClassification {
    Verdict verdict = Verdict::inconclusive;
    int points_in_ball = 0;
    /// indices into the dataset: a differing-label pair for anticipated, the
    /// same-labeled witnesses otherwise
    std::vector<int> evidence;
    /// set when exactly one training point lies in the ball, where the
    /// definition's "all pairs agree" is vacuous
    bool single_point_ambiguity = false;

    std::string to_json() const;
};

/**
 * Compares a violation at x against the labeled data in the epsilon-ball:
 * anticipated when some pair of neighbors disagrees on the label,
 * unanticipated when at least two neighbors exist and all agree,
 * inconclusive when fewer than two neighbors exist.
 */
ViolationClassification classify_violation(const LabeledDataset& ds, std::span<const double> x,
                                           double epsilon,
                                           NeighborhoodNorm norm = NeighborhoodNorm::linf);

struct MonotonicityReport {
    std::uint64_t samples = 0;
    std::uint64_t monotonic = 0;
    std::uint64_t non_monotonic = 0;
    double percent_non_monotonic = 0.0;

    std::string to_json() const;
};

/**
 * Statistical probe: for each uniformly sampled point and each dimension,
 * evaluates the aligned points (x_i - step, x_i, x_i + step) (clamped to
 * bounds) and flags the sample when any dimension shows a rise-fall or
 * fall-rise pattern. Bit-reproducible for a fixed seed.
 */
MonotonicityReport monotonicity_sample(const Ensemble& m, std::uint64_t samples,
                                       std::uint64_t seed, double step,
                                       OutputSpace output_space = OutputSpace::margin);

/** The per-point probe behind monotonicity_sample. */
bool point_non_monotonic(const Ensemble& m, std::span<const double> x, double step,
                         OutputSpace output_space = OutputSpace::margin);

/**
 * "x,output" rows along one dimension: a uniform grid of `resolution`
 * positions plus every cell midpoint and both sides of every breakpoint, so
 * step discontinuities render exactly.
 */
std::string export_slice_csv(const Ensemble& m, std::span<const double> base, int dim,
                             int resolution, OutputSpace output_space = OutputSpace::margin);

} // namespace treeglitch

#endif // TREEGLITCH_ANALYSIS_HPP
