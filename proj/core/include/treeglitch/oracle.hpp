/**
 * \file oracle.hpp
 *
 * Copyright 2026 the treeglitch authors.
 * License: Apache License 2.0
 */

#ifndef TREEGLITCH_ORACLE_HPP
#define TREEGLITCH_ORACLE_HPP

#include <cstdint>
#include <optional>
#include <vector>

#include "treeglitch/ensemble.hpp"
#include "treeglitch/glitch.hpp"

namespace treeglitch {

inline constexpr std::uint64_t kDefaultCellBudget = 1'000'000;
inline constexpr double kDefaultWitnessDeltaRel = 1e-6;
inline constexpr double kDefaultEpsSepRel = 1e-6;

/**
 * The exact piecewise-constant restriction of an ensemble along `dim` with the
 * remaining coordinates frozen at `base`. Interval k is (t_{k-1}, t_k] except
 * the first, which is [lo, t_0]; cell_values[k] is the constant output there.
 */
struct SliceProfile {
    int dim = -1;
    std::vector<double> base;
    std::vector<double> breakpoints;
    std::vector<double> cell_values;
    double lo = 0.0, hi = 1.0;

    int num_cells() const { return static_cast<int>(cell_values.size()); }

    /** Left/right endpoint of cell k (closed right; open left except k = 0). */
    double cell_left(int k) const { return k == 0 ? lo : breakpoints[k - 1]; }
    double cell_right(int k) const {
        return k == num_cells() - 1 ? hi : breakpoints[k];
    }

    /** An interior representative of cell k, safe against adjacent doubles. */
    double representative(int k) const;
};

struct OracleResult {
    std::optional<GlitchTriple> best;
    double sup_magnitude = 0.0;
    /// Positive suprema are never attained under <=-routing (the left endpoint
    /// of the rightmost cell is open); kept for interface completeness.
    bool attained = false;
    double witness_delta = 0.0;
    bool timed_out = false;

    bool found() const { return best.has_value(); }
};

enum class ProblemKind { fixed_dim, any_dim, max_magnitude };

/** Which glitch-search problem to solve, and with what numeric knobs. */
struct SearchProblem {
    ProblemKind kind = ProblemKind::max_magnitude;
    int dim = -1;      ///< required for fixed_dim
    double alpha = 0;  ///< decision threshold for fixed_dim / any_dim
    std::optional<std::vector<FeatureBounds>> region; ///< local-search box
    double eps_sep_rel = kDefaultEpsSepRel;
    double witness_delta_rel = kDefaultWitnessDeltaRel;

    static SearchProblem fixed(int dim, double alpha);
    static SearchProblem any(double alpha);
    static SearchProblem max();
};

/** The interval decomposition of one dimension by its distinct thresholds. */
struct CellDecomposition {
    std::vector<double> breakpoints; ///< distinct thresholds within [lo, hi)
    double lo = 0.0, hi = 1.0;

    int num_cells() const { return static_cast<int>(breakpoints.size()) + 1; }
    double left(int k) const { return k == 0 ? lo : breakpoints[k - 1]; }
    double right(int k) const { return k == num_cells() - 1 ? hi : breakpoints[k]; }
    /** An interior representative of cell k, safe against adjacent doubles. */
    double representative(int k) const;
};

CellDecomposition cell_decomposition(const Ensemble& m, int dim, const FeatureBounds& bounds);

/** Exact slice of the ensemble along `dim` at `base` (margin outputs). */
SliceProfile slice(const Ensemble& m, std::span<const double> base, int dim,
                   const FeatureBounds* bounds_override = nullptr,
                   OutputSpace output_space = OutputSpace::margin);

/**
 * Enumerates all interval triples of the profile and returns the supremum
 * magnitude together with a delta-witness placed just inside the open
 * endpoint. Ties are broken towards smaller left breakpoints.
 */
OracleResult best_glitch_on_slice(const SliceProfile& profile,
                                  double witness_delta_rel = kDefaultWitnessDeltaRel,
                                  OutputSpace output_space = OutputSpace::margin);

/**
 * Solver-free exact search: enumerates one representative base point per cell
 * of the non-target-dimension grid and scans every admissible slice. Exact by
 * piecewise constancy. Refuses (ArgumentError) when the grid exceeds
 * cell_budget, naming the required cell count.
 */
OracleResult exhaustive_search(const Ensemble& m, const SearchProblem& problem,
                               std::uint64_t cell_budget = kDefaultCellBudget,
                               OutputSpace output_space = OutputSpace::margin, int jobs = 1);

/** Required base-grid cell count for the problem (max over target dims). */
std::uint64_t required_cells(const Ensemble& m, const SearchProblem& problem);

/**
 * Checks the threshold-straddle property: two predicates v_i <= a and
 * v_i <= b from distinct trees with x-_i <= a < x_i <= b < x+_i.
 */
bool straddles_distinct_trees(const Ensemble& m, const GlitchTriple& t);

} // namespace treeglitch

#endif // TREEGLITCH_ORACLE_HPP
