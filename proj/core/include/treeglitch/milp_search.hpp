/**
 * \file milp_search.hpp
 *
 * Copyright 2026 the treeglitch authors.
 * License: Apache License 2.0
 */

#ifndef TREEGLITCH_MILP_SEARCH_HPP
#define TREEGLITCH_MILP_SEARCH_HPP

#include <optional>
#include <string>

#include "treeglitch/milp.hpp"
#include "treeglitch/oracle.hpp"
#include "treeglitch/solver_backend.hpp"

namespace treeglitch {

struct MilpSearchOptions {
    SolverBackendConfig backend;
    double dinkelbach_tol = 1e-9;
    int max_iterations = 60;
    double verify_tol = 1e-6;
    std::string keep_lp_dir; ///< keep emitted LP files here when non-empty
};

struct DecisionResult {
    SolveOutcome outcome;
    std::optional<GlitchTriple> triple; ///< verified witness when feasible

    bool found() const { return triple.has_value(); }
};

/** Solves TE_GLITCH(alpha, i) / TE_GLITCH(alpha) through the backend. */
DecisionResult solve_decision(const Ensemble& m, const EncodingParams& params,
                              const MilpVariant& variant, const MilpSearchOptions& opts);

/**
 * TE_GLITCH via the iterative fractional scheme: solves a sequence of linear
 * subproblems with objective jmin - alpha_k * gap until the optimum drops to
 * tol, then refines the decoded (dimension, base) through the exact slice.
 * Timeouts return the best incumbent flagged timed_out.
 */
OracleResult solve_max_magnitude(const Ensemble& m, const EncodingParams& params, double tol,
                                 const MilpSearchOptions& opts,
                                 const MilpVariant& variant = MilpVariant::any_dim());

/**
 * Extracts the triple from a feasible decision outcome: reads the three input
 * copies, snaps coordinates off the varying dimension to the center copy,
 * re-evaluates the ensemble, and cross-checks the claimed outputs. True
 * evaluation is authoritative; disagreement beyond verify_tol raises
 * SoundnessError.
 */
GlitchTriple decode_solution(const Ensemble& m, const SolveOutcome& outcome,
                             double verify_tol = 1e-6);

} // namespace treeglitch

#endif // TREEGLITCH_MILP_SEARCH_HPP
