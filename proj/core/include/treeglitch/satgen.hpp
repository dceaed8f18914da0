/**
 * \file satgen.hpp
 *
 * Copyright 2026 the treeglitch authors.
 * License: Apache License 2.0
 */

#ifndef TREEGLITCH_SATGEN_HPP
#define TREEGLITCH_SATGEN_HPP

#include <array>
#include <optional>
#include <string>
#include <vector>

#include "treeglitch/ensemble.hpp"

namespace treeglitch {

/**
 * A 3-CNF formula. Literals are signed 1-based variable indices (-2 is the
 * negation of variable 2); every clause has exactly three literals.
 */
struct CnfFormula {
    int num_vars = 0;
    std::vector<std::array<int, 3>> clauses;

    int num_clauses() const { return static_cast<int>(clauses.size()); }
    void validate() const;

    /** Evaluates the formula under the given assignment (index 0 = var 1). */
    bool eval(const std::vector<bool>& assignment) const;
};

/**
 * The reduction image: an ensemble with 2m trees of depth at most 4 over the
 * clause variables plus a control feature r, such that the formula is
 * satisfiable iff the ensemble has a glitch of magnitude larger than
 * alpha = m in dimension `dim`.
 */
struct ReductionOutput {
    Ensemble ensemble;
    double alpha = 0.0;
    int dim = -1; ///< index of the control feature r
    double epsilon = 0.0;
};

/**
 * Builds the reduction; epsilon must lie in (0, 1/m), default 1/(2m). Each
 * clause contributes the pair (T_k, T'_k); both share the clause subtree with
 * one level per literal (duplicate variables collapse levels), leaf 1 on
 * satisfying partial assignments and 0 otherwise. T_k gates on
 * "r <= 0.5 - eps" (true -> 0), T'_k on "r <= -0.5" (true -> subtree).
 */
ReductionOutput reduce(const CnfFormula& phi, std::optional<double> epsilon = std::nullopt);

struct SatResult {
    bool satisfiable = false;
    std::vector<bool> witness; ///< meaningful iff satisfiable
};

/** Exhaustive 2^n check; refuses formulas with more than 24 variables. */
SatResult brute_force_sat(const CnfFormula& phi);

struct DimacsOptions {
    /// Pad 1- or 2-literal clauses by duplicating the last literal instead of
    /// rejecting them (clauses longer than 3 are always rejected).
    bool pad = false;
};

CnfFormula parse_dimacs(const std::string& path, const DimacsOptions& = {});
CnfFormula parse_dimacs_text(const std::string& text, const DimacsOptions& = {});

} // namespace treeglitch

#endif // TREEGLITCH_SATGEN_HPP
