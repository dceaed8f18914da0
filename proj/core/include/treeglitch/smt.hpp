/**
 * \file smt.hpp
 *
 * Copyright 2026 the treeglitch authors.
 * License: Apache License 2.0
 */

#ifndef TREEGLITCH_SMT_HPP
#define TREEGLITCH_SMT_HPP

#include <optional>
#include <string>

#include "treeglitch/glitch.hpp"
#include "treeglitch/milp.hpp"

namespace treeglitch {

/**
 * Quantifier-free linear real arithmetic script for the decision problems.
 * Path semantics are nested if-then-else terms per tree; strict inequalities
 * stay strict (no eps_sep); every numeric literal is an exact rational.
 */
std::string smt_to_string(const Ensemble& m, const EncodingParams& params,
                          const MilpVariant& variant);

void emit_smt(const Ensemble& m, const EncodingParams& params, const MilpVariant& variant,
              const std::string& path);

enum class SmtStatus { sat, unsat, unknown, timeout, solver_error };

const char* to_string(SmtStatus s);

struct SmtResult {
    SmtStatus status = SmtStatus::solver_error;
    std::string model_text; ///< the get-value output on sat
    double wall_time_s = 0.0;
    std::string diagnostics;
};

struct SmtBackendConfig {
    std::string name;
    std::string executable;
    std::vector<std::string> args_template; ///< {file} and {limit} placeholders

    /** Built-ins: "z3", "cvc5", "z3-wasm" (bundled node wrapper). */
    static SmtBackendConfig preset(const std::string& name, const std::string& executable);
    static std::optional<SmtBackendConfig> resolve_default(const std::string& script_hint = "");

    double time_limit_s = 300.0;
};

SmtResult run_smt(const std::string& smt_path, const SmtBackendConfig& backend);

/**
 * Parses a get-value model (rational, decimal and negated literals), rebuilds
 * the triple, re-evaluates the ensemble and cross-checks the solver's claimed
 * outputs. Raises SoundnessError on disagreement.
 */
GlitchTriple decode_smt_model(const Ensemble& m, const std::string& model_text,
                              double verify_tol = 1e-6);

/** Exact rational SMT literal for a double, e.g. "(/ 5404319552844595 18014398509481984)". */
std::string smt_rational(double v);

} // namespace treeglitch

#endif // TREEGLITCH_SMT_HPP
