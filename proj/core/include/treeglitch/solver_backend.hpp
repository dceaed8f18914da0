/**
 * \file solver_backend.hpp
 *
 * Copyright 2026 the treeglitch authors.
 * License: Apache License 2.0
 */

#ifndef TREEGLITCH_SOLVER_BACKEND_HPP
#define TREEGLITCH_SOLVER_BACKEND_HPP

#include <map>
#include <optional>
#include <string>
#include <vector>

namespace treeglitch {

enum class SolveStatus { feasible, infeasible, timeout, solver_error };

const char* to_string(SolveStatus s);

struct SolveOutcome {
    SolveStatus status = SolveStatus::solver_error;
    std::map<std::string, double> assignment; ///< present iff feasible
    std::optional<double> objective_value;
    double wall_time_s = 0.0;
    std::string diagnostics; ///< solver output tail on errors
};

/** Solution-file dialects run_backend can decode. */
enum class SolutionFormat {
    generic, ///< optional "status <word>" / "objective <num>" lines, then "name value"
    cbc,     ///< "Optimal - objective value X" header, "idx name value dj" rows
    glpsol,  ///< glpsol --output table
    highs,   ///< HiGHS --solution_file layout
};

/**
 * External MILP solver invocation: executable plus an argument template with
 * {lp}, {sol} and {limit} placeholders, and the dialect of the solution file
 * it writes.
 */
struct SolverBackendConfig {
    std::string name;
    std::string executable;
    std::vector<std::string> args_template;
    SolutionFormat format = SolutionFormat::generic;
    double time_limit_s = 300.0;

    /** Built-in templates: "cbc", "glpsol", "highs", "glpk-lp". */
    static SolverBackendConfig preset(const std::string& name, const std::string& executable);

    /**
     * Resolves the default backend: the GLITCH_SOLVER environment variable
     * ("name", "/path/to/exe" or "name:/path"), then cbc/highs/glpsol on
     * PATH, then the bundled GLPK front-end script if `script_hint` or
     * GLITCH_SOLVER_SCRIPT points at it. Empty optional when nothing found.
     */
    static std::optional<SolverBackendConfig> resolve_default(
        const std::string& script_hint = "");
};

/**
 * Runs the solver on an LP file in a fresh scratch directory, enforcing the
 * wall-clock limit (solver flag plus a hard kill), and decodes its solution
 * file. Solver crashes and unparseable output map to solver_error; the kill
 * path maps to timeout.
 */
SolveOutcome run_backend(const std::string& lp_path, const SolverBackendConfig& backend);

/** Low-level subprocess helper shared by the MILP and SMT paths. */
struct ProcessResult {
    int exit_code = -1;
    bool timed_out = false;
    std::string stdout_text;
    std::string stderr_text;
    double wall_time_s = 0.0;
};

ProcessResult run_process(const std::vector<std::string>& argv, double kill_after_s,
                          const std::string& workdir = "");

/** Absolute path of `name` on PATH, empty if absent. */
std::string find_on_path(const std::string& name);

} // namespace treeglitch

#endif // TREEGLITCH_SOLVER_BACKEND_HPP
