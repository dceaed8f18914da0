/**
 * \file solver_backend.cpp
 *
 * Copyright 2026 the treeglitch authors.
 * License: Apache License 2.0
 */

#include "treeglitch/solver_backend.hpp"

#include <algorithm>
#include <cerrno>
#include <chrono>
#include <cstdlib>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <thread>

#include <fcntl.h>
#include <signal.h>
#include <sys/stat.h>
#include <sys/types.h>
#include <sys/wait.h>
#include <unistd.h>

#include "treeglitch/errors.hpp"

namespace treeglitch {

namespace fs = std::filesystem;

const char* to_string(SolveStatus s) {
    switch (s) {
    case SolveStatus::feasible: return "feasible";
    case SolveStatus::infeasible: return "infeasible";
    case SolveStatus::timeout: return "timeout";
    case SolveStatus::solver_error: return "solver_error";
    }
    return "?";
}

std::string find_on_path(const std::string& name) {
    const char* path = std::getenv("PATH");
    if (!path) return "";
    std::istringstream ss(path);
    std::string dir;
    while (std::getline(ss, dir, ':')) {
        if (dir.empty()) continue;
        fs::path cand = fs::path(dir) / name;
        std::error_code ec;
        if (fs::exists(cand, ec) && ::access(cand.c_str(), X_OK) == 0) return cand.string();
    }
    return "";
}

ProcessResult run_process(const std::vector<std::string>& argv, double kill_after_s,
                          const std::string& workdir) {
    if (argv.empty()) throw ArgumentError("run_process: empty argv");

    char tmpl_out[] = "/tmp/tg_out_XXXXXX";
    char tmpl_err[] = "/tmp/tg_err_XXXXXX";
    int out_fd = ::mkstemp(tmpl_out);
    int err_fd = ::mkstemp(tmpl_err);
    if (out_fd < 0 || err_fd < 0) throw IoError("run_process: mkstemp failed");

    const auto t0 = std::chrono::steady_clock::now();
    pid_t pid = ::fork();
    if (pid < 0) throw SolverError("run_process: fork failed");
    if (pid == 0) {
        ::setpgid(0, 0);
        if (!workdir.empty() && ::chdir(workdir.c_str()) != 0) ::_exit(127);
        ::dup2(out_fd, STDOUT_FILENO);
        ::dup2(err_fd, STDERR_FILENO);
        std::vector<char*> cargv;
        for (const auto& a : argv) cargv.push_back(const_cast<char*>(a.c_str()));
        cargv.push_back(nullptr);
        ::execvp(cargv[0], cargv.data());
        ::_exit(127);
    }
    ::setpgid(pid, pid); // also from the parent: no race on fast children

    ProcessResult result;
    int status = 0;
    const double deadline = kill_after_s > 0 ? kill_after_s : 1e9;
    bool killed = false;
    for (;;) {
        pid_t r = ::waitpid(pid, &status, WNOHANG);
        if (r == pid) break;
        if (r < 0 && errno != EINTR) break;
        const double elapsed =
            std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
        if (!killed && elapsed > deadline) {
            ::kill(-pid, SIGKILL);
            killed = true;
        }
        std::this_thread::sleep_for(std::chrono::milliseconds(5));
    }
    result.timed_out = killed;
    result.exit_code = WIFEXITED(status) ? WEXITSTATUS(status) : -WTERMSIG(status);
    result.wall_time_s =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();

    auto slurp = [](int fd, const char* path) {
        ::close(fd);
        std::ifstream in(path);
        std::stringstream ss;
        ss << in.rdbuf();
        ::unlink(path);
        return ss.str();
    };
    result.stdout_text = slurp(out_fd, tmpl_out);
    result.stderr_text = slurp(err_fd, tmpl_err);
    return result;
}

SolverBackendConfig SolverBackendConfig::preset(const std::string& name,
                                                const std::string& executable) {
    SolverBackendConfig c;
    c.name = name;
    c.executable = executable;
    if (name == "cbc") {
        c.args_template = {"{lp}", "sec", "{limit}", "solve", "solution", "{sol}"};
        c.format = SolutionFormat::cbc;
    } else if (name == "glpsol") {
        c.args_template = {"--lp", "{lp}", "--tmlim", "{limit}", "--output", "{sol}"};
        c.format = SolutionFormat::glpsol;
    } else if (name == "highs") {
        c.args_template = {"--time_limit", "{limit}", "--solution_file", "{sol}", "{lp}"};
        c.format = SolutionFormat::highs;
    } else if (name == "glpk-lp") {
        // bundled python front-end; `executable` is the script path
        c.executable = "python3";
        c.args_template = {executable, "{lp}", "--solution", "{sol}", "--time-limit", "{limit}"};
        c.format = SolutionFormat::generic;
    } else {
        throw ArgumentError("unknown solver preset '" + name + "'");
    }
    return c;
}

namespace {

SolutionFormat format_from_exe(const std::string& exe) {
    const std::string base = fs::path(exe).filename().string();
    if (base.find("cbc") != std::string::npos) return SolutionFormat::cbc;
    if (base.find("glpsol") != std::string::npos) return SolutionFormat::glpsol;
    if (base.find("highs") != std::string::npos) return SolutionFormat::highs;
    return SolutionFormat::generic;
}

std::optional<SolverBackendConfig> config_from_spec(const std::string& spec) {
    // "name", "name:/path", or "/path/to/exe"
    auto colon = spec.find(':');
    if (colon != std::string::npos && spec[0] != '/') {
        const std::string name = spec.substr(0, colon);
        const std::string path = spec.substr(colon + 1);
        return SolverBackendConfig::preset(name, path);
    }
    if (spec.find('/') != std::string::npos) {
        SolutionFormat f = format_from_exe(spec);
        if (f == SolutionFormat::generic) {
            SolverBackendConfig c;
            c.name = fs::path(spec).filename().string();
            c.executable = spec;
            c.args_template = {"{lp}", "--solution", "{sol}", "--time-limit", "{limit}"};
            c.format = SolutionFormat::generic;
            return c;
        }
        return SolverBackendConfig::preset(
            f == SolutionFormat::cbc ? "cbc" : f == SolutionFormat::glpsol ? "glpsol" : "highs",
            spec);
    }
    std::string exe = find_on_path(spec);
    if (exe.empty()) return std::nullopt;
    return SolverBackendConfig::preset(spec, exe);
}

} // namespace

std::optional<SolverBackendConfig> SolverBackendConfig::resolve_default(
    const std::string& script_hint) {
    if (const char* env = std::getenv("GLITCH_SOLVER"); env && *env) {
        auto c = config_from_spec(env);
        if (!c) throw SolverError(std::string("GLITCH_SOLVER solver not found: ") + env);
        return c;
    }
    for (const char* name : {"cbc", "highs", "glpsol"}) {
        std::string exe = find_on_path(name);
        if (!exe.empty()) return preset(name, exe);
    }
    std::string script;
    if (const char* env = std::getenv("GLITCH_SOLVER_SCRIPT"); env && *env) script = env;
    if (script.empty() && !script_hint.empty()) script = script_hint;
    if (!script.empty() && fs::exists(script)) return preset("glpk-lp", script);
    return std::nullopt;
}

namespace {

bool parse_double(const std::string& s, double& out) {
    try {
        size_t pos = 0;
        out = std::stod(s, &pos);
        return pos == s.size();
    } catch (...) {
        return false;
    }
}

SolveOutcome parse_generic(const std::string& text) {
    SolveOutcome o;
    std::istringstream in(text);
    std::string line;
    std::optional<std::string> status_word;
    while (std::getline(in, line)) {
        std::istringstream ls(line);
        std::string a, b;
        if (!(ls >> a >> b)) continue;
        std::string extra;
        if (ls >> extra) continue; // not a 2-token line
        if (a == "status") {
            status_word = b;
            continue;
        }
        double v;
        if (a == "objective" && parse_double(b, v)) {
            o.objective_value = v;
            continue;
        }
        if (parse_double(b, v)) o.assignment[a] = v;
    }
    if (status_word) {
        if (*status_word == "optimal" || *status_word == "feasible")
            o.status = SolveStatus::feasible;
        else if (*status_word == "infeasible")
            o.status = SolveStatus::infeasible;
        else if (*status_word == "timeout")
            o.status = SolveStatus::timeout;
        else
            o.status = SolveStatus::solver_error;
    } else {
        o.status = o.assignment.empty() ? SolveStatus::solver_error : SolveStatus::feasible;
    }
    if (o.status != SolveStatus::feasible && o.status != SolveStatus::timeout)
        o.assignment.clear();
    return o;
}

SolveOutcome parse_cbc(const std::string& text) {
    SolveOutcome o;
    std::istringstream in(text);
    std::string header;
    if (!std::getline(in, header)) {
        o.diagnostics = "empty cbc solution file";
        return o;
    }
    auto has = [&](const char* w) { return header.find(w) != std::string::npos; };
    if (has("Infeasible") || has("infeasible")) {
        o.status = SolveStatus::infeasible;
        return o;
    }
    if (has("Stopped on time")) {
        o.status = SolveStatus::timeout;
    } else if (has("Optimal") || has("Stopped on")) {
        o.status = SolveStatus::feasible;
    } else if (has("Unbounded")) {
        o.status = SolveStatus::solver_error;
        o.diagnostics = header;
        return o;
    } else {
        o.status = SolveStatus::solver_error;
        o.diagnostics = header;
        return o;
    }
    if (auto pos = header.find("objective value"); pos != std::string::npos) {
        std::istringstream os(header.substr(pos + 15));
        double v;
        if (os >> v) o.objective_value = v;
    }
    std::string line;
    while (std::getline(in, line)) {
        std::istringstream ls(line);
        long long idx;
        std::string name;
        double value;
        if (ls >> idx >> name >> value) o.assignment[name] = value;
    }
    return o;
}

SolveOutcome parse_glpsol(const std::string& text) {
    SolveOutcome o;
    std::istringstream in(text);
    std::string line;
    bool in_columns = false;
    bool integer_optimal = false, feasible_word = false, infeasible = false;
    while (std::getline(in, line)) {
        if (line.find("Status:") != std::string::npos) {
            if (line.find("INTEGER OPTIMAL") != std::string::npos ||
                line.find("OPTIMAL") != std::string::npos)
                integer_optimal = true;
            else if (line.find("INTEGER NON-OPTIMAL") != std::string::npos ||
                     line.find("FEASIBLE") != std::string::npos)
                feasible_word = true;
            else if (line.find("EMPTY") != std::string::npos ||
                     line.find("INFEASIBLE") != std::string::npos ||
                     line.find("UNDEFINED") != std::string::npos)
                infeasible = true;
            continue;
        }
        if (line.find("Objective:") != std::string::npos) {
            std::istringstream ls(line);
            std::string w;
            double v;
            while (ls >> w) {
                if (w == "=") {
                    if (ls >> v) o.objective_value = v;
                    break;
                }
            }
            continue;
        }
        if (line.find("Column name") != std::string::npos) {
            in_columns = true;
            continue;
        }
        if (in_columns) {
            if (line.find("Karush-Kuhn-Tucker") != std::string::npos || line.empty()) {
                in_columns = false;
                continue;
            }
            if (line.find("---") != std::string::npos) continue;
            // "   1 name         *              1             0             1"
            std::istringstream ls(line);
            long long no;
            std::string name;
            if (!(ls >> no >> name)) continue;
            std::string tok;
            while (ls >> tok) {
                double v;
                if (parse_double(tok, v)) {
                    o.assignment[name] = v;
                    break;
                }
            }
        }
    }
    o.status = infeasible          ? SolveStatus::infeasible
               : integer_optimal   ? SolveStatus::feasible
               : feasible_word     ? SolveStatus::timeout
                                   : SolveStatus::solver_error;
    return o;
}

SolveOutcome parse_highs(const std::string& text) {
    SolveOutcome o;
    std::istringstream in(text);
    std::string line;
    bool in_columns = false;
    long long columns_left = -1;
    while (std::getline(in, line)) {
        if (line.find("Model status") != std::string::npos) {
            if (line.find("Optimal") != std::string::npos)
                o.status = SolveStatus::feasible;
            else if (line.find("Infeasible") != std::string::npos)
                o.status = SolveStatus::infeasible;
            else if (line.find("Time limit") != std::string::npos)
                o.status = SolveStatus::timeout;
            else
                o.status = SolveStatus::solver_error;
            continue;
        }
        if (line.find("Objective") != std::string::npos) {
            std::istringstream ls(line);
            std::string w;
            double v;
            while (ls >> w)
                if (parse_double(w, v)) o.objective_value = v;
            continue;
        }
        if (line.rfind("# Columns", 0) == 0) {
            in_columns = true;
            std::istringstream ls(line.substr(9));
            ls >> columns_left;
            continue;
        }
        if (in_columns) {
            if (columns_left-- <= 0 || line.empty() || line[0] == '#') {
                in_columns = false;
                continue;
            }
            std::istringstream ls(line);
            std::string name;
            double v;
            if (ls >> name >> v) o.assignment[name] = v;
        }
    }
    return o;
}

std::string tail(const std::string& s, size_t max_len = 2000) {
    return s.size() <= max_len ? s : s.substr(s.size() - max_len);
}

} // namespace

SolveOutcome run_backend(const std::string& lp_path, const SolverBackendConfig& backend) {
    if (backend.executable.empty())
        throw ArgumentError("run_backend: backend executable not configured");
    if (!fs::exists(lp_path)) throw IoError("run_backend: no such LP file: " + lp_path);

    std::error_code ec;
    char scratch_tmpl[] = "/tmp/tg_solve_XXXXXX";
    char* scratch = ::mkdtemp(scratch_tmpl);
    if (!scratch) throw IoError("run_backend: mkdtemp failed");
    const std::string sol_path = std::string(scratch) + "/solution.txt";

    std::vector<std::string> argv{backend.executable};
    char limit_buf[32];
    std::snprintf(limit_buf, sizeof(limit_buf), "%.0f", std::max(1.0, backend.time_limit_s));
    for (std::string arg : backend.args_template) {
        auto replace = [&](const std::string& key, const std::string& val) {
            for (size_t pos; (pos = arg.find(key)) != std::string::npos;)
                arg.replace(pos, key.size(), val);
        };
        replace("{lp}", fs::absolute(lp_path).string());
        replace("{sol}", sol_path);
        replace("{limit}", limit_buf);
        argv.push_back(arg);
    }

    ProcessResult pr = run_process(argv, backend.time_limit_s * 1.5 + 10.0, scratch);

    SolveOutcome outcome;
    outcome.wall_time_s = pr.wall_time_s;

    std::string sol_text;
    if (fs::exists(sol_path)) {
        std::ifstream in(sol_path);
        std::stringstream ss;
        ss << in.rdbuf();
        sol_text = ss.str();
    }

    if (pr.timed_out) {
        outcome.status = SolveStatus::timeout;
        // keep a partial incumbent if the solver managed to write one
        if (!sol_text.empty()) {
            SolveOutcome partial;
            switch (backend.format) {
            case SolutionFormat::generic: partial = parse_generic(sol_text); break;
            case SolutionFormat::cbc: partial = parse_cbc(sol_text); break;
            case SolutionFormat::glpsol: partial = parse_glpsol(sol_text); break;
            case SolutionFormat::highs: partial = parse_highs(sol_text); break;
            }
            outcome.assignment = std::move(partial.assignment);
            outcome.objective_value = partial.objective_value;
        }
        fs::remove_all(scratch, ec);
        return outcome;
    }

    if (sol_text.empty()) {
        outcome.status = SolveStatus::solver_error;
        outcome.diagnostics = "exit code " + std::to_string(pr.exit_code) +
                              "; no solution file; stderr: " + tail(pr.stderr_text) +
                              "; stdout: " + tail(pr.stdout_text);
        fs::remove_all(scratch, ec);
        return outcome;
    }

    SolveOutcome parsed;
    switch (backend.format) {
    case SolutionFormat::generic: parsed = parse_generic(sol_text); break;
    case SolutionFormat::cbc: parsed = parse_cbc(sol_text); break;
    case SolutionFormat::glpsol: parsed = parse_glpsol(sol_text); break;
    case SolutionFormat::highs: parsed = parse_highs(sol_text); break;
    }
    parsed.wall_time_s = pr.wall_time_s;
    if (parsed.status == SolveStatus::solver_error && parsed.diagnostics.empty())
        parsed.diagnostics = "unrecognized solution file; stderr: " + tail(pr.stderr_text);
    fs::remove_all(scratch, ec);
    return parsed;
}

} // namespace treeglitch
