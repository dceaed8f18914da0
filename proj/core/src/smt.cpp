/**
 * \file smt.cpp
 *
 * Copyright 2026 the treeglitch authors.
 * License: Apache License 2.0
 */

#include "treeglitch/smt.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "treeglitch/errors.hpp"
#include "treeglitch/milp_search.hpp"
#include "treeglitch/solver_backend.hpp"

namespace treeglitch {

namespace fs = std::filesystem;

const char* to_string(SmtStatus s) {
    switch (s) {
    case SmtStatus::sat: return "sat";
    case SmtStatus::unsat: return "unsat";
    case SmtStatus::unknown: return "unknown";
    case SmtStatus::timeout: return "timeout";
    case SmtStatus::solver_error: return "solver_error";
    }
    return "?";
}

namespace {

// decimal string of 2^k by repeated doubling (k can exceed int128 range)
std::string pow2_decimal(int k) {
    std::vector<int> digits{1}; // little-endian
    for (int i = 0; i < k; ++i) {
        int carry = 0;
        for (int& d : digits) {
            int v = d * 2 + carry;
            d = v % 10;
            carry = v / 10;
        }
        if (carry) digits.push_back(carry);
    }
    std::string s;
    for (auto it = digits.rbegin(); it != digits.rend(); ++it) s += char('0' + *it);
    return s;
}

} // namespace

std::string smt_rational(double v) {
    if (!std::isfinite(v)) throw ArgumentError("smt_rational: non-finite value");
    if (v == 0.0) return "0.0";
    const bool neg = v < 0.0;
    double a = std::abs(v);

    int exp;
    double fr = std::frexp(a, &exp); // a = fr * 2^exp, fr in [0.5, 1)
    std::int64_t mant = static_cast<std::int64_t>(std::ldexp(fr, 53));
    exp -= 53;
    while (mant != 0 && (mant & 1) == 0) {
        mant >>= 1;
        ++exp;
    }

    std::string body;
    if (exp >= 0) {
        // mant * 2^exp is an integer; mant < 2^53 so multiply via long double
        // only when safe, otherwise through the decimal doubler
        std::string digits = std::to_string(mant);
        if (exp > 0) {
            std::vector<int> ds;
            for (auto it = digits.rbegin(); it != digits.rend(); ++it) ds.push_back(*it - '0');
            for (int i = 0; i < exp; ++i) {
                int carry = 0;
                for (int& d : ds) {
                    int x = d * 2 + carry;
                    d = x % 10;
                    carry = x / 10;
                }
                if (carry) ds.push_back(carry);
            }
            digits.clear();
            for (auto it = ds.rbegin(); it != ds.rend(); ++it) digits += char('0' + *it);
        }
        body = digits + ".0";
    } else {
        body = "(/ " + std::to_string(mant) + ".0 " + pow2_decimal(-exp) + ".0)";
    }
    return neg ? "(- " + body + ")" : body;
}

namespace {

const char* copy_suffix(CopyTag w) {
    switch (w) {
    case CopyTag::minus: return "m";
    case CopyTag::center: return "c";
    case CopyTag::plus: return "p";
    }
    return "?";
}

constexpr CopyTag kCopies[3] = {CopyTag::minus, CopyTag::center, CopyTag::plus};

std::string tree_term(const Tree& tree, int node, CopyTag w) {
    const Node& n = tree.nodes[node];
    if (n.is_leaf()) return smt_rational(n.value);
    return "(ite (<= " + var_x(w, n.feature) + " " + smt_rational(n.threshold) + ") " +
           tree_term(tree, n.true_child, w) + " " + tree_term(tree, n.false_child, w) + ")";
}

std::string gap_expr(int i) {
    return "(- " + var_x(CopyTag::plus, i) + " " + var_x(CopyTag::minus, i) + ")";
}

std::string shape_expr(const EncodingParams& params, int i) {
    const std::string alpha_gap = "(* " + smt_rational(params.alpha) + " " + gap_expr(i) + ")";
    const std::string om = var_output(CopyTag::minus);
    const std::string oc = var_output(CopyTag::center);
    const std::string op = var_output(CopyTag::plus);
    auto ge = [&](const std::string& a, const std::string& b) {
        return "(>= (- " + a + " " + b + ") " + alpha_gap + ")";
    };
    if (params.mode == OscillationMode::general) {
        return "(or (and (> " + om + " " + oc + ") (< " + oc + " " + op + ") " + ge(om, oc) +
               " " + ge(op, oc) +
               ") (and (< " + om + " " + oc + ") (> " + oc + " " + op + ") " + ge(oc, om) +
               " " + ge(oc, op) + "))";
    }
    return "(or (and (>= " + om + " 0.0) (>= " + op + " 0.0) (< " + oc + " 0.0) " + ge(om, oc) +
           " " + ge(op, oc) +
           ") (and (< " + om + " 0.0) (< " + op + " 0.0) (>= " + oc + " 0.0) " + ge(oc, om) +
           " " + ge(oc, op) + "))";
}

std::string psi_conjunct(const Ensemble& m, const EncodingParams& params, int i) {
    std::string s = "(and ";
    for (int j = 0; j < m.num_features(); ++j) {
        if (j == i) continue;
        s += "(= " + var_x(CopyTag::minus, j) + " " + var_x(CopyTag::center, j) + ") ";
        s += "(= " + var_x(CopyTag::center, j) + " " + var_x(CopyTag::plus, j) + ") ";
    }
    s += "(< " + var_x(CopyTag::minus, i) + " " + var_x(CopyTag::center, i) + ") ";
    s += "(< " + var_x(CopyTag::center, i) + " " + var_x(CopyTag::plus, i) + ") ";
    s += shape_expr(params, i) + ")";
    return s;
}

} // namespace

std::string smt_to_string(const Ensemble& m, const EncodingParams& params,
                          const MilpVariant& variant) {
    m.validate();
    if (!(params.alpha > 0.0)) throw ArgumentError("emit_smt: alpha must be positive");
    if (!variant.any && (variant.dim < 0 || variant.dim >= m.num_features()))
        throw ArgumentError("emit_smt: invalid fixed dimension");

    const auto box = effective_box(m, params);

    std::string out;
    out += "(set-option :produce-models true)\n";
    out += "(set-logic QF_LRA)\n";

    for (CopyTag w : kCopies)
        for (int f = 0; f < m.num_features(); ++f) {
            const std::string x = var_x(w, f);
            out += "(declare-const " + x + " Real)\n";
            out += "(assert (<= " + smt_rational(box[f].lo) + " " + x + "))\n";
            out += "(assert (<= " + x + " " + smt_rational(box[f].hi) + "))\n";
        }

    for (CopyTag w : kCopies) {
        std::string sum;
        if (m.num_trees() == 0) {
            sum = "0.0";
        } else if (m.num_trees() == 1) {
            sum = tree_term(m.trees[0], m.trees[0].root, w);
        } else {
            sum = "(+";
            for (const Tree& t : m.trees) sum += " " + tree_term(t, t.root, w);
            sum += ")";
        }
        out += "(define-fun " + var_output(w) + " () Real " + sum + ")\n";
    }

    if (!variant.any) {
        out += "(assert " + psi_conjunct(m, params, variant.dim) + ")\n";
    } else {
        out += "(assert (or";
        for (int i = 0; i < m.num_features(); ++i) out += " " + psi_conjunct(m, params, i);
        out += "))\n";
    }

    out += "(check-sat)\n(get-value (";
    bool first = true;
    for (CopyTag w : kCopies)
        for (int f = 0; f < m.num_features(); ++f) {
            if (!first) out += " ";
            out += var_x(w, f);
            first = false;
        }
    for (CopyTag w : kCopies) out += " " + var_output(w);
    out += "))\n";
    return out;
}

void emit_smt(const Ensemble& m, const EncodingParams& params, const MilpVariant& variant,
              const std::string& path) {
    std::ofstream f(path, std::ios::trunc);
    if (!f) throw IoError("emit_smt: cannot open " + path);
    f << smt_to_string(m, params, variant);
    if (!f) throw IoError("emit_smt: write failed: " + path);
}

SmtBackendConfig SmtBackendConfig::preset(const std::string& name,
                                          const std::string& executable) {
    SmtBackendConfig c;
    c.name = name;
    c.executable = executable;
    if (name == "z3") {
        c.args_template = {"-smt2", "-T:{limit}", "{file}"};
    } else if (name == "cvc5") {
        c.args_template = {"--produce-models", "--tlimit={limit}000", "{file}"};
    } else if (name == "z3-wasm") {
        c.executable = "node";
        c.args_template = {executable, "{file}"};
    } else {
        throw ArgumentError("unknown SMT solver preset '" + name + "'");
    }
    return c;
}

std::optional<SmtBackendConfig> SmtBackendConfig::resolve_default(
    const std::string& script_hint) {
    auto from_spec = [](const std::string& spec) -> std::optional<SmtBackendConfig> {
        auto colon = spec.find(':');
        if (colon != std::string::npos && spec[0] != '/')
            return preset(spec.substr(0, colon), spec.substr(colon + 1));
        if (spec.find('/') != std::string::npos) {
            const std::string base = fs::path(spec).filename().string();
            if (base.find(".mjs") != std::string::npos || base.find(".js") != std::string::npos)
                return preset("z3-wasm", spec);
            if (base.find("cvc5") != std::string::npos) return preset("cvc5", spec);
            return preset("z3", spec);
        }
        std::string exe = find_on_path(spec);
        if (exe.empty()) return std::nullopt;
        return preset(spec, exe);
    };
    if (const char* env = std::getenv("GLITCH_SMT_SOLVER"); env && *env) {
        auto c = from_spec(env);
        if (!c) throw SolverError(std::string("GLITCH_SMT_SOLVER solver not found: ") + env);
        return c;
    }
    for (const char* name : {"z3", "cvc5"}) {
        std::string exe = find_on_path(name);
        if (!exe.empty()) return preset(name, exe);
    }
    std::string script;
    if (const char* env = std::getenv("GLITCH_SMT_SOLVER_SCRIPT"); env && *env) script = env;
    if (script.empty() && !script_hint.empty()) script = script_hint;
    if (!script.empty() && fs::exists(script)) return preset("z3-wasm", script);
    return std::nullopt;
}

SmtResult run_smt(const std::string& smt_path, const SmtBackendConfig& backend) {
    if (backend.executable.empty())
        throw ArgumentError("run_smt: backend executable not configured");
    if (!fs::exists(smt_path)) throw IoError("run_smt: no such file: " + smt_path);

    std::vector<std::string> argv{backend.executable};
    char limit_buf[32];
    std::snprintf(limit_buf, sizeof(limit_buf), "%.0f", std::max(1.0, backend.time_limit_s));
    for (std::string arg : backend.args_template) {
        auto replace = [&](const std::string& key, const std::string& val) {
            for (size_t pos; (pos = arg.find(key)) != std::string::npos;)
                arg.replace(pos, key.size(), val);
        };
        replace("{file}", fs::absolute(smt_path).string());
        replace("{limit}", limit_buf);
        argv.push_back(arg);
    }

    ProcessResult pr = run_process(argv, backend.time_limit_s * 1.5 + 10.0);
    SmtResult r;
    r.wall_time_s = pr.wall_time_s;
    if (pr.timed_out) {
        r.status = SmtStatus::timeout;
        return r;
    }

    std::istringstream in(pr.stdout_text);
    std::string line;
    bool verdict_seen = false;
    std::string rest;
    while (std::getline(in, line)) {
        if (!verdict_seen) {
            if (line == "sat") {
                r.status = SmtStatus::sat;
                verdict_seen = true;
            } else if (line == "unsat") {
                r.status = SmtStatus::unsat;
                verdict_seen = true;
            } else if (line == "unknown" || line == "timeout") {
                r.status = line == "timeout" ? SmtStatus::timeout : SmtStatus::unknown;
                verdict_seen = true;
            } else if (line.find("(error") != std::string::npos) {
                r.status = SmtStatus::solver_error;
                r.diagnostics = line;
                return r;
            }
        } else {
            rest += line;
            rest += "\n";
        }
    }
    if (!verdict_seen) {
        r.status = SmtStatus::solver_error;
        r.diagnostics = "no sat/unsat verdict; stderr: " + pr.stderr_text.substr(0, 2000);
        return r;
    }
    r.model_text = std::move(rest);
    return r;
}

namespace {

struct SExpr {
    std::string atom;
    std::vector<SExpr> children;
    bool is_atom() const { return children.empty() && !atom.empty(); }
};

struct SExprParser {
    const std::string& text;
    size_t pos = 0;

    void skip_ws() {
        while (pos < text.size() && std::isspace(static_cast<unsigned char>(text[pos]))) ++pos;
    }
    bool done() {
        skip_ws();
        return pos >= text.size();
    }
    SExpr parse() {
        skip_ws();
        if (pos >= text.size()) throw ParseError("smt model: unexpected end of input");
        if (text[pos] == '(') {
            ++pos;
            SExpr e;
            for (;;) {
                skip_ws();
                if (pos >= text.size()) throw ParseError("smt model: unbalanced parentheses");
                if (text[pos] == ')') {
                    ++pos;
                    return e;
                }
                e.children.push_back(parse());
            }
        }
        size_t start = pos;
        while (pos < text.size() && !std::isspace(static_cast<unsigned char>(text[pos])) &&
               text[pos] != '(' && text[pos] != ')')
            ++pos;
        SExpr e;
        e.atom = text.substr(start, pos - start);
        return e;
    }
};

double sexpr_value(const SExpr& e) {
    if (e.is_atom()) {
        char* end = nullptr;
        long double v = strtold(e.atom.c_str(), &end);
        if (end == e.atom.c_str())
            throw ParseError("smt model: cannot parse numeral '" + e.atom + "'");
        return static_cast<double>(v);
    }
    if (e.children.empty()) throw ParseError("smt model: empty value expression");
    const std::string& op = e.children[0].atom;
    if (op == "-" && e.children.size() == 2) return -sexpr_value(e.children[1]);
    if (op == "/" && e.children.size() == 3) {
        long double num = sexpr_value(e.children[1]);
        long double den = sexpr_value(e.children[2]);
        if (den == 0.0L) throw ParseError("smt model: zero denominator");
        return static_cast<double>(num / den);
    }
    if (op == "+" && e.children.size() == 2) return sexpr_value(e.children[1]);
    throw ParseError("smt model: unsupported value operator '" + op + "'");
}

} // namespace

GlitchTriple decode_smt_model(const Ensemble& m, const std::string& model_text,
                              double verify_tol) {
    SExprParser parser{model_text};
    SExpr top = parser.parse();

    SolveOutcome bridge;
    bridge.status = SolveStatus::feasible;
    for (const SExpr& pair : top.children) {
        if (pair.children.size() != 2 || !pair.children[0].is_atom())
            throw ParseError("smt model: malformed binding");
        bridge.assignment[pair.children[0].atom] = sexpr_value(pair.children[1]);
    }

    // forward to the assignment-based decoder (re-evaluation authoritative)
    return decode_solution(m, bridge, verify_tol);
}

} // namespace treeglitch
