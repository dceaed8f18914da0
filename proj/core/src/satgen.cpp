/**
 * \file satgen.cpp
 *
 * Copyright 2026 the treeglitch authors.
 * License: Apache License 2.0
 */

#include "treeglitch/satgen.hpp"

#include <cmath>
#include <cstdint>
#include <fstream>
#include <sstream>

#include "treeglitch/errors.hpp"

namespace treeglitch {

void CnfFormula::validate() const {
    if (num_vars <= 0) throw ArgumentError("cnf: num_vars must be positive");
    for (size_t c = 0; c < clauses.size(); ++c)
        for (int lit : clauses[c]) {
            if (lit == 0 || std::abs(lit) > num_vars)
                throw ArgumentError("cnf: clause " + std::to_string(c) +
                                    " references invalid literal " + std::to_string(lit));
        }
}

bool CnfFormula::eval(const std::vector<bool>& assignment) const {
    for (const auto& clause : clauses) {
        bool sat = false;
        for (int lit : clause) {
            bool v = assignment.at(std::abs(lit) - 1);
            if (lit < 0 ? !v : v) { sat = true; break; }
        }
        if (!sat) return false;
    }
    return true;
}

namespace {

constexpr double kVarThreshold = 0.5;

// Builds the clause-tracking subtree: one level per literal in clause order,
// leaf 1 as soon as a branch satisfies the clause, leaf 0 on the falsifying
// path. Variables repeated within the clause are resolved by the earlier
// level, collapsing the later one. Returns the subtree root index.
int build_clause_subtree(Tree& tree, const std::array<int, 3>& clause, size_t k,
                         std::vector<int>& partial) {
    if (k == clause.size()) {
        tree.nodes.push_back(Node::leaf(0.0));
        return static_cast<int>(tree.nodes.size()) - 1;
    }
    const int lit = clause[k];
    const int var = std::abs(lit) - 1;
    const bool positive = lit > 0;

    if (partial[var] != 0) { // already decided on this path
        const bool value = partial[var] > 0;
        if (value == positive) {
            tree.nodes.push_back(Node::leaf(1.0));
            return static_cast<int>(tree.nodes.size()) - 1;
        }
        return build_clause_subtree(tree, clause, k + 1, partial);
    }

    const int me = static_cast<int>(tree.nodes.size());
    tree.nodes.emplace_back();

    // true branch: v <= 0.5, i.e. the variable is assigned true
    int true_child;
    if (positive) {
        tree.nodes.push_back(Node::leaf(1.0));
        true_child = static_cast<int>(tree.nodes.size()) - 1;
    } else {
        partial[var] = 1;
        true_child = build_clause_subtree(tree, clause, k + 1, partial);
        partial[var] = 0;
    }

    int false_child;
    if (!positive) {
        tree.nodes.push_back(Node::leaf(1.0));
        false_child = static_cast<int>(tree.nodes.size()) - 1;
    } else {
        partial[var] = -1;
        false_child = build_clause_subtree(tree, clause, k + 1, partial);
        partial[var] = 0;
    }

    tree.nodes[me] = Node::internal(var, kVarThreshold, true_child, false_child);
    return me;
}

Tree make_gate_tree(const std::array<int, 3>& clause, int num_vars, int r_dim,
                    double root_threshold, bool subtree_on_true) {
    Tree tree;
    tree.nodes.emplace_back(); // root filled in below
    tree.nodes.push_back(Node::leaf(0.0));
    const int zero_leaf = 1;
    std::vector<int> partial(num_vars, 0);
    const int sub_root = build_clause_subtree(tree, clause, 0, partial);
    tree.nodes[0] = subtree_on_true
                        ? Node::internal(r_dim, root_threshold, sub_root, zero_leaf)
                        : Node::internal(r_dim, root_threshold, zero_leaf, sub_root);
    tree.root = 0;
    return tree;
}

} // namespace

ReductionOutput reduce(const CnfFormula& phi, std::optional<double> epsilon) {
    phi.validate();
    const int m = phi.num_clauses();
    if (m == 0) throw ArgumentError("reduce: formula has no clauses");

    const double eps = epsilon.value_or(1.0 / (2.0 * m));
    if (!(eps > 0.0 && eps < 1.0 / m))
        throw ArgumentError("reduce: epsilon must lie in (0, 1/m)");

    const int n = phi.num_vars;
    const int r_dim = n;

    std::vector<std::string> names;
    std::vector<FeatureBounds> bounds;
    for (int i = 1; i <= n; ++i) {
        names.push_back("v" + std::to_string(i));
        bounds.push_back(FeatureBounds{0.0, 1.0});
    }
    names.push_back("r");
    bounds.push_back(FeatureBounds{-1.0, 1.0});

    ReductionOutput out;
    out.ensemble.feature_space = FeatureSpace(std::move(names), std::move(bounds));
    for (const auto& clause : phi.clauses) {
        // T_k: "r <= 0.5-eps" gates the clause subtree on its false branch
        out.ensemble.trees.push_back(make_gate_tree(clause, n, r_dim, 0.5 - eps, false));
        // T'_k: "r <= -0.5" gates it on its true branch
        out.ensemble.trees.push_back(make_gate_tree(clause, n, r_dim, -0.5, true));
    }
    out.ensemble.metadata["generator"] = "cnf-reduction";
    out.ensemble.validate();

    out.alpha = static_cast<double>(m);
    out.dim = r_dim;
    out.epsilon = eps;
    return out;
}

SatResult brute_force_sat(const CnfFormula& phi) {
    phi.validate();
    if (phi.num_vars > 24)
        throw ArgumentError("brute_force_sat: refusing " + std::to_string(phi.num_vars) +
                            " variables (limit 24)");
    const std::uint32_t count = 1u << phi.num_vars;
    std::vector<bool> assignment(phi.num_vars);
    for (std::uint32_t mask = 0; mask < count; ++mask) {
        for (int i = 0; i < phi.num_vars; ++i) assignment[i] = (mask >> i) & 1u;
        if (phi.eval(assignment)) return {true, assignment};
    }
    return {false, {}};
}

CnfFormula parse_dimacs_text(const std::string& text, const DimacsOptions& opts) {
    std::istringstream in(text);
    std::string tok;
    CnfFormula phi;
    bool have_header = false;
    std::vector<int> current;

    std::string line;
    size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        std::istringstream ls(line);
        std::string first;
        if (!(ls >> first)) continue;
        if (first == "c" || first[0] == 'c') continue;
        if (first == "p") {
            std::string fmt;
            int nv = 0, nc = 0;
            if (!(ls >> fmt >> nv >> nc) || fmt != "cnf")
                throw ParseError("dimacs line " + std::to_string(lineno) +
                                 ": malformed header (expected 'p cnf <vars> <clauses>')");
            if (have_header)
                throw ParseError("dimacs line " + std::to_string(lineno) + ": duplicate header");
            phi.num_vars = nv;
            have_header = true;
            continue;
        }
        if (!have_header)
            throw ParseError("dimacs line " + std::to_string(lineno) + ": clause before header");

        // first token is already a literal; push it back through one stream
        std::istringstream all(line);
        int lit;
        while (all >> lit) {
            if (lit == 0) {
                if (current.empty())
                    throw ParseError("dimacs line " + std::to_string(lineno) + ": empty clause");
                if (current.size() > 3)
                    throw ParseError("dimacs line " + std::to_string(lineno) + ": clause of " +
                                     std::to_string(current.size()) + " literals (3-CNF only)");
                if (current.size() < 3 && !opts.pad)
                    throw ParseError("dimacs line " + std::to_string(lineno) + ": clause of " +
                                     std::to_string(current.size()) +
                                     " literals (use padding to duplicate literals)");
                while (current.size() < 3) current.push_back(current.back());
                phi.clauses.push_back({current[0], current[1], current[2]});
                current.clear();
            } else {
                if (std::abs(lit) > phi.num_vars)
                    throw ParseError("dimacs line " + std::to_string(lineno) + ": literal " +
                                     std::to_string(lit) + " exceeds declared variable count");
                current.push_back(lit);
            }
        }
    }
    if (!have_header) throw ParseError("dimacs: missing 'p cnf' header");
    if (!current.empty()) throw ParseError("dimacs: unterminated final clause (missing 0)");
    phi.validate();
    return phi;
}

CnfFormula parse_dimacs(const std::string& path, const DimacsOptions& opts) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open DIMACS file: " + path);
    std::stringstream ss;
    ss << in.rdbuf();
    try {
        return parse_dimacs_text(ss.str(), opts);
    } catch (const ParseError& e) {
        throw ParseError(path + ": " + e.what());
    }
}

} // namespace treeglitch
