/**
 * \file milp_search.cpp
 *
 * Copyright 2026 the treeglitch authors.
 * License: Apache License 2.0
 */

#include "treeglitch/milp_search.hpp"

#include <cmath>
#include <cstdio>
#include <filesystem>

#include "treeglitch/errors.hpp"

namespace treeglitch {

namespace fs = std::filesystem;

namespace {

class ScratchDir {
public:
    explicit ScratchDir(const std::string& keep_dir) {
        if (!keep_dir.empty()) {
            fs::create_directories(keep_dir);
            dir_ = keep_dir;
            keep_ = true;
        } else {
            char tmpl[] = "/tmp/tg_milp_XXXXXX";
            char* d = ::mkdtemp(tmpl);
            if (!d) throw IoError("milp: mkdtemp failed");
            dir_ = d;
        }
    }
    ~ScratchDir() {
        if (!keep_) {
            std::error_code ec;
            fs::remove_all(dir_, ec);
        }
    }
    std::string file(const std::string& name) const { return dir_ + "/" + name; }

private:
    std::string dir_;
    bool keep_ = false;
};

double lookup(const SolveOutcome& o, const std::string& name, double fallback = 0.0) {
    auto it = o.assignment.find(name);
    return it == o.assignment.end() ? fallback : it->second;
}

std::optional<double> lookup_opt(const SolveOutcome& o, const std::string& name) {
    auto it = o.assignment.find(name);
    if (it == o.assignment.end()) return std::nullopt;
    return it->second;
}

} // namespace

GlitchTriple decode_solution(const Ensemble& m, const SolveOutcome& outcome,
                             double verify_tol) {
    if (outcome.status != SolveStatus::feasible)
        throw ArgumentError("decode_solution: outcome is not feasible");

    const int nf = m.num_features();
    std::vector<double> xm(nf), xc(nf), xp(nf);
    for (int f = 0; f < nf; ++f) {
        auto vm = lookup_opt(outcome, var_x(CopyTag::minus, f));
        auto vc = lookup_opt(outcome, var_x(CopyTag::center, f));
        auto vp = lookup_opt(outcome, var_x(CopyTag::plus, f));
        if (!vm || !vc || !vp)
            throw SoundnessError("decode_solution: assignment lacks input variables for f" +
                                 std::to_string(f));
        xm[f] = *vm;
        xc[f] = *vc;
        xp[f] = *vp;
    }

    // The varying dimension has the largest outer spread; everything else is
    // solver noise to be snapped onto the center copy (Eq. 1 requires bitwise
    // equality there).
    int dim = -1;
    double best_spread = 0.0;
    for (int f = 0; f < nf; ++f) {
        const double spread = xp[f] - xm[f];
        if (spread > best_spread) {
            best_spread = spread;
            dim = f;
        }
    }
    if (dim < 0) throw SoundnessError("decode_solution: no varying dimension in assignment");
    for (int f = 0; f < nf; ++f) {
        if (f == dim) continue;
        xm[f] = xc[f];
        xp[f] = xc[f];
    }

    const double fm = m.eval(xm), fc = m.eval(xc), fp = m.eval(xp);
    for (auto [name, claimed, actual] :
         {std::tuple{var_output(CopyTag::minus), lookup_opt(outcome, var_output(CopyTag::minus)), fm},
          std::tuple{var_output(CopyTag::center), lookup_opt(outcome, var_output(CopyTag::center)), fc},
          std::tuple{var_output(CopyTag::plus), lookup_opt(outcome, var_output(CopyTag::plus)), fp}}) {
        if (claimed && std::abs(*claimed - actual) > verify_tol)
            throw SoundnessError("decode_solution: solver claims " + name + " = " +
                                 format_double(*claimed) + " but true evaluation gives " +
                                 format_double(actual));
    }

    GlitchTriple t;
    t.dim = dim;
    t.x_minus = std::move(xm);
    t.x = std::move(xc);
    t.x_plus = std::move(xp);
    t.f_minus = fm;
    t.f = fc;
    t.f_plus = fp;
    t.magnitude = magnitude(fm, fc, fp, t.x_plus[dim] - t.x_minus[dim]);
    t.shape = fm > fc ? GlitchShape::canyon : GlitchShape::hill;
    t.output_space = OutputSpace::margin;
    return t;
}

DecisionResult solve_decision(const Ensemble& m, const EncodingParams& params,
                              const MilpVariant& variant, const MilpSearchOptions& opts) {
    EncodedProblem enc = encode_decision(m, params, variant);
    ScratchDir scratch(opts.keep_lp_dir);
    const std::string lp = scratch.file("decision.lp");
    emit_lp(enc.instance, lp);

    DecisionResult result;
    result.outcome = run_backend(lp, opts.backend);
    if (result.outcome.status == SolveStatus::feasible)
        result.triple = decode_solution(m, result.outcome, opts.verify_tol);
    return result;
}

namespace {

// Rebuilds the base point the solver chose: one representative per claimed
// cell on every non-target dimension, read off the center copy's predicate
// binaries. Matches the oracle's grid representatives exactly.
std::vector<double> decode_base(const Ensemble& m, const EncodingInfo& info,
                                const SolveOutcome& o, int dim) {
    const int nf = m.num_features();
    std::vector<double> base(nf, 0.0);
    for (int f = 0; f < nf; ++f) {
        CellDecomposition cells = cell_decomposition(m, f, info.box[f]);
        if (f == dim) {
            base[f] = cells.lo;
            continue;
        }
        // claimed cell = number of thresholds the center copy crossed
        int cell = 0;
        std::vector<std::pair<double, int>> used; // (threshold, var idx) dedup'd
        for (int t = 0; t < m.num_trees(); ++t) {
            const Tree& tree = m.trees[t];
            for (int k = 0; k < static_cast<int>(tree.nodes.size()); ++k) {
                const Node& n = tree.nodes[k];
                if (n.is_leaf() || n.feature != f) continue;
                if (n.threshold < cells.lo || n.threshold >= cells.hi) continue;
                bool seen = false;
                for (auto& [thr, cnt] : used)
                    if (thr == n.threshold) { seen = true; break; }
                if (seen) continue;
                used.push_back({n.threshold, 0});
                if (lookup(o, var_pred(CopyTag::center, t, k), 1.0) < 0.5) ++cell;
            }
        }
        base[f] = cells.representative(std::min(cell, cells.num_cells() - 1));
    }
    return base;
}

int decode_dim(const Ensemble& m, const EncodingInfo& info, const SolveOutcome& o) {
    if (!info.variant.any) return info.variant.dim;
    int best = -1;
    double best_v = 0.5;
    for (int f = 0; f < m.num_features(); ++f) {
        double v = lookup(o, var_dimsel(f), 0.0);
        if (v > best_v) {
            best_v = v;
            best = f;
        }
    }
    if (best < 0) throw SoundnessError("milp: no dimension selector set in solution");
    return best;
}

} // namespace

OracleResult solve_max_magnitude(const Ensemble& m, const EncodingParams& params, double tol,
                                 const MilpSearchOptions& opts, const MilpVariant& variant) {
    if (!(tol > 0.0)) throw ArgumentError("solve_max_magnitude: tol must be positive");

    ScratchDir scratch(opts.keep_lp_dir);
    OracleResult incumbent;
    double alpha_k = 0.0;

    for (int iter = 0; iter < opts.max_iterations; ++iter) {
        EncodedProblem enc = encode_max_step(m, params, variant, alpha_k);
        const std::string lp = scratch.file("max_" + std::to_string(iter) + ".lp");
        emit_lp(enc.instance, lp);
        SolveOutcome out = run_backend(lp, opts.backend);

        if (out.status == SolveStatus::timeout) {
            incumbent.timed_out = true; // anytime behavior: best-so-far
            return incumbent;
        }
        if (out.status != SolveStatus::feasible)
            throw SolverError("solve_max_magnitude: subproblem " + std::to_string(iter) +
                              " came back " + to_string(out.status) + "; " + out.diagnostics);

        // recompute the objective from the assignment (solver-agnostic)
        const double jmin = lookup(out, kVarMinJump, 0.0);
        const double gap = lookup(out, kVarGap, 0.0);
        const double improvement = jmin - alpha_k * gap;
        if (improvement <= tol) break;

        const int dim = decode_dim(m, enc.info, out);
        std::vector<double> base = decode_base(m, enc.info, out, dim);
        SliceProfile prof = slice(m, base, dim, &enc.info.box[dim]);
        OracleResult refined = best_glitch_on_slice(prof, kDefaultWitnessDeltaRel);
        if (!refined.found() || refined.sup_magnitude <= alpha_k) break; // numeric guard

        alpha_k = refined.sup_magnitude;
        incumbent = std::move(refined);
    }
    incumbent.sup_magnitude = alpha_k;
    return incumbent;
}

} // namespace treeglitch
