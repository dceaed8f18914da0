/**
 * \file milp_encode.cpp
 *
 * Copyright 2026 the treeglitch authors.
 * License: Apache License 2.0
 */

#include "treeglitch/milp.hpp"

#include <algorithm>
#include <cmath>

#include "treeglitch/errors.hpp"

namespace treeglitch {

const char* to_string(OscillationMode m) {
    return m == OscillationMode::general ? "general" : "delta";
}

int MilpInstance::add_variable(const std::string& name, VarKind kind, double lower,
                               double upper) {
    if (!index_.emplace(name, static_cast<int>(vars_.size())).second)
        throw StructureError("milp: duplicate variable '" + name + "'");
    if (lower > upper)
        throw ArgumentError("milp: variable '" + name + "' has lower > upper");
    vars_.push_back(MilpVar{name, kind, lower, upper});
    return static_cast<int>(vars_.size()) - 1;
}

void MilpInstance::add_constraint(const std::string& name, std::vector<MilpTerm> terms,
                                  Sense sense, double rhs) {
    if (terms.empty())
        throw ArgumentError("milp: constraint '" + name + "' has no terms");
    for (const MilpTerm& t : terms)
        if (t.var < 0 || t.var >= static_cast<int>(vars_.size()))
            throw StructureError("milp: constraint '" + name + "' references unknown variable");
    constraints_.push_back(MilpConstraint{name, std::move(terms), sense, rhs});
}

void MilpInstance::set_objective(std::vector<MilpTerm> terms, double constant) {
    for (const MilpTerm& t : terms)
        if (t.var < 0 || t.var >= static_cast<int>(vars_.size()))
            throw StructureError("milp: objective references unknown variable");
    objective_ = std::move(terms);
    objective_constant_ = constant;
}

int MilpInstance::variable(const std::string& name) const {
    auto it = index_.find(name);
    return it == index_.end() ? -1 : it->second;
}

int MilpInstance::num_binaries() const {
    int c = 0;
    for (const auto& v : vars_)
        if (v.kind == VarKind::binary) ++c;
    return c;
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

} // namespace

std::string var_x(CopyTag w, int feature) {
    return std::string("x") + copy_suffix(w) + "_f" + std::to_string(feature);
}
std::string var_pred(CopyTag w, int tree, int node) {
    return std::string("p") + copy_suffix(w) + "_t" + std::to_string(tree) + "_n" +
           std::to_string(node);
}
std::string var_leaf(CopyTag w, int tree, int node) {
    return std::string("l") + copy_suffix(w) + "_t" + std::to_string(tree) + "_n" +
           std::to_string(node);
}
std::string var_output(CopyTag w) { return std::string("o") + copy_suffix(w); }
std::string var_dimsel(int feature) { return "d_f" + std::to_string(feature); }

std::vector<FeatureBounds> effective_box(const Ensemble& m, const EncodingParams& p) {
    std::vector<FeatureBounds> box(m.feature_space.all_bounds());
    if (p.region) {
        if (p.region->size() != box.size())
            throw ArgumentError("milp: region arity differs from the feature space");
        for (size_t f = 0; f < box.size(); ++f) {
            const FeatureBounds& r = (*p.region)[f];
            if (r.lo < box[f].lo || r.hi > box[f].hi)
                throw ArgumentError("milp: region exceeds feature bounds on feature " +
                                    std::to_string(f));
            box[f] = r;
        }
    }
    return box;
}

namespace {

// Builds one consistency copy into `inst`. eps_sep = 0 gives closure routing
// (a point exactly on a threshold may be claimed on either side).
void append_consistency(MilpInstance& inst, const Ensemble& m, CopyTag w,
                        const std::vector<FeatureBounds>& box, double eps_sep_rel,
                        bool closure) {
    const std::string sw = copy_suffix(w);

    for (int f = 0; f < m.num_features(); ++f)
        inst.add_variable(var_x(w, f), VarKind::continuous, box[f].lo, box[f].hi);

    // (threshold, var index) per feature for the ordering chain
    std::vector<std::vector<std::pair<double, int>>> preds_by_feature(m.num_features());

    for (int t = 0; t < m.num_trees(); ++t) {
        const Tree& tree = m.trees[t];
        for (int k = 0; k < static_cast<int>(tree.nodes.size()); ++k) {
            const Node& n = tree.nodes[k];
            if (n.is_leaf()) {
                inst.add_variable(var_leaf(w, t, k), VarKind::continuous, 0.0, 1.0);
            } else {
                int v = inst.add_variable(var_pred(w, t, k), VarKind::binary, 0.0, 1.0);
                preds_by_feature[n.feature].push_back({n.threshold, v});
            }
        }
    }

    double out_lo = m.output_lower_bound();
    double out_hi = m.output_upper_bound();
    int o = inst.add_variable(var_output(w), VarKind::continuous, out_lo, out_hi);

    // one active leaf per tree; leaf activation bounded by every predicate on
    // its root path; output = sum of value-weighted activations
    std::vector<MilpTerm> out_terms{{o, -1.0}};
    for (int t = 0; t < m.num_trees(); ++t) {
        const Tree& tree = m.trees[t];
        std::vector<MilpTerm> sum_terms;

        struct Frame { int node; std::vector<std::pair<int, bool>> path; };
        std::vector<Frame> stack{{tree.root, {}}};
        while (!stack.empty()) {
            Frame fr = std::move(stack.back());
            stack.pop_back();
            const Node& n = tree.nodes[fr.node];
            if (n.is_leaf()) {
                int lv = inst.variable(var_leaf(w, t, fr.node));
                sum_terms.push_back({lv, 1.0});
                if (n.value != 0.0) out_terms.push_back({lv, n.value});
                for (size_t a = 0; a < fr.path.size(); ++a) {
                    auto [pv, went_true] = fr.path[a];
                    // l <= p  or  l <= 1 - p
                    if (went_true)
                        inst.add_constraint("path_" + sw + "_t" + std::to_string(t) + "_n" +
                                                std::to_string(fr.node) + "_a" +
                                                std::to_string(a),
                                            {{lv, 1.0}, {pv, -1.0}}, Sense::le, 0.0);
                    else
                        inst.add_constraint("path_" + sw + "_t" + std::to_string(t) + "_n" +
                                                std::to_string(fr.node) + "_a" +
                                                std::to_string(a),
                                            {{lv, 1.0}, {pv, 1.0}}, Sense::le, 1.0);
                }
            } else {
                int pv = inst.variable(var_pred(w, t, fr.node));
                Frame tf{n.true_child, fr.path};
                tf.path.push_back({pv, true});
                Frame ff{n.false_child, fr.path};
                ff.path.push_back({pv, false});
                stack.push_back(std::move(ff));
                stack.push_back(std::move(tf));
            }
        }
        inst.add_constraint("sum_" + sw + "_t" + std::to_string(t), std::move(sum_terms),
                            Sense::eq, 1.0);
    }
    inst.add_constraint("def_o" + sw, std::move(out_terms), Sense::eq, 0.0);

    // threshold ordering: satisfaction of "v <= a" implies "v <= b" for a < b;
    // equal thresholds are tied, also across trees
    for (int f = 0; f < m.num_features(); ++f) {
        auto& preds = preds_by_feature[f];
        std::stable_sort(preds.begin(), preds.end(),
                         [](const auto& a, const auto& b) { return a.first < b.first; });
        for (size_t k = 0; k + 1 < preds.size(); ++k) {
            const auto& [ta, va] = preds[k];
            const auto& [tb, vb] = preds[k + 1];
            inst.add_constraint("ord_" + sw + "_f" + std::to_string(f) + "_" + std::to_string(k),
                                {{va, 1.0}, {vb, -1.0}}, ta == tb ? Sense::eq : Sense::le, 0.0);
        }
    }

    // link inputs to predicate binaries: p = 1 -> x <= a, p = 0 -> x >= a + eps
    for (int t = 0; t < m.num_trees(); ++t) {
        const Tree& tree = m.trees[t];
        for (int k = 0; k < static_cast<int>(tree.nodes.size()); ++k) {
            const Node& n = tree.nodes[k];
            if (n.is_leaf()) continue;
            const double L = box[n.feature].lo, U = box[n.feature].hi;
            const double eps = closure ? 0.0 : eps_sep_rel * (U - L);
            int xv = inst.variable(var_x(w, n.feature));
            int pv = inst.variable(var_pred(w, t, k));
            const std::string base =
                sw + "_t" + std::to_string(t) + "_n" + std::to_string(k);
            // x + (U - a) p <= U
            inst.add_constraint("linkU_" + base, {{xv, 1.0}, {pv, U - n.threshold}}, Sense::le,
                                U);
            // x + (a + eps - L) p >= a + eps
            inst.add_constraint("linkL_" + base, {{xv, 1.0}, {pv, n.threshold + eps - L}},
                                Sense::ge, n.threshold + eps);
        }
    }
}

struct ThresholdReps {
    std::vector<double> values;            // distinct thresholds within the box
    std::vector<std::pair<int, int>> reps; // (tree, node) representative per value
};

// One representative predicate node per distinct in-box threshold; all other
// nodes with the same (feature, threshold) are tied to it by the ordering
// equalities.
ThresholdReps threshold_reps(const Ensemble& m, int f, const FeatureBounds& b) {
    ThresholdReps out;
    std::vector<std::pair<double, std::pair<int, int>>> all;
    for (int t = 0; t < m.num_trees(); ++t) {
        const Tree& tree = m.trees[t];
        for (int k = 0; k < static_cast<int>(tree.nodes.size()); ++k) {
            const Node& n = tree.nodes[k];
            if (!n.is_leaf() && n.feature == f && n.threshold >= b.lo && n.threshold < b.hi)
                all.push_back({n.threshold, {t, k}});
        }
    }
    std::stable_sort(all.begin(), all.end(),
                     [](const auto& a, const auto& b) { return a.first < b.first; });
    for (const auto& [thr, tn] : all) {
        if (out.values.empty() || out.values.back() != thr) {
            out.values.push_back(thr);
            out.reps.push_back(tn);
        }
    }
    return out;
}

class ThreeCopyEncoder {
public:
    ThreeCopyEncoder(const Ensemble& m, const EncodingParams& params, const MilpVariant& variant,
                     bool closure)
        : m_(m), params_(params), variant_(variant), closure_(closure),
          box_(effective_box(m, params)) {
        m_.validate();
        if (!variant_.any && (variant_.dim < 0 || variant_.dim >= m_.num_features()))
            throw ArgumentError("milp: invalid fixed dimension " + std::to_string(variant_.dim));

        for (CopyTag w : kCopies)
            append_consistency(inst_, m_, w, box_, params_.eps_sep_rel, closure_);
        for (int f = 0; f < m_.num_features(); ++f)
            reps_.push_back(threshold_reps(m_, f, box_[f]));
    }

    double eps_for(int f) const {
        return closure_ ? 0.0 : params_.eps_sep_rel * box_[f].range();
    }
    double max_range() const {
        double r = 0.0;
        for (const auto& b : box_) r = std::max(r, b.range());
        return r;
    }
    double output_span() const { return m_.output_upper_bound() - m_.output_lower_bound(); }

    int x(CopyTag w, int f) const { return inst_.variable(var_x(w, f)); }
    int o(CopyTag w) const { return inst_.variable(var_output(w)); }

    /** Ordering/equality constraints across the three copies plus gap g. */
    void add_psi_and_gap() {
        if (!variant_.any)
            add_psi1();
        else
            add_psi2();

        // g = sum_j (xp_j - xm_j); all non-varying terms cancel to zero
        int g = inst_.add_variable(kVarGap, VarKind::continuous, 0.0, max_range());
        std::vector<MilpTerm> terms{{g, -1.0}};
        for (int f = 0; f < m_.num_features(); ++f) {
            terms.push_back({x(CopyTag::plus, f), 1.0});
            terms.push_back({x(CopyTag::minus, f), -1.0});
        }
        inst_.add_constraint("def_g", std::move(terms), Sense::eq, 0.0);
    }

    /** Shape binary + joint oscillation/magnitude rows at fixed alpha. */
    void add_shape_decision(double alpha) {
        int s = inst_.add_variable(kVarShape, VarKind::binary, 0.0, 1.0);
        int g = inst_.variable(kVarGap);
        const double M =
            params_.big_m.value_or(std::abs(alpha) * max_range() + output_span() + 1.0);

        auto row = [&](const char* name, CopyTag hi_side, double s_coef, double s_rhs) {
            // o(hi_side) - oc - alpha*g >= rhs side depending on s
            inst_.add_constraint(name,
                                 {{o(hi_side), 1.0}, {o(CopyTag::center), -1.0}, {g, -alpha},
                                  {s, s_coef}},
                                 Sense::ge, s_rhs);
        };
        if (params_.mode == OscillationMode::general) {
            // s = 1: canyon (om > oc < op); s = 0: hill via negated differences
            row("canyon_jm", CopyTag::minus, -M, -M);
            row("canyon_jp", CopyTag::plus, -M, -M);
            inst_.add_constraint("hill_jm",
                                 {{o(CopyTag::center), 1.0}, {o(CopyTag::minus), -1.0},
                                  {g, -alpha}, {s, M}},
                                 Sense::ge, 0.0);
            inst_.add_constraint("hill_jp",
                                 {{o(CopyTag::center), 1.0}, {o(CopyTag::plus), -1.0},
                                  {g, -alpha}, {s, M}},
                                 Sense::ge, 0.0);
        } else {
            add_delta_sign(s);
            // with the sign pattern fixed, jump directions are determined
            row("delta_jm", CopyTag::minus, -M, -M);
            row("delta_jp", CopyTag::plus, -M, -M);
            inst_.add_constraint("delta_hill_jm",
                                 {{o(CopyTag::center), 1.0}, {o(CopyTag::minus), -1.0},
                                  {g, -alpha}, {s, M}},
                                 Sense::ge, 0.0);
            inst_.add_constraint("delta_hill_jp",
                                 {{o(CopyTag::center), 1.0}, {o(CopyTag::plus), -1.0},
                                  {g, -alpha}, {s, M}},
                                 Sense::ge, 0.0);
        }
        inst_.set_objective({}); // feasibility problem
    }

    /** jmin <= both jumps in the shape-consistent direction (max variant). */
    void add_shape_max(double alpha_k) {
        int s = inst_.add_variable(kVarShape, VarKind::binary, 0.0, 1.0);
        int g = inst_.variable(kVarGap);
        int jmin = inst_.add_variable(kVarMinJump, VarKind::continuous, 0.0, output_span());
        const double M = params_.big_m.value_or(2.0 * output_span() + 1.0);

        inst_.add_constraint("jmin_canyon_m",
                             {{jmin, 1.0}, {o(CopyTag::minus), -1.0}, {o(CopyTag::center), 1.0},
                              {s, M}},
                             Sense::le, M);
        inst_.add_constraint("jmin_canyon_p",
                             {{jmin, 1.0}, {o(CopyTag::plus), -1.0}, {o(CopyTag::center), 1.0},
                              {s, M}},
                             Sense::le, M);
        inst_.add_constraint("jmin_hill_m",
                             {{jmin, 1.0}, {o(CopyTag::center), -1.0}, {o(CopyTag::minus), 1.0},
                              {s, -M}},
                             Sense::le, 0.0);
        inst_.add_constraint("jmin_hill_p",
                             {{jmin, 1.0}, {o(CopyTag::center), -1.0}, {o(CopyTag::plus), 1.0},
                              {s, -M}},
                             Sense::le, 0.0);

        inst_.set_objective({{jmin, 1.0}, {g, -alpha_k}});
    }

    EncodedProblem finish() {
        EncodingInfo info;
        info.variant = variant_;
        info.params = params_;
        info.closure = closure_;
        info.box = box_;
        return {std::move(inst_), std::move(info)};
    }

private:
    void add_psi1() {
        const int i = variant_.dim;
        for (int f = 0; f < m_.num_features(); ++f) {
            if (f == i) continue;
            inst_.add_constraint("eq_mc_f" + std::to_string(f),
                                 {{x(CopyTag::minus, f), 1.0}, {x(CopyTag::center, f), -1.0}},
                                 Sense::eq, 0.0);
            inst_.add_constraint("eq_cp_f" + std::to_string(f),
                                 {{x(CopyTag::center, f), 1.0}, {x(CopyTag::plus, f), -1.0}},
                                 Sense::eq, 0.0);
        }
        inst_.add_constraint("ord_mc",
                             {{x(CopyTag::center, i), 1.0}, {x(CopyTag::minus, i), -1.0}},
                             Sense::ge, eps_for(i));
        inst_.add_constraint("ord_cp",
                             {{x(CopyTag::plus, i), 1.0}, {x(CopyTag::center, i), -1.0}},
                             Sense::ge, eps_for(i));
        if (closure_) {
            add_cell_monotonicity_fixed(i);
            add_routing_equality_off_dim(i);
        }
    }

    void add_psi2() {
        std::vector<MilpTerm> onehot;
        for (int f = 0; f < m_.num_features(); ++f) {
            int d = inst_.add_variable(var_dimsel(f), VarKind::binary, 0.0, 1.0);
            onehot.push_back({d, 1.0});
        }
        inst_.add_constraint("onehot", std::move(onehot), Sense::eq, 1.0);

        for (int f = 0; f < m_.num_features(); ++f) {
            const double R = box_[f].range();
            const double eps = eps_for(f);
            int d = inst_.variable(var_dimsel(f));
            auto pair_rows = [&](CopyTag a, CopyTag b, const std::string& tag) {
                // equal unless f is the selected dimension
                inst_.add_constraint("eqU_" + tag + "_f" + std::to_string(f),
                                     {{x(a, f), 1.0}, {x(b, f), -1.0}, {d, -R}}, Sense::le, 0.0);
                inst_.add_constraint("eqL_" + tag + "_f" + std::to_string(f),
                                     {{x(b, f), 1.0}, {x(a, f), -1.0}, {d, -R}}, Sense::le, 0.0);
                // strictly increasing when selected
                inst_.add_constraint("inc_" + tag + "_f" + std::to_string(f),
                                     {{x(b, f), 1.0}, {x(a, f), -1.0}, {d, -(eps + R)}},
                                     Sense::ge, eps - (eps + R));
            };
            pair_rows(CopyTag::minus, CopyTag::center, "mc");
            pair_rows(CopyTag::center, CopyTag::plus, "cp");
        }
        if (closure_) add_cell_monotonicity_any();
    }

    std::vector<MilpTerm> cell_index_diff(CopyTag lo_copy, CopyTag hi_copy, int f) const {
        // cellIdx(w) = K - sum(p_w); cellIdx(hi) - cellIdx(lo) = sum(p_lo) - sum(p_hi)
        std::vector<MilpTerm> terms;
        for (const auto& [t, k] : reps_[f].reps) {
            terms.push_back({inst_.variable(var_pred(lo_copy, t, k)), 1.0});
            terms.push_back({inst_.variable(var_pred(hi_copy, t, k)), -1.0});
        }
        return terms;
    }

    void add_cell_monotonicity_fixed(int i) {
        if (reps_[i].reps.empty()) {
            // no thresholds on the target dimension: no glitch possible there
            inst_.add_constraint("cell_unsat", {{x(CopyTag::minus, i), 1.0}}, Sense::le,
                                 box_[i].lo - 1.0);
            return;
        }
        inst_.add_constraint("cell_mc", cell_index_diff(CopyTag::minus, CopyTag::center, i),
                             Sense::ge, 1.0);
        inst_.add_constraint("cell_cp", cell_index_diff(CopyTag::center, CopyTag::plus, i),
                             Sense::ge, 1.0);
    }

    void add_routing_equality_off_dim(int i) {
        for (int f = 0; f < m_.num_features(); ++f) {
            if (f == i) continue;
            for (const auto& [t, k] : reps_[f].reps) {
                inst_.add_constraint("share_mc_" + std::to_string(f) + "_" + std::to_string(t) +
                                         "_" + std::to_string(k),
                                     {{inst_.variable(var_pred(CopyTag::minus, t, k)), 1.0},
                                      {inst_.variable(var_pred(CopyTag::center, t, k)), -1.0}},
                                     Sense::eq, 0.0);
                inst_.add_constraint("share_cp_" + std::to_string(f) + "_" + std::to_string(t) +
                                         "_" + std::to_string(k),
                                     {{inst_.variable(var_pred(CopyTag::center, t, k)), 1.0},
                                      {inst_.variable(var_pred(CopyTag::plus, t, k)), -1.0}},
                                     Sense::eq, 0.0);
            }
        }
    }

    void add_cell_monotonicity_any() {
        for (int f = 0; f < m_.num_features(); ++f) {
            const int K = static_cast<int>(reps_[f].reps.size());
            int d = inst_.variable(var_dimsel(f));
            if (K == 0) {
                // dimension without thresholds can never carry a glitch
                inst_.add_constraint("nodim_f" + std::to_string(f), {{d, 1.0}}, Sense::le, 0.0);
                continue;
            }
            auto sel_rows = [&](CopyTag a, CopyTag b, const std::string& tag) {
                // selected: cell index strictly increases; unselected: equal
                auto inc = cell_index_diff(a, b, f);
                inc.push_back({d, -(K + 1.0)});
                inst_.add_constraint("cellinc_" + tag + "_f" + std::to_string(f), std::move(inc),
                                     Sense::ge, -static_cast<double>(K));
                auto eq_hi = cell_index_diff(a, b, f);
                eq_hi.push_back({d, -static_cast<double>(K)});
                inst_.add_constraint("celleqU_" + tag + "_f" + std::to_string(f),
                                     std::move(eq_hi), Sense::le, 0.0);
                auto eq_lo = cell_index_diff(b, a, f);
                eq_lo.push_back({d, -static_cast<double>(K)});
                inst_.add_constraint("celleqL_" + tag + "_f" + std::to_string(f),
                                     std::move(eq_lo), Sense::le, 0.0);
            };
            sel_rows(CopyTag::minus, CopyTag::center, "mc");
            sel_rows(CopyTag::center, CopyTag::plus, "cp");
        }
    }

    void add_delta_sign(int s) {
        const double eps_out = params_.eps_sep_rel * std::max(1.0, output_span());
        const double M = params_.big_m.value_or(
            std::max(std::abs(m_.output_lower_bound()), std::abs(m_.output_upper_bound())) +
            eps_out + 1.0);
        // s = 1: om >= 0, op >= 0, oc <= -eps_out (canyon crossing 0)
        inst_.add_constraint("sgn_m_pos", {{o(CopyTag::minus), 1.0}, {s, -M}}, Sense::ge, -M);
        inst_.add_constraint("sgn_p_pos", {{o(CopyTag::plus), 1.0}, {s, -M}}, Sense::ge, -M);
        inst_.add_constraint("sgn_c_neg", {{o(CopyTag::center), 1.0}, {s, M}}, Sense::le,
                             M - eps_out);
        // s = 0: om <= -eps_out, op <= -eps_out, oc >= 0 (hill crossing 0)
        inst_.add_constraint("sgn_m_neg", {{o(CopyTag::minus), 1.0}, {s, -M}}, Sense::le,
                             -eps_out);
        inst_.add_constraint("sgn_p_neg", {{o(CopyTag::plus), 1.0}, {s, -M}}, Sense::le,
                             -eps_out);
        inst_.add_constraint("sgn_c_pos", {{o(CopyTag::center), 1.0}, {s, M}}, Sense::ge, 0.0);
    }

    const Ensemble& m_;
    EncodingParams params_;
    MilpVariant variant_;
    bool closure_;
    std::vector<FeatureBounds> box_;
    std::vector<ThresholdReps> reps_;
    MilpInstance inst_;
};

} // namespace

MilpInstance encode_consistency(const Ensemble& m, CopyTag copy, const EncodingParams& params) {
    m.validate();
    MilpInstance inst;
    append_consistency(inst, m, copy, effective_box(m, params), params.eps_sep_rel, false);
    return inst;
}

EncodedProblem encode_decision(const Ensemble& m, const EncodingParams& params,
                               const MilpVariant& variant) {
    if (!(params.alpha > 0.0))
        throw ArgumentError("encode_decision: alpha must be positive");
    ThreeCopyEncoder enc(m, params, variant, /*closure=*/false);
    enc.add_psi_and_gap();
    enc.add_shape_decision(params.alpha);
    return enc.finish();
}

EncodedProblem encode_delta_variant(const Ensemble& m, const EncodingParams& params,
                                    const MilpVariant& variant) {
    EncodingParams p = params;
    p.mode = OscillationMode::delta_sign;
    return encode_decision(m, p, variant);
}

EncodedProblem encode_max_step(const Ensemble& m, const EncodingParams& params,
                               const MilpVariant& variant, double alpha_k) {
    if (alpha_k < 0.0) throw ArgumentError("encode_max_step: alpha_k must be nonnegative");
    ThreeCopyEncoder enc(m, params, variant, /*closure=*/true);
    enc.add_psi_and_gap();
    enc.add_shape_max(alpha_k);
    return enc.finish();
}

} // namespace treeglitch
