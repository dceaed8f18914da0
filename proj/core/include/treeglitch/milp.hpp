/**
 * \file milp.hpp
 *
 * Copyright 2026 the treeglitch authors.
 * License: Apache License 2.0
 */

#ifndef TREEGLITCH_MILP_HPP
#define TREEGLITCH_MILP_HPP

#include <optional>
#include <string>
#include <unordered_map>
#include <vector>

#include "treeglitch/ensemble.hpp"
#include "treeglitch/oracle.hpp"

namespace treeglitch {

enum class VarKind { continuous, binary };
enum class Sense { le, ge, eq };

struct MilpVar {
    std::string name;
    VarKind kind = VarKind::continuous;
    double lower = 0.0;
    double upper = 1.0;
};

struct MilpTerm {
    int var = -1;
    double coef = 0.0;
};

struct MilpConstraint {
    std::string name;
    std::vector<MilpTerm> terms;
    Sense sense = Sense::le;
    double rhs = 0.0;
};

/**
 * Backend-agnostic MILP: named variables with bounds, linear constraints, one
 * maximization objective. Variable and constraint order is the creation
 * order, which makes LP emission deterministic.
 */
class MilpInstance {
public:
    int add_variable(const std::string& name, VarKind kind, double lower, double upper);
    void add_constraint(const std::string& name, std::vector<MilpTerm> terms, Sense sense,
                        double rhs);
    void set_objective(std::vector<MilpTerm> terms, double constant = 0.0);

    /** Index of a declared variable, -1 if unknown. */
    int variable(const std::string& name) const;

    const std::vector<MilpVar>& variables() const { return vars_; }
    const std::vector<MilpConstraint>& constraints() const { return constraints_; }
    const std::vector<MilpTerm>& objective_terms() const { return objective_; }
    double objective_constant() const { return objective_constant_; }

    int num_binaries() const;

private:
    std::vector<MilpVar> vars_;
    std::vector<MilpConstraint> constraints_;
    std::vector<MilpTerm> objective_;
    double objective_constant_ = 0.0;
    std::unordered_map<std::string, int> index_;
};

enum class OscillationMode {
    general,    ///< raw drop-rise / rise-drop of outputs
    delta_sign, ///< sign-pattern oscillation around output 0
};

const char* to_string(OscillationMode m);

struct EncodingParams {
    double eps_sep_rel = kDefaultEpsSepRel; ///< strict-inequality gap, relative to range
    std::optional<double> big_m;            ///< override; per-constraint auto otherwise
    OscillationMode mode = OscillationMode::general;
    double alpha = 0.0;                     ///< decision variants
    std::optional<std::vector<FeatureBounds>> region; ///< local-search box
};

/** Fixed-dimension vs solver-chosen-dimension encodings. */
struct MilpVariant {
    bool any = true;
    int dim = -1;

    static MilpVariant fixed(int dim) { return {false, dim}; }
    static MilpVariant any_dim() { return {true, -1}; }
};

enum class CopyTag { minus, center, plus };

std::string var_x(CopyTag w, int feature);
std::string var_pred(CopyTag w, int tree, int node);
std::string var_leaf(CopyTag w, int tree, int node);
std::string var_output(CopyTag w);
std::string var_dimsel(int feature);
inline constexpr const char* kVarGap = "g";
inline constexpr const char* kVarMinJump = "jmin";
inline constexpr const char* kVarShape = "s";

/** What decode needs to interpret a solution of an encoded problem. */
struct EncodingInfo {
    MilpVariant variant;
    EncodingParams params;
    bool closure = false;
    std::vector<FeatureBounds> box; ///< effective per-feature bounds
};

struct EncodedProblem {
    MilpInstance instance;
    EncodingInfo info;
};

/**
 * One copy of the Kantchelian-style consistency constraints: predicate
 * binaries, leaf activations in [0,1] summing to one per tree, root-path
 * activation bounds, same-feature threshold-ordering implications, and big-M
 * links from the input variables to the predicate binaries.
 */
MilpInstance encode_consistency(const Ensemble& m, CopyTag copy, const EncodingParams& = {});

/**
 * Feasibility encoding of the decision problems: three consistency copies,
 * the one-varying-dimension constraints (fixed or solver-chosen), and the
 * joint oscillation-shape/magnitude constraints at params.alpha.
 */
EncodedProblem encode_decision(const Ensemble& m, const EncodingParams& params,
                               const MilpVariant& variant);

/** encode_decision with the sign-pattern oscillation predicate. */
EncodedProblem encode_delta_variant(const Ensemble& m, const EncodingParams& params,
                                    const MilpVariant& variant);

/**
 * One fractional-iteration subproblem for the max-magnitude search: closure
 * routing (supremum semantics), objective jmin - alpha_k * gap.
 */
EncodedProblem encode_max_step(const Ensemble& m, const EncodingParams& params,
                               const MilpVariant& variant, double alpha_k);

/** Feature bounds after applying params.region (validated against the space). */
std::vector<FeatureBounds> effective_box(const Ensemble& m, const EncodingParams& params);

/** CPLEX-LP serialization; deterministic byte-for-byte. */
std::string to_lp_string(const MilpInstance& instance);
void emit_lp(const MilpInstance& instance, const std::string& path);

/** Round-trip-exact formatting used by the LP and CSV writers. */
std::string format_double(double v);

} // namespace treeglitch

#endif // TREEGLITCH_MILP_HPP
