/**
 * \file glitch.hpp
 *
 * Copyright 2026 the treeglitch authors.
 * License: Apache License 2.0
 */

#ifndef TREEGLITCH_GLITCH_HPP
#define TREEGLITCH_GLITCH_HPP

#include <functional>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "treeglitch/ensemble.hpp"

namespace treeglitch {

enum class GlitchShape { canyon, hill };

enum class OutputSpace { margin, probability };

const char* to_string(GlitchShape s);
const char* to_string(OutputSpace s);

/**
 * A verified one-dimensional output oscillation: three points equal on every
 * coordinate except `dim`, strictly increasing on `dim`, whose outputs drop
 * then rise (canyon) or rise then drop (hill). `magnitude` is the smaller of
 * the two output jumps divided by the `dim` gap between the outer points.
 */
struct GlitchTriple {
    int dim = -1;
    std::vector<double> x_minus, x, x_plus;
    double f_minus = 0.0, f = 0.0, f_plus = 0.0;
    double magnitude = 0.0;
    GlitchShape shape = GlitchShape::canyon;
    OutputSpace output_space = OutputSpace::margin;

    double gap() const { return x_plus[dim] - x_minus[dim]; }

    std::string to_json(const FeatureSpace* space = nullptr) const;
};

/** Parses the JSON produced by GlitchTriple::to_json (outputs optional). */
struct TripleFile {
    int dim = -1;
    std::vector<double> x_minus, x, x_plus;
    std::optional<double> f_minus, f, f_plus;

    bool has_outputs() const { return f_minus && f && f_plus; }
    static TripleFile parse(const std::string& text);
    static TripleFile load(const std::string& path);
};

/** A deterministic real-valued function over a feature space. */
class EvaluableFunction {
public:
    virtual ~EvaluableFunction() = default;
    virtual double operator()(std::span<const double> x) const = 0;
    virtual const FeatureSpace& space() const = 0;
};

/** Ensemble margin, optionally squashed through the logistic function. */
class EnsembleFunction final : public EvaluableFunction {
public:
    EnsembleFunction(const Ensemble& m, OutputSpace space = OutputSpace::margin)
        : model_(&m), output_space_(space) {}

    double operator()(std::span<const double> x) const override;
    const FeatureSpace& space() const override { return model_->feature_space; }
    OutputSpace output_space() const { return output_space_; }

private:
    const Ensemble* model_;
    OutputSpace output_space_;
};

/** Adapts a plain callable; used by the property suites. */
class FunctionView final : public EvaluableFunction {
public:
    FunctionView(std::function<double(std::span<const double>)> fn, FeatureSpace space)
        : fn_(std::move(fn)), space_(std::move(space)) {}

    double operator()(std::span<const double> x) const override { return fn_(x); }
    const FeatureSpace& space() const override { return space_; }

private:
    std::function<double(std::span<const double>)> fn_;
    FeatureSpace space_;
};

enum class RejectionReason {
    none,
    ordering,  ///< points do not differ in exactly one strictly increasing dimension
    monotone,  ///< outputs are not canyon- or hill-shaped
    magnitude, ///< oscillation abruptness below the requested alpha
};

const char* to_string(RejectionReason r);

struct CheckResult {
    std::optional<GlitchTriple> triple;
    RejectionReason rejection = RejectionReason::none;

    bool accepted() const { return triple.has_value(); }
};

/**
 * Decides whether (x_minus, x, x_plus) is an alpha-glitch of f. On success the
 * returned triple carries the exact magnitude (which is >= alpha) and shape;
 * otherwise the result names the first violated condition.
 */
CheckResult check_triple(const EvaluableFunction& f, std::span<const double> x_minus,
                         std::span<const double> x, std::span<const double> x_plus,
                         double alpha);

/** Same decision when the three outputs are already known. */
CheckResult check_triple_with_outputs(std::span<const double> x_minus, std::span<const double> x,
                                      std::span<const double> x_plus, double f_minus, double f,
                                      double f_plus, double alpha,
                                      OutputSpace space = OutputSpace::margin);

/**
 * min(|f - f_minus|, |f - f_plus|) / gap when the three values oscillate
 * (strict drop-rise or rise-drop); 0 otherwise. gap must be positive.
 */
double magnitude(double f_minus, double f, double f_plus, double gap);

/** Largest possible glitch magnitude of an L-Lipschitz function: L/2. */
double lipschitz_magnitude_bound(double L);

double logistic(double margin);

} // namespace treeglitch

#endif // TREEGLITCH_GLITCH_HPP
