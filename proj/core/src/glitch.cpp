/**
 * \file glitch.cpp
 *
 * Copyright 2026 the treeglitch authors.
 * License: Apache License 2.0
 */

#include "treeglitch/glitch.hpp"

#include <cmath>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "treeglitch/errors.hpp"

namespace treeglitch {

const char* to_string(GlitchShape s) { return s == GlitchShape::canyon ? "canyon" : "hill"; }

const char* to_string(OutputSpace s) {
    return s == OutputSpace::margin ? "margin" : "probability";
}

const char* to_string(RejectionReason r) {
    switch (r) {
    case RejectionReason::none: return "none";
    case RejectionReason::ordering: return "ordering";
    case RejectionReason::monotone: return "monotone";
    case RejectionReason::magnitude: return "magnitude";
    }
    return "?";
}

double logistic(double margin) { return 1.0 / (1.0 + std::exp(-margin)); }

double EnsembleFunction::operator()(std::span<const double> x) const {
    double v = model_->eval(x);
    return output_space_ == OutputSpace::probability ? logistic(v) : v;
}

std::string GlitchTriple::to_json(const FeatureSpace* space) const {
    nlohmann::ordered_json j;
    j["dim"] = dim;
    if (space && dim >= 0 && dim < space->size()) j["dim_name"] = space->name(dim);
    j["points"] = {x_minus, x, x_plus};
    j["outputs"] = {f_minus, f, f_plus};
    j["magnitude"] = magnitude;
    j["shape"] = to_string(shape);
    j["output_space"] = to_string(output_space);
    return j.dump();
}

TripleFile TripleFile::parse(const std::string& text) {
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(text);
    } catch (const nlohmann::json::exception& e) {
        throw ParseError(std::string("triple file: ") + e.what());
    }
    if (!j.is_object() || !j.contains("dim") || !j.contains("points"))
        throw ParseError("triple file: expected object with 'dim' and 'points'");
    if (!j["points"].is_array() || j["points"].size() != 3)
        throw ParseError("triple file: 'points' must hold exactly 3 points");

    TripleFile t;
    t.dim = j["dim"].get<int>();
    t.x_minus = j["points"][0].get<std::vector<double>>();
    t.x = j["points"][1].get<std::vector<double>>();
    t.x_plus = j["points"][2].get<std::vector<double>>();
    if (t.x_minus.size() != t.x.size() || t.x.size() != t.x_plus.size())
        throw ParseError("triple file: points have differing lengths");
    if (j.contains("outputs")) {
        if (!j["outputs"].is_array() || j["outputs"].size() != 3)
            throw ParseError("triple file: 'outputs' must hold exactly 3 values");
        t.f_minus = j["outputs"][0].get<double>();
        t.f = j["outputs"][1].get<double>();
        t.f_plus = j["outputs"][2].get<double>();
    }
    return t;
}

TripleFile TripleFile::load(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open triple file: " + path);
    std::stringstream ss;
    ss << in.rdbuf();
    return parse(ss.str());
}

double magnitude(double f_minus, double f, double f_plus, double gap) {
    if (!(gap > 0.0)) throw ArgumentError("magnitude: gap must be positive");
    const bool canyon = f_minus > f && f < f_plus;
    const bool hill = f_minus < f && f > f_plus;
    if (!canyon && !hill) return 0.0;
    return std::min(std::abs(f - f_minus), std::abs(f - f_plus)) / gap;
}

double lipschitz_magnitude_bound(double L) {
    if (!(L > 0.0)) throw ArgumentError("lipschitz_magnitude_bound: L must be positive");
    return L / 2.0;
}

CheckResult check_triple_with_outputs(std::span<const double> x_minus, std::span<const double> x,
                                      std::span<const double> x_plus, double f_minus, double f,
                                      double f_plus, double alpha, OutputSpace space) {
    if (!(alpha > 0.0)) throw ArgumentError("check_triple: alpha must be positive");

    // Ordering: bitwise equality off the varying dimension, strict increase on
    // exactly one dimension.
    const size_t n = x.size();
    if (x_minus.size() != n || x_plus.size() != n || n == 0)
        return {std::nullopt, RejectionReason::ordering};
    int dim = -1;
    for (size_t i = 0; i < n; ++i) {
        if (x_minus[i] == x[i] && x[i] == x_plus[i]) continue;
        if (dim != -1) return {std::nullopt, RejectionReason::ordering};
        dim = static_cast<int>(i);
        if (!(x_minus[i] < x[i] && x[i] < x_plus[i]))
            return {std::nullopt, RejectionReason::ordering};
    }
    if (dim == -1) return {std::nullopt, RejectionReason::ordering};

    const bool canyon = f_minus > f && f < f_plus;
    const bool hill = f_minus < f && f > f_plus;
    if (!canyon && !hill) return {std::nullopt, RejectionReason::monotone};

    const double gap = x_plus[dim] - x_minus[dim];
    const double mag = std::min(std::abs(f - f_minus), std::abs(f - f_plus)) / gap;
    if (!(mag >= alpha)) return {std::nullopt, RejectionReason::magnitude};

    GlitchTriple t;
    t.dim = dim;
    t.x_minus.assign(x_minus.begin(), x_minus.end());
    t.x.assign(x.begin(), x.end());
    t.x_plus.assign(x_plus.begin(), x_plus.end());
    t.f_minus = f_minus;
    t.f = f;
    t.f_plus = f_plus;
    t.magnitude = mag;
    t.shape = canyon ? GlitchShape::canyon : GlitchShape::hill;
    t.output_space = space;
    return {t, RejectionReason::none};
}

CheckResult check_triple(const EvaluableFunction& f, std::span<const double> x_minus,
                         std::span<const double> x, std::span<const double> x_plus,
                         double alpha) {
    OutputSpace space = OutputSpace::margin;
    if (const auto* ef = dynamic_cast<const EnsembleFunction*>(&f))
        space = ef->output_space();
    return check_triple_with_outputs(x_minus, x, x_plus, f(x_minus), f(x), f(x_plus), alpha,
                                     space);
}

} // namespace treeglitch
