/**
 * \file model_io.cpp
 *
 * Copyright 2026 the treeglitch authors.
 * License: Apache License 2.0
 */

#include "treeglitch/model_io.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <sstream>
#include <unordered_map>

#include <json.hpp>

#include "treeglitch/errors.hpp"

namespace treeglitch {

using nlohmann::json;
using nlohmann::ordered_json;

namespace {

void require_finite(double v, const std::string& what) {
    if (!std::isfinite(v)) throw ParseError(what + ": non-finite number");
}

// Bounds for features a file does not bound itself.
std::vector<FeatureBounds> default_bounds(const Ensemble& partial, int num_features,
                                          const LoadOptions& opts) {
    std::vector<FeatureBounds> bounds(num_features, FeatureBounds{0.0, 1.0});
    if (opts.normalized) return bounds;
    std::vector<double> lo(num_features, std::numeric_limits<double>::infinity());
    std::vector<double> hi(num_features, -std::numeric_limits<double>::infinity());
    for (const Tree& t : partial.trees)
        for (const Node& n : t.nodes)
            if (!n.is_leaf()) {
                lo[n.feature] = std::min(lo[n.feature], n.threshold);
                hi[n.feature] = std::max(hi[n.feature], n.threshold);
            }
    for (int i = 0; i < num_features; ++i)
        if (std::isfinite(lo[i])) bounds[i] = FeatureBounds{lo[i] - 1.0, hi[i] + 1.0};
    return bounds;
}

Tree parse_native_tree(const json& jt, size_t tree_idx) {
    const std::string ctx = "trees[" + std::to_string(tree_idx) + "]";
    if (!jt.is_object() || !jt.contains("root") || !jt.contains("nodes"))
        throw ParseError(ctx + ": expected object with 'root' and 'nodes'");

    const json& jnodes = jt["nodes"];
    if (!jnodes.is_array() || jnodes.empty())
        throw ParseError(ctx + ".nodes: expected non-empty array");

    // File node ids are arbitrary; map them onto vector indices.
    std::unordered_map<long long, int> id_to_index;
    for (size_t k = 0; k < jnodes.size(); ++k) {
        const json& jn = jnodes[k];
        if (!jn.is_object() || !jn.contains("id"))
            throw ParseError(ctx + ".nodes[" + std::to_string(k) + "]: missing 'id'");
        long long id = jn["id"].get<long long>();
        if (!id_to_index.emplace(id, static_cast<int>(k)).second)
            throw ParseError(ctx + ": duplicate node id " + std::to_string(id));
    }
    auto resolve = [&](long long id, const std::string& what) {
        auto it = id_to_index.find(id);
        if (it == id_to_index.end())
            throw StructureError(ctx + ": " + what + " references missing node id " +
                                 std::to_string(id));
        return it->second;
    };

    Tree tree;
    tree.nodes.reserve(jnodes.size());
    for (size_t k = 0; k < jnodes.size(); ++k) {
        const json& jn = jnodes[k];
        const std::string nctx = ctx + ".nodes[" + std::to_string(k) + "]";
        if (jn.contains("leaf")) {
            double v = jn["leaf"].get<double>();
            require_finite(v, nctx + ".leaf");
            tree.nodes.push_back(Node::leaf(v));
        } else {
            for (const char* field : {"feature", "threshold", "true", "false"})
                if (!jn.contains(field))
                    throw ParseError(nctx + ": missing '" + std::string(field) + "'");
            double thr = jn["threshold"].get<double>();
            require_finite(thr, nctx + ".threshold");
            tree.nodes.push_back(Node::internal(
                jn["feature"].get<int>(), thr,
                resolve(jn["true"].get<long long>(), nctx + ".true"),
                resolve(jn["false"].get<long long>(), nctx + ".false")));
        }
    }
    tree.root = resolve(jt["root"].get<long long>(), ctx + ".root");
    return tree;
}

} // namespace

Ensemble parse_native_model(std::istream& in, const LoadOptions& opts) {
    json doc;
    try {
        doc = json::parse(in);
    } catch (const json::exception& e) {
        throw ParseError(std::string("native model: ") + e.what());
    }
    if (!doc.is_object() || !doc.contains("features") || !doc.contains("trees"))
        throw ParseError("native model: expected object with 'features' and 'trees'");

    Ensemble m;
    std::vector<std::string> names;
    std::vector<FeatureBounds> bounds;
    bool any_bounds_missing = false;
    for (size_t i = 0; i < doc["features"].size(); ++i) {
        const json& jf = doc["features"][i];
        const std::string ctx = "features[" + std::to_string(i) + "]";
        if (!jf.is_object() || !jf.contains("name"))
            throw ParseError(ctx + ": expected object with 'name'");
        names.push_back(jf["name"].get<std::string>());
        if (jf.contains("lo") && jf.contains("hi")) {
            FeatureBounds b{jf["lo"].get<double>(), jf["hi"].get<double>()};
            require_finite(b.lo, ctx + ".lo");
            require_finite(b.hi, ctx + ".hi");
            bounds.push_back(b);
        } else {
            bounds.push_back(FeatureBounds{});
            any_bounds_missing = true;
        }
    }

    for (size_t j = 0; j < doc["trees"].size(); ++j)
        m.trees.push_back(parse_native_tree(doc["trees"][j], j));

    for (const Tree& t : m.trees)
        for (const Node& n : t.nodes)
            if (!n.is_leaf() && (n.feature < 0 || n.feature >= static_cast<int>(names.size())))
                throw StructureError("native model: unknown feature index " +
                                     std::to_string(n.feature));

    if (any_bounds_missing) {
        auto defaults = default_bounds(m, static_cast<int>(names.size()), opts);
        for (size_t i = 0; i < doc["features"].size(); ++i)
            if (!(doc["features"][i].contains("lo") && doc["features"][i].contains("hi")))
                bounds[i] = defaults[i];
    }
    m.feature_space = FeatureSpace(std::move(names), std::move(bounds));

    if (doc.contains("metadata"))
        for (const auto& [k, v] : doc["metadata"].items())
            m.metadata[k] = v.get<std::string>();

    m.validate();
    return m;
}

namespace {

// Feature naming for xgboost dumps: "f<k>" splits map onto index k, anything
// else gets an index in first-encounter order.
class XgbFeatureTable {
public:
    int index_for(const std::string& split) {
        if (split.size() >= 2 && split[0] == 'f' &&
            split.find_first_not_of("0123456789", 1) == std::string::npos) {
            int idx = std::stoi(split.substr(1));
            max_findex_ = std::max(max_findex_, idx);
            return idx;
        }
        named_ = true;
        auto it = by_name_.find(split);
        if (it != by_name_.end()) return it->second;
        int idx = static_cast<int>(names_.size());
        names_.push_back(split);
        by_name_.emplace(split, idx);
        return idx;
    }

    std::vector<std::string> final_names() const {
        if (named_) {
            if (max_findex_ >= 0)
                throw ParseError("xgboost dump: mixes 'f<k>' and named splits");
            return names_;
        }
        std::vector<std::string> out;
        for (int i = 0; i <= max_findex_; ++i) out.push_back("f" + std::to_string(i));
        return out;
    }

private:
    std::unordered_map<std::string, int> by_name_;
    std::vector<std::string> names_;
    bool named_ = false;
    int max_findex_ = -1;
};

int parse_xgb_node(const json& jn, Tree& tree, XgbFeatureTable& features,
                   const std::string& ctx) {
    if (!jn.is_object() || !jn.contains("nodeid"))
        throw ParseError(ctx + ": expected node object with 'nodeid'");
    const std::string nctx = ctx + " node " + jn["nodeid"].dump();

    const int my_index = static_cast<int>(tree.nodes.size());
    tree.nodes.emplace_back();

    if (jn.contains("leaf")) {
        double v = jn["leaf"].get<double>();
        require_finite(v, nctx + ".leaf");
        tree.nodes[my_index] = Node::leaf(v);
        return my_index;
    }

    for (const char* field : {"split", "split_condition", "yes", "no", "children"})
        if (!jn.contains(field))
            throw ParseError(nctx + ": missing '" + std::string(field) + "'");

    const long long yes_id = jn["yes"].get<long long>();
    const long long no_id = jn["no"].get<long long>();
    if (jn.contains("missing") && jn["missing"].get<long long>() != yes_id)
        throw ParseError(nctx + ": missing-value branch diverges from the yes branch; "
                         "this model semantics has no missing values");

    const json& children = jn["children"];
    if (!children.is_array() || children.size() != 2)
        throw ParseError(nctx + ": expected exactly 2 children");

    int child_index[2];
    long long child_id[2];
    for (int k = 0; k < 2; ++k) {
        child_id[k] = children[k].contains("nodeid") ? children[k]["nodeid"].get<long long>() : -1;
        child_index[k] = parse_xgb_node(children[k], tree, features, ctx);
    }
    auto find_child = [&](long long id, const char* what) {
        for (int k = 0; k < 2; ++k)
            if (child_id[k] == id) return child_index[k];
        throw StructureError(nctx + ": '" + std::string(what) + "' id " + std::to_string(id) +
                             " is not a direct child");
    };

    double thr = jn["split_condition"].get<double>();
    require_finite(thr, nctx + ".split_condition");
    // xgboost routes `x < t` to yes; we keep t and treat yes as the <=-true
    // child, so only measure-zero boundary points route differently.
    tree.nodes[my_index] = Node::internal(features.index_for(jn["split"].get<std::string>()),
                                          thr, find_child(yes_id, "yes"), find_child(no_id, "no"));
    return my_index;
}

} // namespace

Ensemble parse_xgboost_dump(std::istream& in, const LoadOptions& opts) {
    json doc;
    try {
        doc = json::parse(in);
    } catch (const json::exception& e) {
        throw ParseError(std::string("xgboost dump: ") + e.what());
    }
    if (!doc.is_array())
        throw ParseError("xgboost dump: expected a JSON array of trees");

    Ensemble m;
    XgbFeatureTable features;
    for (size_t j = 0; j < doc.size(); ++j) {
        Tree tree;
        tree.root = parse_xgb_node(doc[j], tree, features, "tree " + std::to_string(j));
        m.trees.push_back(std::move(tree));
    }

    auto names = features.final_names();
    if (names.empty()) names.push_back("f0"); // stump-only dumps still need a space
    const int nf = static_cast<int>(names.size());
    m.feature_space = FeatureSpace(std::move(names), default_bounds(m, nf, opts));
    m.metadata["source_format"] = "xgboost-dump";
    m.metadata["split_convention"] = "yes-branch-mapped-to-le-true";
    m.validate();
    return m;
}

Ensemble load_ensemble(const std::string& path, ModelFormat format, const LoadOptions& opts) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open model file: " + path);
    try {
        switch (format) {
        case ModelFormat::native: return parse_native_model(in, opts);
        case ModelFormat::xgboost_dump: return parse_xgboost_dump(in, opts);
        }
    } catch (const ParseError& e) {
        throw ParseError(path + ": " + e.what());
    }
    throw ArgumentError("unknown model format");
}

std::string to_native_json(const Ensemble& m) {
    ordered_json doc;
    doc["features"] = ordered_json::array();
    for (int i = 0; i < m.num_features(); ++i) {
        doc["features"].push_back({{"name", m.feature_space.name(i)},
                                   {"lo", m.feature_space.bounds(i).lo},
                                   {"hi", m.feature_space.bounds(i).hi}});
    }
    doc["trees"] = ordered_json::array();
    for (const Tree& t : m.trees) {
        ordered_json jt;
        jt["root"] = t.root;
        jt["nodes"] = ordered_json::array();
        for (size_t k = 0; k < t.nodes.size(); ++k) {
            const Node& n = t.nodes[k];
            if (n.is_leaf())
                jt["nodes"].push_back({{"id", k}, {"leaf", n.value}});
            else
                jt["nodes"].push_back({{"id", k},
                                       {"feature", n.feature},
                                       {"threshold", n.threshold},
                                       {"true", n.true_child},
                                       {"false", n.false_child}});
        }
        doc["trees"].push_back(std::move(jt));
    }
    if (!m.metadata.empty()) {
        ordered_json meta;
        for (const auto& [k, v] : m.metadata) meta[k] = v;
        doc["metadata"] = std::move(meta);
    }
    return doc.dump(2) + "\n";
}

void save_ensemble(const Ensemble& m, const std::string& path) {
    std::ofstream out(path, std::ios::trunc);
    if (!out) throw IoError("cannot open for writing: " + path);
    out << to_native_json(m);
    if (!out) throw IoError("write failed: " + path);
}

ModelFormat parse_model_format(const std::string& name) {
    if (name == "native") return ModelFormat::native;
    if (name == "xgboost-dump" || name == "xgboost") return ModelFormat::xgboost_dump;
    throw ArgumentError("unknown model format '" + name + "' (native | xgboost-dump)");
}

} // namespace treeglitch
