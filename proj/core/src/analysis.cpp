/**
 * \file analysis.cpp
 *
 * Copyright 2026 the treeglitch authors.
 * License: Apache License 2.0
 */

#include "treeglitch/analysis.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <random>
#include <set>
#include <sstream>

#include <json.hpp>

#include "treeglitch/errors.hpp"
#include "treeglitch/milp.hpp" // format_double
#include "treeglitch/oracle.hpp"

namespace treeglitch {

const char* to_string(Verdict v) {
    switch (v) {
    case Verdict::anticipated: return "anticipated";
    case Verdict::unanticipated: return "unanticipated";
    case Verdict::inconclusive: return "inconclusive";
    }
    return "?";
}

void LabeledDataset::validate(int num_features) const {
    if (points.size() != labels.size())
        throw ArgumentError("dataset: points/labels size mismatch");
    for (size_t i = 0; i < points.size(); ++i) {
        if (static_cast<int>(points[i].size()) != num_features)
            throw ArgumentError("dataset: point " + std::to_string(i) + " has wrong arity");
        if (labels[i] != 0 && labels[i] != 1)
            throw ArgumentError("dataset: label " + std::to_string(i) + " not in {0,1}");
    }
}

namespace {

std::vector<std::string> split_csv_line(const std::string& line) {
    std::vector<std::string> out;
    std::string cur;
    bool quoted = false;
    for (char ch : line) {
        if (ch == '"') {
            quoted = !quoted;
        } else if (ch == ',' && !quoted) {
            out.push_back(cur);
            cur.clear();
        } else {
            cur += ch;
        }
    }
    out.push_back(cur);
    for (auto& s : out) {
        while (!s.empty() && (s.back() == '\r' || s.back() == ' ')) s.pop_back();
        while (!s.empty() && s.front() == ' ') s.erase(s.begin());
    }
    return out;
}

} // namespace

LabeledDataset LabeledDataset::load_csv(const std::string& path,
                                        const std::string& label_column) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open dataset: " + path);

    std::string line;
    if (!std::getline(in, line)) throw ParseError(path + ": empty file");
    auto header = split_csv_line(line);
    int label_idx = -1;
    for (size_t i = 0; i < header.size(); ++i)
        if (header[i] == label_column) label_idx = static_cast<int>(i);
    if (label_idx < 0)
        throw ParseError(path + ": no column named '" + label_column + "'");

    LabeledDataset ds;
    size_t lineno = 1;
    while (std::getline(in, line)) {
        ++lineno;
        if (line.empty()) continue;
        auto cells = split_csv_line(line);
        if (cells.size() != header.size())
            throw ParseError(path + ":" + std::to_string(lineno) + ": expected " +
                             std::to_string(header.size()) + " cells, got " +
                             std::to_string(cells.size()));
        std::vector<double> point;
        int label = -1;
        for (size_t i = 0; i < cells.size(); ++i) {
            double v;
            try {
                v = std::stod(cells[i]);
            } catch (...) {
                throw ParseError(path + ":" + std::to_string(lineno) + ": bad number '" +
                                 cells[i] + "'");
            }
            if (static_cast<int>(i) == label_idx) {
                label = static_cast<int>(v);
                if (v != 0.0 && v != 1.0)
                    throw ParseError(path + ":" + std::to_string(lineno) +
                                     ": label must be 0 or 1");
            } else {
                point.push_back(v);
            }
        }
        ds.points.push_back(std::move(point));
        ds.labels.push_back(label);
    }
    return ds;
}

std::string ViolationClassification::to_json() const {
    nlohmann::ordered_json j;
    j["verdict"] = to_string(verdict);
    j["points_in_ball"] = points_in_ball;
    j["evidence"] = evidence;
    if (single_point_ambiguity) j["single_point_ambiguity"] = true;
    return j.dump();
}

ViolationClassification classify_violation(const LabeledDataset& ds, std::span<const double> x,
                                           double epsilon, NeighborhoodNorm norm) {
    if (!(epsilon > 0.0)) throw ArgumentError("classify_violation: epsilon must be positive");

    ViolationClassification out;
    std::vector<int> inside;
    for (int i = 0; i < ds.size(); ++i) {
        const auto& p = ds.points[i];
        if (p.size() != x.size())
            throw ArgumentError("classify_violation: dataset arity differs from the point");
        double dist = 0.0;
        if (norm == NeighborhoodNorm::linf) {
            for (size_t k = 0; k < p.size(); ++k)
                dist = std::max(dist, std::abs(p[k] - x[k]));
        } else {
            for (size_t k = 0; k < p.size(); ++k)
                dist += (p[k] - x[k]) * (p[k] - x[k]);
            dist = std::sqrt(dist);
        }
        if (dist <= epsilon) inside.push_back(i);
    }
    out.points_in_ball = static_cast<int>(inside.size());

    if (inside.size() < 2) {
        out.verdict = Verdict::inconclusive;
        out.single_point_ambiguity = inside.size() == 1;
        out.evidence = inside;
        return out;
    }
    for (size_t a = 0; a < inside.size(); ++a)
        for (size_t b = a + 1; b < inside.size(); ++b)
            if (ds.labels[inside[a]] != ds.labels[inside[b]]) {
                out.verdict = Verdict::anticipated;
                out.evidence = {inside[a], inside[b]};
                return out;
            }
    out.verdict = Verdict::unanticipated;
    out.evidence = inside;
    return out;
}

std::string MonotonicityReport::to_json() const {
    nlohmann::ordered_json j;
    j["samples"] = samples;
    j["monotonic"] = monotonic;
    j["non_monotonic"] = non_monotonic;
    j["percent_non_monotonic"] = percent_non_monotonic;
    return j.dump();
}

bool point_non_monotonic(const Ensemble& m, std::span<const double> x, double step,
                         OutputSpace output_space) {
    EnsembleFunction f(m, output_space);
    std::vector<double> probe(x.begin(), x.end());
    for (int i = 0; i < m.num_features(); ++i) {
        const FeatureBounds& b = m.feature_space.bounds(i);
        const double xi = x[i];
        const double lo = std::max(b.lo, xi - step);
        const double hi = std::min(b.hi, xi + step);

        probe[i] = lo;
        const double f_lo = f(probe);
        probe[i] = xi;
        const double f_mid = f(probe);
        probe[i] = hi;
        const double f_hi = f(probe);
        probe[i] = xi;

        const bool rise_fall = f_lo < f_mid && f_mid > f_hi;
        const bool fall_rise = f_lo > f_mid && f_mid < f_hi;
        if (rise_fall || fall_rise) return true;
    }
    return false;
}

MonotonicityReport monotonicity_sample(const Ensemble& m, std::uint64_t samples,
                                       std::uint64_t seed, double step,
                                       OutputSpace output_space) {
    if (samples == 0) throw ArgumentError("monotonicity_sample: samples must be positive");
    if (!(step > 0.0)) throw ArgumentError("monotonicity_sample: step must be positive");
    for (int i = 0; i < m.num_features(); ++i)
        if (step > m.feature_space.bounds(i).range())
            throw ArgumentError("monotonicity_sample: step exceeds the range of feature '" +
                                m.feature_space.name(i) + "'");

    MonotonicityReport report;
    report.samples = samples;
    std::vector<double> x(m.num_features());
    for (std::uint64_t s = 0; s < samples; ++s) {
        // per-sample stream keyed by (seed, index): order- and thread-agnostic
        std::seed_seq seq{seed, s};
        std::mt19937_64 rng(seq);
        for (int i = 0; i < m.num_features(); ++i) {
            const FeatureBounds& b = m.feature_space.bounds(i);
            x[i] = b.lo + (b.hi - b.lo) * std::uniform_real_distribution<double>(0.0, 1.0)(rng);
        }
        if (point_non_monotonic(m, x, step, output_space))
            ++report.non_monotonic;
        else
            ++report.monotonic;
    }
    report.percent_non_monotonic =
        100.0 * static_cast<double>(report.non_monotonic) / static_cast<double>(samples);
    return report;
}

std::string export_slice_csv(const Ensemble& m, std::span<const double> base, int dim,
                             int resolution, OutputSpace output_space) {
    if (resolution < 2) throw ArgumentError("export_slice_csv: resolution must be >= 2");

    SliceProfile prof = slice(m, base, dim, nullptr, output_space);
    std::set<double> xs;
    for (int r = 0; r < resolution; ++r)
        xs.insert(prof.lo + (prof.hi - prof.lo) * r / (resolution - 1));
    for (int k = 0; k < prof.num_cells(); ++k) xs.insert(prof.representative(k));
    for (double t : prof.breakpoints) {
        xs.insert(t); // left side: t routes into the <=-cell
        xs.insert(std::nextafter(t, prof.hi)); // right side of the step
    }

    EnsembleFunction f(m, output_space);
    std::vector<double> x(base.begin(), base.end());
    std::string csv = "x,output\n";
    for (double v : xs) {
        x[dim] = v;
        csv += format_double(v);
        csv += ",";
        csv += format_double(f(x));
        csv += "\n";
    }
    return csv;
}

} // namespace treeglitch
