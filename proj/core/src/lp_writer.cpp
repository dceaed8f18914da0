/**
 * \file lp_writer.cpp
 *
 * Copyright 2026 the treeglitch authors.
 * License: Apache License 2.0
 */

#include <charconv>
#include <cmath>
#include <fstream>
#include <limits>

#include "treeglitch/errors.hpp"
#include "treeglitch/milp.hpp"

namespace treeglitch {

std::string format_double(double v) {
    if (std::isnan(v)) throw ArgumentError("format_double: NaN");
    char buf[64];
    auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), v);
    if (ec != std::errc()) throw ArgumentError("format_double: conversion failed");
    return std::string(buf, ptr);
}

namespace {

void write_linear(std::string& out, const MilpInstance& inst,
                  const std::vector<MilpTerm>& terms) {
    bool first = true;
    for (const MilpTerm& t : terms) {
        const double c = t.coef;
        if (first) {
            out += format_double(c);
            first = false;
        } else if (c < 0.0 || std::signbit(c)) {
            out += " - " + format_double(-c);
        } else {
            out += " + " + format_double(c);
        }
        out += " ";
        out += inst.variables()[t.var].name;
    }
}

} // namespace

std::string to_lp_string(const MilpInstance& inst) {
    if (inst.variables().empty()) throw ArgumentError("emit_lp: instance has no variables");
    std::string out;
    out.reserve(4096);
    out += "\\ treeglitch MILP instance\n";
    out += "Maximize\n obj: ";
    if (inst.objective_terms().empty()) {
        out += "0 " + inst.variables()[0].name; // feasibility problem
    } else {
        write_linear(out, inst, inst.objective_terms());
    }
    out += "\nSubject To\n";
    for (const MilpConstraint& c : inst.constraints()) {
        out += " " + c.name + ": ";
        write_linear(out, inst, c.terms);
        switch (c.sense) {
        case Sense::le: out += " <= "; break;
        case Sense::ge: out += " >= "; break;
        case Sense::eq: out += " = "; break;
        }
        out += format_double(c.rhs);
        out += "\n";
    }
    out += "Bounds\n";
    const double inf = std::numeric_limits<double>::infinity();
    for (const MilpVar& v : inst.variables()) {
        if (v.kind == VarKind::binary) continue;
        if (v.lower == -inf && v.upper == inf) {
            out += " " + v.name + " free\n";
        } else if (v.upper == inf) {
            out += " " + v.name + " >= " + format_double(v.lower) + "\n";
        } else if (v.lower == -inf) {
            out += " -inf <= " + v.name + " <= " + format_double(v.upper) + "\n";
        } else {
            out += " " + format_double(v.lower) + " <= " + v.name +
                   " <= " + format_double(v.upper) + "\n";
        }
    }
    if (inst.num_binaries() > 0) {
        out += "Binary\n";
        for (const MilpVar& v : inst.variables())
            if (v.kind == VarKind::binary) out += " " + v.name + "\n";
    }
    out += "End\n";
    return out;
}

void emit_lp(const MilpInstance& inst, const std::string& path) {
    std::ofstream f(path, std::ios::trunc);
    if (!f) throw IoError("emit_lp: cannot open " + path);
    f << to_lp_string(inst);
    if (!f) throw IoError("emit_lp: write failed: " + path);
}

} // namespace treeglitch
