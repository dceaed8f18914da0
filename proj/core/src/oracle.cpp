/**
 * \file oracle.cpp
 *
 * Copyright 2026 the treeglitch authors.
 * License: Apache License 2.0
 */

#include "treeglitch/oracle.hpp"

#include <algorithm>
#include <cmath>
#include <future>
#include <limits>
#include <set>

#include "treeglitch/errors.hpp"

namespace treeglitch {

SearchProblem SearchProblem::fixed(int dim, double alpha) {
    SearchProblem p;
    p.kind = ProblemKind::fixed_dim;
    p.dim = dim;
    p.alpha = alpha;
    return p;
}

SearchProblem SearchProblem::any(double alpha) {
    SearchProblem p;
    p.kind = ProblemKind::any_dim;
    p.alpha = alpha;
    return p;
}

SearchProblem SearchProblem::max() { return SearchProblem{}; }

namespace {

// Midpoint of (left, right], nudged right if rounding lands on the open
// endpoint; degenerate [lo, lo] first cells collapse to the point itself.
double interior_point(double left, double right, bool closed_left) {
    if (left == right) return left;
    double mid = left + 0.5 * (right - left);
    if (mid <= left && !closed_left) mid = std::nextafter(left, right);
    if (mid > right) mid = right;
    return mid;
}

FeatureBounds effective_bounds(const Ensemble& m, const SearchProblem& p, int dim) {
    FeatureBounds b = m.feature_space.bounds(dim);
    if (p.region) {
        const FeatureBounds& r = p.region->at(dim);
        if (r.lo < b.lo || r.hi > b.hi)
            throw ArgumentError("search region exceeds feature bounds on dimension " +
                                std::to_string(dim));
        b = r;
    }
    return b;
}

} // namespace

double CellDecomposition::representative(int k) const {
    return interior_point(left(k), right(k), k == 0);
}

CellDecomposition cell_decomposition(const Ensemble& m, int dim, const FeatureBounds& b) {
    CellDecomposition cs;
    cs.lo = b.lo;
    cs.hi = b.hi;
    // Thresholds at or above hi (or below lo) cannot separate in-bounds points.
    for (double t : distinct_thresholds_on_dimension(m, dim))
        if (t >= b.lo && t < b.hi) cs.breakpoints.push_back(t);
    return cs;
}

double SliceProfile::representative(int k) const {
    return interior_point(cell_left(k), cell_right(k), k == 0);
}

SliceProfile slice(const Ensemble& m, std::span<const double> base, int dim,
                   const FeatureBounds* bounds_override, OutputSpace output_space) {
    if (dim < 0 || dim >= m.num_features())
        throw ArgumentError("slice: invalid dimension " + std::to_string(dim));
    if (static_cast<int>(base.size()) != m.num_features())
        throw ArgumentError("slice: base point has wrong arity");

    const FeatureBounds b = bounds_override ? *bounds_override : m.feature_space.bounds(dim);
    CellDecomposition cs = cell_decomposition(m, dim, b);

    SliceProfile profile;
    profile.dim = dim;
    profile.base.assign(base.begin(), base.end());
    profile.breakpoints = cs.breakpoints;
    profile.lo = cs.lo;
    profile.hi = cs.hi;

    std::vector<double> x(base.begin(), base.end());
    profile.cell_values.reserve(cs.num_cells());
    for (int k = 0; k < cs.num_cells(); ++k) {
        x[dim] = cs.representative(k);
        double v = m.eval(x);
        profile.cell_values.push_back(output_space == OutputSpace::probability ? logistic(v)
                                                                               : v);
    }
    return profile;
}

OracleResult best_glitch_on_slice(const SliceProfile& profile, double witness_delta_rel,
                                  OutputSpace output_space) {
    const auto& v = profile.cell_values;
    const int n = profile.num_cells();

    OracleResult result;
    if (n < 3) return result;

    // Best oscillation for outer cells (a, c): the deepest (canyon) or highest
    // (hill) interior cell between them. One running extremum per a gives an
    // O(n^2) scan over all triples.
    struct Best {
        double sup = 0.0;
        int a = -1, b = -1, c = -1;
        GlitchShape shape = GlitchShape::canyon;
    } best;

    for (int a = 0; a + 2 < n; ++a) {
        int min_b = a + 1, max_b = a + 1;
        for (int c = a + 2; c < n; ++c) {
            // interior cells are a+1 .. c-1; extend extrema with cell c-1
            if (v[c - 1] < v[min_b]) min_b = c - 1;
            if (v[c - 1] > v[max_b]) max_b = c - 1;
            const double gap = profile.cell_left(c) - profile.cell_right(a);
            if (!(gap > 0.0)) continue;

            const double canyon_jump = std::min(v[a], v[c]) - v[min_b];
            if (canyon_jump > 0.0) {
                double sup = canyon_jump / gap;
                if (sup > best.sup)
                    best = {sup, a, min_b, c, GlitchShape::canyon};
            }
            const double hill_jump = v[max_b] - std::max(v[a], v[c]);
            if (hill_jump > 0.0) {
                double sup = hill_jump / gap;
                if (sup > best.sup)
                    best = {sup, a, max_b, c, GlitchShape::hill};
            }
        }
    }

    if (best.a < 0) return result;

    result.sup_magnitude = best.sup;
    result.attained = false;

    // Materialize a witness: x- sits on the closed right endpoint of cell a,
    // x+ delta past the open left endpoint of cell c.
    const double x_minus = profile.cell_right(best.a);
    const double open_left = profile.cell_left(best.c);
    double delta = witness_delta_rel * (profile.hi - profile.lo);
    const double c_width = profile.cell_right(best.c) - open_left;
    delta = std::min(delta, c_width);
    if (delta <= 0.0) delta = c_width > 0.0 ? c_width : 0.0;
    double x_plus = open_left + delta;
    if (x_plus <= open_left) x_plus = std::nextafter(open_left, profile.hi);
    result.witness_delta = x_plus - open_left;

    double x_mid = profile.representative(best.b);

    GlitchTriple t;
    t.dim = profile.dim;
    t.x_minus = profile.base;
    t.x = profile.base;
    t.x_plus = profile.base;
    t.x_minus[profile.dim] = x_minus;
    t.x[profile.dim] = x_mid;
    t.x_plus[profile.dim] = x_plus;
    t.f_minus = profile.cell_values[best.a];
    t.f = profile.cell_values[best.b];
    t.f_plus = profile.cell_values[best.c];
    t.magnitude = std::min(std::abs(t.f - t.f_minus), std::abs(t.f - t.f_plus)) /
                  (x_plus - x_minus);
    t.shape = best.shape;
    t.output_space = output_space;
    result.best = std::move(t);
    return result;
}

std::uint64_t required_cells(const Ensemble& m, const SearchProblem& problem) {
    std::vector<int> dims;
    if (problem.kind == ProblemKind::fixed_dim) {
        if (problem.dim < 0 || problem.dim >= m.num_features())
            throw ArgumentError("exhaustive_search: invalid dimension " +
                                std::to_string(problem.dim));
        dims.push_back(problem.dim);
    } else {
        for (int i = 0; i < m.num_features(); ++i) dims.push_back(i);
    }

    std::vector<std::uint64_t> cells_per_dim(m.num_features());
    for (int j = 0; j < m.num_features(); ++j)
        cells_per_dim[j] =
            cell_decomposition(m, j, effective_bounds(m, problem, j)).num_cells();

    std::uint64_t worst = 0;
    const std::uint64_t cap = std::numeric_limits<std::uint64_t>::max();
    for (int i : dims) {
        std::uint64_t prod = 1;
        for (int j = 0; j < m.num_features(); ++j) {
            if (j == i) continue;
            if (prod > cap / cells_per_dim[j]) { prod = cap; break; }
            prod *= cells_per_dim[j];
        }
        worst = std::max(worst, prod);
    }
    return worst;
}

namespace {

// Lexicographic preference for equal suprema: smaller dim, smaller left
// breakpoint, then smaller remaining coordinates. Keeps reductions
// deterministic regardless of enumeration or worker order.
bool better_than(const OracleResult& a, const OracleResult& b) {
    if (!a.found()) return false;
    if (!b.found()) return true;
    if (a.sup_magnitude != b.sup_magnitude) return a.sup_magnitude > b.sup_magnitude;
    const GlitchTriple& ta = *a.best;
    const GlitchTriple& tb = *b.best;
    if (ta.dim != tb.dim) return ta.dim < tb.dim;
    if (ta.x_minus[ta.dim] != tb.x_minus[tb.dim])
        return ta.x_minus[ta.dim] < tb.x_minus[tb.dim];
    if (ta.x[ta.dim] != tb.x[tb.dim]) return ta.x[ta.dim] < tb.x[tb.dim];
    return std::lexicographical_compare(ta.x.begin(), ta.x.end(), tb.x.begin(), tb.x.end());
}

OracleResult search_one_dim(const Ensemble& m, const SearchProblem& problem, int target,
                            OutputSpace output_space) {
    const int nf = m.num_features();
    std::vector<CellDecomposition> grid;
    std::vector<int> grid_dims;
    for (int j = 0; j < nf; ++j) {
        if (j == target) continue;
        grid_dims.push_back(j);
        grid.push_back(cell_decomposition(m, j, effective_bounds(m, problem, j)));
    }

    const FeatureBounds target_bounds = effective_bounds(m, problem, target);

    OracleResult best;
    std::vector<int> counter(grid.size(), 0);
    std::vector<double> base(nf, 0.0);
    for (int j = 0; j < nf; ++j) base[j] = m.feature_space.bounds(j).lo;

    bool done = false;
    while (!done) {
        for (size_t g = 0; g < grid.size(); ++g)
            base[grid_dims[g]] = grid[g].representative(counter[g]);

        SliceProfile prof = slice(m, base, target, &target_bounds, output_space);
        OracleResult r = best_glitch_on_slice(prof, problem.witness_delta_rel, output_space);
        if (better_than(r, best)) best = std::move(r);

        done = true;
        for (size_t g = 0; g < grid.size(); ++g) {
            if (++counter[g] < grid[g].num_cells()) { done = false; break; }
            counter[g] = 0;
        }
        if (grid.empty()) break;
    }
    return best;
}

} // namespace

OracleResult exhaustive_search(const Ensemble& m, const SearchProblem& problem,
                               std::uint64_t cell_budget, OutputSpace output_space, int jobs) {
    m.validate();
    const std::uint64_t need = required_cells(m, problem);
    if (need > cell_budget)
        throw ArgumentError("exhaustive_search: base grid needs " + std::to_string(need) +
                            " cells, budget is " + std::to_string(cell_budget) +
                            "; use the MILP path or raise --cell-budget");

    std::vector<int> dims;
    if (problem.kind == ProblemKind::fixed_dim) {
        dims.push_back(problem.dim);
    } else {
        for (int i = 0; i < m.num_features(); ++i) dims.push_back(i);
    }

    std::vector<OracleResult> per_dim(dims.size());
    if (jobs > 1 && dims.size() > 1) {
        std::vector<std::future<OracleResult>> futs;
        for (int i : dims)
            futs.push_back(std::async(std::launch::async, search_one_dim, std::cref(m),
                                      std::cref(problem), i, output_space));
        for (size_t k = 0; k < futs.size(); ++k) per_dim[k] = futs[k].get();
    } else {
        for (size_t k = 0; k < dims.size(); ++k)
            per_dim[k] = search_one_dim(m, problem, dims[k], output_space);
    }

    OracleResult best;
    for (auto& r : per_dim)
        if (better_than(r, best)) best = std::move(r);
    return best;
}

bool straddles_distinct_trees(const Ensemble& m, const GlitchTriple& t) {
    if (t.dim < 0 || t.dim >= m.num_features()) return false;
    const double xm = t.x_minus[t.dim], xc = t.x[t.dim], xp = t.x_plus[t.dim];
    std::set<int> left_trees, right_trees;
    for (const auto& [eta, tree] : thresholds_on_dimension(m, t.dim)) {
        if (xm <= eta && eta < xc) left_trees.insert(tree);
        if (xc <= eta && eta < xp) right_trees.insert(tree);
    }
    if (left_trees.empty() || right_trees.empty()) return false;
    if (left_trees.size() > 1 || right_trees.size() > 1) return true;
    return *left_trees.begin() != *right_trees.begin();
}

} // namespace treeglitch
