#pragma once

// Core domain types: degree constraints, instances, classification, and the
// constraint dependency graph.

#include "polybound/errors.hpp"
#include "polybound/rational.hpp"
#include "polybound/varset.hpp"

#include <algorithm>
#include <optional>
#include <string>
#include <vector>

namespace polybound {

// Exponential-size oracles refuse instances above this variable count unless
// the caller overrides (the CLI exposes POLYBOUND_ORACLE_CAP).
inline constexpr int kDefaultOracleCap = 14;

// A degree constraint (X, Y, c): any binding of the variables in X extends to
// at most 2^c bindings of Y. On set functions it reads h(Y) - h(X) <= c.
struct DegreeConstraint {
    VarSet X;
    VarSet Y;  // X is a proper subset of Y
    Rational c;

    bool is_simple() const { return X.size() <= 1; }
    bool is_cardinality() const { return X.empty_set(); }
    bool is_fd() const { return sign(c) == 0; }
};

// A collection of degree constraints over the universe [n]. Constraint
// indices are 1-based and stable: delta_i / f_{i,t} in every engine refer to
// positions in `constraints`. Duplicate (X, Y) pairs are kept verbatim.
struct Instance {
    int n = 0;
    std::vector<std::string> names;  // optional display names, size n when present
    std::vector<DegreeConstraint> constraints;

    int k() const { return int(constraints.size()); }

    const DegreeConstraint& constraint(int i) const { return constraints[i - 1]; }

    std::string var_name(int v) const {
        if (!names.empty())
            return names[v - 1];
        return std::to_string(v);
    }

    std::string set_name(VarSet s) const {
        std::string out = "{";
        bool first = true;
        for (int v : s.members()) {
            if (!first)
                out += ",";
            first = false;
            out += var_name(v);
        }
        return out + "}";
    }
};

// Validate and build an instance. Constraints with X = Y are vacuous
// (h(Y) - h(X) = 0) and rejected; X must be a proper subset of Y.
inline Instance make_instance(int n, std::vector<DegreeConstraint> constraints,
                              std::vector<std::string> names = {}) {
    if (n < 1 || n > kMaxVariables)
        throw ParseError("instance: n must be between 1 and " + std::to_string(kMaxVariables));
    if (constraints.empty())
        throw ParseError("instance: at least one degree constraint is required");
    if (!names.empty() && int(names.size()) != n)
        throw ParseError("instance: vars list must have exactly n entries");
    VarSet universe = VarSet::full(n);
    for (size_t i = 0; i < constraints.size(); ++i) {
        const auto& dc = constraints[i];
        std::string where = "constraint " + std::to_string(i + 1);
        if (!dc.Y.subset_of(universe) || !dc.X.subset_of(universe))
            throw ParseError(where + ": variable outside universe [" + std::to_string(n) + "]");
        if (dc.X == dc.Y)
            throw ParseError(where + ": X = Y is vacuous");
        if (!dc.X.subset_of(dc.Y))
            throw ParseError(where + ": X must be a subset of Y");
        if (sign(dc.c) < 0)
            throw ParseError(where + ": c must be nonnegative");
    }
    return Instance{n, std::move(names), std::move(constraints)};
}

struct ClassificationReport {
    bool is_simple = true;
    bool is_cardinality_only = true;
    bool is_acyclic = true;
    struct Tag {
        bool simple = false;
        bool cardinality = false;
        bool fd = false;
    };
    std::vector<Tag> per_constraint;
};

// Directed graph on the variables with an edge (u, v) whenever some
// constraint has u in X and v in Y - X.
struct DependencyGraph {
    int n = 0;
    std::vector<std::pair<int, int>> edges;  // deduplicated, ascending
};

inline DependencyGraph dependency_graph(const Instance& inst) {
    DependencyGraph g;
    g.n = inst.n;
    for (const auto& dc : inst.constraints)
        for (int u : dc.X.members())
            for (int v : dc.Y.minus(dc.X).members())
                g.edges.emplace_back(u, v);
    std::sort(g.edges.begin(), g.edges.end());
    g.edges.erase(std::unique(g.edges.begin(), g.edges.end()), g.edges.end());
    return g;
}

// Topological order of the dependency graph with lowest-index preference, or
// nullopt when the graph has a directed cycle. Edgeless graphs (for example
// cardinality-only instances) yield the identity permutation.
inline std::optional<std::vector<int>> topological_permutation(const Instance& inst) {
    DependencyGraph g = dependency_graph(inst);
    std::vector<int> indegree(inst.n + 1, 0);
    for (auto [u, v] : g.edges)
        ++indegree[v];
    std::vector<int> order;
    std::vector<bool> placed(inst.n + 1, false);
    for (int step = 0; step < inst.n; ++step) {
        int pick = -1;
        for (int v = 1; v <= inst.n; ++v)
            if (!placed[v] && indegree[v] == 0) {
                pick = v;
                break;
            }
        if (pick < 0)
            return std::nullopt;
        placed[pick] = true;
        order.push_back(pick);
        for (auto [u, v] : g.edges)
            if (u == pick && !placed[v])
                --indegree[v];
    }
    return order;
}

inline ClassificationReport classify(const Instance& inst) {
    ClassificationReport report;
    for (const auto& dc : inst.constraints) {
        ClassificationReport::Tag tag;
        tag.simple = dc.is_simple();
        tag.cardinality = dc.is_cardinality();
        tag.fd = dc.is_fd();
        report.is_simple = report.is_simple && tag.simple;
        report.is_cardinality_only = report.is_cardinality_only && tag.cardinality;
        report.per_constraint.push_back(tag);
    }
    report.is_acyclic = topological_permutation(inst).has_value();
    return report;
}

// A permutation of [n] as a 1-based variable sequence.
inline void validate_permutation(const Instance& inst, const std::vector<int>& pi) {
    if (int(pi.size()) != inst.n)
        throw PreconditionError("permutation: expected " + std::to_string(inst.n) + " entries");
    std::vector<bool> seen(inst.n + 1, false);
    for (int v : pi) {
        if (v < 1 || v > inst.n || seen[v])
            throw PreconditionError("permutation: not a permutation of 1.." +
                                    std::to_string(inst.n));
        seen[v] = true;
    }
}

inline std::vector<int> identity_permutation(int n) {
    std::vector<int> pi(n);
    for (int i = 0; i < n; ++i)
        pi[i] = i + 1;
    return pi;
}

// Position of each variable in pi: rank[v] = 0-based index of v.
inline std::vector<int> permutation_ranks(const std::vector<int>& pi) {
    std::vector<int> rank(pi.size() + 1, 0);
    for (size_t i = 0; i < pi.size(); ++i)
        rank[pi[i]] = int(i);
    return rank;
}

}  // namespace polybound
