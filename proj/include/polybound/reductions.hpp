#pragma once

// Three bound-preserving instance transformations used to probe hardness
// boundaries: split into acyclic + two-variable FDs, shrink every constraint
// to |X| <= 2 / |Y| <= 3, and merge tails down to simple + FD form. Each
// records a trace relating old and new variables; bound preservation is
// checked empirically against the polymatroid oracle in the test suite.

#include "polybound/errors.hpp"
#include "polybound/instance.hpp"
#include "polybound/rational.hpp"
#include "polybound/varset.hpp"

#include <string>
#include <utility>
#include <vector>

namespace polybound {

struct ReductionTrace {
    Instance original;
    Instance reduced;
    // For every reduced variable: which original-or-earlier-merge variables
    // it stands for (singleton for copies and untouched variables).
    struct VarOrigin {
        int var = 0;                // reduced-universe index
        std::string role;           // "original", "x-copy", "y-copy", "merge"
        std::vector<int> sources;   // indices in the *reduced* universe numbering
    };
    std::vector<VarOrigin> variable_map;
    std::vector<int> added_consistency;  // 1-based constraint indices in `reduced`
    int iterations = 0;
};

// Split every variable i into a tail copy x_i and a head copy y_i, rewrite
// each constraint (A, B, c) as (x(A), x(A) + y(B), c), and bind the copies
// with the two-variable FDs ({x_i},{x_i,y_i},0) and ({y_i},{x_i,y_i},0).
// Rewritten constraints only point from x-copies to y-copies, so they form
// an acyclic family; the bound is unchanged.
inline ReductionTrace reduce_acyclic_plus_simple(const Instance& inst) {
    ReductionTrace trace;
    trace.original = inst;
    const int n = inst.n;
    if (2 * n > kMaxVariables)
        throw PreconditionError("reduce_acyclic_plus_simple: 2n exceeds the variable cap");
    auto x_of = [&](int v) { return v; };
    auto y_of = [&](int v) { return n + v; };

    Instance out;
    out.n = 2 * n;
    for (int v = 1; v <= n; ++v)
        out.names.push_back("x_" + inst.var_name(v));
    for (int v = 1; v <= n; ++v)
        out.names.push_back("y_" + inst.var_name(v));

    for (int v = 1; v <= n; ++v) {
        VarSet pair = VarSet::of({x_of(v), y_of(v)});
        out.constraints.push_back({VarSet::singleton(x_of(v)), pair, Rational(0)});
        trace.added_consistency.push_back(out.k());
        out.constraints.push_back({VarSet::singleton(y_of(v)), pair, Rational(0)});
        trace.added_consistency.push_back(out.k());
    }
    for (const auto& dc : inst.constraints) {
        VarSet tail, head;
        for (int v : dc.X.members())
            tail = tail.with(x_of(v));
        head = tail;
        for (int v : dc.Y.members())
            head = head.with(y_of(v));
        out.constraints.push_back({tail, head, dc.c});
    }
    for (int v = 1; v <= n; ++v)
        trace.variable_map.push_back({x_of(v), "x-copy", {v}});
    for (int v = 1; v <= n; ++v)
        trace.variable_map.push_back({y_of(v), "y-copy", {v}});
    trace.reduced = std::move(out);
    return trace;
}

namespace detail {

// Lowest-numbered pair of a set with at least two members.
inline std::pair<int, int> lowest_pair(VarSet s) {
    auto members = s.members();
    return {members[0], members[1]};
}

inline int add_merge_variable(Instance& inst, ReductionTrace& trace, int x, int y,
                              int& merge_counter) {
    if (inst.n + 1 > kMaxVariables)
        throw PreconditionError("reduction: merge exceeds the variable cap");
    ++inst.n;
    int z = inst.n;
    if (!inst.names.empty())
        inst.names.push_back("m" + std::to_string(++merge_counter));
    trace.variable_map.push_back({z, "merge", {x, y}});
    return z;
}

}  // namespace detail

// Shrink constraints until every one has |X| <= 2 and |Y| <= 3, with
// |Y| = 3 forcing |X| = 2 and c = 0, and |Y| = 2 forcing |X| = 1. One merge
// per iteration, in a single constraint: oversized tails first, then heads
// with two or more free variables, then the tails of (2,3)-shaped
// constraints with positive c. Each merge introduces a fresh variable z and
// the consistency FDs ({x,y},{z,x,y},0), ({z},{z,x},0), ({z},{z,y},0).
inline ReductionTrace reduce_two_three(const Instance& inst) {
    ReductionTrace trace;
    trace.original = inst;
    Instance cur = inst;
    if (cur.names.empty())
        for (int v = 1; v <= cur.n; ++v)
            cur.names.push_back(std::to_string(v));
    for (int v = 1; v <= cur.n; ++v)
        trace.variable_map.push_back({v, "original", {v}});
    int merge_counter = 0;

    auto merge_in_constraint = [&](int index, int x, int y, bool in_tail) {
        int z = detail::add_merge_variable(cur, trace, x, y, merge_counter);
        DegreeConstraint& dc = cur.constraints[index];
        if (in_tail)
            dc.X = dc.X.without(x).without(y).with(z);
        dc.Y = dc.Y.without(x).without(y).with(z);
        VarSet xy = VarSet::of({x, y});
        cur.constraints.push_back({xy, xy.with(z), Rational(0)});
        trace.added_consistency.push_back(cur.k());
        cur.constraints.push_back({VarSet::singleton(z), VarSet::of({z, x}), Rational(0)});
        trace.added_consistency.push_back(cur.k());
        cur.constraints.push_back({VarSet::singleton(z), VarSet::of({z, y}), Rational(0)});
        trace.added_consistency.push_back(cur.k());
        ++trace.iterations;
    };

    for (;;) {
        // consistency constraints introduced by merges are already in target
        // form, so scanning everything terminates
        int oversized_tail = -1, oversized_head = -1, tight_23 = -1;
        for (int idx = 0; idx < cur.k(); ++idx) {
            const auto& dc = cur.constraints[idx];
            if (dc.X.size() > 2 && oversized_tail < 0)
                oversized_tail = idx;
            if (dc.Y.minus(dc.X).size() >= 2 && dc.X.size() <= 2 && oversized_head < 0)
                oversized_head = idx;
            if (dc.X.size() == 2 && dc.Y.size() == 3 && sign(dc.c) > 0 && tight_23 < 0)
                tight_23 = idx;
        }
        if (oversized_tail >= 0) {
            auto [x, y] = detail::lowest_pair(cur.constraints[oversized_tail].X);
            merge_in_constraint(oversized_tail, x, y, true);
        } else if (oversized_head >= 0) {
            auto [x, y] = detail::lowest_pair(
                cur.constraints[oversized_head].Y.minus(cur.constraints[oversized_head].X));
            merge_in_constraint(oversized_head, x, y, false);
        } else if (tight_23 >= 0) {
            auto [x, y] = detail::lowest_pair(cur.constraints[tight_23].X);
            merge_in_constraint(tight_23, x, y, true);
        } else {
            break;
        }
    }
    trace.reduced = std::move(cur);
    return trace;
}

// Merge tail pairs (one shared fresh variable per merge, substituted in
// every constraint whose tail contains the pair) until every constraint is
// simple or a functional dependency. Consistency FDs
// ({x1,x2},{x1,x2,z},0) and ({z},{x1,x2,z},0) accompany each merge.
inline ReductionTrace reduce_simple_plus_fd(const Instance& inst) {
    ReductionTrace trace;
    trace.original = inst;
    Instance cur = inst;
    if (cur.names.empty())
        for (int v = 1; v <= cur.n; ++v)
            cur.names.push_back(std::to_string(v));
    for (int v = 1; v <= cur.n; ++v)
        trace.variable_map.push_back({v, "original", {v}});
    int merge_counter = 0;

    for (;;) {
        int pick = -1;
        for (int idx = 0; idx < cur.k(); ++idx) {
            const auto& dc = cur.constraints[idx];
            if (dc.X.size() >= 2 && !dc.is_fd()) {
                pick = idx;
                break;
            }
        }
        if (pick < 0)
            break;
        auto [x1, x2] = detail::lowest_pair(cur.constraints[pick].X);
        int z = detail::add_merge_variable(cur, trace, x1, x2, merge_counter);
        VarSet pair = VarSet::of({x1, x2});
        for (auto& dc : cur.constraints) {
            if (!pair.subset_of(dc.X))
                continue;
            dc.X = dc.X.minus(pair).with(z);
            dc.Y = dc.Y.minus(pair).with(z);
        }
        VarSet triple = pair.with(z);
        cur.constraints.push_back({pair, triple, Rational(0)});
        trace.added_consistency.push_back(cur.k());
        cur.constraints.push_back({VarSet::singleton(z), triple, Rational(0)});
        trace.added_consistency.push_back(cur.k());
        ++trace.iterations;
    }
    trace.reduced = std::move(cur);
    return trace;
}

}  // namespace polybound
