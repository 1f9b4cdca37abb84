#pragma once

// The flow bound for general instances: relax the constraints against a
// permutation (simple constraints survive untouched, non-simple heads are
// trimmed to the variables after their tail), then solve a coupled per-sink
// flow LP in which trimmed non-simple constraints reduce sink demands
// instead of carrying flow. Sandwiched between the polymatroid bound and the
// chain bound for every permutation.

#include "polybound/errors.hpp"
#include "polybound/flow.hpp"
#include "polybound/instance.hpp"
#include "polybound/oracle.hpp"
#include "polybound/rational.hpp"
#include "polybound/simplex.hpp"
#include "polybound/varset.hpp"

#include <algorithm>
#include <string>
#include <vector>

namespace polybound {

// The permutation relaxation used by the flow bound. Simple constraints are
// retained verbatim and reindexed first (1..k_s); non-simple constraints
// follow with their heads trimmed by the chain rule (possibly down to X,
// leaving the constraint vacuous but indexed).
struct RelaxedInstance {
    const Instance* base = nullptr;
    std::vector<int> pi;
    int k_s = 0;
    std::vector<DegreeConstraint> constraints;  // simple first, then relaxed non-simple
    std::vector<int> original_index;            // position in the base instance
};

inline RelaxedInstance relax_for_flow_bound(const Instance& inst, const std::vector<int>& pi) {
    validate_permutation(inst, pi);
    RelaxedInstance rel;
    rel.base = &inst;
    rel.pi = pi;
    std::vector<int> rank = permutation_ranks(pi);
    for (int j = 1; j <= inst.k(); ++j) {
        const auto& dc = inst.constraint(j);
        if (dc.is_simple()) {
            rel.constraints.push_back(dc);
            rel.original_index.push_back(j);
        }
    }
    rel.k_s = int(rel.constraints.size());
    for (int j = 1; j <= inst.k(); ++j) {
        const auto& dc = inst.constraint(j);
        if (dc.is_simple())
            continue;
        int last_x = -1;
        for (int v : dc.X.members())
            last_x = std::max(last_x, rank[v]);
        VarSet head = dc.X;
        for (int v : dc.Y.minus(dc.X).members())
            if (rank[v] > last_x)
                head = head.with(v);
        rel.constraints.push_back({dc.X, head, dc.c});
        rel.original_index.push_back(j);
    }
    return rel;
}

struct FlowBoundOptions {
    // Let the per-sink unit of flow originate from any singleton preceding
    // the sink in pi, not just the empty set. Never worse, sometimes better.
    bool multi_source = false;
    // Forbid a simple constraint from carrying flow to sinks inside its own
    // head (a stricter published variant; off by default because it breaks
    // the identity with the simple-instance flow LP).
    bool restrict_head_flow = false;
};

// Optimum of the flow-bound LP for the given permutation; +inf when some
// sink can neither be reached by simple-constraint flow nor have its demand
// cancelled by non-simple capacity.
inline ExtRational flow_bound(const Instance& inst, const std::vector<int>& pi,
                              const FlowBoundOptions& opts = {}) {
    RelaxedInstance rel = relax_for_flow_bound(inst, pi);
    const int k = int(rel.constraints.size());
    const int k_s = rel.k_s;
    const int n = inst.n;
    std::vector<int> rank = permutation_ranks(pi);

    // Auxiliary graph over the simple constraints only.
    std::vector<VarSet> verts;
    verts.push_back(VarSet::empty());
    for (int v = 1; v <= n; ++v)
        verts.push_back(VarSet::singleton(v));
    for (int j = 0; j < k_s; ++j)
        verts.push_back(rel.constraints[j].Y);
    std::sort(verts.begin(), verts.end());
    verts.erase(std::unique(verts.begin(), verts.end()), verts.end());
    auto vertex_id = [&](VarSet s) {
        auto it = std::lower_bound(verts.begin(), verts.end(), s);
        if (it == verts.end() || *it != s)
            throw InternalError("flow_bound: unknown vertex " + s.to_string());
        return int(it - verts.begin());
    };
    const int V = int(verts.size());
    struct MuEdge {
        int from, to;
    };
    std::vector<MuEdge> mu_edges;
    for (int a = 0; a < V; ++a)
        for (int b = 0; b < V; ++b)
            if (verts[b].proper_subset_of(verts[a]))
                mu_edges.push_back({a, b});
    const int E = int(mu_edges.size());

    // Demand reduction at sink t: capacities of non-simple constraints whose
    // trimmed head still covers t.
    std::vector<std::vector<int>> reducers(n + 1);  // sink -> relaxed indices (0-based)
    for (int j = k_s; j < k; ++j) {
        const auto& dc = rel.constraints[j];
        for (int v : dc.Y.minus(dc.X).members())
            reducers[v].push_back(j);
    }

    // Infinite-bound pre-check: sink t is serviceable if reachable from an
    // admissible source in the simple-constraint graph (the empty set, plus
    // earlier singletons under multi-source) or if any non-simple capacity
    // reduces its demand (capacity is unbounded, so any reducer suffices).
    {
        std::vector<std::vector<int>> adj(V);
        for (int j = 0; j < k_s; ++j)
            adj[vertex_id(rel.constraints[j].X)].push_back(vertex_id(rel.constraints[j].Y));
        for (const auto& e : mu_edges)
            adj[e.from].push_back(e.to);
        auto reach_from = [&](int start) {
            std::vector<bool> seen(V, false);
            std::vector<int> queue{start};
            seen[start] = true;
            while (!queue.empty()) {
                int u = queue.back();
                queue.pop_back();
                for (int w : adj[u])
                    if (!seen[w]) {
                        seen[w] = true;
                        queue.push_back(w);
                    }
            }
            return seen;
        };
        std::vector<std::vector<bool>> reach;
        reach.push_back(reach_from(0));
        if (opts.multi_source)
            for (int v = 1; v <= n; ++v)
                reach.push_back(reach_from(vertex_id(VarSet::singleton(v))));
        for (int t = 1; t <= n; ++t) {
            if (!reducers[t].empty())
                continue;
            int sink_vertex = vertex_id(VarSet::singleton(t));
            bool ok = reach[0][sink_vertex];
            if (opts.multi_source)
                for (int v = 1; v <= n && !ok; ++v)
                    if (rank[v] < rank[t] && reach[v][sink_vertex])
                        ok = true;
            if (!ok)
                return ExtRational::infinity();
        }
    }

    LinearProgram lp;
    lp.sense = Sense::Minimize;
    auto delta_var = [&](int j) { return j; };  // 0-based relaxed index
    int per_sink = k_s + E + (opts.multi_source ? n + 1 : 0);
    auto f_var = [&](int t, int j) { return k + (t - 1) * per_sink + j; };
    auto mu_var = [&](int t, int m) { return k + (t - 1) * per_sink + k_s + m; };
    // source slack s_{Z,t}: Z = 0 for the empty set, or a variable 1..n
    auto src_var = [&](int t, int z) { return k + (t - 1) * per_sink + k_s + E + z; };
    for (int i = 0; i < k + n * per_sink; ++i)
        lp.add_variable(true);
    for (int j = 0; j < k; ++j)
        lp.add_objective_term(delta_var(j), rel.constraints[j].c);

    for (int t = 1; t <= n; ++t) {
        for (int j = 0; j < k_s; ++j)
            lp.add_row({{f_var(t, j), 1}, {delta_var(j), -1}}, Relation::LessEq, 0);
        if (opts.restrict_head_flow)
            for (int j = 0; j < k_s; ++j) {
                const auto& dc = rel.constraints[j];
                if (dc.Y.minus(dc.X).contains(t))
                    lp.add_row({{f_var(t, j), 1}}, Relation::LessEq, 0);
            }
        if (opts.multi_source) {
            std::vector<std::pair<int, Rational>> budget;
            budget.push_back({src_var(t, 0), 1});
            for (int v = 1; v <= n; ++v)
                if (rank[v] < rank[t])
                    budget.push_back({src_var(t, v), 1});
            lp.add_row(std::move(budget), Relation::LessEq, 1);
        }
        int sink_vertex = vertex_id(VarSet::singleton(t));
        for (int v = 0; v < V; ++v) {
            std::vector<std::pair<int, Rational>> row;
            for (int j = 0; j < k_s; ++j) {
                if (vertex_id(rel.constraints[j].Y) == v)
                    row.push_back({f_var(t, j), 1});
                if (vertex_id(rel.constraints[j].X) == v)
                    row.push_back({f_var(t, j), -1});
            }
            for (int m = 0; m < E; ++m) {
                if (mu_edges[m].from == v)
                    row.push_back({mu_var(t, m), -1});
                if (mu_edges[m].to == v)
                    row.push_back({mu_var(t, m), 1});
            }
            if (v == sink_vertex) {
                // demand 1 less whatever the non-simple reducers supply
                for (int j : reducers[t])
                    row.push_back({delta_var(j), 1});
                lp.add_row(std::move(row), Relation::GreaterEq, 1);
            } else if (v == 0) {
                if (opts.multi_source)
                    row.push_back({src_var(t, 0), 1});
                lp.add_row(std::move(row), Relation::GreaterEq, opts.multi_source ? 0 : -1);
            } else {
                if (opts.multi_source && verts[v].size() == 1) {
                    int z = verts[v].min_member();
                    if (rank[z] < rank[t])
                        row.push_back({src_var(t, z), 1});
                }
                lp.add_row(std::move(row), Relation::GreaterEq, 0);
            }
        }
    }

    LpOutcome out = solve(lp);
    if (out.status == LpStatus::Infeasible)
        return ExtRational::infinity();
    if (out.status != LpStatus::Optimal)
        throw InternalError("flow_bound: LP unbounded");
    return out.objective;
}

enum class PermutationReason { AcyclicTopological, SimpleAny, HeuristicIdentity };

inline const char* permutation_reason_name(PermutationReason reason) {
    switch (reason) {
    case PermutationReason::AcyclicTopological: return "acyclic-topological";
    case PermutationReason::SimpleAny: return "simple-any";
    case PermutationReason::HeuristicIdentity: return "heuristic-identity";
    }
    return "?";
}

struct SuggestedPermutation {
    std::vector<int> pi;
    PermutationReason reason = PermutationReason::HeuristicIdentity;
};

// For simple instances any order is exact; for acyclic instances a
// topological order makes the flow bound exact; otherwise fall back to the
// identity with no optimality claim.
inline SuggestedPermutation suggest_permutation(const Instance& inst) {
    ClassificationReport report = classify(inst);
    if (report.is_simple)
        return {identity_permutation(inst.n), PermutationReason::SimpleAny};
    if (auto topo = topological_permutation(inst))
        return {*topo, PermutationReason::AcyclicTopological};
    return {identity_permutation(inst.n), PermutationReason::HeuristicIdentity};
}

}  // namespace polybound
