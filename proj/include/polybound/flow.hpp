#pragma once

// The polynomial-size route to the polymatroid bound for simple instances:
// build the auxiliary flow network, solve the coupled per-sink min-cost flow
// LP, decompose per-sink flows into simple paths, and produce min-cut
// certificates for infeasible capacity vectors.

#include "polybound/errors.hpp"
#include "polybound/instance.hpp"
#include "polybound/rational.hpp"
#include "polybound/simplex.hpp"
#include "polybound/varset.hpp"

#include <algorithm>
#include <deque>
#include <map>
#include <optional>
#include <string>
#include <vector>

namespace polybound {

inline void require_simple(const Instance& inst, const char* who) {
    for (const auto& dc : inst.constraints)
        if (!dc.is_simple())
            throw PreconditionError(std::string(who) +
                                    ": instance must be simple (every |X| <= 1)");
}

// Directed network on the empty set, the singletons, and the constraint
// heads. Degree edges go up from X_i to Y_i and cost c_i per unit of bought
// capacity; mu edges go strictly down in the subset order and are free.
struct AuxGraph {
    int n = 0;
    std::vector<VarSet> vertices;  // ascending mask order; vertices[0] is the empty set
    struct DegreeEdge {
        int constraint;  // 1-based index into the instance
        int from, to;    // vertex ids of X_i and Y_i
    };
    struct MuEdge {
        int from, to;  // vertex ids of Y and X with X proper subset Y
    };
    std::vector<DegreeEdge> degree_edges;  // in constraint order
    std::vector<MuEdge> mu_edges;          // ordered by (from, to) mask

    int vertex_id(VarSet s) const {
        auto it = std::lower_bound(vertices.begin(), vertices.end(), s);
        if (it == vertices.end() || *it != s)
            throw InternalError("AuxGraph: unknown vertex " + s.to_string());
        return int(it - vertices.begin());
    }

    int singleton_id(int v) const { return vertex_id(VarSet::singleton(v)); }

    // Every vertex reachable from the empty set along degree and mu edges.
    std::vector<bool> reachable_from_source() const {
        std::vector<std::vector<int>> adj(vertices.size());
        for (const auto& e : degree_edges)
            adj[e.from].push_back(e.to);
        for (const auto& e : mu_edges)
            adj[e.from].push_back(e.to);
        std::vector<bool> seen(vertices.size(), false);
        std::deque<int> queue{0};
        seen[0] = true;
        while (!queue.empty()) {
            int u = queue.front();
            queue.pop_front();
            for (int w : adj[u])
                if (!seen[w]) {
                    seen[w] = true;
                    queue.push_back(w);
                }
        }
        return seen;
    }
};

inline AuxGraph build_aux_graph(const Instance& inst) {
    require_simple(inst, "build_aux_graph");
    AuxGraph g;
    g.n = inst.n;
    std::vector<VarSet> verts;
    verts.push_back(VarSet::empty());
    for (int v = 1; v <= inst.n; ++v)
        verts.push_back(VarSet::singleton(v));
    for (const auto& dc : inst.constraints)
        verts.push_back(dc.Y);
    std::sort(verts.begin(), verts.end());
    verts.erase(std::unique(verts.begin(), verts.end()), verts.end());
    g.vertices = std::move(verts);
    for (int i = 1; i <= inst.k(); ++i) {
        const auto& dc = inst.constraint(i);
        g.degree_edges.push_back({i, g.vertex_id(dc.X), g.vertex_id(dc.Y)});
    }
    for (size_t a = 0; a < g.vertices.size(); ++a)
        for (size_t b = 0; b < g.vertices.size(); ++b)
            if (g.vertices[b].proper_subset_of(g.vertices[a]))
                g.mu_edges.push_back({int(a), int(b)});
    return g;
}

// A feasible point of the coupled flow LP: capacities delta_i, per-sink
// degree-edge flows f_{i,t}, and per-sink mu-edge flows.
struct FlowSolution {
    std::vector<Rational> delta;             // size k
    std::vector<std::vector<Rational>> f;    // [t-1][i-1]
    std::vector<std::vector<Rational>> mu;   // [t-1][mu edge index]
    Rational objective;                      // sum c_i delta_i
};

// Net flow into vertex `vertex` for sink t under the solution: degree-edge
// flow in at heads and out at tails, mu-edge flow out at supersets and in at
// subsets. (The downward mu sums enter negatively: a mu variable is flow
// leaving its superset endpoint.)
inline Rational flow_excess(const AuxGraph& g, const FlowSolution& sol, int t, int vertex) {
    Rational e = 0;
    for (const auto& edge : g.degree_edges) {
        if (edge.to == vertex)
            e += sol.f[t - 1][edge.constraint - 1];
        if (edge.from == vertex)
            e -= sol.f[t - 1][edge.constraint - 1];
    }
    for (size_t m = 0; m < g.mu_edges.size(); ++m) {
        if (g.mu_edges[m].from == vertex)
            e -= sol.mu[t - 1][m];
        if (g.mu_edges[m].to == vertex)
            e += sol.mu[t - 1][m];
    }
    return e;
}

// Re-check every FlowSolution invariant from scratch, independently of the
// LP solver: nonnegativity, capacity, and the per-sink excess equations.
// Returns a human-readable list of violations (empty when valid).
inline std::vector<std::string> check_flow_solution(const Instance& inst, const AuxGraph& g,
                                                    const FlowSolution& sol) {
    std::vector<std::string> bad;
    for (int i = 1; i <= inst.k(); ++i)
        if (sign(sol.delta[i - 1]) < 0)
            bad.push_back("delta_" + std::to_string(i) + " < 0");
    for (int t = 1; t <= inst.n; ++t) {
        for (int i = 1; i <= inst.k(); ++i) {
            if (sign(sol.f[t - 1][i - 1]) < 0)
                bad.push_back("f_" + std::to_string(i) + "," + std::to_string(t) + " < 0");
            if (sol.f[t - 1][i - 1] > sol.delta[i - 1])
                bad.push_back("f_" + std::to_string(i) + "," + std::to_string(t) +
                              " > delta_" + std::to_string(i));
        }
        for (size_t m = 0; m < g.mu_edges.size(); ++m)
            if (sign(sol.mu[t - 1][m]) < 0)
                bad.push_back("mu edge " + std::to_string(m) + " sink " + std::to_string(t) +
                              " < 0");
        for (size_t v = 0; v < g.vertices.size(); ++v) {
            Rational e = flow_excess(g, sol, t, int(v));
            Rational want = 0;
            if (g.vertices[v] == VarSet::singleton(t))
                want = 1;
            else if (g.vertices[v].empty_set())
                want = -1;
            if (e != want)
                bad.push_back("excess_" + std::to_string(t) + "(" + g.vertices[v].to_string() +
                              ") = " + to_string(e) + ", expected " + to_string(want));
        }
    }
    return bad;
}

struct FlowBoundResult {
    ExtRational bound;
    std::optional<FlowSolution> solution;  // present iff bound is finite
};

// Optimum of the coupled flow LP; equals the polymatroid bound on simple
// instances. +inf exactly when some sink is unreachable from the source.
// `forced_zero_delta` pins the listed (1-based) capacities to zero, which the
// running-example acceptance check uses to probe optimal support.
inline FlowBoundResult solve_flow_lp(const Instance& inst,
                                     const std::vector<int>& forced_zero_delta = {}) {
    require_simple(inst, "solve_flow_lp");
    AuxGraph g = build_aux_graph(inst);
    auto reach = g.reachable_from_source();
    for (int t = 1; t <= inst.n; ++t)
        if (!reach[g.singleton_id(t)])
            return {ExtRational::infinity(), std::nullopt};

    const int k = inst.k();
    const int V = int(g.vertices.size());
    const int E = int(g.mu_edges.size());
    LinearProgram lp;
    lp.sense = Sense::Minimize;
    // variable layout: delta (k), then per sink: f (k), mu (E)
    auto delta_var = [&](int i) { return i - 1; };
    auto f_var = [&](int t, int i) { return k + (t - 1) * (k + E) + (i - 1); };
    auto mu_var = [&](int t, int m) { return k + (t - 1) * (k + E) + k + m; };
    for (int i = 0; i < k + inst.n * (k + E); ++i)
        lp.add_variable(true);
    for (int i = 1; i <= k; ++i)
        lp.add_objective_term(delta_var(i), inst.constraint(i).c);
    for (int i : forced_zero_delta)
        lp.add_row({{delta_var(i), 1}}, Relation::LessEq, 0);

    for (int t = 1; t <= inst.n; ++t) {
        for (int i = 1; i <= k; ++i)
            lp.add_row({{f_var(t, i), 1}, {delta_var(i), -1}}, Relation::LessEq, 0);
        int sink_vertex = g.singleton_id(t);
        for (int v = 0; v < V; ++v) {
            std::vector<std::pair<int, Rational>> row;
            for (const auto& e : g.degree_edges) {
                if (e.to == v)
                    row.push_back({f_var(t, e.constraint), 1});
                if (e.from == v)
                    row.push_back({f_var(t, e.constraint), -1});
            }
            for (int m = 0; m < E; ++m) {
                if (g.mu_edges[m].from == v)
                    row.push_back({mu_var(t, m), -1});
                if (g.mu_edges[m].to == v)
                    row.push_back({mu_var(t, m), 1});
            }
            if (v == sink_vertex)
                lp.add_row(std::move(row), Relation::Equal, 1);
            else if (v == 0)
                lp.add_row(std::move(row), Relation::Equal, -1);
            else
                lp.add_row(std::move(row), Relation::GreaterEq, 0);
        }
    }

    LpOutcome out = solve(lp);
    if (out.status != LpStatus::Optimal)
        throw InternalError("solve_flow_lp: LP expected optimal once every sink is reachable");

    FlowSolution sol;
    sol.delta.reserve(k);
    for (int i = 1; i <= k; ++i)
        sol.delta.push_back(out.assignment[delta_var(i)]);
    sol.f.resize(inst.n);
    sol.mu.resize(inst.n);
    for (int t = 1; t <= inst.n; ++t) {
        for (int i = 1; i <= k; ++i)
            sol.f[t - 1].push_back(out.assignment[f_var(t, i)]);
        for (int m = 0; m < E; ++m)
            sol.mu[t - 1].push_back(out.assignment[mu_var(t, m)]);
    }
    sol.objective = out.objective.value();
    return {out.objective, std::move(sol)};
}

// One simple flow path from the source to a sink. Edges alternate freely
// between degree edges (recorded by constraint index) and mu edges (recorded
// by position in AuxGraph::mu_edges).
struct FlowPath {
    struct Step {
        bool is_degree;
        int index;  // 1-based constraint, or mu edge position
    };
    std::vector<int> vertices;  // vertex ids, source first, sink last
    std::vector<Step> edges;
    Rational value;
};

struct PathDecomposition {
    std::vector<std::vector<FlowPath>> per_sink;  // [t-1]

    // Path-implied degree-edge flows for a sink: the cycle-cancelled f.
    std::vector<Rational> degree_flow(int t, int k) const {
        std::vector<Rational> f(k, Rational(0));
        for (const auto& path : per_sink[t - 1])
            for (const auto& step : path.edges)
                if (step.is_degree)
                    f[step.index - 1] += path.value;
        return f;
    }

    std::vector<Rational> mu_flow(int t, int mu_count) const {
        std::vector<Rational> mu(mu_count, Rational(0));
        for (const auto& path : per_sink[t - 1])
            for (const auto& step : path.edges)
                if (!step.is_degree)
                    mu[step.index] += path.value;
        return mu;
    }
};

namespace detail {

// Positive-flow multigraph for one sink, with deterministic smallest-target
// edge ordering shared by cycle cancellation and path extraction.
struct SinkFlow {
    const AuxGraph& g;
    std::vector<Rational> deg;  // by constraint-1
    std::vector<Rational> mu;   // by mu edge index

    struct Arc {
        int from, to;
        bool is_degree;
        int index;  // constraint (1-based) or mu index
    };
    std::vector<Arc> arcs;                    // sorted by (from, target mask, kind, index)
    std::vector<std::vector<int>> out_arcs;   // vertex -> arc positions

    SinkFlow(const AuxGraph& graph, std::vector<Rational> deg_flows,
             std::vector<Rational> mu_flows)
        : g(graph), deg(std::move(deg_flows)), mu(std::move(mu_flows)) {
        for (const auto& e : g.degree_edges)
            arcs.push_back({e.from, e.to, true, e.constraint});
        for (size_t m = 0; m < g.mu_edges.size(); ++m)
            arcs.push_back({g.mu_edges[m].from, g.mu_edges[m].to, false, int(m)});
        std::sort(arcs.begin(), arcs.end(), [&](const Arc& a, const Arc& b) {
            if (a.from != b.from)
                return a.from < b.from;
            if (a.to != b.to)
                return g.vertices[a.to] < g.vertices[b.to];
            if (a.is_degree != b.is_degree)
                return a.is_degree;  // degree edges before the parallel mu edge
            return a.index < b.index;
        });
        out_arcs.resize(g.vertices.size());
        for (size_t a = 0; a < arcs.size(); ++a)
            out_arcs[arcs[a].from].push_back(int(a));
    }

    Rational& flow(const Arc& a) { return a.is_degree ? deg[a.index - 1] : mu[a.index]; }

    int first_positive_arc(int vertex) {
        for (int a : out_arcs[vertex])
            if (sign(flow(arcs[a])) > 0)
                return a;
        return -1;
    }

    // Cancel all directed cycles of positive flow. Cancellation leaves every
    // vertex excess unchanged. Deterministic: walk smallest-target arcs from
    // the smallest vertex carrying outflow until a vertex repeats.
    void cancel_cycles() {
        for (;;) {
            bool cancelled = false;
            for (size_t start = 0; start < g.vertices.size() && !cancelled; ++start) {
                if (first_positive_arc(int(start)) < 0)
                    continue;
                std::vector<int> where(g.vertices.size(), -1);
                std::vector<int> stack_vertices, stack_arcs;
                int v = int(start);
                for (;;) {
                    if (where[v] >= 0) {
                        // cycle: stack_vertices[where[v]..] -> v
                        Rational eps;
                        bool first = true;
                        for (size_t p = where[v]; p < stack_arcs.size(); ++p) {
                            Rational& fl = flow(arcs[stack_arcs[p]]);
                            if (first || fl < eps) {
                                eps = fl;
                                first = false;
                            }
                        }
                        for (size_t p = where[v]; p < stack_arcs.size(); ++p)
                            flow(arcs[stack_arcs[p]]) -= eps;
                        cancelled = true;
                        break;
                    }
                    where[v] = int(stack_vertices.size());
                    stack_vertices.push_back(v);
                    int a = first_positive_arc(v);
                    if (a < 0)
                        break;  // walk died out; no cycle through this start
                    stack_arcs.push_back(a);
                    v = arcs[a].to;
                }
            }
            if (!cancelled)
                return;
        }
    }
};

}  // namespace detail

// Decompose a feasible flow solution into simple per-sink paths from the
// source to each sink. Cycles are cancelled first; path extraction then
// repeatedly walks the lexicographically smallest positive route and removes
// its bottleneck, so the output is deterministic and each extraction zeroes
// at least one edge. Per sink, the path values sum to exactly 1 and
// edge-wise recomposition reproduces the cycle-cancelled flow.
inline PathDecomposition decompose_flows(const FlowSolution& sol, const AuxGraph& g) {
    PathDecomposition out;
    out.per_sink.resize(g.n);
    for (int t = 1; t <= g.n; ++t) {
        // validate invariants for this sink before decomposing
        for (const auto& fl : sol.f[t - 1])
            if (sign(fl) < 0)
                throw InternalError("decompose_flows: negative degree-edge flow for sink " +
                                    std::to_string(t));
        for (const auto& fl : sol.mu[t - 1])
            if (sign(fl) < 0)
                throw InternalError("decompose_flows: negative mu-edge flow for sink " +
                                    std::to_string(t));
        for (size_t v = 0; v < g.vertices.size(); ++v) {
            Rational e = 0;
            for (const auto& edge : g.degree_edges) {
                if (edge.to == int(v))
                    e += sol.f[t - 1][edge.constraint - 1];
                if (edge.from == int(v))
                    e -= sol.f[t - 1][edge.constraint - 1];
            }
            for (size_t m = 0; m < g.mu_edges.size(); ++m) {
                if (g.mu_edges[m].from == int(v))
                    e -= sol.mu[t - 1][m];
                if (g.mu_edges[m].to == int(v))
                    e += sol.mu[t - 1][m];
            }
            Rational want = 0;
            if (g.vertices[v] == VarSet::singleton(t))
                want = 1;
            else if (g.vertices[v].empty_set())
                want = -1;
            if (e != want)
                throw InternalError("decompose_flows: excess violated at vertex " +
                                    g.vertices[v].to_string() + " for sink " +
                                    std::to_string(t));
        }

        detail::SinkFlow sf(g, sol.f[t - 1], sol.mu[t - 1]);
        sf.cancel_cycles();
        int sink_vertex = g.singleton_id(t);
        for (;;) {
            int a0 = sf.first_positive_arc(0);
            if (a0 < 0)
                break;
            FlowPath path;
            path.vertices.push_back(0);
            int v = 0;
            Rational eps;
            bool first = true;
            std::vector<int> taken;
            while (v != sink_vertex) {
                int a = sf.first_positive_arc(v);
                if (a < 0)
                    throw InternalError("decompose_flows: flow dead-ends at vertex " +
                                        g.vertices[v].to_string() + " for sink " +
                                        std::to_string(t));
                taken.push_back(a);
                const auto& arc = sf.arcs[a];
                path.edges.push_back({arc.is_degree, arc.index});
                path.vertices.push_back(arc.to);
                if (first || sf.flow(arc) < eps) {
                    eps = sf.flow(arc);
                    first = false;
                }
                v = arc.to;
                if (path.vertices.size() > sf.g.vertices.size() + 1)
                    throw InternalError("decompose_flows: path revisits a vertex for sink " +
                                        std::to_string(t));
            }
            for (int a : taken)
                sf.flow(sf.arcs[a]) -= eps;
            path.value = eps;
            out.per_sink[t - 1].push_back(std::move(path));
        }
        // total extracted must be exactly one unit
        Rational total = 0;
        for (const auto& p : out.per_sink[t - 1])
            total += p.value;
        if (total != 1)
            throw InternalError("decompose_flows: extracted paths for sink " +
                                std::to_string(t) + " sum to " + to_string(total));
    }
    return out;
}

// Per-sink max-flow / min-cut check of a capacity vector delta. Degree edges
// carry capacity delta_i, mu edges are uncapacitated. A sink whose max flow
// falls short of one unit yields the violated constraint set V of the cut LP
// (the variables whose singletons sit on the source side); the row sum over
// {i : X_i subset V, Y_i not subset V} is then < 1.
struct MinCutReport {
    struct PerSink {
        int sink = 0;
        bool feasible = true;
        VarSet violated_set;  // meaningful iff !feasible
        Rational row_sum;     // meaningful iff !feasible
    };
    std::vector<PerSink> sinks;
    bool all_feasible = true;
};

inline MinCutReport min_cut_certificate(const Instance& inst, const std::vector<Rational>& delta) {
    require_simple(inst, "min_cut_certificate");
    if (int(delta.size()) != inst.k())
        throw PreconditionError("min_cut_certificate: delta size must equal k");
    for (const auto& d : delta)
        if (sign(d) < 0)
            throw PreconditionError("min_cut_certificate: delta must be nonnegative");
    AuxGraph g = build_aux_graph(inst);

    struct Arc {
        int to;
        Rational cap;       // ignored when infinite
        bool infinite;
        Rational flow;
        int rev;            // index of reverse arc in adj[to]
    };
    MinCutReport report;
    for (int t = 1; t <= inst.n; ++t) {
        std::vector<std::vector<Arc>> adj(g.vertices.size());
        auto add_arc = [&](int u, int v, Rational cap, bool infinite) {
            adj[u].push_back({v, cap, infinite, Rational(0), int(adj[v].size())});
            adj[v].push_back({u, Rational(0), false, Rational(0), int(adj[u].size()) - 1});
        };
        for (const auto& e : g.degree_edges)
            add_arc(e.from, e.to, delta[e.constraint - 1], false);
        for (const auto& e : g.mu_edges)
            add_arc(e.from, e.to, Rational(0), true);

        int sink_vertex = g.singleton_id(t);
        Rational total = 0;
        auto residual = [&](const Arc& a) -> std::optional<Rational> {
            if (a.infinite)
                return std::nullopt;  // unbounded residual
            return a.cap - a.flow;
        };
        for (;;) {
            if (total >= 1)
                break;
            // BFS for an augmenting path
            std::vector<std::pair<int, int>> parent(g.vertices.size(), {-1, -1});
            std::deque<int> queue{0};
            parent[0] = {0, 0};
            while (!queue.empty() && parent[sink_vertex].first < 0) {
                int u = queue.front();
                queue.pop_front();
                for (size_t a = 0; a < adj[u].size(); ++a) {
                    const Arc& arc = adj[u][a];
                    auto r = residual(arc);
                    bool positive = !r.has_value() ? true : sign(*r) > 0;
                    if (positive && parent[arc.to].first < 0) {
                        parent[arc.to] = {u, int(a)};
                        queue.push_back(arc.to);
                    }
                }
            }
            if (parent[sink_vertex].first < 0)
                break;
            // bottleneck (finite: the first hop out of the source is a degree edge)
            std::optional<Rational> bottleneck;
            for (int v = sink_vertex; v != 0;) {
                auto [u, a] = parent[v];
                auto r = residual(adj[u][a]);
                if (r.has_value() && (!bottleneck || *r < *bottleneck))
                    bottleneck = *r;
                v = u;
            }
            if (!bottleneck)
                throw InternalError("min_cut_certificate: unbounded augmenting path");
            // cap the augmentation at the outstanding demand
            Rational need = Rational(1) - total;
            Rational eps = *bottleneck < need ? *bottleneck : need;
            for (int v = sink_vertex; v != 0;) {
                auto [u, a] = parent[v];
                adj[u][a].flow += eps;
                adj[adj[u][a].to][adj[u][a].rev].flow -= eps;
                v = u;
            }
            total += eps;
        }

        MinCutReport::PerSink entry;
        entry.sink = t;
        if (total >= 1) {
            report.sinks.push_back(entry);
            continue;
        }
        // min cut: vertices reachable in the residual graph
        std::vector<bool> seen(g.vertices.size(), false);
        std::deque<int> queue{0};
        seen[0] = true;
        while (!queue.empty()) {
            int u = queue.front();
            queue.pop_front();
            for (const Arc& arc : adj[u]) {
                auto r = residual(arc);
                bool positive = !r.has_value() ? true : sign(*r) > 0;
                if (positive && !seen[arc.to]) {
                    seen[arc.to] = true;
                    queue.push_back(arc.to);
                }
            }
        }
        entry.feasible = false;
        for (int v = 1; v <= inst.n; ++v)
            if (seen[g.singleton_id(v)])
                entry.violated_set = entry.violated_set.with(v);
        for (int i = 1; i <= inst.k(); ++i) {
            const auto& dc = inst.constraint(i);
            if (dc.X.subset_of(entry.violated_set) && !dc.Y.subset_of(entry.violated_set))
                entry.row_sum += delta[i - 1];
        }
        report.all_feasible = false;
        report.sinks.push_back(entry);
    }
    return report;
}

}  // namespace polybound
