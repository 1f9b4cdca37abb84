#pragma once

// Extend a feasible flow-LP solution to a feasible point of the exponential
// dual of the polymatroid LP, iterating over the variables and lifting each
// sink's flow paths by the prefix set. The witness stays sparse: only the
// polynomially many (mu, sigma) entries the construction touches are stored.
//
// Two readings of the published pseudocode are pinned down here:
//   - the backward-loop decrease always happens at the prefix-i level, with
//     the compensating increase chosen by whether the processed edge's upper
//     endpoint already contains the new variable (this is the reading the
//     accompanying correctness argument uses);
//   - the cleanup step that tops a lifted capacity back up to delta_j adds
//     the lifted mu entry in the sigma branch as well, which is what keeps
//     every vertex excess unchanged and the level-(i+1) invariant exact.

#include "polybound/errors.hpp"
#include "polybound/flow.hpp"
#include "polybound/instance.hpp"
#include "polybound/rational.hpp"
#include "polybound/varset.hpp"

#include <functional>
#include <map>
#include <string>
#include <utility>
#include <vector>

namespace polybound {

// A sparse feasible point of the exponential dual: capacities delta per
// constraint, downward flows mu keyed by (X, Y) with X proper subset of Y,
// and hyperedge flows sigma keyed by unordered incomparable pairs.
struct DualWitness {
    std::vector<Rational> delta;
    std::map<std::pair<VarSet, VarSet>, Rational> mu;
    std::map<std::pair<VarSet, VarSet>, Rational> sigma;
    Rational objective;

    static std::pair<VarSet, VarSet> sigma_key(VarSet i, VarSet j) {
        return i < j ? std::make_pair(i, j) : std::make_pair(j, i);
    }
};

// Net inflow at Z under the dual variables: delta enters at heads and leaves
// at tails, mu leaves supersets toward subsets, sigma leaves both endpoints
// and enters their intersection and union.
inline Rational dual_excess(const Instance& inst, const DualWitness& w, VarSet z) {
    Rational e = 0;
    for (int j = 1; j <= inst.k(); ++j) {
        const auto& dc = inst.constraint(j);
        if (dc.Y == z)
            e += w.delta[j - 1];
        if (dc.X == z)
            e -= w.delta[j - 1];
    }
    for (const auto& [key, value] : w.mu) {
        if (key.second == z)
            e -= value;
        if (key.first == z)
            e += value;
    }
    for (const auto& [key, value] : w.sigma) {
        const auto& [i, j] = key;
        if (i == z || j == z)
            e -= value;
        if (i.intersect(j) == z)
            e += value;
        if (i.union_with(j) == z)
            e += value;
    }
    return e;
}

struct DualWitnessVerdict {
    bool accepted = true;
    std::vector<std::string> violations;
    // Every vertex with a nonzero incident variable (plus the empty and full
    // sets), with its recomputed excess.
    std::vector<std::pair<VarSet, Rational>> excess_report;
};

// Recompute feasibility of a dual witness from scratch: nonnegative
// variables, well-formed keys, excess >= 1 at the full set, >= -1 at the
// empty set, >= 0 everywhere else. Vertices without incident variables have
// zero excess, so scanning the touched vertices is exhaustive.
inline DualWitnessVerdict verify_dual_witness(const Instance& inst, const DualWitness& w) {
    DualWitnessVerdict verdict;
    auto complain = [&](std::string msg) {
        verdict.accepted = false;
        verdict.violations.push_back(std::move(msg));
    };
    if (int(w.delta.size()) != inst.k())
        complain("delta has " + std::to_string(w.delta.size()) + " entries, expected " +
                 std::to_string(inst.k()));
    for (size_t j = 0; j < w.delta.size(); ++j)
        if (sign(w.delta[j]) < 0)
            complain("delta_" + std::to_string(j + 1) + " < 0");
    for (const auto& [key, value] : w.mu) {
        if (!key.first.proper_subset_of(key.second))
            complain("mu key " + key.first.to_string() + "," + key.second.to_string() +
                     " is not a proper-subset pair");
        if (sign(value) < 0)
            complain("mu_" + key.first.to_string() + "," + key.second.to_string() + " < 0");
    }
    for (const auto& [key, value] : w.sigma) {
        if (!key.first.incomparable_with(key.second))
            complain("sigma key " + key.first.to_string() + "," + key.second.to_string() +
                     " is not an incomparable pair");
        if (sign(value) < 0)
            complain("sigma_" + key.first.to_string() + "," + key.second.to_string() + " < 0");
    }
    if (!verdict.accepted)
        return verdict;

    std::map<VarSet, char> vertices;
    vertices[VarSet::empty()] = 1;
    vertices[VarSet::full(inst.n)] = 1;
    for (const auto& dc : inst.constraints) {
        vertices[dc.X] = 1;
        vertices[dc.Y] = 1;
    }
    for (const auto& [key, value] : w.mu) {
        if (sign(value) == 0)
            continue;
        vertices[key.first] = 1;
        vertices[key.second] = 1;
    }
    for (const auto& [key, value] : w.sigma) {
        if (sign(value) == 0)
            continue;
        vertices[key.first] = 1;
        vertices[key.second] = 1;
        vertices[key.first.intersect(key.second)] = 1;
        vertices[key.first.union_with(key.second)] = 1;
    }
    for (const auto& [z, unused] : vertices) {
        (void)unused;
        Rational e = dual_excess(inst, w, z);
        verdict.excess_report.emplace_back(z, e);
        if (z == VarSet::full(inst.n)) {
            if (e < 1)
                complain("excess(" + z.to_string() + ") = " + to_string(e) + " < 1");
        } else if (z.empty_set()) {
            if (e < -1)
                complain("excess({}) = " + to_string(e) + " < -1");
        } else if (sign(e) < 0) {
            complain("excess(" + z.to_string() + ") = " + to_string(e) + " < 0");
        }
    }
    return verdict;
}

// Observer events let tests replay the construction update by update.
struct LiftEvent {
    enum class Phase { Init, Forward, Backward, Cleanup } phase;
    enum class Kind { MuAdd, MuSub, SigmaAdd } kind;
    int iteration;  // outer-loop i, -1 for Init
    VarSet a, b;    // mu: (X, Y); sigma: the unordered pair
    Rational amount;
};

struct LiftOptions {
    // Outer-loop variable order; identity when empty. The construction is
    // order-agnostic, position p processes sink order[p].
    std::vector<int> order;
    // Re-check the outer-loop invariant (prefix excess 1, zero elsewhere,
    // lifted mu levels equal to the pooled capacities) after every iteration.
    bool check_invariants = false;
    std::function<void(const LiftEvent&)> observer;
};

namespace detail {

class LiftState {
public:
    LiftState(const Instance& inst, const LiftOptions& opts) : inst_(inst), opts_(opts) {}

    DualWitness witness;
    std::map<VarSet, Rational> excess;

    void fail(int iteration, const char* loop, VarSet a, VarSet b, const char* what) const {
        throw InternalError("lift: iteration " + std::to_string(iteration) + ", " + loop +
                            " loop, pair " + a.to_string() + " -> " + b.to_string() + ": " +
                            what);
    }

    void mu_add(LiftEvent::Phase phase, int iteration, VarSet x, VarSet y, const Rational& eps) {
        if (sign(eps) == 0)
            return;
        if (!x.proper_subset_of(y))
            fail(iteration, phase_name(phase), x, y, "mu increase on a non-subset pair");
        witness.mu[{x, y}] += eps;
        bump(y, -eps);
        bump(x, eps);
        emit(phase, LiftEvent::Kind::MuAdd, iteration, x, y, eps);
    }

    void mu_sub(LiftEvent::Phase phase, int iteration, VarSet x, VarSet y, const Rational& eps) {
        if (sign(eps) == 0)
            return;
        auto it = witness.mu.find({x, y});
        if (it == witness.mu.end() || it->second < eps)
            fail(iteration, phase_name(phase), x, y, "mu decrease would go negative");
        it->second -= eps;
        bump(y, eps);
        bump(x, -eps);
        emit(phase, LiftEvent::Kind::MuSub, iteration, x, y, eps);
    }

    void sigma_add(LiftEvent::Phase phase, int iteration, VarSet i, VarSet j,
                   const Rational& eps) {
        if (sign(eps) == 0)
            return;
        if (!i.incomparable_with(j))
            fail(iteration, phase_name(phase), i, j, "sigma increase on a comparable pair");
        witness.sigma[DualWitness::sigma_key(i, j)] += eps;
        bump(i, -eps);
        bump(j, -eps);
        bump(i.intersect(j), eps);
        bump(i.union_with(j), eps);
        emit(phase, LiftEvent::Kind::SigmaAdd, iteration, i, j, eps);
    }

private:
    const Instance& inst_;
    const LiftOptions& opts_;

    static const char* phase_name(LiftEvent::Phase phase) {
        switch (phase) {
        case LiftEvent::Phase::Init: return "init";
        case LiftEvent::Phase::Forward: return "forward";
        case LiftEvent::Phase::Backward: return "backward";
        case LiftEvent::Phase::Cleanup: return "cleanup";
        }
        return "?";
    }

    void bump(VarSet z, const Rational& d) {
        auto [it, inserted] = excess.try_emplace(z, d);
        if (!inserted)
            it->second += d;
    }

    void emit(LiftEvent::Phase phase, LiftEvent::Kind kind, int iteration, VarSet a, VarSet b,
              const Rational& eps) {
        if (opts_.observer)
            opts_.observer({phase, kind, iteration, a, b, eps});
    }
};

}  // namespace detail

// Algorithm: initialize mu with the capacities, then per outer iteration lift
// the sink's flow paths forward at prefix level i and backward at level i+1,
// and finish with the cleanup pass that restores every lifted capacity to
// delta_j. The objective is unchanged; every intermediate value stays
// nonnegative or the construction throws naming iteration, loop, and pair.
//
// Degree-edge flows are taken from the path decomposition (the
// cycle-cancelled flow), which is what the construction's accounting needs;
// sol supplies delta and the objective.
inline DualWitness lift(const Instance& inst, const FlowSolution& sol,
                        const PathDecomposition& paths, const LiftOptions& opts = {}) {
    require_simple(inst, "lift");
    AuxGraph g = build_aux_graph(inst);
    std::vector<int> order = opts.order.empty() ? identity_permutation(inst.n) : opts.order;
    validate_permutation(inst, order);
    if (int(paths.per_sink.size()) != inst.n)
        throw PreconditionError("lift: path decomposition must cover every sink");

    detail::LiftState state(inst, opts);
    state.witness.delta = sol.delta;
    state.witness.objective = 0;
    for (int j = 1; j <= inst.k(); ++j) {
        const auto& dc = inst.constraint(j);
        state.witness.objective += dc.c * sol.delta[j - 1];
        // the delta variable itself feeds excess at Y_j and drains X_j
        state.excess[dc.Y] += sol.delta[j - 1];
        state.excess[dc.X] -= sol.delta[j - 1];
        state.mu_add(LiftEvent::Phase::Init, -1, dc.X, dc.Y, sol.delta[j - 1]);
    }

    VarSet prefix;  // [i] in the chosen order
    for (int i = 0; i < inst.n; ++i) {
        int t = order[i];
        VarSet prefix_next = prefix.with(t);
        const auto& sink_paths = paths.per_sink[t - 1];
        {
            Rational total = 0;
            for (const auto& p : sink_paths)
                total += p.value;
            if (total != 1)
                throw PreconditionError("lift: paths for sink " + std::to_string(t) +
                                        " do not sum to one unit");
        }

        // forward path loop at level [i]
        for (const auto& path : sink_paths) {
            for (size_t e = 0; e < path.edges.size(); ++e) {
                VarSet a = g.vertices[path.vertices[e]].union_with(prefix);
                VarSet b = g.vertices[path.vertices[e + 1]].union_with(prefix);
                if (a.proper_subset_of(b))
                    state.mu_sub(LiftEvent::Phase::Forward, i, a, b, path.value);
                else if (b.proper_subset_of(a))
                    state.mu_add(LiftEvent::Phase::Forward, i, b, a, path.value);
            }
        }

        // backward path loop at level [i+1], edges in reverse order
        for (const auto& path : sink_paths) {
            for (size_t e = path.edges.size(); e-- > 0;) {
                VarSet a_raw = g.vertices[path.vertices[e]];
                VarSet b_raw = g.vertices[path.vertices[e + 1]];
                VarSet a1 = a_raw.union_with(prefix_next);
                VarSet b1 = b_raw.union_with(prefix_next);
                if (a1.proper_subset_of(b1)) {
                    state.mu_add(LiftEvent::Phase::Backward, i, a1, b1, path.value);
                } else if (b1.proper_subset_of(a1)) {
                    VarSet a0 = a_raw.union_with(prefix);
                    VarSet b0 = b_raw.union_with(prefix);
                    state.mu_sub(LiftEvent::Phase::Backward, i, b0, a0, path.value);
                    if (a_raw.contains(t)) {
                        if (b1 != b0)
                            state.mu_add(LiftEvent::Phase::Backward, i, b0, b1, path.value);
                    } else {
                        state.sigma_add(LiftEvent::Phase::Backward, i, a0, b1, path.value);
                    }
                }
            }
        }

        // cleanup loop: top every still-strict lifted capacity back up to delta_j
        std::vector<Rational> lifted_flow = paths.degree_flow(t, inst.k());
        for (int j = 1; j <= inst.k(); ++j) {
            const auto& dc = inst.constraint(j);
            VarSet x1 = dc.X.union_with(prefix_next);
            VarSet y1 = dc.Y.union_with(prefix_next);
            if (!x1.proper_subset_of(y1))
                continue;
            Rational eps = sol.delta[j - 1] - lifted_flow[j - 1];
            if (sign(eps) < 0)
                throw PreconditionError("lift: path flow exceeds delta for constraint " +
                                        std::to_string(j));
            if (sign(eps) == 0)
                continue;
            VarSet x0 = dc.X.union_with(prefix);
            VarSet y0 = dc.Y.union_with(prefix);
            state.mu_sub(LiftEvent::Phase::Cleanup, i, x0, y0, eps);
            if (dc.Y.contains(t)) {
                if (x1 != x0)
                    state.mu_add(LiftEvent::Phase::Cleanup, i, x0, x1, eps);
                state.mu_add(LiftEvent::Phase::Cleanup, i, x1, y1, eps);
            } else {
                state.sigma_add(LiftEvent::Phase::Cleanup, i, x1, y0, eps);
                state.mu_add(LiftEvent::Phase::Cleanup, i, x1, y1, eps);
            }
        }

        if (opts.check_invariants) {
            for (const auto& [z, e] : state.excess) {
                Rational want = 0;
                if (z == prefix_next)
                    want = 1;
                else if (z.empty_set())
                    want = -1;
                if (e != want)
                    throw InternalError("lift: iteration " + std::to_string(i) +
                                        " invariant: excess(" + z.to_string() + ") = " +
                                        to_string(e) + ", expected " + to_string(want));
            }
            // pooled lifted capacities: mu at level [i+1] equals the sum of
            // delta_j over constraints lifting to the pair
            std::map<std::pair<VarSet, VarSet>, Rational> want_levels;
            for (int j = 1; j <= inst.k(); ++j) {
                const auto& dc = inst.constraint(j);
                VarSet x1 = dc.X.union_with(prefix_next);
                VarSet y1 = dc.Y.union_with(prefix_next);
                if (x1.proper_subset_of(y1))
                    want_levels[{x1, y1}] += sol.delta[j - 1];
            }
            for (const auto& [key, want] : want_levels) {
                auto it = state.witness.mu.find(key);
                Rational got = it == state.witness.mu.end() ? Rational(0) : it->second;
                if (got != want)
                    throw InternalError("lift: iteration " + std::to_string(i) +
                                        " invariant: mu(" + key.first.to_string() + "," +
                                        key.second.to_string() + ") = " + to_string(got) +
                                        ", expected " + to_string(want));
            }
        }
        prefix = prefix_next;
    }

    // drop exact zeros so the witness stays sparse
    for (auto it = state.witness.mu.begin(); it != state.witness.mu.end();)
        it = sign(it->second) == 0 ? state.witness.mu.erase(it) : std::next(it);
    for (auto it = state.witness.sigma.begin(); it != state.witness.sigma.end();)
        it = sign(it->second) == 0 ? state.witness.sigma.erase(it) : std::next(it);
    return state.witness;
}

}  // namespace polybound
