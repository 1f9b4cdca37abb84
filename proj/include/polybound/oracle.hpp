#pragma once

// Ground-truth bound computations for small n, all exact:
//   - polymatroid bound via the exponential LP over monotone submodular
//     functions (elemental constraint basis, lazily generated for larger n),
//   - normal bound via the step-function weight LP,
//   - modular bound (polynomial size),
//   - chain bound via permutation relaxation + the polymatroid LP.

#include "polybound/errors.hpp"
#include "polybound/instance.hpp"
#include "polybound/rational.hpp"
#include "polybound/simplex.hpp"
#include "polybound/varset.hpp"

#include <algorithm>
#include <map>
#include <optional>
#include <tuple>
#include <vector>

namespace polybound {

inline void require_oracle_cap(const Instance& inst, int cap) {
    if (inst.n > cap)
        throw PreconditionError("oracle: n = " + std::to_string(inst.n) +
                                " exceeds the oracle cap " + std::to_string(cap));
}

// Values h(X) for every subset of [n], normalized to h(empty) = 0.
struct SetFunctionTable {
    int n = 0;
    std::vector<Rational> values;  // indexed by mask, size 2^n

    const Rational& at(VarSet s) const { return values[s.bits()]; }

    // Full-form polymatroid check: monotone over all pairs X subset Y and
    // submodular over all incomparable pairs, not just the elemental basis.
    bool is_polymatroid() const {
        std::uint64_t N = std::uint64_t(1) << n;
        if (sign(values[0]) != 0)
            return false;
        for (std::uint64_t y = 0; y < N; ++y) {
            // subsets x of y: monotonicity
            for (std::uint64_t x = y; ; x = (x - 1) & y) {
                if (x != y && values[y] < values[x])
                    return false;
                if (x == 0)
                    break;
            }
        }
        for (std::uint64_t x = 0; x < N; ++x)
            for (std::uint64_t y = x + 1; y < N; ++y) {
                if ((x & ~y) == 0 || (y & ~x) == 0)
                    continue;  // comparable
                if (values[x] + values[y] < values[x | y] + values[x & y])
                    return false;
            }
        return true;
    }

    bool satisfies(const Instance& inst) const {
        for (const auto& dc : inst.constraints)
            if (at(dc.Y) - at(dc.X) > dc.c)
                return false;
        return true;
    }
};

// The polymatroid bound is finite iff repeatedly adding Y_i whenever X_i is
// already covered grows the empty set to the full universe; otherwise a
// scaled step function is feasible with unbounded objective.
inline bool constraint_closure_reaches_full(const Instance& inst) {
    VarSet r = VarSet::empty();
    bool grew = true;
    while (grew) {
        grew = false;
        for (const auto& dc : inst.constraints)
            if (dc.X.subset_of(r) && !dc.Y.subset_of(r)) {
                r = r.union_with(dc.Y);
                grew = true;
            }
    }
    return r == VarSet::full(inst.n);
}

namespace detail {

// Shared scaffolding for the polymatroid LP: one variable per nonempty
// subset (h(empty) is pinned to zero by dropping its column), elemental
// monotonicity rows, and the degree rows. maximize h([n]).
struct PolyLpBase {
    int n;
    std::uint64_t N;
    LinearProgram lp;

    explicit PolyLpBase(const Instance& inst) : n(inst.n), N(std::uint64_t(1) << inst.n) {
        lp.sense = Sense::Maximize;
        for (std::uint64_t m = 1; m < N; ++m)
            lp.add_variable(true);
        for (int i = 1; i <= n; ++i) {
            std::vector<std::pair<int, Rational>> row;
            row.push_back({col(N - 1), 1});
            if (n > 1)
                row.push_back({col((N - 1) & ~(std::uint64_t(1) << (i - 1))), -1});
            lp.add_row(std::move(row), Relation::GreaterEq, 0);
        }
        for (const auto& dc : inst.constraints) {
            std::vector<std::pair<int, Rational>> row;
            row.push_back({col(dc.Y.bits()), 1});
            if (!dc.X.empty_set())
                row.push_back({col(dc.X.bits()), -1});
            lp.add_row(std::move(row), Relation::LessEq, dc.c);
        }
        lp.add_objective_term(col(N - 1), 1);
    }

    int col(std::uint64_t mask) const { return int(mask) - 1; }

    LinearProgram::Row submod_row(std::uint64_t S, int i, int j) const {
        std::uint64_t bi = std::uint64_t(1) << (i - 1), bj = std::uint64_t(1) << (j - 1);
        std::vector<std::pair<int, Rational>> row;
        row.push_back({col(S | bi), 1});
        row.push_back({col(S | bj), 1});
        row.push_back({col(S | bi | bj), -1});
        if (S != 0)
            row.push_back({col(S), -1});
        return {std::move(row), Relation::GreaterEq, Rational(0)};
    }
};

// Full assembly: every elemental submodularity row up front. Preferred for
// small n where the whole family fits comfortably.
inline LpOutcome solve_poly_lp_full(const Instance& inst) {
    PolyLpBase base(inst);
    for (std::uint64_t S = 0; S < base.N; ++S)
        for (int i = 1; i <= base.n; ++i) {
            if ((S >> (i - 1)) & 1)
                continue;
            for (int j = i + 1; j <= base.n; ++j) {
                if ((S >> (j - 1)) & 1)
                    continue;
                base.lp.rows.push_back(base.submod_row(S, i, j));
            }
        }
    return solve(base.lp);
}

// Lazy assembly: start from the degree rows plus valid bounding rows
// (h([n]) <= sum c_i and h([n]) >= h(X) for constraint sets, both implied by
// the full family), then repeatedly add the elemental submodularity rows the
// current optimum violates until none are. The caller has already
// established that the full LP is bounded, so every relaxation solved here
// is bounded as well.
inline LpOutcome solve_poly_lp_lazy(const Instance& inst) {
    PolyLpBase base(inst);
    Rational total_c = 0;
    for (const auto& dc : inst.constraints)
        total_c += dc.c;
    base.lp.add_row({{base.col(base.N - 1), 1}}, Relation::LessEq, total_c);
    std::vector<std::uint64_t> pinned;
    for (const auto& dc : inst.constraints) {
        pinned.push_back(dc.Y.bits());
        if (!dc.X.empty_set())
            pinned.push_back(dc.X.bits());
    }
    std::sort(pinned.begin(), pinned.end());
    pinned.erase(std::unique(pinned.begin(), pinned.end()), pinned.end());
    for (std::uint64_t mask : pinned)
        if (mask != base.N - 1)
            base.lp.add_row({{base.col(base.N - 1), 1}, {base.col(mask), -1}},
                            Relation::GreaterEq, 0);

    const int n = base.n;
    std::vector<char> have(size_t(base.N) * n * n, 0);
    auto key = [n](std::uint64_t S, int i, int j) {
        return (size_t(S) * n + (i - 1)) * n + (j - 1);
    };

    ExactSimplex simplex(base.lp);
    LpOutcome out = simplex.solve();
    for (;;) {
        if (out.status != LpStatus::Optimal)
            throw InternalError("oracle: bounded polymatroid LP relaxation not optimal");
        auto value = [&](std::uint64_t S) -> const Rational& {
            static const Rational zero(0);
            return S == 0 ? zero : out.assignment[base.col(S)];
        };
        struct Violation {
            Rational amount;
            std::uint64_t S;
            int i, j;
        };
        std::vector<Violation> violations;
        for (std::uint64_t S = 0; S < base.N; ++S)
            for (int i = 1; i <= n; ++i) {
                if ((S >> (i - 1)) & 1)
                    continue;
                for (int j = i + 1; j <= n; ++j) {
                    if ((S >> (j - 1)) & 1)
                        continue;
                    if (have[key(S, i, j)])
                        continue;
                    std::uint64_t bi = std::uint64_t(1) << (i - 1);
                    std::uint64_t bj = std::uint64_t(1) << (j - 1);
                    Rational v = value(S | bi) + value(S | bj) - value(S | bi | bj) - value(S);
                    if (sign(v) < 0)
                        violations.push_back({-v, S, i, j});
                }
            }
        if (violations.empty())
            return out;
        std::sort(violations.begin(), violations.end(),
                  [](const Violation& a, const Violation& b) {
                      if (a.amount != b.amount)
                          return a.amount > b.amount;
                      return std::tie(a.S, a.i, a.j) < std::tie(b.S, b.i, b.j);
                  });
        std::vector<LinearProgram::Row> batch;
        size_t limit = std::min<size_t>(violations.size(), 256);
        for (size_t t = 0; t < limit; ++t) {
            batch.push_back(base.submod_row(violations[t].S, violations[t].i, violations[t].j));
            have[key(violations[t].S, violations[t].i, violations[t].j)] = 1;
        }
        out = simplex.add_rows_and_resolve(batch);
    }
}

}  // namespace detail

struct PolymatroidBoundResult {
    ExtRational bound;
    std::optional<SetFunctionTable> witness;  // present iff bound is finite
};

// DC[Gamma_n]: maximize h([n]) - h(empty) over monotone submodular h subject
// to the degree constraints. The witness is an optimal polymatroid
// (normalized so h(empty) = 0); +inf when the LP is unbounded.
inline PolymatroidBoundResult polymatroid_bound_oracle(const Instance& inst,
                                                       int cap = kDefaultOracleCap) {
    require_oracle_cap(inst, cap);
    if (!constraint_closure_reaches_full(inst))
        return {ExtRational::infinity(), std::nullopt};
    LpOutcome out =
        inst.n <= 6 ? detail::solve_poly_lp_full(inst) : detail::solve_poly_lp_lazy(inst);
    if (out.status != LpStatus::Optimal)
        throw InternalError("oracle: polymatroid LP expected optimal after closure check");
    SetFunctionTable witness;
    witness.n = inst.n;
    witness.values.resize(std::size_t(1) << inst.n, Rational(0));
    for (std::uint64_t m = 1; m < (std::uint64_t(1) << inst.n); ++m)
        witness.values[m] = out.assignment[int(m) - 1];
    return {out.objective, std::move(witness)};
}

struct NormalBoundResult {
    ExtRational bound;
    // Nonzero step-function weights lambda_V keyed by the proper subset V.
    std::vector<std::pair<VarSet, Rational>> weights;
};

// DC[N_n]: maximize sum of lambda_V over proper subsets V subject to
// sum_{V: X_i subset V, Y_i not subset V} lambda_V <= c_i per constraint.
// For simple instances this equals the polymatroid bound.
inline NormalBoundResult normal_bound_oracle(const Instance& inst, int cap = kDefaultOracleCap) {
    require_oracle_cap(inst, cap);
    if (!constraint_closure_reaches_full(inst))
        return {ExtRational::infinity(), {}};
    std::uint64_t N = std::uint64_t(1) << inst.n;
    LinearProgram lp;
    lp.sense = Sense::Maximize;
    for (std::uint64_t v = 0; v < N - 1; ++v) {
        int var = lp.add_variable(true);
        lp.add_objective_term(var, 1);
    }
    for (const auto& dc : inst.constraints) {
        std::vector<std::pair<int, Rational>> row;
        for (std::uint64_t v = 0; v < N - 1; ++v)
            if (dc.X.subset_of(VarSet(v)) && !dc.Y.subset_of(VarSet(v)))
                row.push_back({int(v), 1});
        lp.add_row(std::move(row), Relation::LessEq, dc.c);
    }
    LpOutcome out = solve(lp);
    if (out.status != LpStatus::Optimal)
        throw InternalError("oracle: normal LP expected optimal after closure check");
    NormalBoundResult result;
    result.bound = out.objective;
    for (std::uint64_t v = 0; v < N - 1; ++v)
        if (sign(out.assignment[int(v)]) != 0)
            result.weights.emplace_back(VarSet(v), out.assignment[int(v)]);
    return result;
}

struct ModularBoundResult {
    ExtRational bound;
    std::vector<Rational> weights;  // w_1..w_n, present iff finite
};

// DC[M_n]: maximize sum w_i subject to sum_{i in Y_j - X_j} w_i <= c_j.
// Polynomial size, no oracle cap.
inline ModularBoundResult modular_bound(const Instance& inst) {
    LinearProgram lp;
    lp.sense = Sense::Maximize;
    for (int v = 1; v <= inst.n; ++v) {
        int var = lp.add_variable(true);
        lp.add_objective_term(var, 1);
    }
    for (const auto& dc : inst.constraints) {
        std::vector<std::pair<int, Rational>> row;
        for (int v : dc.Y.minus(dc.X).members())
            row.push_back({v - 1, 1});
        lp.add_row(std::move(row), Relation::LessEq, dc.c);
    }
    LpOutcome out = solve(lp);
    if (out.status == LpStatus::Unbounded)
        return {ExtRational::infinity(), {}};
    if (out.status != LpStatus::Optimal)
        throw InternalError("oracle: modular LP infeasible");
    return {out.objective, out.assignment};
}

// The permutation relaxation behind the chain bound: every constraint keeps
// only the head variables that come after all of X in pi (cardinality
// constraints are unchanged); constraints whose head shrinks to X are
// dropped. The result may have no constraints left.
inline Instance chain_relax(const Instance& inst, const std::vector<int>& pi) {
    validate_permutation(inst, pi);
    std::vector<int> rank = permutation_ranks(pi);
    Instance relaxed;
    relaxed.n = inst.n;
    relaxed.names = inst.names;
    for (const auto& dc : inst.constraints) {
        int last_x = -1;
        for (int v : dc.X.members())
            last_x = std::max(last_x, rank[v]);
        VarSet head = dc.X;
        for (int v : dc.Y.minus(dc.X).members())
            if (rank[v] > last_x)
                head = head.with(v);
        if (head == dc.X)
            continue;
        relaxed.constraints.push_back({dc.X, head, dc.c});
    }
    return relaxed;
}

// DC_pi[Gamma_n]: the polymatroid bound of the chain-relaxed constraints.
inline ExtRational chain_bound_oracle(const Instance& inst, const std::vector<int>& pi,
                                      int cap = kDefaultOracleCap) {
    require_oracle_cap(inst, cap);
    Instance relaxed = chain_relax(inst, pi);
    if (relaxed.constraints.empty())
        return ExtRational::infinity();
    return polymatroid_bound_oracle(relaxed, cap).bound;
}

}  // namespace polybound
