#pragma once

// Shared fixtures: the small named instances the suite keeps coming back to,
// and the seeded random-instance generators.

#include "polybound/instance.hpp"
#include "polybound/oracle.hpp"
#include "polybound/rational.hpp"
#include "polybound/varset.hpp"

#include <random>
#include <vector>

namespace fixtures {

using namespace polybound;

// Four constraints over a,b,c,d (1..4): h(ab)<=1, h(bc)<=2, h(ac)<=1,
// h(ad|a)<=1. Simple, acyclic; every bound engine lands on 3.
inline Instance run4() {
    return make_instance(4,
                         {{VarSet::empty(), VarSet::of({1, 2}), Rational(1)},
                          {VarSet::empty(), VarSet::of({2, 3}), Rational(2)},
                          {VarSet::empty(), VarSet::of({1, 3}), Rational(1)},
                          {VarSet::of({1}), VarSet::of({1, 4}), Rational(1)}},
                         {"a", "b", "c", "d"});
}

// Triangle with unit cardinalities; every bound is 3/2.
inline Instance tri3() {
    return make_instance(3, {{VarSet::empty(), VarSet::of({1, 2}), Rational(1)},
                             {VarSet::empty(), VarSet::of({2, 3}), Rational(1)},
                             {VarSet::empty(), VarSet::of({1, 3}), Rational(1)}});
}

// Two variables, h(2)<=1 and h(12|2)<=1: polymatroid/flow value 2, while the
// chain bound under pi=(1,2) is unbounded.
inline Instance gap2() {
    return make_instance(2, {{VarSet::empty(), VarSet::of({2}), Rational(1)},
                             {VarSet::of({2}), VarSet::of({1, 2}), Rational(1)}});
}

struct RandomOptions {
    int min_n = 2, max_n = 6;
    int max_k = 6;
    bool simple_only = true;
    int max_tail = 2;          // |X| cap for general instances
    bool ensure_finite = false;
    long max_c_halves = 8;     // c drawn from {0, 1/2, ..., max/2}
};

inline VarSet random_subset(std::mt19937_64& rng, int n) {
    return VarSet(rng() & ((std::uint64_t(1) << n) - 1));
}

inline Instance random_instance(std::mt19937_64& rng, const RandomOptions& opts) {
    for (;;) {
        int n = opts.min_n + int(rng() % (opts.max_n - opts.min_n + 1));
        int k = 1 + int(rng() % opts.max_k);
        std::vector<DegreeConstraint> dcs;
        for (int i = 0; i < k; ++i) {
            VarSet X;
            if (opts.simple_only) {
                if (rng() % 2)
                    X = VarSet::singleton(1 + int(rng() % n));
            } else {
                X = random_subset(rng, n);
                while (X.size() > opts.max_tail)
                    X = X.without(X.min_member());
            }
            VarSet Y = X;
            while (Y == X)
                Y = X.union_with(random_subset(rng, n));
            dcs.push_back({X, Y, Rational(long(rng() % (opts.max_c_halves + 1)), 2)});
        }
        Instance inst = make_instance(n, std::move(dcs));
        if (opts.ensure_finite && !constraint_closure_reaches_full(inst)) {
            // top up with a covering cardinality constraint and re-check
            VarSet covered;
            for (const auto& dc : inst.constraints)
                covered = covered.union_with(dc.Y);
            VarSet rest = covered.complement(n);
            VarSet extra = rest.union_with(random_subset(rng, n));
            if (extra.empty_set())
                continue;
            inst.constraints.push_back(
                {VarSet::empty(), extra, Rational(long(1 + rng() % opts.max_c_halves), 2)});
            if (!constraint_closure_reaches_full(inst))
                continue;
        }
        return inst;
    }
}

inline std::vector<int> random_permutation(std::mt19937_64& rng, int n) {
    std::vector<int> pi = identity_permutation(n);
    for (int i = n - 1; i > 0; --i)
        std::swap(pi[i], pi[std::uniform_int_distribution<int>(0, i)(rng)]);
    return pi;
}

}  // namespace fixtures
