#include "polybound/reductions.hpp"

#include "polybound/oracle.hpp"
#include "support/fixtures.hpp"

#include <catch2/catch_amalgamated.hpp>

#include <random>

using namespace polybound;

namespace {

void check_trace_shape(const ReductionTrace& trace) {
    // the reduced instance is well-formed and the map covers its universe
    for (const auto& dc : trace.reduced.constraints) {
        CHECK(dc.X.proper_subset_of(dc.Y));
        CHECK(dc.Y.subset_of(VarSet::full(trace.reduced.n)));
        CHECK(sign(dc.c) >= 0);
    }
    CHECK(int(trace.variable_map.size()) == trace.reduced.n);
    for (int idx : trace.added_consistency) {
        REQUIRE(idx >= 1);
        REQUIRE(idx <= trace.reduced.k());
        CHECK(trace.reduced.constraint(idx).is_fd());
    }
}

}  // namespace

TEST_CASE("acyclic-plus-simple reduction of the running example") {
    Instance inst = fixtures::run4();
    ReductionTrace trace = reduce_acyclic_plus_simple(inst);
    check_trace_shape(trace);
    CHECK(trace.reduced.n == 8);
    // 2n two-variable FDs plus the rewritten constraints
    CHECK(trace.reduced.k() == 8 + 4);
    for (int i = 1; i <= trace.reduced.k(); ++i) {
        const auto& dc = trace.reduced.constraint(i);
        bool fd_pair = dc.is_fd() && dc.Y.size() == 2 && dc.X.size() == 1;
        bool x_to_y = true;
        for (int v : dc.X.members())
            x_to_y = x_to_y && v <= 4;
        for (int v : dc.Y.minus(dc.X).members())
            x_to_y = x_to_y && v > 4;
        CHECK((fd_pair || x_to_y));
    }
    // the rewritten family alone is acyclic
    std::vector<DegreeConstraint> rewritten(trace.reduced.constraints.begin() + 8,
                                            trace.reduced.constraints.end());
    CHECK(classify(make_instance(8, rewritten)).is_acyclic);
    // bound preserved
    CHECK(polymatroid_bound_oracle(trace.reduced).bound == ExtRational(Rational(3)));
}

TEST_CASE("acyclic-plus-simple preserves the bound on random instances") {
    std::mt19937_64 rng(515);
    fixtures::RandomOptions opts;
    opts.min_n = 1;
    opts.max_n = 4;
    opts.max_k = 3;
    opts.simple_only = false;
    for (int trial = 0; trial < 12; ++trial) {
        Instance inst = fixtures::random_instance(rng, opts);
        ReductionTrace trace = reduce_acyclic_plus_simple(inst);
        check_trace_shape(trace);
        CHECK(polymatroid_bound_oracle(trace.reduced).bound ==
              polymatroid_bound_oracle(inst).bound);
    }
}

TEST_CASE("k=1 n=1 edge case of the split reduction") {
    Instance inst = make_instance(1, {{VarSet::empty(), VarSet::of({1}), Rational(3, 2)}});
    ReductionTrace trace = reduce_acyclic_plus_simple(inst);
    CHECK(trace.reduced.n == 2);
    CHECK(trace.reduced.k() == 3);  // two FDs + one rewritten constraint
    CHECK(polymatroid_bound_oracle(trace.reduced).bound == ExtRational(Rational(3, 2)));
}

TEST_CASE("two-three reduction postconditions") {
    // a single wide cardinality constraint
    Instance wide = make_instance(4, {{VarSet::empty(), VarSet::full(4), Rational(2)}});
    ReductionTrace trace = reduce_two_three(wide);
    check_trace_shape(trace);
    for (const auto& dc : trace.reduced.constraints) {
        CHECK(dc.X.size() <= 2);
        CHECK(dc.Y.size() <= 3);
        if (dc.Y.size() == 3) {
            CHECK(dc.X.size() == 2);
            CHECK(dc.is_fd());
        }
        if (dc.Y.size() == 2)
            CHECK(dc.X.size() == 1);
    }
    CHECK(polymatroid_bound_oracle(trace.reduced).bound == ExtRational(Rational(2)));

    // a non-simple pair
    Instance pair = make_instance(3, {{VarSet::of({1, 2}), VarSet::full(3), Rational(1)},
                                      {VarSet::empty(), VarSet::of({1, 2}), Rational(1)}});
    ReductionTrace trace2 = reduce_two_three(pair);
    check_trace_shape(trace2);
    CHECK(polymatroid_bound_oracle(trace2.reduced).bound ==
          polymatroid_bound_oracle(pair).bound);
    CHECK(polymatroid_bound_oracle(pair).bound == ExtRational(Rational(2)));
}

TEST_CASE("two-three on an already conforming instance is the identity") {
    Instance inst = make_instance(3, {{VarSet::of({1}), VarSet::of({1, 2}), Rational(1)},
                                      {VarSet::empty(), VarSet::of({3}), Rational(1)}});
    ReductionTrace trace = reduce_two_three(inst);
    CHECK(trace.iterations == 0);
    CHECK(trace.reduced.n == inst.n);
    CHECK(trace.reduced.k() == inst.k());
}

TEST_CASE("two-three preserves the bound on random instances") {
    std::mt19937_64 rng(626);
    fixtures::RandomOptions opts;
    opts.min_n = 2;
    opts.max_n = 4;
    opts.max_k = 2;
    opts.simple_only = false;
    for (int trial = 0; trial < 12; ++trial) {
        Instance inst = fixtures::random_instance(rng, opts);
        ReductionTrace trace = reduce_two_three(inst);
        check_trace_shape(trace);
        CHECK(trace.iterations <= 2 * inst.n * inst.k());
        if (trace.reduced.n > 9)
            continue;
        CHECK(polymatroid_bound_oracle(trace.reduced).bound ==
              polymatroid_bound_oracle(inst).bound);
    }
}

TEST_CASE("simple-plus-fd reduction") {
    Instance inst = make_instance(3, {{VarSet::of({1, 2}), VarSet::full(3), Rational(1)},
                                      {VarSet::empty(), VarSet::of({1, 2}), Rational(1)}});
    ReductionTrace trace = reduce_simple_plus_fd(inst);
    check_trace_shape(trace);
    for (const auto& dc : trace.reduced.constraints)
        CHECK((dc.is_simple() || dc.is_fd()));
    CHECK(polymatroid_bound_oracle(trace.reduced).bound ==
          polymatroid_bound_oracle(inst).bound);

    // |X| = 3 requires a chain of two merges
    Instance deep = make_instance(4, {{VarSet::of({1, 2, 3}), VarSet::full(4), Rational(1)},
                                      {VarSet::empty(), VarSet::of({1, 2, 3}), Rational(1)}});
    ReductionTrace chain = reduce_simple_plus_fd(deep);
    CHECK(chain.iterations == 2);
    for (const auto& dc : chain.reduced.constraints)
        CHECK((dc.is_simple() || dc.is_fd()));
    CHECK(polymatroid_bound_oracle(chain.reduced).bound ==
          polymatroid_bound_oracle(deep).bound);

    // already simple: identity
    ReductionTrace same = reduce_simple_plus_fd(fixtures::run4());
    CHECK(same.iterations == 0);
    CHECK(same.reduced.n == 4);
}

TEST_CASE("simple-plus-fd preserves the bound on random instances") {
    std::mt19937_64 rng(737);
    fixtures::RandomOptions opts;
    opts.min_n = 2;
    opts.max_n = 4;
    opts.max_k = 3;
    opts.simple_only = false;
    for (int trial = 0; trial < 12; ++trial) {
        Instance inst = fixtures::random_instance(rng, opts);
        ReductionTrace trace = reduce_simple_plus_fd(inst);
        check_trace_shape(trace);
        for (const auto& dc : trace.reduced.constraints)
            CHECK((dc.is_simple() || dc.is_fd()));
        if (trace.reduced.n > 9)
            continue;
        CHECK(polymatroid_bound_oracle(trace.reduced).bound ==
              polymatroid_bound_oracle(inst).bound);
    }
}
