#include "polybound/flow.hpp"

#include "polybound/oracle.hpp"
#include "support/fixtures.hpp"

#include <catch2/catch_amalgamated.hpp>

#include <random>

using namespace polybound;

TEST_CASE("auxiliary graph for the running example") {
    Instance inst = fixtures::run4();
    AuxGraph g = build_aux_graph(inst);
    // empty, four singletons, and the four heads ab, bc, ac, ad
    REQUIRE(g.vertices.size() == 9);
    CHECK(g.vertices[0] == VarSet::empty());
    REQUIRE(g.degree_edges.size() == 4);
    CHECK(g.degree_edges[0].from == g.vertex_id(VarSet::empty()));
    CHECK(g.degree_edges[0].to == g.vertex_id(VarSet::of({1, 2})));
    CHECK(g.degree_edges[3].from == g.vertex_id(VarSet::of({1})));
    CHECK(g.degree_edges[3].to == g.vertex_id(VarSet::of({1, 4})));
    // mu edges point strictly downward
    for (const auto& e : g.mu_edges)
        CHECK(g.vertices[e.to].proper_subset_of(g.vertices[e.from]));
    // heads have mu edges to each contained singleton and the empty set
    int from_ab = 0;
    for (const auto& e : g.mu_edges)
        if (g.vertices[e.from] == VarSet::of({1, 2}))
            ++from_ab;
    CHECK(from_ab == 3);  // {} {1} {2}
}

TEST_CASE("auxiliary graph rejects non-simple instances") {
    Instance nonsimple =
        make_instance(3, {{VarSet::of({1, 2}), VarSet::full(3), Rational(1)}});
    CHECK_THROWS_AS(build_aux_graph(nonsimple), PreconditionError);
    CHECK_THROWS_AS(solve_flow_lp(nonsimple), PreconditionError);
}

TEST_CASE("single constraint graph at n=1") {
    Instance inst = make_instance(1, {{VarSet::empty(), VarSet::of({1}), Rational(1)}});
    AuxGraph g = build_aux_graph(inst);
    REQUIRE(g.vertices.size() == 2);
    REQUIRE(g.degree_edges.size() == 1);
    REQUIRE(g.mu_edges.size() == 1);  // {1} -> {}
    CHECK(solve_flow_lp(inst).bound == ExtRational(Rational(1)));
}

TEST_CASE("flow LP on the running example") {
    Instance inst = fixtures::run4();
    auto result = solve_flow_lp(inst);
    CHECK(result.bound == ExtRational(Rational(3)));
    REQUIRE(result.solution.has_value());
    AuxGraph g = build_aux_graph(inst);
    CHECK(check_flow_solution(inst, g, *result.solution).empty());
    // an optimal point with support {1,3,4} exists: pin delta_2 = 0
    auto pinned = solve_flow_lp(inst, {2});
    CHECK(pinned.bound == ExtRational(Rational(3)));
}

TEST_CASE("flow LP edge cases") {
    // both sinks served through one edge
    Instance both = make_instance(2, {{VarSet::empty(), VarSet::of({1, 2}), Rational(5, 2)}});
    CHECK(solve_flow_lp(both).bound == ExtRational(Rational(5, 2)));
    // sink 2 unreachable
    Instance unreachable =
        make_instance(2, {{VarSet::empty(), VarSet::of({1}), Rational(1)}});
    auto result = solve_flow_lp(unreachable);
    CHECK(result.bound == ExtRational::infinity());
    CHECK_FALSE(result.solution.has_value());
}

TEST_CASE("flow LP equals the polymatroid oracle on random simple instances") {
    std::mt19937_64 rng(101);
    fixtures::RandomOptions opts;
    opts.min_n = 2;
    opts.max_n = 6;
    for (int trial = 0; trial < 60; ++trial) {
        Instance inst = fixtures::random_instance(rng, opts);
        CHECK(solve_flow_lp(inst).bound == polymatroid_bound_oracle(inst).bound);
    }
}

TEST_CASE("path decomposition of the running example") {
    Instance inst = fixtures::run4();
    auto result = solve_flow_lp(inst);
    AuxGraph g = build_aux_graph(inst);
    PathDecomposition paths = decompose_flows(*result.solution, g);
    REQUIRE(paths.per_sink.size() == 4);
    for (int t = 1; t <= 4; ++t) {
        Rational total = 0;
        for (const auto& p : paths.per_sink[t - 1]) {
            total += p.value;
            CHECK(sign(p.value) > 0);
            // starts at the source, ends at the sink, simple
            CHECK(g.vertices[p.vertices.front()] == VarSet::empty());
            CHECK(g.vertices[p.vertices.back()] == VarSet::singleton(t));
            std::vector<int> sorted = p.vertices;
            std::sort(sorted.begin(), sorted.end());
            CHECK(std::adjacent_find(sorted.begin(), sorted.end()) == sorted.end());
        }
        CHECK(total == Rational(1));
        // path count is bounded by the edge count
        CHECK(paths.per_sink[t - 1].size() <= g.degree_edges.size() + g.mu_edges.size());
    }
}

TEST_CASE("decomposition reproduces the cycle-cancelled flow exactly") {
    std::mt19937_64 rng(202);
    fixtures::RandomOptions opts;
    opts.min_n = 2;
    opts.max_n = 5;
    for (int trial = 0; trial < 25; ++trial) {
        Instance inst = fixtures::random_instance(rng, opts);
        auto result = solve_flow_lp(inst);
        if (result.bound.is_infinite())
            continue;
        AuxGraph g = build_aux_graph(inst);
        PathDecomposition paths = decompose_flows(*result.solution, g);
        for (int t = 1; t <= inst.n; ++t) {
            // recomposition must satisfy the same excess equations (cycle
            // cancellation never changes excess), with flows <= the LP's
            auto f = paths.degree_flow(t, inst.k());
            auto mu = paths.mu_flow(t, int(g.mu_edges.size()));
            FlowSolution recomposed = *result.solution;
            recomposed.f[t - 1] = f;
            recomposed.mu[t - 1] = mu;
            for (size_t v = 0; v < g.vertices.size(); ++v) {
                Rational want = 0;
                if (g.vertices[v] == VarSet::singleton(t))
                    want = 1;
                else if (g.vertices[v].empty_set())
                    want = -1;
                CHECK(flow_excess(g, recomposed, t, int(v)) == want);
            }
            for (int i = 0; i < inst.k(); ++i)
                CHECK(f[i] <= result.solution->f[t - 1][i]);
        }
    }
}

TEST_CASE("half-and-half split decomposes into two paths") {
    // two parallel two-edge routes, each carrying 1/2
    Instance inst = make_instance(2, {{VarSet::empty(), VarSet::of({1, 2}), Rational(1)},
                                      {VarSet::empty(), VarSet::of({1}), Rational(1)}});
    AuxGraph g = build_aux_graph(inst);
    FlowSolution sol;
    sol.delta = {Rational(1, 2), Rational(1, 2)};
    sol.f.assign(2, std::vector<Rational>(2, Rational(0)));
    sol.mu.assign(2, std::vector<Rational>(g.mu_edges.size(), Rational(0)));
    auto mu_index = [&](VarSet from, VarSet to) {
        for (size_t m = 0; m < g.mu_edges.size(); ++m)
            if (g.vertices[g.mu_edges[m].from] == from && g.vertices[g.mu_edges[m].to] == to)
                return int(m);
        FAIL("mu edge not found");
        return -1;
    };
    // sink 1: 1/2 via {1,2} -> {1}, 1/2 directly via constraint 2
    sol.f[0][0] = Rational(1, 2);
    sol.f[0][1] = Rational(1, 2);
    sol.mu[0][mu_index(VarSet::of({1, 2}), VarSet::of({1}))] = Rational(1, 2);
    // sink 2: unit flow via constraint 1 (delta_1 = 1/2 is exceeded; raise it)
    sol.delta[0] = Rational(1);
    sol.f[1][0] = Rational(1);
    sol.mu[1][mu_index(VarSet::of({1, 2}), VarSet::of({2}))] = Rational(1);
    sol.objective = Rational(3, 2);

    PathDecomposition paths = decompose_flows(sol, g);
    REQUIRE(paths.per_sink[0].size() == 2);
    CHECK(paths.per_sink[0][0].value == Rational(1, 2));
    CHECK(paths.per_sink[0][1].value == Rational(1, 2));
    REQUIRE(paths.per_sink[1].size() == 1);
    CHECK(paths.per_sink[1][0].value == Rational(1));
}

TEST_CASE("decomposition rejects a broken flow naming the vertex") {
    Instance inst = make_instance(2, {{VarSet::empty(), VarSet::of({1, 2}), Rational(1)}});
    AuxGraph g = build_aux_graph(inst);
    FlowSolution sol;
    sol.delta = {Rational(1)};
    sol.f.assign(2, std::vector<Rational>(1, Rational(0)));
    sol.mu.assign(2, std::vector<Rational>(g.mu_edges.size(), Rational(0)));
    // sink 1 gets no flow at all: excess at {1} is 0, not 1
    CHECK_THROWS_WITH(decompose_flows(sol, g),
                      Catch::Matchers::ContainsSubstring("{1}"));
}

TEST_CASE("min-cut certificates") {
    Instance inst = fixtures::run4();
    auto result = solve_flow_lp(inst);
    REQUIRE(result.solution.has_value());

    // the optimal capacities are feasible for every sink
    auto feasible = min_cut_certificate(inst, result.solution->delta);
    CHECK(feasible.all_feasible);

    // scaling below the optimum must break some sink with a certified cut
    std::vector<Rational> scaled = result.solution->delta;
    for (auto& d : scaled)
        d *= Rational(9, 10);
    auto violated = min_cut_certificate(inst, scaled);
    CHECK_FALSE(violated.all_feasible);
    for (const auto& entry : violated.sinks) {
        if (entry.feasible)
            continue;
        // the returned set is a genuinely violated cut-LP row
        Rational row = 0;
        for (int i = 1; i <= inst.k(); ++i) {
            const auto& dc = inst.constraint(i);
            if (dc.X.subset_of(entry.violated_set) && !dc.Y.subset_of(entry.violated_set))
                row += scaled[i - 1];
        }
        CHECK(row == entry.row_sum);
        CHECK(row < Rational(1));
    }

    // zero capacity: every sink is violated with the empty set
    std::vector<Rational> zero(inst.k(), Rational(0));
    auto all_zero = min_cut_certificate(inst, zero);
    CHECK_FALSE(all_zero.all_feasible);
    for (const auto& entry : all_zero.sinks) {
        CHECK_FALSE(entry.feasible);
        CHECK(entry.row_sum == Rational(0));
    }
}

TEST_CASE("min-cut certificate validates input") {
    Instance inst = fixtures::run4();
    CHECK_THROWS_AS(min_cut_certificate(inst, {Rational(1)}), PreconditionError);
    CHECK_THROWS_AS(min_cut_certificate(inst, {Rational(-1), Rational(0), Rational(0),
                                               Rational(0)}),
                    PreconditionError);
}
