#include "polybound/proof.hpp"

#include "polybound/dual_lift.hpp"
#include "polybound/oracle.hpp"
#include "support/fixtures.hpp"

#include <catch2/catch_amalgamated.hpp>

#include <fstream>
#include <random>
#include <sstream>

using namespace polybound;

namespace {

std::string read_golden(const std::string& name) {
    std::string path = std::string(POLYBOUND_SOURCE_DIR) + "/tests/golden/" + name;
    std::ifstream in(path, std::ios::binary);
    REQUIRE(in.good());
    std::ostringstream buffer;
    buffer << in.rdbuf();
    return buffer.str();
}

struct Generated {
    FlowSolution sol;
    PathDecomposition paths;
    std::vector<ProofStep> steps;
};

Generated generate_for(const Instance& inst) {
    auto result = solve_flow_lp(inst);
    REQUIRE(result.solution.has_value());
    AuxGraph g = build_aux_graph(inst);
    Generated out;
    out.sol = *result.solution;
    out.paths = decompose_flows(out.sol, g);
    out.steps = generate_proof(inst, out.sol, out.paths);
    return out;
}

}  // namespace

TEST_CASE("the published 12-step running-example sequence verifies") {
    std::string text = read_golden("run4.proof");
    ProofFile file = parse_proof(text);
    REQUIRE(file.n == 4);
    REQUIRE(file.steps.size() == 12);
    Instance inst = fixtures::run4();
    ProofVerdict verdict = verify_proof(inst, file.delta, file.steps);
    CHECK(verdict.accepted);
    CHECK(verdict.certified == ExtRational(Rational(3)));
    CHECK(verdict.final_target_coefficient == Rational(1));
    // bit-exact round trip
    CHECK(serialize_proof(file.n, file.delta, file.steps) == text);
}

TEST_CASE("generated proof for the running example certifies 3") {
    Instance inst = fixtures::run4();
    Generated gen = generate_for(inst);
    ProofVerdict verdict = verify_proof(inst, gen.sol.delta, gen.steps);
    CHECK(verdict.accepted);
    CHECK(verdict.certified == ExtRational(Rational(3)));
}

TEST_CASE("already-covering constraint needs no steps") {
    Instance inst = make_instance(3, {{VarSet::empty(), VarSet::full(3), Rational(2)}});
    // with delta = 1 the target term is present from the start
    ProofVerdict verdict = verify_proof(inst, {Rational(1)}, {});
    CHECK(verdict.accepted);
    CHECK(verdict.certified == ExtRational(Rational(2)));
    // and the generator emits a sequence that verifies (possibly empty)
    Generated gen = generate_for(inst);
    CHECK(verify_proof(inst, gen.sol.delta, gen.steps).accepted);
}

TEST_CASE("verifier rejects tampering") {
    std::string text = read_golden("run4.proof");
    ProofFile file = parse_proof(text);
    Instance inst = fixtures::run4();

    SECTION("weight inflation drives a coefficient negative") {
        file.steps[1].weight = Rational(2);
        ProofVerdict verdict = verify_proof(inst, file.delta, file.steps);
        CHECK_FALSE(verdict.accepted);
        CHECK(verdict.failed_step == 2);
    }
    SECTION("swapped step kind") {
        file.steps[4].kind = StepKind::Compose;  // was a decompose
        ProofVerdict verdict = verify_proof(inst, file.delta, file.steps);
        CHECK_FALSE(verdict.accepted);
        CHECK(verdict.failed_step > 0);
    }
    SECTION("broken subset relation") {
        file.steps[0].Z = VarSet::of({3});  // not between X and Y
        ProofVerdict verdict = verify_proof(inst, file.delta, file.steps);
        CHECK_FALSE(verdict.accepted);
        CHECK(verdict.failed_step == 1);
    }
    SECTION("incomparability broken on a submodularity step") {
        for (auto& step : file.steps)
            if (step.kind == StepKind::Submodularity) {
                step.J = step.I;
                break;
            }
        CHECK_FALSE(verify_proof(inst, file.delta, file.steps).accepted);
    }
    SECTION("nonpositive weight") {
        file.steps[0].weight = Rational(0);
        CHECK_FALSE(verify_proof(inst, file.delta, file.steps).accepted);
    }
    SECTION("truncated sequence leaves the target short") {
        file.steps.pop_back();
        ProofVerdict verdict = verify_proof(inst, file.delta, file.steps);
        CHECK_FALSE(verdict.accepted);
        CHECK(verdict.failed_step == 0);  // not step-specific
    }
}

TEST_CASE("verify_proof validates delta") {
    Instance inst = fixtures::run4();
    CHECK_THROWS_AS(verify_proof(inst, {Rational(1)}, {}), PreconditionError);
    CHECK_THROWS_AS(
        verify_proof(inst, {Rational(-1), Rational(0), Rational(0), Rational(0)}, {}),
        PreconditionError);
}

TEST_CASE("proof text parser rejects malformed input") {
    CHECK_THROWS_AS(parse_proof(""), ParseError);
    CHECK_THROWS_AS(parse_proof("nonsense w=1\n"), ParseError);
    CHECK_THROWS_AS(parse_proof("target={1,3} k=0 delta=\n"), ParseError);  // not a prefix
    CHECK_THROWS_AS(parse_proof("target={1} k=1 delta=1\nbadkind w=1 X={} Y={1}\n"),
                    ParseError);
    CHECK_THROWS_AS(parse_proof("target={1} k=1 delta=1\ncompose X={} Z={} Y={1}\n"),
                    ParseError);  // missing weight
    CHECK_THROWS_AS(parse_proof("target={1} k=1 delta=x\n"), ParseError);
}

TEST_CASE("random suite: generated proofs verify with bounded length") {
    std::mt19937_64 rng(6060);
    fixtures::RandomOptions opts;
    opts.min_n = 2;
    opts.max_n = 6;
    int generated = 0;
    for (int trial = 0; trial < 40; ++trial) {
        Instance inst = fixtures::random_instance(rng, opts);
        auto result = solve_flow_lp(inst);
        if (result.bound.is_infinite())
            continue;
        AuxGraph g = build_aux_graph(inst);
        PathDecomposition paths = decompose_flows(*result.solution, g);
        std::vector<ProofStep> steps = generate_proof(inst, *result.solution, paths);
        ProofVerdict verdict = verify_proof(inst, result.solution->delta, steps);
        CHECK(verdict.accepted);
        CHECK(verdict.certified == result.bound);
        long n = inst.n, k = inst.k();
        CHECK(long(steps.size()) <= 16 * (k + n) * k * n * n);
        ++generated;
    }
    CHECK(generated > 10);
}

TEST_CASE("lock step with the dual-witness construction") {
    // after every outer iteration, the bag coefficient of h(Y|{}) equals the
    // witness excess at Y and the coefficient of h(Y|X), X nonempty, equals
    // mu_{X,Y}
    std::mt19937_64 rng(7070);
    fixtures::RandomOptions opts;
    opts.min_n = 2;
    opts.max_n = 5;
    int compared = 0;
    for (int trial = 0; trial < 25; ++trial) {
        Instance inst = fixtures::random_instance(rng, opts);
        auto result = solve_flow_lp(inst);
        if (result.bound.is_infinite())
            continue;
        AuxGraph g = build_aux_graph(inst);
        PathDecomposition paths = decompose_flows(*result.solution, g);

        // replay the lift events into per-iteration mu/excess snapshots
        std::map<std::pair<VarSet, VarSet>, Rational> mu;
        std::map<VarSet, Rational> excess;
        for (int j = 1; j <= inst.k(); ++j) {
            const auto& dc = inst.constraint(j);
            excess[dc.Y] += result.solution->delta[j - 1];
            excess[dc.X] -= result.solution->delta[j - 1];
        }
        std::vector<std::map<std::pair<VarSet, VarSet>, Rational>> mu_at;
        std::vector<std::map<VarSet, Rational>> excess_at;
        std::vector<LiftEvent> pending;
        LiftOptions lopts;
        lopts.observer = [&](const LiftEvent& e) { pending.push_back(e); };
        lift(inst, *result.solution, paths, lopts);
        int upto = -1;
        auto flush_through = [&](int iteration) {
            // apply events with iteration in (upto, iteration]
            for (const auto& e : pending) {
                if (e.iteration <= upto || e.iteration > iteration)
                    continue;
                if (e.kind == LiftEvent::Kind::SigmaAdd) {
                    excess[e.a] -= e.amount;
                    excess[e.b] -= e.amount;
                    excess[e.a.intersect(e.b)] += e.amount;
                    excess[e.a.union_with(e.b)] += e.amount;
                } else {
                    Rational d =
                        e.kind == LiftEvent::Kind::MuSub ? Rational(-e.amount) : e.amount;
                    mu[{e.a, e.b}] += d;
                    excess[e.b] -= d;
                    excess[e.a] += d;
                }
            }
            upto = iteration;
        };
        flush_through(-1);  // init
        for (int i = 0; i < inst.n; ++i) {
            flush_through(i);
            mu_at.push_back(mu);
            excess_at.push_back(excess);
        }

        GenerateOptions gopts;
        int checked_iterations = 0;
        gopts.iteration_hook = [&](int iteration, const TermBag& bag) {
            const auto& want_mu = mu_at[iteration];
            const auto& want_excess = excess_at[iteration];
            // every nonzero bag term matches the witness side
            for (const auto& [term, coeff] : bag.entries()) {
                if (term.X.empty_set()) {
                    auto it = want_excess.find(term.Y);
                    Rational want = it == want_excess.end() ? Rational(0) : it->second;
                    CHECK(coeff == want);
                } else {
                    auto it = want_mu.find({term.X, term.Y});
                    Rational want = it == want_mu.end() ? Rational(0) : it->second;
                    CHECK(coeff == want);
                }
            }
            // and every nonzero witness entry appears in the bag
            for (const auto& [key, value] : want_mu) {
                if (sign(value) == 0 || key.first.empty_set())
                    continue;
                CHECK(bag.coeff({key.first, key.second}) == value);
            }
            for (const auto& [z, value] : want_excess) {
                if (sign(value) <= 0 || z.empty_set())
                    continue;
                CHECK(bag.coeff({VarSet::empty(), z}) == value);
            }
            ++checked_iterations;
        };
        generate_proof(inst, *result.solution, paths, gopts);
        CHECK(checked_iterations == inst.n);
        ++compared;
    }
    CHECK(compared > 8);
}
