// Command-line front end: parse instance files, dispatch to the bound
// engines, and emit JSON reports (one document on stdout; --pretty switches
// to a human-readable table). Exit codes: 0 success, 2 parse/file error,
// 3 precondition error, 4 internal fault.

#include "polybound/polybound.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <chrono>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

using nlohmann::json;
using namespace polybound;

namespace {

std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in)
        throw ParseError("cannot open file: " + path);
    std::ostringstream buffer;
    buffer << in.rdbuf();
    return buffer.str();
}

Instance load_instance(const std::string& path) {
    return parse_instance_json(read_file(path));
}

int oracle_cap_from_env() {
    const char* cap = std::getenv("POLYBOUND_ORACLE_CAP");
    if (!cap)
        return kDefaultOracleCap;
    try {
        int value = std::stoi(cap);
        if (value < 1 || value > kMaxVariables)
            throw std::out_of_range("cap");
        return value;
    } catch (const std::exception&) {
        throw ParseError("POLYBOUND_ORACLE_CAP must be an integer in 1.." +
                         std::to_string(kMaxVariables));
    }
}

json instance_summary(const Instance& inst) {
    ClassificationReport report = classify(inst);
    json j;
    j["n"] = inst.n;
    j["k"] = inst.k();
    j["simple"] = report.is_simple;
    j["cardinality_only"] = report.is_cardinality_only;
    j["acyclic"] = report.is_acyclic;
    return j;
}

// Permutations are given as comma-separated variable names or 1-based indices.
std::vector<int> parse_permutation(const Instance& inst, const std::string& text) {
    std::vector<int> pi;
    std::istringstream in(text);
    std::string item;
    while (std::getline(in, item, ',')) {
        int v = 0;
        try {
            size_t pos = 0;
            v = std::stoi(item, &pos);
            if (pos != item.size())
                v = 0;
        } catch (const std::exception&) {
            v = 0;
        }
        if (v == 0) {
            for (int u = 1; u <= inst.n && v == 0; ++u)
                if (inst.var_name(u) == item)
                    v = u;
            if (v == 0)
                throw PreconditionError("permutation: unknown variable \"" + item + "\"");
        }
        pi.push_back(v);
    }
    validate_permutation(inst, pi);
    return pi;
}

json permutation_to_json(const Instance& inst, const std::vector<int>& pi) {
    json arr = json::array();
    for (int v : pi)
        arr.push_back(inst.names.empty() ? json(v) : json(inst.var_name(v)));
    return arr;
}

json flow_solution_to_json(const Instance& inst, const AuxGraph& g, const FlowSolution& sol) {
    json delta = json::object();
    for (int i = 1; i <= inst.k(); ++i)
        delta[std::to_string(i)] = to_string(sol.delta[i - 1]);
    json flows = json::object();
    for (int t = 1; t <= inst.n; ++t) {
        json per = json::object();
        for (int i = 1; i <= inst.k(); ++i)
            if (sign(sol.f[t - 1][i - 1]) != 0)
                per["dc:" + std::to_string(i)] = to_string(sol.f[t - 1][i - 1]);
        for (size_t m = 0; m < g.mu_edges.size(); ++m)
            if (sign(sol.mu[t - 1][m]) != 0) {
                std::string key = "mu:" + g.vertices[g.mu_edges[m].from].to_string() + "->" +
                                  g.vertices[g.mu_edges[m].to].to_string();
                per[key] = to_string(sol.mu[t - 1][m]);
            }
        flows[std::to_string(t)] = per;
    }
    return json{{"delta", delta}, {"flows", flows}, {"objective", to_string(sol.objective)}};
}

json varset_list(VarSet s) {
    json arr = json::array();
    for (int v : s.members())
        arr.push_back(v);
    return arr;
}

json witness_to_json(const DualWitness& w) {
    json j;
    j["delta"] = json::array();
    for (const auto& d : w.delta)
        j["delta"].push_back(to_string(d));
    j["mu"] = json::array();
    for (const auto& [key, value] : w.mu)
        j["mu"].push_back(
            {{"X", varset_list(key.first)}, {"Y", varset_list(key.second)},
             {"value", to_string(value)}});
    j["sigma"] = json::array();
    for (const auto& [key, value] : w.sigma)
        j["sigma"].push_back(
            {{"I", varset_list(key.first)}, {"J", varset_list(key.second)},
             {"value", to_string(value)}});
    j["objective"] = to_string(w.objective);
    return j;
}

struct Timer {
    std::chrono::steady_clock::time_point start = std::chrono::steady_clock::now();
    double ms() const {
        return std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() -
                                                         start)
            .count();
    }
};

void emit(const json& doc, bool pretty_json) {
    std::cout << doc.dump(pretty_json ? 2 : -1) << "\n";
}

// --- bound ----------------------------------------------------------------

int run_bound(const std::string& file, const std::string& kind, const std::string& pi_text,
              bool all_pi, bool multi_source, bool with_artifacts, bool pretty) {
    Instance inst = load_instance(file);
    int cap = oracle_cap_from_env();
    Timer timer;
    json report;
    report["instance"] = instance_summary(inst);
    report["kind"] = kind;

    auto pi_or_suggested = [&]() -> std::pair<std::vector<int>, std::string> {
        if (!pi_text.empty())
            return {parse_permutation(inst, pi_text), "given"};
        SuggestedPermutation s = suggest_permutation(inst);
        return {s.pi, permutation_reason_name(s.reason)};
    };
    auto sweep = [&](auto&& evaluate) {
        if (inst.n > 7)
            throw PreconditionError("--all-pi is limited to n <= 7");
        std::vector<int> pi = identity_permutation(inst.n);
        std::optional<ExtRational> best;
        std::vector<int> best_pi;
        do {
            ExtRational value = evaluate(pi);
            if (!best || value < *best) {
                best = value;
                best_pi = pi;
            }
        } while (std::next_permutation(pi.begin(), pi.end()));
        report["value"] = best->to_string();
        report["pi"] = permutation_to_json(inst, best_pi);
        report["pi_source"] = "all-pi sweep";
    };

    if (kind == "flow-simple") {
        FlowBoundResult result = solve_flow_lp(inst);
        report["value"] = result.bound.to_string();
        if (result.solution) {
            json delta = json::object();
            for (int i = 1; i <= inst.k(); ++i)
                delta[std::to_string(i)] = to_string(result.solution->delta[i - 1]);
            report["delta"] = delta;
            if (with_artifacts) {
                AuxGraph g = build_aux_graph(inst);
                report["solution"] = flow_solution_to_json(inst, g, *result.solution);
            }
        }
    } else if (kind == "oracle") {
        PolymatroidBoundResult result = polymatroid_bound_oracle(inst, cap);
        report["value"] = result.bound.to_string();
        if (with_artifacts && result.witness) {
            json values = json::object();
            for (std::uint64_t m = 0; m < result.witness->values.size(); ++m)
                values[VarSet(m).to_string()] = to_string(result.witness->values[m]);
            report["witness"] = values;
        }
    } else if (kind == "normal") {
        NormalBoundResult result = normal_bound_oracle(inst, cap);
        report["value"] = result.bound.to_string();
        json weights = json::object();
        for (const auto& [set, weight] : result.weights)
            weights[set.to_string()] = to_string(weight);
        report["weights"] = weights;
    } else if (kind == "modular") {
        ModularBoundResult result = modular_bound(inst);
        report["value"] = result.bound.to_string();
        if (result.bound.is_finite()) {
            json weights = json::array();
            for (const auto& w : result.weights)
                weights.push_back(to_string(w));
            report["weights"] = weights;
        }
    } else if (kind == "chain") {
        if (all_pi) {
            sweep([&](const std::vector<int>& pi) { return chain_bound_oracle(inst, pi, cap); });
        } else {
            auto [pi, source] = pi_or_suggested();
            report["value"] = chain_bound_oracle(inst, pi, cap).to_string();
            report["pi"] = permutation_to_json(inst, pi);
            report["pi_source"] = source;
        }
    } else if (kind == "flow") {
        FlowBoundOptions opts;
        opts.multi_source = multi_source;
        if (all_pi) {
            sweep([&](const std::vector<int>& pi) { return flow_bound(inst, pi, opts); });
        } else {
            auto [pi, source] = pi_or_suggested();
            report["value"] = flow_bound(inst, pi, opts).to_string();
            report["pi"] = permutation_to_json(inst, pi);
            report["pi_source"] = source;
        }
    } else {
        throw PreconditionError("unknown bound kind: " + kind);
    }

    report["timing_ms"] = timer.ms();
    if (pretty) {
        std::cout << "instance : " << file << "  (n=" << inst.n << ", k=" << inst.k() << ")\n"
                  << "kind     : " << kind << "\n"
                  << "value    : " << report["value"].get<std::string>() << "\n";
        if (report.contains("pi"))
            std::cout << "pi       : " << report["pi"].dump() << "\n";
        return 0;
    }
    emit(report, false);
    return 0;
}

// --- proof / verify ---------------------------------------------------------

int run_proof(const std::string& file, const std::string& out_path, bool pretty) {
    Instance inst = load_instance(file);
    Timer timer;
    FlowBoundResult result = solve_flow_lp(inst);
    if (result.bound.is_infinite())
        throw PreconditionError("proof: the bound is unbounded; no finite certificate exists");
    AuxGraph g = build_aux_graph(inst);
    PathDecomposition paths = decompose_flows(*result.solution, g);
    std::vector<ProofStep> steps = generate_proof(inst, *result.solution, paths);
    std::string text = serialize_proof(inst.n, result.solution->delta, steps);
    {
        std::ofstream out(out_path, std::ios::binary);
        if (!out)
            throw ParseError("cannot write proof file: " + out_path);
        out << text;
    }
    ProofVerdict verdict = verify_proof(inst, result.solution->delta, steps);
    if (!verdict.accepted)
        throw InternalError("proof: generated sequence failed verification: " + verdict.reason);

    json report;
    report["instance"] = instance_summary(inst);
    report["value"] = result.bound.to_string();
    report["length"] = steps.size();
    report["proof_file"] = out_path;
    report["timing_ms"] = timer.ms();
    if (pretty) {
        std::cout << "certified value : " << result.bound.to_string() << "\n"
                  << "steps           : " << steps.size() << "\n"
                  << "written to      : " << out_path << "\n";
        return 0;
    }
    emit(report, false);
    return 0;
}

int run_verify(const std::string& file, const std::string& proof_path, bool pretty) {
    Instance inst = load_instance(file);
    ProofFile proof = parse_proof(read_file(proof_path));
    if (proof.n != inst.n)
        throw PreconditionError("verify: proof targets n=" + std::to_string(proof.n) +
                                " but the instance has n=" + std::to_string(inst.n));
    if (int(proof.delta.size()) != inst.k())
        throw PreconditionError("verify: proof has " + std::to_string(proof.delta.size()) +
                                " delta entries but the instance has k=" +
                                std::to_string(inst.k()));
    ProofVerdict verdict = verify_proof(inst, proof.delta, proof.steps);
    json report;
    report["instance"] = instance_summary(inst);
    report["accepted"] = verdict.accepted;
    if (verdict.accepted) {
        report["certified"] = verdict.certified.to_string();
    } else {
        report["reason"] = verdict.reason;
        if (verdict.failed_step > 0)
            report["failed_step"] = verdict.failed_step;
    }
    if (pretty) {
        std::cout << (verdict.accepted ? "accepted, certified value " +
                                             verdict.certified.to_string()
                                       : "REJECTED: " + verdict.reason)
                  << "\n";
        return 0;
    }
    emit(report, false);
    return 0;
}

// --- compare ----------------------------------------------------------------

int run_compare(const std::string& file, const std::string& pi_text, bool multi_source,
                bool pretty) {
    Instance inst = load_instance(file);
    int cap = oracle_cap_from_env();
    require_oracle_cap(inst, cap);
    Timer timer;
    ClassificationReport cls = classify(inst);

    std::vector<int> pi;
    std::string pi_source;
    if (!pi_text.empty()) {
        pi = parse_permutation(inst, pi_text);
        pi_source = "given";
    } else {
        SuggestedPermutation s = suggest_permutation(inst);
        pi = s.pi;
        pi_source = permutation_reason_name(s.reason);
    }

    ExtRational mod = modular_bound(inst).bound;
    ExtRational normal = normal_bound_oracle(inst, cap).bound;
    ExtRational poly = polymatroid_bound_oracle(inst, cap).bound;
    ExtRational chain = chain_bound_oracle(inst, pi, cap);
    FlowBoundOptions fopts;
    fopts.multi_source = multi_source;
    ExtRational flow = flow_bound(inst, pi, fopts);
    std::optional<ExtRational> flow_simple;
    if (cls.is_simple)
        flow_simple = solve_flow_lp(inst).bound;

    json bounds;
    bounds["modular"] = mod.to_string();
    bounds["normal"] = normal.to_string();
    bounds["polymatroid_oracle"] = poly.to_string();
    bounds["chain"] = chain.to_string();
    bounds["flow_bound"] = flow.to_string();
    if (flow_simple)
        bounds["flow_simple"] = flow_simple->to_string();

    json checks;
    checks["modular<=normal"] = mod <= normal;
    checks["normal<=polymatroid"] = normal <= poly;
    checks["polymatroid<=chain"] = poly <= chain;
    checks["polymatroid<=flow_bound"] = poly <= flow;
    checks["flow_bound<=chain"] = flow <= chain;
    if (flow_simple)
        checks["flow_simple==polymatroid"] = *flow_simple == poly;
    bool sandwich = true;
    for (const auto& [key, ok] : checks.items())
        sandwich = sandwich && ok.get<bool>();

    json report;
    report["instance"] = instance_summary(inst);
    report["pi"] = permutation_to_json(inst, pi);
    report["pi_source"] = pi_source;
    report["bounds"] = bounds;
    report["checks"] = checks;
    report["sandwich"] = sandwich;
    if (chain.is_infinite() && flow.is_finite())
        report["ratio_flag"] = "unbounded-gap";
    report["timing_ms"] = timer.ms();

    if (pretty) {
        std::cout << "bound comparison (pi " << report["pi"].dump() << ", " << pi_source
                  << ")\n";
        for (const auto& [key, value] : bounds.items())
            std::cout << "  " << key << std::string(key.size() < 20 ? 20 - key.size() : 1, ' ')
                      << value.get<std::string>() << "\n";
        std::cout << "sandwich: " << (sandwich ? "pass" : "FAIL") << "\n";
        if (report.contains("ratio_flag"))
            std::cout << "flag    : unbounded-gap\n";
        return 0;
    }
    emit(report, false);
    return 0;
}

// --- reduce -----------------------------------------------------------------

int run_reduce(const std::string& file, const std::string& mode, bool check, bool pretty) {
    Instance inst = load_instance(file);
    int cap = oracle_cap_from_env();
    Timer timer;
    ReductionTrace trace;
    if (mode == "acyclic-simple")
        trace = reduce_acyclic_plus_simple(inst);
    else if (mode == "two-three")
        trace = reduce_two_three(inst);
    else if (mode == "simple-fd")
        trace = reduce_simple_plus_fd(inst);
    else
        throw PreconditionError("unknown reduction mode: " + mode);

    json report;
    report["instance"] = instance_summary(inst);
    report["mode"] = mode;
    report["original"] = instance_to_json(trace.original);
    report["reduced"] = instance_to_json(trace.reduced);
    report["iterations"] = trace.iterations;
    report["added_consistency"] = trace.added_consistency;
    json vmap = json::array();
    for (const auto& origin : trace.variable_map)
        vmap.push_back(
            {{"var", origin.var}, {"role", origin.role}, {"sources", origin.sources}});
    report["variable_map"] = vmap;

    if (check) {
        if (trace.reduced.n > cap) {
            report["check"] = "refused: reduced n=" + std::to_string(trace.reduced.n) +
                              " exceeds the oracle cap " + std::to_string(cap);
        } else {
            ExtRational before = polymatroid_bound_oracle(inst, cap).bound;
            ExtRational after = polymatroid_bound_oracle(trace.reduced, cap).bound;
            report["check"] = json{{"original_bound", before.to_string()},
                                   {"reduced_bound", after.to_string()},
                                   {"equal", before == after}};
            if (before != after)
                throw InternalError("reduce: bound changed from " + before.to_string() +
                                    " to " + after.to_string());
        }
    }
    report["timing_ms"] = timer.ms();
    if (pretty) {
        std::cout << "mode      : " << mode << "\n"
                  << "universe  : " << inst.n << " -> " << trace.reduced.n << "\n"
                  << "constraints: " << inst.k() << " -> " << trace.reduced.k() << "\n"
                  << "iterations: " << trace.iterations << "\n";
        if (report.contains("check"))
            std::cout << "check     : " << report["check"].dump() << "\n";
        return 0;
    }
    emit(report, false);
    return 0;
}

// --- classify ----------------------------------------------------------------

int run_classify(const std::string& file, bool pretty) {
    Instance inst = load_instance(file);
    ClassificationReport report = classify(inst);
    json j;
    j["instance"] = instance_summary(inst);
    json tags = json::array();
    for (size_t i = 0; i < report.per_constraint.size(); ++i) {
        const auto& tag = report.per_constraint[i];
        tags.push_back({{"index", i + 1},
                        {"simple", tag.simple},
                        {"cardinality", tag.cardinality},
                        {"fd", tag.fd}});
    }
    j["per_constraint"] = tags;
    auto topo = topological_permutation(inst);
    if (topo)
        j["topological_pi"] = permutation_to_json(inst, *topo);
    if (pretty) {
        std::cout << "n=" << inst.n << " k=" << inst.k() << " simple=" << std::boolalpha
                  << report.is_simple << " cardinality_only=" << report.is_cardinality_only
                  << " acyclic=" << report.is_acyclic << "\n";
        return 0;
    }
    emit(j, false);
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"polybound: cardinality upper bounds for conjunctive queries under degree "
                 "constraints"};
    app.require_subcommand(1);

    std::string file, kind, pi_text, out_path, proof_path, mode;
    bool all_pi = false, multi_source = false, pretty = false, artifacts = false,
         check = false;

    auto* bound = app.add_subcommand("bound", "compute a bound of the requested kind");
    bound->add_option("file", file, "instance JSON file")->required();
    bound->add_option("--kind", kind, "flow-simple | oracle | normal | modular | chain | flow")
        ->required();
    bound->add_option("--pi", pi_text, "permutation: comma-separated names or 1-based indices");
    bound->add_flag("--all-pi", all_pi, "sweep all permutations (n <= 7) and report the min");
    bound->add_flag("--multi-source", multi_source, "flow kind: allow earlier-singleton sources");
    bound->add_flag("--solution", artifacts, "include the full solution/witness in the report");
    bound->add_flag("--pretty", pretty, "human-readable output");

    auto* proof = app.add_subcommand("proof", "generate a proof sequence (simple instances)");
    proof->add_option("file", file, "instance JSON file")->required();
    proof->add_option("-o,--out", out_path, "output proof file")->required();
    proof->add_flag("--pretty", pretty, "human-readable output");

    auto* verify = app.add_subcommand("verify", "verify a proof sequence against an instance");
    verify->add_option("file", file, "instance JSON file")->required();
    verify->add_option("proof", proof_path, "proof text file")->required();
    verify->add_flag("--pretty", pretty, "human-readable output");

    auto* compare = app.add_subcommand("compare", "compute all bounds and check the hierarchy");
    compare->add_option("file", file, "instance JSON file")->required();
    compare->add_option("--pi", pi_text, "permutation for the chain/flow bounds");
    compare->add_flag("--multi-source", multi_source, "flow bound: earlier-singleton sources");
    compare->add_flag("--pretty", pretty, "human-readable output");

    auto* reduce = app.add_subcommand("reduce", "apply a bound-preserving reduction");
    reduce->add_option("file", file, "instance JSON file")->required();
    reduce->add_option("--mode", mode, "acyclic-simple | two-three | simple-fd")->required();
    reduce->add_flag("--check", check, "verify bound preservation with the oracle");
    reduce->add_flag("--pretty", pretty, "human-readable output");

    auto* classify_cmd = app.add_subcommand("classify", "classification report");
    classify_cmd->add_option("file", file, "instance JSON file")->required();
    classify_cmd->add_flag("--pretty", pretty, "human-readable output");

    CLI11_PARSE(app, argc, argv);

    try {
        if (bound->parsed())
            return run_bound(file, kind, pi_text, all_pi, multi_source, artifacts, pretty);
        if (proof->parsed())
            return run_proof(file, out_path, pretty);
        if (verify->parsed())
            return run_verify(file, proof_path, pretty);
        if (compare->parsed())
            return run_compare(file, pi_text, multi_source, pretty);
        if (reduce->parsed())
            return run_reduce(file, mode, check, pretty);
        if (classify_cmd->parsed())
            return run_classify(file, pretty);
    } catch (const ParseError& e) {
        std::cerr << "parse error: " << e.what() << "\n";
        return 2;
    } catch (const PreconditionError& e) {
        std::cerr << "precondition error: " << e.what() << "\n";
        return 3;
    } catch (const InternalError& e) {
        std::cerr << "internal fault: " << e.what() << "\n";
        return 4;
    } catch (const std::exception& e) {
        std::cerr << "internal fault: " << e.what() << "\n";
        return 4;
    }
    return 1;
}
