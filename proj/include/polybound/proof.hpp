#pragma once

// Proof sequences for the flow inequality sum_j delta_j h(Y_j|X_j) >=
// h([n]|{}): generation from a flow solution (tracing the dual-witness
// construction), an independent verifier that simulates the weighted term
// bag, and the canonical one-step-per-line text format.
//
// The verifier deliberately shares nothing with the generator beyond the
// Term type: it rebuilds the starting bag from (instance, delta) and replays
// the steps with explicit validity checks.

#include "polybound/errors.hpp"
#include "polybound/flow.hpp"
#include "polybound/instance.hpp"
#include "polybound/rational.hpp"
#include "polybound/varset.hpp"

#include <algorithm>
#include <functional>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

namespace polybound {

// A conditional term h(Y|X) with X subset of Y; (empty, empty) is the
// identically-zero bookkeeping term and is exempt from coefficient tracking.
struct Term {
    VarSet X, Y;

    bool is_noop() const { return X.empty_set() && Y.empty_set(); }

    friend bool operator==(const Term& a, const Term& b) { return a.X == b.X && a.Y == b.Y; }
    friend bool operator<(const Term& a, const Term& b) {
        if (a.Y != b.Y)
            return a.Y < b.Y;
        return a.X < b.X;
    }
};

enum class StepKind { Decompose, Compose, Monotonicity, Submodularity };

inline const char* step_kind_name(StepKind kind) {
    switch (kind) {
    case StepKind::Decompose: return "decompose";
    case StepKind::Compose: return "compose";
    case StepKind::Monotonicity: return "monotonicity";
    case StepKind::Submodularity: return "submodularity";
    }
    return "?";
}

// One weighted proof step.
//   decompose w X Z Y : moves w from h(Y|X) to h(Z|X) + h(Y|Z)
//   compose   w X Z Y : the reverse
//   monotonicity w X Y: removes w from h(Y|X)
//   submodularity w I J: moves w from h(I | I&J) to h(I|J | J)
// Chain parameters require X subset Z subset Y with X != Z != Y, except that
// X = Z = {} is allowed (the bookkeeping form that touches h({}|{})).
struct ProofStep {
    StepKind kind = StepKind::Decompose;
    Rational weight;
    VarSet X, Z, Y;  // decompose/compose (X,Z,Y); monotonicity (X,Y)
    VarSet I, J;     // submodularity
};

// Nonnegatively weighted terms; the no-op term is not tracked.
class TermBag {
public:
    void add(const Term& term, const Rational& w) {
        if (term.is_noop() || sign(w) == 0)
            return;
        coeffs_[term] += w;
    }

    // Remove w from the term; false when that would make it negative.
    bool try_remove(const Term& term, const Rational& w) {
        if (term.is_noop() || sign(w) == 0)
            return true;
        auto it = coeffs_.find(term);
        if (it == coeffs_.end() || it->second < w)
            return false;
        it->second -= w;
        if (sign(it->second) == 0)
            coeffs_.erase(it);
        return true;
    }

    Rational coeff(const Term& term) const {
        auto it = coeffs_.find(term);
        return it == coeffs_.end() ? Rational(0) : it->second;
    }

    const std::map<Term, Rational>& entries() const { return coeffs_; }

private:
    std::map<Term, Rational> coeffs_;
};

namespace detail {

// Structural validity of a step's parameters within universe [n].
inline std::optional<std::string> step_structure_error(int n, const ProofStep& step) {
    VarSet universe = VarSet::full(n);
    if (sign(step.weight) <= 0)
        return "weight must be positive";
    switch (step.kind) {
    case StepKind::Decompose:
    case StepKind::Compose: {
        if (!step.Y.subset_of(universe))
            return "Y outside the universe";
        if (!step.X.subset_of(step.Z) || !step.Z.subset_of(step.Y))
            return "need X subset Z subset Y";
        if (step.Z == step.Y)
            return "Z = Y is degenerate";
        if (step.X == step.Z && !step.X.empty_set())
            return "X = Z is only allowed for the empty set";
        return std::nullopt;
    }
    case StepKind::Monotonicity:
        if (!step.Y.subset_of(universe))
            return "Y outside the universe";
        if (!step.X.subset_of(step.Y))
            return "need X subset Y";
        return std::nullopt;
    case StepKind::Submodularity:
        if (!step.I.subset_of(universe) || !step.J.subset_of(universe))
            return "I or J outside the universe";
        if (!step.I.incomparable_with(step.J))
            return "need I and J incomparable";
        return std::nullopt;
    }
    return "unknown step kind";
}

// Apply one structurally valid step to the bag; false on a coefficient that
// would go negative.
inline bool apply_step(TermBag& bag, const ProofStep& step) {
    switch (step.kind) {
    case StepKind::Decompose:
        if (!bag.try_remove({step.X, step.Y}, step.weight))
            return false;
        bag.add({step.X, step.Z}, step.weight);
        bag.add({step.Z, step.Y}, step.weight);
        return true;
    case StepKind::Compose:
        if (!bag.try_remove({step.X, step.Z}, step.weight))
            return false;
        if (!bag.try_remove({step.Z, step.Y}, step.weight)) {
            bag.add({step.X, step.Z}, step.weight);  // roll back
            return false;
        }
        bag.add({step.X, step.Y}, step.weight);
        return true;
    case StepKind::Monotonicity:
        return bag.try_remove({step.X, step.Y}, step.weight);
    case StepKind::Submodularity: {
        if (!bag.try_remove({step.I.intersect(step.J), step.I}, step.weight))
            return false;
        bag.add({step.J, step.I.union_with(step.J)}, step.weight);
        return true;
    }
    }
    return false;
}

}  // namespace detail

struct GenerateOptions {
    // Outer-loop variable order; identity when empty.
    std::vector<int> order;
    // Called after each outer iteration with the current bag (the lock-step
    // debug hook used by the test suite).
    std::function<void(int iteration, const TermBag&)> iteration_hook;
};

// Construct a proof sequence from a feasible flow solution and its path
// decomposition. The emitted steps trace the dual-witness lift so that after
// each step the bag coefficient of h(Y|{}) equals the witness excess at Y
// and the coefficient of h(Y|X), X nonempty, equals mu_{X,Y}. In particular
// the cleanup pass keeps h(X'|X) in the bag (no monotonicity discard) when X
// is nonempty, and skips constraints whose tail already contains the new
// variable, which is the reading under which that correspondence is exact.
inline std::vector<ProofStep> generate_proof(const Instance& inst, const FlowSolution& sol,
                                             const PathDecomposition& paths,
                                             const GenerateOptions& opts = {}) {
    require_simple(inst, "generate_proof");
    AuxGraph g = build_aux_graph(inst);
    std::vector<int> order = opts.order.empty() ? identity_permutation(inst.n) : opts.order;
    validate_permutation(inst, order);
    if (int(paths.per_sink.size()) != inst.n)
        throw PreconditionError("generate_proof: path decomposition must cover every sink");

    TermBag bag;
    for (int j = 1; j <= inst.k(); ++j)
        bag.add({inst.constraint(j).X, inst.constraint(j).Y}, sol.delta[j - 1]);

    std::vector<ProofStep> steps;
    auto emit = [&](ProofStep step) {
        if (sign(step.weight) == 0)
            return;
        if (auto err = detail::step_structure_error(inst.n, step))
            throw InternalError("generate_proof: step " + std::to_string(steps.size() + 1) +
                                " malformed: " + *err);
        if (!detail::apply_step(bag, step))
            throw InternalError("generate_proof: step " + std::to_string(steps.size() + 1) +
                                " would drive a coefficient negative");
        steps.push_back(std::move(step));
    };
    auto compose = [&](const Rational& w, VarSet x, VarSet z, VarSet y) {
        emit({StepKind::Compose, w, x, z, y, {}, {}});
    };
    auto decompose = [&](const Rational& w, VarSet x, VarSet z, VarSet y) {
        emit({StepKind::Decompose, w, x, z, y, {}, {}});
    };
    auto monotonicity = [&](const Rational& w, VarSet x, VarSet y) {
        emit({StepKind::Monotonicity, w, x, y, VarSet{}, {}, {}});
    };
    auto submodularity = [&](const Rational& w, VarSet i, VarSet j) {
        emit({StepKind::Submodularity, w, {}, {}, {}, i, j});
    };

    VarSet prefix;
    for (int i = 0; i < inst.n; ++i) {
        int t = order[i];
        VarSet prefix_next = prefix.with(t);
        const auto& sink_paths = paths.per_sink[t - 1];

        for (const auto& path : sink_paths)
            for (size_t e = 0; e < path.edges.size(); ++e) {
                VarSet a = g.vertices[path.vertices[e]].union_with(prefix);
                VarSet b = g.vertices[path.vertices[e + 1]].union_with(prefix);
                if (a.proper_subset_of(b))
                    compose(path.value, VarSet::empty(), a, b);
                else if (b.proper_subset_of(a))
                    decompose(path.value, VarSet::empty(), b, a);
            }

        for (const auto& path : sink_paths)
            for (size_t e = path.edges.size(); e-- > 0;) {
                VarSet a_raw = g.vertices[path.vertices[e]];
                VarSet b_raw = g.vertices[path.vertices[e + 1]];
                VarSet a1 = a_raw.union_with(prefix_next);
                VarSet b1 = b_raw.union_with(prefix_next);
                if (a1.proper_subset_of(b1)) {
                    decompose(path.value, VarSet::empty(), a1, b1);
                } else if (b1.proper_subset_of(a1)) {
                    VarSet a0 = a_raw.union_with(prefix);
                    VarSet b0 = b_raw.union_with(prefix);
                    if (a_raw.contains(t)) {
                        if (b1 != b0)
                            decompose(path.value, VarSet::empty(), b0, b1);
                        compose(path.value, VarSet::empty(), b0, a0);
                    } else {
                        submodularity(path.value, a0, b1);
                        compose(path.value, VarSet::empty(), b1, a1);
                    }
                }
            }

        std::vector<Rational> lifted_flow = paths.degree_flow(t, inst.k());
        for (int j = 1; j <= inst.k(); ++j) {
            const auto& dc = inst.constraint(j);
            if (dc.X.contains(t))
                continue;  // lifting is a no-op on both sides
            VarSet x1 = dc.X.union_with(prefix_next);
            VarSet y1 = dc.Y.union_with(prefix_next);
            if (!x1.proper_subset_of(y1))
                continue;
            Rational eps = sol.delta[j - 1] - lifted_flow[j - 1];
            if (sign(eps) == 0)
                continue;
            VarSet x0 = dc.X.union_with(prefix);
            VarSet y0 = dc.Y.union_with(prefix);
            if (dc.Y.contains(t)) {
                decompose(eps, x0, x1, y0);
                if (x0.empty_set())
                    monotonicity(eps, x0, x1);
            } else {
                submodularity(eps, y0, x1);
            }
        }

        if (opts.iteration_hook)
            opts.iteration_hook(i, bag);
        prefix = prefix_next;
    }
    return steps;
}

struct ProofVerdict {
    bool accepted = false;
    std::string reason;       // empty when accepted
    int failed_step = 0;      // 1-based; 0 when not step-specific
    Rational final_target_coefficient;
    ExtRational certified;    // sum c_j delta_j, set when accepted
};

// Simulate the bag from scratch. Rejects malformed parameters and any step
// that would drive a coefficient negative; accepts iff the final coefficient
// of h([n]|{}) is at least 1.
inline ProofVerdict verify_proof(const Instance& inst, const std::vector<Rational>& delta,
                                 const std::vector<ProofStep>& steps) {
    if (int(delta.size()) != inst.k())
        throw PreconditionError("verify_proof: delta size must equal k");
    for (const auto& d : delta)
        if (sign(d) < 0)
            throw PreconditionError("verify_proof: delta must be nonnegative");

    ProofVerdict verdict;
    TermBag bag;
    for (int j = 1; j <= inst.k(); ++j)
        bag.add({inst.constraint(j).X, inst.constraint(j).Y}, delta[j - 1]);
    for (size_t s = 0; s < steps.size(); ++s) {
        if (auto err = detail::step_structure_error(inst.n, steps[s])) {
            verdict.reason = "step " + std::to_string(s + 1) + ": " + *err;
            verdict.failed_step = int(s + 1);
            return verdict;
        }
        if (!detail::apply_step(bag, steps[s])) {
            verdict.reason = "step " + std::to_string(s + 1) +
                             ": a term coefficient would become negative";
            verdict.failed_step = int(s + 1);
            return verdict;
        }
    }
    verdict.final_target_coefficient = bag.coeff({VarSet::empty(), VarSet::full(inst.n)});
    if (verdict.final_target_coefficient < 1) {
        verdict.reason = "final coefficient of h(" + VarSet::full(inst.n).to_string() +
                         "|{}) is " + to_string(verdict.final_target_coefficient) + " < 1";
        return verdict;
    }
    verdict.accepted = true;
    Rational certified = 0;
    for (int j = 1; j <= inst.k(); ++j)
        certified += inst.constraint(j).c * delta[j - 1];
    verdict.certified = ExtRational(certified);
    return verdict;
}

// ---------------------------------------------------------------------------
// Canonical text format, one step per line after a header:
//
//   target={1,2,3,4} k=4 delta=1,0,1,1
//   compose w=1 X={} Z={} Y={1,2}
//   submodularity w=1/2 I={1,3} J={1,2}
//
// Sets are sorted 1-based variable lists; rationals are "p" or "p/q".
// Serialization followed by parsing is bit-exact.
// ---------------------------------------------------------------------------

struct ProofFile {
    int n = 0;
    std::vector<Rational> delta;
    std::vector<ProofStep> steps;
};

inline std::string serialize_proof(int n, const std::vector<Rational>& delta,
                                   const std::vector<ProofStep>& steps) {
    std::ostringstream out;
    out << "target=" << VarSet::full(n).to_string() << " k=" << delta.size() << " delta=";
    for (size_t j = 0; j < delta.size(); ++j) {
        if (j)
            out << ",";
        out << to_string(delta[j]);
    }
    out << "\n";
    for (const auto& step : steps) {
        out << step_kind_name(step.kind) << " w=" << to_string(step.weight);
        switch (step.kind) {
        case StepKind::Decompose:
        case StepKind::Compose:
            out << " X=" << step.X.to_string() << " Z=" << step.Z.to_string()
                << " Y=" << step.Y.to_string();
            break;
        case StepKind::Monotonicity:
            out << " X=" << step.X.to_string() << " Y=" << step.Y.to_string();
            break;
        case StepKind::Submodularity:
            out << " I=" << step.I.to_string() << " J=" << step.J.to_string();
            break;
        }
        out << "\n";
    }
    return out.str();
}

namespace detail {

inline VarSet parse_set_text(const std::string& text, const std::string& where) {
    if (text.size() < 2 || text.front() != '{' || text.back() != '}')
        throw ParseError(where + ": expected a set like {1,3}");
    VarSet s;
    std::string body = text.substr(1, text.size() - 2);
    if (body.empty())
        return s;
    std::istringstream in(body);
    std::string item;
    while (std::getline(in, item, ',')) {
        try {
            size_t pos = 0;
            int v = std::stoi(item, &pos);
            if (pos != item.size() || v < 1 || v > kMaxVariables)
                throw std::invalid_argument("range");
            s = s.with(v);
        } catch (const std::exception&) {
            throw ParseError(where + ": bad set element \"" + item + "\"");
        }
    }
    return s;
}

inline std::pair<std::string, std::string> split_kv(const std::string& token,
                                                    const std::string& where) {
    auto eq = token.find('=');
    if (eq == std::string::npos)
        throw ParseError(where + ": expected key=value, got \"" + token + "\"");
    return {token.substr(0, eq), token.substr(eq + 1)};
}

}  // namespace detail

inline ProofFile parse_proof(const std::string& text) {
    std::istringstream in(text);
    std::string line;
    ProofFile file;
    int lineno = 0;
    bool saw_header = false;
    while (std::getline(in, line)) {
        ++lineno;
        if (line.empty())
            continue;
        std::string where = "proof line " + std::to_string(lineno);
        std::istringstream tokens(line);
        std::string head;
        tokens >> head;
        if (!saw_header) {
            auto [key, value] = detail::split_kv(head, where);
            if (key != "target")
                throw ParseError(where + ": expected target={...} header");
            VarSet target = detail::parse_set_text(value, where);
            file.n = target.empty_set() ? 0 : *std::max_element(target.members().begin(),
                                                                target.members().end());
            if (target != VarSet::full(file.n) || file.n < 1)
                throw ParseError(where + ": target must be a full prefix set {1,...,n}");
            std::string tok;
            size_t declared_k = 0;
            bool saw_delta = false;
            while (tokens >> tok) {
                auto [k2, v2] = detail::split_kv(tok, where);
                if (k2 == "k") {
                    declared_k = std::stoul(v2);
                } else if (k2 == "delta") {
                    saw_delta = true;
                    std::istringstream ds(v2);
                    std::string item;
                    while (std::getline(ds, item, ',')) {
                        auto r = parse_rational(item);
                        if (!r || sign(*r) < 0)
                            throw ParseError(where + ": bad delta entry \"" + item + "\"");
                        file.delta.push_back(*r);
                    }
                } else {
                    throw ParseError(where + ": unknown header field \"" + k2 + "\"");
                }
            }
            if (!saw_delta || file.delta.size() != declared_k)
                throw ParseError(where + ": header needs k=<k> and a matching delta list");
            saw_header = true;
            continue;
        }
        ProofStep step;
        if (head == "decompose")
            step.kind = StepKind::Decompose;
        else if (head == "compose")
            step.kind = StepKind::Compose;
        else if (head == "monotonicity")
            step.kind = StepKind::Monotonicity;
        else if (head == "submodularity")
            step.kind = StepKind::Submodularity;
        else
            throw ParseError(where + ": unknown step kind \"" + head + "\"");
        std::string tok;
        bool saw_weight = false;
        while (tokens >> tok) {
            auto [key, value] = detail::split_kv(tok, where);
            if (key == "w") {
                auto r = parse_rational(value);
                if (!r)
                    throw ParseError(where + ": bad weight \"" + value + "\"");
                step.weight = *r;
                saw_weight = true;
            } else if (key == "X") {
                step.X = detail::parse_set_text(value, where);
            } else if (key == "Z") {
                step.Z = detail::parse_set_text(value, where);
            } else if (key == "Y") {
                step.Y = detail::parse_set_text(value, where);
            } else if (key == "I") {
                step.I = detail::parse_set_text(value, where);
            } else if (key == "J") {
                step.J = detail::parse_set_text(value, where);
            } else {
                throw ParseError(where + ": unknown field \"" + key + "\"");
            }
        }
        if (!saw_weight)
            throw ParseError(where + ": step needs w=<weight>");
        file.steps.push_back(step);
    }
    if (!saw_header)
        throw ParseError("proof: missing header line");
    return file;
}

}  // namespace polybound
