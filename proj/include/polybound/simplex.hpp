#pragma once

// Exact rational linear-program solver: dense two-phase tableau simplex over
// GMP rationals. Every bound engine in the library sits on top of this.
// Verdicts (Optimal / Infeasible / Unbounded) and all reported values are
// exact; there is no tolerance anywhere.
//
// Pivot selection is Dantzig's rule with deterministic lowest-index
// tie-breaks, falling back permanently to Bland's rule once a run of
// degenerate pivots exceeds a fixed threshold. Bland's rule cannot cycle, so
// termination is guaranteed while the common case keeps the fast rule.
//
// ExactSimplex additionally supports appending constraint rows to an already
// solved program and repairing with the dual simplex method; the lazy
// constraint generation in the oracle module is built on this.

#include "polybound/errors.hpp"
#include "polybound/rational.hpp"

#include <string>
#include <utility>
#include <vector>

namespace polybound {

enum class Relation { LessEq, Equal, GreaterEq };
enum class Sense { Maximize, Minimize };
enum class LpStatus { Optimal, Infeasible, Unbounded };

struct LinearProgram {
    struct Variable {
        bool nonnegative = true;
        std::string name;
    };
    struct Row {
        std::vector<std::pair<int, Rational>> coeffs;  // sparse (variable, coefficient)
        Relation rel = Relation::LessEq;
        Rational rhs;
    };

    Sense sense = Sense::Maximize;
    std::vector<Variable> variables;
    std::vector<Row> rows;
    std::vector<std::pair<int, Rational>> objective;

    int add_variable(bool nonnegative = true, std::string name = {}) {
        variables.push_back({nonnegative, std::move(name)});
        return int(variables.size()) - 1;
    }

    void add_row(std::vector<std::pair<int, Rational>> coeffs, Relation rel, Rational rhs) {
        for (const auto& [v, c] : coeffs)
            if (v < 0 || v >= int(variables.size()))
                throw InternalError("LinearProgram: coefficient for unknown variable");
        rows.push_back({std::move(coeffs), rel, std::move(rhs)});
    }

    void add_objective_term(int var, Rational coeff) {
        if (var < 0 || var >= int(variables.size()))
            throw InternalError("LinearProgram: objective term for unknown variable");
        objective.emplace_back(var, std::move(coeff));
    }
};

struct LpOutcome {
    LpStatus status = LpStatus::Optimal;
    ExtRational objective;             // exact optimum; +inf when not Optimal
    std::vector<Rational> assignment;  // per variable, present iff Optimal
    // Present iff Unbounded: a feasible improving ray over the variables,
    // i.e. moving from any feasible point along `ray` stays feasible and
    // improves the objective forever.
    std::vector<Rational> ray;
};

class ExactSimplex {
public:
    explicit ExactSimplex(LinearProgram lp) : lp_(std::move(lp)) { build(); }

    LpOutcome solve() {
        if (need_phase1_) {
            load_phase1_objective();
            Verdict v = iterate(/*phase1=*/true);
            if (v == Verdict::Unbounded)
                throw InternalError("simplex: phase 1 unbounded");
            if (sign(obj_value()) != 0) {
                solved_optimal_ = false;
                return {LpStatus::Infeasible, ExtRational::infinity(), {}, {}};
            }
        }
        load_phase2_objective();
        Verdict v = iterate(/*phase1=*/false);
        return finish(v);
    }

    // Append rows to a program whose solve() returned Optimal and re-solve.
    // Dual feasibility is unaffected by new rows, so the repair is a dual
    // simplex run followed by ordinary primal iterations.
    LpOutcome add_rows_and_resolve(const std::vector<LinearProgram::Row>& rows) {
        if (!solved_optimal_)
            throw InternalError("simplex: add_rows_and_resolve without optimal base solve");
        append_rows(rows);
        if (!dual_iterate()) {
            solved_optimal_ = false;
            return {LpStatus::Infeasible, ExtRational::infinity(), {}, {}};
        }
        Verdict v = iterate(/*phase1=*/false);
        return finish(v);
    }

private:
    enum class Verdict { Optimal, Unbounded };

    LinearProgram lp_;
    int m_ = 0;             // rows
    int n_struct_ = 0;      // tableau columns for (possibly split) variables
    int n_total_ = 0;       // all columns except rhs
    int first_artificial_ = 0;
    int width_ = 0;         // allocated row width (columns incl. rhs)
    bool need_phase1_ = false;
    bool solved_optimal_ = false;
    std::vector<Rational> tab_;    // (m_+1) x width_; row m_ is the objective row
    std::vector<int> basis_;       // column basic in each row
    std::vector<int> col_of_var_;  // variable -> first tableau column
    std::vector<bool> var_split_;  // free variable split into two columns
    bool bland_mode_ = false;
    int degenerate_streak_ = 0;
    int unbounded_col_ = -1;
    static constexpr int kBlandThreshold = 64;

    Rational& at(int r, int c) { return tab_[size_t(r) * width_ + c]; }
    Rational& rhs(int r) { return at(r, n_total_); }
    Rational& obj_value() { return rhs(m_); }

    void build() {
        m_ = int(lp_.rows.size());
        col_of_var_.resize(lp_.variables.size());
        var_split_.resize(lp_.variables.size(), false);
        int col = 0;
        for (size_t v = 0; v < lp_.variables.size(); ++v) {
            col_of_var_[v] = col;
            var_split_[v] = !lp_.variables[v].nonnegative;
            col += var_split_[v] ? 2 : 1;
        }
        n_struct_ = col;

        // Orient every row to have a nonnegative rhs; >= rows with rhs 0 are
        // negated as well so their slack can start basic, which keeps
        // artificial columns (and phase 1) out of all-rhs-zero families.
        struct Oriented {
            Relation rel;
            bool negated;
        };
        std::vector<Oriented> oriented(m_);
        int n_slack = 0, n_art = 0;
        for (int r = 0; r < m_; ++r) {
            Relation rel = lp_.rows[r].rel;
            bool neg = rel == Relation::GreaterEq ? sign(lp_.rows[r].rhs) <= 0
                                                  : sign(lp_.rows[r].rhs) < 0;
            if (neg)
                rel = rel == Relation::LessEq     ? Relation::GreaterEq
                      : rel == Relation::GreaterEq ? Relation::LessEq
                                                   : Relation::Equal;
            oriented[r] = {rel, neg};
            if (rel != Relation::Equal)
                ++n_slack;
            if (rel != Relation::LessEq)
                ++n_art;
        }
        first_artificial_ = n_struct_ + n_slack;
        n_total_ = n_struct_ + n_slack + n_art;
        need_phase1_ = n_art > 0;
        width_ = n_total_ + 1;

        tab_.assign(size_t(m_ + 1) * width_, Rational(0));
        basis_.assign(m_, -1);

        int slack = n_struct_, art = first_artificial_;
        for (int r = 0; r < m_; ++r) {
            const auto& row = lp_.rows[r];
            for (const auto& [v, c] : row.coeffs) {
                Rational coeff = oriented[r].negated ? Rational(-c) : c;
                at(r, col_of_var_[v]) += coeff;
                if (var_split_[v])
                    at(r, col_of_var_[v] + 1) -= coeff;
            }
            rhs(r) = oriented[r].negated ? Rational(-row.rhs) : row.rhs;
            switch (oriented[r].rel) {
            case Relation::LessEq:
                at(r, slack) = 1;
                basis_[r] = slack++;
                break;
            case Relation::GreaterEq:
                at(r, slack) = -1;
                ++slack;
                at(r, art) = 1;
                basis_[r] = art++;
                break;
            case Relation::Equal:
                at(r, art) = 1;
                basis_[r] = art++;
                break;
            }
        }
    }

    // Phase-1 objective: minimize the sum of artificials, expressed in terms
    // of the nonbasic columns by subtracting the artificial-basic rows.
    void load_phase1_objective() {
        for (int c = 0; c <= n_total_; ++c)
            at(m_, c) = 0;
        for (int r = 0; r < m_; ++r) {
            if (basis_[r] < first_artificial_)
                continue;
            for (int c = 0; c <= n_total_; ++c)
                if (sign(at(r, c)) != 0)
                    at(m_, c) -= at(r, c);
        }
    }

    // Phase-2 objective row: minimize the internal objective (the user's
    // objective negated when maximizing), reduced by the current basis.
    void load_phase2_objective() {
        std::vector<Rational> g(n_total_, Rational(0));
        for (const auto& [v, c] : lp_.objective) {
            Rational coeff = lp_.sense == Sense::Maximize ? Rational(-c) : c;
            g[col_of_var_[v]] += coeff;
            if (var_split_[v])
                g[col_of_var_[v] + 1] -= coeff;
        }
        for (int c = 0; c <= n_total_; ++c)
            at(m_, c) = 0;
        for (int c = 0; c < n_total_; ++c)
            at(m_, c) = g[c];
        for (int r = 0; r < m_; ++r) {
            const Rational gb = g[basis_[r]];
            if (sign(gb) == 0)
                continue;
            for (int c = 0; c <= n_total_; ++c)
                if (sign(at(r, c)) != 0)
                    at(m_, c) -= gb * at(r, c);
        }
        bland_mode_ = false;
        degenerate_streak_ = 0;
    }

    // Columns eligible to enter: phase 2 never re-admits artificials.
    int column_limit(bool phase1) const { return phase1 ? n_total_ : first_artificial_; }

    int pick_entering(bool phase1) {
        int limit = column_limit(phase1);
        int best = -1;
        if (bland_mode_) {
            for (int c = 0; c < limit; ++c)
                if (sign(at(m_, c)) < 0)
                    return c;
            return -1;
        }
        const Rational* best_val = nullptr;
        for (int c = 0; c < limit; ++c) {
            const Rational& rc = at(m_, c);
            if (sign(rc) < 0 && (best < 0 || rc < *best_val)) {
                best = c;
                best_val = &at(m_, c);
            }
        }
        return best;
    }

    int pick_leaving(int col) {
        int best = -1;
        Rational best_ratio;
        for (int r = 0; r < m_; ++r) {
            if (sign(at(r, col)) <= 0)
                continue;
            Rational ratio = rhs(r) / at(r, col);
            if (best < 0 || ratio < best_ratio ||
                (ratio == best_ratio && basis_[r] < basis_[best])) {
                best = r;
                best_ratio = ratio;
            }
        }
        return best;
    }

    void pivot(int r, int c) {
        Rational inv = 1 / at(r, c);
        if (!(inv == 1))
            for (int j = 0; j <= n_total_; ++j)
                if (sign(at(r, j)) != 0)
                    at(r, j) *= inv;
        for (int i = 0; i <= m_; ++i) {
            if (i == r)
                continue;
            const Rational f = at(i, c);
            if (sign(f) == 0)
                continue;
            for (int j = 0; j <= n_total_; ++j)
                if (sign(at(r, j)) != 0)
                    at(i, j) -= f * at(r, j);
        }
        basis_[r] = c;
    }

    Verdict iterate(bool phase1) {
        for (;;) {
            int col = pick_entering(phase1);
            if (col < 0)
                return Verdict::Optimal;
            int row = pick_leaving(col);
            if (row < 0) {
                unbounded_col_ = col;
                return Verdict::Unbounded;
            }
            bool degenerate = sign(rhs(row)) == 0;
            pivot(row, col);
            if (!bland_mode_) {
                degenerate_streak_ = degenerate ? degenerate_streak_ + 1 : 0;
                if (degenerate_streak_ > kBlandThreshold)
                    bland_mode_ = true;
            }
        }
    }

    LpOutcome finish(Verdict v) {
        if (v == Verdict::Unbounded) {
            solved_optimal_ = false;
            LpOutcome out;
            out.status = LpStatus::Unbounded;
            out.objective = ExtRational::infinity();
            out.ray = extract_ray();
            return out;
        }
        solved_optimal_ = true;
        LpOutcome out;
        out.status = LpStatus::Optimal;
        out.assignment = extract_assignment();
        Rational obj = 0;
        for (const auto& [v2, c] : lp_.objective)
            obj += c * out.assignment[v2];
        out.objective = ExtRational(obj);
        return out;
    }

    // Append a batch of rows in one widening pass. Each new row gets a fresh
    // slack column (inserted before the artificial block) that starts basic,
    // and is priced out against the current basis so the tableau stays in
    // reduced form; the slack value may start negative while violated.
    void append_rows(const std::vector<LinearProgram::Row>& rows) {
        int extra = int(rows.size());
        if (extra == 0)
            return;
        int insert_at = first_artificial_;
        int old_total = n_total_;
        int old_m = m_;
        n_total_ += extra;
        first_artificial_ += extra;
        m_ += extra;
        int new_width = n_total_ + 1;

        std::vector<Rational> ntab(size_t(m_ + 1) * new_width, Rational(0));
        auto nat = [&](int r, int c) -> Rational& { return ntab[size_t(r) * new_width + c]; };
        for (int r = 0; r <= old_m; ++r) {
            int nr = r == old_m ? m_ : r;  // objective row moves to the end
            for (int c = 0; c <= old_total; ++c) {
                Rational& cell = tab_[size_t(r) * width_ + c];
                if (sign(cell) != 0)
                    nat(nr, c < insert_at ? c : c + extra) = std::move(cell);
            }
        }
        for (int r = 0; r < old_m; ++r)
            if (basis_[r] >= insert_at)
                basis_[r] += extra;
        tab_ = std::move(ntab);
        width_ = new_width;

        for (int t = 0; t < extra; ++t) {
            const auto& row = rows[t];
            if (row.rel == Relation::Equal)
                throw InternalError("simplex: incremental equality rows unsupported");
            bool neg = row.rel == Relation::GreaterEq;
            int newr = old_m + t;
            for (const auto& [v, c] : row.coeffs) {
                Rational coeff = neg ? Rational(-c) : c;
                at(newr, col_of_var_[v]) += coeff;
                if (var_split_[v])
                    at(newr, col_of_var_[v] + 1) -= coeff;
            }
            rhs(newr) = neg ? Rational(-row.rhs) : row.rhs;
            at(newr, insert_at + t) = 1;
            basis_.push_back(insert_at + t);
            lp_.rows.push_back(row);
            // price out against the pre-existing basis
            for (int r = 0; r < old_m; ++r) {
                const Rational f = at(newr, basis_[r]);
                if (sign(f) == 0)
                    continue;
                for (int j = 0; j <= n_total_; ++j)
                    if (sign(at(r, j)) != 0)
                        at(newr, j) -= f * at(r, j);
            }
        }
    }

    // Dual simplex: restore primal feasibility while keeping reduced costs
    // nonnegative. Returns false if some row is unsatisfiable (infeasible).
    bool dual_iterate() {
        int guard = 0;
        for (;;) {
            int row = -1;
            const Rational* worst = nullptr;
            for (int r = 0; r < m_; ++r) {
                if (sign(rhs(r)) < 0 && (row < 0 || rhs(r) < *worst ||
                                         (rhs(r) == *worst && basis_[r] < basis_[row]))) {
                    row = r;
                    worst = &rhs(r);
                }
            }
            if (row < 0)
                return true;
            int limit = column_limit(false);
            int col = -1;
            Rational best_ratio;
            for (int c = 0; c < limit; ++c) {
                if (sign(at(row, c)) >= 0)
                    continue;
                Rational ratio = at(m_, c) / -at(row, c);
                if (col < 0 || ratio < best_ratio || (ratio == best_ratio && c < col)) {
                    col = c;
                    best_ratio = ratio;
                }
            }
            if (col < 0)
                return false;
            pivot(row, col);
            if (++guard > 10000 + 100 * m_)
                throw InternalError("simplex: dual iteration guard tripped");
        }
    }

    std::vector<Rational> column_values() {
        std::vector<Rational> x(n_total_, Rational(0));
        for (int r = 0; r < m_; ++r)
            x[basis_[r]] = rhs(r);
        return x;
    }

    std::vector<Rational> extract_assignment() {
        auto x = column_values();
        std::vector<Rational> out(lp_.variables.size());
        for (size_t v = 0; v < lp_.variables.size(); ++v) {
            out[v] = x[col_of_var_[v]];
            if (var_split_[v])
                out[v] -= x[col_of_var_[v] + 1];
        }
        return out;
    }

    // Improving ray from the entering column that had no blocking row:
    // entering moves +1, each basic variable moves by minus its column entry.
    std::vector<Rational> extract_ray() {
        int col = unbounded_col_;
        std::vector<Rational> d(n_total_, Rational(0));
        d[col] = 1;
        for (int r = 0; r < m_; ++r)
            d[basis_[r]] = -at(r, col);
        std::vector<Rational> out(lp_.variables.size());
        for (size_t v = 0; v < lp_.variables.size(); ++v) {
            out[v] = d[col_of_var_[v]];
            if (var_split_[v])
                out[v] -= d[col_of_var_[v] + 1];
        }
        return out;
    }
};

// Solve the LP exactly. The returned assignment satisfies every constraint
// with exact rational arithmetic and the objective equals the inner product
// exactly; Infeasible / Unbounded verdicts are likewise exact.
inline LpOutcome solve(const LinearProgram& lp) {
    ExactSimplex simplex(lp);
    return simplex.solve();
}

}  // namespace polybound
