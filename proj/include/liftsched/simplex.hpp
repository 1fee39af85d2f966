#pragma once

#include <optional>
#include <vector>

#include "liftsched/lp.hpp"
#include "liftsched/rational.hpp"

namespace liftsched {

// Exact phase-1 simplex feasibility over the rationals. Returns a vertex of
// the polytope (values for the structural variables) or nullopt when empty.
//
// Upper bounds x <= 1 are part of the program contract; callers whose rows
// already imply them (e.g. every variable occurs in a sum-<=-1 row) can skip
// the explicit bound rows via bounds_implied.
class SimplexSolver {
public:
    explicit SimplexSolver(const LinearProgram& lp, bool bounds_implied = false) {
        n_ = static_cast<int>(lp.vars.size());
        std::vector<LinRow> rows = lp.rows;
        if (!bounds_implied) {
            for (int v = 0; v < n_; ++v) {
                LinRow r;
                r.terms = {{v, Rational(1)}};
                r.rel = Rel::le;
                r.rhs = 1;
                rows.push_back(std::move(r));
            }
        }

        const int R = static_cast<int>(rows.size());
        // Column layout: [structural | slack/surplus | artificial | rhs].
        int slack_count = 0;
        for (const auto& r : rows)
            if (r.rel != Rel::eq) ++slack_count;

        cols_ = n_ + slack_count;  // artificials appended below as needed
        tableau_.assign(static_cast<std::size_t>(R) + 1, {});
        basis_.assign(static_cast<std::size_t>(R), -1);

        std::vector<std::vector<Rational>> dense(static_cast<std::size_t>(R));
        std::vector<Rational> rhs(static_cast<std::size_t>(R));
        int next_slack = n_;
        std::vector<int> needs_artificial;
        for (int i = 0; i < R; ++i) {
            auto& row = rows[static_cast<std::size_t>(i)];
            dense[static_cast<std::size_t>(i)].assign(static_cast<std::size_t>(cols_), Rational(0));
            Rational b = row.rhs;
            int sign = 1;
            // Normalize to rhs >= 0 first; a <= row with negative rhs flips to >=.
            if (b < 0) sign = -1;
            for (const auto& [v, c] : row.terms)
                dense[static_cast<std::size_t>(i)][static_cast<std::size_t>(v)] += sign * c;
            rhs[static_cast<std::size_t>(i)] = sign * b;
            Rel rel = row.rel;
            if (sign < 0) rel = rel == Rel::le ? Rel::ge : rel == Rel::ge ? Rel::le : Rel::eq;

            if (rel == Rel::le) {
                dense[static_cast<std::size_t>(i)][static_cast<std::size_t>(next_slack)] = 1;
                basis_[static_cast<std::size_t>(i)] = next_slack++;
            } else if (rel == Rel::ge) {
                dense[static_cast<std::size_t>(i)][static_cast<std::size_t>(next_slack)] = -1;
                ++next_slack;
                needs_artificial.push_back(i);
            } else {
                needs_artificial.push_back(i);
            }
        }
        art_begin_ = cols_;
        cols_ += static_cast<int>(needs_artificial.size());
        for (auto& row : dense) row.resize(static_cast<std::size_t>(cols_), Rational(0));
        for (std::size_t k = 0; k < needs_artificial.size(); ++k) {
            int i = needs_artificial[k];
            dense[static_cast<std::size_t>(i)][static_cast<std::size_t>(art_begin_) + k] = 1;
            basis_[static_cast<std::size_t>(i)] = art_begin_ + static_cast<int>(k);
        }
        for (int i = 0; i < R; ++i) {
            tableau_[static_cast<std::size_t>(i)] = std::move(dense[static_cast<std::size_t>(i)]);
            tableau_[static_cast<std::size_t>(i)].push_back(rhs[static_cast<std::size_t>(i)]);
        }
        // Phase-1 objective: minimize the sum of artificials. Reduced costs
        // start as -(sum of artificial rows) on non-artificial columns.
        auto& obj = tableau_.back();
        obj.assign(static_cast<std::size_t>(cols_) + 1, Rational(0));
        for (int c = art_begin_; c < cols_; ++c) obj[static_cast<std::size_t>(c)] = 1;
        for (int i = 0; i < R; ++i) {
            if (basis_[static_cast<std::size_t>(i)] >= art_begin_) {
                const auto& row = tableau_[static_cast<std::size_t>(i)];
                for (int c = 0; c <= cols_; ++c)
                    obj[static_cast<std::size_t>(c)] -= row[static_cast<std::size_t>(c)];
            }
        }
    }

    std::optional<std::vector<Rational>> solve() {
        const int R = static_cast<int>(basis_.size());
        auto& obj = tableau_.back();
        long degenerate_streak = 0;
        bool bland = false;

        for (;;) {
            int enter = -1;
            if (!bland) {
                // Dantzig: most negative reduced cost.
                for (int c = 0; c < cols_; ++c) {
                    if (obj[static_cast<std::size_t>(c)] < 0 &&
                        (enter < 0 || obj[static_cast<std::size_t>(c)] <
                                          obj[static_cast<std::size_t>(enter)]))
                        enter = c;
                }
            } else {
                for (int c = 0; c < cols_; ++c) {
                    if (obj[static_cast<std::size_t>(c)] < 0) { enter = c; break; }
                }
            }
            if (enter < 0) break;  // optimal

            int leave = -1;
            Rational best;
            for (int i = 0; i < R; ++i) {
                const Rational& a = tableau_[static_cast<std::size_t>(i)][static_cast<std::size_t>(enter)];
                if (a <= 0) continue;
                Rational ratio = tableau_[static_cast<std::size_t>(i)].back() / a;
                if (leave < 0 || ratio < best ||
                    (ratio == best && basis_[static_cast<std::size_t>(i)] <
                                          basis_[static_cast<std::size_t>(leave)])) {
                    leave = i;
                    best = ratio;
                }
            }
            if (leave < 0) break;  // phase-1 objective unbounded below cannot happen
            if (best == 0) {
                if (++degenerate_streak > 64) bland = true;  // anti-cycling
            } else {
                degenerate_streak = 0;
            }
            pivot(leave, enter);
        }

        if (obj.back() != 0) return std::nullopt;  // min sum of artificials > 0
        std::vector<Rational> x(static_cast<std::size_t>(n_), Rational(0));
        for (int i = 0; i < R; ++i) {
            int b = basis_[static_cast<std::size_t>(i)];
            if (b < n_) x[static_cast<std::size_t>(b)] = tableau_[static_cast<std::size_t>(i)].back();
        }
        return x;
    }

private:
    void pivot(int leave, int enter) {
        auto& prow = tableau_[static_cast<std::size_t>(leave)];
        const Rational p = prow[static_cast<std::size_t>(enter)];
        for (auto& v : prow) v /= p;
        for (std::size_t i = 0; i < tableau_.size(); ++i) {
            if (static_cast<int>(i) == leave) continue;
            auto& row = tableau_[i];
            const Rational f = row[static_cast<std::size_t>(enter)];
            if (f == 0) continue;
            for (std::size_t c = 0; c < row.size(); ++c) {
                if (prow[c] != 0) row[c] -= f * prow[c];
            }
        }
        basis_[static_cast<std::size_t>(leave)] = enter;
    }

    int n_ = 0;
    int cols_ = 0;
    int art_begin_ = 0;
    std::vector<std::vector<Rational>> tableau_;  // last row = phase-1 objective
    std::vector<int> basis_;
};

inline std::optional<std::vector<Rational>> solve_lp_feasible(const LinearProgram& lp,
                                                              bool bounds_implied = false) {
    return SimplexSolver(lp, bounds_implied).solve();
}

}  // namespace liftsched
