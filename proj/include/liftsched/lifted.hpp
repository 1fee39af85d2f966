#pragma once

#include <algorithm>
#include <functional>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "liftsched/errors.hpp"
#include "liftsched/lp.hpp"
#include "liftsched/rational.hpp"
#include "liftsched/simplex.hpp"

namespace liftsched {

// Sorted, duplicate-free set of base-variable indices.
using VarSet = std::vector<int>;

inline VarSet set_union(const VarSet& a, const VarSet& b) {
    VarSet out;
    std::set_union(a.begin(), a.end(), b.begin(), b.end(), std::back_inserter(out));
    return out;
}

inline VarSet set_insert(const VarSet& a, int v) {
    if (std::binary_search(a.begin(), a.end(), v)) return a;
    VarSet out = a;
    out.insert(std::lower_bound(out.begin(), out.end(), v), v);
    return out;
}

inline bool set_contains(const VarSet& a, int v) {
    return std::binary_search(a.begin(), a.end(), v);
}

struct SaCaps {
    long max_vars = 200000;
    int max_level = 4;
};

// Sherali-Adams lift of a program: LP over subset variables plus the mapping
// from lifted variable index to base-variable subset. subsets[0] is the empty
// set for every level >= 2 lift.
struct LiftedProgram {
    LinearProgram lp;
    std::vector<VarSet> subsets;
    int level = 1;
    int base_vars = 0;

    int var_of(const VarSet& s) const {
        auto it = lookup.find(s);
        if (it == lookup.end()) throw InvalidInstance("subset not in lift");
        return it->second;
    }
    std::map<VarSet, int> lookup;
};

namespace detail {

inline std::string subset_name(const VarSet& s) {
    if (s.empty()) return "xS_empty";
    std::string n = "xS";
    for (int v : s) n += "_" + std::to_string(v);
    return n;
}

inline void enumerate_subsets(int n, int max_size, const std::function<void(const VarSet&)>& f) {
    VarSet cur;
    // Iterative DFS over the subset lattice in lexicographic order.
    std::function<void(int)> rec = [&](int start) {
        f(cur);
        if (static_cast<int>(cur.size()) == max_size) return;
        for (int v = start; v < n; ++v) {
            cur.push_back(v);
            rec(v + 1);
            cur.pop_back();
        }
    };
    rec(0);
}

}  // namespace detail

// r-round Sherali-Adams lift. The implicit variable bounds of `lp` are lifted
// alongside its rows, following the linearization of
// prod_{i in S} x_i * prod_{i in T} (1-x_i) * (a.x - b) <= 0 over all
// disjoint S, T with |S| + |T| <= r-1.
inline LiftedProgram sa_lift(const LinearProgram& lp, int r, const SaCaps& caps = {}) {
    if (r < 1) throw InvalidInstance("lift level must be >= 1");
    if (r > caps.max_level)
        throw SizeBlowup("lift level " + std::to_string(r) + " exceeds cap " +
                         std::to_string(caps.max_level));
    const int n = static_cast<int>(lp.vars.size());
    LiftedProgram out;
    out.level = r;
    out.base_vars = n;

    if (r == 1) {
        out.lp = lp;
        for (int v = 0; v < n; ++v) {
            out.subsets.push_back({v});
            out.lookup[{v}] = v;
            out.lp.vars[static_cast<std::size_t>(v)] = detail::subset_name({v});
        }
        return out;
    }

    // Variable count check before materializing anything.
    long count = 0;
    {
        long binom = 1;  // C(n, k)
        for (int k = 0; k <= r; ++k) {
            count += binom;
            if (count > caps.max_vars)
                throw SizeBlowup("lifted variable count exceeds cap " +
                                 std::to_string(caps.max_vars));
            binom = binom * (n - k) / (k + 1);
            if (n - k <= 0) break;
        }
    }

    detail::enumerate_subsets(n, r, [&](const VarSet& s) {
        out.lookup[s] = out.lp.add_var(detail::subset_name(s));
        out.subsets.push_back(s);
    });

    // x_empty = 1
    {
        LinRow row;
        row.name = "empty_one";
        row.terms = {{out.var_of({}), Rational(1)}};
        row.rel = Rel::eq;
        row.rhs = 1;
        out.lp.add_row(std::move(row));
    }

    // Original rows plus both bound families, all treated uniformly.
    std::vector<LinRow> bases = lp.rows;
    for (int v = 0; v < n; ++v) {
        LinRow ub;
        ub.terms = {{v, Rational(1)}};
        ub.rel = Rel::le;
        ub.rhs = 1;
        ub.name = "ub_" + std::to_string(v);
        bases.push_back(std::move(ub));
        LinRow lb;
        lb.terms = {{v, Rational(-1)}};
        lb.rel = Rel::le;
        lb.rhs = 0;
        lb.name = "lb_" + std::to_string(v);
        bases.push_back(std::move(lb));
    }

    std::vector<VarSet> small_sets;  // |S| <= r-1, reused for both roles
    detail::enumerate_subsets(n, r - 1, [&](const VarSet& s) { small_sets.push_back(s); });

    for (const auto& base : bases) {
        for (const auto& S : small_sets) {
            for (const auto& T : small_sets) {
                if (static_cast<int>(S.size() + T.size()) > r - 1) continue;
                bool disjoint = true;
                for (int v : T)
                    if (set_contains(S, v)) { disjoint = false; break; }
                if (!disjoint) continue;

                std::map<int, Rational> coeff;
                // Sum over T' subseteq T of (-1)^|T'| (a.x_{S u T' u {i}} - b x_{S u T'}).
                const std::size_t tn = T.size();
                for (std::size_t mask = 0; mask < (1u << tn); ++mask) {
                    VarSet st = S;
                    int bits = 0;
                    for (std::size_t k = 0; k < tn; ++k) {
                        if (mask & (1u << k)) {
                            st = set_insert(st, T[k]);
                            ++bits;
                        }
                    }
                    const Rational sign = bits % 2 == 0 ? 1 : -1;
                    for (const auto& [v, a] : base.terms)
                        coeff[out.var_of(set_insert(st, v))] += sign * a;
                    coeff[out.var_of(st)] -= sign * base.rhs;
                }
                LinRow row;
                row.rel = base.rel;
                row.rhs = 0;
                row.name = base.name + "_S" + std::to_string(S.size()) + "T" +
                           std::to_string(T.size());
                for (const auto& [v, c] : coeff)
                    if (c != 0) row.terms.push_back({v, c});
                if (row.terms.empty() && row.rel != Rel::eq) continue;  // 0 <= 0
                out.lp.add_row(std::move(row));
            }
        }
    }
    return out;
}

// Exact map from event subsets to values. Two backings share the interface:
// an explicit per-subset table (what the solver returns) and a convex
// combination of integral points, whose level acts as a conditioning budget.
class LiftedSolution {
public:
    static LiftedSolution from_values(int level, std::map<VarSet, Rational> values) {
        LiftedSolution s;
        s.level_ = level;
        s.values_ = std::move(values);
        s.values_[{}] = 1;
        return s;
    }

    // atoms: (set of true variables, weight); weights must sum to 1.
    static LiftedSolution from_mixture(int level, std::vector<std::pair<VarSet, Rational>> atoms) {
        LiftedSolution s;
        s.level_ = level;
        s.mixture_ = true;
        s.atoms_ = std::move(atoms);
        Rational total = 0;
        for (const auto& [set, w] : s.atoms_) {
            if (w <= 0) throw InvalidInstance("mixture weights must be positive");
            total += w;
        }
        if (total != 1) throw InvalidInstance("mixture weights must sum to 1");
        return s;
    }

    int level() const { return level_; }
    bool is_mixture() const { return mixture_; }

    Rational value(const VarSet& s) const {
        if (mixture_) {
            Rational v = 0;
            for (const auto& [set, w] : atoms_) {
                if (std::includes(set.begin(), set.end(), s.begin(), s.end())) v += w;
            }
            return v;
        }
        auto it = values_.find(s);
        if (it == values_.end()) {
            if (static_cast<int>(s.size()) > level_)
                throw LevelExhausted("subset larger than solution level");
            return 0;
        }
        return it->second;
    }

    Rational singleton(int v) const { return value({v}); }

    // Conditioning on event v: x'_S = x_{S u {v}} / x_v.
    LiftedSolution conditioned(int v) const {
        if (level_ < 2) throw LevelExhausted("conditioning needs level >= 2");
        const Rational mass = singleton(v);
        if (mass == 0) throw ZeroMass("conditioning on zero-mass event");

        LiftedSolution out;
        out.level_ = level_ - 1;
        out.mixture_ = mixture_;
        if (mixture_) {
            for (const auto& [set, w] : atoms_) {
                if (set_contains(set, v)) out.atoms_.push_back({set, w / mass});
            }
        } else {
            for (const auto& [s, val] : values_) {
                if (static_cast<int>(s.size()) > level_ - 1) continue;
                out.values_[s] = value(set_insert(s, v)) / mass;
            }
        }
        return out;
    }

    // Type invariants, checked exhaustively over the stored subsets.
    void check_invariants() const {
        if (value({}) != 1) throw Error("lifted solution: x_empty != 1");
        if (mixture_) return;  // holds by construction; value() derives from weights
        for (const auto& [s, val] : values_) {
            if (val < 0 || val > 1) throw Error("lifted solution: value outside [0,1]");
            for (std::size_t k = 0; k < s.size(); ++k) {
                VarSet sub = s;
                sub.erase(sub.begin() + static_cast<std::ptrdiff_t>(k));
                if (value(sub) < val) throw Error("lifted solution: monotonicity violated");
            }
        }
    }

    // Explicit table of the mixture at a given level, for cross-checks.
    LiftedSolution to_values(int level, int base_vars) const {
        if (!mixture_) throw InvalidInstance("to_values expects a mixture");
        std::map<VarSet, Rational> vals;
        detail::enumerate_subsets(base_vars, level,
                                  [&](const VarSet& s) { vals[s] = value(s); });
        return from_values(level, std::move(vals));
    }

    const std::vector<std::pair<VarSet, Rational>>& atoms() const { return atoms_; }

private:
    int level_ = 1;
    bool mixture_ = false;
    std::map<VarSet, Rational> values_;
    std::vector<std::pair<VarSet, Rational>> atoms_;
};

// Exact feasibility of a lifted program; on success the values are exactly
// the vertex returned by the simplex solver.
inline std::optional<LiftedSolution> solve_feasible(const LiftedProgram& prog) {
    // All lifted variables are bounded by chains of monotonicity rows, and a
    // level-1 program keeps its own bound rows.
    auto x = solve_lp_feasible(prog.lp, /*bounds_implied=*/prog.level >= 2);
    if (!x) return std::nullopt;
    std::map<VarSet, Rational> vals;
    for (std::size_t k = 0; k < prog.subsets.size(); ++k) vals[prog.subsets[k]] = (*x)[k];
    return LiftedSolution::from_values(prog.level, std::move(vals));
}

inline std::optional<LiftedSolution> solve_feasible(const LinearProgram& lp,
                                                    bool bounds_implied = false) {
    auto x = solve_lp_feasible(lp, bounds_implied);
    if (!x) return std::nullopt;
    std::map<VarSet, Rational> vals;
    for (int v = 0; v < static_cast<int>(lp.vars.size()); ++v) vals[{v}] = (*x)[static_cast<std::size_t>(v)];
    return LiftedSolution::from_values(1, std::move(vals));
}

}  // namespace liftsched
