#pragma once

#include <algorithm>
#include <cmath>
#include <functional>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "liftsched/base_lp.hpp"
#include "liftsched/core.hpp"
#include "liftsched/deadline.hpp"
#include "liftsched/laminar.hpp"
#include "liftsched/lifted.hpp"
#include "liftsched/matching.hpp"
#include "liftsched/schedule.hpp"

namespace liftsched {

struct HierarchyParams {
    long k = 1;
    Rational delta{1, 4};
    Rational epsilon{1, 2};
    int sa_level = 1;    // lift level for the horizon search
    long mix_atoms = 1;  // integral points backing the rounding solution
    long budget = 0;     // conditioning budget; 0 derives one from the instance
    bool paper_regime = false;  // hard-assert the paper-only discard bounds
    SaCaps sa_caps;
};

// The paper's parameter formulas, computed for display next to the much
// smaller values actually used in a run.
struct PaperParams {
    double k = 0;
    double delta = 0;
    double big_k = 0;
    double big_k_prime = 0;
};

inline PaperParams paper_reference_params(long m, double epsilon, long T) {
    PaperParams out;
    const double logT = std::max(1.0, std::log2(static_cast<double>(std::max(2L, T))));
    out.k = static_cast<double>(m) / epsilon * std::max(1.0, std::log2(logT));
    const double k2 = out.k * out.k;
    out.delta = epsilon / (8 * k2 * static_cast<double>(m) * std::pow(2.0, 2 * k2) * logT);
    out.big_k = static_cast<double>(m) * k2 * std::pow(2.0, k2) / out.delta;
    out.big_k_prime = out.big_k * std::pow(2.0, k2);
    return out;
}

struct CallLedger {
    long level = 0;  // global tree level of I*
    long begin = 0, end = 0;
    long a_star = 0;  // |A*| at call entry
    long middle = 0, bottom = 0, top_stage1 = 0, top_stage2 = 0, comm_last = 0;
    long conditionings = 0;  // consumed by this call itself
    long ell_star = -1;
    bool ell_star_fallback = false;
    long chain_cut_iterations = 0;
    Rational bound_rhs;  // epsilon/2 * (log|I*|/log T) * |I*| + epsilon/(2m) * |A*|
    bool within_bound = true;

    long total_discarded() const { return middle + bottom + top_stage1 + top_stage2 + comm_last; }
};

struct RunManifest {
    Mode mode = Mode::no_delay;
    HierarchyParams params;
    long machines = 1;
    long t_lp = 0;      // smallest horizon with a feasible lifted LP
    long t_round = 0;   // horizon whose integral points back the rounding
    long t_padded = 0;  // power-of-two tree horizon
    long initial_level = 0;
    long max_path_conditionings = 0;
    long pre_reinsert_makespan = 0;
    long final_makespan = 0;
    long total_discarded = 0;
    bool all_within_bound = true;
    std::vector<CallLedger> calls;
};

namespace hier {

inline long ilog2(long v) {
    long l = 0;
    while ((1L << (l + 1)) <= v) ++l;
    return l;
}

struct SupportRange {
    long lo = 0, hi = 0;
    bool empty() const { return lo == 0; }
};

inline Rational task_mass_in(const LiftedSolution& x, const EventIndex& ev, const TaskRef& task,
                             long lo, long hi) {
    Rational mass = 0;
    for (long i = 1; i <= ev.machines(); ++i)
        for (long t = lo; t <= hi; ++t) mass += x.singleton(ev.id({task, i, t}));
    return mass;
}

inline bool task_fully_in(const LiftedSolution& x, const EventIndex& ev, const TaskRef& task,
                          const Interval& iv) {
    return task_mass_in(x, ev, task, iv.begin, iv.end) == 1;
}

inline SupportRange task_support(const LiftedSolution& x, const EventIndex& ev,
                                 const TaskRef& task) {
    SupportRange r;
    for (long t = 1; t <= ev.horizon(); ++t) {
        bool positive = false;
        for (long i = 1; i <= ev.machines(); ++i)
            if (x.singleton(ev.id({task, i, t})) > 0) { positive = true; break; }
        if (positive) {
            if (r.lo == 0) r.lo = t;
            r.hi = t;
        }
    }
    return r;
}

inline SupportRange job_support(const LiftedSolution& x, const EventIndex& ev,
                                const Instance& inst, const std::string& id) {
    SupportRange r;
    for (long idx = 1; idx <= inst.job(id).size; ++idx) {
        SupportRange tr = task_support(x, ev, {id, idx});
        if (tr.empty()) continue;
        if (r.lo == 0 || tr.lo < r.lo) r.lo = tr.lo;
        r.hi = std::max(r.hi, tr.hi);
    }
    return r;
}

// A(I, j, x): tasks of j with their full support inside I.
inline std::vector<TaskRef> tasks_fully_in(const LiftedSolution& x, const EventIndex& ev,
                                           const Instance& inst, const std::string& id,
                                           const Interval& iv) {
    std::vector<TaskRef> out;
    for (long idx = 1; idx <= inst.job(id).size; ++idx)
        if (task_fully_in(x, ev, {id, idx}, iv)) out.push_back({id, idx});
    return out;
}

struct Ctx {
    const Instance& inst;
    const EventIndex& ev;
    const LaminarTree& tree;
    const HierarchyParams& params;
    Mode mode;
    long beta;   // >= 1 in delay mode
    long log_t;  // log2 of the padded horizon
    std::vector<CallLedger>* ledger;
    long* max_path_conditionings;
    bool* all_within_bound;
};

// Smallest tree interval containing the job's support; jobs straddling a
// midpoint are owned by the straddled interval.
inline std::map<std::string, Interval> ownership(const LiftedSolution& x, const Ctx& ctx,
                                                 const Interval& istar,
                                                 const std::set<std::string>& jobs) {
    std::map<std::string, Interval> out;
    for (const auto& id : jobs) {
        SupportRange r = job_support(x, ctx.ev, ctx.inst, id);
        if (r.empty()) continue;
        Interval owner = ctx.tree.smallest_containing(r.lo, r.hi);
        if (!istar.contains(owner))
            throw SupportOutsideRoot("job " + id + " owned outside its call interval");
        out.emplace(id, owner);
    }
    return out;
}

// SPLIT: sweep the level-k^2 subintervals left to right, conditioning on the
// rightmost supported event of the job in each, so that afterwards every task
// of the job sits entirely inside one subinterval or has no mass in I*.
inline void split_special(LiftedSolution& x, const Ctx& ctx, const Interval& istar,
                          const std::string& id, long sigma_machine, long& conditionings) {
    const long k2 = ctx.params.k * ctx.params.k;
    for (const Interval& iv : ctx.tree.level_within(istar, k2)) {
        auto chunk = tasks_fully_in(x, ctx.ev, ctx.inst, id, istar);
        long t_star = 0;
        TaskRef task_star;
        for (long t = iv.end; t >= iv.begin && t_star == 0; --t) {
            for (const auto& task : chunk) {
                if (x.singleton(ctx.ev.id({task, sigma_machine, t})) > 0) {
                    t_star = t;
                    task_star = task;
                    break;
                }
            }
        }
        if (t_star == 0) continue;
        x = x.conditioned(ctx.ev.id({task_star, sigma_machine, t_star}));
        ++conditionings;
    }
    // Definition-style postcondition: each task is confined to one
    // subinterval or has left I* entirely.
    for (long idx = 1; idx <= ctx.inst.job(id).size; ++idx) {
        Rational in_istar = task_mass_in(x, ctx.ev, {id, idx}, istar.begin, istar.end);
        if (in_istar == 0) continue;
        if (in_istar != 1) throw Error("split left task partially inside the interval");
        bool confined = false;
        for (const Interval& iv : ctx.tree.level_within(istar, k2))
            if (task_fully_in(x, ctx.ev, {id, idx}, iv)) { confined = true; break; }
        if (!confined) throw Error("split failed to confine a task");
    }
}

// Longest chain (by total size) among `owned`, as an ordered job sequence.
inline std::pair<std::vector<std::string>, long> longest_chain(const Instance& inst,
                                                               const std::set<std::string>& owned) {
    std::vector<std::string> nodes(owned.begin(), owned.end());
    std::map<std::string, long> pred_count;
    for (const auto& id : nodes) {
        long c = 0;
        for (const auto& other : nodes)
            if (other != id && inst.precedence().precedes(other, id)) ++c;
        pred_count[id] = c;
    }
    std::stable_sort(nodes.begin(), nodes.end(), [&](const std::string& a, const std::string& b) {
        return pred_count[a] < pred_count[b];
    });
    std::map<std::string, long> best;
    std::map<std::string, std::string> parent;
    std::string arg;
    long value = 0;
    for (const auto& id : nodes) {
        long b = 0;
        std::string via;
        for (const auto& other : nodes) {
            if (other != id && inst.precedence().precedes(other, id)) {
                if (best[other] > b || (best[other] == b && !via.empty() && other < via)) {
                    b = best[other];
                    via = other;
                }
            }
        }
        best[id] = b + inst.job(id).size;
        parent[id] = via;
        if (best[id] > value || (best[id] == value && (arg.empty() || id < arg))) {
            value = best[id];
            arg = id;
        }
    }
    std::vector<std::string> chain;
    for (std::string cur = arg; !cur.empty(); cur = parent[cur]) chain.push_back(cur);
    std::reverse(chain.begin(), chain.end());
    return {chain, value};
}

struct PartialSets {
    std::set<std::string> jstar;
    std::set<std::string> specials;
    std::map<std::string, long> sigma;
};

// Chain cutting: while some interval in the first k^2 levels owns a chain of
// total size >= delta |I|, condition the first chain job on its latest
// supported event, promote it to special and split it.
inline long cut_chains(LiftedSolution& x, PartialSets& sets, const Ctx& ctx,
                       const Interval& istar, long& conditionings) {
    const long k2 = ctx.params.k * ctx.params.k;
    long iterations = 0;
    for (;;) {
        bool found = false;
        auto owner_of = ownership(x, ctx, istar, sets.jstar);
        for (long rel = 0; rel < k2 && !found; ++rel) {
            for (const Interval& iv : ctx.tree.level_within(istar, rel)) {
                std::set<std::string> owned;
                for (const auto& [id, owner] : owner_of)
                    if (owner == iv) owned.insert(id);
                if (owned.empty()) continue;
                auto [chain, total] = longest_chain(ctx.inst, owned);
                if (Rational(total) < ctx.params.delta * iv.length()) continue;

                const std::string j = chain.front();
                const TaskRef last{j, ctx.inst.job(j).size};
                long t_pick = 0, i_pick = 0;
                for (long t = ctx.ev.horizon(); t >= 1 && t_pick == 0; --t)
                    for (long i = 1; i <= ctx.ev.machines(); ++i)
                        if (x.singleton(ctx.ev.id({last, i, t})) > 0) {
                            t_pick = t;
                            i_pick = i;
                            break;
                        }
                if (t_pick == 0) throw Error("chain job without support");
                x = x.conditioned(ctx.ev.id({last, i_pick, t_pick}));
                ++conditionings;
                sets.jstar.erase(j);
                sets.specials.insert(j);
                sets.sigma[j] = i_pick;
                split_special(x, ctx, istar, j, i_pick, conditionings);
                ++iterations;
                found = true;
                break;
            }
        }
        if (!found) break;
    }

    // Loop exit certificates.
    auto owner_of = ownership(x, ctx, istar, sets.jstar);
    std::set<std::string> jhat;
    for (const auto& [id, owner] : owner_of)
        if (owner.level - istar.level < k2) jhat.insert(id);
    const long delta_hat = max_chain(ctx.inst.jobs(), ctx.inst.precedence(), jhat);
    if (Rational(delta_hat) > Rational(k2) * ctx.params.delta * istar.length())
        throw Error("chain cutting exited with a long chain");
    const Rational big_k =
        Rational(ctx.inst.machines() * k2 * (1L << k2)) / ctx.params.delta;
    if (Rational(iterations) > big_k) throw Error("chain cutting exceeded its iteration bound");
    return iterations;
}

// Smallest level in [k, k^2] whose middle band is small per the counting
// inequality; falls back to the minimizer with a warning flag when no level
// qualifies at the configured parameters.
inline std::pair<long, bool> select_level_star(const std::vector<long>& level_task_counts,
                                               const Ctx& ctx, long t_star_len) {
    const long k = ctx.params.k;
    const long k2 = k * k;
    const Rational eps = ctx.params.epsilon;
    const long m = ctx.inst.machines();

    auto band = [&](long lo, long hi) {
        long total = 0;
        for (long l = std::max(0L, lo); l <= hi && l < static_cast<long>(level_task_counts.size()); ++l)
            total += level_task_counts[static_cast<std::size_t>(l)];
        return total;
    };
    long best = -1, best_mid = 0;
    for (long ell = k; ell <= k2; ++ell) {
        const long mid = band(ell - k, ell - 1);
        const long top = band(0, ell - k - 1);
        const Rational rhs = eps / 4 * Rational(t_star_len, std::max(1L, ctx.log_t)) +
                             eps / (2 * m) * Rational(mid + top);
        if (Rational(mid) <= rhs) return {ell, false};
        if (best < 0 || mid < best_mid) {
            best = ell;
            best_mid = mid;
        }
    }
    return {best, true};
}

struct TentativeResult {
    std::map<std::string, long> kept;  // p'_j per top job
    std::set<TaskRef> discarded;
    std::map<std::string, std::pair<long, long>> window;  // [r*_j, d*_j]
};

// Stage 1 of top insertion: window derivation and maximum bipartite matching
// of top tasks into free slots; unmatched tasks are discarded.
inline TentativeResult tentative_top_assign(const LiftedSolution& x, const Ctx& ctx,
                                            const Interval& istar,
                                            const std::vector<Interval>& bottoms,
                                            const std::set<std::string>& top_jobs,
                                            const std::map<TaskRef, Placement>& occupied) {
    TentativeResult out;
    std::set<std::pair<long, long>> taken;
    for (const auto& [task, pl] : occupied) taken.insert({pl.machine, pl.slot});

    auto bottom_index_of = [&](long t) {
        for (std::size_t q = 0; q < bottoms.size(); ++q)
            if (bottoms[q].contains(t)) return static_cast<long>(q) + 1;
        throw Error("slot outside the bottom partition");
    };

    std::vector<TaskRef> left;
    std::vector<std::pair<long, long>> right;  // (machine, slot), free in I*
    for (long t = istar.begin; t <= istar.end; ++t)
        for (long i = 1; i <= ctx.inst.machines(); ++i)
            if (!taken.count({i, t})) right.push_back({i, t});
    std::sort(right.begin(), right.end(),
              [](const auto& a, const auto& b) { return std::tie(a.second, a.first) < std::tie(b.second, b.first); });

    for (const auto& id : top_jobs) {
        SupportRange r = job_support(x, ctx.ev, ctx.inst, id);
        if (r.empty()) throw Error("top job without support");
        const long u = bottom_index_of(r.lo);
        const long v = bottom_index_of(r.hi);
        if (u + 1 > v - 1) {
            out.kept[id] = 0;
            out.window[id] = {0, -1};
            for (long idx = 1; idx <= ctx.inst.job(id).size; ++idx)
                out.discarded.insert({id, idx});
            continue;
        }
        out.window[id] = {bottoms[static_cast<std::size_t>(u)].begin,
                          bottoms[static_cast<std::size_t>(v - 2)].end};
        for (long idx = 1; idx <= ctx.inst.job(id).size; ++idx) left.push_back({id, idx});
    }

    std::vector<std::vector<int>> adj(left.size());
    for (std::size_t l = 0; l < left.size(); ++l) {
        const auto& [lo, hi] = out.window[left[l].job];
        for (std::size_t rix = 0; rix < right.size(); ++rix)
            if (right[rix].second >= lo && right[rix].second <= hi)
                adj[l].push_back(static_cast<int>(rix));
    }
    auto match = max_bipartite_matching(adj, static_cast<int>(right.size()));
    std::map<std::string, long> matched;
    for (std::size_t l = 0; l < left.size(); ++l)
        if (match[l] >= 0) ++matched[left[l].job];
    for (const auto& id : top_jobs) {
        if (!out.window.count(id) || out.window[id].first > out.window[id].second) continue;
        const long p = ctx.inst.job(id).size;
        const long kept = matched.count(id) ? matched[id] : 0;
        out.kept[id] = kept;
        for (long idx = kept + 1; idx <= p; ++idx) out.discarded.insert({id, idx});
    }

    // Window correctness against the already-fixed schedule: a scheduled task
    // related to a top job must fall strictly outside the job's window.
    for (const auto& [task, pl] : occupied) {
        for (const auto& id : top_jobs) {
            const auto& [lo, hi] = out.window[id];
            if (lo > hi) continue;
            if (task.job == id) continue;
            if (ctx.inst.precedence().precedes(task.job, id) && pl.slot >= lo)
                throw Error("bottom task violates a top release window");
            if (ctx.inst.precedence().precedes(id, task.job) && pl.slot <= hi)
                throw Error("bottom task violates a top deadline window");
        }
    }

    if (ctx.params.paper_regime) {
        const Rational cap = Rational(4 * ctx.inst.machines()) * istar.length() /
                             Rational(1L << ctx.params.k);
        if (Rational(static_cast<long>(out.discarded.size())) > cap)
            throw Error("tentative stage discarded beyond the paper bound");
    }
    return out;
}

struct CallOutcome {
    std::map<TaskRef, Placement> assigned;
    std::set<TaskRef> discarded;
};

// Stage 2 of top insertion: EDF+ECT over the kept task counts inside the
// stage-1 windows, on the capacity left free by the fixed schedule.
inline void insert_top_jobs(const Ctx& ctx, const Interval& istar,
                            const std::vector<Interval>& bottoms,
                            const std::set<std::string>& top_jobs, const LiftedSolution& x,
                            CallOutcome& merged, CallLedger& ledger) {
    auto tentative = tentative_top_assign(x, ctx, istar, bottoms, top_jobs, merged.assigned);
    ledger.top_stage1 = static_cast<long>(tentative.discarded.size());
    for (const auto& task : tentative.discarded) merged.discarded.insert(task);

    const long off = istar.begin - 1;
    DeadlineInstance dl;
    dl.machines = ctx.inst.machines();
    dl.horizon = istar.length();
    dl.intervals = static_cast<long>(bottoms.size());
    dl.capacity.assign(static_cast<std::size_t>(dl.machines) + 1,
                       std::vector<char>(static_cast<std::size_t>(dl.horizon) + 1, 0));
    std::set<std::pair<long, long>> taken;
    for (const auto& [task, pl] : merged.assigned) taken.insert({pl.machine, pl.slot});
    for (long i = 1; i <= dl.machines; ++i)
        for (long t = istar.begin; t <= istar.end; ++t)
            if (!taken.count({i, t}))
                dl.capacity[static_cast<std::size_t>(i)][static_cast<std::size_t>(t - off)] = 1;

    // EDF breaks deadline ties by id; a topological rank prefix keeps those
    // ties aligned with precedence.
    std::vector<std::string> order = ctx.inst.topological_ids();
    std::map<std::string, std::string> rename;
    long rank = 0;
    for (const auto& id : order) {
        if (!top_jobs.count(id) || tentative.kept[id] < 1) continue;
        std::string tag = std::to_string(rank++);
        rename[id] = std::string(4 - std::min<std::size_t>(4, tag.size()), '0') + tag + "_" + id;
    }
    for (const auto& [id, tag] : rename) {
        const auto& [lo, hi] = tentative.window[id];
        dl.jobs.push_back({tag, tentative.kept[id], lo - off, hi - off});
    }
    std::set<IdPair> pairs;
    for (const auto& [a, b] : ctx.inst.precedence().pairs())
        if (rename.count(a) && rename.count(b)) pairs.insert({rename[a], rename[b]});
    dl.precedence = Precedence(std::move(pairs));
    dl.beta = ctx.mode == Mode::delay ? std::optional<long>(std::max(1L, ctx.beta))
                                      : std::nullopt;

    RunTrace trace = ctx.mode == Mode::delay ? edf_ect_comm(dl) : edf_ect(dl);

    for (const auto& [id, tag] : rename) {
        std::vector<long> slots;
        long machine = 0;
        for (const auto& [task, pl] : trace.schedule.assignment) {
            if (task.job != tag) continue;
            slots.push_back(pl.slot);
            machine = pl.machine;
        }
        std::sort(slots.begin(), slots.end());
        // delay variant with beta > 1 drops the outermost beta-1 tasks on
        // each side of the active interval
        long trim = ctx.mode == Mode::delay ? ctx.beta - 1 : 0;
        long kept = static_cast<long>(slots.size()) - 2 * trim;
        if (kept < 0) kept = 0;
        std::vector<long> final_slots(slots.begin() + (kept > 0 ? trim : 0),
                                      slots.begin() + (kept > 0 ? trim + kept : 0));
        for (std::size_t q = 0; q < final_slots.size(); ++q)
            merged.assigned[{id, static_cast<long>(q) + 1}] = {machine, final_slots[q] + off};
        for (long idx = kept > 0 ? kept + 1 : 1; idx <= tentative.kept[id]; ++idx) {
            merged.discarded.insert({id, idx});
            ++ledger.top_stage2;
        }
    }
}

// PARTIAL-SCHEDULE. Every recursive call receives its own copy of the lifted
// solution; sibling calls are independent.
inline CallOutcome partial_schedule_call(const Ctx& ctx, Interval istar, PartialSets sets,
                                         LiftedSolution x, long consumed_above) {
    const long k2 = ctx.params.k * ctx.params.k;
    ctx.ledger->push_back({});
    const std::size_t ledger_ix = ctx.ledger->size() - 1;
    CallLedger ledger;
    ledger.level = istar.level;
    ledger.begin = istar.begin;
    ledger.end = istar.end;

    // |A*| at entry: tasks of J* plus special tasks supported inside I*.
    long a_star = 0;
    for (const auto& id : sets.jstar) a_star += ctx.inst.job(id).size;
    for (const auto& id : sets.specials)
        a_star += static_cast<long>(tasks_fully_in(x, ctx.ev, ctx.inst, id, istar).size());
    ledger.a_star = a_star;
    ledger.bound_rhs = ctx.params.epsilon / 2 * Rational(ilog2(istar.length())) /
                           Rational(std::max(1L, ctx.log_t)) * istar.length() +
                       ctx.params.epsilon / (2 * ctx.inst.machines()) * a_star;

    CallOutcome out;
    long conditionings = 0;

    if (istar.length() < (1L << k2)) {
        // Base case: schedule everything by conditioning to an integral point.
        std::vector<TaskRef> tasks;
        for (const auto& id : sets.jstar)
            for (long idx = 1; idx <= ctx.inst.job(id).size; ++idx) tasks.push_back({id, idx});
        for (const auto& id : sets.specials)
            for (const auto& task : tasks_fully_in(x, ctx.ev, ctx.inst, id, istar))
                tasks.push_back(task);

        std::map<std::string, long> topo_rank;
        long rank = 0;
        for (const auto& id : ctx.inst.topological_ids()) topo_rank[id] = rank++;
        std::sort(tasks.begin(), tasks.end(), [&](const TaskRef& a, const TaskRef& b) {
            return std::tie(topo_rank[a.job], a.job, a.index) <
                   std::tie(topo_rank[b.job], b.job, b.index);
        });

        for (const auto& task : tasks) {
            long t_pick = 0, i_pick = 0;
            for (long t = istar.begin; t <= istar.end && t_pick == 0; ++t)
                for (long i = 1; i <= ctx.inst.machines(); ++i)
                    if (x.singleton(ctx.ev.id({task, i, t})) > 0) {
                        t_pick = t;
                        i_pick = i;
                        break;
                    }
            if (t_pick == 0)
                throw LevelExhausted("base case found no integral completion for a task");
            x = x.conditioned(ctx.ev.id({task, i_pick, t_pick}));
            ++conditionings;
            if (out.assigned.count(task)) throw Error("task scheduled twice in base case");
            out.assigned[task] = {i_pick, t_pick};
        }
        // Distinctness certifies the conditioning reached an integral point.
        std::set<std::pair<long, long>> seen;
        for (const auto& [task, pl] : out.assigned)
            if (!seen.insert({pl.machine, pl.slot}).second)
                throw LevelExhausted("base-case conditioning collided; lift level too small");

        if (ctx.mode == Mode::delay) {
            for (auto it = out.assigned.begin(); it != out.assigned.end();) {
                if (it->second.slot > istar.end - ctx.beta) {
                    out.discarded.insert(it->first);
                    ++ledger.comm_last;
                    it = out.assigned.erase(it);
                } else {
                    ++it;
                }
            }
        }
    } else {
        // Split incoming specials, cut chains, partition, recurse, insert top.
        for (const auto& id : sets.specials)
            split_special(x, ctx, istar, id, sets.sigma.at(id), conditionings);
        ledger.chain_cut_iterations = cut_chains(x, sets, ctx, istar, conditionings);

        auto owner_of = ownership(x, ctx, istar, sets.jstar);
        std::vector<long> level_counts(static_cast<std::size_t>(ctx.tree.depth() - istar.level) + 1,
                                       0);
        for (const auto& [id, owner] : owner_of)
            level_counts[static_cast<std::size_t>(owner.level - istar.level)] +=
                ctx.inst.job(id).size;
        auto [ell_star, fallback] = select_level_star(level_counts, ctx, istar.length());
        ledger.ell_star = ell_star;
        ledger.ell_star_fallback = fallback;

        std::set<std::string> top, mid;
        for (const auto& [id, owner] : owner_of) {
            const long rel = owner.level - istar.level;
            if (rel <= ell_star - ctx.params.k - 1) top.insert(id);
            else if (rel <= ell_star - 1) mid.insert(id);
        }
        for (const auto& id : mid)
            for (long idx = 1; idx <= ctx.inst.job(id).size; ++idx) {
                out.discarded.insert({id, idx});
                ++ledger.middle;
            }

        const auto bottoms = ctx.tree.level_within(istar, ell_star);
        for (const Interval& child : bottoms) {
            PartialSets sub;
            sub.specials = sets.specials;
            sub.sigma = sets.sigma;
            for (const auto& [id, owner] : owner_of)
                if (owner.level - istar.level >= ell_star && child.contains(owner))
                    sub.jstar.insert(id);
            CallOutcome child_out =
                partial_schedule_call(ctx, child, std::move(sub), x, consumed_above + conditionings);
            for (const auto& [task, pl] : child_out.assigned) {
                if (out.assigned.count(task)) throw Error("duplicate assignment across branches");
                out.assigned[task] = pl;
            }
            for (const auto& task : child_out.discarded) out.discarded.insert(task);
            ledger.bottom += static_cast<long>(child_out.discarded.size());
        }

        insert_top_jobs(ctx, istar, bottoms, top, x, out, ledger);
    }

    // Specials must sit on their sigma machine.
    for (const auto& [task, pl] : out.assigned)
        if (sets.sigma.count(task.job) && pl.machine != sets.sigma.at(task.job))
            throw Error("special job left its sigma machine");

    ledger.conditionings = conditionings;
    *ctx.max_path_conditionings =
        std::max(*ctx.max_path_conditionings, consumed_above + conditionings);
    ledger.within_bound = Rational(ledger.total_discarded()) <= ledger.bound_rhs;
    if (!ledger.within_bound) {
        *ctx.all_within_bound = false;
        if (ctx.params.paper_regime) throw Error("per-call discard bound violated");
    }
    (*ctx.ledger)[ledger_ix] = ledger;
    return out;
}

// Enumerates complete valid non-migratory schedules at a horizon, in a fixed
// deterministic order, as mixture atoms over LP events.
inline std::vector<VarSet> enumerate_schedule_atoms(const Instance& inst, const EventIndex& ev,
                                                    Mode mode, long horizon, long max_count) {
    std::vector<std::string> order = inst.topological_ids();
    std::vector<VarSet> found;
    std::vector<std::vector<std::pair<long, long>>> chosen(order.size());
    std::vector<std::vector<char>> busy(static_cast<std::size_t>(inst.machines()) + 1,
                                        std::vector<char>(static_cast<std::size_t>(horizon) + 1, 0));

    std::function<bool(std::size_t)> rec = [&](std::size_t idx) -> bool {
        if (idx == order.size()) {
            VarSet atom;
            for (std::size_t k = 0; k < order.size(); ++k) {
                auto slots = chosen[k];
                std::sort(slots.begin(), slots.end(),
                          [](const auto& a, const auto& b) { return a.second < b.second; });
                for (std::size_t q = 0; q < slots.size(); ++q)
                    atom.push_back(ev.id({{order[k], static_cast<long>(q) + 1},
                                          slots[q].first, slots[q].second}));
            }
            std::sort(atom.begin(), atom.end());
            found.push_back(std::move(atom));
            return static_cast<long>(found.size()) >= max_count;
        }
        const std::string& id = order[idx];
        const long p = inst.job(id).size;
        auto precedence_ok = [&](long first_slot, long machine) {
            for (std::size_t k = 0; k < idx; ++k) {
                if (!inst.precedence().precedes(order[k], id)) continue;
                const long pred_last = chosen[k].back().second;
                if (pred_last >= first_slot) return false;
                if (mode == Mode::delay && chosen[k].back().first != machine &&
                    first_slot <= pred_last + inst.delays().delay(order[k], id))
                    return false;
            }
            return true;
        };
        std::function<bool(long, long, long)> pick = [&](long machine, long from,
                                                         long remaining) -> bool {
            if (remaining == 0) {
                if (!precedence_ok(chosen[idx].front().second, machine)) return false;
                return rec(idx + 1);
            }
            for (long s = from; s + remaining - 1 <= horizon; ++s) {
                if (busy[static_cast<std::size_t>(machine)][static_cast<std::size_t>(s)]) continue;
                busy[static_cast<std::size_t>(machine)][static_cast<std::size_t>(s)] = 1;
                chosen[idx].push_back({machine, s});
                if (pick(machine, s + 1, remaining - 1)) return true;
                chosen[idx].pop_back();
                busy[static_cast<std::size_t>(machine)][static_cast<std::size_t>(s)] = 0;
            }
            return false;
        };
        for (long i = 1; i <= inst.machines(); ++i)
            if (pick(i, 1, p)) return true;
        return false;
    };
    rec(0);
    return found;
}

}  // namespace hier

struct RunFullResult {
    Schedule schedule;  // complete, after reinsertion
    RunManifest manifest;
};

// End-to-end driver: locate the smallest LP-feasible horizon, round a
// desk-scale hierarchy solution through PARTIAL-SCHEDULE, then reinsert the
// discarded tasks into private slots.
inline RunFullResult run_full(const Instance& inst, Mode mode, const HierarchyParams& params) {
    RunFullResult out;
    out.manifest.mode = mode;
    out.manifest.params = params;
    out.manifest.machines = inst.machines();
    if (inst.jobs().empty()) return out;

    const bool comm = mode == Mode::delay;
    const long total = inst.total_size();
    long t_lp = std::max({(total + inst.machines() - 1) / inst.machines(), max_chain(inst), 1L});
    for (;; ++t_lp) {
        BaseLp base = build_base_lp(inst, t_lp, comm);
        bool ok;
        if (params.sa_level <= 1) {
            ok = solve_lp_feasible(base.lp, BaseLp::bounds_implied).has_value();
        } else {
            ok = solve_feasible(sa_lift(base.lp, params.sa_level, params.sa_caps)).has_value();
        }
        if (ok) break;
    }
    out.manifest.t_lp = t_lp;

    // Desk-scale rounding solution: a uniform mixture over integral points of
    // the smallest horizon that admits any, at or above the LP horizon.
    long t_round = t_lp;
    std::vector<VarSet> atoms;
    LaminarTree tree(t_round);
    EventIndex ev;
    for (;; ++t_round) {
        tree = LaminarTree(t_round);
        ev = EventIndex(inst, tree.padded());
        atoms = hier::enumerate_schedule_atoms(inst, ev, mode, t_round,
                                               std::max(1L, params.mix_atoms));
        if (!atoms.empty()) break;
    }
    out.manifest.t_round = t_round;
    out.manifest.t_padded = tree.padded();

    long budget = params.budget;
    if (budget <= 0) {
        const long k2 = params.k * params.k;
        budget = (total + 1) * ((1L << k2) + 2) * (tree.depth() + 2) + 8;
    }
    std::vector<std::pair<VarSet, Rational>> weighted;
    for (const auto& atom : atoms)
        weighted.push_back({atom, Rational(1, static_cast<long>(atoms.size()))});
    LiftedSolution x = LiftedSolution::from_mixture(static_cast<int>(budget), std::move(weighted));
    out.manifest.initial_level = budget;

    long max_path = 0;
    bool all_within = true;
    hier::Ctx ctx{inst,
                  ev,
                  tree,
                  params,
                  mode,
                  std::max(1L, inst.beta()),
                  tree.depth(),
                  &out.manifest.calls,
                  &max_path,
                  &all_within};
    hier::PartialSets sets;
    for (const auto& j : inst.jobs()) sets.jstar.insert(j.id);
    auto outcome = hier::partial_schedule_call(ctx, tree.root(), std::move(sets), x, 0);

    Schedule partial;
    partial.horizon = tree.padded();
    partial.assignment = outcome.assigned;
    partial.discarded = outcome.discarded;
    out.manifest.pre_reinsert_makespan = makespan(partial);
    out.manifest.total_discarded = static_cast<long>(outcome.discarded.size());
    out.manifest.max_path_conditionings = max_path;
    out.manifest.all_within_bound = all_within;

    out.schedule = reinsert_discarded(partial, inst, mode);
    out.manifest.final_makespan = makespan(out.schedule);
    return out;
}

}  // namespace liftsched
