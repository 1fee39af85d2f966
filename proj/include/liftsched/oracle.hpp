#pragma once

#include <algorithm>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "liftsched/core.hpp"
#include "liftsched/errors.hpp"
#include "liftsched/list_sched.hpp"
#include "liftsched/schedule.hpp"

namespace liftsched {

// A: fully preemptive (migration allowed), B: preemptive non-migratory,
// C: non-preemptive. Relaxation chain: value(A) <= value(B) <= value(C).
enum class Model { A, B, C };

inline const char* model_name(Model m) { return m == Model::A ? "A" : m == Model::B ? "B" : "C"; }

struct OracleCaps {
    long max_tasks = 16;
    long max_machines = 3;
    long max_horizon = 40;  // for the single-machine discard oracle
};

struct OracleResult {
    long value = 0;
    Schedule witness;
    unsigned long long nodes = 0;
};

namespace oracle_detail {

struct JobInfo {
    std::string id;
    long size;
    std::vector<int> preds;  // closed relation, indices
};

struct Searcher {
    const Instance& inst;
    Model model;
    bool with_delays;
    long m;
    std::vector<JobInfo> jobs;

    long best;  // incumbent makespan
    std::vector<std::vector<std::pair<int, long>>> best_slots;  // per job: (machine, slot) per task
    unsigned long long nodes = 0;

    // search state
    std::vector<long> done;        // tasks placed per job
    std::vector<long> last_slot;   // slot of latest placed task
    std::vector<long> first_mach;  // machine of first task, -1 if none
    std::vector<long> last_mach;   // machine of last task
    std::vector<long> bound_mach;  // B/C: fixed machine, -1 if unbound
    std::vector<std::vector<std::pair<int, long>>> placed;  // per job per task (machine, slot)

    Searcher(const Instance& instance, Model mdl, bool delays)
        : inst(instance), model(mdl), with_delays(delays), m(instance.machines()) {
        for (const auto& j : inst.jobs()) jobs.push_back({j.id, j.size, {}});
        for (std::size_t a = 0; a < jobs.size(); ++a)
            for (std::size_t b = 0; b < jobs.size(); ++b)
                if (inst.precedence().precedes(jobs[a].id, jobs[b].id))
                    jobs[b].preds.push_back(static_cast<int>(a));
    }

    long chain_lower_bound(long t) const {
        // longest remaining chain, processed in index order of a topological
        // sort baked into `jobs` ordering by predecessor counts
        std::vector<std::size_t> order(jobs.size());
        for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
        std::stable_sort(order.begin(), order.end(), [&](std::size_t x, std::size_t y) {
            return jobs[x].preds.size() < jobs[y].preds.size();
        });
        std::vector<long> chain(jobs.size(), 0);
        long bound = 0;
        for (std::size_t k : order) {
            long rem = jobs[k].size - done[k];
            long b = 0;
            for (int p : jobs[k].preds) b = std::max(b, chain[static_cast<std::size_t>(p)]);
            chain[k] = b + rem;
            if (rem > 0) bound = std::max(bound, t - 1 + chain[k]);
        }
        return bound;
    }

    bool job_ready(std::size_t j, long t) const {
        if (done[j] > 0) return true;  // started; within-job chain handled per slot
        for (int p : jobs[j].preds) {
            std::size_t q = static_cast<std::size_t>(p);
            if (done[q] < jobs[q].size || last_slot[q] >= t) return false;
        }
        return true;
    }

    bool delay_ok(std::size_t j, long machine, long t) const {
        if (!with_delays || done[j] > 0) return true;
        for (int p : jobs[j].preds) {
            std::size_t q = static_cast<std::size_t>(p);
            if (last_mach[q] != machine) {
                long c = inst.delays().delay(jobs[q].id, jobs[j].id);
                if (t <= last_slot[q] + c) return false;
            }
        }
        return true;
    }

    void record_incumbent(long value) {
        best = value;
        best_slots = placed;
    }

    // Enumerate per-slot machine assignments, then advance to the next slot.
    void assign_machines(long t, long machine, std::vector<int>& used_jobs) {
        if (nodes > (1ULL << 42)) throw CapExceeded("oracle search exceeded node budget");
        if (machine > m) {
            step_slot(t);
            return;
        }
        ++nodes;

        // Model C: a started, unfinished job bound here must continue.
        for (std::size_t j = 0; j < jobs.size(); ++j) {
            if (model == Model::C && bound_mach[j] == machine && done[j] > 0 &&
                done[j] < jobs[j].size) {
                if (last_slot[j] != t - 1) return;  // contiguity broken: dead branch
                place(j, machine, t, used_jobs);
                assign_machines(t, machine + 1, used_jobs);
                unplace(j, used_jobs);
                return;
            }
        }

        // Option: leave the machine idle.
        assign_machines(t, machine + 1, used_jobs);

        // Machine symmetry: machines are interchangeable, so first uses must
        // happen in index order; a never-used machine beyond maxused+1 stays
        // idle.
        long max_used = 0;
        for (const auto& pl : placed)
            for (const auto& [mc, sl] : pl) max_used = std::max<long>(max_used, mc);
        if (machine > max_used + 1) return;

        for (std::size_t j = 0; j < jobs.size(); ++j) {
            if (done[j] >= jobs[j].size) continue;
            if (std::find(used_jobs.begin(), used_jobs.end(), static_cast<int>(j)) !=
                used_jobs.end())
                continue;
            if (!job_ready(j, t)) continue;
            if (model != Model::A) {
                if (bound_mach[j] >= 0 && bound_mach[j] != machine) continue;
                if (model == Model::C && done[j] > 0 && last_slot[j] != t - 1) continue;
            }
            if (!delay_ok(j, machine, t)) continue;
            place(j, machine, t, used_jobs);
            assign_machines(t, machine + 1, used_jobs);
            unplace(j, used_jobs);
        }
    }

    void place(std::size_t j, long machine, long t, std::vector<int>& used_jobs) {
        placed[j].push_back({static_cast<int>(machine), t});
        ++done[j];
        last_slot[j] = t;
        last_mach[j] = machine;
        if (first_mach[j] < 0) first_mach[j] = machine;
        if (model != Model::A && bound_mach[j] < 0) bound_mach[j] = machine;
        used_jobs.push_back(static_cast<int>(j));
    }
    void unplace(std::size_t j, std::vector<int>& used_jobs) {
        used_jobs.pop_back();
        placed[j].pop_back();
        --done[j];
        if (placed[j].empty()) {
            last_slot[j] = 0;
            last_mach[j] = -1;
            first_mach[j] = -1;
            if (model != Model::A) bound_mach[j] = -1;
        } else {
            last_slot[j] = placed[j].back().second;
            last_mach[j] = placed[j].back().first;
        }
    }

    void step_slot(long t) {
        bool all_done = true;
        long done_until = 0;
        for (std::size_t j = 0; j < jobs.size(); ++j) {
            if (done[j] < jobs[j].size) all_done = false;
            done_until = std::max(done_until, last_slot[j]);
        }
        if (all_done) {
            if (done_until < best) record_incumbent(done_until);
            return;
        }
        if (t >= best - 1) return;  // finishing needs at least one more slot
        long lb = chain_lower_bound(t + 1);
        long rem = 0;
        for (std::size_t j = 0; j < jobs.size(); ++j) rem += jobs[j].size - done[j];
        lb = std::max(lb, t + (rem + m - 1) / m);
        if (lb >= best) return;
        std::vector<int> used;
        assign_machines(t + 1, 1, used);
    }

    OracleResult run(long upper_bound_seed) {
        done.assign(jobs.size(), 0);
        last_slot.assign(jobs.size(), 0);
        first_mach.assign(jobs.size(), -1);
        last_mach.assign(jobs.size(), -1);
        bound_mach.assign(jobs.size(), -1);
        placed.assign(jobs.size(), {});
        best = upper_bound_seed;
        best_slots.clear();
        step_slot(0);

        OracleResult out;
        out.value = best;
        out.nodes = nodes;
        for (std::size_t j = 0; j < best_slots.size(); ++j) {
            auto slots = best_slots[j];
            std::sort(slots.begin(), slots.end(),
                      [](const auto& a, const auto& b) { return a.second < b.second; });
            for (std::size_t k = 0; k < slots.size(); ++k)
                out.witness.assignment[{jobs[j].id, static_cast<long>(k) + 1}] = {
                    slots[k].first, slots[k].second};
        }
        out.witness.horizon = best;
        return out;
    }
};

}  // namespace oracle_detail

// Exact optimal makespan by slot-by-slot branch and bound with fresh-machine
// symmetry breaking; the incumbent is seeded from the Graham baseline.
inline OracleResult opt_makespan(const Instance& inst, Model model, bool with_delays = false,
                                 const OracleCaps& caps = {}) {
    if (inst.total_size() > caps.max_tasks)
        throw CapExceeded("instance exceeds oracle task cap");
    if (inst.machines() > caps.max_machines)
        throw CapExceeded("instance exceeds oracle machine cap");
    if (inst.jobs().empty()) return {};

    Schedule seed = with_delays ? graham_list_comm(inst) : graham_list(inst);
    oracle_detail::Searcher s(inst, model, with_delays);
    auto result = s.run(makespan(seed) + 1);
    if (result.value == makespan(seed) + 1)
        throw Error("oracle failed to match its greedy seed");  // unreachable
    return result;
}

// Independent second strategy: jobs in a fixed topological order, branching
// over whole-job placements; decision search with increasing horizon.
namespace oracle_detail {

struct PlacementSearcher {
    const Instance& inst;
    Model model;
    bool with_delays;
    long m;
    long T = 0;
    unsigned long long nodes = 0;
    std::vector<std::string> order;
    std::vector<std::vector<std::pair<long, long>>> chosen;  // per job: (machine, slot) list
    std::vector<std::vector<char>> busy;                     // [machine][slot]

    PlacementSearcher(const Instance& instance, Model mdl, bool delays)
        : inst(instance), model(mdl), with_delays(delays), m(instance.machines()) {
        order = inst.topological_ids();
    }

    bool precedence_ok(std::size_t idx, long first_slot, long machine_of_first) const {
        const std::string& id = order[idx];
        for (std::size_t k = 0; k < idx; ++k) {
            if (!inst.precedence().precedes(order[k], id)) continue;
            long pred_last = chosen[k].back().second;
            if (pred_last >= first_slot) return false;
            if (with_delays) {
                long pred_mach = chosen[k].back().first;
                if (pred_mach != machine_of_first) {
                    long c = inst.delays().delay(order[k], id);
                    if (first_slot <= pred_last + c) return false;
                }
            }
        }
        return true;
    }

    bool place_job(std::size_t idx) {
        if (idx == order.size()) return true;
        ++nodes;
        if (nodes > (1ULL << 42)) throw CapExceeded("oracle search exceeded node budget");
        const long p = inst.job(order[idx]).size;

        if (model == Model::C) {
            for (long i = 1; i <= m; ++i) {
                for (long s = 1; s + p - 1 <= T; ++s) {
                    bool free = true;
                    for (long k = 0; k < p; ++k)
                        if (busy[static_cast<std::size_t>(i)][static_cast<std::size_t>(s + k)]) {
                            free = false;
                            break;
                        }
                    if (!free || !precedence_ok(idx, s, i)) continue;
                    for (long k = 0; k < p; ++k) {
                        busy[static_cast<std::size_t>(i)][static_cast<std::size_t>(s + k)] = 1;
                        chosen[idx].push_back({i, s + k});
                    }
                    if (place_job(idx + 1)) return true;
                    for (long k = 0; k < p; ++k)
                        busy[static_cast<std::size_t>(i)][static_cast<std::size_t>(s + k)] = 0;
                    chosen[idx].clear();
                }
            }
            return false;
        }
        if (model == Model::B) {
            for (long i = 1; i <= m; ++i) {
                if (!extend_slots(idx, i, 1, p)) continue;
                return true;
            }
            return false;
        }
        // Model A: per-task (machine, slot) with strictly increasing slots.
        return extend_migratory(idx, 1, p);
    }

    // Model B: pick p free slots on machine i in increasing order.
    bool extend_slots(std::size_t idx, long i, long from, long remaining) {
        if (remaining == 0) {
            if (!precedence_ok(idx, chosen[idx].front().second, i)) return false;
            if (place_job(idx + 1)) return true;
            return false;
        }
        for (long s = from; s + remaining - 1 <= T; ++s) {
            if (busy[static_cast<std::size_t>(i)][static_cast<std::size_t>(s)]) continue;
            busy[static_cast<std::size_t>(i)][static_cast<std::size_t>(s)] = 1;
            chosen[idx].push_back({i, s});
            if (extend_slots(idx, i, s + 1, remaining - 1)) return true;
            chosen[idx].pop_back();
            busy[static_cast<std::size_t>(i)][static_cast<std::size_t>(s)] = 0;
        }
        return false;
    }

    bool extend_migratory(std::size_t idx, long from, long remaining) {
        if (remaining == 0) {
            if (!precedence_ok(idx, chosen[idx].front().second, chosen[idx].front().first))
                return false;
            if (place_job(idx + 1)) return true;
            return false;
        }
        for (long s = from; s + remaining - 1 <= T; ++s) {
            for (long i = 1; i <= m; ++i) {
                if (busy[static_cast<std::size_t>(i)][static_cast<std::size_t>(s)]) continue;
                busy[static_cast<std::size_t>(i)][static_cast<std::size_t>(s)] = 1;
                chosen[idx].push_back({i, s});
                if (extend_migratory(idx, s + 1, remaining - 1)) return true;
                chosen[idx].pop_back();
                busy[static_cast<std::size_t>(i)][static_cast<std::size_t>(s)] = 0;
            }
        }
        return false;
    }

    std::optional<Schedule> feasible_at(long horizon) {
        T = horizon;
        chosen.assign(order.size(), {});
        busy.assign(static_cast<std::size_t>(m) + 1,
                    std::vector<char>(static_cast<std::size_t>(T) + 1, 0));
        if (!place_job(0)) return std::nullopt;
        Schedule out;
        out.horizon = T;
        for (std::size_t k = 0; k < order.size(); ++k) {
            auto slots = chosen[k];
            std::sort(slots.begin(), slots.end(),
                      [](const auto& a, const auto& b) { return a.second < b.second; });
            for (std::size_t q = 0; q < slots.size(); ++q)
                out.assignment[{order[k], static_cast<long>(q) + 1}] = {slots[q].first,
                                                                        slots[q].second};
        }
        return out;
    }
};

}  // namespace oracle_detail

inline OracleResult opt_makespan_placement(const Instance& inst, Model model,
                                           bool with_delays = false, const OracleCaps& caps = {}) {
    if (inst.total_size() > caps.max_tasks)
        throw CapExceeded("instance exceeds oracle task cap");
    if (inst.machines() > caps.max_machines)
        throw CapExceeded("instance exceeds oracle machine cap");
    if (inst.jobs().empty()) return {};

    Schedule seed = with_delays ? graham_list_comm(inst) : graham_list(inst);
    long lb = std::max((inst.total_size() + inst.machines() - 1) / inst.machines(),
                       max_chain(inst));
    oracle_detail::PlacementSearcher s(inst, model, with_delays);
    OracleResult out;
    for (long T = lb; T <= makespan(seed); ++T) {
        auto sched = s.feasible_at(T);
        if (sched) {
            out.value = makespan(*sched);
            out.witness = *sched;
            out.witness.horizon = out.value;
            out.nodes = s.nodes;
            return out;
        }
    }
    out.value = makespan(seed);
    out.witness = seed;
    out.nodes = s.nodes;
    return out;
}

}  // namespace liftsched

#include "liftsched/smi.hpp"

namespace liftsched {

enum class DiscardMode { full_jobs, partial_allowed };

struct SmiOracleResult {
    long value = 0;  // minimum discarded units
    SmiSolution witness;
    unsigned long long nodes = 0;
};

namespace oracle_detail {

// In an optimal solution, segments ordered by start can each slide left to
// max(previous end, r_j) without loss, so only those starts are explored.
struct DiscardSearcher {
    const SingleMachineInstance& inst;
    DiscardMode mode;
    std::map<unsigned long long, long> memo;
    unsigned long long nodes = 0;

    DiscardSearcher(const SingleMachineInstance& instance, DiscardMode md)
        : inst(instance), mode(md) {}

    long best(unsigned long mask, long t) {
        const unsigned long long key =
            (static_cast<unsigned long long>(mask) << 8) | static_cast<unsigned long long>(t);
        auto it = memo.find(key);
        if (it != memo.end()) return it->second;
        ++nodes;
        long out = 0;
        for (std::size_t j = 0; j < inst.jobs.size(); ++j) {
            if (mask & (1UL << j)) continue;
            const auto& job = inst.jobs[j];
            const long s = std::max(t, job.release);
            const long room = job.deadline - s;
            if (room < 1) continue;
            const long lmax = std::min(job.size, room);
            const long lmin = mode == DiscardMode::full_jobs ? job.size : 1;
            for (long len = lmin; len <= lmax; ++len)
                out = std::max(out, len + best(mask | (1UL << j), s + len));
        }
        memo[key] = out;
        return out;
    }

    SmiSolution reconstruct() {
        SmiSolution sol;
        unsigned long mask = 0;
        long t = 0;
        for (;;) {
            const long target = best(mask, t);
            if (target == 0) break;
            bool moved = false;
            for (std::size_t j = 0; j < inst.jobs.size() && !moved; ++j) {
                if (mask & (1UL << j)) continue;
                const auto& job = inst.jobs[j];
                const long s = std::max(t, job.release);
                const long room = job.deadline - s;
                if (room < 1) continue;
                const long lmax = std::min(job.size, room);
                const long lmin = mode == DiscardMode::full_jobs ? job.size : 1;
                for (long len = lmin; len <= lmax; ++len) {
                    if (len + best(mask | (1UL << j), s + len) == target) {
                        sol.segments.push_back({job.id, s, len});
                        mask |= (1UL << j);
                        t = s + len;
                        moved = true;
                        break;
                    }
                }
            }
            if (!moved) break;
        }
        return sol;
    }
};

}  // namespace oracle_detail

// Exact minimum of discarded units over single non-preemptive segments inside
// the windows; full_jobs restricts segment lengths to {0, p_j}.
inline SmiOracleResult opt_min_discard(const SingleMachineInstance& inst, DiscardMode mode,
                                       const OracleCaps& caps = {}) {
    inst.check();
    if (inst.horizon > caps.max_horizon) throw CapExceeded("horizon exceeds oracle cap");
    if (inst.jobs.size() > 20) throw CapExceeded("too many jobs for the discard oracle");
    oracle_detail::DiscardSearcher s(inst, mode);
    SmiOracleResult out;
    out.value = inst.total_size() - s.best(0, 0);
    out.witness = s.reconstruct();
    out.nodes = s.nodes;
    if (smi_cost(inst, out.witness) != out.value)
        throw Error("discard oracle witness does not reproduce its value");
    return out;
}

// Independent recomputation: iterative table over (job mask, frontier time),
// filled mask-descending. Same normalization, separately derived code path.
inline SmiOracleResult opt_min_discard_iterative(const SingleMachineInstance& inst,
                                                 DiscardMode mode, const OracleCaps& caps = {}) {
    inst.check();
    if (inst.horizon > caps.max_horizon) throw CapExceeded("horizon exceeds oracle cap");
    const std::size_t n = inst.jobs.size();
    if (n > 16) throw CapExceeded("too many jobs for the iterative discard oracle");
    const long T = inst.horizon;
    const std::size_t masks = 1ULL << n;
    std::vector<std::vector<long>> table(masks, std::vector<long>(static_cast<std::size_t>(T) + 2, 0));

    SmiOracleResult out;
    for (std::size_t mask = masks; mask-- > 0;) {
        for (long t = T + 1; t-- > 0;) {
            long val = 0;
            for (std::size_t j = 0; j < n; ++j) {
                if (mask & (1ULL << j)) continue;
                const auto& job = inst.jobs[j];
                const long s = std::max(t, job.release);
                const long lmax = std::min(job.size, job.deadline - s);
                if (lmax < 1) continue;
                ++out.nodes;
                if (mode == DiscardMode::full_jobs) {
                    if (lmax == job.size)
                        val = std::max(val, job.size + table[mask | (1ULL << j)]
                                                          [static_cast<std::size_t>(s + job.size)]);
                } else {
                    for (long len = 1; len <= lmax; ++len)
                        val = std::max(val, len + table[mask | (1ULL << j)]
                                                       [static_cast<std::size_t>(s + len)]);
                }
            }
            table[mask][static_cast<std::size_t>(t)] = val;
        }
    }
    out.value = inst.total_size() - table[0][0];
    return out;
}

}  // namespace liftsched

#include "liftsched/base_lp.hpp"
#include "liftsched/lifted.hpp"

namespace liftsched {

struct GapRow {
    long T = 0;
    bool lp_mig = false;    // constraints (1)-(3),(5)
    bool lp_nomig = false;  // plus the machine-marginal rows (4)
    bool int_a = false;
    bool int_b = false;
    bool int_c = false;
};

struct GapReportTable {
    std::vector<GapRow> rows;
    std::map<std::string, long> first_feasible;  // -1 when not reached in range
};

// Base-LP vs integral feasibility per horizon, one row per T.
inline GapReportTable lp_gap_report(const Instance& inst, long t_lo, long t_hi,
                                    bool with_delays = false, const OracleCaps& caps = {}) {
    GapReportTable out;
    const long va = opt_makespan(inst, Model::A, with_delays, caps).value;
    const long vb = opt_makespan(inst, Model::B, with_delays, caps).value;
    const long vc = opt_makespan(inst, Model::C, with_delays, caps).value;

    for (long T = t_lo; T <= t_hi; ++T) {
        GapRow row;
        row.T = T;
        BaseLp full = build_base_lp(inst, T, with_delays);
        LinearProgram no_mig;
        no_mig.vars = full.lp.vars;
        for (const auto& r : full.lp.rows)
            if (r.name.rfind("nomig_", 0) != 0) no_mig.rows.push_back(r);
        row.lp_mig = solve_lp_feasible(no_mig, BaseLp::bounds_implied).has_value();
        row.lp_nomig = solve_lp_feasible(full.lp, BaseLp::bounds_implied).has_value();
        row.int_a = va <= T;
        row.int_b = vb <= T;
        row.int_c = vc <= T;
        out.rows.push_back(row);
    }
    auto first = [&](auto get) {
        for (const auto& r : out.rows)
            if (get(r)) return r.T;
        return static_cast<long>(-1);
    };
    out.first_feasible["lp_mig"] = first([](const GapRow& r) { return r.lp_mig; });
    out.first_feasible["lp_nomig"] = first([](const GapRow& r) { return r.lp_nomig; });
    out.first_feasible["int_A"] = first([](const GapRow& r) { return r.int_a; });
    out.first_feasible["int_B"] = first([](const GapRow& r) { return r.int_b; });
    out.first_feasible["int_C"] = first([](const GapRow& r) { return r.int_c; });
    return out;
}

}  // namespace liftsched
