#pragma once

#include <algorithm>
#include <map>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "liftsched/core.hpp"
#include "liftsched/errors.hpp"
#include "liftsched/rng.hpp"
#include "liftsched/schedule.hpp"

namespace liftsched {

constexpr long kDiscarded = -1;

struct DeadlineJob {
    std::string id;
    long size = 1;
    long release = 1;   // first eligible slot; aligned to an interval begin
    long deadline = 1;  // last eligible slot; aligned to an interval end
};

// Deadline scheduling with precedence over a horizon split into p equal
// intervals. Window ends align with interval boundaries and precedence is
// monotone: j < j' implies r_j <= r_j' and d_j <= d_j'.
struct DeadlineInstance {
    std::vector<DeadlineJob> jobs;
    Precedence precedence;
    long machines = 1;
    long horizon = 0;    // T
    long intervals = 1;  // p, divides T
    std::vector<std::vector<char>> capacity;  // capacity[i][t], 1-based in both
    std::optional<long> beta;

    long interval_len() const { return horizon / intervals; }
    long interval_of(long t) const { return (t - 1) / interval_len() + 1; }  // 1..p
    long begin_of(long q) const { return (q - 1) * interval_len() + 1; }
    long end_of(long q) const { return q * interval_len(); }

    const DeadlineJob& job(const std::string& id) const {
        for (const auto& j : jobs)
            if (j.id == id) return j;
        throw UnknownTask("unknown deadline job: " + id);
    }

    bool cap(long i, long t) const {
        return capacity[static_cast<std::size_t>(i)][static_cast<std::size_t>(t)] != 0;
    }

    void check() const {
        if (machines < 1 || horizon < 1 || intervals < 1 || horizon % intervals != 0)
            throw InvalidInstance("bad horizon/interval split");
        if (static_cast<long>(capacity.size()) != machines + 1)
            throw InvalidInstance("capacity must have one profile per machine");
        for (long i = 1; i <= machines; ++i)
            if (static_cast<long>(capacity[static_cast<std::size_t>(i)].size()) != horizon + 1)
                throw InvalidInstance("capacity profile length must equal horizon");
        const long len = interval_len();
        std::set<std::string> ids;
        for (const auto& j : jobs) {
            if (!ids.insert(j.id).second) throw InvalidInstance("duplicate job id: " + j.id);
            if (j.size < 1) throw InvalidInstance("job size must be >= 1");
            if (j.release < 1 || j.deadline > horizon || j.release > j.deadline)
                throw InvalidInstance("bad window for " + j.id);
            if ((j.release - 1) % len != 0 || j.deadline % len != 0)
                throw InvalidInstance("window of " + j.id + " not aligned to intervals");
        }
        for (const auto& [a, b] : precedence.pairs()) {
            const auto& ja = job(a);
            const auto& jb = job(b);
            if (ja.release > jb.release || ja.deadline > jb.deadline)
                throw InvalidInstance("precedence not monotone: " + a + " -> " + b);
        }
        if (beta && *beta < 1) throw InvalidInstance("beta must be >= 1 when present");
    }

    // View as a core instance for schedule validation; comm mode gets unit
    // delays, matching the c = 1 analysis of the comm scheduler.
    Instance as_core(Mode mode) const {
        std::vector<Job> core_jobs;
        for (const auto& j : jobs) core_jobs.push_back({j.id, j.size});
        DelaySpec delays;
        delays.default_delay = mode == Mode::delay ? 1 : 0;
        return Instance(core_jobs, precedence, delays, machines);
    }
};

struct JobTrace {
    long begin = kDiscarded;  // B_j, or kDiscarded
    long complete = 0;        // C_j; a fully discarded job completes at its deadline
    long machine = 0;         // 0 when fully discarded
    long scheduled = 0;       // p'_j
};

struct RunTrace {
    Mode mode = Mode::no_delay;
    std::map<std::string, JobTrace> per_job;
    Schedule schedule;
    std::set<TaskRef> discarded;

    long total_discarded() const { return static_cast<long>(discarded.size()); }
};

namespace deadline_detail {

struct CapView {
    std::vector<std::vector<char>> free;  // mutable working copy

    explicit CapView(const DeadlineInstance& inst) : free(inst.capacity) {}
    bool at(long i, long t) const {
        return free[static_cast<std::size_t>(i)][static_cast<std::size_t>(t)] != 0;
    }
    long count(long i, long lo, long hi) const {
        long c = 0;
        for (long t = lo; t <= hi; ++t) c += at(i, t) ? 1 : 0;
        return c;
    }
    void take(long i, long t) { free[static_cast<std::size_t>(i)][static_cast<std::size_t>(t)] = 0; }
};

inline std::vector<const DeadlineJob*> edf_order(const DeadlineInstance& inst) {
    std::vector<const DeadlineJob*> order;
    for (const auto& j : inst.jobs) order.push_back(&j);
    std::sort(order.begin(), order.end(), [](const DeadlineJob* a, const DeadlineJob* b) {
        return std::tie(a->deadline, a->id) < std::tie(b->deadline, b->id);
    });
    return order;
}

inline bool preds_complete_before(const DeadlineInstance& inst,
                                  const std::map<std::string, JobTrace>& done,
                                  const std::string& id, long t) {
    for (const auto& [a, b] : inst.precedence.pairs()) {
        if (b != id) continue;
        auto it = done.find(a);
        if (it != done.end() && it->second.complete >= t) return false;
    }
    return true;
}

}  // namespace deadline_detail

// EDF+ECT: jobs by nondecreasing deadline (ties by id); B_j is the earliest
// slot in the window with free capacity somewhere and all processed
// predecessors completed before it. Machine choice: earliest completion time
// among machines with p_j free slots before the deadline, else the machine
// with the most free slots, discarding the shortfall. A fully discarded job
// is treated as completing at its deadline.
inline RunTrace edf_ect(const DeadlineInstance& inst) {
    inst.check();
    deadline_detail::CapView cap(inst);
    RunTrace trace;
    trace.mode = Mode::no_delay;
    trace.schedule.horizon = inst.horizon;

    for (const DeadlineJob* jp : deadline_detail::edf_order(inst)) {
        const DeadlineJob& j = *jp;
        JobTrace jt;
        long B = 0;
        for (long t = j.release; t <= j.deadline; ++t) {
            bool has_free = false;
            for (long i = 1; i <= inst.machines; ++i)
                if (cap.at(i, t)) { has_free = true; break; }
            if (!has_free) continue;
            if (!deadline_detail::preds_complete_before(inst, trace.per_job, j.id, t)) continue;
            B = t;
            break;
        }
        if (B == 0) {
            jt.begin = kDiscarded;
            jt.complete = j.deadline;
            for (long k = 1; k <= j.size; ++k) trace.discarded.insert({j.id, k});
            trace.per_job[j.id] = jt;
            continue;
        }
        jt.begin = B;

        std::vector<long> fits;  // M'
        for (long i = 1; i <= inst.machines; ++i)
            if (cap.count(i, B, j.deadline) >= j.size) fits.push_back(i);

        long machine = 0, complete = 0, count = 0;
        if (!fits.empty()) {
            for (long i : fits) {
                long seen = 0, t_star = 0;
                for (long t = B; t <= j.deadline; ++t) {
                    if (cap.at(i, t) && ++seen == j.size) { t_star = t; break; }
                }
                if (machine == 0 || t_star < complete) {
                    machine = i;
                    complete = t_star;
                }
            }
            count = j.size;
        } else {
            long best = -1;
            for (long i = 1; i <= inst.machines; ++i) {
                long c = cap.count(i, B, j.deadline);
                if (c > best) { best = c; machine = i; }
            }
            count = best;
            complete = j.deadline;
        }
        long placed = 0;
        for (long t = B; t <= complete && placed < count; ++t) {
            if (!cap.at(machine, t)) continue;
            cap.take(machine, t);
            trace.schedule.assignment[{j.id, placed + 1}] = {machine, t};
            ++placed;
        }
        for (long k = count + 1; k <= j.size; ++k) trace.discarded.insert({j.id, k});
        jt.machine = machine;
        jt.scheduled = count;
        jt.complete = complete;
        trace.per_job[j.id] = jt;
    }
    return trace;
}

// EDF+ECT with communication guards: tasks go strictly inside (B_j, C_j), so
// no task of a job sits at either endpoint of its active interval.
inline RunTrace edf_ect_comm(const DeadlineInstance& inst) {
    inst.check();
    deadline_detail::CapView cap(inst);
    RunTrace trace;
    trace.mode = Mode::delay;
    trace.schedule.horizon = inst.horizon;

    for (const DeadlineJob* jp : deadline_detail::edf_order(inst)) {
        const DeadlineJob& j = *jp;
        JobTrace jt;
        long B = 0;
        for (long t = j.release; t <= j.deadline; ++t) {
            bool has_free = false;
            for (long i = 1; i <= inst.machines; ++i)
                if (cap.at(i, t)) { has_free = true; break; }
            if (!has_free) continue;
            if (!deadline_detail::preds_complete_before(inst, trace.per_job, j.id, t)) continue;
            B = t;
            break;
        }
        if (B == 0) {
            jt.begin = kDiscarded;
            jt.complete = j.deadline;
            for (long k = 1; k <= j.size; ++k) trace.discarded.insert({j.id, k});
            trace.per_job[j.id] = jt;
            continue;
        }
        jt.begin = B;

        const long lo = B + 1, hi = j.deadline - 1;
        std::vector<long> fits;
        for (long i = 1; i <= inst.machines; ++i)
            if (lo <= hi && cap.count(i, lo, hi) >= j.size) fits.push_back(i);

        long machine = 0, complete = 0, count = 0, fill_hi = 0;
        if (!fits.empty()) {
            long t_star = 0;
            for (long i : fits) {
                long seen = 0, ts = 0;
                for (long t = lo; t <= hi; ++t) {
                    if (cap.at(i, t) && ++seen == j.size) { ts = t; break; }
                }
                if (machine == 0 || ts < t_star) {
                    machine = i;
                    t_star = ts;
                }
            }
            complete = t_star + 1;
            count = j.size;
            fill_hi = t_star;
        } else {
            long best = -1;
            for (long i = 1; i <= inst.machines; ++i) {
                long c = lo <= hi ? cap.count(i, lo, hi) : 0;
                if (c > best) { best = c; machine = i; }
            }
            count = best;
            complete = j.deadline;
            fill_hi = hi;
        }
        long placed = 0;
        for (long t = lo; t <= fill_hi && placed < count; ++t) {
            if (!cap.at(machine, t)) continue;
            cap.take(machine, t);
            trace.schedule.assignment[{j.id, placed + 1}] = {machine, t};
            ++placed;
        }
        for (long k = count + 1; k <= j.size; ++k) trace.discarded.insert({j.id, k});
        jt.machine = machine;
        jt.scheduled = count;
        jt.complete = complete;
        trace.per_job[j.id] = jt;

        for (const auto& [task, pl] : trace.schedule.assignment)
            if (task.job == j.id && (pl.slot == B || pl.slot == complete))
                throw Error("comm scheduler placed a task on an active-interval endpoint");
    }
    return trace;
}

struct AuditFinding {
    std::string family;  // conservation | window | window_discard | blocked_witness
    std::string detail;
};

struct IdleAuditReport {
    Mode mode = Mode::no_delay;
    long checks = 0;
    std::vector<AuditFinding> violations;
    // The C_j := d_j convention for fully discarded jobs is a modeling choice,
    // flagged on every report.
    std::string convention = "fully discarded jobs complete at their deadline";

    bool clean() const { return violations.empty(); }
};

// Structural audits of a run: per-job idle conservation on other machines,
// per-interval idle bounds under availability witnesses, and the blocked-job
// observation (every idle slot that blocks an available job is explained by a
// scheduled predecessor active there on another machine).
inline IdleAuditReport idle_audit(const RunTrace& trace, const DeadlineInstance& inst, Mode mode) {
    if (trace.mode != mode) throw TraceMismatch("trace mode differs from audit mode");
    for (const auto& j : inst.jobs)
        if (!trace.per_job.count(j.id)) throw TraceMismatch("trace missing job " + j.id);
    if (trace.per_job.size() != inst.jobs.size()) throw TraceMismatch("trace has extra jobs");

    IdleAuditReport report;
    report.mode = mode;
    const bool comm = mode == Mode::delay;

    std::set<std::string> all_ids;
    for (const auto& j : inst.jobs) all_ids.insert(j.id);
    std::vector<Job> core_jobs;
    for (const auto& j : inst.jobs) core_jobs.push_back({j.id, j.size});
    const long delta = max_chain(core_jobs, inst.precedence, all_ids);

    // idle = free in the input profile and unused by the run
    auto idle = [&](long i, long t) {
        if (!inst.cap(i, t)) return false;
        for (const auto& [task, pl] : trace.schedule.assignment)
            if (pl.machine == i && pl.slot == t) return false;
        return true;
    };
    std::vector<std::vector<long>> idle_prefix(
        static_cast<std::size_t>(inst.machines) + 1,
        std::vector<long>(static_cast<std::size_t>(inst.horizon) + 1, 0));
    for (long i = 1; i <= inst.machines; ++i)
        for (long t = 1; t <= inst.horizon; ++t)
            idle_prefix[static_cast<std::size_t>(i)][static_cast<std::size_t>(t)] =
                idle_prefix[static_cast<std::size_t>(i)][static_cast<std::size_t>(t - 1)] +
                (idle(i, t) ? 1 : 0);
    auto idle_count = [&](long i, long lo, long hi) {
        if (lo > hi) return 0L;
        return idle_prefix[static_cast<std::size_t>(i)][static_cast<std::size_t>(hi)] -
               idle_prefix[static_cast<std::size_t>(i)][static_cast<std::size_t>(lo - 1)];
    };

    // Family 1: within [B_j, C_j], any other machine has at most p'_j idle
    // slots (p'_j + 2 with comm guards).
    for (const auto& [id, jt] : trace.per_job) {
        if (jt.begin == kDiscarded) continue;
        for (long i = 1; i <= inst.machines; ++i) {
            if (i == jt.machine) continue;
            ++report.checks;
            const long bound = jt.scheduled + (comm ? 2 : 0);
            const long got = idle_count(i, jt.begin, jt.complete);
            if (got > bound) {
                std::ostringstream os;
                os << "job " << id << " active [" << jt.begin << "," << jt.complete
                   << "] machine " << i << ": idle " << got << " > " << bound;
                report.violations.push_back({"conservation", os.str()});
            }
        }
    }

    // Families 2 and 3 over every subinterval of every I_q and machine.
    const long window_bound = comm ? 3 * delta : delta;
    const long discard_bound = comm ? 6 * delta : 2 * delta;
    for (long q = 1; q <= inst.intervals; ++q) {
        const long qb = inst.begin_of(q), qe = inst.end_of(q);
        for (long lo = qb; lo <= qe; ++lo) {
            for (long hi = lo; hi <= qe; ++hi) {
                bool witness_window = false, witness_discard = false;
                for (const auto& j : inst.jobs) {
                    if (j.release > lo || j.deadline < hi) continue;
                    const auto& jt = trace.per_job.at(j.id);
                    const bool fully_discarded = jt.begin == kDiscarded;
                    if (fully_discarded || jt.begin > hi) witness_window = true;
                    if (comm ? (jt.begin > lo || jt.scheduled < j.size)
                             : (jt.scheduled < j.size))
                        witness_discard = true;
                }
                if (!witness_window && !witness_discard) continue;
                for (long i = 1; i <= inst.machines; ++i) {
                    const long got = idle_count(i, lo, hi);
                    if (witness_window) {
                        ++report.checks;
                        if (got > window_bound) {
                            std::ostringstream os;
                            os << "interval [" << lo << "," << hi << "] machine " << i
                               << ": idle " << got << " > " << window_bound;
                            report.violations.push_back({"window", os.str()});
                        }
                    }
                    if (witness_discard) {
                        ++report.checks;
                        if (got > discard_bound) {
                            std::ostringstream os;
                            os << "interval [" << lo << "," << hi << "] machine " << i
                               << ": idle " << got << " > " << discard_bound;
                            report.violations.push_back({"window_discard", os.str()});
                        }
                    }
                }
            }
        }
    }

    // Family 4: an idle slot that blocks an available job is covered by a
    // scheduled predecessor active there. In the no-delay variant the
    // predecessor additionally runs on a different machine; with comm guards
    // the endpoints of a same-machine active interval may themselves idle.
    for (long i = 1; i <= inst.machines; ++i) {
        for (long t = 1; t <= inst.horizon; ++t) {
            if (!idle(i, t)) continue;
            for (const auto& j : inst.jobs) {
                if (j.release > t || j.deadline < t) continue;
                const auto& jt = trace.per_job.at(j.id);
                if (jt.begin != kDiscarded && jt.begin <= t) continue;
                ++report.checks;
                bool covered = false;
                for (const auto& [a, b] : inst.precedence.pairs()) {
                    if (b != j.id) continue;
                    const auto& pt = trace.per_job.at(a);
                    if (pt.begin == kDiscarded) continue;
                    if (pt.begin <= t && t <= pt.complete && (comm || pt.machine != i)) {
                        covered = true;
                        break;
                    }
                }
                if (!covered) {
                    std::ostringstream os;
                    os << "idle (" << i << "," << t << ") blocks " << j.id
                       << " without an active predecessor elsewhere";
                    report.violations.push_back({"blocked_witness", os.str()});
                }
            }
        }
    }
    return report;
}

struct WitnessGenParams {
    long machines = 2;
    long intervals = 2;
    long interval_len = 3;
    long max_jobs = 6;
    long max_size = 3;
    unsigned extra_free_pct = 30;  // chance a non-witness slot is still free
    unsigned prec_pct = 35;        // chance a monotone candidate pair is kept
    unsigned widen_pct = 25;       // chance a window is widened by one interval
    std::optional<long> beta;
};

// Witness-first generation: sample a window-respecting (possibly migratory,
// precedence-ignoring) assignment of all tasks into free slots, then derive
// windows, capacity and monotone precedence from it. The sampled assignment
// certifies the precondition of the discard bounds.
inline DeadlineInstance gen_witness_deadline(std::uint64_t seed,
                                             const WitnessGenParams& params = {}) {
    Rng rng(seed);
    DeadlineInstance inst;
    inst.machines = params.machines;
    inst.intervals = params.intervals;
    inst.horizon = params.intervals * params.interval_len;

    std::vector<std::pair<long, long>> free_slots;
    for (long i = 1; i <= inst.machines; ++i)
        for (long t = 1; t <= inst.horizon; ++t) free_slots.push_back({i, t});
    rng.shuffle(free_slots);

    const long n_jobs = rng.range(1, params.max_jobs);
    std::vector<std::vector<std::pair<long, long>>> witness;
    for (long k = 0; k < n_jobs; ++k) {
        long size = rng.range(1, params.max_size);
        if (static_cast<long>(free_slots.size()) < size) break;
        std::vector<std::pair<long, long>> mine;
        for (long u = 0; u < size; ++u) {
            mine.push_back(free_slots.back());
            free_slots.pop_back();
        }
        witness.push_back(std::move(mine));
    }

    std::vector<std::vector<char>> cap(
        static_cast<std::size_t>(inst.machines) + 1,
        std::vector<char>(static_cast<std::size_t>(inst.horizon) + 1, 0));
    for (const auto& mine : witness)
        for (const auto& [i, t] : mine)
            cap[static_cast<std::size_t>(i)][static_cast<std::size_t>(t)] = 1;
    for (const auto& [i, t] : free_slots)
        if (rng.chance(params.extra_free_pct, 100))
            cap[static_cast<std::size_t>(i)][static_cast<std::size_t>(t)] = 1;
    inst.capacity = std::move(cap);

    for (std::size_t k = 0; k < witness.size(); ++k) {
        DeadlineJob j;
        j.id = "j" + std::string(k < 10 ? "0" : "") + std::to_string(k);
        j.size = static_cast<long>(witness[k].size());
        long lo = inst.horizon, hi = 1;
        for (const auto& [i, t] : witness[k]) {
            lo = std::min(lo, t);
            hi = std::max(hi, t);
        }
        long q_lo = inst.interval_of(lo), q_hi = inst.interval_of(hi);
        if (q_lo > 1 && rng.chance(params.widen_pct, 100)) --q_lo;
        if (q_hi < inst.intervals && rng.chance(params.widen_pct, 100)) ++q_hi;
        j.release = inst.begin_of(q_lo);
        j.deadline = inst.end_of(q_hi);
        inst.jobs.push_back(j);
    }

    // Monotone candidates only; equal-deadline pairs keep id order aligned
    // with the EDF tie-break.
    std::set<IdPair> pairs;
    for (std::size_t a = 0; a < inst.jobs.size(); ++a) {
        for (std::size_t b = 0; b < inst.jobs.size(); ++b) {
            if (a == b) continue;
            const auto& ja = inst.jobs[a];
            const auto& jb = inst.jobs[b];
            if (ja.release > jb.release || ja.deadline > jb.deadline) continue;
            if (ja.deadline == jb.deadline && ja.id > jb.id) continue;
            if (ja.release == jb.release && ja.deadline == jb.deadline && ja.id > jb.id) continue;
            if (rng.chance(params.prec_pct, 100)) pairs.insert({ja.id, jb.id});
        }
    }
    std::vector<Job> core_jobs;
    for (const auto& j : inst.jobs) core_jobs.push_back({j.id, j.size});
    inst.precedence = transitive_closure(pairs, core_jobs);
    inst.beta = params.beta;
    inst.check();
    return inst;
}

}  // namespace liftsched
