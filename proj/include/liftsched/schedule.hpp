#pragma once

#include <algorithm>
#include <map>
#include <set>
#include <string>
#include <vector>

#include "liftsched/core.hpp"
#include "liftsched/errors.hpp"

namespace liftsched {

enum class Mode { no_delay, delay };

inline const char* mode_name(Mode m) { return m == Mode::no_delay ? "no_delay" : "delay"; }

struct Placement {
    long machine = 1;  // in [1, m]
    long slot = 1;     // in [1, horizon]

    friend bool operator==(const Placement&, const Placement&) = default;
    friend auto operator<=>(const Placement&, const Placement&) = default;
};

// Partial map from tasks to (machine, slot) plus a discarded-task set.
// Immutable by convention: operations return new values.
struct Schedule {
    std::map<TaskRef, Placement> assignment;
    std::set<TaskRef> discarded;
    long horizon = 0;  // T

    bool empty() const { return assignment.empty(); }
};

// Latest occupied slot; 0 if nothing is assigned.
inline long makespan(const Schedule& s) {
    long m = 0;
    for (const auto& [task, pl] : s.assignment) m = std::max(m, pl.slot);
    return m;
}

struct Violation {
    enum class Kind { capacity, migration, precedence, comm_delay };
    Kind kind;
    std::vector<TaskRef> tasks;
    std::vector<long> slots;
    std::string detail;
};

inline const char* violation_kind_name(Violation::Kind k) {
    switch (k) {
        case Violation::Kind::capacity: return "capacity";
        case Violation::Kind::migration: return "migration";
        case Violation::Kind::precedence: return "precedence";
        case Violation::Kind::comm_delay: return "comm_delay";
    }
    return "?";
}

struct ValidationReport {
    Mode mode = Mode::no_delay;
    std::vector<Violation> violations;

    bool valid() const { return violations.empty(); }
};

// Checks Definition-style validity over the non-discarded assigned tasks:
// distinct (machine, slot) per task, siblings on one machine, strict slot
// order across task precedence and, in delay mode, the communication-delay
// constraint on (last task of j, first task of j') pairs.
inline ValidationReport validate(const Schedule& s, const Instance& inst, Mode mode) {
    ValidationReport report;
    report.mode = mode;

    for (const auto& [task, pl] : s.assignment) {
        if (!inst.valid_task(task))
            throw UnknownTask("schedule assigns unknown task " + task.job + "." +
                              std::to_string(task.index));
        if (pl.machine < 1 || pl.machine > inst.machines() || pl.slot < 1 ||
            pl.slot > s.horizon)
            report.violations.push_back({Violation::Kind::capacity,
                                         {task},
                                         {pl.slot},
                                         "placement outside [1,m] x [1,horizon]"});
    }
    for (const auto& task : s.discarded) {
        if (!inst.valid_task(task))
            throw UnknownTask("schedule discards unknown task " + task.job + "." +
                              std::to_string(task.index));
        if (s.assignment.count(task))
            report.violations.push_back({Violation::Kind::capacity,
                                         {task},
                                         {},
                                         "task both assigned and discarded"});
    }

    // Capacity: no two tasks on one (machine, slot).
    std::map<Placement, TaskRef> seen;
    for (const auto& [task, pl] : s.assignment) {
        auto [it, fresh] = seen.emplace(pl, task);
        if (!fresh)
            report.violations.push_back(
                {Violation::Kind::capacity, {it->second, task}, {pl.slot, pl.slot}, "shared slot"});
    }

    // Group assigned tasks by job, ordered by index.
    std::map<std::string, std::vector<std::pair<long, Placement>>> by_job;
    for (const auto& [task, pl] : s.assignment) by_job[task.job].push_back({task.index, pl});
    for (auto& [job, tasks] : by_job) std::sort(tasks.begin(), tasks.end());

    // No-migration: siblings share the machine.
    for (const auto& [job, tasks] : by_job) {
        for (std::size_t i = 1; i < tasks.size(); ++i) {
            if (tasks[i].second.machine != tasks[0].second.machine) {
                report.violations.push_back({Violation::Kind::migration,
                                             {{job, tasks[0].first}, {job, tasks[i].first}},
                                             {tasks[0].second.slot, tasks[i].second.slot},
                                             "job split across machines"});
                break;
            }
        }
    }

    // Precedence within a job: slots strictly increase with the index.
    for (const auto& [job, tasks] : by_job) {
        for (std::size_t i = 1; i < tasks.size(); ++i) {
            if (tasks[i].second.slot <= tasks[i - 1].second.slot)
                report.violations.push_back({Violation::Kind::precedence,
                                             {{job, tasks[i - 1].first}, {job, tasks[i].first}},
                                             {tasks[i - 1].second.slot, tasks[i].second.slot},
                                             "within-job order"});
        }
    }
    // Precedence across jobs: every assigned task of j before every assigned
    // task of j'. Equivalent check: max slot of j < min slot of j'.
    for (const auto& [a, b] : inst.precedence().pairs()) {
        auto ia = by_job.find(a), ib = by_job.find(b);
        if (ia == by_job.end() || ib == by_job.end()) continue;
        auto max_a = std::max_element(ia->second.begin(), ia->second.end(),
                                      [](const auto& x, const auto& y) {
                                          return x.second.slot < y.second.slot;
                                      });
        auto min_b = std::min_element(ib->second.begin(), ib->second.end(),
                                      [](const auto& x, const auto& y) {
                                          return x.second.slot < y.second.slot;
                                      });
        if (max_a->second.slot >= min_b->second.slot)
            report.violations.push_back({Violation::Kind::precedence,
                                         {{a, max_a->first}, {b, min_b->first}},
                                         {max_a->second.slot, min_b->second.slot},
                                         "cross-job order"});
    }

    if (mode == Mode::delay) {
        // For j < j' with the last task of j and the first task of j' both
        // assigned on different machines, require a gap larger than c_{j,j'}.
        for (const auto& [a, b] : inst.precedence().pairs()) {
            TaskRef last_a{a, inst.job(a).size};
            TaskRef first_b{b, 1};
            auto ita = s.assignment.find(last_a);
            auto itb = s.assignment.find(first_b);
            if (ita == s.assignment.end() || itb == s.assignment.end()) continue;
            if (ita->second.machine == itb->second.machine) continue;
            long c = inst.delays().delay(a, b);
            if (itb->second.slot <= ita->second.slot + c)
                report.violations.push_back({Violation::Kind::comm_delay,
                                             {last_a, first_b},
                                             {ita->second.slot, itb->second.slot},
                                             "communication delay " + std::to_string(c)});
        }
    }
    return report;
}

// Gives every discarded task private new slots (1 in no-delay mode, 2*beta+1
// in delay mode with the task mid-block) at the earliest position compatible
// with its precedence constraints; the rest of the timeline shifts right.
// The makespan grows by exactly |discarded| resp. (2*beta+1)*|discarded|.
inline Schedule reinsert_discarded(const Schedule& s, const Instance& inst, Mode mode) {
    const long beta = inst.beta();
    const long block = mode == Mode::no_delay ? 1 : 2 * beta + 1;

    Schedule out = s;
    out.discarded.clear();

    // Topological order over the task-level precedence, ties by (job, index).
    // A partial order is not a weak ordering, so pick minimal elements
    // explicitly instead of sorting.
    std::set<TaskRef> left(s.discarded.begin(), s.discarded.end());
    std::vector<TaskRef> pending;
    while (!left.empty()) {
        auto it = std::find_if(left.begin(), left.end(), [&](const TaskRef& t) {
            return std::none_of(left.begin(), left.end(), [&](const TaskRef& o) {
                return o != t && inst.task_precedes(o, t);
            });
        });
        pending.push_back(*it);
        left.erase(it);
    }

    for (const TaskRef& task : pending) {
        long max_pred = 0;
        bool tail = true;
        for (const auto& [other, pl] : out.assignment) {
            if (inst.task_precedes(other, task)) max_pred = std::max(max_pred, pl.slot);
        }
        const long at = max_pred + 1;
        for (auto& [other, pl] : out.assignment) {
            if (pl.slot >= at) {
                pl.slot += block;
                tail = false;
            }
        }
        long machine = 1;
        for (const auto& [other, pl] : out.assignment) {
            if (other.job == task.job) {
                machine = pl.machine;
                break;
            }
        }
        // Mid-block placement guards both sides; when nothing follows, the
        // task takes the block's last slot so the makespan accounting stays
        // exact.
        long slot = at;
        if (mode == Mode::delay) slot = tail ? at + 2 * beta : at + beta;
        out.assignment[task] = {machine, slot};
        out.horizon += block;
    }
    return out;
}

}  // namespace liftsched
