#pragma once

#include <map>
#include <string>
#include <vector>

#include "liftsched/core.hpp"
#include "liftsched/lp.hpp"

namespace liftsched {

// LP event (a, i, t): task a runs on machine i at slot t.
struct Event {
    TaskRef task;
    long machine = 1;
    long slot = 1;

    friend bool operator==(const Event&, const Event&) = default;
    friend auto operator<=>(const Event&, const Event&) = default;
};

// Bidirectional map between events of a (instance, T) pair and LP variable
// indices. Variable order: tasks by (job id, index), then machine, then slot.
class EventIndex {
public:
    EventIndex() = default;
    EventIndex(const Instance& inst, long T) : machines_(inst.machines()), horizon_(T) {
        tasks_ = inst.all_tasks();
        std::sort(tasks_.begin(), tasks_.end());
        for (std::size_t k = 0; k < tasks_.size(); ++k) task_pos_[tasks_[k]] = static_cast<long>(k);
    }

    long machines() const { return machines_; }
    long horizon() const { return horizon_; }
    const std::vector<TaskRef>& tasks() const { return tasks_; }
    int count() const {
        return static_cast<int>(tasks_.size() * static_cast<std::size_t>(machines_ * horizon_));
    }

    int id(const Event& e) const {
        auto it = task_pos_.find(e.task);
        if (it == task_pos_.end()) throw UnknownTask("event for unknown task");
        return static_cast<int>(it->second * machines_ * horizon_ + (e.machine - 1) * horizon_ +
                                (e.slot - 1));
    }
    Event event(int id) const {
        long per_task = machines_ * horizon_;
        long k = id / per_task, rest = id % per_task;
        return {tasks_[static_cast<std::size_t>(k)], rest / horizon_ + 1, rest % horizon_ + 1};
    }
    std::string name(int id) const {
        Event e = event(id);
        return "x_" + e.task.job + "." + std::to_string(e.task.index) + "_m" +
               std::to_string(e.machine) + "_t" + std::to_string(e.slot);
    }

private:
    long machines_ = 1;
    long horizon_ = 0;
    std::vector<TaskRef> tasks_;
    std::map<TaskRef, long> task_pos_;
};

struct BaseLp {
    LinearProgram lp;
    EventIndex index;
    // Every variable sits in its task's sum-to-one row, so 0 <= x <= 1 is
    // implied and the solver can skip explicit bound rows.
    static constexpr bool bounds_implied = true;
};

namespace detail {

// Task-level precedence edges whose transitive closure is the full task
// order: within-job chains plus last(j) -> first(j') for job edges in the
// transitive reduction of the job order.
inline std::vector<std::pair<TaskRef, TaskRef>> task_edges_reduced(const Instance& inst) {
    std::vector<std::pair<TaskRef, TaskRef>> edges;
    for (const auto& j : inst.jobs())
        for (long i = 1; i < j.size; ++i) edges.push_back({{j.id, i}, {j.id, i + 1}});
    for (const auto& [a, b] : inst.precedence().pairs()) {
        bool reduced = true;
        for (const auto& mid : inst.jobs()) {
            if (mid.id != a && mid.id != b && inst.precedence().precedes(a, mid.id) &&
                inst.precedence().precedes(mid.id, b)) {
                reduced = false;
                break;
            }
        }
        if (reduced) edges.push_back({{a, inst.job(a).size}, {b, 1}});
    }
    return edges;
}

}  // namespace detail

// Scheduling feasibility LP at horizon T: assignment equalities, per-(i,t)
// capacity, prefix precedence rows over the reduced task edges, sibling
// machine-marginal equalities, and (with_comm) the communication rows with a
// per-pair delay window.
inline BaseLp build_base_lp(const Instance& inst, long T, bool with_comm = false,
                            bool full_precedence = false) {
    if (T < 1) throw InvalidInstance("T must be >= 1");
    BaseLp out;
    out.index = EventIndex(inst, T);
    const long m = inst.machines();
    LinearProgram& lp = out.lp;
    for (int v = 0; v < out.index.count(); ++v) lp.add_var(out.index.name(v));

    auto var = [&](const TaskRef& a, long i, long t) { return out.index.id({a, i, t}); };

    // (1) every task scheduled exactly once
    for (const auto& a : out.index.tasks()) {
        LinRow row;
        row.name = "assign_" + a.job + "." + std::to_string(a.index);
        for (long i = 1; i <= m; ++i)
            for (long t = 1; t <= T; ++t) row.terms.push_back({var(a, i, t), 1});
        row.rel = Rel::eq;
        row.rhs = 1;
        lp.add_row(std::move(row));
    }
    // (2) capacity
    for (long i = 1; i <= m; ++i) {
        for (long t = 1; t <= T; ++t) {
            LinRow row;
            row.name = "cap_m" + std::to_string(i) + "_t" + std::to_string(t);
            for (const auto& a : out.index.tasks()) row.terms.push_back({var(a, i, t), 1});
            row.rel = Rel::le;
            row.rhs = 1;
            lp.add_row(std::move(row));
        }
    }
    // (3) prefix precedence: sum_{i,t'<=t+1} x_{a'} <= sum_{i,t'<=t} x_a
    std::vector<std::pair<TaskRef, TaskRef>> edges;
    if (full_precedence) {
        auto tasks = out.index.tasks();
        for (const auto& a : tasks)
            for (const auto& b : tasks)
                if (inst.task_precedes(a, b)) edges.push_back({a, b});
    } else {
        edges = detail::task_edges_reduced(inst);
    }
    for (const auto& [a, b] : edges) {
        for (long t = 1; t + 1 <= T; ++t) {
            LinRow row;
            row.name = "prec_" + a.job + "." + std::to_string(a.index) + "_" + b.job + "." +
                       std::to_string(b.index) + "_t" + std::to_string(t);
            for (long i = 1; i <= m; ++i) {
                for (long t2 = 1; t2 <= t + 1; ++t2) row.terms.push_back({var(b, i, t2), 1});
                for (long t2 = 1; t2 <= t; ++t2) row.terms.push_back({var(a, i, t2), -1});
            }
            row.rel = Rel::le;
            row.rhs = 0;
            lp.add_row(std::move(row));
        }
    }
    // (4) no-migration marginals per unordered sibling pair and machine
    for (const auto& j : inst.jobs()) {
        for (long u = 1; u <= j.size; ++u) {
            for (long v = u + 1; v <= j.size; ++v) {
                for (long i = 1; i <= m; ++i) {
                    LinRow row;
                    row.name = "nomig_" + j.id + "." + std::to_string(u) + "." +
                               std::to_string(v) + "_m" + std::to_string(i);
                    for (long t = 1; t <= T; ++t) {
                        row.terms.push_back({var({j.id, u}, i, t), 1});
                        row.terms.push_back({var({j.id, v}, i, t), -1});
                    }
                    row.rel = Rel::eq;
                    row.rhs = 0;
                    lp.add_row(std::move(row));
                }
            }
        }
    }
    // (8)/general: x_{first(j'),i,t+1} + sum_{i'!=i} sum_{t-c+1..t} x_{last(j),i',t'} <= 1
    if (with_comm) {
        for (const auto& [ja, jb] : inst.precedence().pairs()) {
            const long c = inst.delays().delay(ja, jb);
            if (c == 0) continue;
            TaskRef last{ja, inst.job(ja).size};
            TaskRef first{jb, 1};
            for (long i = 1; i <= m; ++i) {
                for (long t = 1; t + 1 <= T; ++t) {
                    LinRow row;
                    row.name = "comm_" + ja + "_" + jb + "_m" + std::to_string(i) + "_t" +
                               std::to_string(t);
                    row.terms.push_back({var(first, i, t + 1), 1});
                    for (long i2 = 1; i2 <= m; ++i2) {
                        if (i2 == i) continue;
                        for (long t2 = std::max<long>(1, t - c + 1); t2 <= t; ++t2)
                            row.terms.push_back({var(last, i2, t2), 1});
                    }
                    row.rel = Rel::le;
                    row.rhs = 1;
                    lp.add_row(std::move(row));
                }
            }
        }
    }
    return out;
}

}  // namespace liftsched
