#pragma once

#include <algorithm>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "liftsched/core.hpp"
#include "liftsched/errors.hpp"
#include "liftsched/schedule.hpp"

namespace liftsched {

namespace detail {

inline std::vector<std::string> checked_order(const Instance& inst,
                                              const std::vector<std::string>* priority_order) {
    std::vector<std::string> order =
        priority_order ? *priority_order : inst.topological_ids();
    if (order.size() != inst.jobs().size())
        throw InvalidOrder("priority order must be a permutation of the jobs");
    std::map<std::string, std::size_t> pos;
    for (std::size_t i = 0; i < order.size(); ++i) {
        inst.job(order[i]);
        if (!pos.emplace(order[i], i).second) throw InvalidOrder("duplicate id in order");
    }
    for (const auto& [a, b] : inst.precedence().pairs())
        if (pos[a] > pos[b]) throw InvalidOrder("order violates precedence: " + a + " before " + b);
    return order;
}

}  // namespace detail

// Graham list scheduling: non-idling, non-preemptive, non-migratory. At each
// slot every free machine takes the highest-priority job whose predecessors
// have all completed; a started job runs to completion on its machine.
inline Schedule graham_list(const Instance& inst,
                            const std::vector<std::string>* priority_order = nullptr) {
    const auto order = detail::checked_order(inst, priority_order);
    const long m = inst.machines();

    std::map<std::string, long> completion;           // C_j once finished
    std::map<std::string, std::pair<long, long>> run; // id -> (machine, start)
    std::vector<long> busy_until(static_cast<std::size_t>(m) + 1, 0);
    Schedule out;

    std::size_t started = 0;
    std::map<std::string, bool> has_started;
    for (long t = 1; started < order.size(); ++t) {
        for (long i = 1; i <= m; ++i) {
            if (busy_until[static_cast<std::size_t>(i)] >= t) continue;
            for (const auto& id : order) {
                if (has_started[id]) continue;
                bool ready = true;
                for (const auto& [a, b] : inst.precedence().pairs()) {
                    if (b != id) continue;
                    auto it = completion.find(a);
                    if (it == completion.end() || it->second >= t) {
                        ready = false;
                        break;
                    }
                }
                if (!ready) continue;
                const long p = inst.job(id).size;
                run[id] = {i, t};
                completion[id] = t + p - 1;
                busy_until[static_cast<std::size_t>(i)] = t + p - 1;
                has_started[id] = true;
                ++started;
                break;
            }
        }
    }
    for (const auto& [id, mt] : run) {
        const long p = inst.job(id).size;
        for (long k = 1; k <= p; ++k) out.assignment[{id, k}] = {mt.first, mt.second + k - 1};
    }
    out.horizon = makespan(out);
    return out;
}

// Graham list scheduling with communication delays: a job may start at t on
// machine i once every predecessor j' satisfies C_{j'} < t, plus the delay
// gap c_{j',j} when j' ran on a different machine. Machine choice minimizes
// the start time, ties to the lowest index.
inline Schedule graham_list_comm(const Instance& inst,
                                 const std::vector<std::string>* priority_order = nullptr) {
    const auto order = detail::checked_order(inst, priority_order);
    const long m = inst.machines();

    std::map<std::string, long> completion;
    std::map<std::string, long> machine_of;
    std::map<std::string, std::pair<long, long>> run;
    std::vector<long> busy_until(static_cast<std::size_t>(m) + 1, 0);
    std::map<std::string, bool> has_started;
    Schedule out;

    std::size_t started = 0;
    for (long t = 1; started < order.size(); ++t) {
        bool placed = true;
        while (placed) {  // several jobs may start at the same slot
            placed = false;
            for (const auto& id : order) {
                if (has_started[id]) continue;
                std::optional<long> pick;
                for (long i = 1; i <= m; ++i) {
                    if (busy_until[static_cast<std::size_t>(i)] >= t) continue;
                    bool ok = true;
                    for (const auto& [a, b] : inst.precedence().pairs()) {
                        if (b != id) continue;
                        auto it = completion.find(a);
                        if (it == completion.end()) { ok = false; break; }
                        long need = it->second;
                        if (machine_of[a] != i) need += inst.delays().delay(a, id);
                        if (t <= need) { ok = false; break; }
                    }
                    if (ok) { pick = i; break; }
                }
                if (!pick) continue;
                const long p = inst.job(id).size;
                run[id] = {*pick, t};
                completion[id] = t + p - 1;
                machine_of[id] = *pick;
                busy_until[static_cast<std::size_t>(*pick)] = t + p - 1;
                has_started[id] = true;
                ++started;
                placed = true;
                break;
            }
        }
    }
    for (const auto& [id, mt] : run) {
        const long p = inst.job(id).size;
        for (long k = 1; k <= p; ++k) out.assignment[{id, k}] = {mt.first, mt.second + k - 1};
    }
    out.horizon = makespan(out);
    return out;
}

}  // namespace liftsched
