#pragma once

#include <algorithm>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "liftsched/errors.hpp"
#include "liftsched/rational.hpp"

namespace liftsched {

struct Job {
    std::string id;
    long size = 1;  // p_j >= 1, unit tasks
};

// One unit of a job's processing. Tasks of a job form the chain
// (j,1) < (j,2) < ... < (j,p_j).
struct TaskRef {
    std::string job;
    long index = 1;  // in [1, p_j]

    friend bool operator==(const TaskRef&, const TaskRef&) = default;
    friend auto operator<=>(const TaskRef&, const TaskRef&) = default;
};

using IdPair = std::pair<std::string, std::string>;

// Transitively closed strict partial order on job ids.
class Precedence {
public:
    Precedence() = default;
    explicit Precedence(std::set<IdPair> closed_pairs) : pairs_(std::move(closed_pairs)) {}

    const std::set<IdPair>& pairs() const { return pairs_; }
    bool precedes(const std::string& a, const std::string& b) const {
        return pairs_.count({a, b}) > 0;
    }
    bool empty() const { return pairs_.empty(); }

private:
    std::set<IdPair> pairs_;
};

// Smallest transitive superset of `pairs`; throws CycleDetected with a witness
// cycle if the result would not be a strict order.
inline Precedence transitive_closure(const std::set<IdPair>& pairs, const std::vector<Job>& jobs) {
    std::map<std::string, int> idx;
    for (const auto& j : jobs) {
        if (!idx.emplace(j.id, static_cast<int>(idx.size())).second)
            throw InvalidInstance("duplicate job id: " + j.id);
    }
    const int n = static_cast<int>(jobs.size());
    std::vector<std::vector<int>> succ(n);
    for (const auto& [a, b] : pairs) {
        auto ia = idx.find(a), ib = idx.find(b);
        if (ia == idx.end()) throw InvalidInstance("precedence references unknown job: " + a);
        if (ib == idx.end()) throw InvalidInstance("precedence references unknown job: " + b);
        succ[ia->second].push_back(ib->second);
    }

    // Reachability by DFS from each node; a node reaching itself is a cycle.
    std::vector<std::vector<bool>> reach(n, std::vector<bool>(n, false));
    for (int s = 0; s < n; ++s) {
        std::vector<int> stack = succ[s];
        while (!stack.empty()) {
            int v = stack.back();
            stack.pop_back();
            if (reach[s][v]) continue;
            reach[s][v] = true;
            for (int w : succ[v]) stack.push_back(w);
        }
    }
    for (int v = 0; v < n; ++v) {
        if (!reach[v][v]) continue;
        // Recover a witness cycle v -> ... -> v along original edges.
        std::vector<std::string> cycle{jobs[v].id};
        int cur = v;
        do {
            for (int w : succ[cur]) {
                if (w == v || reach[w][v]) {
                    cur = w;
                    break;
                }
            }
            cycle.push_back(jobs[cur].id);
        } while (cur != v);
        throw CycleDetected(std::move(cycle));
    }

    std::set<IdPair> closed;
    for (int a = 0; a < n; ++a)
        for (int b = 0; b < n; ++b)
            if (reach[a][b]) closed.insert({jobs[a].id, jobs[b].id});
    return Precedence(std::move(closed));
}

// Communication delays c_{j,j'} for precedence pairs; beta = max over pairs.
// beta == 0 encodes the no-delay problem.
struct DelaySpec {
    long default_delay = 0;
    std::map<IdPair, long> overrides;

    long delay(const std::string& a, const std::string& b) const {
        auto it = overrides.find({a, b});
        return it == overrides.end() ? default_delay : it->second;
    }
};

// Immutable problem instance. Tasks are virtual: they are materialized on
// demand from (job, index) and never stored eagerly.
class Instance {
public:
    Instance() = default;
    Instance(std::vector<Job> jobs, Precedence precedence, DelaySpec delays, long machines)
        : jobs_(std::move(jobs)),
          precedence_(std::move(precedence)),
          delays_(std::move(delays)),
          machines_(machines) {
        if (machines_ < 1) throw InvalidInstance("machines must be >= 1");
        for (std::size_t i = 0; i < jobs_.size(); ++i) {
            const auto& j = jobs_[i];
            if (j.size < 1) throw InvalidInstance("job size must be >= 1: " + j.id);
            if (!index_.emplace(j.id, static_cast<int>(i)).second)
                throw InvalidInstance("duplicate job id: " + j.id);
        }
        for (const auto& [a, b] : precedence_.pairs()) {
            if (!index_.count(a) || !index_.count(b))
                throw InvalidInstance("precedence endpoint not a declared job");
        }
        for (const auto& [pair, c] : delays_.overrides) {
            if (c < 0) throw InvalidInstance("negative delay override");
            if (!precedence_.precedes(pair.first, pair.second))
                throw InvalidInstance("delay override on non-precedence pair: " + pair.first +
                                      " -> " + pair.second);
        }
        if (delays_.default_delay < 0) throw InvalidInstance("negative default delay");
        beta_ = 0;
        for (const auto& [a, b] : precedence_.pairs()) beta_ = std::max(beta_, delays_.delay(a, b));
    }

    const std::vector<Job>& jobs() const { return jobs_; }
    const Precedence& precedence() const { return precedence_; }
    const DelaySpec& delays() const { return delays_; }
    long machines() const { return machines_; }
    long beta() const { return beta_; }

    bool has_job(const std::string& id) const { return index_.count(id) > 0; }
    const Job& job(const std::string& id) const {
        auto it = index_.find(id);
        if (it == index_.end()) throw UnknownTask("unknown job: " + id);
        return jobs_[static_cast<std::size_t>(it->second)];
    }
    int job_index(const std::string& id) const {
        auto it = index_.find(id);
        if (it == index_.end()) throw UnknownTask("unknown job: " + id);
        return it->second;
    }

    bool valid_task(const TaskRef& t) const {
        auto it = index_.find(t.job);
        return it != index_.end() && t.index >= 1 &&
               t.index <= jobs_[static_cast<std::size_t>(it->second)].size;
    }

    long total_size() const {
        long s = 0;
        for (const auto& j : jobs_) s += j.size;
        return s;
    }
    long max_size() const {
        long s = 0;
        for (const auto& j : jobs_) s = std::max(s, j.size);
        return s;
    }

    // Task-level precedence: within-job chain plus the job order lifted to all
    // task pairs of related jobs.
    bool task_precedes(const TaskRef& a, const TaskRef& b) const {
        if (a.job == b.job) return a.index < b.index;
        return precedence_.precedes(a.job, b.job);
    }

    std::vector<TaskRef> all_tasks() const {
        std::vector<TaskRef> out;
        for (const auto& j : jobs_)
            for (long i = 1; i <= j.size; ++i) out.push_back({j.id, i});
        return out;
    }

    // Job ids in topological order; ties broken lexicographically.
    std::vector<std::string> topological_ids() const {
        std::map<std::string, int> missing;
        for (const auto& j : jobs_) missing[j.id] = 0;
        for (const auto& [a, b] : precedence_.pairs()) missing[b]++;
        std::set<std::string> ready;
        for (const auto& [id, deg] : missing)
            if (deg == 0) ready.insert(id);
        std::vector<std::string> order;
        while (!ready.empty()) {
            std::string id = *ready.begin();
            ready.erase(ready.begin());
            order.push_back(id);
            for (const auto& [a, b] : precedence_.pairs()) {
                if (a == id && --missing[b] == 0) ready.insert(b);
            }
        }
        return order;
    }

private:
    std::vector<Job> jobs_;
    Precedence precedence_;
    DelaySpec delays_;
    long machines_ = 1;
    long beta_ = 0;
    std::map<std::string, int> index_;
};

// Maximum total size of jobs along a precedence chain within `subset`
// (Delta of the subset). Zero for the empty subset.
inline long max_chain(const std::vector<Job>& jobs, const Precedence& precedence,
                      const std::set<std::string>& subset) {
    std::map<std::string, long> size_of;
    for (const auto& j : jobs) size_of[j.id] = j.size;
    for (const auto& id : subset)
        if (!size_of.count(id)) throw InvalidInstance("subset references unknown job: " + id);

    // Longest path by total size over the closed relation restricted to subset.
    // In a closed relation a < b implies preds(a) is a proper subset of
    // preds(b), so sorting by predecessor count is a topological order.
    std::vector<std::string> nodes(subset.begin(), subset.end());
    std::map<std::string, long> pred_count;
    for (const auto& id : nodes) {
        long c = 0;
        for (const auto& other : nodes)
            if (other != id && precedence.precedes(other, id)) ++c;
        pred_count[id] = c;
    }
    std::stable_sort(nodes.begin(), nodes.end(), [&](const std::string& a, const std::string& b) {
        return pred_count[a] < pred_count[b];
    });

    std::map<std::string, long> best;  // chain ending at id
    long answer = 0;
    for (const auto& id : nodes) {
        long b = 0;
        for (const auto& other : nodes) {
            if (other != id && precedence.precedes(other, id)) b = std::max(b, best[other]);
        }
        best[id] = b + size_of[id];
        answer = std::max(answer, best[id]);
    }
    return answer;
}

inline long max_chain(const Instance& inst) {
    std::set<std::string> all;
    for (const auto& j : inst.jobs()) all.insert(j.id);
    return max_chain(inst.jobs(), inst.precedence(), all);
}

struct NormalizeReport {
    Rational unit;                         // epsilon * p_max / n
    std::vector<std::string> discarded;    // jobs with p_j < unit
    long total_discarded_size = 0;         // guaranteed <= epsilon * p_max
    std::map<std::string, long> new_size;  // floor(p_j / unit) for survivors
    // N <= n^2/eps after scaling; reported, never rejected
    long task_count = 0;
    bool task_count_within_bound = true;
};

// Size normalization: round sizes down to multiples of epsilon*p_max/n,
// discarding jobs smaller than the unit. Surviving sizes land in [1, n/eps].
inline std::pair<Instance, NormalizeReport> normalize_sizes(const Instance& inst,
                                                            const Rational& epsilon) {
    if (epsilon <= 0 || epsilon >= 1) throw InvalidEpsilon("epsilon must be in (0,1)");
    if (inst.jobs().empty()) throw InvalidInstance("normalize_sizes requires at least one job");

    const long n = static_cast<long>(inst.jobs().size());
    const long p_max = inst.max_size();
    NormalizeReport report;
    report.unit = epsilon * p_max / n;

    std::vector<Job> kept;
    std::set<std::string> survivors;
    for (const auto& j : inst.jobs()) {
        if (Rational(j.size) < report.unit) {
            report.discarded.push_back(j.id);
            report.total_discarded_size += j.size;
            continue;
        }
        long scaled = to_long(floor_rational(Rational(j.size) / report.unit));
        report.new_size[j.id] = scaled;
        kept.push_back({j.id, scaled});
        survivors.insert(j.id);
    }
    // Discarded total is n_discarded * (something < unit) <= n * unit = eps * p_max.
    if (Rational(report.total_discarded_size) > epsilon * p_max)
        throw Error("normalize_sizes internal bound violated");

    std::set<IdPair> pairs;
    for (const auto& [a, b] : inst.precedence().pairs())
        if (survivors.count(a) && survivors.count(b)) pairs.insert({a, b});
    DelaySpec delays = inst.delays();
    for (auto it = delays.overrides.begin(); it != delays.overrides.end();) {
        if (!survivors.count(it->first.first) || !survivors.count(it->first.second))
            it = delays.overrides.erase(it);
        else
            ++it;
    }
    // Restriction of a closed relation to a subset stays closed.
    Instance out(std::move(kept), Precedence(std::move(pairs)), std::move(delays),
                 inst.machines());
    report.task_count = out.total_size();
    report.task_count_within_bound = Rational(report.task_count) <= Rational(n * n) / epsilon;
    return {std::move(out), std::move(report)};
}

}  // namespace liftsched
