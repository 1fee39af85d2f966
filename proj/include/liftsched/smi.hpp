#pragma once

#include <algorithm>
#include <map>
#include <string>
#include <vector>

#include "liftsched/errors.hpp"

namespace liftsched {

// Single-machine throughput problem 1|r_j,d_j|sum p_j U'_j. Windows are
// half-open integer intervals (r_j, d_j]; the conversion to core slot indices
// maps (t, t+p] to slots t+1 .. t+p.
struct SmiJob {
    std::string id;
    long size = 1;
    long release = 0;   // r_j
    long deadline = 1;  // d_j
};

struct SingleMachineInstance {
    std::vector<SmiJob> jobs;
    long horizon = 0;  // T >= max d_j

    const SmiJob& job(const std::string& id) const {
        for (const auto& j : jobs)
            if (j.id == id) return j;
        throw UnknownTask("unknown single-machine job: " + id);
    }
    long total_size() const {
        long s = 0;
        for (const auto& j : jobs) s += j.size;
        return s;
    }
    void check() const {
        std::map<std::string, int> seen;
        for (const auto& j : jobs) {
            if (j.size < 1) throw InvalidInstance("job size must be >= 1: " + j.id);
            if (j.release < 0 || j.deadline < j.release)
                throw InvalidInstance("bad window for job " + j.id);
            if (seen[j.id]++) throw InvalidInstance("duplicate job id: " + j.id);
            if (j.deadline > horizon) throw InvalidInstance("window exceeds horizon: " + j.id);
        }
    }
};

// One processed segment per job: j runs in (start, start + length].
struct SmiSegment {
    std::string job;
    long start = 0;
    long length = 0;
};

struct SmiSolution {
    std::vector<SmiSegment> segments;

    long processed() const {
        long s = 0;
        for (const auto& seg : segments) s += seg.length;
        return s;
    }
};

// Cost = total unprocessed units; throws if the solution is malformed.
inline long smi_cost(const SingleMachineInstance& inst, const SmiSolution& sol) {
    std::map<std::string, long> done;
    std::vector<std::pair<long, long>> used;
    for (const auto& seg : sol.segments) {
        const auto& j = inst.job(seg.job);
        if (seg.length < 0 || seg.length > j.size) throw InvalidInstance("segment too long");
        if (seg.length == 0) continue;
        if (seg.start < j.release || seg.start + seg.length > j.deadline)
            throw InvalidInstance("segment outside window of " + seg.job);
        if (done.count(seg.job)) throw InvalidInstance("job processed twice: " + seg.job);
        done[seg.job] = seg.length;
        used.push_back({seg.start, seg.start + seg.length});
    }
    std::sort(used.begin(), used.end());
    for (std::size_t k = 1; k < used.size(); ++k)
        if (used[k].first < used[k - 1].second) throw InvalidInstance("segments overlap");
    long cost = 0;
    for (const auto& j : inst.jobs) cost += j.size - (done.count(j.id) ? done[j.id] : 0);
    return cost;
}

}  // namespace liftsched
