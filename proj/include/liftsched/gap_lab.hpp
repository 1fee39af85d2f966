#pragma once

#include <algorithm>
#include <map>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "liftsched/core.hpp"
#include "liftsched/lp.hpp"
#include "liftsched/oracle.hpp"
#include "liftsched/rng.hpp"
#include "liftsched/schedule.hpp"
#include "liftsched/smi.hpp"

namespace liftsched {

// Model-gap family A vs B: m+1 jobs of length m on m machines, no precedence.
// Migration packs them into m+1 slots; without it the makespan doubles.
inline Instance gen_model_gap_ab(long m) {
    if (m < 2) throw InvalidInstance("AB family needs m >= 2");
    std::vector<Job> jobs;
    for (long k = 1; k <= m + 1; ++k) jobs.push_back({"j" + std::to_string(k), m});
    return Instance(std::move(jobs), Precedence{}, DelaySpec{}, m);
}

namespace gap_detail {

inline std::vector<Job> bc_jobs() {
    std::vector<Job> jobs;
    for (int i = 1; i <= 6; ++i) jobs.push_back({"u" + std::to_string(i), 1});
    jobs.push_back({"w", 2});
    return jobs;
}

inline Instance bc_instance(const std::set<IdPair>& pairs) {
    auto jobs = bc_jobs();
    return Instance(jobs, transitive_closure(pairs, jobs), DelaySpec{}, 2);
}

}  // namespace gap_detail

// Certified B-vs-C witness: 6 unit jobs plus one length-2 job on 2 machines
// with OPT_C / OPT_B = 5/4. Found by the seeded search below and kept as a
// constant so the certificate is reproducible without re-searching.
inline Instance gen_model_gap_bc() {
    return gap_detail::bc_instance({{"u1", "u2"},
                                    {"u1", "u3"},
                                    {"u1", "u4"},
                                    {"u1", "u6"},
                                    {"u2", "u4"},
                                    {"u3", "u4"},
                                    {"u3", "u5"},
                                    {"u4", "u6"}});
}

// Seeded search over the 6-unit-plus-long-job family; returns the first
// oracle-certified instance with OPT_C/OPT_B >= 5/4.
inline Instance search_model_gap_bc(std::uint64_t max_seeds = 4000,
                                    const OracleCaps& caps = {}) {
    const auto jobs = gap_detail::bc_jobs();
    std::vector<IdPair> ordered;
    for (int i = 1; i <= 6; ++i)
        for (int j = i + 1; j <= 6; ++j)
            ordered.push_back({"u" + std::to_string(i), "u" + std::to_string(j)});
    for (int i = 1; i <= 6; ++i) {
        ordered.push_back({"u" + std::to_string(i), "w"});
        ordered.push_back({"w", "u" + std::to_string(i)});
    }
    for (std::uint64_t seed = 1; seed <= max_seeds; ++seed) {
        Rng rng(seed);
        std::set<IdPair> pairs;
        for (const auto& pr : ordered) {
            const bool with_w = pr.first == "w" || pr.second == "w";
            if (rng.chance(with_w ? 25 : 30, 100)) pairs.insert(pr);
        }
        bool contradictory = false;
        for (int i = 1; i <= 6 && !contradictory; ++i) {
            std::string u = "u" + std::to_string(i);
            if (pairs.count({u, "w"}) && pairs.count({"w", u})) contradictory = true;
        }
        if (contradictory) continue;
        Instance inst;
        try {
            inst = gap_detail::bc_instance(pairs);
        } catch (const CycleDetected&) {
            continue;
        }
        const long b = opt_makespan(inst, Model::B, false, caps).value;
        const long c = opt_makespan(inst, Model::C, false, caps).value;
        if (4 * c >= 5 * b) return inst;
    }
    throw WitnessSearchFailed("no B-vs-C gap witness within the seed budget");
}

// Tree gap instance: 2^{L+1}-1 jobs forming a full binary tree of laminar
// windows; the level-l job k has size 2^{L-l} and window
// ((L+1)(k-1)2^{L-l}, (L+1)k2^{L-l}].
inline SingleMachineInstance gen_tree_instance(long L, bool* warned_not_pow2 = nullptr) {
    if (L < 0) throw InvalidInstance("L must be >= 0");
    if (warned_not_pow2) *warned_not_pow2 = (L + 1) & L;  // L+1 not a power of two
    SingleMachineInstance inst;
    inst.horizon = (L + 1) * (1L << L);
    for (long level = 0; level <= L; ++level) {
        const long size = 1L << (L - level);
        for (long k = 1; k <= (1L << level); ++k) {
            SmiJob j;
            j.id = "v" + std::to_string(level) + "_" + std::to_string(k);
            j.size = size;
            j.release = (L + 1) * (k - 1) * size;
            j.deadline = (L + 1) * k * size;
            inst.jobs.push_back(j);
        }
    }
    inst.check();
    return inst;
}

// Chain-job reduction: J plus T unit chain jobs with j < j' iff d_j <= r_j',
// on two machines.
struct ChainReduced {
    Instance instance;
    long horizon = 0;  // T of the source problem
    std::vector<std::string> chain_ids;
};

inline ChainReduced chain_reduce(const SingleMachineInstance& smi) {
    smi.check();
    for (const auto& j : smi.jobs)
        if (j.deadline > smi.horizon) throw HorizonTooSmall("window beyond T");
    const long T = smi.horizon;

    struct Windowed {
        std::string id;
        long size, release, deadline;
    };
    std::vector<Windowed> all;
    for (const auto& j : smi.jobs) all.push_back({j.id, j.size, j.release, j.deadline});
    ChainReduced out;
    out.horizon = T;
    for (long t = 1; t <= T; ++t) {
        std::string id = "chain_" + std::string(t < 10 ? "000" : t < 100 ? "00" : t < 1000 ? "0" : "") +
                         std::to_string(t);
        out.chain_ids.push_back(id);
        all.push_back({id, 1, t - 1, t});
    }
    std::vector<Job> jobs;
    for (const auto& w : all) jobs.push_back({w.id, w.size});
    std::set<IdPair> pairs;
    for (const auto& a : all)
        for (const auto& b : all)
            if (a.id != b.id && a.deadline <= b.release) pairs.insert({a.id, b.id});
    Precedence closed = transitive_closure(pairs, jobs);
    out.instance = Instance(std::move(jobs), std::move(closed), DelaySpec{}, 2);
    return out;
}

// Forward map: a single-machine solution of cost c becomes a complete
// two-machine schedule of makespan at most T + c. The chain sits on machine 2
// and segments keep their positions on machine 1; missing units of partially
// processed jobs extend their segment in fresh adjacent slots, and fully
// discarded jobs go into a free machine-1 run inside their window or into
// fresh slots at a block boundary.
inline Schedule smi_to_two_machine(const SingleMachineInstance& smi, const ChainReduced& red,
                                   const SmiSolution& sol) {
    const long cost = smi_cost(smi, sol);  // validates the solution
    const long T = red.horizon;

    struct Column {
        long chain = 0;  // chain index carried on machine 2, 0 for fresh slots
        std::string m1;  // machine-1 job id, empty when idle
        std::string m2;  // machine-2 job id when a freed chain cell is reused
    };
    std::vector<Column> cols(static_cast<std::size_t>(T));
    for (long t = 1; t <= T; ++t) cols[static_cast<std::size_t>(t - 1)].chain = t;
    std::map<std::string, long> placed;
    for (const auto& seg : sol.segments) {
        for (long u = 1; u <= seg.length; ++u)
            cols[static_cast<std::size_t>(seg.start + u - 1)].m1 = seg.job;
        placed[seg.job] = seg.length;
    }

    // Partial jobs: complete the block right after its own segment. The
    // boundary at a segment end is never interior to another segment.
    for (const auto& j : smi.jobs) {
        const long have = placed.count(j.id) ? placed[j.id] : 0;
        if (have == 0 || have == j.size) continue;
        std::size_t end = 0;
        for (std::size_t c = 0; c < cols.size(); ++c)
            if (cols[c].m1 == j.id) end = c;
        cols.insert(cols.begin() + static_cast<std::ptrdiff_t>(end) + 1,
                    static_cast<std::size_t>(j.size - have), Column{0, j.id});
    }

    // Fully discarded jobs, earliest deadline first.
    std::vector<const SmiJob*> missing;
    for (const auto& j : smi.jobs)
        if (!placed.count(j.id)) missing.push_back(&j);
    std::sort(missing.begin(), missing.end(), [](const SmiJob* a, const SmiJob* b) {
        return std::tie(a->deadline, a->release, a->id) <
               std::tie(b->deadline, b->release, b->id);
    });
    for (const SmiJob* jp : missing) {
        const SmiJob& j = *jp;
        // window in column coordinates: strictly after chain r_j, strictly
        // before chain d_j + 1
        std::ptrdiff_t lo = -1, hi = static_cast<std::ptrdiff_t>(cols.size());
        for (std::size_t c = 0; c < cols.size(); ++c) {
            if (j.release > 0 && cols[c].chain == j.release) lo = static_cast<std::ptrdiff_t>(c);
            if (cols[c].chain == j.deadline + 1) hi = static_cast<std::ptrdiff_t>(c);
        }
        // clamp by already-placed related jobs; predecessors are always
        // placed first because their deadlines are strictly smaller
        for (std::size_t c = 0; c < cols.size(); ++c) {
            for (const std::string* other : {&cols[c].m1, &cols[c].m2}) {
                if (other->empty() || *other == j.id) continue;
                if (red.instance.precedence().precedes(*other, j.id))
                    lo = std::max(lo, static_cast<std::ptrdiff_t>(c));
                if (red.instance.precedence().precedes(j.id, *other))
                    hi = std::min(hi, static_cast<std::ptrdiff_t>(c));
            }
        }
        // (a) a free machine-1 run of length p_j inside the window
        std::ptrdiff_t run_start = -1;
        long run = 0;
        for (std::ptrdiff_t c = lo + 1; c < hi; ++c) {
            if (cols[static_cast<std::size_t>(c)].m1.empty()) {
                if (run == 0) run_start = c;
                if (++run == j.size) break;
            } else {
                run = 0;
            }
        }
        if (run == j.size) {
            for (long u = 0; u < j.size; ++u)
                cols[static_cast<std::size_t>(run_start + u)].m1 = j.id;
            continue;
        }
        // (b) fresh slots at a boundary that does not split a block on
        // either machine
        std::ptrdiff_t at = -2;
        for (std::ptrdiff_t c = lo; c < hi && at == -2; ++c) {
            bool interior = false;
            if (c >= 0 && c + 1 < static_cast<std::ptrdiff_t>(cols.size())) {
                const auto& here = cols[static_cast<std::size_t>(c)];
                const auto& next = cols[static_cast<std::size_t>(c + 1)];
                interior = (!here.m1.empty() && here.m1 == next.m1) ||
                           (!here.m2.empty() && here.m2 == next.m2);
            }
            if (!interior) at = c;
        }
        if (at >= -1) {
            cols.insert(cols.begin() + at + 1, static_cast<std::size_t>(j.size), Column{0, j.id});
            continue;
        }
        // (c) the window sits inside one machine-1 block: vacate the chains
        // from the deadline through the block's end onto fresh columns after
        // it and run the job on machine 2 in the freed cells.
        std::ptrdiff_t block_end = hi;
        const std::string blocker = cols[static_cast<std::size_t>(hi)].m1;
        while (block_end + 1 < static_cast<std::ptrdiff_t>(cols.size()) &&
               cols[static_cast<std::size_t>(block_end + 1)].m1 == blocker)
            ++block_end;
        std::vector<long> vacated;
        for (std::ptrdiff_t c = hi; c <= block_end; ++c) {
            if (cols[static_cast<std::size_t>(c)].chain > 0) {
                vacated.push_back(cols[static_cast<std::size_t>(c)].chain);
                cols[static_cast<std::size_t>(c)].chain = 0;
            }
        }
        // job onto machine 2 in freed consecutive cells ending at the block
        // end, extended by fresh columns if the freed span is too short
        std::vector<Column> tail;
        long need = j.size;
        std::ptrdiff_t fill = block_end;
        while (need > 0 && fill > lo && cols[static_cast<std::size_t>(fill)].chain == 0 &&
               cols[static_cast<std::size_t>(fill)].m2.empty()) {
            cols[static_cast<std::size_t>(fill)].m2 = j.id;
            --fill;
            --need;
        }
        for (long u = 0; u < need; ++u) tail.push_back(Column{0, "", j.id});
        for (long t : vacated) tail.push_back(Column{t, "", ""});
        cols.insert(cols.begin() + block_end + 1, tail.begin(), tail.end());
    }

    Schedule out;
    out.horizon = static_cast<long>(cols.size());
    std::map<std::string, long> next_index;
    for (std::size_t c = 0; c < cols.size(); ++c) {
        const long slot = static_cast<long>(c) + 1;
        if (cols[c].chain > 0)
            out.assignment[{red.chain_ids[static_cast<std::size_t>(cols[c].chain - 1)], 1}] = {2,
                                                                                               slot};
        else if (!cols[c].m2.empty())
            out.assignment[{cols[c].m2, ++next_index[cols[c].m2]}] = {2, slot};
        if (!cols[c].m1.empty()) out.assignment[{cols[c].m1, ++next_index[cols[c].m1]}] = {1, slot};
    }
    if (makespan(out) > T + cost) throw Error("forward conversion exceeded the makespan bound");
    auto check = validate(out, red.instance, Mode::no_delay);
    if (!check.valid()) throw Error("forward conversion produced an invalid schedule");
    return out;
}

// Backward map: a complete valid non-preemptive two-machine schedule of
// makespan T + d yields a single-machine solution of cost at most 2d.
inline SmiSolution two_machine_to_smi(const SingleMachineInstance& smi, const ChainReduced& red,
                                      const Schedule& schedule) {
    auto report = validate(schedule, red.instance, Mode::no_delay);
    if (!report.valid()) throw InvalidInstance("schedule for the reduced instance is invalid");
    for (const auto& j : red.instance.jobs())
        for (long u = 1; u <= j.size; ++u)
            if (!schedule.assignment.count({j.id, u}))
                throw InvalidInstance("backward conversion needs a complete schedule");

    // Non-preemptive shape: each source job occupies consecutive slots.
    std::map<std::string, std::vector<long>> slots_of;
    for (const auto& [task, pl] : schedule.assignment) slots_of[task.job].push_back(pl.slot);
    for (const auto& j : smi.jobs) {
        auto& slots = slots_of[j.id];
        std::sort(slots.begin(), slots.end());
        for (std::size_t k = 1; k < slots.size(); ++k)
            if (slots[k] != slots[k - 1] + 1)
                throw InvalidInstance("backward conversion needs a non-preemptive schedule");
    }

    // Keep exactly the slots carrying chain jobs; relabel them 1..T.
    std::set<long> kept;
    for (const auto& id : red.chain_ids) kept.insert(slots_of[id].front());
    std::map<long, long> new_label;
    long next = 1;
    for (long s : kept) new_label[s] = next++;

    SmiSolution out;
    for (const auto& j : smi.jobs) {
        std::vector<long> surviving;
        for (long s : slots_of[j.id])
            if (kept.count(s)) surviving.push_back(new_label[s]);
        if (surviving.empty()) continue;
        for (std::size_t k = 1; k < surviving.size(); ++k)
            if (surviving[k] != surviving[k - 1] + 1)
                throw Error("slot removal fragmented a job");
        out.segments.push_back({j.id, surviving.front() - 1,
                                static_cast<long>(surviving.size())});
    }
    const long cost = smi_cost(smi, out);
    const long extra = makespan(schedule) - red.horizon;
    if (cost > 2 * extra) throw Error("backward conversion exceeded the cost bound");
    return out;
}

// Aligned placement pairs D: job j starting at t in [r_j, d_j), t a multiple
// of p_j, occupying (t, t + p_j].
struct PlacementVar {
    std::string job;
    long start = 0;

    friend bool operator==(const PlacementVar&, const PlacementVar&) = default;
    friend auto operator<=>(const PlacementVar&, const PlacementVar&) = default;
};

inline std::vector<PlacementVar> aligned_domain(const SingleMachineInstance& smi) {
    std::vector<PlacementVar> out;
    for (const auto& j : smi.jobs)
        for (long t = j.release; t + j.size <= j.deadline; t += j.size)
            out.push_back({j.id, t});
    return out;
}

// True iff some job repeats or two placement intervals overlap.
inline bool check_contradiction(const SingleMachineInstance& smi,
                                const std::vector<PlacementVar>& s) {
    for (std::size_t a = 0; a < s.size(); ++a) {
        const long pa = smi.job(s[a].job).size;
        for (std::size_t b = a + 1; b < s.size(); ++b) {
            if (s[a].job == s[b].job) return true;
            const long pb = smi.job(s[b].job).size;
            if (s[a].start < s[b].start + pb && s[b].start < s[a].start + pa) return true;
        }
    }
    return false;
}

// Closed-form lifted solution: x_S = ((1-eps')/(L+1))^{|S|} on
// contradiction-free sets, 0 otherwise.
class ClosedFormSolution {
public:
    ClosedFormSolution(long L, Rational eps_prime, SingleMachineInstance tree)
        : L_(L), eps_prime_(std::move(eps_prime)), tree_(std::move(tree)) {
        if (eps_prime_ <= 0 || eps_prime_ >= 1) throw InvalidEpsilon("eps' must be in (0,1)");
        base_ = (1 - eps_prime_) / (L_ + 1);
    }

    long L() const { return L_; }
    const Rational& eps_prime() const { return eps_prime_; }
    const SingleMachineInstance& tree() const { return tree_; }

    Rational value(const std::vector<PlacementVar>& s) const {
        if (check_contradiction(tree_, s)) return 0;
        Rational v = 1;
        for (std::size_t k = 0; k < s.size(); ++k) v *= base_;
        return v;
    }

private:
    long L_;
    Rational eps_prime_;
    SingleMachineInstance tree_;
    Rational base_;
};

inline ClosedFormSolution sa_closed_form(long L, const Rational& eps_prime) {
    return ClosedFormSolution(L, eps_prime, gen_tree_instance(L));
}

// LP (objective-bounded) for the single-machine problem. General mode uses
// variables x_{j,t,p'} over all partial lengths; aligned mode restricts to
// the domain D and requires (1-eps)T throughput with B = eps T.
inline LinearProgram build_single_machine_lp(const SingleMachineInstance& smi, const Rational& B,
                                             bool aligned_only) {
    smi.check();
    LinearProgram lp;
    struct VarInfo {
        std::string job;
        long start, len;
    };
    std::vector<VarInfo> vars;
    if (aligned_only) {
        for (const auto& pv : aligned_domain(smi)) {
            vars.push_back({pv.job, pv.start, smi.job(pv.job).size});
            lp.add_var("x_" + pv.job + "_t" + std::to_string(pv.start));
        }
    } else {
        for (const auto& j : smi.jobs)
            for (long len = 1; len <= j.size; ++len)
                for (long t = j.release; t + len <= j.deadline; ++t) {
                    vars.push_back({j.id, t, len});
                    lp.add_var("x_" + j.id + "_t" + std::to_string(t) + "_p" +
                               std::to_string(len));
                }
    }

    {  // objective row: discarded units at most B / throughput at least (1-eps)T
        LinRow row;
        row.name = "objective_bound";
        for (int v = 0; v < static_cast<int>(vars.size()); ++v)
            row.terms.push_back({v, Rational(vars[static_cast<std::size_t>(v)].len)});
        row.rel = Rel::ge;
        row.rhs = Rational(smi.total_size()) - B;
        lp.add_row(std::move(row));
    }
    for (const auto& j : smi.jobs) {  // scheduled at most once
        LinRow row;
        row.name = "once_" + j.id;
        for (int v = 0; v < static_cast<int>(vars.size()); ++v)
            if (vars[static_cast<std::size_t>(v)].job == j.id) row.terms.push_back({v, Rational(1)});
        row.rel = Rel::le;
        row.rhs = 1;
        lp.add_row(std::move(row));
    }
    for (long t = 1; t <= smi.horizon; ++t) {  // congestion at each time
        LinRow row;
        row.name = "cong_t" + std::to_string(t);
        for (int v = 0; v < static_cast<int>(vars.size()); ++v) {
            const auto& info = vars[static_cast<std::size_t>(v)];
            if (info.start < t && t <= info.start + info.len)
                row.terms.push_back({v, Rational(1)});
        }
        row.rel = Rel::le;
        row.rhs = 1;
        if (!row.terms.empty()) lp.add_row(std::move(row));
    }
    return lp;
}

struct VerificationFamily {
    long checked = 0;
    long failed = 0;
    std::vector<std::string> examples;
};

struct VerificationReport {
    long L = 0;
    Rational eps_prime;
    long q = 0;
    std::string scope;
    VerificationFamily scheduled, congestion, objective;
    bool q_le_eps_l1 = false;
    bool q_le_l1_over_4 = false;

    bool all_pass() const {
        return scheduled.failed == 0 && congestion.failed == 0 && objective.failed == 0;
    }
};

namespace gap_detail {

inline std::string describe_sets(const std::vector<PlacementVar>& S,
                                 const std::vector<PlacementVar>& R) {
    std::ostringstream os;
    os << "S={";
    for (const auto& pv : S) os << " (" << pv.job << "," << pv.start << ")";
    os << " } R={";
    for (const auto& pv : R) os << " (" << pv.job << "," << pv.start << ")";
    os << " }";
    return os.str();
}

// Index-based evaluator over the aligned domain. Sets are small vectors of
// pair indices; values come from a precomputed power table, so one lifted
// check costs a handful of integer interval comparisons.
struct Verifier {
    struct DomainPair {
        int job = 0;
        long lo = 0, hi = 0;  // occupied interval (lo, hi]
    };

    const ClosedFormSolution& x;
    const SingleMachineInstance& tree;
    std::vector<PlacementVar> domain;
    std::vector<DomainPair> pairs;
    std::vector<std::vector<int>> by_job;    // job -> its L+1 pair indices
    std::vector<std::vector<int>> covering;  // time 1..T -> pairs covering it
    std::vector<long> job_size;
    std::vector<Rational> power;  // base^k

    explicit Verifier(const ClosedFormSolution& sol, long q)
        : x(sol), tree(sol.tree()), domain(aligned_domain(sol.tree())) {
        std::map<std::string, int> job_ix;
        for (const auto& j : tree.jobs) {
            job_ix[j.id] = static_cast<int>(job_size.size());
            job_size.push_back(j.size);
        }
        by_job.resize(tree.jobs.size());
        covering.resize(static_cast<std::size_t>(tree.horizon) + 1);
        for (std::size_t k = 0; k < domain.size(); ++k) {
            const auto& pv = domain[k];
            const int jix = job_ix[pv.job];
            pairs.push_back({jix, pv.start, pv.start + job_size[static_cast<std::size_t>(jix)]});
            by_job[static_cast<std::size_t>(jix)].push_back(static_cast<int>(k));
            for (long t = pv.start + 1; t <= pv.start + job_size[static_cast<std::size_t>(jix)]; ++t)
                covering[static_cast<std::size_t>(t)].push_back(static_cast<int>(k));
        }
        const Rational base = (1 - sol.eps_prime()) / (sol.L() + 1);
        power.push_back(1);
        for (long k = 0; k <= q + 2; ++k) power.push_back(power.back() * base);
    }

    bool contradictory(const std::vector<int>& set) const {
        for (std::size_t a = 0; a < set.size(); ++a) {
            const auto& pa = pairs[static_cast<std::size_t>(set[a])];
            for (std::size_t b = a + 1; b < set.size(); ++b) {
                if (set[a] == set[b]) return true;
                const auto& pb = pairs[static_cast<std::size_t>(set[b])];
                if (pa.job == pb.job) return true;
                if (pa.lo < pb.hi && pb.lo < pa.hi) return true;
            }
        }
        return false;
    }

    Rational value(const std::vector<int>& set) const {
        if (contradictory(set)) return 0;
        // duplicates collapse
        long distinct = 0;
        for (std::size_t a = 0; a < set.size(); ++a) {
            bool dup = false;
            for (std::size_t b = 0; b < a; ++b)
                if (set[a] == set[b]) dup = true;
            if (!dup) ++distinct;
        }
        return power[static_cast<std::size_t>(distinct)];
    }

    // Lifted (15): for job j, sum_t x_{S u R' u {(j,t)}} <= x_{S u R'} summed
    // with alternating signs over R' subseteq R.
    bool check_scheduled(const std::vector<int>& S, const std::vector<int>& R, int job) const {
        Rational total = 0;
        for_subsets(S, R, [&](std::vector<int>& base, int sign) {
            Rational inner = 0;
            for (int d : by_job[static_cast<std::size_t>(job)]) {
                base.push_back(d);
                inner += value(base);
                base.pop_back();
            }
            total += sign * (value(base) - inner);
        });
        return total >= 0;
    }

    // Lifted (16): placements covering time t'.
    bool check_congestion(const std::vector<int>& S, const std::vector<int>& R,
                          long t_prime) const {
        Rational total = 0;
        for_subsets(S, R, [&](std::vector<int>& base, int sign) {
            Rational inner = 0;
            for (int d : covering[static_cast<std::size_t>(t_prime)]) {
                base.push_back(d);
                inner += value(base);
                base.pop_back();
            }
            total += sign * (value(base) - inner);
        });
        return total >= 0;
    }

    // Lifted (14) with eps = 4 eps': total throughput at least (1-eps)T.
    bool check_objective(const std::vector<int>& S, const std::vector<int>& R) const {
        const Rational eps = 4 * x.eps_prime();
        const Rational target = (1 - eps) * tree.total_size();
        Rational total = 0;
        for_subsets(S, R, [&](std::vector<int>& base, int sign) {
            Rational inner = 0;
            for (int d = 0; d < static_cast<int>(pairs.size()); ++d) {
                base.push_back(d);
                Rational v = value(base);
                base.pop_back();
                if (v != 0)
                    inner += v * job_size[static_cast<std::size_t>(
                                 pairs[static_cast<std::size_t>(d)].job)];
            }
            total += sign * (inner - target * value(base));
        });
        return total >= 0;
    }

    template <class F>
    void for_subsets(const std::vector<int>& S, const std::vector<int>& R, F&& f) const {
        const std::size_t n = R.size();
        std::vector<int> base = S;
        for (std::size_t mask = 0; mask < (1u << n); ++mask) {
            base.resize(S.size());
            int bits = 0;
            for (std::size_t k = 0; k < n; ++k)
                if (mask & (1u << k)) {
                    base.push_back(R[k]);
                    ++bits;
                }
            f(base, bits % 2 == 0 ? 1 : -1);
        }
    }
};

}  // namespace gap_detail

struct VerifyScope {
    bool exhaustive = true;
    std::uint64_t seed = 1;
    long samples = 0;
    long exhaustive_cap = 2'000'000;  // checks, not sets
};

// Evaluates the three lifted families on the closed-form solution with exact
// rationals; exhaustively over all (S, R) with |S|+|R| <= q, or on seeded
// samples of contradiction-free S and arbitrary R.
inline VerificationReport verify_lifted_constraints(long L, const Rational& eps_prime, long q,
                                                    const VerifyScope& scope) {
    if (q < 1) throw InvalidInstance("q must be >= 1");
    auto solution = sa_closed_form(L, eps_prime);
    gap_detail::Verifier verifier(solution, q);
    const auto& domain = verifier.domain;
    const auto& tree = solution.tree();

    VerificationReport report;
    report.L = L;
    report.eps_prime = eps_prime;
    report.q = q;
    report.scope = scope.exhaustive
                       ? "exhaustive"
                       : "sampled(seed=" + std::to_string(scope.seed) +
                             ",count=" + std::to_string(scope.samples) + ")";
    report.q_le_eps_l1 = Rational(q) <= eps_prime * (L + 1);
    report.q_le_l1_over_4 = Rational(q) <= Rational(L + 1, 4);

    auto describe = [&](const std::vector<int>& S, const std::vector<int>& R) {
        std::vector<PlacementVar> s, r;
        for (int d : S) s.push_back(domain[static_cast<std::size_t>(d)]);
        for (int d : R) r.push_back(domain[static_cast<std::size_t>(d)]);
        return gap_detail::describe_sets(s, r);
    };
    auto run_families = [&](const std::vector<int>& S, const std::vector<int>& R,
                            std::optional<int> only_job, std::optional<long> only_time,
                            bool run_objective) {
        if (only_job) {
            ++report.scheduled.checked;
            if (!verifier.check_scheduled(S, R, *only_job) && report.scheduled.failed++ < 5)
                report.scheduled.examples.push_back(
                    "job " + tree.jobs[static_cast<std::size_t>(*only_job)].id + " " +
                    describe(S, R));
        }
        if (only_time) {
            ++report.congestion.checked;
            if (!verifier.check_congestion(S, R, *only_time) && report.congestion.failed++ < 5)
                report.congestion.examples.push_back("t'=" + std::to_string(*only_time) + " " +
                                                     describe(S, R));
        }
        if (run_objective) {
            ++report.objective.checked;
            if (!verifier.check_objective(S, R) && report.objective.failed++ < 5)
                report.objective.examples.push_back(describe(S, R));
        }
    };

    if (scope.exhaustive) {
        // All ordered disjoint (S, R) pairs with |S| + |R| <= q.
        const long n = static_cast<long>(domain.size());
        const long families = static_cast<long>(tree.jobs.size()) + tree.horizon + 1;
        long pair_count = 1 + 2 * n;  // q = 1
        for (long size = 2; size <= q; ++size) pair_count *= 2 * n;  // coarse upper estimate
        if (pair_count > scope.exhaustive_cap / std::max(1L, families))
            throw SizeBlowup("exhaustive verification above the configured cap");

        std::vector<std::pair<std::vector<int>, std::vector<int>>> pairs;
        std::vector<int> S, R;
        std::function<void(int)> build = [&](int from) {
            pairs.push_back({S, R});
            if (static_cast<long>(S.size() + R.size()) == q) return;
            for (int k = from; k < n; ++k) {
                S.push_back(k);
                build(k + 1);
                S.pop_back();
                R.push_back(k);
                build(k + 1);
                R.pop_back();
            }
        };
        build(0);
        for (const auto& [s, r] : pairs) {
            for (int jix = 0; jix < static_cast<int>(tree.jobs.size()); ++jix)
                run_families(s, r, jix, std::nullopt, false);
            for (long t = 1; t <= tree.horizon; ++t)
                run_families(s, r, std::nullopt, t, false);
            run_families(s, r, std::nullopt, std::nullopt, true);
        }
    } else {
        Rng rng(scope.seed);
        for (long sample = 0; sample < scope.samples; ++sample) {
            // sizes first, then a contradiction-free S and arbitrary disjoint R
            const long total = rng.range(0, q);
            const long s_size = rng.range(0, total);
            std::vector<int> S, R;
            int guard = 0;
            while (static_cast<long>(S.size()) < s_size && guard++ < 200) {
                int d = static_cast<int>(rng.below(domain.size()));
                S.push_back(d);
                if (verifier.contradictory(S)) S.pop_back();
            }
            while (static_cast<long>(R.size()) < total - s_size) {
                int d = static_cast<int>(rng.below(domain.size()));
                if (std::find(S.begin(), S.end(), d) == S.end() &&
                    std::find(R.begin(), R.end(), d) == R.end())
                    R.push_back(d);
            }
            const long which = rng.range(0, 9);
            if (which < 4) {
                run_families(S, R, static_cast<int>(rng.below(tree.jobs.size())), std::nullopt,
                             false);
            } else if (which < 8) {
                run_families(S, R, std::nullopt, rng.range(1, tree.horizon), false);
            } else {
                run_families(S, R, std::nullopt, std::nullopt, true);
            }
        }
    }
    return report;
}

}  // namespace liftsched
