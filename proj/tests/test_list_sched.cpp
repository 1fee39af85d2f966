#include <catch2/catch_amalgamated.hpp>

#include "liftsched/list_sched.hpp"
#include "liftsched/rng.hpp"

using namespace liftsched;

namespace {

Instance random_instance(std::uint64_t seed, long default_delay = 0) {
    Rng rng(seed);
    const long n = rng.range(1, 7);
    std::vector<Job> jobs;
    for (long i = 0; i < n; ++i) jobs.push_back({"j" + std::to_string(i), rng.range(1, 4)});
    std::set<IdPair> pairs;
    for (long a = 0; a < n; ++a)
        for (long b = a + 1; b < n; ++b)
            if (rng.chance(30, 100))
                pairs.insert(
                    {jobs[static_cast<std::size_t>(a)].id, jobs[static_cast<std::size_t>(b)].id});
    DelaySpec delays;
    delays.default_delay = default_delay;
    Precedence prec = transitive_closure(pairs, jobs);
    return Instance(jobs, prec, delays, rng.range(1, 3));
}

// Replay the non-idling property: at any slot before the makespan, an idle
// machine means no unstarted job was available there.
void check_non_idling(const Instance& inst, const Schedule& s) {
    std::map<std::string, std::pair<long, long>> span;  // id -> (start, end)
    std::map<std::string, long> machine_of;
    for (const auto& [task, pl] : s.assignment) {
        auto [it, fresh] = span.emplace(task.job, std::make_pair(pl.slot, pl.slot));
        if (!fresh) {
            it->second.first = std::min(it->second.first, pl.slot);
            it->second.second = std::max(it->second.second, pl.slot);
        }
        machine_of[task.job] = pl.machine;
    }
    const long end = makespan(s);
    for (long t = 1; t < end; ++t) {
        for (long i = 1; i <= inst.machines(); ++i) {
            bool busy = false;
            for (const auto& [task, pl] : s.assignment)
                if (pl.machine == i && pl.slot == t) busy = true;
            if (busy) continue;
            for (const auto& j : inst.jobs()) {
                if (span[j.id].first <= t) continue;  // started at or before t
                bool ready = true;
                for (const auto& [a, b] : inst.precedence().pairs())
                    if (b == j.id && span[a].second >= t) ready = false;
                if (ready)
                    FAIL("idle machine with an available job at slot " + std::to_string(t));
            }
        }
    }
}

}  // namespace

TEST_CASE("graham on no jobs") {
    Instance inst({}, Precedence{}, DelaySpec{}, 2);
    CHECK(makespan(graham_list(inst)) == 0);
}

TEST_CASE("graham packs independent unit jobs perfectly") {
    std::vector<Job> jobs{{"a", 1}, {"b", 1}, {"c", 1}, {"d", 1}};
    Instance inst(jobs, Precedence{}, DelaySpec{}, 2);
    auto s = graham_list(inst);
    CHECK(makespan(s) == 2);
    CHECK(validate(s, inst, Mode::no_delay).valid());
}

TEST_CASE("graham respects an explicit priority order and rejects bad ones") {
    std::vector<Job> jobs{{"a", 1}, {"b", 1}};
    Instance inst(jobs, transitive_closure({{"a", "b"}}, jobs), DelaySpec{}, 1);
    std::vector<std::string> good{"a", "b"};
    CHECK(makespan(graham_list(inst, &good)) == 2);
    std::vector<std::string> bad{"b", "a"};
    CHECK_THROWS_AS(graham_list(inst, &bad), InvalidOrder);
    std::vector<std::string> incomplete{"a"};
    CHECK_THROWS_AS(graham_list(inst, &incomplete), InvalidOrder);
}

TEST_CASE("graham satisfies the busy/chain decomposition bound") {
    for (std::uint64_t seed = 1; seed <= 80; ++seed) {
        Instance inst = random_instance(seed);
        auto s = graham_list(inst);
        REQUIRE(validate(s, inst, Mode::no_delay).valid());
        check_non_idling(inst, s);
        std::set<std::string> all;
        for (const auto& j : inst.jobs()) all.insert(j.id);
        const long delta = max_chain(inst.jobs(), inst.precedence(), all);
        const long total = inst.total_size();
        const long lower =
            std::max((total + inst.machines() - 1) / inst.machines(), delta);
        CHECK(makespan(s) >= lower);
        CHECK(Rational(makespan(s)) <= Rational(total, inst.machines()) + delta);
    }
}

TEST_CASE("comm greedy keeps a chain on one machine") {
    std::vector<Job> jobs{{"a", 1}, {"b", 1}};
    DelaySpec d;
    d.default_delay = 1;
    Instance inst(jobs, transitive_closure({{"a", "b"}}, jobs), d, 2);
    auto s = graham_list_comm(inst);
    CHECK(makespan(s) == 2);
    CHECK(s.assignment.at({"a", 1}).machine == s.assignment.at({"b", 1}).machine);
    CHECK(validate(s, inst, Mode::delay).valid());

    // forcing the successor onto the other machine needs the delay slot
    Schedule forced;
    forced.horizon = 3;
    forced.assignment[{"a", 1}] = {1, 1};
    forced.assignment[{"b", 1}] = {2, 3};
    CHECK(validate(forced, inst, Mode::delay).valid());
    CHECK(makespan(forced) == 3);
    forced.assignment[{"b", 1}] = {2, 2};
    CHECK_FALSE(validate(forced, inst, Mode::delay).valid());
}

TEST_CASE("comm greedy equals plain greedy without precedence") {
    for (std::uint64_t seed = 1; seed <= 20; ++seed) {
        Rng rng(seed);
        std::vector<Job> jobs;
        const long n = rng.range(1, 6);
        for (long i = 0; i < n; ++i) jobs.push_back({"j" + std::to_string(i), rng.range(1, 3)});
        DelaySpec d;
        d.default_delay = 2;
        Instance inst(jobs, Precedence{}, d, rng.range(1, 3));
        CHECK(graham_list_comm(inst).assignment == graham_list(inst).assignment);
    }
}

TEST_CASE("comm greedy output is always delay-valid") {
    for (std::uint64_t seed = 1; seed <= 60; ++seed) {
        Instance inst = random_instance(seed, 1 + static_cast<long>(seed % 2));
        auto s = graham_list_comm(inst);
        auto report = validate(s, inst, Mode::delay);
        for (const auto& v : report.violations) UNSCOPED_INFO(v.detail);
        CHECK(report.valid());
    }
}
