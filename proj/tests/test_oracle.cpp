#include <catch2/catch_amalgamated.hpp>

#include "liftsched/gap_lab.hpp"
#include "liftsched/oracle.hpp"
#include "liftsched/rng.hpp"

using namespace liftsched;

namespace {

Instance fig3() {
    std::vector<Job> jobs{{"j1", 2}, {"j2", 2}, {"j3", 2}};
    return Instance(jobs, Precedence{}, DelaySpec{}, 2);
}

Instance random_tiny(std::uint64_t seed, long max_total, long default_delay = 0) {
    Rng rng(seed);
    std::vector<Job> jobs;
    long total = 0;
    const long n = rng.range(2, 5);
    for (long i = 0; i < n && total < max_total; ++i) {
        long p = rng.range(1, 3);
        p = std::min(p, max_total - total);
        if (p < 1) break;
        total += p;
        jobs.push_back({"j" + std::to_string(i), p});
    }
    std::set<IdPair> pairs;
    for (std::size_t a = 0; a < jobs.size(); ++a)
        for (std::size_t b = a + 1; b < jobs.size(); ++b)
            if (rng.chance(30, 100)) pairs.insert({jobs[a].id, jobs[b].id});
    DelaySpec delays;
    delays.default_delay = default_delay;
    Precedence prec = transitive_closure(pairs, jobs);
    return Instance(jobs, prec, delays, rng.range(1, 2));
}

// Raw exhaustive search for the minimum discard: all starts, all lengths, no
// normalization, no memo. Only for very small instances.
long raw_min_discard(const SingleMachineInstance& smi, DiscardMode mode) {
    const std::size_t n = smi.jobs.size();
    long best_units = 0;
    std::vector<std::pair<long, long>> used;  // (start, end)
    std::function<void(std::size_t, long)> rec = [&](std::size_t j, long units) {
        if (j == n) {
            best_units = std::max(best_units, units);
            return;
        }
        rec(j + 1, units);  // skip entirely
        const auto& job = smi.jobs[j];
        const long lmin = mode == DiscardMode::full_jobs ? job.size : 1;
        for (long len = lmin; len <= job.size; ++len) {
            for (long s = job.release; s + len <= job.deadline; ++s) {
                bool free = true;
                for (const auto& [lo, hi] : used)
                    if (s < hi && lo < s + len) free = false;
                if (!free) continue;
                used.push_back({s, s + len});
                rec(j + 1, units + len);
                used.pop_back();
            }
        }
    };
    rec(0, 0);
    return smi.total_size() - best_units;
}

}  // namespace

TEST_CASE("fig3 model values") {
    auto inst = fig3();
    CHECK(opt_makespan(inst, Model::A).value == 3);
    CHECK(opt_makespan(inst, Model::B).value == 4);
    CHECK(opt_makespan(inst, Model::C).value == 4);
}

TEST_CASE("AB family at m=3") {
    auto inst = gen_model_gap_ab(3);
    CHECK(opt_makespan(inst, Model::A).value == 4);
    CHECK(opt_makespan(inst, Model::B).value == 6);
}

TEST_CASE("chain of three unit jobs is 3 in every model") {
    std::vector<Job> jobs{{"a", 1}, {"b", 1}, {"c", 1}};
    Instance inst(jobs, transitive_closure({{"a", "b"}, {"b", "c"}}, jobs), DelaySpec{}, 2);
    for (Model model : {Model::A, Model::B, Model::C})
        CHECK(opt_makespan(inst, model).value == 3);
}

TEST_CASE("witnesses validate and match the reported value") {
    for (std::uint64_t seed = 1; seed <= 30; ++seed) {
        Instance inst = random_tiny(seed, 8);
        for (Model model : {Model::A, Model::B, Model::C}) {
            auto result = opt_makespan(inst, model);
            CHECK(makespan(result.witness) == result.value);
            if (model != Model::A) {
                auto report = validate(result.witness, inst, Mode::no_delay);
                for (const auto& v : report.violations) UNSCOPED_INFO(v.detail);
                CHECK(report.valid());
            }
        }
    }
}

TEST_CASE("model ordering A <= B <= C, with delays too") {
    for (std::uint64_t seed = 1; seed <= 25; ++seed) {
        Instance inst = random_tiny(seed, 8, seed % 2 ? 1 : 0);
        const bool delays = inst.beta() > 0;
        long a = opt_makespan(inst, Model::A, delays).value;
        long b = opt_makespan(inst, Model::B, delays).value;
        long c = opt_makespan(inst, Model::C, delays).value;
        CHECK(a <= b);
        CHECK(b <= c);
    }
}

TEST_CASE("the two search strategies agree") {
    for (std::uint64_t seed = 1; seed <= 40; ++seed) {
        Instance inst = random_tiny(seed, 10, seed % 3 == 0 ? 1 : 0);
        const bool delays = inst.beta() > 0;
        for (Model model : {Model::A, Model::B, Model::C}) {
            auto slot = opt_makespan(inst, model, delays);
            auto place = opt_makespan_placement(inst, model, delays);
            CHECK(slot.value == place.value);
        }
    }
}

TEST_CASE("task cap rejects big instances") {
    std::vector<Job> jobs;
    for (int i = 0; i < 9; ++i) jobs.push_back({"j" + std::to_string(i), 2});
    Instance inst(jobs, Precedence{}, DelaySpec{}, 2);
    CHECK_THROWS_AS(opt_makespan(inst, Model::B), CapExceeded);
}

TEST_CASE("min discard on the tree instances") {
    auto l1 = gen_tree_instance(1);
    auto r = opt_min_discard(l1, DiscardMode::partial_allowed);
    CHECK(r.value == 0);
    CHECK(opt_min_discard_iterative(l1, DiscardMode::partial_allowed).value == 0);
    CHECK(raw_min_discard(l1, DiscardMode::partial_allowed) == 0);

    SingleMachineInstance two;
    two.horizon = 2;
    two.jobs.push_back({"a", 2, 0, 2});
    two.jobs.push_back({"b", 2, 0, 2});
    CHECK(opt_min_discard(two, DiscardMode::partial_allowed).value == 2);
    CHECK(opt_min_discard(two, DiscardMode::full_jobs).value == 2);
}

TEST_CASE("partial discard never exceeds full-jobs discard") {
    for (std::uint64_t seed = 1; seed <= 40; ++seed) {
        Rng rng(seed);
        SingleMachineInstance smi;
        smi.horizon = rng.range(4, 10);
        const long n = rng.range(1, 4);
        for (long i = 0; i < n; ++i) {
            long p = rng.range(1, 3);
            long r = rng.range(0, smi.horizon - 1);
            long d = rng.range(r + 1, smi.horizon);
            smi.jobs.push_back({"j" + std::to_string(i), p, r, d});
        }
        auto partial = opt_min_discard(smi, DiscardMode::partial_allowed);
        auto full = opt_min_discard(smi, DiscardMode::full_jobs);
        CHECK(partial.value <= full.value);
        CHECK(partial.value == opt_min_discard_iterative(smi, DiscardMode::partial_allowed).value);
        CHECK(full.value == opt_min_discard_iterative(smi, DiscardMode::full_jobs).value);
        CHECK(partial.value == raw_min_discard(smi, DiscardMode::partial_allowed));
        CHECK(full.value == raw_min_discard(smi, DiscardMode::full_jobs));
    }
}

TEST_CASE("gap report on fig3") {
    auto table = lp_gap_report(fig3(), 3, 4);
    REQUIRE(table.rows.size() == 2);
    CHECK(table.rows[0].lp_nomig);       // fractional with (4) at T=3
    CHECK_FALSE(table.rows[0].int_b);    // integral B needs 4
    CHECK(table.rows[1].int_b);
    CHECK(table.first_feasible["lp_nomig"] == 3);
    CHECK(table.first_feasible["int_B"] == 4);
    CHECK(table.first_feasible["int_A"] == 3);
}

TEST_CASE("gap report on the chain agrees everywhere") {
    std::vector<Job> jobs{{"a", 1}, {"b", 1}, {"c", 1}};
    Instance inst(jobs, transitive_closure({{"a", "b"}, {"b", "c"}}, jobs), DelaySpec{}, 1);
    auto table = lp_gap_report(inst, 2, 3);
    CHECK(table.first_feasible["lp_mig"] == 3);
    CHECK(table.first_feasible["lp_nomig"] == 3);
    CHECK(table.first_feasible["int_C"] == 3);
}
