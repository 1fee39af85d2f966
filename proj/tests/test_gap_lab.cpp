#include <catch2/catch_amalgamated.hpp>

#include "liftsched/gap_lab.hpp"
#include "liftsched/lifted.hpp"
#include "liftsched/rng.hpp"

using namespace liftsched;

TEST_CASE("AB family values") {
    auto two = gen_model_gap_ab(2);
    CHECK(two.jobs().size() == 3);
    CHECK(opt_makespan(two, Model::A).value == 3);
    CHECK(opt_makespan(two, Model::B).value == 4);
    auto three = gen_model_gap_ab(3);
    CHECK(opt_makespan(three, Model::A).value == 4);
    CHECK(opt_makespan(three, Model::B).value == 6);
}

TEST_CASE("persisted BC witness is oracle-certified") {
    auto inst = gen_model_gap_bc();
    const long b = opt_makespan(inst, Model::B).value;
    const long c = opt_makespan(inst, Model::C).value;
    CHECK(4 * c >= 5 * b);
    CHECK(b == 4);
    CHECK(c == 5);
}

TEST_CASE("the BC search reproduces a certified witness") {
    auto inst = search_model_gap_bc();
    const long b = opt_makespan(inst, Model::B).value;
    const long c = opt_makespan(inst, Model::C).value;
    CHECK(4 * c >= 5 * b);
}

TEST_CASE("tree instance shapes") {
    auto l2 = gen_tree_instance(2);
    CHECK(l2.jobs.size() == 7);
    CHECK(l2.horizon == 12);
    std::multiset<long> sizes;
    for (const auto& j : l2.jobs) sizes.insert(j.size);
    CHECK(sizes == std::multiset<long>{4, 2, 2, 1, 1, 1, 1});
    CHECK(l2.jobs[0].release == 0);
    CHECK(l2.jobs[0].deadline == 12);
    // leaves
    CHECK(l2.jobs[3].release == 0);
    CHECK(l2.jobs[3].deadline == 3);
    CHECK(l2.jobs[6].release == 9);
    CHECK(l2.jobs[6].deadline == 12);

    auto l0 = gen_tree_instance(0);
    CHECK(l0.jobs.size() == 1);
    CHECK(l0.horizon == 1);

    for (long L = 0; L <= 5; ++L) {
        bool warn = false;
        auto inst = gen_tree_instance(L, &warn);
        CHECK(static_cast<long>(inst.jobs.size()) == (1L << (L + 1)) - 1);
        CHECK(inst.total_size() == inst.horizon);
        CHECK(inst.horizon == (L + 1) * (1L << L));
        CHECK(warn == (((L + 1) & L) != 0));
        // windows laminar: any two nested or disjoint
        for (const auto& a : inst.jobs)
            for (const auto& b : inst.jobs) {
                const bool nested = (a.release <= b.release && b.deadline <= a.deadline) ||
                                    (b.release <= a.release && a.deadline <= b.deadline);
                const bool disjoint = a.deadline <= b.release || b.deadline <= a.release;
                CHECK((nested || disjoint));
            }
    }
}

TEST_CASE("chain reduction on a single unit job") {
    SingleMachineInstance smi;
    smi.horizon = 1;
    smi.jobs.push_back({"a", 1, 0, 1});
    auto red = chain_reduce(smi);
    CHECK(red.instance.jobs().size() == 2);
    CHECK(red.instance.machines() == 2);
    CHECK(red.instance.precedence().pairs().empty());  // windows overlap

    SmiSolution sol;
    sol.segments.push_back({"a", 0, 1});
    auto schedule = smi_to_two_machine(smi, red, sol);
    CHECK(makespan(schedule) == 1);
    CHECK(validate(schedule, red.instance, Mode::no_delay).valid());
    auto back = two_machine_to_smi(smi, red, schedule);
    CHECK(smi_cost(smi, back) == 0);
}

TEST_CASE("tree L=1 admits a zero-cost solution that converts to makespan T") {
    auto smi = gen_tree_instance(1);  // jobs: root p=2 (0,4], leaves (0,2], (2,4]
    SmiSolution sol;
    sol.segments.push_back({"v1_1", 0, 1});
    sol.segments.push_back({"v0_1", 1, 2});
    sol.segments.push_back({"v1_2", 3, 1});
    REQUIRE(smi_cost(smi, sol) == 0);
    auto red = chain_reduce(smi);
    auto schedule = smi_to_two_machine(smi, red, sol);
    CHECK(makespan(schedule) == smi.horizon);
    auto report = validate(schedule, red.instance, Mode::no_delay);
    for (const auto& v : report.violations) UNSCOPED_INFO(v.detail);
    CHECK(report.valid());
}

TEST_CASE("round trips stay within the conversion bounds") {
    for (std::uint64_t seed = 1; seed <= 60; ++seed) {
        Rng rng(seed);
        SingleMachineInstance smi;
        const long n = rng.range(1, 4);
        for (long i = 0; i < n; ++i) {
            long p = rng.range(1, 3);
            smi.jobs.push_back({"j" + std::to_string(i), p, 0, 0});
        }
        long total = smi.total_size();
        smi.horizon = total;
        for (auto& j : smi.jobs) {
            j.release = rng.range(0, std::max(0L, smi.horizon - j.size));
            j.deadline = rng.range(j.release + 1, smi.horizon);
        }
        // random valid solution by greedy left packing of a random subset
        SmiSolution sol;
        long t = 0;
        for (const auto& j : smi.jobs) {
            if (rng.chance(1, 3)) continue;
            long s = std::max(t, j.release);
            long len = std::min(j.size, j.deadline - s);
            if (len < 1) continue;
            if (rng.chance(1, 3)) len = rng.range(1, len);
            sol.segments.push_back({j.id, s, len});
            t = s + len;
        }
        const long cost = smi_cost(smi, sol);
        auto red = chain_reduce(smi);
        auto schedule = smi_to_two_machine(smi, red, sol);
        CHECK(makespan(schedule) <= smi.horizon + cost);
        auto report = validate(schedule, red.instance, Mode::no_delay);
        for (const auto& v : report.violations) UNSCOPED_INFO(v.detail);
        REQUIRE(report.valid());

        auto back = two_machine_to_smi(smi, red, schedule);
        const long back_cost = smi_cost(smi, back);
        CHECK(back_cost <= 2 * (makespan(schedule) - smi.horizon));
        CHECK(back_cost <= 2 * cost);
    }
}

TEST_CASE("contradiction checks") {
    auto smi = gen_tree_instance(1);
    CHECK_FALSE(check_contradiction(smi, {{"v0_1", 0}}));
    CHECK(check_contradiction(smi, {{"v0_1", 0}, {"v0_1", 2}}));  // job repeats
    CHECK(check_contradiction(smi, {{"v0_1", 0}, {"v1_1", 0}}));  // overlap (0,2] vs (0,1]
    CHECK_FALSE(check_contradiction(smi, {{"v0_1", 0}, {"v1_2", 2}}));

    // monotone: contradictory subsets stay contradictory under extension
    Rng rng(7);
    auto domain = aligned_domain(smi);
    for (int round = 0; round < 200; ++round) {
        std::vector<PlacementVar> s;
        for (int k = 0; k < 3; ++k)
            s.push_back(domain[static_cast<std::size_t>(rng.below(domain.size()))]);
        if (check_contradiction(smi, {s[0], s[1]})) CHECK(check_contradiction(smi, s));
    }
}

TEST_CASE("closed form values") {
    auto sol = sa_closed_form(3, Rational(1, 4));
    CHECK(sol.value({}) == 1);
    auto domain = aligned_domain(sol.tree());
    // |S| = 2 without contradiction: ((1 - 1/4)/4)^2 = (3/16)^2
    std::vector<PlacementVar> pair{{"v3_1", 0}, {"v3_2", 4}};
    REQUIRE_FALSE(check_contradiction(sol.tree(), pair));
    CHECK(sol.value(pair) == Rational(9, 256));
    std::vector<PlacementVar> clash{{"v0_1", 0}, {"v3_1", 0}};
    REQUIRE(check_contradiction(sol.tree(), clash));
    CHECK(sol.value(clash) == 0);

    // singleton values recover the 1/(L+1) base solution as eps' -> 0
    auto tiny = ClosedFormSolution(3, Rational(1, 1000), sol.tree());
    CHECK(tiny.value({domain[0]}) == Rational(999, 4000));

    // monotone under subset inclusion
    CHECK(sol.value(pair) <= sol.value({pair[0]}));
}

TEST_CASE("single-machine LP shapes and feasibility") {
    SingleMachineInstance one;
    one.horizon = 2;
    one.jobs.push_back({"a", 2, 0, 2});
    auto lp = build_single_machine_lp(one, Rational(0), false);
    CHECK(lp.vars.size() == 3);  // (0,1), (1,1) and the full placement (0,2)
    auto sol = solve_feasible(lp);
    REQUIRE(sol.has_value());
    // only the full placement achieves zero discard
    int full_var = -1;
    for (int v = 0; v < static_cast<int>(lp.vars.size()); ++v)
        if (lp.vars[static_cast<std::size_t>(v)] == "x_a_t0_p2") full_var = v;
    REQUIRE(full_var >= 0);
    CHECK(sol->singleton(full_var) == 1);

    auto tree1 = gen_tree_instance(1);
    auto aligned = build_single_machine_lp(tree1, Rational(0), true);
    CHECK(aligned.vars.size() == 6);

    SingleMachineInstance clash;
    clash.horizon = 2;
    clash.jobs.push_back({"a", 2, 0, 2});
    clash.jobs.push_back({"b", 2, 0, 2});
    CHECK_FALSE(solve_feasible(build_single_machine_lp(clash, Rational(1), false)).has_value());
    CHECK(solve_feasible(build_single_machine_lp(clash, Rational(2), false)).has_value());
}

TEST_CASE("verification families pass in the proven regime") {
    VerifyScope scope;
    scope.exhaustive = true;
    auto report = verify_lifted_constraints(3, Rational(1, 4), 1, scope);
    CHECK(report.all_pass());
    CHECK(report.q_le_eps_l1);
    CHECK(report.q_le_l1_over_4);
    CHECK(report.scheduled.checked > 0);
    CHECK(report.congestion.checked > 0);
    CHECK(report.objective.checked > 0);
}

TEST_CASE("verification samples at L+1=8") {
    VerifyScope scope;
    scope.exhaustive = false;
    scope.seed = 99;
    scope.samples = 2000;
    auto report = verify_lifted_constraints(7, Rational(1, 4), 2, scope);
    CHECK(report.all_pass());
    CHECK(report.q_le_eps_l1);
    CHECK(report.q_le_l1_over_4);
}

TEST_CASE("precondition breaches are recorded, not asserted") {
    VerifyScope scope;
    scope.exhaustive = true;
    auto report = verify_lifted_constraints(3, Rational(1, 4), 2, scope);  // q > eps'(L+1)
    CHECK_FALSE(report.q_le_eps_l1);
    CHECK_FALSE(report.q_le_l1_over_4);
    // outcome recorded either way; no exception raised
    CHECK(report.scheduled.checked > 0);
}

TEST_CASE("exhaustive verification respects its cap") {
    VerifyScope scope;
    scope.exhaustive = true;
    scope.exhaustive_cap = 10;
    CHECK_THROWS_AS(verify_lifted_constraints(3, Rational(1, 4), 1, scope), SizeBlowup);
}
