#include <catch2/catch_amalgamated.hpp>

#include "liftsched/base_lp.hpp"
#include "liftsched/lifted.hpp"
#include "liftsched/oracle.hpp"
#include "liftsched/rng.hpp"

using namespace liftsched;

namespace {

LinearProgram toy_lp(std::initializer_list<std::string> names) {
    LinearProgram lp;
    for (const auto& n : names) lp.add_var(n);
    return lp;
}

// Small random LP over [0,1]^n with at least one integral point, so every
// lift level stays feasible: one covering row plus optional capacity rows.
LinearProgram random_small_lp(Rng& rng, int n_vars) {
    LinearProgram lp;
    for (int v = 0; v < n_vars; ++v) lp.add_var("x" + std::to_string(v));
    {
        LinRow cover;
        for (int v = 0; v < n_vars; ++v)
            if (v == 0 || rng.chance(1, 2)) cover.terms.push_back({v, Rational(1)});
        cover.rel = Rel::ge;
        cover.rhs = 1;
        lp.add_row(std::move(cover));
    }
    if (rng.chance(1, 2)) {
        LinRow cap;
        for (int v = 0; v < n_vars; ++v) cap.terms.push_back({v, Rational(1)});
        cap.rel = Rel::le;
        cap.rhs = Rational(rng.range(1, n_vars - 1));
        lp.add_row(std::move(cap));
    }
    if (rng.chance(1, 2)) {
        LinRow pair_cap;  // x_a + x_b <= 1 forces lifted x_{a,b} = 0
        int a = static_cast<int>(rng.below(static_cast<std::uint64_t>(n_vars)));
        int b = (a + 1) % n_vars;
        pair_cap.terms = {{a, Rational(1)}, {b, Rational(1)}};
        pair_cap.rel = Rel::le;
        pair_cap.rhs = 1;
        lp.add_row(std::move(pair_cap));
    }
    return lp;
}

Instance fig3() {
    std::vector<Job> jobs{{"j1", 2}, {"j2", 2}, {"j3", 2}};
    return Instance(jobs, Precedence{}, DelaySpec{}, 2);
}

}  // namespace

TEST_CASE("solver decides the trivial one-variable programs") {
    auto lp = toy_lp({"x"});
    {
        LinRow row{{{0, Rational(1)}}, Rel::eq, Rational(1), "force"};
        lp.add_row(row);
        auto sol = solve_feasible(lp);
        REQUIRE(sol.has_value());
        CHECK(sol->singleton(0) == 1);
    }
    {
        auto bad = toy_lp({"x"});
        LinRow row{{{0, Rational(1)}}, Rel::ge, Rational(2), "impossible"};
        bad.add_row(row);
        CHECK_FALSE(solve_feasible(bad).has_value());
    }
}

TEST_CASE("chain of three unit jobs: infeasible at T=2, feasible at T=3") {
    std::vector<Job> jobs{{"a", 1}, {"b", 1}, {"c", 1}};
    Instance inst(jobs, transitive_closure({{"a", "b"}, {"b", "c"}}, jobs), DelaySpec{}, 1);
    CHECK_FALSE(solve_lp_feasible(build_base_lp(inst, 2).lp, true).has_value());
    CHECK(solve_lp_feasible(build_base_lp(inst, 3).lp, true).has_value());
    auto oracle = opt_makespan(inst, Model::B);
    CHECK(oracle.value == 3);
}

TEST_CASE("base LP counts: one unit job on one machine at T=1") {
    std::vector<Job> jobs{{"a", 1}};
    Instance inst(jobs, Precedence{}, DelaySpec{}, 1);
    auto base = build_base_lp(inst, 1);
    CHECK(base.lp.vars.size() == 1);
    auto sol = solve_feasible(base.lp, true);
    REQUIRE(sol.has_value());
    CHECK(sol->singleton(0) == 1);
}

TEST_CASE("sibling marginal rows: one pair times machines") {
    std::vector<Job> jobs{{"a", 2}};
    Instance inst(jobs, Precedence{}, DelaySpec{}, 2);
    auto base = build_base_lp(inst, 2);
    long nomig_rows = 0;
    for (const auto& row : base.lp.rows)
        if (row.name.rfind("nomig_", 0) == 0) ++nomig_rows;
    CHECK(nomig_rows == 2);  // one unordered sibling pair, two machines
}

TEST_CASE("reduced precedence rows match the full generation") {
    for (std::uint64_t seed = 1; seed <= 10; ++seed) {
        Rng rng(seed);
        std::vector<Job> jobs;
        const long n = rng.range(2, 4);
        for (long i = 0; i < n; ++i) jobs.push_back({"j" + std::to_string(i), rng.range(1, 2)});
        std::set<IdPair> pairs;
        for (long a = 0; a < n; ++a)
            for (long b = a + 1; b < n; ++b)
                if (rng.chance(1, 2))
                    pairs.insert({jobs[static_cast<std::size_t>(a)].id,
                                  jobs[static_cast<std::size_t>(b)].id});
        Precedence prec = transitive_closure(pairs, jobs);
        Instance inst(jobs, prec, DelaySpec{}, 2);
        const long T = rng.range(2, 4);
        auto reduced = build_base_lp(inst, T, false, false);
        auto full = build_base_lp(inst, T, false, true);

        // A point of the reduced program satisfies every full row.
        auto sol = solve_lp_feasible(reduced.lp, true);
        if (!sol) {
            CHECK_FALSE(solve_lp_feasible(full.lp, true).has_value());
            continue;
        }
        for (const auto& row : full.lp.rows) {
            Rational lhs = 0;
            for (const auto& [v, c] : row.terms) lhs += c * (*sol)[static_cast<std::size_t>(v)];
            if (row.rel == Rel::le) CHECK(lhs <= row.rhs);
            if (row.rel == Rel::ge) CHECK(lhs >= row.rhs);
            if (row.rel == Rel::eq) CHECK(lhs == row.rhs);
        }
    }
}

TEST_CASE("fig3 base LP with no-migration rows is feasible at the migratory optimum") {
    auto base3 = build_base_lp(fig3(), 3);
    CHECK(solve_lp_feasible(base3.lp, true).has_value());
    CHECK(opt_makespan(fig3(), Model::B).value == 4);
}

TEST_CASE("lift level 1 is a relabeled copy") {
    auto lp = toy_lp({"x0", "x1"});
    LinRow row{{{0, Rational(1)}, {1, Rational(1)}}, Rel::le, Rational(1), "sum"};
    lp.add_row(row);
    auto lift = sa_lift(lp, 1);
    CHECK(lift.lp.rows.size() == lp.rows.size());
    CHECK(lift.subsets.size() == 2);
    CHECK(solve_feasible(lift).has_value() == solve_feasible(lp).has_value());
}

TEST_CASE("lift level limits") {
    auto lp = toy_lp({"x0", "x1"});
    SaCaps caps;
    caps.max_level = 2;
    CHECK_THROWS_AS(sa_lift(lp, 3, caps), SizeBlowup);
    SaCaps tight;
    tight.max_vars = 3;
    CHECK_THROWS_AS(sa_lift(lp, 2, tight), SizeBlowup);
}

TEST_CASE("monotonicity rows appear in a level-2 lift of a box") {
    auto lp = toy_lp({"x0", "x1"});
    auto lift = sa_lift(lp, 2);
    auto sol = solve_feasible(lift);
    REQUIRE(sol.has_value());
    sol->check_invariants();
    CHECK(sol->value({}) == 1);
    CHECK(sol->value({0, 1}) <= sol->value({0}));
    CHECK(sol->value({0, 1}) <= sol->value({1}));
}

TEST_CASE("x1 + x2 <= 1 lifted to level 2 forces x_{1,2} = 0") {
    auto lp = toy_lp({"x0", "x1"});
    LinRow row{{{0, Rational(1)}, {1, Rational(1)}}, Rel::le, Rational(1), "sum"};
    lp.add_row(row);
    auto lift = sa_lift(lp, 2);
    auto sol = solve_feasible(lift);
    REQUIRE(sol.has_value());
    CHECK(sol->value({0, 1}) == 0);
}

TEST_CASE("conditioning semantics on solver-produced lifted solutions") {
    long conditioned_runs = 0;
    for (std::uint64_t seed = 1; seed <= 25; ++seed) {
        Rng rng(seed);
        const int n = static_cast<int>(rng.range(2, 4));
        auto lp = random_small_lp(rng, n);
        const int level = static_cast<int>(rng.range(2, 3));
        auto lift = sa_lift(lp, level);
        auto sol = solve_feasible(lift);
        REQUIRE(sol.has_value());
        sol->check_invariants();
        for (int v = 0; v < n; ++v) {
            if (sol->singleton(v) == 0) {
                CHECK_THROWS_AS(sol->conditioned(v), ZeroMass);
                continue;
            }
            auto cond = sol->conditioned(v);
            ++conditioned_runs;
            cond.check_invariants();
            CHECK(cond.level() == level - 1);
            CHECK(cond.singleton(v) == 1);  // the conditioned event reads 1
            for (int w = 0; w < n; ++w) {   // 0/1 values persist
                if (sol->singleton(w) == 0) CHECK(cond.singleton(w) == 0);
                if (sol->singleton(w) == 1) CHECK(cond.singleton(w) == 1);
            }
        }
    }
    CHECK(conditioned_runs > 10);

    LinearProgram lp = toy_lp({"x"});
    auto level1 = solve_feasible(lp);
    REQUIRE(level1.has_value());
    if (level1->singleton(0) > 0) CHECK_THROWS_AS(level1->conditioned(0), LevelExhausted);
}

TEST_CASE("conditioning a mixture matches probabilistic conditioning") {
    for (std::uint64_t seed = 1; seed <= 25; ++seed) {
        Rng rng(seed);
        const int n = static_cast<int>(rng.range(3, 5));
        const int atoms = static_cast<int>(rng.range(2, 4));
        std::vector<std::pair<VarSet, Rational>> mix;
        Rational left = 1;
        for (int a = 0; a < atoms; ++a) {
            VarSet point;
            for (int v = 0; v < n; ++v)
                if (rng.chance(1, 2)) point.push_back(v);
            Rational w = a + 1 == atoms ? left : left / 2;
            left -= w;
            mix.push_back({point, w});
        }
        const int level = 3;
        auto mixture = LiftedSolution::from_mixture(level, mix);
        auto table = mixture.to_values(level, n);
        table.check_invariants();

        for (int v = 0; v < n; ++v) {
            if (mixture.singleton(v) == 0) continue;
            auto via_mixture = mixture.conditioned(v);
            auto via_table = table.conditioned(v);
            // identical values on every stored subset
            detail::enumerate_subsets(n, level - 1, [&](const VarSet& s) {
                CHECK(via_mixture.value(s) == via_table.value(s));
            });
            // and exactly the renormalized-atom distribution
            Rational mass = mixture.singleton(v);
            for (const auto& [point, w] : mix) {
                if (!set_contains(point, v)) continue;
                CHECK(via_mixture.value(point) >= w / mass);
            }
        }
    }
}

TEST_CASE("solution invariants hold after conditioning chains") {
    std::vector<std::pair<VarSet, Rational>> mix{{{0, 1}, Rational(1, 2)},
                                                 {{0, 2}, Rational(1, 4)},
                                                 {{1, 2}, Rational(1, 4)}};
    auto sol = LiftedSolution::from_mixture(4, mix);
    auto c0 = sol.conditioned(0);
    CHECK(c0.singleton(0) == 1);
    CHECK(c0.value({1}) == Rational(2, 3));
    CHECK(c0.value({2}) == Rational(1, 3));
    auto c01 = c0.conditioned(1);
    CHECK(c01.value({1}) == 1);
    CHECK(c01.value({2}) == 0);
    CHECK_THROWS_AS(c01.conditioned(2), ZeroMass);
}

TEST_CASE("base LP at the oracle optimum is feasible, and lifting keeps it so") {
    for (std::uint64_t seed = 1; seed <= 8; ++seed) {
        Rng rng(seed);
        std::vector<Job> jobs;
        const long n = rng.range(2, 3);
        for (long i = 0; i < n; ++i) jobs.push_back({"j" + std::to_string(i), rng.range(1, 2)});
        std::set<IdPair> pairs;
        if (rng.chance(1, 2) && n >= 2) pairs.insert({jobs[0].id, jobs[1].id});
        Precedence prec = transitive_closure(pairs, jobs);
        Instance inst(jobs, prec, DelaySpec{}, rng.range(1, 2));
        const long opt = opt_makespan(inst, Model::B).value;
        auto base = build_base_lp(inst, opt);
        auto level1 = solve_feasible(base.lp, true);
        REQUIRE(level1.has_value());

        // relaxation chain: the level-2 lift is still feasible and its
        // singleton projection satisfies the base rows
        SaCaps caps;
        caps.max_vars = 100000;
        auto lift = sa_lift(base.lp, 2, caps);
        auto level2 = solve_feasible(lift);
        REQUIRE(level2.has_value());
        level2->check_invariants();
        for (const auto& row : base.lp.rows) {
            Rational lhs = 0;
            for (const auto& [v, c] : row.terms) lhs += c * level2->singleton(v);
            if (row.rel == Rel::le) CHECK(lhs <= row.rhs);
            if (row.rel == Rel::ge) CHECK(lhs >= row.rhs);
            if (row.rel == Rel::eq) CHECK(lhs == row.rhs);
        }
    }
}

TEST_CASE("lp export contains the zero objective and bounds") {
    auto lp = toy_lp({"x0"});
    LinRow row{{{0, Rational(1)}}, Rel::le, Rational(1), "cap"};
    lp.add_row(row);
    auto text = export_lp_text(lp);
    CHECK(text.find("Minimize") != std::string::npos);
    CHECK(text.find("obj: 0 x0") != std::string::npos);
    CHECK(text.find("cap:") != std::string::npos);
    CHECK(text.find("0 <= x0 <= 1") != std::string::npos);
}
