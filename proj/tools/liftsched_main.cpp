#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "liftsched/gap_lab.hpp"
#include "liftsched/hierarchy.hpp"
#include "liftsched/io.hpp"
#include "liftsched/list_sched.hpp"
#include "liftsched/oracle.hpp"

using namespace liftsched;

namespace {

void emit(const std::string& body, const std::string& out_path) {
    if (out_path.empty()) {
        std::cout << body;
    } else {
        write_text_file(out_path, body);
    }
}

Instance gen_random_dag(std::uint64_t seed, long n_jobs, long max_size, long machines,
                        unsigned density_pct, long default_delay) {
    Rng rng(seed);
    std::vector<Job> jobs;
    for (long i = 0; i < n_jobs; ++i) {
        std::string tag = std::to_string(i);
        jobs.push_back({"j" + std::string(i < 10 ? "0" : "") + tag, rng.range(1, max_size)});
    }
    std::set<IdPair> pairs;
    for (std::size_t a = 0; a < jobs.size(); ++a)
        for (std::size_t b = a + 1; b < jobs.size(); ++b)
            if (rng.chance(density_pct, 100)) pairs.insert({jobs[a].id, jobs[b].id});
    DelaySpec delays;
    delays.default_delay = default_delay;
    Precedence closed = transitive_closure(pairs, jobs);
    return Instance(std::move(jobs), std::move(closed), std::move(delays), machines);
}

int cmd_gen(const std::string& family, long m, long tree_l, bool deadline_witness,
            bool random_dag, std::uint64_t seed, const WitnessGenParams& wparams, long n_jobs,
            long max_size, unsigned density, long default_delay, bool bc_search,
            const std::string& out) {
    Json j;
    if (family == "AB") {
        j = instance_to_json(gen_model_gap_ab(m));
    } else if (family == "BC") {
        j = instance_to_json(bc_search ? search_model_gap_bc() : gen_model_gap_bc());
    } else if (tree_l >= 0) {
        j = smi_to_json(gen_tree_instance(tree_l));
    } else if (deadline_witness) {
        j = deadline_to_json(gen_witness_deadline(seed, wparams));
    } else if (random_dag) {
        j = instance_to_json(
            gen_random_dag(seed, n_jobs, max_size, wparams.machines, density, default_delay));
    } else {
        std::cerr << "gen: pick one of --family AB|BC, --tree, --deadline-witness, --random-dag\n";
        return 2;
    }
    emit(canonical_dump(j), out);
    return 0;
}

int cmd_schedule(const std::string& algo, const std::string& instance_path,
                 const std::string& mode_name_in, const HierarchyParams& hp,
                 const std::string& out, const std::string& manifest_out) {
    const Mode mode = mode_name_in == "delay" ? Mode::delay : Mode::no_delay;
    Schedule schedule;
    Json manifest;
    manifest["algo"] = algo;

    if (algo == "graham" || algo == "graham-comm") {
        Instance inst = instance_from_json(read_json_file(instance_path));
        schedule = algo == "graham" ? graham_list(inst) : graham_list_comm(inst);
        manifest["makespan"] = makespan(schedule);
        manifest["discarded"] = 0;
    } else if (algo == "edf-ect" || algo == "edf-ect-comm") {
        DeadlineInstance inst = deadline_from_json(read_json_file(instance_path));
        RunTrace trace = algo == "edf-ect" ? edf_ect(inst) : edf_ect_comm(inst);
        schedule = trace.schedule;
        schedule.discarded = trace.discarded;
        manifest["makespan"] = makespan(schedule);
        manifest["discarded"] = trace.total_discarded();
        Json per_job;
        for (const auto& [id, jt] : trace.per_job)
            per_job[id] = {{"B", jt.begin},
                           {"C", jt.complete},
                           {"machine", jt.machine},
                           {"scheduled", jt.scheduled}};
        manifest["trace"] = per_job;
    } else if (algo == "hierarchy") {
        Instance inst = instance_from_json(read_json_file(instance_path));
        auto result = run_full(inst, mode, hp);
        schedule = result.schedule;
        manifest = manifest_to_json(result.manifest);
        auto report = validate(schedule, inst, mode);
        manifest["final_valid"] = report.valid();
    } else {
        std::cerr << "schedule: unknown --algo " << algo << "\n";
        return 2;
    }
    emit(canonical_dump(schedule_to_json(schedule)), out);
    if (!manifest_out.empty()) write_text_file(manifest_out, canonical_dump(manifest));
    return 0;
}

int cmd_validate(const std::string& instance_path, const std::string& schedule_path,
                 const std::string& mode_name_in) {
    Instance inst = instance_from_json(read_json_file(instance_path));
    Schedule schedule = schedule_from_json(read_json_file(schedule_path));
    const Mode mode = mode_name_in == "delay" ? Mode::delay : Mode::no_delay;
    auto report = validate(schedule, inst, mode);
    std::cout << canonical_dump(validation_to_json(report));
    return report.valid() ? 0 : 1;
}

int cmd_oracle(const std::string& instance_path, const std::string& model_name_in, bool delays,
               const std::string& smi_path, const std::string& discard_mode,
               const std::string& strategy, long cap_tasks, const std::string& out) {
    OracleCaps caps;
    if (cap_tasks > 0) caps.max_tasks = cap_tasks;
    Json j;
    if (!smi_path.empty()) {
        SingleMachineInstance smi = smi_from_json(read_json_file(smi_path));
        DiscardMode mode =
            discard_mode == "full" ? DiscardMode::full_jobs : DiscardMode::partial_allowed;
        auto result = opt_min_discard(smi, mode, caps);
        j["value"] = result.value;
        j["nodes"] = result.nodes;
        j["witness"] = Json::array();
        for (const auto& seg : result.witness.segments)
            j["witness"].push_back({{"job", seg.job}, {"length", seg.length}, {"start", seg.start}});
    } else {
        Instance inst = instance_from_json(read_json_file(instance_path));
        Model model = model_name_in == "A" ? Model::A : model_name_in == "B" ? Model::B : Model::C;
        auto result = strategy == "placement" ? opt_makespan_placement(inst, model, delays, caps)
                                              : opt_makespan(inst, model, delays, caps);
        j["value"] = result.value;
        j["nodes"] = result.nodes;
        j["witness"] = schedule_to_json(result.witness);
    }
    emit(canonical_dump(j), out);
    return 0;
}

int cmd_gaps_lp_table(const std::string& instance_path, long t_from, long t_to, bool delays,
                      const std::string& out) {
    Instance inst = instance_from_json(read_json_file(instance_path));
    auto table = lp_gap_report(inst, t_from, t_to, delays);
    std::cout << "T   lp_mig lp_nomig int_A int_B int_C\n";
    for (const auto& r : table.rows)
        std::cout << r.T << "   " << r.lp_mig << "      " << r.lp_nomig << "        " << r.int_a
                  << "     " << r.int_b << "     " << r.int_c << "\n";
    std::cout << "first feasible:";
    for (const auto& [col, T] : table.first_feasible) std::cout << " " << col << "=" << T;
    std::cout << "\n";
    if (!out.empty()) write_text_file(out, canonical_dump(gap_table_to_json(table)));
    return 0;
}

int cmd_gaps(const std::string& family, long m, const std::string& out) {
    std::ostringstream table;
    Json j;
    if (family == "AB") {
        Instance inst = gen_model_gap_ab(m);
        auto a = opt_makespan(inst, Model::A);
        auto b = opt_makespan(inst, Model::B);
        table << "family=AB m=" << m << " A=" << a.value << " B=" << b.value << " ratio="
              << to_string(Rational(b.value, a.value)) << "\n";
        j = {{"A", a.value}, {"B", b.value}, {"family", "AB"}, {"m", m},
             {"ratio", to_string(Rational(b.value, a.value))}};
    } else if (family == "BC") {
        Instance inst = gen_model_gap_bc();
        auto b = opt_makespan(inst, Model::B);
        auto c = opt_makespan(inst, Model::C);
        table << "family=BC B=" << b.value << " C=" << c.value << " ratio="
              << to_string(Rational(c.value, b.value)) << "\n";
        j = {{"B", b.value}, {"C", c.value}, {"family", "BC"},
             {"ratio", to_string(Rational(c.value, b.value))}};
    } else {
        std::cerr << "gaps: unknown --family " << family << "\n";
        return 2;
    }
    std::cout << table.str();
    if (!out.empty()) write_text_file(out, canonical_dump(j));
    return 0;
}

int cmd_verify_sa(long l1, const std::string& eps_prime, long q, bool exhaustive, long samples,
                  std::uint64_t seed, const std::string& out) {
    VerifyScope scope;
    scope.exhaustive = exhaustive;
    scope.seed = seed;
    scope.samples = samples;
    auto report = verify_lifted_constraints(l1 - 1, parse_rational(eps_prime), q, scope);
    std::cout << canonical_dump(verification_to_json(report));
    if (!out.empty()) write_text_file(out, canonical_dump(verification_to_json(report)));
    return report.all_pass() ? 0 : 1;
}

int cmd_export_lp(const std::string& instance_path, long T, bool comm, int lift,
                  const std::string& smi_path, bool aligned, const std::string& bound,
                  const std::string& out) {
    LinearProgram lp;
    if (!smi_path.empty()) {
        SingleMachineInstance smi = smi_from_json(read_json_file(smi_path));
        lp = build_single_machine_lp(smi, parse_rational(bound), aligned);
    } else {
        Instance inst = instance_from_json(read_json_file(instance_path));
        lp = build_base_lp(inst, T, comm).lp;
    }
    if (lift > 1) {
        auto lifted = sa_lift(lp, lift);
        emit(export_lp_text(lifted.lp), out);
    } else {
        emit(export_lp_text(lp), out);
    }
    return 0;
}

int cmd_report(const std::vector<std::string>& inputs, const std::string& out) {
    Json merged = Json::array();
    std::cout << "file                          mode      T_lp T_round makespan discards within\n";
    for (const auto& path : inputs) {
        Json m = read_json_file(path);
        merged.push_back(m);
        std::ostringstream line;
        line.width(30);
        line << std::left << path;
        std::cout << line.str() << m.value("mode", std::string("?")) << "  "
                  << m.value("t_lp", 0L) << "    " << m.value("t_round", 0L) << "      "
                  << m.value("final_makespan", 0L) << "        " << m.value("total_discarded", 0L)
                  << "        " << (m.value("all_within_bound", false) ? "yes" : "no") << "\n";
    }
    if (!out.empty()) write_text_file(out, canonical_dump(merged));
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"liftsched: precedence-constrained makespan scheduling workbench"};
    app.require_subcommand(1);
    app.failure_message(CLI::FailureMessage::help);

    std::string out, manifest_out, family, instance_path, schedule_path, smi_path;
    std::string algo = "graham", mode = "no-delay", model = "B", discard_mode = "partial";
    std::string strategy = "slot", eps_prime = "1/4", bound = "0";
    long m = 2, tree_l = -1, n_jobs = 5, max_size = 3, q = 1, l1 = 4, samples = 0, T = 4;
    long cap_tasks = 0;
    std::uint64_t seed = 1;
    unsigned density = 30;
    long default_delay = 0;
    bool deadline_witness = false, random_dag = false, bc_search = false, delays = false;
    bool exhaustive = false, comm = false, aligned = false;
    int lift = 1;
    WitnessGenParams wparams;
    HierarchyParams hp;
    std::string hp_delta = "1/4", hp_epsilon = "1/2";
    std::vector<std::string> report_inputs;

    auto* gen = app.add_subcommand("gen", "generate instances");
    gen->add_option("--family", family, "model-gap family: AB or BC");
    gen->add_option("--m", m, "machine count for the AB family");
    gen->add_flag("--bc-search", bc_search, "re-run the seeded BC witness search");
    gen->add_option("--tree", tree_l, "tree gap instance with L levels below the root");
    gen->add_flag("--deadline-witness", deadline_witness, "witness-first deadline instance");
    gen->add_flag("--random-dag", random_dag, "random DAG instance");
    gen->add_option("--seed", seed, "generator seed");
    gen->add_option("--machines", wparams.machines, "machines");
    gen->add_option("--intervals", wparams.intervals, "interval count p");
    gen->add_option("--interval-len", wparams.interval_len, "slots per interval");
    gen->add_option("--max-jobs", wparams.max_jobs, "max jobs");
    gen->add_option("--max-size", max_size, "max job size");
    gen->add_option("--jobs", n_jobs, "job count (random DAG)");
    gen->add_option("--density", density, "precedence density percent");
    gen->add_option("--delay-default", default_delay, "default communication delay");
    long beta_opt = 0;
    gen->add_option("--beta", beta_opt, "beta for the deadline witness");
    gen->add_option("-o,--output", out, "output file (stdout if omitted)");

    auto* sched = app.add_subcommand("schedule", "run a scheduler");
    sched->add_option("--algo", algo, "graham | graham-comm | edf-ect | edf-ect-comm | hierarchy")
        ->required();
    sched->add_option("--instance", instance_path, "instance JSON")->required();
    sched->add_option("--mode", mode, "no-delay | delay (hierarchy)");
    sched->add_option("--k", hp.k, "hierarchy k");
    sched->add_option("--delta", hp_delta, "hierarchy delta (rational)");
    sched->add_option("--epsilon", hp_epsilon, "hierarchy epsilon (rational)");
    sched->add_option("--sa-level", hp.sa_level, "lift level for the horizon search");
    sched->add_option("--mix-atoms", hp.mix_atoms, "integral points backing the rounding");
    sched->add_option("--budget", hp.budget, "conditioning budget (0 = auto)");
    sched->add_option("-o,--output", out, "schedule JSON output");
    sched->add_option("--manifest", manifest_out, "manifest JSON output");

    auto* val = app.add_subcommand("validate", "validate a schedule");
    val->add_option("--instance", instance_path)->required();
    val->add_option("--schedule", schedule_path)->required();
    val->add_option("--mode", mode, "no-delay | delay");

    auto* orc = app.add_subcommand("oracle", "exact brute-force optima");
    orc->add_option("--instance", instance_path, "core instance JSON");
    orc->add_option("--model", model, "A | B | C");
    orc->add_flag("--delays", delays, "enforce communication delays");
    orc->add_option("--smi", smi_path, "single-machine instance JSON (min discard)");
    orc->add_option("--discard-mode", discard_mode, "full | partial");
    orc->add_option("--strategy", strategy, "slot | placement");
    orc->add_option("--max-tasks", cap_tasks, "override the task cap");
    orc->add_option("-o,--output", out, "output file");

    auto* gaps = app.add_subcommand("gaps", "model-gap tables");
    gaps->add_option("--family", family, "AB | BC");
    gaps->add_option("--m", m, "machines for AB");
    bool lp_table = false;
    long t_from = 2, t_to = 5;
    gaps->add_flag("--lp-table", lp_table, "base-LP vs integral feasibility table");
    gaps->add_option("--instance", instance_path, "core instance JSON (--lp-table)");
    gaps->add_option("--T-from", t_from, "table range start");
    gaps->add_option("--T-to", t_to, "table range end");
    gaps->add_flag("--delays", delays, "enforce delays in the table");
    gaps->add_option("-o,--output", out, "JSON output");

    auto* ver = app.add_subcommand("verify-sa", "closed-form lifted-constraint verification");
    ver->add_option("--L1", l1, "L+1 (tree levels)");
    ver->add_option("--eps-prime", eps_prime, "eps' as a rational");
    ver->add_option("--q", q, "rounds");
    ver->add_flag("--exhaustive", exhaustive, "exhaustive scope");
    ver->add_option("--samples", samples, "sample count (sampled scope)");
    ver->add_option("--seed", seed, "sampler seed");
    ver->add_option("-o,--output", out, "report JSON output");

    auto* exp = app.add_subcommand("export-lp", "LP text export");
    exp->add_option("--instance", instance_path, "core instance JSON");
    exp->add_option("--T", T, "horizon");
    exp->add_flag("--comm", comm, "include communication rows");
    exp->add_option("--lift", lift, "Sherali-Adams level");
    exp->add_option("--smi", smi_path, "single-machine instance JSON");
    exp->add_flag("--aligned", aligned, "aligned placement variables only");
    exp->add_option("--B", bound, "discard budget (rational)");
    exp->add_option("-o,--output", out, "output file")->required();

    auto* rep = app.add_subcommand("report", "merge run manifests into a table");
    rep->add_option("inputs", report_inputs, "manifest files")->required();
    rep->add_option("-o,--output", out, "merged JSON output");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return e.get_exit_code() == 0 ? 0 : 2;
    }

    try {
        if (gen->parsed()) {
            if (beta_opt > 0) wparams.beta = beta_opt;
            wparams.max_size = max_size;
            wparams.prec_pct = density;
            return cmd_gen(family, m, tree_l, deadline_witness, random_dag, seed, wparams, n_jobs,
                           max_size, density, default_delay, bc_search, out);
        }
        if (sched->parsed()) {
            hp.delta = parse_rational(hp_delta);
            hp.epsilon = parse_rational(hp_epsilon);
            return cmd_schedule(algo, instance_path, mode == "delay" ? "delay" : "no-delay", hp,
                                out, manifest_out);
        }
        if (val->parsed())
            return cmd_validate(instance_path, schedule_path, mode == "delay" ? "delay" : "no-delay");
        if (orc->parsed())
            return cmd_oracle(instance_path, model, delays, smi_path, discard_mode, strategy,
                              cap_tasks, out);
        if (gaps->parsed()) {
            if (lp_table) return cmd_gaps_lp_table(instance_path, t_from, t_to, delays, out);
            if (family.empty()) {
                std::cerr << "gaps: pick --family AB|BC or --lp-table\n";
                return 2;
            }
            return cmd_gaps(family, m, out);
        }
        if (ver->parsed()) return cmd_verify_sa(l1, eps_prime, q, exhaustive, samples, seed, out);
        if (exp->parsed())
            return cmd_export_lp(instance_path, T, comm, lift, smi_path, aligned, bound, out);
        if (rep->parsed()) return cmd_report(report_inputs, out);
    } catch (const SizeBlowup& e) {
        std::cerr << "cap exceeded: " << e.what() << "\n";
        return 3;
    } catch (const CapExceeded& e) {
        std::cerr << "cap exceeded: " << e.what() << "\n";
        return 3;
    } catch (const LevelExhausted& e) {
        std::cerr << "cap exceeded: " << e.what() << "\n";
        return 3;
    } catch (const Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const Json::exception& e) {
        std::cerr << "input error: " << e.what() << "\n";
        return 2;
    }
    return 2;
}
