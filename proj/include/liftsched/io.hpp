#pragma once

#include <fstream>
#include <sstream>
#include <string>

#include <json.hpp>

#include "liftsched/core.hpp"
#include "liftsched/deadline.hpp"
#include "liftsched/gap_lab.hpp"
#include "liftsched/hierarchy.hpp"
#include "liftsched/oracle.hpp"
#include "liftsched/schedule.hpp"
#include "liftsched/smi.hpp"

namespace liftsched {

using Json = nlohmann::json;

// All machine-readable artifacts use canonical JSON: objects with sorted keys
// (nlohmann's default object is key-ordered) and rationals as exact "p/q"
// strings; no floating point anywhere.

inline Json instance_to_json(const Instance& inst) {
    Json j;
    j["machines"] = inst.machines();
    j["jobs"] = Json::array();
    for (const auto& job : inst.jobs()) j["jobs"].push_back({{"id", job.id}, {"size", job.size}});
    j["precedence"] = Json::array();
    for (const auto& [a, b] : inst.precedence().pairs()) j["precedence"].push_back({a, b});
    Json delays;
    delays["default"] = inst.delays().default_delay;
    delays["overrides"] = Json::array();
    for (const auto& [pair, c] : inst.delays().overrides)
        delays["overrides"].push_back({pair.first, pair.second, c});
    j["delays"] = delays;
    return j;
}

inline Instance instance_from_json(const Json& j) {
    std::vector<Job> jobs;
    for (const auto& job : j.at("jobs"))
        jobs.push_back({job.at("id").get<std::string>(), job.at("size").get<long>()});
    std::set<IdPair> pairs;
    if (j.contains("precedence"))
        for (const auto& pr : j.at("precedence"))
            pairs.insert({pr.at(0).get<std::string>(), pr.at(1).get<std::string>()});
    DelaySpec delays;
    if (j.contains("delays")) {
        const auto& d = j.at("delays");
        delays.default_delay = d.value("default", 0L);
        if (d.contains("overrides"))
            for (const auto& o : d.at("overrides"))
                delays.overrides[{o.at(0).get<std::string>(), o.at(1).get<std::string>()}] =
                    o.at(2).get<long>();
    }
    long machines = j.at("machines").get<long>();
    Precedence closed = transitive_closure(pairs, jobs);
    return Instance(std::move(jobs), std::move(closed), std::move(delays), machines);
}

inline Json schedule_to_json(const Schedule& s) {
    Json j;
    j["horizon"] = s.horizon;
    j["assignments"] = Json::array();
    for (const auto& [task, pl] : s.assignment)
        j["assignments"].push_back({{"index", task.index},
                                    {"job", task.job},
                                    {"machine", pl.machine},
                                    {"slot", pl.slot}});
    j["discarded"] = Json::array();
    for (const auto& task : s.discarded)
        j["discarded"].push_back({{"index", task.index}, {"job", task.job}});
    return j;
}

inline Schedule schedule_from_json(const Json& j) {
    Schedule s;
    s.horizon = j.at("horizon").get<long>();
    for (const auto& a : j.at("assignments"))
        s.assignment[{a.at("job").get<std::string>(), a.at("index").get<long>()}] = {
            a.at("machine").get<long>(), a.at("slot").get<long>()};
    for (const auto& d : j.at("discarded"))
        s.discarded.insert({d.at("job").get<std::string>(), d.at("index").get<long>()});
    return s;
}

inline Json deadline_to_json(const DeadlineInstance& inst) {
    Json j;
    j["horizon"] = inst.horizon;
    j["intervals"] = inst.intervals;
    j["machines"] = inst.machines;
    j["capacity"] = Json::array();
    for (long i = 1; i <= inst.machines; ++i) {
        Json row = Json::array();
        for (long t = 1; t <= inst.horizon; ++t) row.push_back(inst.cap(i, t) ? 1 : 0);
        j["capacity"].push_back(row);
    }
    j["jobs"] = Json::array();
    for (const auto& job : inst.jobs)
        j["jobs"].push_back({{"deadline", job.deadline},
                             {"id", job.id},
                             {"release", job.release},
                             {"size", job.size}});
    j["precedence"] = Json::array();
    for (const auto& [a, b] : inst.precedence.pairs()) j["precedence"].push_back({a, b});
    if (inst.beta) j["beta"] = *inst.beta;
    return j;
}

inline DeadlineInstance deadline_from_json(const Json& j) {
    DeadlineInstance inst;
    inst.horizon = j.at("horizon").get<long>();
    inst.intervals = j.at("intervals").get<long>();
    inst.machines = j.at("machines").get<long>();
    inst.capacity.assign(static_cast<std::size_t>(inst.machines) + 1,
                         std::vector<char>(static_cast<std::size_t>(inst.horizon) + 1, 0));
    const auto& cap = j.at("capacity");
    for (long i = 1; i <= inst.machines; ++i)
        for (long t = 1; t <= inst.horizon; ++t)
            inst.capacity[static_cast<std::size_t>(i)][static_cast<std::size_t>(t)] =
                cap.at(static_cast<std::size_t>(i - 1)).at(static_cast<std::size_t>(t - 1)).get<int>() ? 1 : 0;
    std::vector<Job> core_jobs;
    for (const auto& job : j.at("jobs")) {
        inst.jobs.push_back({job.at("id").get<std::string>(), job.at("size").get<long>(),
                             job.at("release").get<long>(), job.at("deadline").get<long>()});
        core_jobs.push_back({inst.jobs.back().id, inst.jobs.back().size});
    }
    std::set<IdPair> pairs;
    if (j.contains("precedence"))
        for (const auto& pr : j.at("precedence"))
            pairs.insert({pr.at(0).get<std::string>(), pr.at(1).get<std::string>()});
    inst.precedence = transitive_closure(pairs, core_jobs);
    if (j.contains("beta")) inst.beta = j.at("beta").get<long>();
    inst.check();
    return inst;
}

inline Json smi_to_json(const SingleMachineInstance& smi) {
    Json j;
    j["horizon"] = smi.horizon;
    j["jobs"] = Json::array();
    for (const auto& job : smi.jobs)
        j["jobs"].push_back({{"deadline", job.deadline},
                             {"id", job.id},
                             {"release", job.release},
                             {"size", job.size}});
    return j;
}

inline SingleMachineInstance smi_from_json(const Json& j) {
    SingleMachineInstance smi;
    smi.horizon = j.at("horizon").get<long>();
    for (const auto& job : j.at("jobs"))
        smi.jobs.push_back({job.at("id").get<std::string>(), job.at("size").get<long>(),
                            job.at("release").get<long>(), job.at("deadline").get<long>()});
    smi.check();
    return smi;
}

inline Json validation_to_json(const ValidationReport& report) {
    Json j;
    j["mode"] = mode_name(report.mode);
    j["valid"] = report.valid();
    j["violations"] = Json::array();
    for (const auto& v : report.violations) {
        Json item;
        item["kind"] = violation_kind_name(v.kind);
        item["detail"] = v.detail;
        item["tasks"] = Json::array();
        for (const auto& t : v.tasks) item["tasks"].push_back({{"index", t.index}, {"job", t.job}});
        item["slots"] = v.slots;
        j["violations"].push_back(item);
    }
    return j;
}

inline Json manifest_to_json(const RunManifest& m) {
    Json j;
    j["mode"] = mode_name(m.mode);
    Json params;
    params["k"] = m.params.k;
    params["delta"] = to_string(m.params.delta);
    params["epsilon"] = to_string(m.params.epsilon);
    params["sa_level"] = m.params.sa_level;
    params["mix_atoms"] = m.params.mix_atoms;
    params["budget"] = m.params.budget;
    params["paper_regime"] = m.params.paper_regime;
    j["parameters"] = params;
    j["t_lp"] = m.t_lp;
    j["t_round"] = m.t_round;
    j["t_padded"] = m.t_padded;
    j["initial_level"] = m.initial_level;
    j["max_path_conditionings"] = m.max_path_conditionings;
    j["pre_reinsert_makespan"] = m.pre_reinsert_makespan;
    j["final_makespan"] = m.final_makespan;
    j["total_discarded"] = m.total_discarded;
    j["all_within_bound"] = m.all_within_bound;
    {
        // the paper's parameter formulas at this scale, shown next to the
        // small values the run actually used; reference only, no run
        // decision depends on these floats
        double eps = numerator(m.params.epsilon).convert_to<double>() /
                     denominator(m.params.epsilon).convert_to<double>();
        PaperParams ref =
            paper_reference_params(m.machines, eps, std::max(2L, m.t_padded));
        Json r;
        r["k"] = std::to_string(ref.k);
        r["delta"] = std::to_string(ref.delta);
        r["K"] = std::to_string(ref.big_k);
        r["K_prime"] = std::to_string(ref.big_k_prime);
        j["paper_reference"] = r;
    }
    j["calls"] = Json::array();
    for (const auto& c : m.calls) {
        Json call;
        call["level"] = c.level;
        call["begin"] = c.begin;
        call["end"] = c.end;
        call["a_star"] = c.a_star;
        call["discards"] = {{"bottom", c.bottom},
                            {"comm_last", c.comm_last},
                            {"middle", c.middle},
                            {"top_stage1", c.top_stage1},
                            {"top_stage2", c.top_stage2}};
        call["total_discarded"] = c.total_discarded();
        call["conditionings"] = c.conditionings;
        call["chain_cut_iterations"] = c.chain_cut_iterations;
        call["ell_star"] = c.ell_star;
        call["ell_star_fallback"] = c.ell_star_fallback;
        call["bound_rhs"] = to_string(c.bound_rhs);
        call["within_bound"] = c.within_bound;
        j["calls"].push_back(call);
    }
    return j;
}

inline Json verification_to_json(const VerificationReport& r) {
    Json j;
    j["L"] = r.L;
    j["eps_prime"] = to_string(r.eps_prime);
    j["q"] = r.q;
    j["scope"] = r.scope;
    auto fam = [](const VerificationFamily& f) {
        Json out;
        out["checked"] = f.checked;
        out["failed"] = f.failed;
        out["examples"] = f.examples;
        return out;
    };
    j["families"] = {{"congestion", fam(r.congestion)},
                     {"objective", fam(r.objective)},
                     {"scheduled", fam(r.scheduled)}};
    j["preconditions"] = {{"q_le_L1_over_4", r.q_le_l1_over_4},
                          {"q_le_eps_L1", r.q_le_eps_l1}};
    return j;
}

inline Json gap_table_to_json(const GapReportTable& table) {
    Json j;
    j["rows"] = Json::array();
    for (const auto& r : table.rows)
        j["rows"].push_back({{"T", r.T},
                             {"int_A", r.int_a},
                             {"int_B", r.int_b},
                             {"int_C", r.int_c},
                             {"lp_mig", r.lp_mig},
                             {"lp_nomig", r.lp_nomig}});
    j["first_feasible"] = table.first_feasible;
    return j;
}

inline std::string canonical_dump(const Json& j) { return j.dump(2) + "\n"; }

inline void write_text_file(const std::string& path, const std::string& body) {
    // write-then-rename keeps artifact files atomic per file
    const std::string tmp = path + ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) throw Error("cannot open for writing: " + tmp);
        out << body;
    }
    if (std::rename(tmp.c_str(), path.c_str()) != 0)
        throw Error("cannot move artifact into place: " + path);
}

inline Json read_json_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error("cannot open: " + path);
    Json j;
    in >> j;
    return j;
}

}  // namespace liftsched
