#include "wargame/runner.hpp"

#include <sstream>

#include "wargame/errors.hpp"
#include "wargame/io.hpp"

namespace wargame {

const SituationHypothesis& select_hypothesis(const Scenario& scenario, const std::string& name) {
    if (name.empty()) {
        if (scenario.hypotheses.empty()) throw NotFoundError("scenario '" + scenario.id + "' has no hypotheses");
        return scenario.hypotheses.front();
    }
    if (const auto* h = scenario.find_hypothesis(name)) return *h;
    throw NotFoundError("unknown hypothesis '" + name + "'");
}

ValidationReport validate_pair(const Scenario& scenario, const Plan& plan, const std::string& hypothesis) {
    auto report = validate_scenario(scenario);
    if (scenario.hypotheses.empty()) {
        report.append(validate_plan(plan));
        if (!plan.actions.empty()) report.error("no-hypothesis", scenario.id, "plan actions cannot resolve against an empty scenario");
        return report;
    }
    report.append(validate_plan(plan, select_hypothesis(scenario, hypothesis).graph));
    return report;
}

RunResult execute_run(const Scenario& scenario, const Plan& plan, const RunOptions& options) {
    const auto& hyp = select_hypothesis(scenario, options.hypothesis);
    auto report = validate_scenario(scenario);
    report.append(validate_plan(plan, hyp.graph));
    if (options.config.horizon_ticks < 1) report.error("invalid-horizon", plan.id, "run horizon must be >= 1");
    if (!report.ok()) throw ValidationFailed(report);

    RunResult res;
    res.provenance.scenario_id = scenario.id;
    res.provenance.plan_id = plan.id;
    res.provenance.hypothesis = hyp.name;
    res.provenance.scenario_hash = options.scenario_hash.value_or(io::content_hash(io::to_json(scenario)));
    res.provenance.plan_hash = options.plan_hash.value_or(io::content_hash(io::to_json(plan)));
    res.provenance.graph_hash = io::content_hash(io::to_json(hyp.graph));
    res.config = options.config;
    res.threshold = options.threshold.value_or(scenario.effect_threshold);
    res.persistence = options.persistence.value_or(scenario.effect_persistence);
    res.baseline = baseline(hyp.graph, options.config);
    res.run = simulate(hyp.graph, plan, options.config);
    res.effects = detect_effects(res.baseline, res.run, res.threshold, res.persistence);
    return res;
}

nlohmann::json to_json(const RunResult& r) {
    int favorable = 0;
    for (const auto& e : r.effects) favorable += e.favorable ? 1 : 0;
    const auto total = static_cast<int>(r.effects.size());
    return {{"schemaVersion", io::kSchemaVersion},
            {"metadata",
             {{"scenarioId", r.provenance.scenario_id},
              {"planId", r.provenance.plan_id},
              {"hypothesis", r.provenance.hypothesis},
              {"scenarioHash", r.provenance.scenario_hash},
              {"planHash", r.provenance.plan_hash},
              {"graphHash", r.provenance.graph_hash},
              {"seed", r.config.seed},
              {"horizonTicks", r.config.horizon_ticks},
              {"noiseEnabled", r.config.noise_enabled},
              {"effectThreshold", r.threshold},
              {"effectPersistence", r.persistence}}},
            {"baseline", io::to_json(r.baseline)},
            {"plan", io::to_json(r.run)},
            {"effects", io::to_json(r.effects)},
            {"summary", {{"effectCount", total}, {"favorableCount", favorable}, {"unfavorableCount", total - favorable}}}};
}

CompareResult compare_plans(const Scenario& scenario, const std::vector<Plan>& plans,
                            const std::vector<DesiredEffect>& effects, const RunConfig& cfg, unsigned threads) {
    if (plans.empty()) throw InvalidArgument("compare needs at least one plan");
    const auto scenario_report = validate_scenario(scenario);

    // The empty plan doubles as the per-hypothesis baseline.
    Plan empty;
    empty.id = "~baseline~";
    auto all_plans = plans;
    all_plans.push_back(empty);
    const auto cells = batch_simulate(scenario.hypotheses, all_plans, {cfg}, threads);

    CompareResult out;
    const auto signature = effect_set_signature(effects);
    for (const auto& plan : plans) {
        RobustnessResult rob;
        for (const auto& hyp : scenario.hypotheses) {
            CoaScore score;
            score.plan_id = plan.id;
            score.hypothesis = hyp.name;
            score.effect_set = signature;
            HypothesisOutcome outcome;
            outcome.hypothesis = hyp.name;

            const auto& cell = cells.at({hyp.name, plan.id, 0});
            const auto& base = cells.at({hyp.name, empty.id, 0});
            auto fail = [&](std::string why, const ValidationReport& findings) {
                score.failed = true;
                score.failure = why;
                outcome.reason = std::move(why);
                outcome.findings = findings;
            };
            if (!scenario_report.ok()) {
                fail("scenario validation failed", scenario_report);
            } else if (!cell.ok) {
                std::string why = cell.reason;
                for (const auto& f : cell.findings.findings)
                    if (f.severity == Severity::error) why += "; " + f.code + " " + f.subject;
                fail(why, cell.findings);
            } else if (!base.ok) {
                fail("baseline failed: " + base.reason, base.findings);
            } else {
                try {
                    score = score_coa(plan, hyp.name, *base.trajectory, *cell.trajectory, effects,
                                      scenario.effect_threshold, scenario.effect_persistence);
                    outcome.ok = true;
                    outcome.achieved_count = score.achieved_count;
                } catch (const std::exception& e) {
                    fail(e.what(), {});
                }
            }
            if (outcome.ok && (!rob.min_achieved || outcome.achieved_count < *rob.min_achieved)) {
                rob.min_achieved = outcome.achieved_count;
                rob.worst_hypothesis = hyp.name;
            }
            rob.per_hypothesis.push_back(std::move(outcome));
            out.ranking.push_back(std::move(score));
        }
        for (auto& s : out.ranking)
            if (s.plan_id == plan.id) {
                s.min_achieved = rob.min_achieved;
                s.worst_hypothesis = rob.worst_hypothesis;
            }
        out.robustness.emplace_back(plan.id, std::move(rob));
    }
    out.ranking = compare_coas(std::move(out.ranking));
    return out;
}

std::string compare_csv(const CompareResult& result) {
    std::ostringstream os;
    os << "rank,planId,hypothesis,status,achievedCount,unfavorableEffectCount,totalSpend,minAchieved,worstHypothesis,"
          "achievedIds,failure\n";
    int rank = 0;
    for (const auto& s : result.ranking) {
        std::string ids;
        for (const auto& id : s.achieved_ids) ids += (ids.empty() ? "" : ";") + id;
        std::ostringstream spend;
        spend << s.spend_sum();
        os << (s.failed ? std::string() : std::to_string(++rank)) << ',' << io::csv_escape(s.plan_id) << ','
           << io::csv_escape(s.hypothesis) << ',' << (s.failed ? "failed" : "ok") << ','
           << (s.failed ? std::string() : std::to_string(s.achieved_count)) << ','
           << (s.failed ? std::string() : std::to_string(s.unfavorable_effect_count)) << ','
           << (s.failed ? std::string() : spend.str()) << ','
           << (s.min_achieved ? std::to_string(*s.min_achieved) : std::string()) << ','
           << io::csv_escape(s.worst_hypothesis.value_or("")) << ',' << io::csv_escape(ids) << ','
           << io::csv_escape(s.failure) << '\n';
    }
    return os.str();
}

}  // namespace wargame
