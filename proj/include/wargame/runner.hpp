#pragma once

// End-to-end runs over parsed documents: validate, simulate baseline and
// plan, detect effects, package the result with provenance hashes.

#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "wargame/coa.hpp"
#include "wargame/model.hpp"
#include "wargame/plan.hpp"
#include "wargame/sim.hpp"

namespace wargame {

struct RunProvenance {
    std::string scenario_id;
    std::string plan_id;
    std::string hypothesis;
    std::string scenario_hash;
    std::string plan_hash;
    std::string graph_hash;
};

struct RunResult {
    RunProvenance provenance;
    RunConfig config;
    double threshold = kDefaultEffectThreshold;
    int persistence = kDefaultEffectPersistence;
    Trajectory baseline;
    Trajectory run;
    std::vector<EffectRecord> effects;
};

struct RunOptions {
    std::string hypothesis;  // empty selects the scenario's first hypothesis
    RunConfig config;
    std::optional<double> threshold;  // default: scenario setting
    std::optional<int> persistence;
    std::optional<std::string> scenario_hash;  // default: hash of the canonical document
    std::optional<std::string> plan_hash;
};

const SituationHypothesis& select_hypothesis(const Scenario& scenario, const std::string& name);

/// validate_scenario plus validate_plan against the chosen hypothesis graph.
ValidationReport validate_pair(const Scenario& scenario, const Plan& plan, const std::string& hypothesis = {});

/// Throws ValidationFailed when the inputs carry validation errors and
/// NotFoundError for an unknown hypothesis.
RunResult execute_run(const Scenario& scenario, const Plan& plan, const RunOptions& options);

nlohmann::json to_json(const RunResult& result);

struct CompareResult {
    std::vector<CoaScore> ranking;  // compare_coas order; failed cells last
    std::vector<std::pair<std::string, RobustnessResult>> robustness;  // per plan, input order
};

/// Every (plan, hypothesis) cell is simulated through batch_simulate; failed
/// cells stay in the ranking with their reason.
CompareResult compare_plans(const Scenario& scenario, const std::vector<Plan>& plans,
                            const std::vector<DesiredEffect>& effects, const RunConfig& cfg, unsigned threads = 0);

/// One row per (plan, hypothesis) in ranking order.
std::string compare_csv(const CompareResult& result);

}  // namespace wargame
