#pragma once

// Bundled demonstration content: a two-province, two-hypothesis PMESII
// scenario with three candidate plans and ten desired effects, and
// generators for large synthetic scenarios/plans used by the scale checks.

#include <cstdint>
#include <vector>

#include "wargame/coa.hpp"
#include "wargame/model.hpp"
#include "wargame/plan.hpp"

namespace wargame::demo {

std::vector<ComponentTemplate> pmesii_templates();
Scenario scenario();
Plan empty_plan();
Plan integrated_plan();
Plan security_plan();
Plan reconstruction_plan();
std::vector<DesiredEffect> desired_effects();

/// `instances` components cycled over the PMESII templates, four per
/// province, with intra-province wiring plus sparse cross-province links.
/// Two hypotheses that differ in parameter overrides.
Scenario scale_scenario(std::size_t instances, std::uint64_t seed);

/// A valid plan of `actions` random actions against `graph` (3 LOEs, pools
/// sized to fit) whose windows all end within `horizon`.
Plan scale_plan(const ModelGraph& graph, std::size_t actions, int horizon, std::uint64_t seed, std::string id);

}  // namespace wargame::demo
