#pragma once

#include <map>
#include <optional>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "wargame/findings.hpp"
#include "wargame/model.hpp"

namespace wargame {

enum class Instrument { diplomatic, information, military, economic };
enum class PoolKind { financial, personnel };

struct ResourceDraw {
    std::string pool;
    double rate_per_tick = 0.0;
};

/// A DIME action: injects `intensity` into its target input port on every
/// tick of [start_tick, start_tick + duration_ticks).
struct Action {
    std::string id;
    std::string name;
    Instrument instrument = Instrument::economic;
    std::string line_of_effort;
    PortRef target;
    int start_tick = 0;
    int duration_ticks = 1;
    double intensity = 0.0;
    std::optional<ResourceDraw> resource;
    std::set<std::string> dependencies;  // finish-before-start

    [[nodiscard]] int end_tick() const { return start_tick + duration_ticks; }
    [[nodiscard]] bool active_at(int tick) const { return tick >= start_tick && tick < end_tick(); }
};

struct LineOfEffort {
    std::string name;
    std::string description;
};

struct ResourcePool {
    std::string id;
    std::string agency;
    double budget = 0.0;
    PoolKind kind = PoolKind::financial;
};

struct Plan {
    std::string id;
    std::string scenario_id;
    std::vector<Action> actions;
    std::vector<LineOfEffort> lines_of_effort;
    std::vector<ResourcePool> pools;
    int horizon_ticks = 0;
    long version = 1;

    [[nodiscard]] const Action* find_action(const std::string& id) const;
    [[nodiscard]] const ResourcePool* find_pool(const std::string& id) const;
    /// Actions ordered by (start_tick, id), the canonical file order.
    void sort_actions();
};

/// Structural checks only: cycles, ordering, overdraft, horizon, LOE and pool
/// references. Target resolution needs a graph; see the two-argument overload.
ValidationReport validate_plan(const Plan& plan);
ValidationReport validate_plan(const Plan& plan, const ModelGraph& graph);

/// Total Σ rate × duration drawn from each pool by the plan's actions.
std::map<std::string, double> planned_spend(const Plan& plan);

struct DuplicatePair {
    std::string first;
    std::string second;
    PortRef target;
};

struct DuplicateReport {
    std::vector<DuplicatePair> pairs;
};

/// Unions the plans' actions, LOEs and pools. Action ids are kept when unique
/// and relabelled `<id>@<planId>` (plus a counter if needed) on collision.
/// Throws InvalidArgument when two plans define the same pool differently.
std::pair<Plan, DuplicateReport> merge_plans(const std::vector<Plan>& plans);

/// Pairs of actions sharing a target port with overlapping active windows.
DuplicateReport find_duplicates(const Plan& plan);

struct SyncMatrix {
    int bucket_ticks = 1;
    std::vector<std::string> rows;                       // LOE names, declaration order
    std::vector<std::vector<std::vector<std::string>>> cells;  // [row][bucket] -> action ids
    [[nodiscard]] std::size_t bucket_count() const { return cells.empty() ? 0 : cells.front().size(); }
};

/// Bucket count covers max(horizon, latest action end). Throws InvalidArgument if bucket_ticks < 1.
SyncMatrix sync_matrix(const Plan& plan, int bucket_ticks);

/// CSV with header `lineOfEffort,t<start>,...`; cells list action ids joined by ';'.
std::string sync_matrix_csv(const SyncMatrix& m);

struct ResourceProfile {
    std::vector<std::string> pools;                // plan pool order, then undeclared pools referenced by actions
    std::vector<std::vector<double>> cumulative;   // [pool][tick]
};

/// Cumulative spend per pool at ticks 0..L-1 with L = max(horizon, latest action end, 1);
/// spend during tick t is included in entry t.
ResourceProfile resource_profile(const Plan& plan);

const char* to_string(Instrument i);
const char* to_string(PoolKind k);
Instrument instrument_from_string(const std::string& s);
PoolKind pool_kind_from_string(const std::string& s);

}  // namespace wargame
