#pragma once

#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "wargame/findings.hpp"
#include "wargame/sim.hpp"

namespace wargame {

enum class Direction { increase, decrease };

/// What a desired effect watches: an instance state variable, or a national
/// aggregate when `instance` is empty.
struct EffectTarget {
    std::string instance;
    std::string var;

    [[nodiscard]] bool is_national() const { return instance.empty(); }
    [[nodiscard]] std::string label() const { return is_national() ? var : instance + "." + var; }
    friend auto operator<=>(const EffectTarget&, const EffectTarget&) = default;
};

struct DesiredEffect {
    std::string id;
    EffectTarget target;
    Direction direction = Direction::increase;
    double threshold_level = 50.0;
    int deadline_tick = 0;
};

struct EffectStatus {
    std::string effect_id;
    bool achieved = false;
    std::optional<int> first_achieved_tick;  // start of the run that is sustained through the deadline
};

/// Resolves the target's series; throws NotFoundError if absent.
const std::vector<double>& target_series(const Trajectory& traj, const EffectTarget& target);

/// An effect is achieved when the target sits on the satisfied side of the
/// threshold (>= for increase, <= for decrease) from some tick through the
/// deadline. Throws NotFoundError for unknown targets and InvalidArgument for
/// deadlines outside the trajectory.
std::vector<EffectStatus> evaluate_coa(const Trajectory& traj, const std::vector<DesiredEffect>& effects);

/// Canonical signature of an effect set (sorted ids); scores are only comparable when equal.
std::string effect_set_signature(const std::vector<DesiredEffect>& effects);

struct CoaScore {
    std::string plan_id;
    std::string hypothesis;
    std::string effect_set;
    bool failed = false;
    std::string failure;
    int achieved_count = 0;
    std::set<std::string> achieved_ids;
    int unfavorable_effect_count = 0;
    std::map<std::string, double> total_spend;
    std::optional<int> min_achieved;
    std::optional<std::string> worst_hypothesis;

    [[nodiscard]] double spend_sum() const;
};

/// Builds a score from a plan run and its baseline.
CoaScore score_coa(const Plan& plan, const std::string& hypothesis, const Trajectory& base, const Trajectory& run,
                   const std::vector<DesiredEffect>& effects, double threshold = kDefaultEffectThreshold,
                   int persistence = kDefaultEffectPersistence);

/// Strict weak order used by compare_coas: achieved desc, unfavorable asc,
/// spend asc, then plan id and hypothesis name. Failed scores sort last.
bool coa_before(const CoaScore& a, const CoaScore& b);

/// Throws InvalidArgument when scores come from different effect sets.
std::vector<CoaScore> compare_coas(std::vector<CoaScore> scores);

struct HypothesisOutcome {
    std::string hypothesis;
    bool ok = false;
    int achieved_count = 0;
    ValidationReport findings;
    std::string reason;
};

struct RobustnessResult {
    std::vector<HypothesisOutcome> per_hypothesis;
    std::optional<int> min_achieved;            // over hypotheses that ran
    std::optional<std::string> worst_hypothesis;  // first hypothesis attaining the minimum
};

RobustnessResult robustness(const Plan& plan, const std::vector<SituationHypothesis>& hypotheses,
                            const std::vector<DesiredEffect>& effects, const RunConfig& cfg);

inline constexpr double kDefaultTrackThreshold = 10.0;

struct Observation {
    int tick = 0;
    EffectTarget target;
    double value = 0.0;
};

struct DivergencePoint {
    int tick = 0;
    double divergence = 0.0;  // observed - expected
};

struct ProgressFlag {
    int tick = 0;
    EffectTarget target;
    double divergence = 0.0;
};

struct ProgressReport {
    std::map<EffectTarget, std::vector<DivergencePoint>> divergence;  // each sorted by tick
    std::vector<ProgressFlag> flags;                                   // sorted by tick, then target
};

ProgressReport track_progress(const Trajectory& expected, const std::vector<Observation>& observed,
                              double threshold = kDefaultTrackThreshold);

const char* to_string(Direction d);
Direction direction_from_string(const std::string& s);

}  // namespace wargame
