#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "wargame/findings.hpp"
#include "wargame/model.hpp"
#include "wargame/plan.hpp"

namespace wargame {

/// One tick is one simulated week.
struct RunConfig {
    int horizon_ticks = 52;
    std::uint64_t seed = 0;
    bool noise_enabled = false;
};

struct Series {
    VarRef key;
    Polarity polarity = Polarity::favorable_high;
    std::vector<double> values;  // horizon_ticks + 1 entries, t = 0 included

    friend bool operator==(const Series&, const Series&) = default;
};

struct NationalSeries {
    std::string name;
    std::vector<double> values;

    friend bool operator==(const NationalSeries&, const NationalSeries&) = default;
};

struct Trajectory {
    int horizon_ticks = 0;
    std::vector<Series> series;              // graph instance order, then state-var order
    std::vector<NationalSeries> national;    // aggregation rule order

    [[nodiscard]] const Series* find(const VarRef& key) const;
    [[nodiscard]] const NationalSeries* find_national(const std::string& name) const;
    [[nodiscard]] Frame frame_at(int tick) const;

    friend bool operator==(const Trajectory&, const Trajectory&) = default;
};

/// A sustained deviation of plan from baseline. window is inclusive on both ends.
struct EffectRecord {
    std::string instance;
    std::string var;
    int window_start = 0;
    int window_end = 0;
    double mean_delta = 0.0;
    bool favorable = false;

    friend bool operator==(const EffectRecord&, const EffectRecord&) = default;
};

inline constexpr double kDefaultEffectThreshold = 5.0;
inline constexpr int kDefaultEffectPersistence = 4;

/// Thrown when simulate meets a graph/plan that validation should have rejected.
class StructuralError : public std::logic_error {
  public:
    using std::logic_error::logic_error;
};

/// Standard normal draw keyed by (seed, instance, var, tick). Plan and
/// baseline runs therefore see the same noise realisation.
double keyed_normal(std::uint64_t seed, const std::string& instance, const std::string& var, int tick);

Trajectory simulate(const ModelGraph& graph, const Plan& plan, const RunConfig& cfg);
Trajectory baseline(const ModelGraph& graph, const RunConfig& cfg);

/// Maximal runs of ticks with |plan - baseline| >= threshold lasting at least
/// `persistence` ticks, one record per run. Throws InvalidArgument on shape
/// mismatch or bad parameters.
std::vector<EffectRecord> detect_effects(const Trajectory& base, const Trajectory& run, double threshold, int persistence);

struct CellKey {
    std::string hypothesis;
    std::string plan;
    std::size_t config_index = 0;
    friend auto operator<=>(const CellKey&, const CellKey&) = default;
};

struct CellResult {
    bool ok = false;
    std::optional<Trajectory> trajectory;
    ValidationReport findings;
    std::string reason;
};

/// Independent simulate() over the cross product of hypotheses, plans and
/// configs. A cell whose inputs fail validation is marked failed; the others
/// still run. `threads` = 0 picks the hardware concurrency.
std::map<CellKey, CellResult> batch_simulate(const std::vector<SituationHypothesis>& hypotheses,
                                            const std::vector<Plan>& plans, const std::vector<RunConfig>& cfgs,
                                            unsigned threads = 0);

}  // namespace wargame
