#pragma once

// PMESII component templates, their tailored instances and the coupled
// two-tier (province/national) model graph they compose into.
//
// Every component is a synchronous discrete-time affine block:
//   x[t+1] = clamp_[0,100](A x[t] + B u[t] + c + noise),   y[t] = C x[t]

#include <cstddef>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "wargame/findings.hpp"

namespace wargame {

inline constexpr double kLevelMin = 0.0;
inline constexpr double kLevelMax = 100.0;

[[nodiscard]] inline double clamp_level(double v) {
    return v < kLevelMin ? kLevelMin : (v > kLevelMax ? kLevelMax : v);
}

enum class Polarity { favorable_high, favorable_low };
enum class ComponentKind { political, military, economic, social, information, infrastructure };
enum class Tier { province, national };

using Matrix = std::vector<std::vector<double>>;

/// Declaration of one state variable: a level in [0,100] with a fixed polarity.
class LevelVar {
  public:
    LevelVar() = default;
    LevelVar(std::string name, double value, Polarity polarity)
        : name_(std::move(name)), value_(clamp_level(value)), polarity_(polarity) {}

    [[nodiscard]] const std::string& name() const { return name_; }
    [[nodiscard]] double value() const { return value_; }
    [[nodiscard]] Polarity polarity() const { return polarity_; }
    void set_value(double v) { value_ = clamp_level(v); }

  private:
    std::string name_;
    double value_ = 0.0;
    Polarity polarity_ = Polarity::favorable_high;
};

/// Parameters of an affine block. A is k x k, B is k x m, c is k, C is p x k.
struct Dynamics {
    Matrix A;
    Matrix B;
    std::vector<double> c;
    Matrix C;
    std::vector<double> noise_std;
};

struct ComponentTemplate {
    std::string id;
    ComponentKind kind = ComponentKind::economic;
    std::vector<LevelVar> state_vars;
    std::vector<std::string> input_ports;
    std::vector<std::string> output_ports;
    Dynamics dynamics;
};

enum class OverrideTarget { A, B, c, noise_std, initial };

/// Sparse write into one coordinate of an instance's parameters. `col` is
/// only meaningful for the matrix targets A and B.
struct ParamOverride {
    OverrideTarget target = OverrideTarget::A;
    std::size_t row = 0;
    std::size_t col = 0;
    double value = 0.0;
};

struct ComponentInstance {
    std::string id;
    std::string template_ref;
    std::vector<ParamOverride> overrides;
    std::string region;
    Tier tier = Tier::province;

    // Effective (merged) parameters.
    std::vector<LevelVar> state_vars;
    std::vector<std::string> input_ports;
    std::vector<std::string> output_ports;
    Dynamics dynamics;

    [[nodiscard]] std::optional<std::size_t> state_index(const std::string& name) const;
    [[nodiscard]] std::optional<std::size_t> input_index(const std::string& name) const;
    [[nodiscard]] std::optional<std::size_t> output_index(const std::string& name) const;
};

struct PortRef {
    std::string instance;
    std::string port;
    friend bool operator==(const PortRef&, const PortRef&) = default;
    friend auto operator<=>(const PortRef&, const PortRef&) = default;
};

/// Signal path from an output port to an input port. Multiple couplings into
/// one input port superpose additively.
struct Coupling {
    PortRef from;
    PortRef to;
    double gain = 1.0;
};

struct VarRef {
    std::string instance;
    std::string var;
    friend bool operator==(const VarRef&, const VarRef&) = default;
    friend auto operator<=>(const VarRef&, const VarRef&) = default;
};

/// national_var = sum_i weights[i] * sources[i]
struct AggregationRule {
    std::string national_var;
    std::vector<VarRef> sources;
    std::vector<double> weights;
};

struct ModelGraph {
    std::string id;
    std::vector<ComponentInstance> instances;
    std::vector<Coupling> couplings;
    std::vector<AggregationRule> aggregations;

    [[nodiscard]] const ComponentInstance* find_instance(const std::string& id) const;
    [[nodiscard]] const AggregationRule* find_aggregation(const std::string& name) const;
};

struct SituationHypothesis {
    std::string name;
    ModelGraph graph;
    std::string provenance;
};

/// Templates plus the competing hypotheses built from them.
struct Scenario {
    std::string id;
    std::vector<ComponentTemplate> templates;
    std::vector<SituationHypothesis> hypotheses;
    double effect_threshold = 5.0;
    int effect_persistence = 4;

    [[nodiscard]] const ComponentTemplate* find_template(const std::string& id) const;
    [[nodiscard]] const SituationHypothesis* find_hypothesis(const std::string& name) const;
};

/// Copies the template's parameters and applies `overrides` on top.
/// Throws InvalidArgument for bad coordinates or initial values outside [0,100].
ComponentInstance instantiate_template(const ComponentTemplate& tmpl, const std::vector<ParamOverride>& overrides,
                                       std::string instance_id, std::string region, Tier tier);

/// Looks the template up by id first; throws NotFoundError when absent.
ComponentInstance instantiate_template(const std::vector<ComponentTemplate>& library, const std::string& template_id,
                                       const std::vector<ParamOverride>& overrides, std::string instance_id,
                                       std::string region, Tier tier);

/// Throws InvalidArgument on duplicate instance ids. Structure is checked by validate_graph.
ModelGraph compose(std::string graph_id, std::vector<ComponentInstance> instances, std::vector<Coupling> couplings,
                   std::vector<AggregationRule> aggregations);

ValidationReport validate_graph(const ModelGraph& graph);

/// Graph checks plus scenario-level ones (template references, hypothesis names).
ValidationReport validate_scenario(const Scenario& scenario);

/// One tick's worth of state values keyed by (instance, var).
using Frame = std::map<VarRef, double>;

/// Weighted sum of province values for `national_var`. Throws NotFoundError
/// when the rule or one of its source values is missing.
double aggregate(const ModelGraph& graph, const Frame& frame, const std::string& national_var);

const char* to_string(Polarity p);
const char* to_string(ComponentKind k);
const char* to_string(Tier t);
const char* to_string(OverrideTarget t);
Polarity polarity_from_string(const std::string& s);
ComponentKind component_kind_from_string(const std::string& s);
Tier tier_from_string(const std::string& s);
OverrideTarget override_target_from_string(const std::string& s);

}  // namespace wargame
