#include "wargame/model.hpp"

#include <cmath>
#include <set>
#include <sstream>

#include "wargame/errors.hpp"

namespace wargame {
namespace {

template <typename T, typename Key>
std::optional<std::size_t> index_of(const std::vector<T>& items, const Key& key) {
    for (std::size_t i = 0; i < items.size(); ++i)
        if (items[i] == key) return i;
    return std::nullopt;
}

std::string coord(OverrideTarget t, std::size_t row, std::size_t col) {
    std::ostringstream os;
    os << to_string(t) << '[' << row << ']';
    if (t == OverrideTarget::A || t == OverrideTarget::B) os << '[' << col << ']';
    return os.str();
}

bool matrix_shape_is(const Matrix& m, std::size_t rows, std::size_t cols) {
    if (m.size() != rows) return false;
    for (const auto& r : m)
        if (r.size() != cols) return false;
    return true;
}

bool all_finite(const Matrix& m) {
    for (const auto& r : m)
        for (double v : r)
            if (!std::isfinite(v)) return false;
    return true;
}

bool all_finite(const std::vector<double>& v) {
    for (double x : v)
        if (!std::isfinite(x)) return false;
    return true;
}

}  // namespace

std::optional<std::size_t> ComponentInstance::state_index(const std::string& name) const {
    for (std::size_t i = 0; i < state_vars.size(); ++i)
        if (state_vars[i].name() == name) return i;
    return std::nullopt;
}

std::optional<std::size_t> ComponentInstance::input_index(const std::string& name) const {
    return index_of(input_ports, name);
}

std::optional<std::size_t> ComponentInstance::output_index(const std::string& name) const {
    return index_of(output_ports, name);
}

const ComponentInstance* ModelGraph::find_instance(const std::string& instance_id) const {
    for (const auto& inst : instances)
        if (inst.id == instance_id) return &inst;
    return nullptr;
}

const AggregationRule* ModelGraph::find_aggregation(const std::string& name) const {
    for (const auto& rule : aggregations)
        if (rule.national_var == name) return &rule;
    return nullptr;
}

const ComponentTemplate* Scenario::find_template(const std::string& template_id) const {
    for (const auto& t : templates)
        if (t.id == template_id) return &t;
    return nullptr;
}

const SituationHypothesis* Scenario::find_hypothesis(const std::string& name) const {
    for (const auto& h : hypotheses)
        if (h.name == name) return &h;
    return nullptr;
}

ComponentInstance instantiate_template(const ComponentTemplate& tmpl, const std::vector<ParamOverride>& overrides,
                                       std::string instance_id, std::string region, Tier tier) {
    ComponentInstance inst;
    inst.id = std::move(instance_id);
    inst.template_ref = tmpl.id;
    inst.overrides = overrides;
    inst.region = std::move(region);
    inst.tier = tier;
    inst.state_vars = tmpl.state_vars;
    inst.input_ports = tmpl.input_ports;
    inst.output_ports = tmpl.output_ports;
    inst.dynamics = tmpl.dynamics;

    auto& d = inst.dynamics;
    for (const auto& o : overrides) {
        const auto where = coord(o.target, o.row, o.col);
        auto bad = [&] { return InvalidArgument("instance '" + inst.id + "': bad override coordinate " + where); };
        if (!std::isfinite(o.value)) throw InvalidArgument("instance '" + inst.id + "': non-finite override " + where);
        switch (o.target) {
            case OverrideTarget::A:
                if (o.row >= d.A.size() || o.col >= d.A[o.row].size()) throw bad();
                d.A[o.row][o.col] = o.value;
                break;
            case OverrideTarget::B:
                if (o.row >= d.B.size() || o.col >= d.B[o.row].size()) throw bad();
                d.B[o.row][o.col] = o.value;
                break;
            case OverrideTarget::c:
                if (o.row >= d.c.size()) throw bad();
                d.c[o.row] = o.value;
                break;
            case OverrideTarget::noise_std:
                if (o.row >= d.noise_std.size()) throw bad();
                if (o.value < 0) throw InvalidArgument("instance '" + inst.id + "': negative noise at " + where);
                d.noise_std[o.row] = o.value;
                break;
            case OverrideTarget::initial:
                if (o.row >= inst.state_vars.size()) throw bad();
                if (o.value < kLevelMin || o.value > kLevelMax)
                    throw InvalidArgument("instance '" + inst.id + "': initial value out of range [0,100] at " + where);
                inst.state_vars[o.row].set_value(o.value);
                break;
        }
    }
    return inst;
}

ComponentInstance instantiate_template(const std::vector<ComponentTemplate>& library, const std::string& template_id,
                                       const std::vector<ParamOverride>& overrides, std::string instance_id,
                                       std::string region, Tier tier) {
    for (const auto& t : library)
        if (t.id == template_id) return instantiate_template(t, overrides, std::move(instance_id), std::move(region), tier);
    throw NotFoundError("unknown template '" + template_id + "'");
}

ModelGraph compose(std::string graph_id, std::vector<ComponentInstance> instances, std::vector<Coupling> couplings,
                   std::vector<AggregationRule> aggregations) {
    std::set<std::string> seen;
    for (const auto& inst : instances)
        if (!seen.insert(inst.id).second) throw InvalidArgument("duplicate instance id '" + inst.id + "'");
    ModelGraph g;
    g.id = std::move(graph_id);
    g.instances = std::move(instances);
    g.couplings = std::move(couplings);
    g.aggregations = std::move(aggregations);
    return g;
}

ValidationReport validate_graph(const ModelGraph& graph) {
    ValidationReport report;

    std::set<std::string> ids;
    for (const auto& inst : graph.instances) {
        if (!ids.insert(inst.id).second) report.error("duplicate-instance", inst.id, "instance id appears more than once");

        const auto k = inst.state_vars.size();
        const auto m = inst.input_ports.size();
        const auto p = inst.output_ports.size();
        const auto& d = inst.dynamics;
        if (!matrix_shape_is(d.A, k, k)) report.error("dimension-mismatch", inst.id, "A must be k x k");
        if (!matrix_shape_is(d.B, k, m)) report.error("dimension-mismatch", inst.id, "B must be k x m");
        if (d.c.size() != k) report.error("dimension-mismatch", inst.id, "c must have k entries");
        if (!matrix_shape_is(d.C, p, k)) report.error("dimension-mismatch", inst.id, "C must be p x k");
        if (d.noise_std.size() != k) report.error("dimension-mismatch", inst.id, "noiseStd must have k entries");
        if (!all_finite(d.A) || !all_finite(d.B) || !all_finite(d.C) || !all_finite(d.c) || !all_finite(d.noise_std))
            report.error("non-finite-parameter", inst.id, "parameters must be finite");
        for (double s : d.noise_std)
            if (s < 0) {
                report.error("negative-noise", inst.id, "noiseStd must be nonnegative");
                break;
            }
        std::set<std::string> names;
        for (const auto& v : inst.state_vars) {
            if (!names.insert(v.name()).second) report.error("duplicate-var", inst.id + "." + v.name(), "state variable declared twice");
        }
        if (std::set<std::string>(inst.input_ports.begin(), inst.input_ports.end()).size() != m)
            report.error("duplicate-port", inst.id, "input port declared twice");
        if (std::set<std::string>(inst.output_ports.begin(), inst.output_ports.end()).size() != p)
            report.error("duplicate-port", inst.id, "output port declared twice");
    }

    std::set<PortRef> bound;
    for (const auto& cpl : graph.couplings) {
        const auto label = cpl.from.instance + "." + cpl.from.port + " -> " + cpl.to.instance + "." + cpl.to.port;
        const auto* src = graph.find_instance(cpl.from.instance);
        const auto* dst = graph.find_instance(cpl.to.instance);
        if (src == nullptr || !src->output_index(cpl.from.port))
            report.error("dangling-coupling", label, "source output port does not exist");
        if (dst == nullptr || !dst->input_index(cpl.to.port))
            report.error("dangling-coupling", label, "target input port does not exist");
        if (!std::isfinite(cpl.gain)) report.error("non-finite-parameter", label, "coupling gain must be finite");
        bound.insert(cpl.to);
    }

    std::set<std::string> national;
    for (const auto& rule : graph.aggregations) {
        if (!national.insert(rule.national_var).second)
            report.error("duplicate-aggregation", rule.national_var, "national variable defined twice");
        if (rule.sources.empty()) report.error("empty-aggregation", rule.national_var, "aggregation has no sources");
        if (rule.sources.size() != rule.weights.size()) {
            report.error("aggregation-arity", rule.national_var, "sources and weights differ in length");
        }
        double sum = 0.0;
        for (double w : rule.weights) sum += w;
        if (!rule.weights.empty() && std::fabs(sum - 1.0) > 1e-9) {
            std::ostringstream os;
            os << "weights sum to " << sum << ", expected 1";
            report.error("aggregation-weights", rule.national_var, os.str());
        }
        for (const auto& src : rule.sources) {
            const auto* inst = graph.find_instance(src.instance);
            if (inst == nullptr || !inst->state_index(src.var)) {
                report.error("dangling-aggregation", rule.national_var + " <- " + src.instance + "." + src.var,
                             "aggregation source does not exist");
            } else if (inst->tier != Tier::province) {
                report.warning("aggregation-tier", rule.national_var + " <- " + src.instance + "." + src.var,
                               "aggregation source is not a province-tier instance");
            }
        }
    }

    for (const auto& inst : graph.instances)
        for (const auto& port : inst.input_ports)
            if (!bound.contains(PortRef{inst.id, port}))
                report.warning("unbound-input", inst.id + "." + port, "input port has no coupling; only plan actions drive it");

    return report;
}

ValidationReport validate_scenario(const Scenario& scenario) {
    ValidationReport report;
    std::set<std::string> tmpl_ids;
    for (const auto& t : scenario.templates)
        if (!tmpl_ids.insert(t.id).second) report.error("duplicate-template", t.id, "template id appears more than once");
    std::set<std::string> names;
    std::set<std::string> graph_ids;
    for (const auto& h : scenario.hypotheses) {
        if (!names.insert(h.name).second) report.error("duplicate-hypothesis", h.name, "hypothesis names must be distinct");
        if (!h.graph.id.empty() && !graph_ids.insert(h.graph.id).second)
            report.error("duplicate-graph", h.graph.id, "graph identifiers must be unique within a scenario");
        for (const auto& inst : h.graph.instances)
            if (!tmpl_ids.contains(inst.template_ref))
                report.error("unknown-template", h.name + "/" + inst.id, "instance references unknown template '" + inst.template_ref + "'");
        auto graph_report = validate_graph(h.graph);
        for (auto& f : graph_report.findings) f.subject = h.name + "/" + f.subject;
        report.append(graph_report);
    }
    if (!(scenario.effect_threshold > 0)) report.error("effect-threshold", scenario.id, "effect threshold must be > 0");
    if (scenario.effect_persistence < 1) report.error("effect-persistence", scenario.id, "effect persistence must be >= 1");
    return report;
}

double aggregate(const ModelGraph& graph, const Frame& frame, const std::string& national_var) {
    const auto* rule = graph.find_aggregation(national_var);
    if (rule == nullptr) throw NotFoundError("no aggregation rule for '" + national_var + "'");
    double total = 0.0;
    for (std::size_t i = 0; i < rule->sources.size() && i < rule->weights.size(); ++i) {
        auto it = frame.find(rule->sources[i]);
        if (it == frame.end())
            throw NotFoundError("missing value for " + rule->sources[i].instance + "." + rule->sources[i].var);
        total += rule->weights[i] * it->second;
    }
    return total;
}

const char* to_string(Polarity p) { return p == Polarity::favorable_high ? "favorable-high" : "favorable-low"; }

const char* to_string(ComponentKind k) {
    switch (k) {
        case ComponentKind::political: return "political";
        case ComponentKind::military: return "military";
        case ComponentKind::economic: return "economic";
        case ComponentKind::social: return "social";
        case ComponentKind::information: return "information";
        case ComponentKind::infrastructure: return "infrastructure";
    }
    return "economic";
}

const char* to_string(Tier t) { return t == Tier::province ? "province" : "national"; }

const char* to_string(OverrideTarget t) {
    switch (t) {
        case OverrideTarget::A: return "A";
        case OverrideTarget::B: return "B";
        case OverrideTarget::c: return "c";
        case OverrideTarget::noise_std: return "noiseStd";
        case OverrideTarget::initial: return "initial";
    }
    return "A";
}

Polarity polarity_from_string(const std::string& s) {
    if (s == "favorable-high") return Polarity::favorable_high;
    if (s == "favorable-low") return Polarity::favorable_low;
    throw ParseError("unknown polarity '" + s + "'");
}

ComponentKind component_kind_from_string(const std::string& s) {
    for (auto k : {ComponentKind::political, ComponentKind::military, ComponentKind::economic, ComponentKind::social,
                   ComponentKind::information, ComponentKind::infrastructure})
        if (s == to_string(k)) return k;
    throw ParseError("unknown component kind '" + s + "'");
}

Tier tier_from_string(const std::string& s) {
    if (s == "province") return Tier::province;
    if (s == "national") return Tier::national;
    throw ParseError("unknown tier '" + s + "'");
}

OverrideTarget override_target_from_string(const std::string& s) {
    for (auto t : {OverrideTarget::A, OverrideTarget::B, OverrideTarget::c, OverrideTarget::noise_std, OverrideTarget::initial})
        if (s == to_string(t)) return t;
    throw ParseError("unknown override target '" + s + "'");
}

}  // namespace wargame
