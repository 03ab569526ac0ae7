#include "wargame/demo.hpp"

#include <random>
#include <string>

namespace wargame::demo {
namespace {

constexpr int kDemoHorizon = 104;

// Portable draws: the standard distributions are implementation-defined.
class Draw {
  public:
    explicit Draw(std::uint64_t seed) : eng_(seed) {}
    double uniform(double lo, double hi) { return lo + (hi - lo) * (static_cast<double>(eng_() >> 11) * 0x1.0p-53); }
    std::size_t index(std::size_t n) { return static_cast<std::size_t>(eng_() % n); }
    int between(int lo, int hi) { return lo + static_cast<int>(eng_() % static_cast<std::uint64_t>(hi - lo + 1)); }

  private:
    std::mt19937_64 eng_;
};

ComponentTemplate make_template(std::string id, ComponentKind kind, std::vector<LevelVar> vars,
                                std::vector<std::string> in, std::vector<std::string> out, Dynamics d) {
    return {std::move(id), kind, std::move(vars), std::move(in), std::move(out), std::move(d)};
}

void wire_province(ModelGraph& g, const std::string& p) {
    auto link = [&](const std::string& from, const std::string& out, const std::string& to, const std::string& in) {
        g.couplings.push_back({{p + "_" + from, out}, {p + "_" + to, in}, 1.0});
    };
    link("econ", "jobs", "soc", "jobs");
    link("econ", "jobs", "gov", "economy");
    link("sec", "security_level", "econ", "stability");
    link("sec", "security_level", "soc", "security");
    link("gov", "legitimacy_level", "sec", "legitimacy");
    link("soc", "unrest_level", "sec", "unrest");
}

Action make_action(std::string id, std::string name, Instrument instr, std::string loe, PortRef target, int start,
                   int duration, double intensity, std::string pool, double rate, std::set<std::string> deps = {}) {
    Action a;
    a.id = std::move(id);
    a.name = std::move(name);
    a.instrument = instr;
    a.line_of_effort = std::move(loe);
    a.target = std::move(target);
    a.start_tick = start;
    a.duration_ticks = duration;
    a.intensity = intensity;
    a.resource = ResourceDraw{std::move(pool), rate};
    a.dependencies = std::move(deps);
    return a;
}

Plan plan_shell(std::string id) {
    Plan p;
    p.id = std::move(id);
    p.scenario_id = "demo";
    p.horizon_ticks = kDemoHorizon;
    p.lines_of_effort = {{"Reconstruction", "Jobs programmes and infrastructure repair"},
                         {"Governance", "Anti-corruption reform and strategic communications"},
                         {"Security", "Clear-and-hold operations against insurgent networks"}};
    p.pools = {{"usaid", "USAID", 2000.0, PoolKind::financial},
               {"state", "Department of State", 800.0, PoolKind::financial},
               {"dod", "Department of Defense", 3000.0, PoolKind::personnel}};
    return p;
}

std::vector<Action> reconstruction_actions() {
    return {
        make_action("R1", "North jobs programme", Instrument::economic, "Reconstruction", {"north_econ", "investment"}, 4, 40, 2.0, "usaid", 15.0),
        make_action("R2", "South jobs programme", Instrument::economic, "Reconstruction", {"south_econ", "investment"}, 8, 40, 2.0, "usaid", 15.0),
        make_action("R3", "North infrastructure repair", Instrument::economic, "Reconstruction", {"north_econ", "investment"}, 44, 30, 1.5, "usaid", 10.0, {"R1"}),
    };
}

std::vector<Action> governance_actions() {
    return {
        make_action("G1", "North anti-corruption reform", Instrument::diplomatic, "Governance", {"north_gov", "reform"}, 0, 52, 1.5, "state", 5.0),
        make_action("G2", "South anti-corruption reform", Instrument::diplomatic, "Governance", {"south_gov", "reform"}, 12, 52, 1.5, "state", 5.0),
        make_action("G3", "North strategic communications", Instrument::information, "Governance", {"north_soc", "messaging"}, 6, 26, 2.0, "state", 4.0),
        make_action("G4", "South strategic communications", Instrument::information, "Governance", {"south_soc", "messaging"}, 20, 26, 2.0, "state", 4.0),
    };
}

std::vector<Action> security_actions() {
    return {
        make_action("S1", "Clear north", Instrument::military, "Security", {"north_sec", "operations"}, 0, 20, 1.5, "dod", 30.0),
        make_action("S2", "Hold north", Instrument::military, "Security", {"north_sec", "operations"}, 20, 60, 0.8, "dod", 15.0, {"S1"}),
        make_action("S3", "Clear south", Instrument::military, "Security", {"south_sec", "operations"}, 10, 20, 1.5, "dod", 30.0),
        make_action("S4", "Hold south", Instrument::military, "Security", {"south_sec", "operations"}, 30, 50, 0.8, "dod", 15.0, {"S3"}),
    };
}

}  // namespace

std::vector<ComponentTemplate> pmesii_templates() {
    using P = Polarity;
    return {
        make_template("economy", ComponentKind::economic,
                      {{"employment", 40, P::favorable_high}, {"growth", 30, P::favorable_high}},
                      {"investment", "stability"}, {"jobs"},
                      {{{0.95, 0.02}, {0.0, 0.90}}, {{0.5, 0.02}, {1.0, 0.01}}, {0.6, 2.0}, {{1.0, 0.0}}, {0.4, 0.6}}),
        make_template("governance", ComponentKind::political,
                      {{"corruption", 50, P::favorable_low}, {"legitimacy", 40, P::favorable_high}},
                      {"reform", "economy"}, {"legitimacy_level"},
                      {{{0.97, 0.0}, {-0.02, 0.95}}, {{-0.6, 0.0}, {0.4, 0.01}}, {1.8, 2.6}, {{0.0, 1.0}}, {0.3, 0.4}}),
        make_template("security", ComponentKind::military,
                      {{"insurgent_influence", 30, P::favorable_low}, {"security", 45, P::favorable_high}},
                      {"operations", "legitimacy", "unrest"}, {"security_level"},
                      {{{0.96, 0.0}, {-0.05, 0.95}},
                       {{-0.5, -0.01, 0.015}, {0.8, 0.01, -0.01}},
                       {1.4, 4.2},
                       {{0.0, 1.0}},
                       {0.5, 0.5}}),
        make_template("society", ComponentKind::social,
                      {{"unrest", 35, P::favorable_low}, {"public_support", 40, P::favorable_high}},
                      {"messaging", "jobs", "security"}, {"unrest_level"},
                      {{{0.95, 0.0}, {0.0, 0.95}},
                       {{-0.4, -0.01, -0.01}, {0.6, 0.01, 0.01}},
                       {2.9, 1.2},
                       {{1.0, 0.0}},
                       {0.5, 0.4}}),
    };
}

Scenario scenario() {
    Scenario s;
    s.id = "demo";
    s.templates = pmesii_templates();

    auto build = [&](const std::string& name, const std::vector<std::pair<std::string, std::vector<ParamOverride>>>& tweaks) {
        ModelGraph g;
        g.id = name;
        for (const std::string p : {"north", "south"}) {
            for (const auto& [suffix, tmpl] : std::vector<std::pair<std::string, std::string>>{
                     {"econ", "economy"}, {"gov", "governance"}, {"sec", "security"}, {"soc", "society"}}) {
                const auto id = p + "_" + suffix;
                std::vector<ParamOverride> ov;
                for (const auto& [target_id, list] : tweaks)
                    if (target_id == id) ov = list;
                g.instances.push_back(instantiate_template(s.templates, tmpl, ov, id, p, Tier::province));
            }
            wire_province(g, p);
        }
        g.couplings.push_back({{"north_sec", "security_level"}, {"south_econ", "stability"}, 0.2});
        g.aggregations = {
            {"national_employment", {{"north_econ", "employment"}, {"south_econ", "employment"}}, {0.6, 0.4}},
            {"national_security", {{"north_sec", "security"}, {"south_sec", "security"}}, {0.5, 0.5}},
            {"national_corruption", {{"north_gov", "corruption"}, {"south_gov", "corruption"}}, {0.5, 0.5}},
            {"national_unrest", {{"north_soc", "unrest"}, {"south_soc", "unrest"}}, {0.6, 0.4}},
        };
        return g;
    };

    s.hypotheses.push_back({"grievance", build("grievance", {}),
                            "Insurgency fed by unemployment and weak governance"});
    s.hypotheses.push_back(
        {"criminal-economy",
         build("criminal-economy",
               {{"north_sec", {{OverrideTarget::c, 0, 0, 1.7}, {OverrideTarget::B, 0, 0, -0.4}}},
                {"south_sec", {{OverrideTarget::c, 0, 0, 1.8}, {OverrideTarget::B, 0, 0, -0.4}}},
                {"north_gov", {{OverrideTarget::c, 0, 0, 2.1}}},
                {"south_gov", {{OverrideTarget::c, 0, 0, 2.1}, {OverrideTarget::initial, 0, 0, 55}}}}),
         "Insurgency financed by smuggling networks; corruption entrenched"});
    return s;
}

Plan empty_plan() { return plan_shell("empty"); }

Plan integrated_plan() {
    auto p = plan_shell("integrated");
    for (auto list : {reconstruction_actions(), governance_actions(), security_actions()})
        for (auto& a : list) p.actions.push_back(std::move(a));
    p.sort_actions();
    return p;
}

Plan security_plan() {
    auto p = plan_shell("security-only");
    p.actions = security_actions();
    p.sort_actions();
    return p;
}

Plan reconstruction_plan() {
    auto p = plan_shell("reconstruction-only");
    p.actions = reconstruction_actions();
    p.sort_actions();
    return p;
}

std::vector<DesiredEffect> desired_effects() {
    using D = Direction;
    return {
        {"E01-north-influence", {"north_sec", "insurgent_influence"}, D::decrease, 25, 80},
        {"E02-south-influence", {"south_sec", "insurgent_influence"}, D::decrease, 25, 90},
        {"E03-north-employment", {"north_econ", "employment"}, D::increase, 50, 60},
        {"E04-south-employment", {"south_econ", "employment"}, D::increase, 50, 70},
        {"E05-north-corruption", {"north_gov", "corruption"}, D::decrease, 45, 60},
        {"E06-south-corruption", {"south_gov", "corruption"}, D::decrease, 45, 70},
        {"E07-north-unrest", {"north_soc", "unrest"}, D::decrease, 30, 50},
        {"E08-south-unrest", {"south_soc", "unrest"}, D::decrease, 30, 60},
        {"E09-national-security", {"", "national_security"}, D::increase, 55, 80},
        {"E10-national-employment", {"", "national_employment"}, D::increase, 50, 80},
    };
}

Scenario scale_scenario(std::size_t instances, std::uint64_t seed) {
    static const std::vector<std::pair<std::string, std::string>> kinds = {
        {"econ", "economy"}, {"gov", "governance"}, {"sec", "security"}, {"soc", "society"}};
    Scenario s;
    s.id = "scale-" + std::to_string(instances);
    s.templates = pmesii_templates();

    auto build = [&](const std::string& name, bool perturb) {
        Draw local(seed ^ (perturb ? 0x9e37ULL : 0x1ULL));
        ModelGraph g;
        g.id = name;
        const std::size_t provinces = (instances + kinds.size() - 1) / kinds.size();
        for (std::size_t i = 0; i < instances; ++i) {
            const auto& [suffix, tmpl] = kinds[i % kinds.size()];
            const auto province = "p" + std::to_string(i / kinds.size());
            std::vector<ParamOverride> ov;
            if (perturb) ov.push_back({OverrideTarget::c, 0, 0, local.uniform(1.0, 2.2)});
            g.instances.push_back(instantiate_template(s.templates, tmpl, ov, province + "_" + suffix, province, Tier::province));
        }
        for (std::size_t p = 0; p < provinces; ++p) {
            const auto base = p * kinds.size();
            if (base + kinds.size() <= instances) wire_province(g, "p" + std::to_string(p));
        }
        // Sparse cross-province security spillover.
        for (std::size_t p = 1; p < provinces; ++p) {
            const auto from = "p" + std::to_string(p - 1) + "_sec";
            const auto to = "p" + std::to_string(p) + "_econ";
            if (g.find_instance(from) && g.find_instance(to))
                g.couplings.push_back({{from, "security_level"}, {to, "stability"}, 0.1});
        }
        for (const auto& [suffix, tmpl] : kinds) {
            AggregationRule rule;
            rule.national_var = "national_" + suffix;
            for (const auto& inst : g.instances)
                if (inst.template_ref == tmpl) rule.sources.push_back({inst.id, inst.state_vars.front().name()});
            if (rule.sources.empty()) continue;
            rule.weights.assign(rule.sources.size(), 1.0 / static_cast<double>(rule.sources.size()));
            double sum = 0.0;
            for (std::size_t k = 0; k + 1 < rule.weights.size(); ++k) sum += rule.weights[k];
            rule.weights.back() = 1.0 - sum;
            g.aggregations.push_back(std::move(rule));
        }
        return g;
    };
    s.hypotheses.push_back({"baseline-view", build("baseline-view", false), "generated"});
    s.hypotheses.push_back({"alternative-view", build("alternative-view", true), "generated, perturbed drifts"});
    return s;
}

Plan scale_plan(const ModelGraph& graph, std::size_t actions, int horizon, std::uint64_t seed, std::string id) {
    Draw draw(seed);
    Plan p;
    p.id = std::move(id);
    p.horizon_ticks = horizon;
    p.lines_of_effort = {{"Reconstruction", ""}, {"Governance", ""}, {"Security", ""}};
    p.pools = {{"civil", "civil agencies", 0.0, PoolKind::financial}, {"military", "military", 0.0, PoolKind::personnel}};
    static const Instrument instruments[] = {Instrument::economic, Instrument::diplomatic, Instrument::military,
                                             Instrument::information};
    for (std::size_t i = 0; i < actions; ++i) {
        const auto& inst = graph.instances[draw.index(graph.instances.size())];
        Action a;
        a.id = "A" + std::to_string(1000 + i);
        a.name = "generated action " + std::to_string(i);
        a.instrument = instruments[draw.index(4)];
        a.line_of_effort = p.lines_of_effort[draw.index(3)].name;
        a.target = {inst.id, inst.input_ports[draw.index(inst.input_ports.size())]};
        a.duration_ticks = draw.between(1, std::min(52, horizon));
        a.start_tick = draw.between(0, horizon - a.duration_ticks);
        a.intensity = draw.uniform(-1.0, 1.0);
        const bool military = a.instrument == Instrument::military;
        a.resource = ResourceDraw{military ? "military" : "civil", draw.uniform(0.0, 5.0)};
        p.actions.push_back(std::move(a));
    }
    // Budgets sized to the plan so it validates cleanly.
    for (const auto& [pool, spend] : planned_spend(p))
        for (auto& pl : p.pools)
            if (pl.id == pool) pl.budget = spend * 1.1 + 1.0;
    p.sort_actions();
    return p;
}

}  // namespace wargame::demo
