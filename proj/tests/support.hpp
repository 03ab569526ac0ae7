#pragma once

// Small hand-computable fixtures shared by the test binaries.

#include <filesystem>
#include <random>
#include <string>

#include "wargame/model.hpp"
#include "wargame/plan.hpp"
#include "wargame/sim.hpp"

namespace fixture {

using namespace wargame;

/// One state variable x, one input u, one output y = x:
///   x[t+1] = a x[t] + b u[t] + c
inline ComponentTemplate scalar_template(std::string id, double a, double b, double c, double x0 = 50.0,
                                         Polarity pol = Polarity::favorable_high) {
    ComponentTemplate t;
    t.id = std::move(id);
    t.kind = ComponentKind::economic;
    t.state_vars = {LevelVar("x", x0, pol)};
    t.input_ports = {"u"};
    t.output_ports = {"y"};
    t.dynamics = Dynamics{{{a}}, {{b}}, {c}, {{1.0}}, {0.0}};
    return t;
}

inline ComponentInstance instance(const ComponentTemplate& t, std::string id, std::vector<ParamOverride> ov = {}) {
    return instantiate_template(t, ov, std::move(id), "r1", Tier::province);
}

inline ModelGraph single_graph(double a = 1.0, double b = 1.0, double c = 0.0, double x0 = 50.0) {
    const auto t = scalar_template("T", a, b, c, x0);
    return compose("g", {instance(t, "n")}, {}, {});
}

inline Scenario single_scenario(double a = 1.0, double b = 1.0, double c = 0.0, double x0 = 50.0) {
    Scenario s;
    s.id = "s";
    s.templates = {scalar_template("T", a, b, c, x0)};
    s.hypotheses = {{"h", single_graph(a, b, c, x0), "test"}};
    return s;
}

inline Action action(std::string id, std::string instance, std::string port, int start, int duration,
                     double intensity, std::string loe = "L") {
    Action a;
    a.id = std::move(id);
    a.name = a.id;
    a.line_of_effort = std::move(loe);
    a.target = {std::move(instance), std::move(port)};
    a.start_tick = start;
    a.duration_ticks = duration;
    a.intensity = intensity;
    return a;
}

inline Plan plan(std::string id, std::vector<Action> actions, int horizon = 52) {
    Plan p;
    p.id = std::move(id);
    p.scenario_id = "s";
    p.horizon_ticks = horizon;
    p.lines_of_effort = {{"L", ""}, {"M", ""}};
    p.pools = {{"pool", "agency", 1000.0, PoolKind::financial}};
    p.actions = std::move(actions);
    return p;
}

/// Fresh empty directory under the system temp dir.
inline std::filesystem::path temp_dir(const std::string& tag) {
    static std::mt19937_64 rng(std::random_device{}());
    auto dir = std::filesystem::temp_directory_path() / ("wargamer-" + tag + "-" + std::to_string(rng()));
    std::filesystem::remove_all(dir);
    std::filesystem::create_directories(dir);
    return dir;
}

}  // namespace fixture
