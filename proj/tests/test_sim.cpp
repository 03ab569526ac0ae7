#include <doctest.h>

#include <random>

#include "oracles/effects_oracle.hpp"
#include "support.hpp"
#include "wargame/demo.hpp"
#include "wargame/errors.hpp"

using namespace wargame;
using fixture::action;

namespace {

std::vector<double> values(const Trajectory& t) { return t.series.at(0).values; }

Trajectory flat(int horizon, double v) {
    Trajectory t;
    t.horizon_ticks = horizon;
    t.series.push_back({{"n", "x"}, Polarity::favorable_high, std::vector<double>(horizon + 1, v)});
    return t;
}

}  // namespace

TEST_CASE("simulate hand-stepped cases") {
    const RunConfig cfg{10, 0, false};
    CHECK(values(simulate(fixture::single_graph(1, 0, 0, 50), Plan{}, cfg)) == std::vector<double>(11, 50.0));

    const auto sat = values(simulate(fixture::single_graph(1, 0, 1, 95), Plan{}, cfg));
    CHECK(sat == std::vector<double>{95, 96, 97, 98, 99, 100, 100, 100, 100, 100, 100});

    const auto g = fixture::single_graph(1, 1, 0, 0);
    const auto pushed = values(simulate(g, fixture::plan("p", {action("A", "n", "u", 0, 3, 2)}), cfg));
    CHECK(pushed == std::vector<double>{0, 2, 4, 6, 6, 6, 6, 6, 6, 6, 6});
}

TEST_CASE("baseline") {
    const auto decay = values(baseline(fixture::single_graph(0.5, 0, 0, 80), RunConfig{4, 0, false}));
    CHECK(decay == std::vector<double>{80, 40, 20, 10, 5});

    const auto drift = values(baseline(fixture::single_graph(1, 0, 0.5, 0), RunConfig{6, 0, false}));
    for (std::size_t t = 0; t < drift.size(); ++t) CHECK(drift[t] == doctest::Approx(0.5 * t));

    const auto s = demo::scenario();
    for (const auto& h : s.hypotheses) {
        RunConfig c{60, 9, true};
        CHECK(baseline(h.graph, c) == simulate(h.graph, demo::empty_plan(), c));
    }
}

TEST_CASE("couplings superpose and aggregations are recorded") {
    const auto t = fixture::scalar_template("T", 1, 1, 0, 10);
    const auto g = compose("g", {fixture::instance(t, "a"), fixture::instance(t, "b"), fixture::instance(t, "c")},
                           {{{"a", "y"}, {"c", "u"}, 0.5}, {{"b", "y"}, {"c", "u"}, 0.25}},
                           {{"avg", {{"a", "x"}, {"b", "x"}}, {0.5, 0.5}}});
    const auto traj = simulate(g, Plan{}, RunConfig{2, 0, false});
    // c[1] = 10 + 0.5*10 + 0.25*10
    CHECK(traj.find({"c", "x"})->values[1] == doctest::Approx(17.5));
    CHECK(traj.find_national("avg")->values[0] == doctest::Approx(10));
}

TEST_CASE("determinism and clamp safety with noise") {
    const auto s = demo::scenario();
    const auto p = demo::integrated_plan();
    RunConfig cfg{104, 42, true};
    const auto a = simulate(s.hypotheses[0].graph, p, cfg);
    const auto b = simulate(s.hypotheses[0].graph, p, cfg);
    CHECK(a == b);
    cfg.seed = 43;
    CHECK_FALSE(simulate(s.hypotheses[0].graph, p, cfg) == a);

    std::mt19937_64 rng(21);
    std::uniform_real_distribution<double> u(-3, 3);
    for (int i = 0; i < 40; ++i) {
        auto t = fixture::scalar_template("T", u(rng), u(rng), 20 * u(rng), 50);
        t.dynamics.noise_std = {std::fabs(10 * u(rng))};
        const auto g = compose("g", {fixture::instance(t, "n")}, {}, {});
        const auto tr = simulate(g, fixture::plan("p", {action("A", "n", "u", 0, 20, 30 * u(rng))}), RunConfig{52, rng(), true});
        for (double v : tr.series[0].values) {
            CHECK(v >= 0.0);
            CHECK(v <= 100.0);
        }
    }
}

TEST_CASE("noise-off superposition of action deltas") {
    // Both blocks rest at 50, well inside the clamp bounds.
    const auto ta = fixture::scalar_template("Ta", 0.8, 1.0, 10.0, 50);
    const auto tb = fixture::scalar_template("Tb", 0.8, 1.0, -5.0, 50);
    const auto g = compose("g", {fixture::instance(ta, "a"), fixture::instance(tb, "b")}, {{{"a", "y"}, {"b", "u"}, 0.3}}, {});
    const RunConfig cfg{30, 0, false};
    const auto base = simulate(g, Plan{}, cfg);
    const auto pa = fixture::plan("pa", {action("A", "a", "u", 2, 5, 1.5)});
    const auto pb = fixture::plan("pb", {action("B", "b", "u", 4, 8, -2.0)});
    const auto pab = fixture::plan("pab", {action("A", "a", "u", 2, 5, 1.5), action("B", "b", "u", 4, 8, -2.0)});
    const auto ra = simulate(g, pa, cfg), rb = simulate(g, pb, cfg), rab = simulate(g, pab, cfg);
    for (std::size_t s = 0; s < base.series.size(); ++s)
        for (std::size_t k = 0; k < base.series[s].values.size(); ++k) {
            const double b0 = base.series[s].values[k];
            CHECK(rab.series[s].values[k] - b0 ==
                  doctest::Approx((ra.series[s].values[k] - b0) + (rb.series[s].values[k] - b0)).epsilon(1e-9));
        }
}

TEST_CASE("detect_effects examples") {
    const auto base = flat(52, 50);
    CHECK(detect_effects(base, base, 5, 4).empty());

    auto run = base;
    for (int t = 10; t <= 30; ++t) run.series[0].values[t] = 58;
    const auto effects = detect_effects(base, run, 5, 4);
    REQUIRE(effects.size() == 1);
    CHECK(effects[0].window_start == 10);
    CHECK(effects[0].window_end == 30);
    CHECK(effects[0].mean_delta == doctest::Approx(8));
    CHECK(effects[0].favorable);

    auto short_run = base;
    for (int t = 10; t < 13; ++t) short_run.series[0].values[t] = 56;
    CHECK(detect_effects(base, short_run, 5, 4).empty());
    CHECK(detect_effects(base, short_run, 5, 3).size() == 1);

    auto low = base;
    low.series[0].polarity = Polarity::favorable_low;
    CHECK_FALSE(detect_effects(low, run, 5, 4)[0].favorable);

    CHECK_THROWS_AS(detect_effects(base, run, 0, 4), InvalidArgument);
    CHECK_THROWS_AS(detect_effects(base, run, 5, 0), InvalidArgument);
    CHECK_THROWS_AS(detect_effects(base, flat(10, 50), 5, 4), InvalidArgument);
}

TEST_CASE("detect_effects agrees with the per-tick scan") {
    std::mt19937_64 rng(77);
    std::uniform_real_distribution<double> u(0, 100);
    for (int trial = 0; trial < 30; ++trial) {
        const int horizon = 10 + static_cast<int>(rng() % 100);
        Trajectory b, r;
        b.horizon_ticks = r.horizon_ticks = horizon;
        for (int v = 0; v < 5; ++v) {
            Series sb{{"i", "v" + std::to_string(v)}, v % 2 ? Polarity::favorable_low : Polarity::favorable_high, {}};
            Series sr = sb;
            for (int t = 0; t <= horizon; ++t) {
                sb.values.push_back(u(rng));
                sr.values.push_back(rng() % 3 ? sb.values.back() + (u(rng) - 50) / 5 : sb.values.back());
            }
            b.series.push_back(sb);
            r.series.push_back(sr);
        }
        CHECK(detect_effects(b, r, 3, 2) == oracle::scan_effects(b, r, 3, 2));
    }
}

TEST_CASE("batch_simulate") {
    const auto s = demo::scenario();
    const auto p = demo::integrated_plan();
    const RunConfig cfg{104, 1, true};
    const auto res = batch_simulate(s.hypotheses, {p}, {cfg}, 2);
    REQUIRE(res.size() == 2);
    for (const auto& h : s.hypotheses) {
        const auto& cell = res.at({h.name, p.id, 0});
        REQUIRE(cell.ok);
        CHECK(*cell.trajectory == simulate(h.graph, p, cfg));
    }

    const auto single = batch_simulate({s.hypotheses[0]}, {p}, {cfg}, 1);
    CHECK(single.size() == 1);

    auto broken = p;
    broken.id = "broken";
    broken.actions[0].dependencies = {broken.actions[0].id};
    const auto mixed = batch_simulate({s.hypotheses[0]}, {p, broken}, {cfg}, 0);
    CHECK(mixed.at({s.hypotheses[0].name, "integrated", 0}).ok);
    const auto& bad = mixed.at({s.hypotheses[0].name, "broken", 0});
    CHECK_FALSE(bad.ok);
    CHECK(bad.findings.has("dependency-cycle"));
}
