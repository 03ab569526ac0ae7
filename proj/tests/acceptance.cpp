// Acceptance suite: one PASS/FAIL line per criterion, non-zero exit if any fails.

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <iostream>
#include <random>
#include <set>
#include <sstream>
#include <thread>

#include <csignal>
#include <sys/wait.h>
#include <unistd.h>

#include <httplib.h>

#include "oracles/effects_oracle.hpp"
#include "oracles/graph_oracles.hpp"
#include "oracles/ols_oracle.hpp"
#include "support.hpp"
#include "wargame/analytics.hpp"
#include "wargame/demo.hpp"
#include "wargame/io.hpp"
#include "wargame/runner.hpp"
#include "wargame/server.hpp"

using namespace wargame;
using nlohmann::json;
using Clock = std::chrono::steady_clock;

namespace {

struct Verdict {
    bool pass = false;
    std::string detail;
};

double seconds_since(Clock::time_point t0) { return std::chrono::duration<double>(Clock::now() - t0).count(); }

std::string fmt(double v, int prec = 3) {
    std::ostringstream os;
    os.precision(prec);
    os << std::fixed << v;
    return os.str();
}

// ---------------------------------------------------------------------------

Verdict baseline_invariance() {
    const auto t0 = Clock::now();
    const auto s = demo::scenario();
    const auto empty = demo::empty_plan();
    std::size_t records = 0, checks = 0;
    for (const auto& h : s.hypotheses)
        for (bool noise : {false, true}) {
            const RunConfig cfg{104, 42, noise};
            const auto base = baseline(h.graph, cfg);
            const auto run = simulate(h.graph, empty, cfg);
            for (double theta : {1.0, 5.0, 10.0})
                for (int m : {1, 4}) {
                    records += detect_effects(base, run, theta, m).size();
                    ++checks;
                }
        }
    const double secs = seconds_since(t0);
    return {records == 0 && secs < 1.0,
            std::to_string(records) + " records over " + std::to_string(checks) + " (hypothesis, noise, theta, m) checks in " +
                fmt(secs) + " s"};
}

std::string read_all(const std::filesystem::path& p) { return io::read_text_file(p); }

int run_cli(const std::string& args) {
    const std::string cmd = std::string(WARGAMER_BIN) + " " + args + " >/dev/null 2>&1";
    const int status = std::system(cmd.c_str());
    return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

Verdict determinism() {
    const auto dir = fixture::temp_dir("determinism");
    const std::filesystem::path demo_dir = WARGAMER_DEMO_DIR;
    const std::string common = (demo_dir / "scenario.json").string() + " " + (demo_dir / "integrated_plan.json").string() +
                               " --horizon 104 --seed 42 --noise -o ";
    const auto a = dir / "a.json", b = dir / "b.json";
    const int ca = run_cli("run " + common + a.string());
    const int cb = run_cli("run " + common + b.string());
    bool same = false;
    std::size_t bytes = 0;
    if (ca == 0 && cb == 0) {
        const auto ta = read_all(a), tb = read_all(b);
        same = ta == tb;
        bytes = ta.size();
    }
    std::filesystem::remove_all(dir);
    return {same, "two CLI runs (seed 42, noise on) -> " + std::string(same ? "identical" : "DIFFERENT") + " result files, " +
                      std::to_string(bytes) + " bytes"};
}

Verdict effect_oracle() {
    std::mt19937_64 rng(20240601);
    std::uniform_real_distribution<double> u(0, 1);
    std::size_t mismatches = 0, total_records = 0;
    for (int trial = 0; trial < 100; ++trial) {
        const int horizon = 1 + static_cast<int>(rng() % 200);
        const int vars = 1 + static_cast<int>(rng() % 20);
        const double theta = 0.5 + 9.5 * u(rng);
        const int m = 1 + static_cast<int>(rng() % 8);
        Trajectory base, run;
        base.horizon_ticks = run.horizon_ticks = horizon - 1;
        for (int v = 0; v < vars; ++v) {
            Series sb{{"i" + std::to_string(v / 3), "v" + std::to_string(v)},
                      rng() % 2 ? Polarity::favorable_high : Polarity::favorable_low, {}};
            Series sr = sb;
            double level = 100 * u(rng);
            double offset = 0;
            for (int t = 0; t < horizon; ++t) {
                level = clamp_level(level + 6 * (u(rng) - 0.5));
                // Piecewise offsets: long stretches near, above and below the threshold.
                if (rng() % 9 == 0) {
                    const int mode = static_cast<int>(rng() % 5);
                    offset = mode == 0 ? 0.0 : mode == 1 ? theta : mode == 2 ? -theta * (1 + u(rng)) : (u(rng) - 0.5) * 4 * theta;
                }
                sb.values.push_back(level);
                sr.values.push_back(clamp_level(level + offset));
            }
            base.series.push_back(std::move(sb));
            run.series.push_back(std::move(sr));
        }
        const auto got = detect_effects(base, run, theta, m);
        const auto want = oracle::scan_effects(base, run, theta, m);
        total_records += want.size();
        if (got != want) ++mismatches;
    }
    return {mismatches == 0, "100 random pairs (<=200 ticks x <=20 vars), " + std::to_string(total_records) +
                                 " oracle records, " + std::to_string(mismatches) + " mismatching pairs"};
}

Verdict full_scale() {
    const auto scenario = demo::scale_scenario(50, 7);
    const auto& graph = scenario.hypotheses[0].graph;
    std::vector<Plan> plans;
    for (int i = 0; i < 10; ++i) plans.push_back(demo::scale_plan(graph, 400, 260, 100 + i, "plan-" + std::to_string(i)));
    std::size_t vars = 0;
    for (const auto& inst : graph.instances) vars += inst.state_vars.size();

    // Single run: plan validation, baseline, plan simulation, effect detection.
    double worst_single = 0;
    for (int i = 0; i < 3; ++i) {
        const auto t0 = Clock::now();
        RunOptions opts;
        opts.config = RunConfig{260, static_cast<std::uint64_t>(i + 1), true};
        (void)execute_run(scenario, plans[static_cast<std::size_t>(i)], opts);
        worst_single = std::max(worst_single, seconds_since(t0));
    }

    const auto t1 = Clock::now();
    std::vector<RunConfig> cfgs{{260, 1, true}, {260, 2, true}, {260, 3, true}};
    auto with_empty = plans;
    with_empty.push_back(Plan{"~empty~", "", {}, {}, {}, 260, 1});
    const auto cells = batch_simulate(scenario.hypotheses, with_empty, cfgs);
    std::size_t ok = 0, effects = 0;
    for (const auto& [key, cell] : cells) {
        if (key.plan == "~empty~" || !cell.ok) continue;
        ++ok;
        const auto& base = *cells.at({key.hypothesis, "~empty~", key.config_index}).trajectory;
        effects += detect_effects(base, *cell.trajectory, 5.0, 4).size();
    }
    const double batch = seconds_since(t1);
    return {worst_single < 1.0 && batch < 30.0 && ok == 60,
            "50 instances / " + std::to_string(vars) + " vars, 400 actions, 260 ticks: single run " + fmt(worst_single) +
                " s (limit 1), 2x10x3 batch " + std::to_string(ok) + " cells in " + fmt(batch) + " s (limit 30), " +
                std::to_string(effects) + " effects"};
}

Verdict pfnet_correctness() {
    std::mt19937_64 rng(61);
    std::uniform_real_distribution<double> u(1, 9);
    const std::size_t n = 6;
    int mst_fail = 0, path_fail = 0, mono_fail = 0, comparisons = 0;
    auto links = [](const analytics::PFNet& net) {
        std::set<oracle::Edge> s;
        for (const auto& l : net.links) s.insert({l.a, l.b});
        return s;
    };
    auto subset = [](const std::set<oracle::Edge>& a, const std::set<oracle::Edge>& b) {
        return std::includes(b.begin(), b.end(), a.begin(), a.end());
    };
    const double inf = analytics::kInfinity;
    for (int c = 0; c < 50; ++c) {
        analytics::DistanceMatrix d(n, std::vector<double>(n, 0));
        for (std::size_t i = 0; i < n; ++i)
            for (std::size_t j = i + 1; j < n; ++j)
                d[i][j] = d[j][i] = c % 2 == 0 ? static_cast<double>(1 + rng() % 9) : u(rng);  // even cases carry ties

        if (links(analytics::pfnet(d, 5, inf)) != oracle::mst_union(d)) ++mst_fail;
        for (int q : {1, 2, 5})
            for (double r : {1.0, 2.0, inf}) {
                ++comparisons;
                if (links(analytics::pfnet(d, q, r)) != oracle::pathfinder_links(d, q, r)) ++path_fail;
            }
        const std::vector<double> rs{1.0, 2.0, inf};
        for (double r : rs)
            for (int q = 1; q < 5; ++q)
                if (!subset(links(analytics::pfnet(d, q + 1, r)), links(analytics::pfnet(d, q, r)))) ++mono_fail;
        for (int q = 1; q <= 5; ++q)
            for (std::size_t k = 0; k + 1 < rs.size(); ++k)
                if (!subset(links(analytics::pfnet(d, q, rs[k + 1])), links(analytics::pfnet(d, q, rs[k])))) ++mono_fail;
    }
    return {mst_fail == 0 && path_fail == 0 && mono_fail == 0,
            "50 six-node cases: MST-union mismatches " + std::to_string(mst_fail) + ", all-paths mismatches " +
                std::to_string(path_fail) + "/" + std::to_string(comparisons) + ", monotonicity violations " +
                std::to_string(mono_fail)};
}

Verdict tlx() {
    std::mt19937_64 rng(15);
    int out_of_bounds = 0;
    for (int i = 0; i < 1000; ++i) {
        analytics::TlxResponse r;
        for (auto& x : r.ratings) x = 5.0 * static_cast<double>(rng() % 21);
        r.wins.fill(0);
        for (int a = 0; a < 6; ++a)
            for (int b = a + 1; b < 6; ++b) ++r.wins[static_cast<std::size_t>(rng() % 2 ? a : b)];
        const double s = analytics::tlx_score(r);
        const auto [lo, hi] = std::minmax_element(r.ratings.begin(), r.ratings.end());
        if (s < *lo || s > *hi) ++out_of_bounds;
    }
    const double worked = analytics::tlx_score({{100, 80, 60, 40, 20, 0}, {5, 4, 3, 2, 1, 0}});
    const bool ok = out_of_bounds == 0 && std::fabs(worked - 73.333333333333333) <= 1e-9;
    return {ok, "1000 random responses, " + std::to_string(out_of_bounds) + " outside [min, max]; worked example " +
                    fmt(worked, 12)};
}

Verdict sna() {
    std::mt19937_64 rng(77);
    int mismatches = 0;
    double worst = 0;
    for (int c = 0; c < 50; ++c) {
        const std::size_t n = 2 + rng() % 6;  // 2..7 nodes
        std::set<oracle::Edge> edges;
        std::vector<analytics::InteractionEvent> events;
        auto name = [](std::size_t i) { return "p" + std::to_string(i); };
        for (std::size_t i = 0; i < n; ++i)
            for (std::size_t j = i + 1; j < n; ++j) {
                if (rng() % 100 >= 45) continue;
                edges.insert({i, j});
                // Repeated and reversed contacts on the same dyad collapse into one edge.
                const int contacts = 1 + static_cast<int>(rng() % 3);
                for (int k = 0; k < contacts; ++k) {
                    analytics::InteractionEvent e;
                    e.start_time = static_cast<double>(rng() % 1000);
                    e.source = k % 2 ? name(j) : name(i);
                    e.destination = k % 2 ? name(i) : name(j);
                    e.duration_seconds = static_cast<double>(1 + rng() % 300);
                    events.push_back(e);
                }
            }
        // Tool interactions never enter the coordination network.
        analytics::InteractionEvent tool;
        tool.source = name(0);
        tool.destination = "console";
        tool.kind = analytics::InteractionKind::person_tool;
        tool.duration_seconds = 50;
        events.push_back(tool);

        const auto m = analytics::sna_metrics(events, {});
        std::set<std::size_t> present;
        for (auto [a, b] : edges) present.insert({a, b});
        const auto bc = oracle::betweenness(n, edges);
        bool ok = m.actors.size() == present.size() && m.edge_count == edges.size();
        for (auto v : present) {
            const double diff = std::fabs(m.betweenness.at(name(v)) - bc[v]);
            worst = std::max(worst, diff);
            ok = ok && diff <= 1e-12;
        }
        const double k = static_cast<double>(present.size());
        const double density = present.size() < 2 ? 0.0 : static_cast<double>(edges.size()) / (k * (k - 1) / 2);
        ok = ok && std::fabs(m.density - density) <= 1e-12;
        if (!ok) ++mismatches;
    }
    return {mismatches == 0, "50 random graphs (<=7 nodes): " + std::to_string(mismatches) +
                                 " mismatching graphs, max betweenness deviation " + fmt(worst, 15)};
}

Verdict trend() {
    std::mt19937_64 rng(5);
    std::uniform_real_distribution<double> u(-10, 10);
    double worst_r2 = 0;
    for (int i = 0; i < 100; ++i) {
        const double a = u(rng), b = u(rng);
        if (std::fabs(b) < 1e-3) continue;
        std::vector<std::pair<double, double>> pts;
        const int n = 3 + static_cast<int>(rng() % 20);
        for (int k = 0; k < n; ++k) {
            const double x = u(rng);
            pts.emplace_back(x, a + b * x);
        }
        worst_r2 = std::max(worst_r2, std::fabs(analytics::trend(pts).r_squared - 1));
    }

    const std::vector<std::pair<double, double>> hand{{1, 1}, {2, 2}, {3, 2}, {4, 3}};
    const auto got = analytics::trend(hand);
    const auto want = oracle::ols(hand);
    const double hand_err = std::max({std::fabs(got.slope - want.slope), std::fabs(got.r_squared - want.r_squared),
                                      std::fabs(got.p_value - want.p_df2)});

    int malformed = 0;
    for (int i = 0; i < 200; ++i) {
        std::vector<std::pair<double, double>> pts;
        for (int k = 0; k < 4; ++k) pts.emplace_back(k + 1, i % 10 == 0 ? 0.5 : std::round(u(rng)) / 10);
        const auto r = analytics::trend(pts);
        const bool good = r.n == 4 && r.df == 2 && std::isfinite(r.slope) && std::isfinite(r.intercept) &&
                          r.r_squared >= 0 && r.r_squared <= 1 + 1e-12 && r.p_value >= 0 && r.p_value <= 1;
        if (!good) ++malformed;
    }
    return {worst_r2 <= 1e-9 && hand_err <= 1e-6 && malformed == 0,
            "collinear max |R^2-1| " + fmt(worst_r2, 12) + "; hand case slope " + fmt(got.slope, 6) + " R^2 " +
                fmt(got.r_squared, 6) + " p " + fmt(got.p_value, 6) + " (max deviation " + fmt(hand_err, 12) + "); " +
                std::to_string(malformed) + "/200 malformed 4-point results"};
}

// ---------------------------------------------------------------------------

Verdict plan_validation() {
    const auto scenario = demo::scenario();
    const auto& graph = scenario.hypotheses[0].graph;
    const auto base = demo::integrated_plan();
    using Codes = std::set<std::string>;
    auto with = [&](const std::function<void(Plan&)>& edit) {
        auto p = base;
        edit(p);
        return p;
    };
    auto act = [&](Plan& p, const std::string& id) -> Action& {
        for (auto& a : p.actions)
            if (a.id == id) return a;
        throw std::logic_error("fixture action " + id);
    };

    const std::vector<std::pair<Plan, Codes>> invalid{
        {with([&](Plan& p) { act(p, "R1").dependencies = {"R3"}; }), {"dependency-cycle"}},
        {with([&](Plan& p) {
             act(p, "G1").dependencies = {"G2"};
             act(p, "G2").dependencies = {"G3"};
             act(p, "G3").dependencies = {"G1"};
         }),
         {"dependency-cycle"}},
        {with([&](Plan& p) { act(p, "S1").dependencies = {"S1"}; }), {"dependency-cycle"}},
        {with([&](Plan& p) { p.pools[0].budget = 100; }), {"resource-overdraft"}},
        {with([&](Plan& p) { act(p, "R3").resource->rate_per_tick = 60; }), {"resource-overdraft"}},
        {with([&](Plan& p) { act(p, "G1").target.instance = "east_gov"; }), {"unresolvable-target"}},
        {with([&](Plan& p) { act(p, "S2").target.port = "airstrikes"; }), {"unresolvable-target"}},
        {with([&](Plan& p) { act(p, "G2").target = {"north_gov", "legitimacy_level"}; }), {"unresolvable-target"}},
        {with([&](Plan& p) {
             act(p, "G3").duration_ticks = 200;
             act(p, "G3").resource.reset();  // keep spend unchanged
         }),
         {"horizon-exceeded"}},
        {with([&](Plan& p) {
             auto& a = act(p, "R3");
             a.start_tick = p.horizon_ticks - a.duration_ticks + 1;
         }),
         {"horizon-exceeded"}},
        {with([&](Plan& p) { p.horizon_ticks = 60; }), {"horizon-exceeded"}},
        {with([&](Plan& p) { act(p, "R3").start_tick = 10; }), {"dependency-order"}},
        {with([&](Plan& p) { act(p, "R2").dependencies = {"X9"}; }), {"unknown-dependency"}},
        {with([&](Plan& p) { act(p, "S1").line_of_effort = "Information"; }), {"unknown-loe"}},
        {with([&](Plan& p) { act(p, "R1").resource->pool = "treasury"; }), {"unknown-pool"}},
        {with([&](Plan& p) {
             p.actions.push_back(act(p, "G4"));
             p.actions.back().resource.reset();
         }),
         {"duplicate-action"}},
        {with([&](Plan& p) { act(p, "G4").duration_ticks = 0; }), {"invalid-duration"}},
        {with([&](Plan& p) {
             act(p, "R1").dependencies = {"R3"};
             p.pools[2].budget = 10;
         }),
         {"dependency-cycle", "resource-overdraft"}},
        {with([&](Plan& p) {
             auto& g = act(p, "G4");
             g.target.instance = "west_soc";
             g.duration_ticks = 500;
             g.resource.reset();
         }),
         {"unresolvable-target", "horizon-exceeded"}},
        {with([&](Plan& p) { act(p, "R2").resource->rate_per_tick = -1; }), {"negative-rate"}},
    };

    std::vector<Plan> valid{base, demo::security_plan(), demo::reconstruction_plan(), demo::empty_plan()};
    valid.push_back(with([&](Plan& p) {
        // Spend exactly at budget.
        const auto spend = planned_spend(p);
        for (auto& pool : p.pools) pool.budget = spend.count(pool.id) ? spend.at(pool.id) : 0.0;
    }));
    valid.push_back(with([&](Plan& p) {
        auto& a = act(p, "S4");
        a.start_tick = p.horizon_ticks - a.duration_ticks;  // ends exactly at the horizon
    }));
    valid.push_back(with([&](Plan& p) {
        auto& r3 = act(p, "R3");
        r3.start_tick = act(p, "R1").end_tick();  // starts the tick its dependency ends
    }));
    std::mt19937_64 rng(99);
    while (valid.size() < 20) {
        Plan p = demo::scale_plan(graph, 5 + rng() % 40, 52 + static_cast<int>(rng() % 100), rng(), "gen");
        // Chain a few dependencies that respect ordering.
        for (std::size_t i = 1; i < p.actions.size(); ++i)
            if (p.actions[i].start_tick >= p.actions[i - 1].end_tick() && rng() % 2)
                p.actions[i].dependencies.insert(p.actions[i - 1].id);
        valid.push_back(std::move(p));
    }

    int wrong = 0, false_pos = 0;
    std::ostringstream bad;
    for (std::size_t i = 0; i < invalid.size(); ++i) {
        Codes got;
        for (const auto& f : validate_plan(invalid[i].first, graph).findings)
            if (f.severity == Severity::error) got.insert(f.code);
        if (got != invalid[i].second) {
            ++wrong;
            bad << " case" << i + 1 << "{";
            for (const auto& c : got) bad << c << ' ';
            bad << "}";
        }
    }
    for (const auto& p : valid)
        if (validate_plan(p, graph).error_count() > 0) ++false_pos;
    return {wrong == 0 && false_pos == 0 && invalid.size() == 20 && valid.size() == 20,
            std::to_string(invalid.size()) + " invalid plans, " + std::to_string(wrong) + " with wrong finding kinds" +
                bad.str() + "; " + std::to_string(valid.size()) + " valid plans, " + std::to_string(false_pos) +
                " false positives"};
}

// ---------------------------------------------------------------------------

Verdict server_concurrency() {
    const auto dir = fixture::temp_dir("concurrency");
    ServerConfig cfg;
    cfg.data_dir = dir;
    cfg.port = 0;
    cfg.sync_writes = true;
    HttpServer server(cfg);
    const int port = server.start_background();

    httplib::Client admin("127.0.0.1", port);
    auto created = admin.Post("/documents", json{{"kind", "plan"}, {"payload", io::to_json(demo::integrated_plan())}}.dump(),
                              "application/json");
    if (!created || created->status != 201) return {false, "could not create the shared plan"};
    const auto doc_id = json::parse(created->body).at("docId").get<std::string>();
    const long initial = json::parse(created->body).at("version").get<long>();

    constexpr int kClients = 25, kUpdates = 200;
    std::atomic<int> next{0}, accepted{0}, conflicts{0}, errors{0};
    std::mutex acks_mutex;
    std::map<std::string, long> acked_version;  // action id -> version that added it

    std::vector<std::thread> clients;
    for (int c = 0; c < kClients; ++c)
        clients.emplace_back([&, c] {
            httplib::Client cli("127.0.0.1", port);
            cli.set_read_timeout(30, 0);
            for (int k; (k = next.fetch_add(1)) < kUpdates;) {
                const std::string id = "C" + std::to_string(c) + "-" + std::to_string(k);
                Action a;
                a.id = id;
                a.name = "client " + std::to_string(c) + " edit " + std::to_string(k);
                a.line_of_effort = "Governance";
                a.target = {"north_soc", "messaging"};
                a.start_tick = k % 50;
                a.duration_ticks = 2;
                a.intensity = 0.1;
                const json mutation = {{"op", "addAction"}, {"action", io::to_json(a)}};
                auto got = cli.Get("/documents/" + doc_id);
                if (!got) {
                    ++errors;
                    return;
                }
                long expected = json::parse(got->body).at("version").get<long>();
                for (int attempt = 0; attempt < 10000; ++attempt) {
                    auto res = cli.Put("/plans/" + doc_id, json{{"expectedVersion", expected}, {"mutation", mutation}}.dump(),
                                       "application/json");
                    if (!res) {
                        ++errors;
                        return;
                    }
                    if (res->status == 200) {
                        ++accepted;
                        std::lock_guard lock(acks_mutex);
                        acked_version[id] = json::parse(res->body).at("version").get<long>();
                        break;
                    }
                    if (res->status != 409) {
                        ++errors;
                        return;
                    }
                    ++conflicts;
                    expected = json::parse(res->body).at("currentVersion").get<long>();  // rebase and retry
                }
            }
        });
    for (auto& t : clients) t.join();

    auto final_doc = json::parse(admin.Get("/documents/" + doc_id)->body);
    auto history = json::parse(admin.Get("/documents/" + doc_id + "/history")->body).at("versions");
    server.stop();

    const long final_version = final_doc.at("version").get<long>();
    std::set<std::string> final_ids;
    for (const auto& a : final_doc.at("payload").at("actions")) final_ids.insert(a.at("id").get<std::string>());
    std::map<long, std::set<std::string>> ids_at;
    for (const auto& v : history) {
        auto& s = ids_at[v.at("version").get<long>()];
        for (const auto& a : v.at("payload").at("actions")) s.insert(a.at("id").get<std::string>());
    }
    int lost = 0;
    for (const auto& [id, version] : acked_version) {
        const bool introduced = ids_at.count(version) && ids_at[version].count(id) &&
                                (!ids_at.count(version - 1) || !ids_at[version - 1].count(id));
        if (!introduced || !final_ids.count(id)) ++lost;
    }
    std::filesystem::remove_all(dir);
    const bool ok = accepted == kUpdates && final_version == initial + kUpdates && lost == 0 && errors == 0 &&
                    acked_version.size() == static_cast<std::size_t>(kUpdates) &&
                    history.size() == static_cast<std::size_t>(kUpdates + 1);
    return {ok, std::to_string(kClients) + " clients: " + std::to_string(accepted.load()) + " accepted, " +
                    std::to_string(conflicts.load()) + " conflicts retried, final version " + std::to_string(final_version) +
                    " (initial " + std::to_string(initial) + "), " + std::to_string(history.size()) + " history entries, " +
                    std::to_string(lost) + " lost mutations, " + std::to_string(errors.load()) + " transport errors"};
}

// Child server process with its stdout on a pipe; the first line announces the port.
struct ServerProcess {
    pid_t pid = -1;
    int port = -1;

    explicit ServerProcess(const std::filesystem::path& data_dir) {
        int fds[2];
        if (pipe(fds) != 0) return;
        pid = fork();
        if (pid == 0) {
            dup2(fds[1], STDOUT_FILENO);
            close(fds[0]);
            close(fds[1]);
            const std::string dir = data_dir.string();
            execl(WARGAMER_BIN, WARGAMER_BIN, "serve", "--data-dir", dir.c_str(), "--listen", "127.0.0.1:0", "--workers", "1",
                  static_cast<char*>(nullptr));
            _exit(127);
        }
        close(fds[1]);
        std::string line;
        char ch;
        while (read(fds[0], &ch, 1) == 1 && ch != '\n') line.push_back(ch);
        close(fds[0]);
        const auto colon = line.rfind(':');
        if (colon != std::string::npos) port = std::atoi(line.c_str() + colon + 1);
    }

    void kill9() {
        if (pid > 0) {
            kill(pid, SIGKILL);
            waitpid(pid, nullptr, 0);
            pid = -1;
        }
    }
    void terminate() {
        if (pid > 0) {
            kill(pid, SIGTERM);
            waitpid(pid, nullptr, 0);
            pid = -1;
        }
    }
    ~ServerProcess() { kill9(); }
};

Verdict durability() {
    const auto dir = fixture::temp_dir("durability");
    constexpr int kAckTarget = 120;

    struct Ack {
        std::string doc_id;
        long version;
        std::string hash;
    };
    std::mutex mu;
    std::vector<Ack> acks;
    std::atomic<bool> stop{false};
    std::atomic<int> ack_count{0};

    ServerProcess first(dir);
    if (first.port <= 0) return {false, "server did not announce a port"};

    httplib::Client admin("127.0.0.1", first.port);
    auto created = admin.Post("/documents", json{{"kind", "plan"}, {"payload", io::to_json(demo::security_plan())}}.dump(),
                              "application/json");
    if (!created || created->status != 201) return {false, "could not create the plan"};
    const auto shared = json::parse(created->body).at("docId").get<std::string>();

    std::vector<std::thread> writers;
    for (int w = 0; w < 4; ++w)
        writers.emplace_back([&, w] {
            httplib::Client cli("127.0.0.1", first.port);
            for (int k = 0; !stop; ++k) {
                httplib::Result res;
                if (w % 2 == 0) {
                    // New documents.
                    json payload = {{"writer", w}, {"seq", k}, {"samples", json::array({k, k * 2, k * 3})}};
                    res = cli.Post("/documents", json{{"kind", "analyticsInput"}, {"payload", payload}}.dump(), "application/json");
                } else {
                    // Versioned edits of one shared plan.
                    auto cur = cli.Get("/documents/" + shared);
                    if (!cur) return;
                    const auto v = json::parse(cur->body).at("version").get<long>();
                    const json mutation = {{"op", "setHorizon"}, {"horizonTicks", 104 + (k % 50)}};
                    res = cli.Put("/plans/" + shared, json{{"expectedVersion", v}, {"mutation", mutation}}.dump(), "application/json");
                }
                if (!res) return;  // server gone
                if (res->status != 200 && res->status != 201) continue;
                const auto body = json::parse(res->body);
                std::lock_guard lock(mu);
                acks.push_back({body.at("docId"), body.at("version"), body.at("contentHash")});
                ++ack_count;
            }
        });
    while (ack_count < kAckTarget) std::this_thread::sleep_for(std::chrono::milliseconds(1));
    first.kill9();  // mid-workload: writers are still issuing requests
    stop = true;
    for (auto& t : writers) t.join();

    std::vector<Ack> snapshot;
    {
        std::lock_guard lock(mu);
        snapshot = acks;
    }

    ServerProcess second(dir);
    if (second.port <= 0) return {false, "restarted server did not announce a port"};
    httplib::Client check("127.0.0.1", second.port);
    int missing = 0;
    std::map<std::string, json> histories;
    for (const auto& a : snapshot) {
        if (!histories.count(a.doc_id)) {
            auto res = check.Get("/documents/" + a.doc_id + "/history");
            histories[a.doc_id] = res && res->status == 200 ? json::parse(res->body).at("versions") : json::array();
        }
        bool found = false;
        for (const auto& v : histories[a.doc_id])
            if (v.at("version") == a.version && v.at("contentHash") == a.hash) found = true;
        if (!found) ++missing;
    }
    // The restarted server keeps accepting versioned writes.
    auto cur = json::parse(check.Get("/documents/" + shared)->body);
    auto res = check.Put("/plans/" + shared,
                         json{{"expectedVersion", cur.at("version")}, {"mutation", {{"op", "setHorizon"}, {"horizonTicks", 110}}}}.dump(),
                         "application/json");
    const bool writable = res && res->status == 200;
    second.terminate();
    std::filesystem::remove_all(dir);
    return {missing == 0 && writable && snapshot.size() >= kAckTarget,
            "SIGKILL after " + std::to_string(snapshot.size()) + " acknowledged writes; after restart " +
                std::to_string(snapshot.size() - static_cast<std::size_t>(missing)) + " present, " + std::to_string(missing) +
                " missing; post-restart update " + (writable ? "accepted" : "FAILED")};
}

}  // namespace

int main() {
    const std::vector<std::pair<std::string, std::function<Verdict()>>> criteria{
        {"baseline-invariance", baseline_invariance}, {"determinism", determinism},
        {"effect-oracle", effect_oracle},             {"full-scale-capability", full_scale},
        {"pfnet-correctness", pfnet_correctness},     {"tlx-bounds-and-arithmetic", tlx},
        {"sna-oracle", sna},                          {"trend-correctness", trend},
        {"plan-validation", plan_validation},         {"server-concurrency", server_concurrency},
        {"durability", durability},
    };
    int failed = 0;
    for (const auto& [name, check] : criteria) {
        Verdict v;
        try {
            v = check();
        } catch (const std::exception& e) {
            v = {false, std::string("exception: ") + e.what()};
        }
        if (!v.pass) ++failed;
        std::cout << (v.pass ? "PASS " : "FAIL ") << name << ": " << v.detail << std::endl;
    }
    std::cout << (criteria.size() - static_cast<std::size_t>(failed)) << "/" << criteria.size() << " acceptance criteria passed"
              << std::endl;
    return failed == 0 ? 0 : 1;
}
