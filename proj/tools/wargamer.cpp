// wargamer: headless front-end for simulation runs, COA comparison,
// analytics, validation and the planning server.

#include <csignal>
#include <cstdio>
#include <iostream>
#include <sstream>
#include <thread>

#include <CLI11.hpp>

#include "wargame/analytics.hpp"
#include "wargame/errors.hpp"
#include "wargame/io.hpp"
#include "wargame/runner.hpp"
#include "wargame/server.hpp"

namespace {

using namespace wargame;
using io::json;

constexpr int kExitOk = 0;
constexpr int kExitFindings = 1;
constexpr int kExitUsage = 2;

void print_findings(const ValidationReport& report, std::ostream& os) {
    for (const auto& f : report.findings)
        os << to_string(f.severity) << ' ' << f.code << ' ' << f.subject << ": " << f.message << '\n';
}

// Writes to the file when a path is given, stdout otherwise.
void emit(const std::string& path, const std::string& text) {
    if (path.empty() || path == "-") {
        std::cout << text;
    } else {
        io::write_text_file(path, text);
    }
}

struct RunArgs {
    std::string scenario, plan, hypothesis, out;
    std::uint64_t seed = 0;
    int horizon = 52;
    bool noise = false;
    std::optional<double> threshold;
    std::optional<int> persistence;
};

int cmd_run(const RunArgs& a) {
    const auto scenario = io::scenario_from_json(io::read_json_file(a.scenario));
    const auto plan = io::plan_from_json(io::read_json_file(a.plan));
    RunOptions opts;
    opts.hypothesis = a.hypothesis;
    opts.config = RunConfig{a.horizon, a.seed, a.noise};
    opts.threshold = a.threshold;
    opts.persistence = a.persistence;
    RunResult result;
    try {
        result = execute_run(scenario, plan, opts);
    } catch (const ValidationFailed& e) {
        print_findings(e.report(), std::cerr);
        return kExitFindings;
    }
    const auto doc = to_json(result);
    emit(a.out, io::dump(doc));
    const auto& s = doc.at("summary");
    std::ostream& os = (a.out.empty() || a.out == "-") ? std::cerr : std::cout;
    os << "effects: " << s.at("effectCount").get<int>() << " (favorable " << s.at("favorableCount").get<int>()
       << ", unfavorable " << s.at("unfavorableCount").get<int>() << ")\n";
    return kExitOk;
}

struct CompareArgs {
    std::string scenario, effects, out, summary;
    std::vector<std::string> plans;
    std::uint64_t seed = 0;
    int horizon = 52;
    bool noise = false;
    unsigned threads = 0;
};

int cmd_compare(const CompareArgs& a) {
    const auto scenario = io::scenario_from_json(io::read_json_file(a.scenario));
    const auto effects = io::effects_from_json(io::read_json_file(a.effects));
    std::vector<Plan> plans;
    for (const auto& p : a.plans) plans.push_back(io::plan_from_json(io::read_json_file(p)));
    if (auto report = validate_scenario(scenario); !report.ok()) {
        print_findings(report, std::cerr);
        return kExitFindings;
    }
    const auto result = compare_plans(scenario, plans, effects, RunConfig{a.horizon, a.seed, a.noise}, a.threads);
    emit(a.out, compare_csv(result));

    json summary = json::array();
    std::ostringstream text;
    for (const auto& [plan_id, rob] : result.robustness) {
        auto j = io::to_json(rob);
        j["planId"] = plan_id;
        summary.push_back(j);
        text << "robustness " << plan_id << ": min achieved ";
        if (rob.min_achieved) {
            text << *rob.min_achieved << " of " << effects.size() << " (worst " << rob.worst_hypothesis.value_or("") << ")";
        } else {
            text << "n/a (no hypothesis ran)";
        }
        text << '\n';
    }
    if (!a.summary.empty()) io::write_text_file(a.summary, io::dump({{"schemaVersion", io::kSchemaVersion}, {"plans", summary}}));
    ((a.out.empty() || a.out == "-") ? std::cerr : std::cout) << text.str();
    return kExitOk;
}

struct AnalyzeArgs {
    std::string kind, input, out, reference, compare, reverse, windows;
    std::optional<int> q;
    std::string r = "inf";
    std::optional<double> from, to;
};

std::vector<double> parse_number_list(const std::string& s) {
    std::vector<double> out;
    std::stringstream ss(s);
    std::string item;
    while (std::getline(ss, item, ',')) {
        try {
            std::size_t used = 0;
            out.push_back(std::stod(item, &used));
            if (used != item.size()) throw std::invalid_argument(item);
        } catch (const std::logic_error&) {
            throw ParseError("not a number: '" + item + "'");
        }
    }
    return out;
}

analytics::TrustMask parse_mask(const std::string& s) {
    analytics::TrustMask mask{};
    if (s.empty()) return mask;
    for (double v : parse_number_list(s)) {
        const auto idx = static_cast<long>(v);
        if (idx != v || idx < 1 || idx > static_cast<long>(analytics::kTrustItems))
            throw InvalidArgument("--reverse items must be in 1..13");
        mask[static_cast<std::size_t>(idx - 1)] = true;
    }
    return mask;
}

json analyze_pfnet(const AnalyzeArgs& a) {
    auto build = [&](const std::string& path) {
        const auto sim = io::similarity_from_csv(io::read_text_file(path));
        const int n = static_cast<int>(sim.concepts.size());
        return analytics::pfnet(analytics::to_distances(sim), a.q.value_or(n - 1), io::parse_r(a.r), sim.concepts);
    };
    const auto net = build(a.input);
    auto out = io::to_json(net);
    if (!a.reference.empty()) out["similarity"] = analytics::net_similarity(net, build(a.reference));
    return out;
}

json analyze_tlx(const AnalyzeArgs& a) {
    const auto rows = io::tlx_from_csv(io::read_text_file(a.input));
    json scores = json::array();
    double sum = 0;
    for (const auto& [id, resp] : rows) {
        const double s = analytics::tlx_score(resp);
        sum += s;
        scores.push_back({{"respondent", id}, {"score", s}});
    }
    return {{"responses", scores}, {"mean", rows.empty() ? 0.0 : sum / static_cast<double>(rows.size())}};
}

json analyze_trust(const AnalyzeArgs& a) {
    const auto mask = parse_mask(a.reverse);
    auto score_all = [&](const std::string& path) {
        std::map<std::string, double> m;
        for (const auto& [id, resp] : io::trust_from_csv(io::read_text_file(path))) {
            if (!m.emplace(id, analytics::trust_score(resp, mask)).second)
                throw ParseError(path + ": duplicate respondent '" + id + "'");
        }
        return m;
    };
    const auto first = score_all(a.input);
    json scores = json::array();
    for (const auto& [id, s] : first) scores.push_back({{"respondent", id}, {"score", s}});
    json out = {{"responses", scores}};
    if (!a.compare.empty()) {
        const auto second = score_all(a.compare);
        std::vector<double> xs, ys;
        for (const auto& [id, s] : first) {
            auto it = second.find(id);
            if (it == second.end()) continue;
            xs.push_back(s);
            ys.push_back(it->second);
        }
        out["paired"] = io::to_json(analytics::paired_t(xs, ys));
        out["pairedCount"] = xs.size();
    }
    return out;
}

json analyze_sna(const AnalyzeArgs& a) {
    const auto events = io::interactions_from_csv(io::read_text_file(a.input));
    analytics::TimeWindow w;
    if (a.from) w.begin = *a.from;
    if (a.to) w.end = *a.to;
    auto out = io::to_json(analytics::sna_metrics(events, w));
    out["supportReliance"] = analytics::support_reliance(events, w);
    if (!a.windows.empty()) {
        const auto bounds = parse_number_list(a.windows);
        std::vector<analytics::TimeWindow> windows;
        for (std::size_t i = 0; i + 1 < bounds.size(); ++i) windows.push_back({bounds[i], bounds[i + 1]});
        const auto rt = analytics::support_reliance_trend(events, windows);
        out["relianceTrend"] = {{"fractions", rt.fractions}, {"trend", io::to_json(rt.stat)}};
    }
    return out;
}

int cmd_analyze(const AnalyzeArgs& a) {
    json out;
    if (a.kind == "pfnet") out = analyze_pfnet(a);
    else if (a.kind == "tlx") out = analyze_tlx(a);
    else if (a.kind == "trust") out = analyze_trust(a);
    else if (a.kind == "sna") out = analyze_sna(a);
    else out = io::to_json(analytics::trend(io::points_from_csv(io::read_text_file(a.input))));
    out["schemaVersion"] = io::kSchemaVersion;
    out["analysis"] = a.kind;
    emit(a.out, io::dump(out));
    return kExitOk;
}

int cmd_validate(const std::string& scenario_path, const std::string& plan_path, const std::string& hypothesis) {
    const auto scenario = io::scenario_from_json(io::read_json_file(scenario_path));
    const auto plan = io::plan_from_json(io::read_json_file(plan_path));
    ValidationReport report;
    try {
        report = validate_pair(scenario, plan, hypothesis);
    } catch (const NotFoundError&) {
        report = validate_scenario(scenario);
        report.append(validate_plan(plan));
        report.error("unknown-hypothesis", hypothesis, "scenario has no hypothesis '" + hypothesis + "'");
    }
    print_findings(report, std::cout);
    std::cout << report.error_count() << " error(s), " << report.findings.size() - report.error_count()
              << " warning(s)\n";
    return report.ok() ? kExitOk : kExitFindings;
}

int cmd_serve(ServerConfig cfg) {
    // Signals are taken synchronously by a dedicated thread so the server can
    // be stopped outside of a signal handler.
    sigset_t set;
    sigemptyset(&set);
    sigaddset(&set, SIGINT);
    sigaddset(&set, SIGTERM);
    pthread_sigmask(SIG_BLOCK, &set, nullptr);

    HttpServer server(cfg);
    const int port = server.bind();
    std::cout << "listening on http://" << cfg.host << ':' << port << std::endl;
    std::thread waiter([&] {
        int sig = 0;
        sigwait(&set, &sig);
        server.stop();
    });
    server.listen();
    if (waiter.joinable()) {
        pthread_kill(waiter.native_handle(), SIGTERM);
        waiter.join();
    }
    return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Campaign wargaming toolkit: simulate plans against PMESII scenarios, compare courses of action, "
                 "analyse experiment data, and serve the planning API."};
    app.require_subcommand(1);
    app.set_version_flag("--version", "wargamer 0.1.0");

    RunArgs run;
    auto* run_cmd = app.add_subcommand("run", "Simulate a plan against its baseline and write the run result JSON");
    run_cmd->add_option("scenario", run.scenario, "Scenario JSON file")->required();
    run_cmd->add_option("plan", run.plan, "Plan JSON file")->required();
    run_cmd->add_option("--hypothesis", run.hypothesis, "Situation hypothesis name (default: first in scenario)");
    run_cmd->add_option("--seed", run.seed, "Noise seed")->capture_default_str();
    run_cmd->add_option("--horizon", run.horizon, "Number of simulated ticks")->capture_default_str()->check(CLI::PositiveNumber);
    run_cmd->add_flag("--noise,!--no-noise", run.noise, "Enable per-variable process noise (default off)");
    run_cmd->add_option("--threshold", run.threshold, "Effect threshold in level units (default: scenario value)");
    run_cmd->add_option("--persistence", run.persistence, "Minimum effect length in ticks (default: scenario value)");
    run_cmd->add_option("-o,--out", run.out, "Result file (default: stdout)");

    CompareArgs cmp;
    auto* cmp_cmd = app.add_subcommand("compare", "Rank plans against desired effects under every hypothesis (CSV)");
    cmp_cmd->add_option("scenario", cmp.scenario, "Scenario JSON file")->required();
    cmp_cmd->add_option("plans", cmp.plans, "One or more plan JSON files")->required();
    cmp_cmd->add_option("--effects", cmp.effects, "Desired effects JSON file")->required();
    cmp_cmd->add_option("--seed", cmp.seed, "Noise seed")->capture_default_str();
    cmp_cmd->add_option("--horizon", cmp.horizon, "Number of simulated ticks")->capture_default_str()->check(CLI::PositiveNumber);
    cmp_cmd->add_flag("--noise,!--no-noise", cmp.noise, "Enable per-variable process noise (default off)");
    cmp_cmd->add_option("--threads", cmp.threads, "Worker threads for the batch (0 = hardware concurrency)")->capture_default_str();
    cmp_cmd->add_option("-o,--out", cmp.out, "Ranking CSV file (default: stdout)");
    cmp_cmd->add_option("--summary", cmp.summary, "Also write the robustness summary as JSON to this file");

    AnalyzeArgs an;
    auto* an_cmd = app.add_subcommand("analyze", "Run an experiment-data pipeline and write its metrics as JSON");
    an_cmd->add_option("kind", an.kind, "pfnet | tlx | sna | trend | trust")
        ->required()
        ->check(CLI::IsMember({"pfnet", "tlx", "sna", "trend", "trust"}));
    an_cmd->add_option("input", an.input, "Input CSV file")->required();
    an_cmd->add_option("-o,--out", an.out, "Metrics file (default: stdout)");
    an_cmd->add_option("--q", an.q, "pfnet: maximum path length in links (default n-1)");
    an_cmd->add_option("--r", an.r, "pfnet: Minkowski exponent, >= 1 or 'inf'")->capture_default_str();
    an_cmd->add_option("--reference", an.reference, "pfnet: second similarity CSV; reports link-set similarity");
    an_cmd->add_option("--reverse", an.reverse, "trust: comma-separated 1-based items to reverse-code");
    an_cmd->add_option("--compare", an.compare, "trust: second response CSV; paired t-test over shared respondents");
    an_cmd->add_option("--from", an.from, "sna: window start (seconds, inclusive)");
    an_cmd->add_option("--to", an.to, "sna: window end (seconds, exclusive)");
    an_cmd->add_option("--reliance-windows", an.windows,
                       "sna: comma-separated window boundaries (>= 4 values) for the support-reliance trend");

    std::string v_scenario, v_plan, v_hypothesis;
    auto* val_cmd = app.add_subcommand("validate", "Check a scenario and plan; exit 1 when any error is found");
    val_cmd->add_option("scenario", v_scenario, "Scenario JSON file")->required();
    val_cmd->add_option("plan", v_plan, "Plan JSON file")->required();
    val_cmd->add_option("--hypothesis", v_hypothesis, "Hypothesis whose graph resolves action targets (default: first)");

    ServerConfig serve_cfg;
    std::string listen, data_dir;
    unsigned workers = 0;
    auto* serve_cmd = app.add_subcommand(
        "serve", "Start the planning server. Defaults come from WARGAMER_DATA_DIR, WARGAMER_LISTEN and WARGAMER_WORKERS");
    serve_cmd->add_option("--data-dir", data_dir, "Document store directory (default wargamer-data)");
    serve_cmd->add_option("--listen", listen, "host:port to bind; port 0 picks a free port (default 127.0.0.1:8080)");
    serve_cmd->add_option("--workers", workers, "Simulation worker threads (default 2)");
    serve_cmd->add_flag("--no-fsync", "Skip fsync on writes (faster, not crash-safe)");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForVersion& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return kExitUsage;
    }

    try {
        if (*run_cmd) return cmd_run(run);
        if (*cmp_cmd) return cmd_compare(cmp);
        if (*an_cmd) return cmd_analyze(an);
        if (*val_cmd) return cmd_validate(v_scenario, v_plan, v_hypothesis);
        if (*serve_cmd) {
            serve_cfg = ServerConfig::from_env();
            if (!data_dir.empty()) serve_cfg.data_dir = data_dir;
            if (!listen.empty()) std::tie(serve_cfg.host, serve_cfg.port) = parse_listen(listen);
            if (workers > 0) serve_cfg.workers = workers;
            if (serve_cmd->count("--no-fsync") > 0) serve_cfg.sync_writes = false;
            return cmd_serve(serve_cfg);
        }
    } catch (const ValidationFailed& e) {
        print_findings(e.report(), std::cerr);
        return kExitFindings;
    } catch (const std::exception& e) {
        std::cerr << "wargamer: " << e.what() << '\n';
        return kExitUsage;
    }
    return kExitUsage;
}
