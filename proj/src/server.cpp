#include "wargame/server.hpp"

#include <cmath>
#include <cstdlib>
#include <cstdio>

#include <httplib.h>

#include "wargame/analytics.hpp"
#include "wargame/errors.hpp"
#include "wargame/io.hpp"
#include "wargame/runner.hpp"

namespace wargame {
using nlohmann::json;

namespace {

ValidationReport single_finding(const std::string& code, const std::string& subject, const std::string& message) {
    ValidationReport r;
    r.error(code, subject, message);
    return r;
}

Plan apply_op(Plan plan, const json& op) {
    if (!op.is_object() || !op.contains("op") || !op.at("op").is_string()) throw ParseError("mutation needs an 'op' string");
    const auto name = op.at("op").get<std::string>();
    if (name == "replace") {
        auto next = io::plan_from_json(op.at("plan"));
        next.id = plan.id;
        return next;
    }
    if (name == "addAction") {
        plan.actions.push_back(io::action_from_json(op.at("action")));
        return plan;
    }
    if (name == "removeAction") {
        const auto id = op.at("id").get<std::string>();
        const auto before = plan.actions.size();
        std::erase_if(plan.actions, [&](const Action& a) { return a.id == id; });
        if (plan.actions.size() == before) throw NotFoundError("unknown action '" + id + "'");
        return plan;
    }
    if (name == "updateAction") {
        const auto id = op.at("id").get<std::string>();
        for (auto& a : plan.actions) {
            if (a.id != id) continue;
            auto merged = io::to_json(a);
            for (const auto& [k, v] : op.at("fields").items()) {
                if (k == "id") throw ParseError("updateAction cannot change an action id");
                merged[k] = v;
            }
            a = io::action_from_json(merged);
            return plan;
        }
        throw NotFoundError("unknown action '" + id + "'");
    }
    if (name == "setHorizon") {
        plan.horizon_ticks = op.at("horizonTicks").get<int>();
        return plan;
    }
    throw ParseError("unknown mutation op '" + name + "'");
}

std::optional<double> opt_number(const json& j, const char* key) {
    if (!j.contains(key) || j.at(key).is_null()) return std::nullopt;
    return j.at(key).get<double>();
}

}  // namespace

// ---------------------------------------------------------------------------

std::pair<std::string, int> parse_listen(const std::string& spec) {
    const auto colon = spec.rfind(':');
    if (colon == std::string::npos) throw InvalidArgument("listen address must be host:port");
    try {
        const int port = std::stoi(spec.substr(colon + 1));
        if (port < 0 || port > 65535) throw InvalidArgument("port out of range");
        return {spec.substr(0, colon), port};
    } catch (const std::logic_error&) {
        throw InvalidArgument("bad port in listen address '" + spec + "'");
    }
}

ServerConfig ServerConfig::from_env() {
    ServerConfig cfg;
    if (const char* dir = std::getenv("WARGAMER_DATA_DIR"); dir && *dir) cfg.data_dir = dir;
    if (const char* listen = std::getenv("WARGAMER_LISTEN"); listen && *listen) {
        auto [host, port] = parse_listen(listen);
        cfg.host = host;
        cfg.port = port;
    }
    if (const char* workers = std::getenv("WARGAMER_WORKERS"); workers && *workers)
        cfg.workers = static_cast<unsigned>(std::max(1, std::atoi(workers)));
    return cfg;
}

const char* to_string(RunState s) {
    switch (s) {
        case RunState::pending: return "pending";
        case RunState::done: return "done";
        case RunState::failed: return "failed";
    }
    return "pending";
}

json to_json(const RunStatus& s) {
    json j = {{"runId", s.run_id}, {"status", to_string(s.state)}};
    if (s.state == RunState::done) j["resultDocId"] = s.result_doc_id;
    if (s.state == RunState::failed) {
        j["reason"] = s.reason;
        j["findings"] = io::to_json(s.findings);
    }
    return j;
}

json to_json(const DocumentSummary& s) {
    return {{"docId", s.doc_id}, {"kind", to_string(s.kind)}, {"version", s.version},
            {"contentHash", s.content_hash}, {"scenarioId", s.scenario_id}};
}

json to_json(const StoredDocument& d) {
    return {{"docId", d.doc_id},   {"kind", to_string(d.kind)},        {"version", d.version},
            {"payload", d.payload}, {"contentHash", d.content_hash}, {"scenarioId", d.scenario_id}};
}

// ---------------------------------------------------------------------------

PlanService::PlanService(const ServerConfig& cfg) : store_(cfg.data_dir, cfg.sync_writes) {
    const unsigned n = std::max(1u, cfg.workers);
    for (unsigned i = 0; i < n; ++i) workers_.emplace_back([this](std::stop_token st) { worker_loop(st); });
}

PlanService::~PlanService() {
    for (auto& w : workers_) w.request_stop();
    runs_cv_.notify_all();
    workers_.clear();
}

ValidationReport PlanService::validate_plan_payload(const Plan& plan) const {
    auto report = validate_plan(plan);
    if (plan.scenario_id.empty()) return report;
    const auto doc = store_.get(plan.scenario_id);
    if (!doc || doc->kind != DocKind::scenario) return report;  // linkage to an outside scenario id
    const auto scenario = io::scenario_from_json(doc->payload);
    for (const auto& h : scenario.hypotheses) {
        auto per = validate_plan(plan, h.graph);
        for (const auto& f : per.findings)
            if (f.code == "unresolvable-target") report.findings.push_back(f);
    }
    return report;
}

StoredDocument PlanService::create_document(DocKind kind, const json& payload) {
    try {
        switch (kind) {
            case DocKind::scenario: {
                const auto scenario = io::scenario_from_json(payload);
                const auto report = validate_scenario(scenario);
                if (!report.ok()) throw ValidationFailed(report);
                return store_.create(kind, io::to_json(scenario), scenario.id);
            }
            case DocKind::plan: {
                auto plan = io::plan_from_json(payload);
                plan.version = 1;
                const auto report = validate_plan_payload(plan);
                if (!report.ok()) throw ValidationFailed(report);
                return store_.create(kind, io::to_json(plan), plan.scenario_id);
            }
            case DocKind::run_result:
                io::check_schema(payload, "run result");
                if (!payload.contains("metadata")) throw ParseError("run result: missing metadata");
                return store_.create(kind, payload, payload.at("metadata").value("scenarioId", ""));
            case DocKind::analytics_input:
                if (!payload.is_object() && !payload.is_array()) throw ParseError("analytics input must be an object or array");
                return store_.create(kind, payload, payload.is_object() ? payload.value("scenarioId", "") : "");
        }
    } catch (const ParseError& e) {
        throw ValidationFailed(single_finding("parse-error", to_string(kind), e.what()));
    } catch (const json::exception& e) {
        throw ValidationFailed(single_finding("parse-error", to_string(kind), e.what()));
    }
    throw InvalidArgument("unsupported document kind");
}

UpdateResult PlanService::update_plan(const std::string& doc_id, long expected_version, const json& mutation) {
    const auto current = store_.get(doc_id);
    if (!current) throw NotFoundError("unknown document '" + doc_id + "'");
    if (current->kind != DocKind::plan) throw NotFoundError("document '" + doc_id + "' is not a plan");

    auto outcome = store_.update(doc_id, expected_version, [&](const json& payload, long next_version) {
        auto plan = io::plan_from_json(payload);
        try {
            if (mutation.contains("ops")) {
                for (const auto& op : mutation.at("ops")) plan = apply_op(std::move(plan), op);
            } else {
                plan = apply_op(std::move(plan), mutation);
            }
        } catch (const json::exception& e) {
            throw ParseError(std::string("mutation: ") + e.what());
        }
        plan.version = next_version;
        const auto report = validate_plan_payload(plan);
        if (!report.ok()) throw ValidationFailed(report);
        return io::to_json(plan);
    });

    UpdateResult res;
    if (auto* doc = std::get_if<StoredDocument>(&outcome)) {
        res.accepted = true;
        res.document = std::move(*doc);
    } else {
        auto& conflict = std::get<VersionConflict>(outcome);
        res.current_version = conflict.current_version;
        res.current_payload = std::move(conflict.current_payload);
    }
    return res;
}

std::string PlanService::start_run(const RunRequest& request) {
    std::string id;
    {
        std::lock_guard lock(runs_mutex_);
        char buf[32];
        std::snprintf(buf, sizeof buf, "run-%06llu", static_cast<unsigned long long>(next_run_++));
        id = buf;
        runs_[id] = RunStatus{id, RunState::pending, {}, {}, {}};
        queue_.emplace_back(id, request);
    }
    runs_cv_.notify_one();
    return id;
}

std::optional<RunStatus> PlanService::get_run(const std::string& run_id) const {
    std::lock_guard lock(runs_mutex_);
    auto it = runs_.find(run_id);
    if (it == runs_.end()) return std::nullopt;
    return it->second;
}

std::vector<DocumentSummary> PlanService::list_documents(std::optional<DocKind> kind,
                                                         std::optional<std::string> scenario_id) const {
    return store_.list(kind, std::move(scenario_id));
}

void PlanService::worker_loop(std::stop_token stop) {
    while (true) {
        std::pair<std::string, RunRequest> job;
        {
            std::unique_lock lock(runs_mutex_);
            if (!runs_cv_.wait(lock, stop, [&] { return !queue_.empty(); })) return;
            job = std::move(queue_.front());
            queue_.pop_front();
        }
        execute(job.first, job.second);
    }
}

void PlanService::execute(const std::string& run_id, const RunRequest& request) {
    RunStatus status{run_id, RunState::failed, {}, {}, {}};
    try {
        // Snapshot both inputs once; the run never touches the store again until it finishes.
        const auto scenario_doc = store_.get(request.scenario_id);
        const auto plan_doc = store_.get(request.plan_id);
        if (!scenario_doc || scenario_doc->kind != DocKind::scenario) {
            status.reason = "unknown ref: scenario '" + request.scenario_id + "'";
        } else if (!plan_doc || plan_doc->kind != DocKind::plan) {
            status.reason = "unknown ref: plan '" + request.plan_id + "'";
        } else {
            const auto scenario = io::scenario_from_json(scenario_doc->payload);
            const auto plan = io::plan_from_json(plan_doc->payload);
            RunOptions opts;
            opts.hypothesis = request.hypothesis;
            opts.config = request.config;
            opts.threshold = request.threshold;
            opts.persistence = request.persistence;
            opts.scenario_hash = scenario_doc->content_hash;
            opts.plan_hash = plan_doc->content_hash;
            const auto result = execute_run(scenario, plan, opts);
            const auto doc = store_.create(DocKind::run_result, to_json(result), request.scenario_id);
            status.state = RunState::done;
            status.result_doc_id = doc.doc_id;
        }
    } catch (const ValidationFailed& e) {
        status.reason = "validation failed";
        status.findings = e.report();
    } catch (const std::exception& e) {
        status.reason = e.what();
    }
    std::lock_guard lock(runs_mutex_);
    runs_[run_id] = std::move(status);
}

// ---------------------------------------------------------------------------

json run_analytics(const std::string& name, const json& body) {
    using namespace analytics;
    try {
        if (name == "pfnet") {
            auto build = [](const json& spec) {
                DistanceMatrix d;
                std::vector<std::string> nodes;
                if (spec.contains("ratings")) {
                    SimilarityMatrix sim{spec.at("concepts").get<std::vector<std::string>>(),
                                         spec.at("ratings").get<std::vector<std::vector<double>>>()};
                    d = to_distances(sim);
                    nodes = sim.concepts;
                } else {
                    for (const auto& row : spec.at("distances")) {
                        std::vector<double> r;
                        for (const auto& v : row) r.push_back(v.is_string() ? io::parse_r(v) : v.get<double>());
                        d.push_back(std::move(r));
                    }
                    for (const char* key : {"nodes", "concepts"})
                        if (spec.contains(key)) nodes = spec.at(key).get<std::vector<std::string>>();
                }
                const int q = spec.contains("q") ? spec.at("q").get<int>() : static_cast<int>(d.size()) - 1;
                const double r = spec.contains("r") ? io::parse_r(spec.at("r")) : kInfinity;
                return pfnet(d, q, r, nodes);
            };
            const auto net = build(body);
            auto out = io::to_json(net);
            if (body.contains("reference")) out["similarity"] = net_similarity(net, build(body.at("reference")));
            return out;
        }
        if (name == "tlx") {
            auto one = [](const json& j) {
                TlxResponse r;
                const auto ratings = j.at("ratings").get<std::vector<double>>();
                const auto wins = j.at("wins").get<std::vector<int>>();
                if (ratings.size() != kTlxScales || wins.size() != kTlxScales)
                    throw InvalidArgument("TLX needs 6 ratings and 6 win counts");
                std::copy(ratings.begin(), ratings.end(), r.ratings.begin());
                std::copy(wins.begin(), wins.end(), r.wins.begin());
                return tlx_score(r);
            };
            if (body.contains("responses")) {
                json scores = json::array();
                for (const auto& r : body.at("responses")) scores.push_back(one(r));
                return {{"scores", scores}};
            }
            return {{"score", one(body)}};
        }
        if (name == "sna") {
            std::vector<InteractionEvent> events;
            for (const auto& e : body.at("events")) events.push_back(io::interaction_from_json(e));
            const auto window = body.contains("window") ? io::window_from_json(body.at("window")) : TimeWindow{};
            auto out = io::to_json(sna_metrics(events, window));
            if (body.contains("relianceWindows")) {
                std::vector<TimeWindow> windows;
                for (const auto& w : body.at("relianceWindows")) windows.push_back(io::window_from_json(w));
                const auto rt = support_reliance_trend(events, windows);
                out["reliance"] = {{"fractions", rt.fractions}, {"trend", io::to_json(rt.stat)}};
            }
            return out;
        }
        if (name == "trend") {
            std::vector<std::pair<double, double>> pts;
            for (const auto& p : body.at("points")) pts.emplace_back(p.at(0).get<double>(), p.at(1).get<double>());
            return io::to_json(trend(pts));
        }
        if (name == "trust") {
            if (body.contains("a")) {
                return io::to_json(paired_t(body.at("a").get<std::vector<double>>(), body.at("b").get<std::vector<double>>()));
            }
            TrustMask mask{};
            if (body.contains("reverseMask")) {
                const auto m = body.at("reverseMask").get<std::vector<bool>>();
                if (m.size() != kTrustItems) throw InvalidArgument("reverseMask needs 13 entries");
                std::copy(m.begin(), m.end(), mask.begin());
            }
            auto one = [&](const json& items_json) {
                const auto items = items_json.get<std::vector<int>>();
                if (items.size() != kTrustItems) throw InvalidArgument("trust responses need exactly 13 items");
                TrustResponse r;
                std::copy(items.begin(), items.end(), r.items.begin());
                return trust_score(r, mask);
            };
            if (body.contains("responses")) {
                json scores = json::array();
                for (const auto& r : body.at("responses")) scores.push_back(one(r));
                return {{"scores", scores}};
            }
            return {{"score", one(body.at("items"))}};
        }
    } catch (const json::exception& e) {
        throw ParseError(name + ": " + e.what());
    }
    throw NotFoundError("unknown analytics pipeline '" + name + "'");
}

// ---------------------------------------------------------------------------

struct HttpServer::Impl {
    httplib::Server http;
    int port = -1;
};

namespace {

void reply(httplib::Response& res, int status, const json& body) {
    res.status = status;
    res.set_content(body.dump(), "application/json");
}

void reply_error(httplib::Response& res, int status, const std::string& message) {
    reply(res, status, {{"error", message}});
}

json parse_body(const httplib::Request& req) {
    try {
        return json::parse(req.body);
    } catch (const json::parse_error& e) {
        throw ParseError(std::string("request body is not JSON: ") + e.what());
    }
}

template <typename F>
httplib::Server::Handler guarded(F&& f) {
    return [f = std::forward<F>(f)](const httplib::Request& req, httplib::Response& res) {
        try {
            f(req, res);
        } catch (const ValidationFailed& e) {
            reply(res, 422, {{"error", "validation failed"}, {"findings", io::to_json(e.report())}});
        } catch (const NotFoundError& e) {
            reply_error(res, 404, e.what());
        } catch (const ParseError& e) {
            reply_error(res, 400, e.what());
        } catch (const InvalidArgument& e) {
            reply_error(res, 422, e.what());
        } catch (const json::exception& e) {
            reply_error(res, 400, e.what());
        } catch (const std::exception& e) {
            reply_error(res, 500, e.what());
        }
    };
}

}  // namespace

HttpServer::HttpServer(ServerConfig cfg)
    : cfg_(std::move(cfg)), service_(std::make_unique<PlanService>(cfg_)), impl_(std::make_unique<Impl>()) {
    auto& http = impl_->http;
    auto& svc = *service_;
    http.new_task_queue = [] { return new httplib::ThreadPool(32); };

    http.Get("/health", [](const httplib::Request&, httplib::Response& res) { reply(res, 200, {{"status", "ok"}}); });

    http.Post("/documents", guarded([&svc](const httplib::Request& req, httplib::Response& res) {
        const auto body = parse_body(req);
        if (!body.contains("kind") || !body.contains("payload")) throw ParseError("body needs 'kind' and 'payload'");
        const auto doc = svc.create_document(doc_kind_from_string(body.at("kind").get<std::string>()), body.at("payload"));
        reply(res, 201, {{"docId", doc.doc_id}, {"version", doc.version}, {"contentHash", doc.content_hash}});
    }));

    http.Get("/documents", guarded([&svc](const httplib::Request& req, httplib::Response& res) {
        std::optional<DocKind> kind;
        std::optional<std::string> scenario;
        if (req.has_param("kind")) kind = doc_kind_from_string(req.get_param_value("kind"));
        if (req.has_param("scenario")) scenario = req.get_param_value("scenario");
        json docs = json::array();
        for (const auto& s : svc.list_documents(kind, scenario)) docs.push_back(to_json(s));
        reply(res, 200, {{"documents", docs}});
    }));

    http.Get(R"(/documents/([^/]+))", guarded([&svc](const httplib::Request& req, httplib::Response& res) {
        const auto doc = svc.store().get(req.matches[1]);
        if (!doc) throw NotFoundError("unknown document");
        reply(res, 200, to_json(*doc));
    }));

    http.Get(R"(/documents/([^/]+)/history)", guarded([&svc](const httplib::Request& req, httplib::Response& res) {
        const auto versions = svc.store().history(req.matches[1]);
        if (versions.empty()) throw NotFoundError("unknown document");
        json arr = json::array();
        for (const auto& d : versions) arr.push_back(to_json(d));
        reply(res, 200, {{"versions", arr}});
    }));

    http.Delete(R"(/documents/([^/]+))", guarded([&svc](const httplib::Request& req, httplib::Response& res) {
        if (!svc.store().remove(req.matches[1])) throw NotFoundError("unknown document");
        res.status = 204;
    }));

    http.Put(R"(/plans/([^/]+))", guarded([&svc](const httplib::Request& req, httplib::Response& res) {
        const auto body = parse_body(req);
        if (!body.contains("expectedVersion") || !body.at("expectedVersion").is_number_integer())
            throw ParseError("body needs an integer 'expectedVersion'");
        if (!body.contains("mutation")) throw ParseError("body needs a 'mutation'");
        const auto out = svc.update_plan(req.matches[1], body.at("expectedVersion").get<long>(), body.at("mutation"));
        if (out.accepted) {
            reply(res, 200, {{"docId", out.document.doc_id}, {"version", out.document.version},
                             {"contentHash", out.document.content_hash}});
        } else {
            reply(res, 409, {{"error", "version conflict"}, {"currentVersion", out.current_version},
                             {"payload", out.current_payload}});
        }
    }));

    http.Post("/runs", guarded([&svc](const httplib::Request& req, httplib::Response& res) {
        const auto body = parse_body(req);
        RunRequest rr;
        rr.scenario_id = body.at("scenarioId").get<std::string>();
        rr.plan_id = body.at("planId").get<std::string>();
        rr.hypothesis = body.value("hypothesis", "");
        if (body.contains("config")) {
            const auto& c = body.at("config");
            rr.config.horizon_ticks = c.value("horizonTicks", rr.config.horizon_ticks);
            rr.config.seed = c.value("seed", rr.config.seed);
            rr.config.noise_enabled = c.value("noiseEnabled", rr.config.noise_enabled);
        }
        rr.threshold = opt_number(body, "effectThreshold");
        if (auto m = opt_number(body, "effectPersistence")) rr.persistence = static_cast<int>(*m);
        reply(res, 202, {{"runId", svc.start_run(rr)}});
    }));

    http.Get(R"(/runs/([^/]+))", guarded([&svc](const httplib::Request& req, httplib::Response& res) {
        const auto st = svc.get_run(req.matches[1]);
        if (!st) throw NotFoundError("unknown run");
        reply(res, 200, to_json(*st));
    }));

    http.Get(R"(/runs/([^/]+)/effects)", guarded([&svc](const httplib::Request& req, httplib::Response& res) {
        const auto st = svc.get_run(req.matches[1]);
        if (!st) throw NotFoundError("unknown run");
        if (st->state == RunState::pending) return reply(res, 202, to_json(*st));
        if (st->state == RunState::failed) return reply(res, 422, to_json(*st));
        const auto doc = svc.store().get(st->result_doc_id);
        if (!doc) throw NotFoundError("run result document missing");
        reply(res, 200, {{"runId", st->run_id}, {"effects", doc->payload.at("effects")}, {"summary", doc->payload.at("summary")}});
    }));

    http.Post(R"(/analytics/([a-z]+))", guarded([](const httplib::Request& req, httplib::Response& res) {
        reply(res, 200, run_analytics(req.matches[1], parse_body(req)));
    }));
}

HttpServer::~HttpServer() { stop(); }

int HttpServer::bind() {
    auto& http = impl_->http;
    if (cfg_.port == 0) {
        impl_->port = http.bind_to_any_port(cfg_.host);
    } else {
        impl_->port = http.bind_to_port(cfg_.host, cfg_.port) ? cfg_.port : -1;
    }
    if (impl_->port < 0) throw Error("cannot bind " + cfg_.host + ":" + std::to_string(cfg_.port));
    return impl_->port;
}

void HttpServer::listen() { impl_->http.listen_after_bind(); }

int HttpServer::start_background() {
    const int port = bind();
    thread_ = std::thread([this] { listen(); });
    impl_->http.wait_until_ready();
    return port;
}

void HttpServer::stop() {
    if (impl_) impl_->http.stop();
    if (thread_.joinable()) thread_.join();
}

}  // namespace wargame
