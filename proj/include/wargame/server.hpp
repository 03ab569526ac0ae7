#pragma once

// Multi-client planning service: scenario/plan documents with optimistic
// versioning, asynchronous simulation runs on a bounded FIFO worker pool,
// and the analytics pipelines, exposed over HTTP with JSON bodies.

#include <condition_variable>
#include <cstdint>
#include <deque>
#include <filesystem>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <thread>
#include <vector>

#include <nlohmann/json.hpp>

#include "wargame/findings.hpp"
#include "wargame/sim.hpp"
#include "wargame/store.hpp"

namespace wargame {

struct ServerConfig {
    std::filesystem::path data_dir = "wargamer-data";
    std::string host = "127.0.0.1";
    int port = 8080;
    unsigned workers = 2;
    bool sync_writes = true;

    /// Defaults overridden by WARGAMER_DATA_DIR, WARGAMER_LISTEN (host:port)
    /// and WARGAMER_WORKERS.
    static ServerConfig from_env();
};

/// Parses "host:port"; throws InvalidArgument.
std::pair<std::string, int> parse_listen(const std::string& spec);

enum class RunState { pending, done, failed };

struct RunRequest {
    std::string scenario_id;  // document ids
    std::string plan_id;
    std::string hypothesis;
    RunConfig config;
    std::optional<double> threshold;
    std::optional<int> persistence;
};

struct RunStatus {
    std::string run_id;
    RunState state = RunState::pending;
    std::string result_doc_id;
    std::string reason;
    ValidationReport findings;
};

struct UpdateResult {
    bool accepted = false;
    StoredDocument document;        // when accepted
    long current_version = 0;       // when rejected
    nlohmann::json current_payload;
};

class PlanService {
  public:
    explicit PlanService(const ServerConfig& cfg);
    ~PlanService();

    PlanService(const PlanService&) = delete;
    PlanService& operator=(const PlanService&) = delete;

    /// Validates and canonicalises the payload for its kind, then persists it
    /// at version 1. Throws ValidationFailed with the findings on rejection.
    StoredDocument create_document(DocKind kind, const nlohmann::json& payload);

    /// Mutation forms: {"op":"replace","plan":{..}}, {"op":"addAction","action":{..}},
    /// {"op":"updateAction","id":..,"fields":{..}}, {"op":"removeAction","id":..},
    /// {"op":"setHorizon","horizonTicks":n}, or {"ops":[...]} applying several.
    /// Throws NotFoundError, ParseError or ValidationFailed.
    UpdateResult update_plan(const std::string& doc_id, long expected_version, const nlohmann::json& mutation);

    std::string start_run(const RunRequest& request);
    [[nodiscard]] std::optional<RunStatus> get_run(const std::string& run_id) const;

    [[nodiscard]] std::vector<DocumentSummary> list_documents(std::optional<DocKind> kind,
                                                              std::optional<std::string> scenario_id) const;

    DocumentStore& store() { return store_; }

  private:
    void worker_loop(std::stop_token stop);
    void execute(const std::string& run_id, const RunRequest& request);
    ValidationReport validate_plan_payload(const Plan& plan) const;

    DocumentStore store_;
    mutable std::mutex runs_mutex_;
    std::condition_variable_any runs_cv_;
    std::deque<std::pair<std::string, RunRequest>> queue_;
    std::map<std::string, RunStatus> runs_;
    std::uint64_t next_run_ = 1;
    std::vector<std::jthread> workers_;
};

/// JSON front-end of the analytics pipelines: `name` is one of pfnet, tlx,
/// sna, trend, trust. Throws ParseError / InvalidArgument on bad input.
nlohmann::json run_analytics(const std::string& name, const nlohmann::json& body);

nlohmann::json to_json(const RunStatus& s);
nlohmann::json to_json(const DocumentSummary& s);
nlohmann::json to_json(const StoredDocument& d);
const char* to_string(RunState s);

/// HTTP binding of PlanService.
///   POST /documents            {"kind", "payload"}            201 | 422 findings
///   GET  /documents?kind=&scenario=                          200
///   GET  /documents/{id}       GET /documents/{id}/history    200 | 404
///   DELETE /documents/{id}                                    204 | 404
///   PUT  /plans/{id}           {"expectedVersion", "mutation"} 200 | 409 | 422
///   POST /runs                 {"scenarioId","planId","hypothesis","config"} 202
///   GET  /runs/{id}            GET /runs/{id}/effects
///   POST /analytics/{pfnet|tlx|sna|trend|trust}
class HttpServer {
  public:
    explicit HttpServer(ServerConfig cfg);
    ~HttpServer();

    HttpServer(const HttpServer&) = delete;
    HttpServer& operator=(const HttpServer&) = delete;

    /// Binds (port 0 picks a free port) and returns the bound port.
    int bind();
    /// Serves until stop(); bind() must have succeeded.
    void listen();
    /// bind() + listen() on a background thread.
    int start_background();
    void stop();

    PlanService& service() { return *service_; }

  private:
    struct Impl;
    ServerConfig cfg_;
    std::unique_ptr<PlanService> service_;
    std::unique_ptr<Impl> impl_;
    std::thread thread_;
};

}  // namespace wargame
