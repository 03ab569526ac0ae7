#include "wargame/io.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <map>
#include <sstream>

#include <openssl/evp.h>

#include "wargame/errors.hpp"

namespace wargame::io {
namespace {

const json& req(const json& j, const char* key) {
    if (!j.is_object() || !j.contains(key)) throw ParseError(std::string("missing field '") + key + "'");
    return j.at(key);
}

std::string req_string(const json& j, const char* key) {
    const auto& v = req(j, key);
    if (!v.is_string()) throw ParseError(std::string("field '") + key + "' must be a string");
    return v.get<std::string>();
}

double req_number(const json& j, const char* key) {
    const auto& v = req(j, key);
    if (!v.is_number()) throw ParseError(std::string("field '") + key + "' must be a number");
    return v.get<double>();
}

long long req_integer(const json& j, const char* key) {
    const auto& v = req(j, key);
    if (!v.is_number_integer()) throw ParseError(std::string("field '") + key + "' must be an integer");
    return v.get<long long>();
}

std::string opt_string(const json& j, const char* key) {
    if (!j.contains(key) || j.at(key).is_null()) return {};
    if (!j.at(key).is_string()) throw ParseError(std::string("field '") + key + "' must be a string");
    return j.at(key).get<std::string>();
}

const json& req_array(const json& j, const char* key) {
    const auto& v = req(j, key);
    if (!v.is_array()) throw ParseError(std::string("field '") + key + "' must be an array");
    return v;
}

const json& opt_array(const json& j, const char* key) {
    static const json empty = json::array();
    if (!j.contains(key) || j.at(key).is_null()) return empty;
    if (!j.at(key).is_array()) throw ParseError(std::string("field '") + key + "' must be an array");
    return j.at(key);
}

Matrix matrix_from(const json& j, const char* key) {
    Matrix m;
    for (const auto& row : opt_array(j, key)) {
        if (!row.is_array()) throw ParseError(std::string("matrix '") + key + "' rows must be arrays");
        std::vector<double> r;
        for (const auto& v : row) {
            if (!v.is_number()) throw ParseError(std::string("matrix '") + key + "' entries must be numbers");
            r.push_back(v.get<double>());
        }
        m.push_back(std::move(r));
    }
    return m;
}

std::vector<double> vector_from(const json& j, const char* key) {
    std::vector<double> out;
    for (const auto& v : opt_array(j, key)) {
        if (!v.is_number()) throw ParseError(std::string("vector '") + key + "' entries must be numbers");
        out.push_back(v.get<double>());
    }
    return out;
}

std::vector<std::string> strings_from(const json& j, const char* key) {
    std::vector<std::string> out;
    for (const auto& v : opt_array(j, key)) {
        if (!v.is_string()) throw ParseError(std::string("'") + key + "' entries must be strings");
        out.push_back(v.get<std::string>());
    }
    return out;
}

double round6(double v) {
    if (!std::isfinite(v)) return v;
    const double r = std::round(v * 1e6) / 1e6;
    return r == 0.0 ? 0.0 : r;  // no negative zero in files
}

json values_json(const std::vector<double>& values) {
    json arr = json::array();
    for (double v : values) arr.push_back(round6(v));
    return arr;
}

template <typename F>
auto wrap_parse(const char* what, F&& f) -> decltype(f()) {
    try {
        return f();
    } catch (const Error&) {
        throw;
    } catch (const json::exception& e) {
        throw ParseError(std::string(what) + ": " + e.what());
    }
}

std::string trim(std::string s) {
    const auto b = s.find_first_not_of(" \t\r");
    const auto e = s.find_last_not_of(" \t\r");
    return b == std::string::npos ? std::string{} : s.substr(b, e - b + 1);
}

double to_double(const std::string& s, const char* what) {
    const auto t = trim(s);
    try {
        std::size_t pos = 0;
        const double v = std::stod(t, &pos);
        if (pos != t.size()) throw std::invalid_argument(t);
        return v;
    } catch (const std::exception&) {
        throw ParseError(std::string("expected a number for ") + what + ", got '" + t + "'");
    }
}

int to_int(const std::string& s, const char* what) {
    const double v = to_double(s, what);
    if (v != std::floor(v)) throw ParseError(std::string("expected an integer for ") + what);
    return static_cast<int>(v);
}

std::map<std::string, std::size_t> header_index(const std::vector<std::string>& header) {
    std::map<std::string, std::size_t> idx;
    for (std::size_t i = 0; i < header.size(); ++i) idx[trim(header[i])] = i;
    return idx;
}

std::size_t column(const std::map<std::string, std::size_t>& idx, const std::string& name) {
    auto it = idx.find(name);
    if (it == idx.end()) throw ParseError("missing CSV column '" + name + "'");
    return it->second;
}

const std::string& cell(const std::vector<std::string>& row, std::size_t i) {
    static const std::string empty;
    return i < row.size() ? row[i] : empty;
}

const std::array<const char*, analytics::kTlxScales> kTlxNames = {"mental", "physical", "temporal",
                                                                  "performance", "effort", "frustration"};

}  // namespace

std::string dump(const json& j) { return j.dump(2) + "\n"; }
std::string dump_compact(const json& j) { return j.dump(); }

std::string sha256_hex(const std::string& bytes) {
    unsigned char digest[EVP_MAX_MD_SIZE];
    unsigned int len = 0;
    if (EVP_Digest(bytes.data(), bytes.size(), digest, &len, EVP_sha256(), nullptr) != 1)
        throw Error("sha256 digest failed");
    static const char* hex = "0123456789abcdef";
    std::string out;
    out.reserve(len * 2);
    for (unsigned int i = 0; i < len; ++i) {
        out.push_back(hex[digest[i] >> 4]);
        out.push_back(hex[digest[i] & 0xf]);
    }
    return out;
}

std::string content_hash(const json& j) { return sha256_hex(dump_compact(j)); }

std::string read_text_file(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw NotFoundError("cannot open '" + path.string() + "'");
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

json read_json_file(const std::filesystem::path& path) {
    const auto text = read_text_file(path);
    try {
        return json::parse(text);
    } catch (const json::parse_error& e) {
        throw ParseError(path.string() + ": " + e.what());
    }
}

void write_text_file(const std::filesystem::path& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw Error("cannot write '" + path.string() + "'");
    out << text;
    if (!out) throw Error("write failed for '" + path.string() + "'");
}

void check_schema(const json& j, const char* what) {
    if (!j.is_object()) throw ParseError(std::string(what) + ": document must be an object");
    if (!j.contains("schemaVersion")) throw ParseError(std::string(what) + ": missing schemaVersion");
    if (!j.at("schemaVersion").is_number_integer() || j.at("schemaVersion").get<int>() != kSchemaVersion)
        throw ParseError(std::string(what) + ": unsupported schemaVersion");
}

// ---------------------------------------------------------------------------
// Scenario

json to_json(const ComponentTemplate& t) {
    json vars = json::array();
    for (const auto& v : t.state_vars)
        vars.push_back({{"name", v.name()}, {"initial", v.value()}, {"polarity", to_string(v.polarity())}});
    const auto& d = t.dynamics;
    return {{"id", t.id},         {"kind", to_string(t.kind)},  {"stateVars", vars},
            {"inputPorts", t.input_ports}, {"outputPorts", t.output_ports}, {"A", d.A},
            {"B", d.B},           {"c", d.c},                   {"C", d.C},
            {"noiseStd", d.noise_std}};
}

ComponentTemplate template_from_json(const json& j) {
    ComponentTemplate t;
    t.id = req_string(j, "id");
    t.kind = component_kind_from_string(req_string(j, "kind"));
    for (const auto& v : req_array(j, "stateVars")) {
        const double init = req_number(v, "initial");
        if (init < kLevelMin || init > kLevelMax)
            throw ParseError("template '" + t.id + "': initial value outside [0,100]");
        t.state_vars.emplace_back(req_string(v, "name"), init, polarity_from_string(req_string(v, "polarity")));
    }
    t.input_ports = strings_from(j, "inputPorts");
    t.output_ports = strings_from(j, "outputPorts");
    t.dynamics.A = matrix_from(j, "A");
    t.dynamics.B = matrix_from(j, "B");
    t.dynamics.c = vector_from(j, "c");
    t.dynamics.C = matrix_from(j, "C");
    t.dynamics.noise_std = vector_from(j, "noiseStd");
    return t;
}

json to_json(const ComponentInstance& inst) {
    json overrides = json::array();
    for (const auto& o : inst.overrides) {
        json e = {{"param", to_string(o.target)}, {"row", o.row}, {"value", o.value}};
        if (o.target == OverrideTarget::A || o.target == OverrideTarget::B) e["col"] = o.col;
        overrides.push_back(std::move(e));
    }
    return {{"id", inst.id},
            {"template", inst.template_ref},
            {"region", inst.region},
            {"tier", to_string(inst.tier)},
            {"overrides", overrides}};
}

json to_json(const ModelGraph& g) {
    json instances = json::array();
    for (const auto& i : g.instances) instances.push_back(to_json(i));
    json couplings = json::array();
    for (const auto& c : g.couplings)
        couplings.push_back({{"from", {{"instance", c.from.instance}, {"port", c.from.port}}},
                             {"to", {{"instance", c.to.instance}, {"port", c.to.port}}},
                             {"gain", c.gain}});
    json aggs = json::array();
    for (const auto& a : g.aggregations) {
        json sources = json::array();
        for (std::size_t i = 0; i < a.sources.size(); ++i)
            sources.push_back({{"instance", a.sources[i].instance},
                               {"var", a.sources[i].var},
                               {"weight", i < a.weights.size() ? a.weights[i] : 0.0}});
        aggs.push_back({{"nationalVar", a.national_var}, {"sources", sources}});
    }
    return {{"id", g.id}, {"instances", instances}, {"couplings", couplings}, {"aggregations", aggs}};
}

json to_json(const Scenario& s) {
    json templates = json::array();
    for (const auto& t : s.templates) templates.push_back(to_json(t));
    json hyps = json::array();
    for (const auto& h : s.hypotheses)
        hyps.push_back({{"name", h.name}, {"provenance", h.provenance}, {"graph", to_json(h.graph)}});
    return {{"schemaVersion", kSchemaVersion},
            {"id", s.id},
            {"effectThreshold", s.effect_threshold},
            {"effectPersistence", s.effect_persistence},
            {"templates", templates},
            {"hypotheses", hyps}};
}

Scenario scenario_from_json(const json& j) {
    return wrap_parse("scenario", [&] {
        check_schema(j, "scenario");
        Scenario s;
        s.id = opt_string(j, "id");
        if (j.contains("effectThreshold")) s.effect_threshold = req_number(j, "effectThreshold");
        if (j.contains("effectPersistence")) s.effect_persistence = static_cast<int>(req_integer(j, "effectPersistence"));
        for (const auto& t : opt_array(j, "templates")) s.templates.push_back(template_from_json(t));

        for (const auto& hj : opt_array(j, "hypotheses")) {
            SituationHypothesis h;
            h.name = req_string(hj, "name");
            h.provenance = opt_string(hj, "provenance");
            const auto& gj = req(hj, "graph");
            h.graph.id = gj.contains("id") ? opt_string(gj, "id") : h.name;

            for (const auto& ij : opt_array(gj, "instances")) {
                std::vector<ParamOverride> overrides;
                for (const auto& oj : opt_array(ij, "overrides")) {
                    ParamOverride o;
                    o.target = override_target_from_string(req_string(oj, "param"));
                    const auto row = req_integer(oj, "row");
                    const auto col = oj.contains("col") ? req_integer(oj, "col") : 0;
                    if (row < 0 || col < 0) throw ParseError("override coordinates must be >= 0");
                    o.row = static_cast<std::size_t>(row);
                    o.col = static_cast<std::size_t>(col);
                    o.value = req_number(oj, "value");
                    overrides.push_back(o);
                }
                const auto id = req_string(ij, "id");
                const auto tmpl = req_string(ij, "template");
                const auto region = opt_string(ij, "region");
                const auto tier = ij.contains("tier") ? tier_from_string(req_string(ij, "tier")) : Tier::province;
                if (const auto* t = s.find_template(tmpl)) {
                    try {
                        h.graph.instances.push_back(instantiate_template(*t, overrides, id, region, tier));
                    } catch (const InvalidArgument& e) {
                        throw ParseError(e.what());
                    }
                } else {
                    ComponentInstance orphan;
                    orphan.id = id;
                    orphan.template_ref = tmpl;
                    orphan.overrides = overrides;
                    orphan.region = region;
                    orphan.tier = tier;
                    h.graph.instances.push_back(std::move(orphan));
                }
            }
            for (const auto& cj : opt_array(gj, "couplings")) {
                Coupling c;
                const auto& from = req(cj, "from");
                const auto& to = req(cj, "to");
                c.from = {req_string(from, "instance"), req_string(from, "port")};
                c.to = {req_string(to, "instance"), req_string(to, "port")};
                c.gain = cj.contains("gain") ? req_number(cj, "gain") : 1.0;
                h.graph.couplings.push_back(std::move(c));
            }
            for (const auto& aj : opt_array(gj, "aggregations")) {
                AggregationRule rule;
                rule.national_var = req_string(aj, "nationalVar");
                for (const auto& sj : req_array(aj, "sources")) {
                    rule.sources.push_back({req_string(sj, "instance"), req_string(sj, "var")});
                    rule.weights.push_back(req_number(sj, "weight"));
                }
                h.graph.aggregations.push_back(std::move(rule));
            }
            s.hypotheses.push_back(std::move(h));
        }
        return s;
    });
}

// ---------------------------------------------------------------------------
// Plan

json to_json(const Action& a) {
    json j = {{"id", a.id},
              {"name", a.name},
              {"instrument", to_string(a.instrument)},
              {"lineOfEffort", a.line_of_effort},
              {"target", {{"instance", a.target.instance}, {"port", a.target.port}}},
              {"startTick", a.start_tick},
              {"durationTicks", a.duration_ticks},
              {"intensity", a.intensity},
              {"dependencies", std::vector<std::string>(a.dependencies.begin(), a.dependencies.end())}};
    if (a.resource) j["resource"] = {{"pool", a.resource->pool}, {"ratePerTick", a.resource->rate_per_tick}};
    return j;
}

json to_json(const Plan& p) {
    Plan sorted = p;
    sorted.sort_actions();
    json actions = json::array();
    for (const auto& a : sorted.actions) actions.push_back(to_json(a));
    json loes = json::array();
    for (const auto& l : p.lines_of_effort) loes.push_back({{"name", l.name}, {"description", l.description}});
    json pools = json::array();
    for (const auto& pool : p.pools)
        pools.push_back({{"poolId", pool.id}, {"agency", pool.agency}, {"budget", pool.budget}, {"kind", to_string(pool.kind)}});
    json j = {{"schemaVersion", kSchemaVersion},
              {"id", p.id},
              {"horizonTicks", p.horizon_ticks},
              {"version", p.version},
              {"linesOfEffort", loes},
              {"pools", pools},
              {"actions", actions}};
    if (!p.scenario_id.empty()) j["scenarioId"] = p.scenario_id;
    return j;
}

Action action_from_json(const json& aj) {
    return wrap_parse("action", [&] {
        Action a;
        a.id = req_string(aj, "id");
        a.name = opt_string(aj, "name");
        a.instrument = instrument_from_string(req_string(aj, "instrument"));
        a.line_of_effort = req_string(aj, "lineOfEffort");
        const auto& tj = req(aj, "target");
        a.target = {req_string(tj, "instance"), req_string(tj, "port")};
        a.start_tick = static_cast<int>(req_integer(aj, "startTick"));
        a.duration_ticks = static_cast<int>(req_integer(aj, "durationTicks"));
        a.intensity = req_number(aj, "intensity");
        if (aj.contains("resource") && !aj.at("resource").is_null()) {
            const auto& rj = aj.at("resource");
            a.resource = ResourceDraw{req_string(rj, "pool"), req_number(rj, "ratePerTick")};
        }
        for (const auto& d : strings_from(aj, "dependencies")) a.dependencies.insert(d);
        return a;
    });
}

Plan plan_from_json(const json& j) {
    return wrap_parse("plan", [&] {
        check_schema(j, "plan");
        Plan p;
        p.id = req_string(j, "id");
        p.scenario_id = opt_string(j, "scenarioId");
        p.horizon_ticks = static_cast<int>(req_integer(j, "horizonTicks"));
        p.version = j.contains("version") ? static_cast<long>(req_integer(j, "version")) : 1;
        for (const auto& lj : opt_array(j, "linesOfEffort"))
            p.lines_of_effort.push_back({req_string(lj, "name"), opt_string(lj, "description")});
        for (const auto& pj : opt_array(j, "pools")) {
            ResourcePool pool;
            pool.id = req_string(pj, "poolId");
            pool.agency = opt_string(pj, "agency");
            pool.budget = req_number(pj, "budget");
            pool.kind = pj.contains("kind") ? pool_kind_from_string(req_string(pj, "kind")) : PoolKind::financial;
            p.pools.push_back(std::move(pool));
        }
        for (const auto& aj : opt_array(j, "actions")) p.actions.push_back(action_from_json(aj));
        p.sort_actions();
        return p;
    });
}

// ---------------------------------------------------------------------------
// Desired effects

json to_json(const DesiredEffect& e) {
    json target = e.target.is_national() ? json{{"national", e.target.var}}
                                         : json{{"instance", e.target.instance}, {"var", e.target.var}};
    return {{"id", e.id},
            {"target", target},
            {"direction", to_string(e.direction)},
            {"thresholdLevel", e.threshold_level},
            {"deadlineTick", e.deadline_tick}};
}

DesiredEffect desired_effect_from_json(const json& j) {
    DesiredEffect e;
    e.id = req_string(j, "id");
    const auto& t = req(j, "target");
    if (t.contains("national")) {
        e.target = {"", req_string(t, "national")};
    } else {
        e.target = {req_string(t, "instance"), req_string(t, "var")};
    }
    e.direction = direction_from_string(req_string(j, "direction"));
    e.threshold_level = req_number(j, "thresholdLevel");
    if (e.threshold_level < kLevelMin || e.threshold_level > kLevelMax)
        throw ParseError("effect '" + e.id + "': thresholdLevel outside [0,100]");
    e.deadline_tick = static_cast<int>(req_integer(j, "deadlineTick"));
    return e;
}

json effects_to_json(const std::vector<DesiredEffect>& effects) {
    json arr = json::array();
    for (const auto& e : effects) arr.push_back(to_json(e));
    return {{"schemaVersion", kSchemaVersion}, {"effects", arr}};
}

std::vector<DesiredEffect> effects_from_json(const json& j) {
    return wrap_parse("effects", [&] {
        check_schema(j, "effects");
        std::vector<DesiredEffect> out;
        for (const auto& e : req_array(j, "effects")) out.push_back(desired_effect_from_json(e));
        return out;
    });
}

// ---------------------------------------------------------------------------
// Trajectories and effects

json to_json(const Trajectory& t) {
    json series = json::array();
    for (const auto& s : t.series)
        series.push_back({{"instance", s.key.instance},
                          {"var", s.key.var},
                          {"polarity", to_string(s.polarity)},
                          {"values", values_json(s.values)}});
    json national = json::array();
    for (const auto& n : t.national) national.push_back({{"name", n.name}, {"values", values_json(n.values)}});
    return {{"horizonTicks", t.horizon_ticks}, {"series", series}, {"national", national}};
}

Trajectory trajectory_from_json(const json& j) {
    return wrap_parse("trajectory", [&] {
        Trajectory t;
        t.horizon_ticks = static_cast<int>(req_integer(j, "horizonTicks"));
        for (const auto& sj : req_array(j, "series")) {
            Series s;
            s.key = {req_string(sj, "instance"), req_string(sj, "var")};
            s.polarity = polarity_from_string(req_string(sj, "polarity"));
            s.values = vector_from(sj, "values");
            t.series.push_back(std::move(s));
        }
        for (const auto& nj : opt_array(j, "national")) t.national.push_back({req_string(nj, "name"), vector_from(nj, "values")});
        return t;
    });
}

json to_json(const EffectRecord& e) {
    return {{"instance", e.instance},
            {"var", e.var},
            {"window", {e.window_start, e.window_end}},
            {"meanDelta", round6(e.mean_delta)},
            {"favorable", e.favorable}};
}

EffectRecord effect_record_from_json(const json& j) {
    return wrap_parse("effect record", [&] {
        EffectRecord e;
        e.instance = req_string(j, "instance");
        e.var = req_string(j, "var");
        const auto& w = req_array(j, "window");
        if (w.size() != 2) throw ParseError("effect window must have two entries");
        e.window_start = w[0].get<int>();
        e.window_end = w[1].get<int>();
        e.mean_delta = req_number(j, "meanDelta");
        e.favorable = req(j, "favorable").get<bool>();
        return e;
    });
}

json to_json(const std::vector<EffectRecord>& effects) {
    json arr = json::array();
    for (const auto& e : effects) arr.push_back(to_json(e));
    return arr;
}

// ---------------------------------------------------------------------------
// Reports

json to_json(const ValidationReport& r) {
    json arr = json::array();
    for (const auto& f : r.findings)
        arr.push_back({{"severity", to_string(f.severity)}, {"code", f.code}, {"subject", f.subject}, {"message", f.message}});
    return arr;
}

json to_json(const SyncMatrix& m) {
    json rows = json::array();
    for (std::size_t r = 0; r < m.rows.size(); ++r) rows.push_back({{"lineOfEffort", m.rows[r]}, {"cells", m.cells[r]}});
    return {{"bucketTicks", m.bucket_ticks}, {"rows", rows}};
}

json to_json(const ResourceProfile& p) {
    json out = json::object();
    for (std::size_t i = 0; i < p.pools.size(); ++i) out[p.pools[i]] = values_json(p.cumulative[i]);
    return out;
}

json to_json(const DuplicateReport& r) {
    json arr = json::array();
    for (const auto& d : r.pairs)
        arr.push_back({{"first", d.first}, {"second", d.second}, {"target", {{"instance", d.target.instance}, {"port", d.target.port}}}});
    return arr;
}

json to_json(const CoaScore& s) {
    json j = {{"planId", s.plan_id},
              {"hypothesis", s.hypothesis},
              {"status", s.failed ? "failed" : "ok"},
              {"achievedCount", s.achieved_count},
              {"achievedIds", std::vector<std::string>(s.achieved_ids.begin(), s.achieved_ids.end())},
              {"unfavorableEffectCount", s.unfavorable_effect_count},
              {"totalSpend", s.total_spend}};
    if (s.failed) j["failure"] = s.failure;
    if (s.min_achieved) j["minAchieved"] = *s.min_achieved;
    if (s.worst_hypothesis) j["worstHypothesis"] = *s.worst_hypothesis;
    return j;
}

json to_json(const RobustnessResult& r) {
    json per = json::array();
    for (const auto& h : r.per_hypothesis) {
        json e = {{"hypothesis", h.hypothesis}, {"status", h.ok ? "ok" : "failed"}, {"achievedCount", h.achieved_count}};
        if (!h.ok) {
            e["reason"] = h.reason;
            e["findings"] = to_json(h.findings);
        }
        per.push_back(std::move(e));
    }
    json j = {{"perHypothesis", per}};
    j["minAchieved"] = r.min_achieved ? json(*r.min_achieved) : json(nullptr);
    j["worstHypothesis"] = r.worst_hypothesis ? json(*r.worst_hypothesis) : json(nullptr);
    return j;
}

json to_json(const ProgressReport& r) {
    json div = json::array();
    for (const auto& [target, pts] : r.divergence) {
        json series = json::array();
        for (const auto& p : pts) series.push_back({{"tick", p.tick}, {"divergence", round6(p.divergence)}});
        div.push_back({{"target", target.label()}, {"series", series}});
    }
    json flags = json::array();
    for (const auto& f : r.flags)
        flags.push_back({{"tick", f.tick}, {"target", f.target.label()}, {"divergence", round6(f.divergence)}});
    return {{"divergence", div}, {"flags", flags}};
}

std::vector<Observation> observations_from_json(const json& j) {
    return wrap_parse("observations", [&] {
        std::vector<Observation> out;
        const auto& arr = j.is_array() ? j : req_array(j, "observations");
        for (const auto& oj : arr) {
            Observation o;
            o.tick = static_cast<int>(req_integer(oj, "tick"));
            const auto& t = req(oj, "target");
            o.target = t.contains("national") ? EffectTarget{"", req_string(t, "national")}
                                              : EffectTarget{req_string(t, "instance"), req_string(t, "var")};
            o.value = req_number(oj, "value");
            out.push_back(std::move(o));
        }
        return out;
    });
}

// ---------------------------------------------------------------------------
// Analytics

json to_json(const analytics::PFNet& net) {
    json links = json::array();
    for (const auto& l : net.links) links.push_back({{"a", net.nodes[l.a]}, {"b", net.nodes[l.b]}, {"weight", l.weight}});
    return {{"nodes", net.nodes},
            {"q", net.q},
            {"r", std::isinf(net.r) ? json("inf") : json(net.r)},
            {"linkCount", net.links.size()},
            {"links", links}};
}

json to_json(const analytics::StatResult& s) {
    auto num = [](double v) {
        if (std::isinf(v)) return json(v > 0 ? "inf" : "-inf");
        if (std::isnan(v)) return json(nullptr);
        return json(v);
    };
    return {{"statistic", num(s.statistic)}, {"slope", num(s.slope)}, {"intercept", num(s.intercept)},
            {"rSquared", num(s.r_squared)},   {"pValue", num(s.p_value)}, {"n", s.n}, {"df", s.df}};
}

json to_json(const analytics::SnaMetrics& m) {
    return {{"actors", m.actors},
            {"edgeCount", m.edge_count},
            {"density", m.density},
            {"weightedDegree", m.weighted_degree},
            {"betweenness", m.betweenness},
            {"crossGroupFraction", m.cross_group_fraction},
            {"totalWeight", m.total_weight}};
}

analytics::InteractionEvent interaction_from_json(const json& j) {
    return wrap_parse("interaction", [&] {
        analytics::InteractionEvent e;
        e.start_time = req_number(j, "timestamp");
        e.source = req_string(j, "source");
        e.destination = req_string(j, "destination");
        e.duration_seconds = req_number(j, "durationSeconds");
        e.kind = analytics::interaction_kind_from_string(req_string(j, "kind"));
        e.source_group = opt_string(j, "sourceGroup");
        e.dest_group = opt_string(j, "destGroup");
        if (j.contains("sourceRole")) e.source_role = analytics::role_from_string(req_string(j, "sourceRole"));
        if (j.contains("destRole")) e.dest_role = analytics::role_from_string(req_string(j, "destRole"));
        return e;
    });
}

analytics::TimeWindow window_from_json(const json& j) {
    analytics::TimeWindow w;
    if (j.is_null()) return w;
    if (!j.is_array() || j.size() != 2) throw ParseError("window must be [begin, end]");
    if (!j[0].is_null()) w.begin = j[0].get<double>();
    if (!j[1].is_null()) w.end = j[1].get<double>();
    return w;
}

double parse_r(const std::string& s) {
    const auto t = trim(s);
    if (t == "inf" || t == "infinity" || t == "Inf" || t == "INF") return analytics::kInfinity;
    return to_double(t, "r");
}

double parse_r(const json& j) {
    if (j.is_string()) return parse_r(j.get<std::string>());
    if (j.is_number()) return j.get<double>();
    throw ParseError("r must be a number or \"inf\"");
}

// ---------------------------------------------------------------------------
// CSV

std::vector<std::vector<std::string>> parse_csv(const std::string& text) {
    std::vector<std::vector<std::string>> rows;
    std::vector<std::string> row;
    std::string field;
    bool quoted = false;
    bool any = false;
    for (std::size_t i = 0; i < text.size(); ++i) {
        const char ch = text[i];
        if (quoted) {
            if (ch == '"') {
                if (i + 1 < text.size() && text[i + 1] == '"') {
                    field.push_back('"');
                    ++i;
                } else {
                    quoted = false;
                }
            } else {
                field.push_back(ch);
            }
            continue;
        }
        if (ch == '"') {
            quoted = true;
            any = true;
        } else if (ch == ',') {
            row.push_back(std::move(field));
            field.clear();
            any = true;
        } else if (ch == '\n') {
            if (any || !field.empty()) {
                row.push_back(std::move(field));
                rows.push_back(std::move(row));
            }
            row.clear();
            field.clear();
            any = false;
        } else if (ch != '\r') {
            field.push_back(ch);
            if (ch != ' ' && ch != '\t') any = true;
        }
    }
    if (quoted) throw ParseError("unterminated quoted CSV field");
    if (any || !field.empty()) {
        row.push_back(std::move(field));
        rows.push_back(std::move(row));
    }
    return rows;
}

std::string csv_escape(const std::string& field) {
    if (field.find_first_of(",\"\n\r") == std::string::npos) return field;
    std::string out = "\"";
    for (char ch : field) {
        if (ch == '"') out.push_back('"');
        out.push_back(ch);
    }
    out.push_back('"');
    return out;
}

analytics::SimilarityMatrix similarity_from_csv(const std::string& text) {
    const auto rows = parse_csv(text);
    if (rows.empty()) throw ParseError("similarity CSV is empty");
    analytics::SimilarityMatrix sim;
    for (std::size_t i = 1; i < rows[0].size(); ++i) sim.concepts.push_back(trim(rows[0][i]));
    const auto n = sim.concepts.size();
    if (rows.size() != n + 1) throw ParseError("similarity CSV must have one row per concept");
    sim.ratings.assign(n, std::vector<double>(n, 0.0));
    for (std::size_t r = 0; r < n; ++r) {
        const auto& row = rows[r + 1];
        if (trim(cell(row, 0)) != sim.concepts[r]) throw ParseError("similarity CSV rows must follow the header order");
        for (std::size_t c = 0; c < n; ++c) {
            const auto v = trim(cell(row, c + 1));
            if (r == c && v.empty()) continue;
            sim.ratings[r][c] = r == c ? 0.0 : to_double(v, "similarity rating");
        }
    }
    try {
        analytics::check_similarity(sim);
    } catch (const InvalidArgument& e) {
        throw ParseError(e.what());
    }
    return sim;
}

std::vector<std::pair<std::string, analytics::TlxResponse>> tlx_from_csv(const std::string& text) {
    const auto rows = parse_csv(text);
    if (rows.empty()) throw ParseError("TLX CSV is empty");
    const auto idx = header_index(rows[0]);
    const auto who = column(idx, "respondent");
    std::vector<std::pair<std::string, analytics::TlxResponse>> out;
    for (std::size_t r = 1; r < rows.size(); ++r) {
        analytics::TlxResponse resp;
        for (std::size_t s = 0; s < analytics::kTlxScales; ++s) {
            resp.ratings[s] = to_double(cell(rows[r], column(idx, kTlxNames[s])), kTlxNames[s]);
            resp.wins[s] = to_int(cell(rows[r], column(idx, std::string("w_") + kTlxNames[s])), "pairwise wins");
        }
        out.emplace_back(trim(cell(rows[r], who)), resp);
    }
    return out;
}

std::vector<std::pair<std::string, analytics::TrustResponse>> trust_from_csv(const std::string& text) {
    const auto rows = parse_csv(text);
    if (rows.empty()) throw ParseError("trust CSV is empty");
    const auto idx = header_index(rows[0]);
    const auto who = column(idx, "respondent");
    std::vector<std::pair<std::string, analytics::TrustResponse>> out;
    for (std::size_t r = 1; r < rows.size(); ++r) {
        analytics::TrustResponse resp;
        for (std::size_t i = 0; i < analytics::kTrustItems; ++i)
            resp.items[i] = to_int(cell(rows[r], column(idx, "item" + std::to_string(i + 1))), "trust item");
        out.emplace_back(trim(cell(rows[r], who)), resp);
    }
    return out;
}

std::vector<std::pair<double, double>> points_from_csv(const std::string& text) {
    const auto rows = parse_csv(text);
    if (rows.empty()) throw ParseError("trend CSV is empty");
    const auto idx = header_index(rows[0]);
    const auto xc = column(idx, "x");
    const auto yc = column(idx, "y");
    std::vector<std::pair<double, double>> out;
    for (std::size_t r = 1; r < rows.size(); ++r)
        out.emplace_back(to_double(cell(rows[r], xc), "x"), to_double(cell(rows[r], yc), "y"));
    return out;
}

std::vector<analytics::InteractionEvent> interactions_from_csv(const std::string& text) {
    const auto rows = parse_csv(text);
    if (rows.empty()) throw ParseError("interaction CSV is empty");
    const auto idx = header_index(rows[0]);
    const auto ts = column(idx, "timestamp");
    const auto src = column(idx, "source");
    const auto dst = column(idx, "destination");
    const auto dur = column(idx, "durationSeconds");
    const auto kind = column(idx, "kind");
    const auto sg = column(idx, "sourceGroup");
    const auto dg = column(idx, "destGroup");
    const auto sr = column(idx, "sourceRole");
    const auto dr = column(idx, "destRole");
    std::vector<analytics::InteractionEvent> out;
    for (std::size_t r = 1; r < rows.size(); ++r) {
        const auto& row = rows[r];
        analytics::InteractionEvent e;
        e.start_time = to_double(cell(row, ts), "timestamp");
        e.source = trim(cell(row, src));
        e.destination = trim(cell(row, dst));
        e.duration_seconds = to_double(cell(row, dur), "durationSeconds");
        e.kind = analytics::interaction_kind_from_string(trim(cell(row, kind)));
        e.source_group = trim(cell(row, sg));
        e.dest_group = trim(cell(row, dg));
        e.source_role = analytics::role_from_string(trim(cell(row, sr)));
        const auto dest_role = trim(cell(row, dr));
        if (!dest_role.empty()) e.dest_role = analytics::role_from_string(dest_role);
        out.push_back(std::move(e));
    }
    return out;
}

}  // namespace wargame::io
