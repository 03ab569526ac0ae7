#pragma once

// File formats. JSON documents carry a schemaVersion and are dumped with
// sorted keys, so equal values always serialise to identical bytes.

#include <filesystem>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "wargame/analytics.hpp"
#include "wargame/coa.hpp"
#include "wargame/findings.hpp"
#include "wargame/model.hpp"
#include "wargame/plan.hpp"
#include "wargame/sim.hpp"

namespace wargame::io {

using json = nlohmann::json;

inline constexpr int kSchemaVersion = 1;

/// Pretty, key-sorted, newline-terminated.
std::string dump(const json& j);
/// Compact form used for content hashes.
std::string dump_compact(const json& j);
/// Lowercase hex SHA-256 of the compact form.
std::string content_hash(const json& j);
std::string sha256_hex(const std::string& bytes);

json read_json_file(const std::filesystem::path& path);
std::string read_text_file(const std::filesystem::path& path);
void write_text_file(const std::filesystem::path& path, const std::string& text);

/// Throws ParseError when the document's schemaVersion is missing or unsupported.
void check_schema(const json& j, const char* what);

json to_json(const ComponentTemplate& t);
ComponentTemplate template_from_json(const json& j);
json to_json(const ComponentInstance& inst);
json to_json(const ModelGraph& g);
json to_json(const Scenario& s);
/// Instances referencing unknown templates load with empty parameters so that
/// validate_scenario can report them; malformed documents throw ParseError.
Scenario scenario_from_json(const json& j);

json to_json(const Action& a);
Action action_from_json(const json& j);
json to_json(const Plan& p);
Plan plan_from_json(const json& j);

json to_json(const DesiredEffect& e);
DesiredEffect desired_effect_from_json(const json& j);
json effects_to_json(const std::vector<DesiredEffect>& effects);
std::vector<DesiredEffect> effects_from_json(const json& j);

/// Trajectory values are rounded to 6 decimals.
json to_json(const Trajectory& t);
Trajectory trajectory_from_json(const json& j);
json to_json(const EffectRecord& e);
EffectRecord effect_record_from_json(const json& j);
json to_json(const std::vector<EffectRecord>& effects);

json to_json(const ValidationReport& r);
json to_json(const SyncMatrix& m);
json to_json(const ResourceProfile& p);
json to_json(const DuplicateReport& r);
json to_json(const CoaScore& s);
json to_json(const RobustnessResult& r);
json to_json(const ProgressReport& r);
std::vector<Observation> observations_from_json(const json& j);

json to_json(const analytics::PFNet& net);
json to_json(const analytics::StatResult& s);
json to_json(const analytics::SnaMetrics& m);
analytics::InteractionEvent interaction_from_json(const json& j);
analytics::TimeWindow window_from_json(const json& j);
/// Accepts a number or the strings "inf" / "infinity".
double parse_r(const json& j);
double parse_r(const std::string& s);

/// Minimal RFC 4180 reader: comma separated, optional double quotes.
std::vector<std::vector<std::string>> parse_csv(const std::string& text);
std::string csv_escape(const std::string& field);

/// CSV with a `concept` column followed by one column per concept.
analytics::SimilarityMatrix similarity_from_csv(const std::string& text);
/// Columns: respondent, mental, physical, temporal, performance, effort,
/// frustration, then w_<scale> for the six pairwise-win counts.
std::vector<std::pair<std::string, analytics::TlxResponse>> tlx_from_csv(const std::string& text);
/// Columns: respondent, item1 .. item13.
std::vector<std::pair<std::string, analytics::TrustResponse>> trust_from_csv(const std::string& text);
/// Columns: x, y.
std::vector<std::pair<double, double>> points_from_csv(const std::string& text);
/// Columns: timestamp, source, destination, durationSeconds, kind,
/// sourceGroup, destGroup, sourceRole, destRole.
std::vector<analytics::InteractionEvent> interactions_from_csv(const std::string& text);

}  // namespace wargame::io
