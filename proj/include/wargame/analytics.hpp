#pragma once

// Team-assessment measurement pipelines: Pathfinder networks over concept
// similarity ratings, knowledge-similarity trends, NASA-TLX workload,
// interaction-network metrics and trust scoring.

#include <array>
#include <limits>
#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

namespace wargame::analytics {

inline constexpr double kInfinity = std::numeric_limits<double>::infinity();
inline constexpr int kRatingMin = 1;
inline constexpr int kRatingMax = 9;

using DistanceMatrix = std::vector<std::vector<double>>;

struct SimilarityMatrix {
    std::vector<std::string> concepts;
    std::vector<std::vector<double>> ratings;  // symmetric, 1..9 off-diagonal; diagonal ignored
};

/// Throws InvalidArgument unless n >= 2, square, symmetric and in scale.
void check_similarity(const SimilarityMatrix& sim);

/// d(i,j) = 10 - rating(i,j); diagonal 0.
DistanceMatrix to_distances(const SimilarityMatrix& sim);

struct Link {
    std::size_t a = 0;  // a < b
    std::size_t b = 0;
    double weight = 0.0;
    friend bool operator==(const Link&, const Link&) = default;
};

struct PFNet {
    std::vector<std::string> nodes;
    std::vector<Link> links;  // lexicographic (a, b)
    int q = 1;
    double r = kInfinity;

    [[nodiscard]] bool has_link(std::size_t a, std::size_t b) const;
};

/// Exact Pathfinder network PFNET(q, r). A pair is linked iff its distance is
/// no greater than the minimum Minkowski-r weight over all paths of at most q
/// links. Infinite entries mean "no direct link". Throws InvalidArgument for
/// q outside [1, n-1], r < 1, or a malformed matrix.
PFNet pfnet(const DistanceMatrix& d, int q, double r, std::vector<std::string> nodes = {});

/// Jaccard index of the two link sets (1 when both empty). Node sets must match.
double net_similarity(const PFNet& a, const PFNet& b);

struct StatResult {
    double statistic = 0.0;  // t
    double slope = 0.0;      // OLS slope, or mean difference for paired t
    double intercept = 0.0;
    double r_squared = 0.0;
    double p_value = 1.0;    // two-sided
    int n = 0;
    int df = 0;
};

/// Two-sided p-value for a t statistic with `df` degrees of freedom.
double two_sided_p(double t, int df);

/// Ordinary least squares y = intercept + slope x with a two-sided t-test on
/// the slope (n-2 df). Needs n >= 3 and at least two distinct x values.
StatResult trend(const std::vector<std::pair<double, double>>& points);

inline constexpr std::size_t kTlxScales = 6;
inline constexpr int kTlxComparisons = 15;

/// mental, physical, temporal, performance, effort, frustration
struct TlxResponse {
    std::array<double, kTlxScales> ratings{};
    std::array<int, kTlxScales> wins{};
};

/// Weighted workload: Σ rating_i * wins_i / 15.
double tlx_score(const TlxResponse& resp);

enum class InteractionKind { person_person, person_tool };
enum class Role { planner, leader, support };

struct InteractionEvent {
    double start_time = 0.0;
    std::string source;
    std::string destination;
    double duration_seconds = 0.0;
    InteractionKind kind = InteractionKind::person_person;
    std::string source_group;
    std::string dest_group;
    Role source_role = Role::planner;
    Role dest_role = Role::planner;
};

/// Half-open [begin, end) over event start times.
struct TimeWindow {
    double begin = -kInfinity;
    double end = kInfinity;
    [[nodiscard]] bool contains(double t) const { return t >= begin && t < end; }
};

struct SnaMetrics {
    std::vector<std::string> actors;  // sorted
    std::size_t edge_count = 0;
    double density = 0.0;
    std::map<std::string, double> weighted_degree;
    std::map<std::string, double> betweenness;  // unnormalised, unit edge lengths
    double cross_group_fraction = 0.0;
    double total_weight = 0.0;
};

/// Network over person-person events starting inside the window.
SnaMetrics sna_metrics(const std::vector<InteractionEvent>& events, const TimeWindow& window);

/// Brandes betweenness on an undirected unweighted graph given as adjacency lists.
std::vector<double> betweenness(const std::vector<std::vector<std::size_t>>& adjacency);

/// Share of interaction time in the window that is person-tool or involves a
/// support-role actor; 0 when the window holds no interactions.
double support_reliance(const std::vector<InteractionEvent>& events, const TimeWindow& window);

struct RelianceTrend {
    std::vector<double> fractions;
    StatResult stat;
};

RelianceTrend support_reliance_trend(const std::vector<InteractionEvent>& events, const std::vector<TimeWindow>& windows);

inline constexpr std::size_t kTrustItems = 13;
inline constexpr int kTrustMin = 1;
inline constexpr int kTrustMax = 7;

struct TrustResponse {
    std::array<int, kTrustItems> items{};
};

using TrustMask = std::array<bool, kTrustItems>;

/// Mean item score after reverse-coding flagged items (item -> 8 - item).
double trust_score(const TrustResponse& resp, const TrustMask& reverse_coded);

/// Paired t-test on a - b. `slope` holds the mean difference and r_squared the
/// effect size t^2 / (t^2 + df).
StatResult paired_t(const std::vector<double>& a, const std::vector<double>& b);

const char* to_string(InteractionKind k);
const char* to_string(Role r);
InteractionKind interaction_kind_from_string(const std::string& s);
Role role_from_string(const std::string& s);

}  // namespace wargame::analytics
