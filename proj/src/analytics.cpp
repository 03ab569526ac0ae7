#include "wargame/analytics.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <set>

#include <boost/math/distributions/students_t.hpp>

#include "wargame/errors.hpp"

namespace wargame::analytics {
namespace {

void check_distances(const DistanceMatrix& d) {
    const auto n = d.size();
    if (n < 2) throw InvalidArgument("distance matrix needs at least 2 nodes");
    for (const auto& row : d)
        if (row.size() != n) throw InvalidArgument("distance matrix must be square");
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j) {
            if (i == j) continue;
            const double v = d[i][j];
            if (std::isnan(v) || !(v > 0)) throw InvalidArgument("off-diagonal distances must be positive");
            if (v != d[j][i]) throw InvalidArgument("distance matrix must be symmetric");
        }
}

// Path weight in "cost space": w^r summed for finite r, max for r = inf.
// Comparing costs avoids the final 1/r power, which keeps ties exact.
struct MinkowskiCost {
    double r;
    [[nodiscard]] double lift(double w) const { return std::isinf(r) ? w : std::pow(w, r); }
    [[nodiscard]] double combine(double a, double b) const { return std::isinf(r) ? std::max(a, b) : a + b; }
};

}  // namespace

void check_similarity(const SimilarityMatrix& sim) {
    const auto n = sim.concepts.size();
    if (n < 2) throw InvalidArgument("similarity matrix needs at least 2 concepts");
    if (sim.ratings.size() != n) throw InvalidArgument("ratings must be n x n");
    for (const auto& row : sim.ratings)
        if (row.size() != n) throw InvalidArgument("ratings must be n x n");
    if (std::set<std::string>(sim.concepts.begin(), sim.concepts.end()).size() != n)
        throw InvalidArgument("concept names must be distinct");
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j) {
            if (i == j) continue;
            const double v = sim.ratings[i][j];
            if (!(v >= kRatingMin && v <= kRatingMax)) throw InvalidArgument("ratings must lie in [1, 9]");
            if (v != sim.ratings[j][i]) throw InvalidArgument("ratings must be symmetric");
        }
}

DistanceMatrix to_distances(const SimilarityMatrix& sim) {
    check_similarity(sim);
    const auto n = sim.concepts.size();
    DistanceMatrix d(n, std::vector<double>(n, 0.0));
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j)
            if (i != j) d[i][j] = (kRatingMax + 1) - sim.ratings[i][j];
    return d;
}

bool PFNet::has_link(std::size_t a, std::size_t b) const {
    if (a > b) std::swap(a, b);
    return std::any_of(links.begin(), links.end(), [&](const Link& l) { return l.a == a && l.b == b; });
}

PFNet pfnet(const DistanceMatrix& d, int q, double r, std::vector<std::string> nodes) {
    check_distances(d);
    const auto n = d.size();
    if (q < 1 || static_cast<std::size_t>(q) > n - 1) throw InvalidArgument("q must lie in [1, n-1]");
    if (std::isnan(r) || r < 1) throw InvalidArgument("r must be >= 1 or infinite");
    if (nodes.empty())
        for (std::size_t i = 0; i < n; ++i) nodes.push_back(std::to_string(i));
    if (nodes.size() != n) throw InvalidArgument("node names must match matrix size");

    const MinkowskiCost cost{r};
    DistanceMatrix direct(n, std::vector<double>(n, kInfinity));
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j)
            if (i != j) direct[i][j] = cost.lift(d[i][j]);

    // best[i][j] = min cost over paths of at most k links.
    auto best = direct;
    for (int k = 2; k <= q; ++k) {
        auto next = best;
        for (std::size_t i = 0; i < n; ++i)
            for (std::size_t m = 0; m < n; ++m) {
                if (m == i || std::isinf(best[i][m])) continue;
                for (std::size_t j = 0; j < n; ++j) {
                    if (j == i || j == m) continue;
                    const double via = cost.combine(best[i][m], direct[m][j]);
                    if (via < next[i][j]) next[i][j] = via;
                }
            }
        best = std::move(next);
    }

    PFNet net;
    net.nodes = std::move(nodes);
    net.q = q;
    net.r = r;
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = i + 1; j < n; ++j)
            if (std::isfinite(d[i][j]) && direct[i][j] <= best[i][j]) net.links.push_back({i, j, d[i][j]});
    return net;
}

double net_similarity(const PFNet& a, const PFNet& b) {
    if (std::set<std::string>(a.nodes.begin(), a.nodes.end()) != std::set<std::string>(b.nodes.begin(), b.nodes.end()) ||
        a.nodes.size() != b.nodes.size())
        throw InvalidArgument("networks are defined over different node sets");
    auto named = [](const PFNet& net) {
        std::set<std::pair<std::string, std::string>> s;
        for (const auto& l : net.links) {
            auto x = net.nodes[l.a];
            auto y = net.nodes[l.b];
            if (y < x) std::swap(x, y);
            s.emplace(x, y);
        }
        return s;
    };
    const auto la = named(a);
    const auto lb = named(b);
    if (la.empty() && lb.empty()) return 1.0;
    std::size_t common = 0;
    for (const auto& l : la) common += lb.contains(l) ? 1 : 0;
    return static_cast<double>(common) / static_cast<double>(la.size() + lb.size() - common);
}

double two_sided_p(double t, int df) {
    if (df < 1) throw InvalidArgument("degrees of freedom must be >= 1");
    if (std::isnan(t)) return 1.0;
    if (std::isinf(t)) return 0.0;
    const boost::math::students_t dist(df);
    return std::clamp(2.0 * boost::math::cdf(boost::math::complement(dist, std::fabs(t))), 0.0, 1.0);
}

StatResult trend(const std::vector<std::pair<double, double>>& points) {
    const auto n = points.size();
    if (n < 3) throw InvalidArgument("trend needs at least 3 points");
    double mx = 0, my = 0;
    for (const auto& [x, y] : points) {
        if (!std::isfinite(x) || !std::isfinite(y)) throw InvalidArgument("trend points must be finite");
        mx += x;
        my += y;
    }
    mx /= static_cast<double>(n);
    my /= static_cast<double>(n);
    double sxx = 0, sxy = 0, syy = 0;
    for (const auto& [x, y] : points) {
        sxx += (x - mx) * (x - mx);
        sxy += (x - mx) * (y - my);
        syy += (y - my) * (y - my);
    }
    if (!(sxx > 0)) throw InvalidArgument("trend needs at least two distinct x values");

    StatResult s;
    s.n = static_cast<int>(n);
    s.df = s.n - 2;
    s.slope = sxy / sxx;
    s.intercept = my - s.slope * mx;
    double sse = 0;
    for (const auto& [x, y] : points) {
        const double e = y - (s.intercept + s.slope * x);
        sse += e * e;
    }
    s.r_squared = syy > 0 ? std::clamp(1.0 - sse / syy, 0.0, 1.0) : 0.0;
    const double se = std::sqrt(sse / s.df / sxx);
    if (se > 0) {
        s.statistic = s.slope / se;
    } else {
        s.statistic = s.slope == 0 ? 0.0 : std::copysign(kInfinity, s.slope);
    }
    s.p_value = two_sided_p(s.statistic, s.df);
    return s;
}

double tlx_score(const TlxResponse& resp) {
    int total = 0;
    for (std::size_t i = 0; i < kTlxScales; ++i) {
        if (!(resp.ratings[i] >= 0 && resp.ratings[i] <= 100)) throw InvalidArgument("TLX ratings must lie in [0, 100]");
        if (resp.wins[i] < 0) throw InvalidArgument("TLX pairwise wins must be >= 0");
        total += resp.wins[i];
    }
    if (total != kTlxComparisons) throw InvalidArgument("TLX pairwise wins must sum to 15");
    double acc = 0;
    for (std::size_t i = 0; i < kTlxScales; ++i) acc += resp.ratings[i] * resp.wins[i];
    return acc / kTlxComparisons;
}

std::vector<double> betweenness(const std::vector<std::vector<std::size_t>>& adjacency) {
    const auto n = adjacency.size();
    std::vector<double> cb(n, 0.0);
    std::vector<std::vector<std::size_t>> preds(n);
    std::vector<double> sigma(n), delta(n);
    std::vector<long> dist(n);
    std::vector<std::size_t> order, queue;
    for (std::size_t s = 0; s < n; ++s) {
        for (auto& p : preds) p.clear();
        std::fill(sigma.begin(), sigma.end(), 0.0);
        std::fill(delta.begin(), delta.end(), 0.0);
        std::fill(dist.begin(), dist.end(), -1);
        order.clear();
        queue.assign(1, s);
        sigma[s] = 1;
        dist[s] = 0;
        for (std::size_t head = 0; head < queue.size(); ++head) {
            const auto v = queue[head];
            order.push_back(v);
            for (auto w : adjacency[v]) {
                if (dist[w] < 0) {
                    dist[w] = dist[v] + 1;
                    queue.push_back(w);
                }
                if (dist[w] == dist[v] + 1) {
                    sigma[w] += sigma[v];
                    preds[w].push_back(v);
                }
            }
        }
        for (auto it = order.rbegin(); it != order.rend(); ++it) {
            const auto w = *it;
            for (auto v : preds[w]) delta[v] += sigma[v] / sigma[w] * (1.0 + delta[w]);
            if (w != s) cb[w] += delta[w];
        }
    }
    for (auto& v : cb) v /= 2.0;  // each unordered pair was counted from both ends
    return cb;
}

SnaMetrics sna_metrics(const std::vector<InteractionEvent>& events, const TimeWindow& window) {
    SnaMetrics m;
    std::map<std::pair<std::string, std::string>, double> edges;
    std::set<std::string> actors;
    double cross = 0;
    for (const auto& e : events) {
        if (!(e.duration_seconds >= 0)) throw InvalidArgument("interaction duration must be >= 0");
        if (e.source == e.destination) throw InvalidArgument("interaction source and destination must differ");
        if (e.kind != InteractionKind::person_person || !window.contains(e.start_time)) continue;
        auto key = std::minmax(e.source, e.destination);
        edges[{key.first, key.second}] += e.duration_seconds;
        actors.insert(e.source);
        actors.insert(e.destination);
        m.total_weight += e.duration_seconds;
        if (e.source_group != e.dest_group) cross += e.duration_seconds;
    }
    m.actors.assign(actors.begin(), actors.end());
    m.edge_count = edges.size();
    const auto n = m.actors.size();
    m.density = n < 2 ? 0.0 : static_cast<double>(edges.size()) / (static_cast<double>(n) * (n - 1) / 2.0);
    m.cross_group_fraction = m.total_weight > 0 ? cross / m.total_weight : 0.0;

    std::map<std::string, std::size_t> index;
    for (std::size_t i = 0; i < n; ++i) {
        index.emplace(m.actors[i], i);
        m.weighted_degree[m.actors[i]] = 0.0;
    }
    std::vector<std::vector<std::size_t>> adj(n);
    for (const auto& [pair, w] : edges) {
        m.weighted_degree[pair.first] += w;
        m.weighted_degree[pair.second] += w;
        const auto a = index[pair.first];
        const auto b = index[pair.second];
        adj[a].push_back(b);
        adj[b].push_back(a);
    }
    const auto bc = betweenness(adj);
    for (std::size_t i = 0; i < n; ++i) m.betweenness[m.actors[i]] = bc[i];
    return m;
}

double support_reliance(const std::vector<InteractionEvent>& events, const TimeWindow& window) {
    double total = 0, support = 0;
    for (const auto& e : events) {
        if (!(e.duration_seconds >= 0)) throw InvalidArgument("interaction duration must be >= 0");
        if (!window.contains(e.start_time)) continue;
        total += e.duration_seconds;
        const bool tool = e.kind == InteractionKind::person_tool;
        const bool involves_support =
            e.source_role == Role::support || (e.kind == InteractionKind::person_person && e.dest_role == Role::support);
        if (tool || involves_support) support += e.duration_seconds;
    }
    return total > 0 ? support / total : 0.0;
}

RelianceTrend support_reliance_trend(const std::vector<InteractionEvent>& events, const std::vector<TimeWindow>& windows) {
    if (windows.size() < 3) throw InvalidArgument("reliance trend needs at least 3 windows");
    RelianceTrend out;
    std::vector<std::pair<double, double>> pts;
    for (std::size_t i = 0; i < windows.size(); ++i) {
        out.fractions.push_back(support_reliance(events, windows[i]));
        pts.emplace_back(static_cast<double>(i), out.fractions.back());
    }
    out.stat = trend(pts);
    return out;
}

double trust_score(const TrustResponse& resp, const TrustMask& reverse_coded) {
    double acc = 0;
    for (std::size_t i = 0; i < kTrustItems; ++i) {
        const int v = resp.items[i];
        if (v < kTrustMin || v > kTrustMax) throw InvalidArgument("trust items must lie in [1, 7]");
        acc += reverse_coded[i] ? (kTrustMax + 1 - v) : v;
    }
    return acc / static_cast<double>(kTrustItems);
}

StatResult paired_t(const std::vector<double>& a, const std::vector<double>& b) {
    if (a.size() != b.size()) throw InvalidArgument("paired samples differ in length");
    if (a.size() < 2) throw InvalidArgument("paired t needs at least 2 pairs");
    const auto n = a.size();
    std::vector<double> diff(n);
    for (std::size_t i = 0; i < n; ++i) diff[i] = a[i] - b[i];
    const double mean = std::accumulate(diff.begin(), diff.end(), 0.0) / static_cast<double>(n);
    double ss = 0;
    for (double d : diff) ss += (d - mean) * (d - mean);
    const double sd = std::sqrt(ss / static_cast<double>(n - 1));

    StatResult s;
    s.n = static_cast<int>(n);
    s.df = s.n - 1;
    s.slope = mean;
    if (sd > 0) {
        s.statistic = mean / (sd / std::sqrt(static_cast<double>(n)));
    } else {
        s.statistic = mean == 0 ? 0.0 : std::copysign(kInfinity, mean);
    }
    s.p_value = two_sided_p(s.statistic, s.df);
    const double t2 = s.statistic * s.statistic;
    s.r_squared = std::isinf(t2) ? 1.0 : t2 / (t2 + s.df);
    return s;
}

const char* to_string(InteractionKind k) { return k == InteractionKind::person_person ? "person-person" : "person-tool"; }

const char* to_string(Role r) {
    switch (r) {
        case Role::planner: return "planner";
        case Role::leader: return "leader";
        case Role::support: return "support";
    }
    return "planner";
}

InteractionKind interaction_kind_from_string(const std::string& s) {
    if (s == "person-person") return InteractionKind::person_person;
    if (s == "person-tool") return InteractionKind::person_tool;
    throw ParseError("unknown interaction kind '" + s + "'");
}

Role role_from_string(const std::string& s) {
    if (s == "planner") return Role::planner;
    if (s == "leader") return Role::leader;
    if (s == "support") return Role::support;
    throw ParseError("unknown role '" + s + "'");
}

}  // namespace wargame::analytics
