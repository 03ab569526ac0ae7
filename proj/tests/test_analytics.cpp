#include <doctest.h>

#include <random>
#include <set>

#include "oracles/graph_oracles.hpp"
#include "oracles/ols_oracle.hpp"
#include "wargame/analytics.hpp"
#include "wargame/errors.hpp"

using namespace wargame;
using namespace wargame::analytics;

namespace {

std::set<oracle::Edge> link_set(const PFNet& net) {
    std::set<oracle::Edge> out;
    for (const auto& l : net.links) out.insert({l.a, l.b});
    return out;
}

DistanceMatrix random_matrix(std::mt19937_64& rng, std::size_t n, bool integral) {
    std::uniform_real_distribution<double> u(1, 9);
    DistanceMatrix d(n, std::vector<double>(n, 0));
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = i + 1; j < n; ++j) d[i][j] = d[j][i] = integral ? static_cast<double>(1 + rng() % 9) : u(rng);
    return d;
}

InteractionEvent talk(std::string a, std::string b, double t, double dur, std::string ga = "g", std::string gb = "g") {
    InteractionEvent e;
    e.start_time = t;
    e.source = std::move(a);
    e.destination = std::move(b);
    e.duration_seconds = dur;
    e.kind = InteractionKind::person_person;
    e.source_group = std::move(ga);
    e.dest_group = std::move(gb);
    return e;
}

}  // namespace

TEST_CASE("to_distances") {
    SimilarityMatrix sim{{"a", "b", "c"}, {{0, 9, 1}, {9, 0, 5}, {1, 5, 0}}};
    const auto d = to_distances(sim);
    CHECK(d[0][1] == 1);
    CHECK(d[0][2] == 9);
    CHECK(d[1][2] == d[2][1]);
    CHECK(d[1][1] == 0);
    SimilarityMatrix bad{{"a", "b"}, {{0, 10}, {10, 0}}};
    CHECK_THROWS_AS(to_distances(bad), InvalidArgument);
    SimilarityMatrix asym{{"a", "b"}, {{0, 3}, {4, 0}}};
    CHECK_THROWS_AS(to_distances(asym), InvalidArgument);
}

TEST_CASE("pfnet examples") {
    CHECK(pfnet({{0, 4}, {4, 0}}, 1, kInfinity).links.size() == 1);

    std::mt19937_64 rng(1);
    const auto d = random_matrix(rng, 4, false);
    CHECK(pfnet(d, 1, 2.0).links.size() == 6);

    // a=0 b=1 c=2 d=3
    const DistanceMatrix m{{0, 1, 3, 10}, {1, 0, 1, 10}, {3, 1, 0, 10}, {10, 10, 10, 0}};
    const auto net = pfnet(m, 3, kInfinity);
    CHECK(link_set(net) == std::set<oracle::Edge>{{0, 1}, {1, 2}, {0, 3}, {1, 3}, {2, 3}});
    CHECK_FALSE(net.has_link(0, 2));
    CHECK(link_set(net) == oracle::pathfinder_links(m, 3, kInfinity));

    CHECK_THROWS_AS(pfnet(m, 0, 1), InvalidArgument);
    CHECK_THROWS_AS(pfnet(m, 4, 1), InvalidArgument);
    CHECK_THROWS_AS(pfnet(m, 2, 0.5), InvalidArgument);
}

TEST_CASE("pfnet against the path and spanning-tree oracles") {
    std::mt19937_64 rng(2024);
    for (int trial = 0; trial < 40; ++trial) {
        const std::size_t n = 3 + rng() % 5;  // up to 7 nodes
        const auto d = random_matrix(rng, n, trial % 2 == 0);
        const int qmax = static_cast<int>(n) - 1;
        for (double r : {1.0, 2.0, 3.5, kInfinity})
            for (int q = 1; q <= qmax; ++q) CHECK(link_set(pfnet(d, q, r)) == oracle::pathfinder_links(d, q, r));
        CHECK(link_set(pfnet(d, qmax, kInfinity)) == oracle::mst_union(d));
    }
}

TEST_CASE("pfnet monotonicity") {
    std::mt19937_64 rng(31);
    auto subset = [](const std::set<oracle::Edge>& a, const std::set<oracle::Edge>& b) {
        return std::includes(b.begin(), b.end(), a.begin(), a.end());
    };
    for (int trial = 0; trial < 30; ++trial) {
        const auto d = random_matrix(rng, 6, trial % 3 == 0);
        const std::vector<double> rs{1.0, 1.5, 2.0, 4.0, kInfinity};
        for (double r : rs)
            for (int q = 1; q < 5; ++q) CHECK(subset(link_set(pfnet(d, q + 1, r)), link_set(pfnet(d, q, r))));
        for (int q = 1; q <= 5; ++q)
            for (std::size_t k = 0; k + 1 < rs.size(); ++k)
                CHECK(subset(link_set(pfnet(d, q, rs[k + 1])), link_set(pfnet(d, q, rs[k]))));
    }
}

TEST_CASE("net_similarity") {
    PFNet a{{"a", "b", "c", "d"}, {{0, 1, 1}, {1, 2, 1}}, 1, kInfinity};
    PFNet b{{"a", "b", "c", "d"}, {{0, 1, 1}, {2, 3, 1}}, 1, kInfinity};
    PFNet c{{"a", "b", "c", "d"}, {{0, 3, 1}}, 1, kInfinity};
    PFNet e{{"a", "b", "c", "d"}, {}, 1, kInfinity};
    CHECK(net_similarity(a, a) == 1.0);
    CHECK(net_similarity(a, c) == 0.0);
    CHECK(net_similarity(a, b) == doctest::Approx(1.0 / 3));
    CHECK(net_similarity(b, a) == net_similarity(a, b));
    CHECK(net_similarity(e, e) == 1.0);
    PFNet other{{"x", "y", "z", "w"}, {}, 1, kInfinity};
    CHECK_THROWS_AS(net_similarity(a, other), InvalidArgument);
}

TEST_CASE("trend") {
    const auto line = trend({{1, .2}, {2, .4}, {3, .6}});
    CHECK(line.slope == doctest::Approx(0.2));
    CHECK(std::fabs(line.r_squared - 1) < 1e-9);

    const auto flat = trend({{1, 3}, {2, 3}, {3, 3}, {4, 3}});
    CHECK(flat.slope == 0);
    CHECK(flat.r_squared == 0);
    CHECK(flat.p_value == 1);

    const std::vector<std::pair<double, double>> hand{{1, 1}, {2, 2}, {3, 2}, {4, 3}};
    const auto got = trend(hand);
    const auto want = oracle::ols(hand);
    CHECK(got.slope == doctest::Approx(want.slope).epsilon(1e-9));
    CHECK(got.intercept == doctest::Approx(want.intercept).epsilon(1e-9));
    CHECK(got.r_squared == doctest::Approx(want.r_squared).epsilon(1e-9));
    CHECK(got.statistic == doctest::Approx(want.t).epsilon(1e-9));
    CHECK(got.p_value == doctest::Approx(want.p_df2).epsilon(1e-9));
    CHECK(got.df == 2);

    CHECK_THROWS_AS(trend({{1, 1}, {2, 2}}), InvalidArgument);
    CHECK_THROWS_AS(trend({{1, 1}, {1, 2}, {1, 3}}), InvalidArgument);
}

TEST_CASE("tlx_score") {
    TlxResponse r{{50, 50, 50, 50, 50, 50}, {3, 3, 3, 2, 2, 2}};
    CHECK(tlx_score(r) == doctest::Approx(50));
    TlxResponse w{{100, 80, 60, 40, 20, 0}, {5, 4, 3, 2, 1, 0}};
    CHECK(std::fabs(tlx_score(w) - 1100.0 / 15) < 1e-9);
    TlxResponse d{{30, 90, 90, 90, 90, 90}, {15, 0, 0, 0, 0, 0}};
    CHECK(tlx_score(d) == doctest::Approx(30));
    TlxResponse bad_sum{{50, 50, 50, 50, 50, 50}, {5, 5, 5, 1, 0, 0}};
    CHECK_THROWS_AS(tlx_score(bad_sum), InvalidArgument);
    TlxResponse bad_rating{{101, 50, 50, 50, 50, 50}, {5, 4, 3, 2, 1, 0}};
    CHECK_THROWS_AS(tlx_score(bad_rating), InvalidArgument);
}

TEST_CASE("sna_metrics path graph and groups") {
    const auto m = sna_metrics({talk("a", "b", 0, 10), talk("b", "c", 5, 20)}, {});
    CHECK(m.density == doctest::Approx(2.0 / 3));
    CHECK(m.betweenness.at("b") == 1);
    CHECK(m.betweenness.at("a") == 0);
    CHECK(m.weighted_degree.at("b") == 30);

    CHECK(sna_metrics({talk("a", "b", 0, 10, "x", "x")}, {}).cross_group_fraction == 0);
    CHECK(sna_metrics({talk("a", "b", 0, 10, "x", "y")}, {}).cross_group_fraction == 1);

    const auto windowed = sna_metrics({talk("a", "b", 0, 10), talk("b", "c", 50, 20)}, {0, 50});
    CHECK(windowed.actors == std::vector<std::string>{"a", "b"});
    CHECK(windowed.density == 1);

    auto tool = talk("a", "console", 1, 5);
    tool.kind = InteractionKind::person_tool;
    CHECK(sna_metrics({tool}, {}).actors.empty());
}

TEST_CASE("sna betweenness against path enumeration") {
    std::mt19937_64 rng(55);
    for (int trial = 0; trial < 30; ++trial) {
        const std::size_t n = 3 + rng() % 5;
        std::set<oracle::Edge> edges;
        std::vector<InteractionEvent> events;
        for (std::size_t i = 0; i < n; ++i)
            for (std::size_t j = i + 1; j < n; ++j)
                if (rng() % 2) {
                    edges.insert({i, j});
                    events.push_back(talk("v" + std::to_string(i), "v" + std::to_string(j), 0, 1));
                }
        if (events.empty()) continue;
        const auto m = sna_metrics(events, {});
        // Oracle over actors that appear (isolated vertices carry no paths).
        std::vector<std::size_t> present;
        for (std::size_t i = 0; i < n; ++i)
            if (m.betweenness.count("v" + std::to_string(i))) present.push_back(i);
        const auto bc = oracle::betweenness(n, edges);
        for (auto i : present) CHECK(m.betweenness.at("v" + std::to_string(i)) == doctest::Approx(bc[i]).epsilon(1e-12));
        const double k = static_cast<double>(present.size());
        CHECK(m.density == doctest::Approx(static_cast<double>(edges.size()) / (k * (k - 1) / 2)));
    }
}

TEST_CASE("support reliance trend") {
    auto make = [](double t, double tool_secs, double talk_secs) {
        std::vector<InteractionEvent> ev;
        auto tool = talk("p", "console", t, tool_secs);
        tool.kind = InteractionKind::person_tool;
        ev.push_back(tool);
        ev.push_back(talk("p", "q", t + 1, talk_secs));
        return ev;
    };
    std::vector<InteractionEvent> all;
    for (auto [t, tool, other] : std::vector<std::tuple<double, double, double>>{{0, 60, 40}, {100, 40, 60}, {200, 20, 80}}) {
        const auto ev = make(t, tool, other);
        all.insert(all.end(), ev.begin(), ev.end());
    }
    const auto tr = support_reliance_trend(all, {{0, 100}, {100, 200}, {200, 300}});
    CHECK(tr.fractions[0] == doctest::Approx(0.6));
    CHECK(tr.stat.slope < 0);
    CHECK(tr.stat.r_squared == doctest::Approx(1));

    const auto none = support_reliance_trend({talk("a", "b", 0, 1), talk("a", "b", 150, 1), talk("a", "b", 250, 1)},
                                             {{0, 100}, {100, 200}, {200, 300}});
    CHECK(none.fractions == std::vector<double>{0, 0, 0});
    CHECK(none.stat.slope == 0);

    auto sup = talk("s", "a", 10, 30);
    sup.source_role = Role::support;
    CHECK(support_reliance({sup, talk("a", "b", 20, 70)}, {}) == doctest::Approx(0.3));
}

TEST_CASE("trust_score and paired_t") {
    TrustResponse r;
    r.items.fill(4);
    r.items[6] = 7;
    TrustMask mask{};
    CHECK(trust_score(r, mask) == doctest::Approx((12 * 4 + 7) / 13.0));
    mask[6] = true;
    CHECK(trust_score(r, mask) == doctest::Approx((12 * 4 + 1) / 13.0));
    r.items[0] = 0;
    CHECK_THROWS_AS(trust_score(r, mask), InvalidArgument);

    const auto same = paired_t({3, 4, 5}, {3, 4, 5});
    CHECK(same.statistic == 0);
    CHECK(same.p_value == 1);

    // Differences {1, 2, 3}: mean 2, sd 1, t = 2 / (1 / sqrt 3), df 2.
    const auto pt = paired_t({2, 4, 6}, {1, 2, 3});
    CHECK(pt.statistic == doctest::Approx(2 * std::sqrt(3.0)));
    CHECK(pt.df == 2);
    CHECK(pt.p_value == doctest::Approx(1 - pt.statistic / std::sqrt(2 + pt.statistic * pt.statistic)));
    CHECK_THROWS_AS(paired_t({1, 2}, {1}), InvalidArgument);
}
