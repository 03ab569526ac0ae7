#include "wargame/plan.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <sstream>

#include "wargame/errors.hpp"

namespace wargame {
namespace {

std::string fmt_amount(double v) {
    std::ostringstream os;
    os << v;
    return os.str();
}

// Tarjan's strongly connected components over the dependency relation.
// Returns components that contain a cycle (size > 1, or a self-dependency).
std::vector<std::vector<std::string>> dependency_cycles(const Plan& plan) {
    std::map<std::string, std::size_t> index_of;
    for (std::size_t i = 0; i < plan.actions.size(); ++i) index_of.emplace(plan.actions[i].id, i);

    const std::size_t n = plan.actions.size();
    std::vector<std::vector<std::size_t>> adj(n);
    std::vector<bool> self_loop(n, false);
    for (std::size_t i = 0; i < n; ++i)
        for (const auto& dep : plan.actions[i].dependencies) {
            auto it = index_of.find(dep);
            if (it == index_of.end()) continue;
            adj[i].push_back(it->second);
            if (it->second == i) self_loop[i] = true;
        }

    constexpr std::size_t unvisited = static_cast<std::size_t>(-1);
    std::vector<std::size_t> idx(n, unvisited), low(n, 0);
    std::vector<bool> on_stack(n, false);
    std::vector<std::size_t> stack;
    std::size_t counter = 0;
    std::vector<std::vector<std::string>> cycles;

    std::function<void(std::size_t)> connect = [&](std::size_t v) {
        idx[v] = low[v] = counter++;
        stack.push_back(v);
        on_stack[v] = true;
        for (auto w : adj[v]) {
            if (idx[w] == unvisited) {
                connect(w);
                low[v] = std::min(low[v], low[w]);
            } else if (on_stack[w]) {
                low[v] = std::min(low[v], idx[w]);
            }
        }
        if (low[v] == idx[v]) {
            std::vector<std::string> comp;
            std::size_t w = 0;
            do {
                w = stack.back();
                stack.pop_back();
                on_stack[w] = false;
                comp.push_back(plan.actions[w].id);
            } while (w != v);
            if (comp.size() > 1 || self_loop[v]) {
                std::sort(comp.begin(), comp.end());
                cycles.push_back(std::move(comp));
            }
        }
    };
    for (std::size_t v = 0; v < n; ++v)
        if (idx[v] == unvisited) connect(v);
    return cycles;
}

bool windows_overlap(const Action& a, const Action& b) {
    return a.start_tick < b.end_tick() && b.start_tick < a.end_tick();
}

}  // namespace

const Action* Plan::find_action(const std::string& action_id) const {
    for (const auto& a : actions)
        if (a.id == action_id) return &a;
    return nullptr;
}

const ResourcePool* Plan::find_pool(const std::string& pool_id) const {
    for (const auto& p : pools)
        if (p.id == pool_id) return &p;
    return nullptr;
}

void Plan::sort_actions() {
    std::stable_sort(actions.begin(), actions.end(), [](const Action& a, const Action& b) {
        return std::tie(a.start_tick, a.id) < std::tie(b.start_tick, b.id);
    });
}

std::map<std::string, double> planned_spend(const Plan& plan) {
    std::map<std::string, double> spend;
    for (const auto& a : plan.actions)
        if (a.resource) spend[a.resource->pool] += a.resource->rate_per_tick * a.duration_ticks;
    return spend;
}

ValidationReport validate_plan(const Plan& plan) {
    ValidationReport report;

    if (plan.horizon_ticks < 0) report.error("invalid-horizon", plan.id, "horizon must be nonnegative");

    std::set<std::string> loes;
    for (const auto& loe : plan.lines_of_effort)
        if (!loes.insert(loe.name).second) report.error("duplicate-loe", loe.name, "line of effort declared twice");

    std::set<std::string> pool_ids;
    for (const auto& pool : plan.pools) {
        if (!pool_ids.insert(pool.id).second) report.error("duplicate-pool", pool.id, "pool declared twice");
        if (!(pool.budget >= 0) || !std::isfinite(pool.budget))
            report.error("negative-budget", pool.id, "budget must be a finite value >= 0");
    }

    std::set<std::string> action_ids;
    for (const auto& a : plan.actions) {
        if (!action_ids.insert(a.id).second) report.error("duplicate-action", a.id, "action id appears more than once");
        if (a.duration_ticks < 1) report.error("invalid-duration", a.id, "duration must be >= 1 tick");
        if (a.start_tick < 0) report.error("invalid-start", a.id, "start tick must be >= 0");
        if (!std::isfinite(a.intensity)) report.error("non-finite-intensity", a.id, "intensity must be finite");
        if (!loes.contains(a.line_of_effort))
            report.error("unknown-loe", a.id, "line of effort '" + a.line_of_effort + "' is not declared");
        if (a.resource) {
            if (!(a.resource->rate_per_tick >= 0) || !std::isfinite(a.resource->rate_per_tick))
                report.error("negative-rate", a.id, "resource rate must be a finite value >= 0");
            if (!pool_ids.contains(a.resource->pool))
                report.error("unknown-pool", a.id, "resource pool '" + a.resource->pool + "' is not declared");
        }
        if (a.end_tick() > plan.horizon_ticks) {
            std::ostringstream os;
            os << "action ends at tick " << a.end_tick() << " beyond horizon " << plan.horizon_ticks;
            report.error("horizon-exceeded", a.id, os.str());
        }
    }

    // Ordering between members of one cycle is reported as the cycle only.
    const auto cycles = dependency_cycles(plan);
    std::map<std::string, std::size_t> cycle_of;
    for (std::size_t c = 0; c < cycles.size(); ++c)
        for (const auto& id : cycles[c]) cycle_of[id] = c;
    auto same_cycle = [&](const std::string& x, const std::string& y) {
        auto ix = cycle_of.find(x), iy = cycle_of.find(y);
        return ix != cycle_of.end() && iy != cycle_of.end() && ix->second == iy->second;
    };

    for (const auto& a : plan.actions)
        for (const auto& dep_id : a.dependencies) {
            const auto* dep = plan.find_action(dep_id);
            if (dep == nullptr) {
                report.error("unknown-dependency", a.id, "depends on unknown action '" + dep_id + "'");
                continue;
            }
            if (dep == &a || same_cycle(a.id, dep_id)) continue;
            if (a.start_tick < dep->end_tick()) {
                std::ostringstream os;
                os << "starts at " << a.start_tick << " before dependency '" << dep_id << "' ends at " << dep->end_tick();
                report.error("dependency-order", a.id, os.str());
            }
        }

    for (const auto& cycle : cycles) {
        std::string members;
        for (const auto& id : cycle) members += (members.empty() ? "" : ",") + id;
        report.error("dependency-cycle", members, "actions depend on each other cyclically");
    }

    const auto spend = planned_spend(plan);
    for (const auto& pool : plan.pools) {
        auto it = spend.find(pool.id);
        if (it == spend.end()) continue;
        const double over = it->second - pool.budget;
        if (over > 1e-9 * std::max(1.0, pool.budget))
            report.error("resource-overdraft", pool.id, "planned spend exceeds budget by " + fmt_amount(over));
    }
    return report;
}

ValidationReport validate_plan(const Plan& plan, const ModelGraph& graph) {
    auto report = validate_plan(plan);
    for (const auto& a : plan.actions) {
        const auto* inst = graph.find_instance(a.target.instance);
        if (inst == nullptr || !inst->input_index(a.target.port))
            report.error("unresolvable-target", a.id,
                         "target " + a.target.instance + "." + a.target.port + " is not an input port of graph '" + graph.id + "'");
    }
    return report;
}

DuplicateReport find_duplicates(const Plan& plan) {
    DuplicateReport rep;
    for (std::size_t i = 0; i < plan.actions.size(); ++i)
        for (std::size_t j = i + 1; j < plan.actions.size(); ++j) {
            const auto& a = plan.actions[i];
            const auto& b = plan.actions[j];
            if (a.target == b.target && windows_overlap(a, b)) rep.pairs.push_back({a.id, b.id, a.target});
        }
    return rep;
}

std::pair<Plan, DuplicateReport> merge_plans(const std::vector<Plan>& plans) {
    Plan merged;
    merged.version = 1;
    std::set<std::string> used_ids;
    std::set<std::string> loe_names;

    for (const auto& p : plans) {
        merged.id += (merged.id.empty() ? "" : "+") + p.id;
        if (merged.scenario_id.empty()) merged.scenario_id = p.scenario_id;
        merged.horizon_ticks = std::max(merged.horizon_ticks, p.horizon_ticks);

        for (const auto& loe : p.lines_of_effort)
            if (loe_names.insert(loe.name).second) merged.lines_of_effort.push_back(loe);

        for (const auto& pool : p.pools) {
            if (const auto* existing = merged.find_pool(pool.id)) {
                if (existing->budget != pool.budget)
                    throw InvalidArgument("pool '" + pool.id + "' defined with conflicting budgets");
                continue;
            }
            merged.pools.push_back(pool);
        }

        std::map<std::string, std::string> relabel;
        for (const auto& a : p.actions) {
            std::string fresh = a.id;
            if (used_ids.contains(fresh)) {
                fresh = a.id + "@" + p.id;
                for (int n = 2; used_ids.contains(fresh); ++n) fresh = a.id + "@" + p.id + "#" + std::to_string(n);
            }
            used_ids.insert(fresh);
            relabel[a.id] = fresh;
        }
        for (const auto& a : p.actions) {
            Action copy = a;
            copy.id = relabel[a.id];
            copy.dependencies.clear();
            for (const auto& dep : a.dependencies) {
                auto it = relabel.find(dep);
                copy.dependencies.insert(it == relabel.end() ? dep : it->second);
            }
            merged.actions.push_back(std::move(copy));
        }
    }
    merged.sort_actions();
    auto dups = find_duplicates(merged);
    return {std::move(merged), std::move(dups)};
}

SyncMatrix sync_matrix(const Plan& plan, int bucket_ticks) {
    if (bucket_ticks < 1) throw InvalidArgument("bucket size must be >= 1 tick");
    int span = plan.horizon_ticks;
    for (const auto& a : plan.actions) span = std::max(span, a.end_tick());
    const std::size_t buckets = span <= 0 ? 0 : static_cast<std::size_t>((span + bucket_ticks - 1) / bucket_ticks);

    SyncMatrix m;
    m.bucket_ticks = bucket_ticks;
    std::map<std::string, std::size_t> row_of;
    for (const auto& loe : plan.lines_of_effort) {
        if (row_of.contains(loe.name)) continue;
        row_of.emplace(loe.name, m.rows.size());
        m.rows.push_back(loe.name);
    }
    m.cells.assign(m.rows.size(), std::vector<std::vector<std::string>>(buckets));

    auto ordered = plan.actions;
    std::stable_sort(ordered.begin(), ordered.end(), [](const Action& a, const Action& b) {
        return std::tie(a.start_tick, a.id) < std::tie(b.start_tick, b.id);
    });
    for (const auto& a : ordered) {
        auto row = row_of.find(a.line_of_effort);
        if (row == row_of.end() || a.duration_ticks < 1 || a.end_tick() <= 0) continue;
        const int first = std::max(0, a.start_tick) / bucket_ticks;
        const int last = (a.end_tick() - 1) / bucket_ticks;
        for (int b = first; b <= last && b < static_cast<int>(buckets); ++b) m.cells[row->second][b].push_back(a.id);
    }
    return m;
}

std::string sync_matrix_csv(const SyncMatrix& m) {
    std::ostringstream os;
    os << "lineOfEffort";
    for (std::size_t b = 0; b < m.bucket_count(); ++b) os << ",t" << b * static_cast<std::size_t>(m.bucket_ticks);
    os << '\n';
    for (std::size_t r = 0; r < m.rows.size(); ++r) {
        os << m.rows[r];
        for (const auto& cell : m.cells[r]) {
            os << ',';
            for (std::size_t i = 0; i < cell.size(); ++i) os << (i ? ";" : "") << cell[i];
        }
        os << '\n';
    }
    return os.str();
}

ResourceProfile resource_profile(const Plan& plan) {
    int span = std::max(1, plan.horizon_ticks);
    for (const auto& a : plan.actions) span = std::max(span, a.end_tick());

    ResourceProfile prof;
    std::map<std::string, std::size_t> row_of;
    auto row_for = [&](const std::string& pool) {
        auto [it, inserted] = row_of.emplace(pool, prof.pools.size());
        if (inserted) {
            prof.pools.push_back(pool);
            prof.cumulative.emplace_back(static_cast<std::size_t>(span), 0.0);
        }
        return it->second;
    };
    for (const auto& pool : plan.pools) row_for(pool.id);

    std::vector<std::vector<double>> per_tick(prof.pools.size(), std::vector<double>(span, 0.0));
    for (const auto& a : plan.actions) {
        if (!a.resource) continue;
        const auto r = row_for(a.resource->pool);
        if (r >= per_tick.size()) per_tick.emplace_back(static_cast<std::size_t>(span), 0.0);
        for (int t = std::max(0, a.start_tick); t < a.end_tick(); ++t) per_tick[r][t] += a.resource->rate_per_tick;
    }
    for (std::size_t r = 0; r < prof.pools.size(); ++r) {
        double acc = 0.0;
        for (int t = 0; t < span; ++t) {
            acc += per_tick[r][t];
            prof.cumulative[r][t] = acc;
        }
    }
    return prof;
}

const char* to_string(Instrument i) {
    switch (i) {
        case Instrument::diplomatic: return "diplomatic";
        case Instrument::information: return "information";
        case Instrument::military: return "military";
        case Instrument::economic: return "economic";
    }
    return "economic";
}

const char* to_string(PoolKind k) { return k == PoolKind::financial ? "financial" : "personnel"; }

Instrument instrument_from_string(const std::string& s) {
    for (auto i : {Instrument::diplomatic, Instrument::information, Instrument::military, Instrument::economic})
        if (s == to_string(i)) return i;
    throw ParseError("unknown instrument '" + s + "'");
}

PoolKind pool_kind_from_string(const std::string& s) {
    if (s == "financial") return PoolKind::financial;
    if (s == "personnel") return PoolKind::personnel;
    throw ParseError("unknown pool kind '" + s + "'");
}

}  // namespace wargame
