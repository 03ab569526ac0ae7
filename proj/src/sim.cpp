#include "wargame/sim.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <numbers>
#include <thread>

#include "wargame/errors.hpp"

namespace wargame {
namespace {

std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

std::uint64_t fnv1a(const std::string& s) {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (unsigned char ch : s) {
        h ^= ch;
        h *= 0x100000001b3ULL;
    }
    return h;
}

double unit_open(std::uint64_t bits) {
    // (0, 1): never returns 0 so the log below stays finite.
    return (static_cast<double>(bits >> 11) + 0.5) * 0x1.0p-53;
}

struct CompiledCoupling {
    std::size_t src;
    std::size_t out;
    std::size_t dst;
    std::size_t in;
    double gain;
};

struct CompiledAction {
    std::size_t dst;
    std::size_t in;
    int start;
    int end;
    double intensity;
};

struct CompiledAggregation {
    std::vector<std::pair<std::size_t, std::size_t>> sources;  // (instance, var)
    std::vector<double> weights;
};

struct Compiled {
    std::vector<const ComponentInstance*> instances;
    std::vector<CompiledCoupling> couplings;
    std::vector<CompiledAction> actions;
    std::vector<CompiledAggregation> aggregations;
};

void check_shape(const ComponentInstance& inst) {
    const auto k = inst.state_vars.size();
    const auto m = inst.input_ports.size();
    const auto p = inst.output_ports.size();
    const auto& d = inst.dynamics;
    bool ok = d.A.size() == k && d.B.size() == k && d.c.size() == k && d.C.size() == p && d.noise_std.size() == k;
    for (const auto& r : d.A) ok = ok && r.size() == k;
    for (const auto& r : d.B) ok = ok && r.size() == m;
    for (const auto& r : d.C) ok = ok && r.size() == k;
    if (!ok) throw StructuralError("instance '" + inst.id + "' has inconsistent parameter dimensions");
}

Compiled compile(const ModelGraph& graph, const Plan& plan) {
    Compiled c;
    std::map<std::string, std::size_t> index;
    for (const auto& inst : graph.instances) {
        check_shape(inst);
        if (!index.emplace(inst.id, c.instances.size()).second)
            throw StructuralError("duplicate instance '" + inst.id + "'");
        c.instances.push_back(&inst);
    }
    auto lookup = [&](const std::string& id) {
        auto it = index.find(id);
        if (it == index.end()) throw StructuralError("unknown instance '" + id + "'");
        return it->second;
    };
    for (const auto& cpl : graph.couplings) {
        const auto src = lookup(cpl.from.instance);
        const auto dst = lookup(cpl.to.instance);
        const auto out = c.instances[src]->output_index(cpl.from.port);
        const auto in = c.instances[dst]->input_index(cpl.to.port);
        if (!out || !in) throw StructuralError("dangling coupling into '" + cpl.to.instance + "." + cpl.to.port + "'");
        c.couplings.push_back({src, *out, dst, *in, cpl.gain});
    }
    for (const auto& a : plan.actions) {
        const auto dst = lookup(a.target.instance);
        const auto in = c.instances[dst]->input_index(a.target.port);
        if (!in) throw StructuralError("action '" + a.id + "' targets unknown port '" + a.target.port + "'");
        c.actions.push_back({dst, *in, a.start_tick, a.end_tick(), a.intensity});
    }
    for (const auto& rule : graph.aggregations) {
        CompiledAggregation agg;
        for (std::size_t i = 0; i < rule.sources.size() && i < rule.weights.size(); ++i) {
            const auto inst = lookup(rule.sources[i].instance);
            const auto var = c.instances[inst]->state_index(rule.sources[i].var);
            if (!var) throw StructuralError("aggregation '" + rule.national_var + "' references unknown variable");
            agg.sources.emplace_back(inst, *var);
            agg.weights.push_back(rule.weights[i]);
        }
        c.aggregations.push_back(std::move(agg));
    }
    return c;
}

}  // namespace

double keyed_normal(std::uint64_t seed, const std::string& instance, const std::string& var, int tick) {
    std::uint64_t h = splitmix64(seed ^ 0x5851f42d4c957f2dULL);
    h = splitmix64(h ^ fnv1a(instance));
    h = splitmix64(h ^ fnv1a(var));
    h = splitmix64(h ^ static_cast<std::uint64_t>(static_cast<std::int64_t>(tick)));
    const double u1 = unit_open(h);
    const double u2 = unit_open(splitmix64(h));
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
}

const Series* Trajectory::find(const VarRef& key) const {
    for (const auto& s : series)
        if (s.key == key) return &s;
    return nullptr;
}

const NationalSeries* Trajectory::find_national(const std::string& name) const {
    for (const auto& s : national)
        if (s.name == name) return &s;
    return nullptr;
}

Frame Trajectory::frame_at(int tick) const {
    if (tick < 0 || tick > horizon_ticks) throw InvalidArgument("tick outside trajectory");
    Frame f;
    for (const auto& s : series) f.emplace(s.key, s.values[static_cast<std::size_t>(tick)]);
    return f;
}

Trajectory simulate(const ModelGraph& graph, const Plan& plan, const RunConfig& cfg) {
    if (cfg.horizon_ticks < 1) throw InvalidArgument("horizon must be >= 1 tick");
    const auto c = compile(graph, plan);
    const std::size_t n = c.instances.size();
    const auto steps = static_cast<std::size_t>(cfg.horizon_ticks) + 1;

    std::vector<std::vector<double>> x(n), y(n), u(n);
    Trajectory traj;
    traj.horizon_ticks = cfg.horizon_ticks;
    std::vector<std::size_t> series_base(n);
    for (std::size_t i = 0; i < n; ++i) {
        const auto& inst = *c.instances[i];
        series_base[i] = traj.series.size();
        x[i].resize(inst.state_vars.size());
        y[i].resize(inst.output_ports.size());
        u[i].resize(inst.input_ports.size());
        for (std::size_t v = 0; v < inst.state_vars.size(); ++v) {
            x[i][v] = clamp_level(inst.state_vars[v].value());
            Series s{{inst.id, inst.state_vars[v].name()}, inst.state_vars[v].polarity(), {}};
            s.values.reserve(steps);
            s.values.push_back(x[i][v]);
            traj.series.push_back(std::move(s));
        }
    }

    std::vector<double> next;
    for (int t = 0; t < cfg.horizon_ticks; ++t) {
        for (std::size_t i = 0; i < n; ++i) {
            const auto& C = c.instances[i]->dynamics.C;
            for (std::size_t o = 0; o < y[i].size(); ++o) {
                double acc = 0.0;
                for (std::size_t v = 0; v < x[i].size(); ++v) acc += C[o][v] * x[i][v];
                y[i][o] = acc;
            }
            std::fill(u[i].begin(), u[i].end(), 0.0);
        }
        for (const auto& cpl : c.couplings) u[cpl.dst][cpl.in] += cpl.gain * y[cpl.src][cpl.out];
        for (const auto& a : c.actions)
            if (t >= a.start && t < a.end) u[a.dst][a.in] += a.intensity;

        for (std::size_t i = 0; i < n; ++i) {
            const auto& inst = *c.instances[i];
            const auto& d = inst.dynamics;
            const auto k = x[i].size();
            next.assign(k, 0.0);
            for (std::size_t r = 0; r < k; ++r) {
                double acc = d.c[r];
                for (std::size_t v = 0; v < k; ++v) acc += d.A[r][v] * x[i][v];
                for (std::size_t p = 0; p < u[i].size(); ++p) acc += d.B[r][p] * u[i][p];
                if (cfg.noise_enabled && d.noise_std[r] > 0.0)
                    acc += d.noise_std[r] * keyed_normal(cfg.seed, inst.id, inst.state_vars[r].name(), t);
                next[r] = clamp_level(acc);
            }
            x[i] = next;
            for (std::size_t r = 0; r < k; ++r) traj.series[series_base[i] + r].values.push_back(x[i][r]);
        }
    }

    for (std::size_t a = 0; a < graph.aggregations.size(); ++a) {
        const auto& agg = c.aggregations[a];
        NationalSeries ns{graph.aggregations[a].national_var, std::vector<double>(steps, 0.0)};
        for (std::size_t t = 0; t < steps; ++t) {
            double acc = 0.0;
            for (std::size_t s = 0; s < agg.sources.size(); ++s)
                acc += agg.weights[s] * traj.series[series_base[agg.sources[s].first] + agg.sources[s].second].values[t];
            ns.values[t] = acc;
        }
        traj.national.push_back(std::move(ns));
    }
    return traj;
}

Trajectory baseline(const ModelGraph& graph, const RunConfig& cfg) { return simulate(graph, Plan{}, cfg); }

std::vector<EffectRecord> detect_effects(const Trajectory& base, const Trajectory& run, double threshold, int persistence) {
    if (!(threshold > 0)) throw InvalidArgument("effect threshold must be > 0");
    if (persistence < 1) throw InvalidArgument("effect persistence must be >= 1");
    if (base.horizon_ticks != run.horizon_ticks || base.series.size() != run.series.size())
        throw InvalidArgument("trajectory shape mismatch");

    std::vector<EffectRecord> out;
    for (std::size_t s = 0; s < base.series.size(); ++s) {
        const auto& b = base.series[s];
        const auto& r = run.series[s];
        if (!(b.key == r.key) || b.values.size() != r.values.size())
            throw InvalidArgument("trajectory shape mismatch at " + b.key.instance + "." + b.key.var);

        const std::size_t len = b.values.size();
        std::size_t t = 0;
        while (t < len) {
            if (std::fabs(r.values[t] - b.values[t]) < threshold) {
                ++t;
                continue;
            }
            const std::size_t begin = t;
            double sum = 0.0;
            while (t < len && std::fabs(r.values[t] - b.values[t]) >= threshold) {
                sum += r.values[t] - b.values[t];
                ++t;
            }
            const std::size_t count = t - begin;
            if (count < static_cast<std::size_t>(persistence)) continue;
            EffectRecord rec;
            rec.instance = b.key.instance;
            rec.var = b.key.var;
            rec.window_start = static_cast<int>(begin);
            rec.window_end = static_cast<int>(t - 1);
            rec.mean_delta = sum / static_cast<double>(count);
            rec.favorable = (rec.mean_delta > 0) != (b.polarity == Polarity::favorable_low);
            out.push_back(std::move(rec));
        }
    }
    return out;
}

std::map<CellKey, CellResult> batch_simulate(const std::vector<SituationHypothesis>& hypotheses,
                                            const std::vector<Plan>& plans, const std::vector<RunConfig>& cfgs,
                                            unsigned threads) {
    struct Job {
        CellKey key;
        const SituationHypothesis* hyp;
        const Plan* plan;
        const RunConfig* cfg;
    };
    std::vector<Job> jobs;
    for (const auto& h : hypotheses)
        for (const auto& p : plans)
            for (std::size_t c = 0; c < cfgs.size(); ++c) jobs.push_back({{h.name, p.id, c}, &h, &p, &cfgs[c]});

    std::vector<CellResult> results(jobs.size());
    std::atomic<std::size_t> next{0};
    auto worker = [&] {
        for (std::size_t j = next++; j < jobs.size(); j = next++) {
            const auto& job = jobs[j];
            auto& res = results[j];
            res.findings = validate_graph(job.hyp->graph);
            res.findings.append(validate_plan(*job.plan, job.hyp->graph));
            if (job.cfg->horizon_ticks < 1) res.findings.error("invalid-horizon", job.key.plan, "run horizon must be >= 1");
            if (!res.findings.ok()) {
                res.reason = "validation failed";
                continue;
            }
            try {
                res.trajectory = simulate(job.hyp->graph, *job.plan, *job.cfg);
                res.ok = true;
            } catch (const std::exception& e) {
                res.reason = e.what();
            }
        }
    };

    if (threads == 0) threads = std::max(1u, std::thread::hardware_concurrency());
    threads = std::min<unsigned>(threads, static_cast<unsigned>(std::max<std::size_t>(1, jobs.size())));
    if (threads <= 1) {
        worker();
    } else {
        std::vector<std::jthread> pool;
        for (unsigned i = 0; i < threads; ++i) pool.emplace_back(worker);
    }

    std::map<CellKey, CellResult> out;
    for (std::size_t j = 0; j < jobs.size(); ++j) out.emplace(jobs[j].key, std::move(results[j]));
    return out;
}

}  // namespace wargame
