#include "wargame/coa.hpp"

#include <algorithm>
#include <cmath>
#include <tuple>

#include "wargame/errors.hpp"

namespace wargame {

const std::vector<double>& target_series(const Trajectory& traj, const EffectTarget& target) {
    if (target.is_national()) {
        if (const auto* ns = traj.find_national(target.var)) return ns->values;
    } else if (const auto* s = traj.find({target.instance, target.var})) {
        return s->values;
    }
    throw NotFoundError("unknown effect target '" + target.label() + "'");
}

std::vector<EffectStatus> evaluate_coa(const Trajectory& traj, const std::vector<DesiredEffect>& effects) {
    std::vector<EffectStatus> out;
    out.reserve(effects.size());
    for (const auto& e : effects) {
        const auto& values = target_series(traj, e.target);
        if (e.deadline_tick < 0 || e.deadline_tick > traj.horizon_ticks)
            throw InvalidArgument("effect '" + e.id + "': deadline outside trajectory horizon");
        auto satisfied = [&](double v) {
            return e.direction == Direction::increase ? v >= e.threshold_level : v <= e.threshold_level;
        };
        EffectStatus st{e.id, false, std::nullopt};
        int t = e.deadline_tick;
        while (t >= 0 && satisfied(values[static_cast<std::size_t>(t)])) --t;
        if (t < e.deadline_tick) {
            st.achieved = true;
            st.first_achieved_tick = t + 1;
        }
        out.push_back(st);
    }
    return out;
}

std::string effect_set_signature(const std::vector<DesiredEffect>& effects) {
    std::vector<std::string> ids;
    for (const auto& e : effects) ids.push_back(e.id);
    std::sort(ids.begin(), ids.end());
    std::string sig;
    for (const auto& id : ids) sig += (sig.empty() ? "" : ",") + id;
    return sig;
}

double CoaScore::spend_sum() const {
    double s = 0.0;
    for (const auto& [_, v] : total_spend) s += v;
    return s;
}

CoaScore score_coa(const Plan& plan, const std::string& hypothesis, const Trajectory& base, const Trajectory& run,
                   const std::vector<DesiredEffect>& effects, double threshold, int persistence) {
    CoaScore score;
    score.plan_id = plan.id;
    score.hypothesis = hypothesis;
    score.effect_set = effect_set_signature(effects);
    for (const auto& st : evaluate_coa(run, effects))
        if (st.achieved) score.achieved_ids.insert(st.effect_id);
    score.achieved_count = static_cast<int>(score.achieved_ids.size());
    for (const auto& rec : detect_effects(base, run, threshold, persistence))
        if (!rec.favorable) ++score.unfavorable_effect_count;
    score.total_spend = planned_spend(plan);
    return score;
}

bool coa_before(const CoaScore& a, const CoaScore& b) {
    if (a.failed != b.failed) return !a.failed;
    const double sa = a.spend_sum();
    const double sb = b.spend_sum();
    return std::make_tuple(-a.achieved_count, a.unfavorable_effect_count, sa, std::cref(a.plan_id), std::cref(a.hypothesis)) <
           std::make_tuple(-b.achieved_count, b.unfavorable_effect_count, sb, std::cref(b.plan_id), std::cref(b.hypothesis));
}

std::vector<CoaScore> compare_coas(std::vector<CoaScore> scores) {
    for (const auto& s : scores)
        if (s.effect_set != scores.front().effect_set)
            throw InvalidArgument("scores were computed against different desired-effect sets");
    std::stable_sort(scores.begin(), scores.end(), coa_before);
    return scores;
}

RobustnessResult robustness(const Plan& plan, const std::vector<SituationHypothesis>& hypotheses,
                            const std::vector<DesiredEffect>& effects, const RunConfig& cfg) {
    RobustnessResult res;
    for (const auto& h : hypotheses) {
        HypothesisOutcome out;
        out.hypothesis = h.name;
        out.findings = validate_graph(h.graph);
        out.findings.append(validate_plan(plan, h.graph));
        if (!out.findings.ok()) {
            out.reason = "validation failed";
            res.per_hypothesis.push_back(std::move(out));
            continue;
        }
        try {
            const auto traj = simulate(h.graph, plan, cfg);
            for (const auto& st : evaluate_coa(traj, effects)) out.achieved_count += st.achieved ? 1 : 0;
            out.ok = true;
        } catch (const std::exception& e) {
            out.reason = e.what();
        }
        if (out.ok && (!res.min_achieved || out.achieved_count < *res.min_achieved)) {
            res.min_achieved = out.achieved_count;
            res.worst_hypothesis = h.name;
        }
        res.per_hypothesis.push_back(std::move(out));
    }
    return res;
}

ProgressReport track_progress(const Trajectory& expected, const std::vector<Observation>& observed, double threshold) {
    if (!(threshold > 0)) throw InvalidArgument("tracking threshold must be > 0");
    ProgressReport rep;
    for (const auto& obs : observed) {
        const auto& values = target_series(expected, obs.target);
        if (obs.tick < 0 || obs.tick > expected.horizon_ticks)
            throw InvalidArgument("observation tick outside expected trajectory");
        const double div = obs.value - values[static_cast<std::size_t>(obs.tick)];
        rep.divergence[obs.target].push_back({obs.tick, div});
        if (std::fabs(div) >= threshold) rep.flags.push_back({obs.tick, obs.target, div});
    }
    for (auto& [_, pts] : rep.divergence)
        std::stable_sort(pts.begin(), pts.end(), [](const auto& a, const auto& b) { return a.tick < b.tick; });
    std::stable_sort(rep.flags.begin(), rep.flags.end(), [](const ProgressFlag& a, const ProgressFlag& b) {
        return std::tie(a.tick, a.target) < std::tie(b.tick, b.target);
    });
    return rep;
}

const char* to_string(Direction d) { return d == Direction::increase ? "increase" : "decrease"; }

Direction direction_from_string(const std::string& s) {
    if (s == "increase") return Direction::increase;
    if (s == "decrease") return Direction::decrease;
    throw ParseError("unknown direction '" + s + "'");
}

}  // namespace wargame
