// Documents cross the boundary as JSON text; the Python wrapper turns them
// into dicts. Numeric analytics take plain lists.

#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "wargame/analytics.hpp"
#include "wargame/errors.hpp"
#include "wargame/io.hpp"
#include "wargame/runner.hpp"
#include "wargame/server.hpp"

namespace py = pybind11;
using namespace wargame;
using nlohmann::json;

namespace {

std::string out(const json& j) { return io::dump_compact(j); }

std::string validate(const std::string& scenario, const std::string& plan, const std::string& hypothesis) {
    const auto s = io::scenario_from_json(json::parse(scenario));
    const auto p = io::plan_from_json(json::parse(plan));
    return out(io::to_json(validate_pair(s, p, hypothesis)));
}

std::string run(const std::string& scenario, const std::string& plan, const std::string& hypothesis, int horizon,
                std::uint64_t seed, bool noise, std::optional<double> threshold, std::optional<int> persistence) {
    RunOptions opts;
    opts.hypothesis = hypothesis;
    opts.config = RunConfig{horizon, seed, noise};
    opts.threshold = threshold;
    opts.persistence = persistence;
    py::gil_scoped_release release;
    const auto result = execute_run(io::scenario_from_json(json::parse(scenario)), io::plan_from_json(json::parse(plan)), opts);
    return out(to_json(result));
}

std::string effects(const std::string& base, const std::string& run, double threshold, int persistence) {
    const auto b = io::trajectory_from_json(json::parse(base));
    const auto r = io::trajectory_from_json(json::parse(run));
    return out(io::to_json(detect_effects(b, r, threshold, persistence)));
}

std::string sync_doc(const std::string& plan, int bucket) {
    return out(io::to_json(sync_matrix(io::plan_from_json(json::parse(plan)), bucket)));
}

std::string compare(const std::string& scenario, const std::vector<std::string>& plans, const std::string& effects_doc,
                    int horizon, std::uint64_t seed, bool noise, unsigned threads) {
    const auto s = io::scenario_from_json(json::parse(scenario));
    std::vector<Plan> ps;
    for (const auto& p : plans) ps.push_back(io::plan_from_json(json::parse(p)));
    const auto fx = io::effects_from_json(json::parse(effects_doc));
    CompareResult result;
    {
        py::gil_scoped_release release;
        result = compare_plans(s, ps, fx, RunConfig{horizon, seed, noise}, threads);
    }
    json ranking = json::array(), rob = json::array();
    for (const auto& score : result.ranking) ranking.push_back(io::to_json(score));
    for (const auto& [id, r] : result.robustness) {
        auto j = io::to_json(r);
        j["planId"] = id;
        rob.push_back(j);
    }
    return out({{"ranking", ranking}, {"robustness", rob}});
}

py::dict stat(const analytics::StatResult& s) {
    py::dict d;
    d["statistic"] = s.statistic;
    d["slope"] = s.slope;
    d["intercept"] = s.intercept;
    d["r_squared"] = s.r_squared;
    d["p_value"] = s.p_value;
    d["n"] = s.n;
    d["df"] = s.df;
    return d;
}

template <class T, std::size_t N>
std::array<T, N> fixed(const std::vector<T>& v, const char* what) {
    if (v.size() != N) throw InvalidArgument(std::string(what) + " needs " + std::to_string(N) + " values");
    std::array<T, N> a{};
    std::copy(v.begin(), v.end(), a.begin());
    return a;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
    m.doc() = "Native core of the wargamer toolkit";

    // Never released: the translator may run until interpreter shutdown.
    static PyObject* validation_error = PyErr_NewException("wargamer._core.ValidationError", PyExc_ValueError, nullptr);
    m.attr("ValidationError") = py::handle(validation_error);
    py::register_exception_translator([](std::exception_ptr p) {
        try {
            if (p) std::rethrow_exception(p);
        } catch (const ValidationFailed& e) {
            PyErr_SetString(validation_error, out(io::to_json(e.report())).c_str());
        } catch (const NotFoundError& e) {
            PyErr_SetString(PyExc_KeyError, e.what());
        } catch (const ParseError& e) {
            PyErr_SetString(PyExc_ValueError, e.what());
        } catch (const InvalidArgument& e) {
            PyErr_SetString(PyExc_ValueError, e.what());
        } catch (const json::exception& e) {
            PyErr_SetString(PyExc_ValueError, e.what());
        }
    });

    m.def("validate", &validate, py::arg("scenario"), py::arg("plan"), py::arg("hypothesis") = "");
    m.def("run", &run, py::arg("scenario"), py::arg("plan"), py::arg("hypothesis") = "", py::arg("horizon") = 52,
          py::arg("seed") = 0, py::arg("noise") = false, py::arg("threshold") = py::none(),
          py::arg("persistence") = py::none());
    m.def("detect_effects", &effects, py::arg("baseline"), py::arg("run"), py::arg("threshold"), py::arg("persistence"));
    m.def("sync_matrix", &sync_doc, py::arg("plan"), py::arg("bucket_ticks") = 1);
    m.def("compare", &compare, py::arg("scenario"), py::arg("plans"), py::arg("effects"), py::arg("horizon") = 52,
          py::arg("seed") = 0, py::arg("noise") = false, py::arg("threads") = 0u);
    m.def("analytics", [](const std::string& name, const std::string& body) {
        return out(run_analytics(name, json::parse(body)));
    });

    m.def("tlx_score", [](const std::vector<double>& ratings, const std::vector<int>& wins) {
        return analytics::tlx_score({fixed<double, analytics::kTlxScales>(ratings, "ratings"),
                                     fixed<int, analytics::kTlxScales>(wins, "wins")});
    }, py::arg("ratings"), py::arg("wins"));
    m.def("trust_score", [](const std::vector<int>& items, const std::vector<bool>& reverse) {
        return analytics::trust_score({fixed<int, analytics::kTrustItems>(items, "items")},
                                      fixed<bool, analytics::kTrustItems>(reverse, "reverse mask"));
    }, py::arg("items"), py::arg("reverse_coded"));
    m.def("trend", [](const std::vector<std::pair<double, double>>& pts) { return stat(analytics::trend(pts)); });
    m.def("paired_t", [](const std::vector<double>& a, const std::vector<double>& b) { return stat(analytics::paired_t(a, b)); });
}
