#include "anoseqs/detector/detector.hpp"
#include "anoseqs/envs/env.hpp"
#include "anoseqs/harness/pipeline.hpp"
#include "anoseqs/metrics/metrics.hpp"
#include "anoseqs/netcore/checkpoint.hpp"

#include <pybind11/eigen.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>
#include <pybind11/stl/filesystem.h>

namespace py = pybind11;
using namespace anoseqs;

namespace {

py::dict step_dict(const envs::StepResult& r) {
    py::dict d;
    d["next_state"] = r.next_state;
    d["reward"] = r.reward;
    d["reward_used"] = r.reward_used;
    d["anomaly_score"] = r.anomaly_score;
    d["cost"] = r.cost;
    d["terminated"] = r.terminated;
    d["failure"] = r.failure;
    d["truncated"] = r.truncated;
    return d;
}

py::dict mean_std_dict(const metrics::MeanStd& m) {
    py::dict d;
    d["mean"] = m.mean;
    d["std"] = m.std;
    return d;
}

py::dict summary_dict(const metrics::MetricsSummary& s) {
    py::dict d;
    d["count"] = s.count;
    d["episode_return"] = mean_std_dict(s.episode_return);
    d["episode_cost"] = mean_std_dict(s.episode_cost);
    d["episode_cost_rate"] = mean_std_dict(s.episode_cost_rate);
    d["episode_length"] = mean_std_dict(s.episode_length);
    return d;
}

std::unique_ptr<envs::Env> make_env(const std::string& env_id, const std::string& role, std::uint64_t layout_seed,
                                    int max_steps) {
    envs::EnvConfig c;
    c.env_id = envs::parse_env_id(env_id);
    c.role = envs::parse_env_role(role);
    c.layout_seed = layout_seed;
    c.max_steps = max_steps;
    return envs::make_env(c);
}

} // namespace

PYBIND11_MODULE(_core, m) {
    m.doc() = "Risk-averse policy learning from anomalous state sequences";
    py::register_exception<Error>(m, "AnoseqsError", PyExc_RuntimeError);

    py::class_<envs::Env>(m, "Env")
        .def("reset", &envs::Env::reset, py::arg("episode_seed"))
        .def("step", [](envs::Env& e, const std::vector<double>& a) { return step_dict(e.step(a)); }, py::arg("action"))
        .def_property_readonly("state_dim", [](const envs::Env& e) { return e.spec().state_dim; })
        .def_property_readonly("action_dim", [](const envs::Env& e) { return e.spec().action_dim; })
        .def_property_readonly("max_steps", [](const envs::Env& e) { return e.spec().max_steps; });
    m.def("make_env", &make_env, py::arg("env_id"), py::arg("role") = "target", py::arg("layout_seed") = 0,
          py::arg("max_steps") = 0);

    m.def("episodic_return", [](const std::vector<double>& r) { return metrics::episodic_return(r); });
    m.def("episodic_cost_rate", &metrics::episodic_cost_rate, py::arg("cost_count"), py::arg("length"));
    m.def("total_cost_rate", &metrics::total_cost_rate, py::arg("total_costs"), py::arg("total_steps"));
    m.def("mean_std", [](const std::vector<double>& v) { return mean_std_dict(metrics::mean_std(v)); });
    m.def("read_curve_csv", [](const std::filesystem::path& path) {
        py::list rows;
        for (const auto& p : metrics::read_curve_csv(path)) {
            py::dict d;
            d["step"] = p.step;
            d["episodic_return_mean"] = p.episodic_return_mean;
            d["episodic_cost_rate_mean"] = p.episodic_cost_rate_mean;
            d["total_cost_rate"] = p.total_cost_rate;
            rows.append(d);
        }
        return rows;
    });

    py::class_<detector::DetectorModel, std::shared_ptr<detector::DetectorModel>>(m, "Detector")
        .def_static("load",
                    [](const std::filesystem::path& path) {
                        return std::make_shared<detector::DetectorModel>(
                            detector::DetectorModel::from_checkpoint(netcore::read_checkpoint(path)));
                    })
        .def_property_readonly("window_length", &detector::DetectorModel::window_length)
        .def_property_readonly("state_dim", &detector::DetectorModel::state_dim)
        .def("reconstruct", &detector::DetectorModel::reconstruct, py::arg("window"))
        .def("score", [](const detector::DetectorModel& d, const Matrix& w) { return detector::anomaly_score(d, w); },
             py::arg("window"));

    m.def("read_threshold", [](const std::filesystem::path& path) { return detector::read_calibration(path).theta; });

    py::class_<harness::RunConfig>(m, "RunConfig")
        .def(py::init<>())
        .def_static("load", &harness::RunConfig::load)
        .def_static("parse", &harness::RunConfig::parse)
        .def("set", &harness::RunConfig::set)
        .def("get", &harness::RunConfig::get)
        .def("to_text", &harness::RunConfig::to_text)
        .def_property_readonly("run_dir", &harness::RunConfig::run_dir);

    auto parse = [](const std::string& a) { return harness::parse_algo(a); };
    py::class_<harness::Pipeline>(m, "Pipeline")
        .def(py::init([](const harness::RunConfig& c, bool force) {
                 return harness::Pipeline(c, {force, nullptr});
             }),
             py::arg("config"), py::arg("force") = false)
        .def_property_readonly("run_dir", &harness::Pipeline::run_dir)
        .def("collect", [](harness::Pipeline& p) { return !p.collect().skipped; })
        .def("build_dataset", [](harness::Pipeline& p) { return !p.build_dataset().skipped; })
        .def("train_detector", [](harness::Pipeline& p) { return !p.train_detector().skipped; })
        .def(
            "train_policy",
            [parse](harness::Pipeline& p, const std::string& algo, std::uint64_t seed) {
                return p.train_policy(parse(algo), seed).dir;
            },
            py::arg("algo"), py::arg("seed"))
        .def(
            "evaluate",
            [parse](harness::Pipeline& p, const std::string& algo, std::uint64_t seed, int episodes) {
                return summary_dict(p.evaluate(parse(algo), seed, episodes).summary);
            },
            py::arg("algo"), py::arg("seed"), py::arg("episodes"))
        .def("summary_report", &harness::Pipeline::summary_report, py::arg("seed"), py::arg("episodes"))
        .def("run_all", &harness::Pipeline::run_all, py::call_guard<py::gil_scoped_release>());
}
