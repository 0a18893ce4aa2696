#include <pybind11/eigen.h>
#include <pybind11/functional.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>
#include <pybind11/stl/filesystem.h>

#include "bezierflow/bezier.hpp"
#include "bezierflow/experiment.hpp"
#include "bezierflow/gmm.hpp"
#include "bezierflow/ode.hpp"
#include "bezierflow/path_transform.hpp"
#include "bezierflow/scheduler.hpp"
#include "bezierflow/scheduler_io.hpp"
#include "bezierflow/trainer.hpp"
#include "bezierflow/verify.hpp"

namespace py = pybind11;
using namespace bezierflow;

namespace {

ControlVector points(const std::vector<double>& v) { return ControlVector(v); }

std::vector<double> as_vector(std::span<const double> s) { return {s.begin(), s.end()}; }

}  // namespace

PYBIND11_MODULE(_core, m) {
    m.doc() = "Bezier scheduler distillation for flow samplers";

    py::register_exception<SnrRangeError>(m, "SnrRangeError", PyExc_ValueError);
    py::register_exception<SchedulerFormatError>(m, "SchedulerFormatError", PyExc_ValueError);
    py::register_exception<ConfigError>(m, "ConfigError", PyExc_ValueError);

    m.def("bernstein", &bernstein, py::arg("i"), py::arg("n"), py::arg("lam"));
    m.def("bezier_eval", [](const std::vector<double>& c, double lam) { return bezier_eval(points(c), lam); },
          py::arg("points"), py::arg("lam"));
    m.def("bezier_derivative",
          [](const std::vector<double>& c, double lam) { return bezier_derivative(points(c), lam); },
          py::arg("points"), py::arg("lam"));
    m.def("monotone_points_from_logits",
          [](const std::vector<double>& logits) {
              return as_vector(monotone_points_from_logits(LogitVector(logits)).points());
          },
          py::arg("logits"));

    py::class_<ScheduleSample>(m, "ScheduleSample")
        .def_readonly("alpha", &ScheduleSample::alpha)
        .def_readonly("sigma", &ScheduleSample::sigma)
        .def_readonly("dalpha", &ScheduleSample::dalpha)
        .def_readonly("dsigma", &ScheduleSample::dsigma)
        .def("__repr__", [](const ScheduleSample& v) {
            return "ScheduleSample(alpha=" + std::to_string(v.alpha) + ", sigma=" + std::to_string(v.sigma) + ")";
        });

    py::class_<Scheduler>(m, "Scheduler")
        .def_static("linear", &Scheduler::linear)
        .def_static("vp", &Scheduler::vp)
        .def_static("bezier",
                    [](const std::vector<double>& a, const std::vector<double>& s) {
                        return Scheduler::bezier(LogitVector(a), LogitVector(s));
                    },
                    py::arg("alpha_logits"), py::arg("sigma_logits"))
        .def_static("bezier_linear_init", &Scheduler::bezier_linear_init, py::arg("degree") = 32)
        .def_static("from_json", [](const std::string& text) { return scheduler_from_json(nlohmann::json::parse(text)); })
        .def_static("load", &load_scheduler)
        .def_property_readonly("kind", [](const Scheduler& s) { return std::string(to_string(s.kind())); })
        .def_property_readonly("degree", &Scheduler::degree)
        .def("eval", &Scheduler::eval, py::arg("s"))
        .def("snr", &Scheduler::snr, py::arg("s"))
        .def("invert_snr", &Scheduler::invert_snr, py::arg("y"))
        .def("to_json", [](const Scheduler& s) { return scheduler_to_json(s).dump(); })
        .def("save", &save_scheduler);

    m.def("make_grid",
          [](const std::string& kind, int steps, const Scheduler& sched) {
              return make_grid(grid_kind_from_string(kind), steps, sched).times();
          },
          py::arg("kind"), py::arg("steps"), py::arg("scheduler"));

    py::class_<TransformContext>(m, "TransformContext")
        .def(py::init<Scheduler, Scheduler>(), py::arg("source"), py::arg("target"))
        .def("time_map", &TransformContext::time_map)
        .def("scale", &TransformContext::scale)
        .def("time_map_derivative", &TransformContext::time_map_derivative)
        .def("scale_log_derivative", &TransformContext::scale_log_derivative);

    py::class_<GmmSpec>(m, "GmmSpec")
        .def(py::init<std::vector<double>, std::vector<State>, std::vector<double>>(), py::arg("weights"),
             py::arg("means"), py::arg("variances"))
        .def_static("ring", &GmmSpec::ring, py::arg("modes") = 8, py::arg("radius") = 8.0, py::arg("stddev") = 0.5)
        .def_property_readonly("dim", &GmmSpec::dim)
        .def_property_readonly("components", &GmmSpec::components);

    py::class_<VelocityField>(m, "VelocityField")
        .def(py::init<GmmSpec, Scheduler>(), py::arg("gmm"), py::arg("scheduler"))
        .def("velocity", &VelocityField::velocity, py::arg("x"), py::arg("s"))
        .def("responsibilities", &VelocityField::responsibilities, py::arg("x"), py::arg("s"))
        .def("posterior_target_mean", &VelocityField::posterior_target_mean, py::arg("x"), py::arg("s"));

    m.def("sample_target", &sample_target, py::arg("gmm"), py::arg("count"), py::arg("seed"));
    m.def("sample_source", &sample_source, py::arg("dim"), py::arg("count"), py::arg("seed"));

    m.def(
        "teacher_endpoint",
        [](const VelocityField& field, const State& x0, double rtol, double atol) {
            AdaptiveOptions opts;
            opts.rtol = rtol;
            opts.atol = atol;
            return integrate_adaptive(field.as_function(), x0, 0.0, 1.0, opts).endpoint;
        },
        py::arg("field"), py::arg("x0"), py::arg("rtol") = 1e-6, py::arg("atol") = 1e-8);

    m.def(
        "student_endpoint",
        [](const VelocityField& source_field, const Scheduler& target, const State& x0, int steps,
           const std::string& method) {
            const TransformContext ctx(source_field.scheduler(), target);
            const TimeGrid grid = make_grid(GridKind::uniform_time, steps, source_field.scheduler());
            return solve_student(ctx, source_field.as_function(), x0, grid, fixed_method_from_string(method))
                .endpoint();
        },
        py::arg("source_field"), py::arg("target"), py::arg("x0"), py::arg("steps"), py::arg("method") = "rk1");

    py::class_<TimestepFit>(m, "TimestepFit")
        .def_readonly("nodes", &TimestepFit::nodes)
        .def_readonly("residual", &TimestepFit::residual)
        .def_readonly("converged", &TimestepFit::converged)
        .def_readonly("iterations", &TimestepFit::iterations)
        .def("scheduler", &TimestepFit::scheduler);
    m.def(
        "fit_scheduler_to_timesteps",
        [](const Scheduler& source, const std::vector<double>& timesteps, int degree, double tol) {
            return fit_scheduler_to_timesteps(source, timesteps, degree, tol);
        },
        py::arg("source"), py::arg("timesteps"), py::arg("degree") = 32, py::arg("tol") = 1e-6);

    m.def(
        "train",
        [](const std::string& config_json) {
            const ExperimentConfig cfg = parse_experiment_config(nlohmann::json::parse(config_json));
            RunReport report;
            {
                py::gil_scoped_release release;
                report = train(cfg.train, cfg.gmm, cfg.source_scheduler());
            }
            py::dict out;
            out["train_loss"] = report.train_loss;
            out["val_loss"] = report.val_loss;
            out["selected_epoch"] = report.selected_epoch;
            out["scheduler"] = report.best.scheduler();
            return out;
        },
        py::arg("config_json"), "Runs training from a JSON experiment config string.");

    m.def("verify", [] {
        std::vector<std::tuple<std::string, bool, std::string>> rows;
        for (const auto& r : run_properties()) rows.emplace_back(r.name, r.passed, r.detail);
        return rows;
    });
}
