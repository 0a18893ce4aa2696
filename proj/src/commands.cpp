#include "bezierflow/commands.hpp"

#include <fstream>
#include <iomanip>
#include <ostream>
#include <sstream>

#include "bezierflow/experiment.hpp"
#include "bezierflow/scheduler_io.hpp"
#include "bezierflow/svg.hpp"
#include "bezierflow/verify.hpp"

namespace bezierflow {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

ExperimentConfig resolve_config(const CommandOptions& opts) {
    ExperimentConfig cfg = opts.config ? load_experiment_config(*opts.config) : standard_fixture();
    if (opts.seed) {
        cfg.seed = *opts.seed;
        cfg.train.seed = *opts.seed;
    }
    if (opts.out) cfg.output_dir = *opts.out;
    return cfg;
}

void write_text(const fs::path& path, const std::string& text) {
    std::ofstream file(path, std::ios::binary);
    if (!file) throw std::runtime_error("cannot write " + path.string());
    file << text;
}

std::string fmt(double v) {
    std::ostringstream os;
    os << std::setprecision(17) << v;
    return os.str();
}

// Shared error handling: configuration and usage problems exit with 2,
// everything else with 1.
template <typename Body>
int guarded(std::ostream& err, const char* name, Body&& body) {
    try {
        return body();
    } catch (const ConfigError& e) {
        err << name << ": config error: " << e.what() << "\n";
        return kExitUsage;
    } catch (const SchedulerFormatError& e) {
        err << name << ": invalid scheduler: " << e.what() << "\n";
        return kExitFailure;
    } catch (const std::invalid_argument& e) {
        err << name << ": " << e.what() << "\n";
        return kExitUsage;
    } catch (const std::exception& e) {
        err << name << ": " << e.what() << "\n";
        return kExitFailure;
    }
}

}  // namespace

int cmd_train(const CommandOptions& opts, std::ostream& out, std::ostream& err) {
    return guarded(err, "train", [&] {
        const ExperimentConfig cfg = resolve_config(opts);
        fs::create_directories(cfg.output_dir);
        const RunReport report = train(cfg.train, cfg.gmm, cfg.source_scheduler());

        write_text(cfg.output_dir / "run_report.json", run_report_to_json(report, cfg.train).dump(2) + "\n");
        save_scheduler(report.best.scheduler(), cfg.output_dir / "scheduler.json");
        std::ostringstream curve;
        curve << "epoch,train_loss,val_loss\n";
        for (std::size_t e = 0; e < report.val_loss.size(); ++e) {
            curve << e << ',' << fmt(report.train_loss[e]) << ',' << fmt(report.val_loss[e]) << "\n";
        }
        write_text(cfg.output_dir / "loss_curve.csv", curve.str());

        out << "initial val loss " << report.val_loss.front() << ", best val loss "
            << report.val_loss[static_cast<std::size_t>(report.selected_epoch)] << " at epoch "
            << report.selected_epoch << " (" << std::fixed << std::setprecision(1) << report.wall_time_seconds
            << " s)\n";
        return kExitOk;
    });
}

int cmd_eval(const CommandOptions& opts, std::ostream& out, std::ostream& err) {
    return guarded(err, "eval", [&] {
        if (!opts.scheduler) throw std::invalid_argument("--scheduler is required");
        const ExperimentConfig cfg = resolve_config(opts);
        const Scheduler learned = load_scheduler(*opts.scheduler);
        const std::vector<int> nfe_list = opts.nfe.empty() ? cfg.eval_nfe : opts.nfe;
        for (int nfe : nfe_list) steps_for_nfe(nfe, cfg.train.method);

        fs::create_directories(cfg.output_dir);
        const EvalReport report = evaluate(cfg, learned, nfe_list);
        write_text(cfg.output_dir / "eval_report.json", eval_report_to_json(report).dump(2) + "\n");

        std::ostringstream table;
        table << "nfe,steps,mse_learned,mse_baseline,energy_learned,energy_baseline\n";
        bool finite = std::isfinite(report.energy_teacher);
        for (const auto& r : report.rows) {
            table << r.nfe << ',' << r.steps << ',' << fmt(r.mse_learned) << ',' << fmt(r.mse_baseline) << ','
                  << fmt(r.energy_learned) << ',' << fmt(r.energy_baseline) << "\n";
            finite = finite && std::isfinite(r.mse_learned) && std::isfinite(r.mse_baseline);
            out << "nfe=" << r.nfe << " mse learned=" << r.mse_learned << " linear=" << r.mse_baseline << "\n";
        }
        write_text(cfg.output_dir / "eval.csv", table.str());
        for (const auto& flag : report.flags) out << "flag: " << flag << "\n";

        if (cfg.plot_trajectories > 0) {
            const Scheduler source = cfg.source_scheduler();
            const int steps = steps_for_nfe(cfg.train.nfe, cfg.train.method);
            const DistillationObjective objective(cfg.gmm, source, make_grid(cfg.train.grid, steps, source),
                                                  cfg.train.method);
            const auto x0s = sample_source(cfg.gmm.dim(), cfg.plot_trajectories, cfg.seed);
            AdaptiveOptions teacher_opts = cfg.train.teacher;
            teacher_opts.record = true;
            std::vector<Trajectory> teacher, initial, trained;
            for (const auto& x0 : x0s) {
                teacher.push_back(*integrate_adaptive(objective.field().as_function(), x0, 0.0, 1.0, teacher_opts)
                                       .trajectory);
                initial.push_back(objective.student_trajectory(Scheduler::linear(), x0));
                trained.push_back(objective.student_trajectory(learned, x0));
            }
            const std::pair<const char*, const std::vector<Trajectory>*> series[] = {
                {"teacher", &teacher}, {"initial", &initial}, {"trained", &trained}};
            for (const auto& [label, trajs] : series) {
                std::ostringstream csv;
                write_trajectories_csv(csv, *trajs, label);
                write_text(cfg.output_dir / (std::string("trajectories_") + label + ".csv"), csv.str());
            }
        }
        return finite ? kExitOk : kExitFailure;
    });
}

int cmd_plot(const CommandOptions& opts, std::ostream& out, std::ostream& err) {
    return guarded(err, "plot", [&] {
        const fs::path dir = opts.out.value_or("plots");
        fs::create_directories(dir);
        std::vector<TrajectoryFile> files;
        for (const auto& input : opts.inputs) {
            std::ifstream in(input);
            if (!in) throw std::invalid_argument("cannot read " + input.string());
            try {
                files.push_back(read_trajectories_csv(in));
            } catch (const std::runtime_error& e) {
                throw std::runtime_error(input.string() + ": " + e.what());
            }
        }
        write_text(dir / "trajectories.svg", render_trajectories_svg(files));
        out << "wrote " << (dir / "trajectories.svg").string() << "\n";
        if (opts.scheduler) {
            write_text(dir / "scheduler.svg", render_scheduler_svg(load_scheduler(*opts.scheduler)));
            out << "wrote " << (dir / "scheduler.svg").string() << "\n";
        }
        if (opts.gallery) {
            write_text(dir / "gallery.svg", render_gallery_svg());
            out << "wrote " << (dir / "gallery.svg").string() << "\n";
        }
        return kExitOk;
    });
}

int cmd_verify(const CommandOptions& opts, std::ostream& out, std::ostream& err) {
    return guarded(err, "verify", [&] {
        VerifyOptions vopts;
        if (!opts.inject_fault.empty()) {
            if (opts.inject_fault != "nonmonotone") {
                throw std::invalid_argument("unknown fault '" + opts.inject_fault + "'");
            }
            vopts.inject_nonmonotone_points = true;
        }
        const auto results = run_properties(vopts);
        int failed = 0;
        for (const auto& r : results) {
            out << (r.passed ? "PASS " : "FAIL ") << r.name << " : " << r.detail << "\n";
            failed += r.passed ? 0 : 1;
        }
        out << results.size() - static_cast<std::size_t>(failed) << "/" << results.size() << " properties passed\n";
        return failed == 0 ? kExitOk : kExitFailure;
    });
}

int cmd_fit_timesteps(const CommandOptions& opts, std::ostream& out, std::ostream& err) {
    return guarded(err, "fit-timesteps", [&] {
        if (opts.timesteps.empty()) throw std::invalid_argument("--timesteps is required");
        const ExperimentConfig cfg = resolve_config(opts);
        const Scheduler source = cfg.source_scheduler();
        const TimestepFit fit = fit_scheduler_to_timesteps(source, opts.timesteps, cfg.train.degree);

        fs::create_directories(cfg.output_dir);
        save_scheduler(fit.scheduler(), cfg.output_dir / "fitted_scheduler.json");
        const json report{{"timesteps", opts.timesteps},
                          {"nodes", fit.nodes},
                          {"degree", cfg.train.degree},
                          {"residual", fit.residual},
                          {"converged", fit.converged},
                          {"iterations", fit.iterations}};
        write_text(cfg.output_dir / "fit_report.json", report.dump(2) + "\n");
        out << (fit.converged ? "converged" : "did not converge") << ", residual " << fit.residual << "\n";
        return fit.converged ? kExitOk : kExitFailure;
    });
}

}  // namespace bezierflow
