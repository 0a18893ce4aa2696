#include <iostream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "bezierflow/commands.hpp"
#include "bezierflow/parallel.hpp"

using namespace bezierflow;

namespace {

struct RawOptions {
    std::string config, scheduler, out;
    std::uint64_t seed = 0;
    std::vector<int> nfe;
    std::vector<double> timesteps;
    std::vector<std::string> inputs;
    bool gallery = false;
    std::string inject_fault;
};

CommandOptions finish(const RawOptions& raw, const CLI::App& sub) {
    CommandOptions o;
    if (!raw.config.empty()) o.config = raw.config;
    if (!raw.scheduler.empty()) o.scheduler = raw.scheduler;
    if (!raw.out.empty()) o.out = raw.out;
    if (const auto* opt = sub.get_option_no_throw("--seed"); opt != nullptr && opt->count() > 0) o.seed = raw.seed;
    o.nfe = raw.nfe;
    o.timesteps = raw.timesteps;
    for (const auto& p : raw.inputs) o.inputs.emplace_back(p);
    o.gallery = raw.gallery;
    o.inject_fault = raw.inject_fault;
    return o;
}

void add_common(CLI::App* sub, RawOptions& raw) {
    sub->add_option("--config", raw.config, "experiment config (JSON)");
    sub->add_option("--out", raw.out, "output directory");
    sub->add_option("--seed", raw.seed, "random seed override");
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Bezier scheduler distillation for flow samplers"};
    app.require_subcommand(1);
    app.footer(std::string("Worker threads: set ") + kWorkersEnv + " (default: hardware concurrency).");
    RawOptions raw;

    auto* train = app.add_subcommand("train", "learn a scheduler for a fixed NFE budget");
    add_common(train, raw);

    auto* eval = app.add_subcommand("eval", "compare a learned scheduler with the linear baseline");
    add_common(eval, raw);
    eval->add_option("--scheduler", raw.scheduler, "scheduler JSON")->required();
    eval->add_option("--nfe", raw.nfe, "comma-separated NFE list")->delimiter(',');

    auto* plot = app.add_subcommand("plot", "render trajectory CSVs and schedulers to SVG");
    plot->add_option("inputs", raw.inputs, "trajectory CSV files");
    plot->add_option("--scheduler", raw.scheduler, "scheduler JSON to draw");
    plot->add_option("--out", raw.out, "output directory");
    plot->add_flag("--gallery", raw.gallery, "also draw the control-point gallery");

    auto* verify = app.add_subcommand("verify", "run the property suite");
    verify->add_option("--seed", raw.seed, "ignored; properties use fixed seeds");
    verify->add_option("--inject-fault", raw.inject_fault, "deliberately break a property (nonmonotone)");

    auto* fit = app.add_subcommand("fit-timesteps", "fit a Bezier scheduler to a timestep grid");
    add_common(fit, raw);
    fit->add_option("--timesteps", raw.timesteps, "comma-separated increasing times from 0 to 1")
        ->delimiter(',')
        ->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return kExitUsage;
    }

    if (*train) return cmd_train(finish(raw, *train), std::cout, std::cerr);
    if (*eval) return cmd_eval(finish(raw, *eval), std::cout, std::cerr);
    if (*plot) return cmd_plot(finish(raw, *plot), std::cout, std::cerr);
    if (*verify) return cmd_verify(finish(raw, *verify), std::cout, std::cerr);
    if (*fit) return cmd_fit_timesteps(finish(raw, *fit), std::cout, std::cerr);
    return kExitUsage;
}
