#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

namespace bezierflow {

/// Process exit codes shared by every subcommand.
enum ExitCode : int {
    kExitOk = 0,
    kExitFailure = 1,  // property, evaluation or fit failure
    kExitUsage = 2,    // bad arguments or configuration
};

struct CommandOptions {
    std::optional<std::filesystem::path> config;
    std::optional<std::filesystem::path> scheduler;
    std::optional<std::filesystem::path> out;
    std::optional<std::uint64_t> seed;
    std::vector<int> nfe;
    std::vector<double> timesteps;
    std::vector<std::filesystem::path> inputs;
    bool gallery = false;
    std::string inject_fault;
};

/// Writes run_report.json, scheduler.json and loss_curve.csv.
int cmd_train(const CommandOptions& opts, std::ostream& out, std::ostream& err);
/// Writes eval_report.json, eval.csv and trajectory CSVs for plotting.
int cmd_eval(const CommandOptions& opts, std::ostream& out, std::ostream& err);
/// Writes trajectories.svg from the input CSVs, plus scheduler.svg and
/// gallery.svg when requested.
int cmd_plot(const CommandOptions& opts, std::ostream& out, std::ostream& err);
/// Runs the property suite; one line per property.
int cmd_verify(const CommandOptions& opts, std::ostream& out, std::ostream& err);
/// Writes fitted_scheduler.json and fit_report.json.
int cmd_fit_timesteps(const CommandOptions& opts, std::ostream& out, std::ostream& err);

}  // namespace bezierflow
