#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "bezierflow/gmm.hpp"
#include "bezierflow/scheduler.hpp"
#include "bezierflow/trainer.hpp"

namespace bezierflow {

/// Configuration problem; `field()` names the offending key path.
class ConfigError : public std::runtime_error {
public:
    ConfigError(std::string field, const std::string& message)
        : std::runtime_error(field + ": " + message), field_(std::move(field)) {}
    const std::string& field() const { return field_; }

private:
    std::string field_;
};

struct ExperimentConfig {
    GmmSpec gmm = GmmSpec::ring(8, 8.0, 0.5);
    SchedulerKind source = SchedulerKind::linear;
    TrainConfig train{};
    std::vector<int> eval_nfe{3};
    /// Pairs used by evaluation (teacher endpoints) and fresh target draws
    /// for the energy distance.
    int eval_count = 200;
    int eval_target_count = 1000;
    /// Trajectories written per series by eval for plotting.
    int plot_trajectories = 16;
    std::filesystem::path output_dir = "out";
    std::uint64_t seed = 42;

    Scheduler source_scheduler() const;
};

/// The standard benchmark: 8 equal-weight modes on a radius-8 circle with
/// standard deviation 0.5, seed 42, NFE=3 Euler.
ExperimentConfig standard_fixture();

/// Parses a JSON config document. Every section except "gmm" is optional.
ExperimentConfig parse_experiment_config(const nlohmann::json& doc);
ExperimentConfig load_experiment_config(const std::filesystem::path& path);
nlohmann::json experiment_config_to_json(const ExperimentConfig& cfg);

/// Steps for an NFE budget under a fixed-step method. Throws
/// std::invalid_argument when rk2 gets an odd budget.
int steps_for_nfe(int nfe, FixedMethod method);

struct EvalRow {
    int nfe = 0;
    int steps = 0;
    double mse_learned = 0.0;
    double mse_baseline = 0.0;
    double energy_learned = 0.0;
    double energy_baseline = 0.0;
};

struct EvalReport {
    int trained_nfe = 0;
    FixedMethod method = FixedMethod::rk1;
    /// Energy distance between teacher endpoints and fresh target samples.
    double energy_teacher = 0.0;
    std::vector<EvalRow> rows;
    /// Adjacent NFE pairs whose learned MSE increases with NFE.
    std::vector<std::string> flags;
};

/// Evaluates `learned` against the linear (untrained) scheduler at each NFE
/// in `nfe_list`: endpoint MSE to the teacher and energy distance to fresh
/// target draws.
EvalReport evaluate(const ExperimentConfig& cfg, const Scheduler& learned, const std::vector<int>& nfe_list);

nlohmann::json eval_report_to_json(const EvalReport& report);
nlohmann::json run_report_to_json(const RunReport& report, const TrainConfig& cfg);

}  // namespace bezierflow
