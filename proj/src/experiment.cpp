#include "bezierflow/experiment.hpp"

#include <fstream>

#include "bezierflow/metrics.hpp"
#include "bezierflow/parallel.hpp"

namespace bezierflow {

using nlohmann::json;

Scheduler ExperimentConfig::source_scheduler() const {
    switch (source) {
        case SchedulerKind::linear: return Scheduler::linear();
        case SchedulerKind::vp: return Scheduler::vp();
        case SchedulerKind::bezier: break;
    }
    throw ConfigError("source_scheduler", "must be 'linear' or 'vp'");
}

ExperimentConfig standard_fixture() { return ExperimentConfig{}; }

int steps_for_nfe(int nfe, FixedMethod method) {
    if (nfe < 1) throw std::invalid_argument("nfe must be >= 1");
    if (method == FixedMethod::rk1) return nfe;
    if (nfe % 2 != 0) throw std::invalid_argument("rk2 needs an even nfe, got " + std::to_string(nfe));
    return nfe / 2;
}

namespace {

template <typename T>
T read(const json& node, const std::string& path, const char* key, T fallback) {
    if (!node.contains(key)) return fallback;
    try {
        return node.at(key).get<T>();
    } catch (const json::exception&) {
        throw ConfigError(path + "." + key, "wrong type");
    }
}

GmmSpec parse_gmm(const json& node) {
    if (!node.is_object()) throw ConfigError("gmm", "must be an object");
    try {
        if (node.contains("preset")) {
            const auto preset = node.at("preset").get<std::string>();
            if (preset != "ring") throw ConfigError("gmm.preset", "unknown preset '" + preset + "'");
            return GmmSpec::ring(read(node, "gmm", "modes", 8), read(node, "gmm", "radius", 8.0),
                                 read(node, "gmm", "stddev", 0.5));
        }
        for (const char* key : {"weights", "means", "variances"}) {
            if (!node.contains(key)) throw ConfigError(std::string("gmm.") + key, "missing");
        }
        const auto weights = node.at("weights").get<std::vector<double>>();
        const auto variances = node.at("variances").get<std::vector<double>>();
        std::vector<State> means;
        for (const auto& m : node.at("means")) {
            const auto v = m.get<std::vector<double>>();
            means.push_back(Eigen::Map<const State>(v.data(), static_cast<Eigen::Index>(v.size())));
        }
        return GmmSpec(weights, std::move(means), variances);
    } catch (const json::exception& e) {
        throw ConfigError("gmm", std::string("malformed: ") + e.what());
    } catch (const std::invalid_argument& e) {
        throw ConfigError("gmm", e.what());
    }
}

}  // namespace

ExperimentConfig parse_experiment_config(const json& doc) {
    if (!doc.is_object()) throw ConfigError("config", "must be a JSON object");
    ExperimentConfig cfg;
    if (!doc.contains("gmm")) throw ConfigError("gmm", "missing section");
    cfg.gmm = parse_gmm(doc.at("gmm"));

    cfg.seed = read<std::uint64_t>(doc, "config", "seed", cfg.seed);
    try {
        cfg.source = scheduler_kind_from_string(read<std::string>(doc, "config", "source_scheduler", "linear"));
    } catch (const std::invalid_argument& e) {
        throw ConfigError("source_scheduler", e.what());
    }
    if (cfg.source == SchedulerKind::bezier) throw ConfigError("source_scheduler", "must be 'linear' or 'vp'");
    cfg.output_dir = read<std::string>(doc, "config", "output_dir", cfg.output_dir.string());

    TrainConfig& t = cfg.train;
    t.degree = read(doc, "config", "degree", t.degree);
    t.seed = cfg.seed;
    if (doc.contains("train")) {
        const json& node = doc.at("train");
        if (!node.is_object()) throw ConfigError("train", "must be an object");
        t.nfe = read(node, "train", "nfe", t.nfe);
        try {
            t.method = fixed_method_from_string(read<std::string>(node, "train", "method", "rk1"));
            t.grid = grid_kind_from_string(read<std::string>(node, "train", "grid", "uniform_time"));
            t.optimizer = optimizer_kind_from_string(read<std::string>(node, "train", "optimizer", "rmsprop"));
        } catch (const std::invalid_argument& e) {
            throw ConfigError("train", e.what());
        }
        t.train_count = read(node, "train", "train_count", t.train_count);
        t.val_count = read(node, "train", "val_count", t.val_count);
        t.epochs = read(node, "train", "epochs", t.epochs);
        t.batch_size = read(node, "train", "batch_size", t.batch_size);
        t.lr = read(node, "train", "lr", t.lr);
        t.momentum = read(node, "train", "momentum", t.momentum);
        t.fd_step = read(node, "train", "fd_step", t.fd_step);
        t.clip_norm = read(node, "train", "clip_norm", t.clip_norm);
        t.enable_decoupled = read(node, "train", "enable_decoupled", t.enable_decoupled);
        t.lr_decoupled = read(node, "train", "lr_decoupled", t.lr_decoupled);
        t.teacher.rtol = read(node, "train", "teacher_rtol", t.teacher.rtol);
        t.teacher.atol = read(node, "train", "teacher_atol", t.teacher.atol);
    }
    try {
        t.validate();
    } catch (const std::invalid_argument& e) {
        const std::string msg = e.what();
        throw ConfigError(msg.substr(0, msg.find(':')), msg.substr(msg.find(':') + 2));
    }

    cfg.eval_nfe = {t.nfe};
    if (doc.contains("eval")) {
        const json& node = doc.at("eval");
        if (!node.is_object()) throw ConfigError("eval", "must be an object");
        cfg.eval_nfe = read(node, "eval", "nfe", cfg.eval_nfe);
        cfg.eval_count = read(node, "eval", "count", cfg.eval_count);
        cfg.eval_target_count = read(node, "eval", "target_count", cfg.eval_target_count);
        cfg.plot_trajectories = read(node, "eval", "plot_trajectories", cfg.plot_trajectories);
    }
    if (cfg.eval_nfe.empty()) throw ConfigError("eval.nfe", "must be a nonempty list");
    for (int nfe : cfg.eval_nfe) {
        try {
            steps_for_nfe(nfe, t.method);
        } catch (const std::invalid_argument& e) {
            throw ConfigError("eval.nfe", e.what());
        }
    }
    if (cfg.eval_count < 1) throw ConfigError("eval.count", "must be >= 1");
    if (cfg.eval_target_count < 1) throw ConfigError("eval.target_count", "must be >= 1");
    if (cfg.plot_trajectories < 0) throw ConfigError("eval.plot_trajectories", "must be >= 0");
    return cfg;
}

ExperimentConfig load_experiment_config(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("config", "cannot read " + path.string());
    json doc;
    try {
        doc = json::parse(in);
    } catch (const json::exception& e) {
        throw ConfigError("config", std::string("parse error: ") + e.what());
    }
    return parse_experiment_config(doc);
}

json experiment_config_to_json(const ExperimentConfig& cfg) {
    json gmm;
    gmm["weights"] = cfg.gmm.weights();
    gmm["variances"] = cfg.gmm.variances();
    gmm["means"] = json::array();
    for (const auto& m : cfg.gmm.means()) gmm["means"].push_back(std::vector<double>(m.data(), m.data() + m.size()));
    const TrainConfig& t = cfg.train;
    return json{
        {"seed", cfg.seed},
        {"gmm", gmm},
        {"source_scheduler", std::string(to_string(cfg.source))},
        {"degree", t.degree},
        {"output_dir", cfg.output_dir.string()},
        {"train",
         {{"nfe", t.nfe},
          {"method", std::string(to_string(t.method))},
          {"grid", std::string(to_string(t.grid))},
          {"train_count", t.train_count},
          {"val_count", t.val_count},
          {"epochs", t.epochs},
          {"batch_size", t.batch_size},
          {"lr", t.lr},
          {"optimizer", std::string(to_string(t.optimizer))},
          {"momentum", t.momentum},
          {"fd_step", t.fd_step},
          {"clip_norm", t.clip_norm},
          {"enable_decoupled", t.enable_decoupled},
          {"lr_decoupled", t.lr_decoupled},
          {"teacher_rtol", t.teacher.rtol},
          {"teacher_atol", t.teacher.atol}}},
        {"eval",
         {{"nfe", cfg.eval_nfe},
          {"count", cfg.eval_count},
          {"target_count", cfg.eval_target_count},
          {"plot_trajectories", cfg.plot_trajectories}}},
    };
}

namespace {

// Evaluation draws never reuse the training seeds.
constexpr std::uint64_t kEvalSourceSalt = 0xE7A1'0000'0000'0001ULL;
constexpr std::uint64_t kEvalTargetSalt = 0xE7A1'0000'0000'0002ULL;

std::vector<State> student_endpoints(const DistillationObjective& objective, const Scheduler& target,
                                     std::span<const DistillationPair> pairs) {
    std::vector<State> out(pairs.size());
    parallel_for(pairs.size(), [&](std::size_t i) { out[i] = objective.student_endpoint(target, pairs[i].x0); });
    return out;
}

}  // namespace

EvalReport evaluate(const ExperimentConfig& cfg, const Scheduler& learned, const std::vector<int>& nfe_list) {
    if (nfe_list.empty()) throw std::invalid_argument("evaluate: empty nfe list");
    const Scheduler source = cfg.source_scheduler();
    const auto pairs = build_pairs(cfg.gmm, source, cfg.eval_count, cfg.seed ^ kEvalSourceSalt, cfg.train.teacher);
    const auto fresh = sample_target(cfg.gmm, cfg.eval_target_count, cfg.seed ^ kEvalTargetSalt);
    std::vector<State> teacher;
    for (const auto& p : pairs) teacher.push_back(p.x1);

    EvalReport report;
    report.trained_nfe = cfg.train.nfe;
    report.method = cfg.train.method;
    report.energy_teacher = energy_distance(teacher, fresh);
    const Scheduler baseline = Scheduler::linear();
    for (int nfe : nfe_list) {
        EvalRow row;
        row.nfe = nfe;
        row.steps = steps_for_nfe(nfe, cfg.train.method);
        const DistillationObjective objective(cfg.gmm, source, make_grid(cfg.train.grid, row.steps, source),
                                              cfg.train.method);
        const auto ours = student_endpoints(objective, learned, pairs);
        const auto base = student_endpoints(objective, baseline, pairs);
        row.mse_learned = mean_squared_error(ours, teacher);
        row.mse_baseline = mean_squared_error(base, teacher);
        row.energy_learned = energy_distance(ours, fresh);
        row.energy_baseline = energy_distance(base, fresh);
        report.rows.push_back(row);
    }
    for (std::size_t i = 1; i < report.rows.size(); ++i) {
        const auto& a = report.rows[i - 1];
        const auto& b = report.rows[i];
        if (b.nfe > a.nfe && b.mse_learned > a.mse_learned) {
            report.flags.push_back("mse increased from nfe=" + std::to_string(a.nfe) + " to nfe=" +
                                   std::to_string(b.nfe));
        }
    }
    return report;
}

json eval_report_to_json(const EvalReport& report) {
    json rows = json::array();
    for (const auto& r : report.rows) {
        rows.push_back({{"nfe", r.nfe},
                        {"steps", r.steps},
                        {"mse_learned", r.mse_learned},
                        {"mse_baseline", r.mse_baseline},
                        {"energy_learned", r.energy_learned},
                        {"energy_baseline", r.energy_baseline}});
    }
    return json{{"trained_nfe", report.trained_nfe},
                {"method", std::string(to_string(report.method))},
                {"energy_teacher", report.energy_teacher},
                {"rows", rows},
                {"flags", report.flags}};
}

json run_report_to_json(const RunReport& report, const TrainConfig& cfg) {
    // Wall time is left out so the document is reproducible byte for byte.
    return json{{"nfe", cfg.nfe},
                {"method", std::string(to_string(cfg.method))},
                {"grid", std::string(to_string(cfg.grid))},
                {"degree", cfg.degree},
                {"seed", cfg.seed},
                {"train_loss", report.train_loss},
                {"val_loss", report.val_loss},
                {"selected_epoch", report.selected_epoch},
                {"best_val_loss", report.val_loss.at(static_cast<std::size_t>(report.selected_epoch))},
                {"logits_alpha", report.best.alpha},
                {"logits_sigma", report.best.sigma},
                {"time_offsets", report.best.offsets}};
}

}  // namespace bezierflow
