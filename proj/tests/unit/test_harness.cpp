#include <filesystem>
#include <fstream>
#include <sstream>

#include "bezierflow/commands.hpp"
#include "bezierflow/experiment.hpp"
#include "bezierflow/metrics.hpp"
#include "bezierflow/scheduler_io.hpp"
#include "bezierflow/svg.hpp"
#include "bezierflow/verify.hpp"
#include "doctest.h"

using namespace bezierflow;
namespace fs = std::filesystem;
using nlohmann::json;

namespace {

fs::path scratch(const std::string& name) {
    const fs::path dir = fs::temp_directory_path() / ("bezierflow_test_" + name);
    fs::remove_all(dir);
    fs::create_directories(dir);
    return dir;
}

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    return {std::istreambuf_iterator<char>(in), {}};
}

json small_config() {
    return json::parse(R"({
        "seed": 3,
        "degree": 6,
        "gmm": {"preset": "ring", "modes": 8, "radius": 8.0, "stddev": 0.5},
        "train": {"nfe": 3, "method": "rk1", "train_count": 16, "val_count": 16, "epochs": 2, "batch_size": 8, "lr": 0.05},
        "eval": {"nfe": [3], "count": 20, "target_count": 50, "plot_trajectories": 2}
    })");
}

fs::path write_config(const fs::path& dir, const json& doc) {
    const fs::path p = dir / "config.json";
    std::ofstream(p) << doc.dump(2);
    return p;
}

}  // namespace

TEST_SUITE("harness") {

TEST_CASE("scheduler persistence") {
    const Scheduler s = Scheduler::bezier(LogitVector({0.1, 2.0, -1.0}), LogitVector({0.0, 0.5, 0.3}));
    const Scheduler back = scheduler_from_json(scheduler_to_json(s));
    for (double t : {0.0, 0.2, 0.5, 0.9, 1.0}) CHECK(back.eval(t).alpha == doctest::Approx(s.eval(t).alpha).epsilon(1e-15));
    CHECK(scheduler_from_json(scheduler_to_json(Scheduler::vp())).kind() == SchedulerKind::vp);

    json broken = scheduler_to_json(s);
    broken["control_points_alpha"][1] = 0.9;
    broken["control_points_alpha"][2] = 0.1;
    CHECK_THROWS_AS(scheduler_from_json(broken), SchedulerFormatError);
    CHECK_THROWS_AS(scheduler_from_json(json::parse(R"({"kind": "cubic"})")), SchedulerFormatError);
}

TEST_CASE("config parsing") {
    const auto cfg = parse_experiment_config(small_config());
    CHECK(cfg.train.degree == 6);
    CHECK(cfg.eval_count == 20);
    json missing = small_config();
    missing.erase("gmm");
    CHECK_THROWS_WITH_AS(parse_experiment_config(missing), doctest::Contains("gmm"), ConfigError);
    json odd = small_config();
    odd["train"]["method"] = "rk2";
    CHECK_THROWS_AS(parse_experiment_config(odd), ConfigError);
    CHECK(steps_for_nfe(10, FixedMethod::rk2) == 5);
    CHECK_THROWS_AS(steps_for_nfe(5, FixedMethod::rk2), std::invalid_argument);
}

TEST_CASE("metrics") {
    const auto xs = sample_target(GmmSpec::ring(8, 8.0, 0.5), 400, 1);
    const auto ys = sample_target(GmmSpec::ring(8, 8.0, 0.5), 400, 2);
    const auto zs = sample_source(2, 400, 3);
    const double same = energy_distance(xs, ys);
    const double other = energy_distance(xs, zs);
    CHECK(same >= 0.0);
    CHECK(same < 0.1 * other);
    CHECK(energy_distance(xs, xs) == doctest::Approx(0.0));
    CHECK(mean_squared_error(xs, xs) == 0.0);
}

TEST_CASE("svg rendering") {
    const std::string empty = render_trajectories_svg({});
    CHECK(empty.find("<svg") != std::string::npos);
    CHECK(empty.find("</svg>") != std::string::npos);
    const auto gallery = gallery_control_vectors();
    REQUIRE(gallery.size() == 4);
    for (const auto& c : gallery) {
        CHECK(c.degree() == 8);
        CHECK(bezier_eval(c, 0.0) == 0.0);
        CHECK(bezier_eval(c, 1.0) == 1.0);
    }
    // Distinct curves: they differ at the midpoint.
    for (std::size_t i = 0; i < gallery.size(); ++i) {
        for (std::size_t j = i + 1; j < gallery.size(); ++j) {
            CHECK(std::abs(bezier_eval(gallery[i], 0.3) - bezier_eval(gallery[j], 0.3)) > 0.01);
        }
    }
    CHECK(render_gallery_svg() == render_gallery_svg());
}

TEST_CASE("train, eval and plot commands") {
    const fs::path dir = scratch("commands");
    CommandOptions o;
    o.config = write_config(dir, small_config());
    o.out = dir / "train";
    std::ostringstream out, err;
    REQUIRE(cmd_train(o, out, err) == kExitOk);
    for (const char* f : {"run_report.json", "scheduler.json", "loss_curve.csv"}) CHECK(fs::exists(dir / "train" / f));
    const std::string first = slurp(dir / "train" / "run_report.json");
    REQUIRE(cmd_train(o, out, err) == kExitOk);
    CHECK(slurp(dir / "train" / "run_report.json") == first);

    CommandOptions e = o;
    e.out = dir / "eval";
    e.scheduler = dir / "train" / "scheduler.json";
    e.nfe = {3, 5};
    REQUIRE(cmd_eval(e, out, err) == kExitOk);
    const json report = json::parse(slurp(dir / "eval" / "eval_report.json"));
    CHECK(report["rows"].size() == 2);

    CommandOptions p;
    p.out = dir / "plot";
    p.inputs = {dir / "eval" / "trajectories_teacher.csv", dir / "eval" / "trajectories_trained.csv"};
    p.scheduler = e.scheduler;
    CHECK(cmd_plot(p, out, err) == kExitOk);
    CHECK(fs::exists(dir / "plot" / "trajectories.svg"));
    CHECK(fs::exists(dir / "plot" / "scheduler.svg"));
}

TEST_CASE("eval at a very large budget converges to the teacher") {
    const fs::path dir = scratch("convergence");
    json doc = small_config();
    doc["train"]["method"] = "rk2";
    doc["train"]["nfe"] = 4;
    doc["eval"]["plot_trajectories"] = 0;
    doc["eval"]["nfe"] = {4};
    const Scheduler linear = Scheduler::linear();
    save_scheduler(linear, dir / "linear.json");
    CommandOptions e;
    e.config = write_config(dir, doc);
    e.scheduler = dir / "linear.json";
    e.out = dir / "eval";
    e.nfe = {512};
    std::ostringstream out, err;
    REQUIRE(cmd_eval(e, out, err) == kExitOk);
    const json report = json::parse(slurp(dir / "eval" / "eval_report.json"));
    CHECK(report["rows"][0]["mse_learned"].get<double>() < 1e-4);
}

TEST_CASE("exit codes") {
    const fs::path dir = scratch("exit");
    std::ostringstream out, err;
    json missing = small_config();
    missing.erase("gmm");
    CommandOptions o;
    o.config = write_config(dir, missing);
    o.out = dir / "out";
    CHECK(cmd_train(o, out, err) == kExitUsage);
    CHECK(err.str().find("gmm") != std::string::npos);

    CommandOptions e;
    e.out = dir / "out";
    CHECK(cmd_eval(e, out, err) == kExitUsage);

    std::ofstream(dir / "bad.json") << R"({"kind": "bezier", "degree": 2, "logits_alpha": [1, 1], "logits_sigma": [1, 1],
        "control_points_alpha": [0, 0.9, 1], "control_points_sigma": [0, 0.5, 1]})";
    e.scheduler = dir / "bad.json";
    CHECK(cmd_eval(e, out, err) == kExitFailure);

    CommandOptions f;
    f.out = dir / "fit";
    f.timesteps = {0.0, 0.1, 0.2, 1.0};
    CHECK(cmd_fit_timesteps(f, out, err) == kExitOk);
    f.timesteps = {0.0, 0.5, 0.4, 1.0};
    CHECK(cmd_fit_timesteps(f, out, err) == kExitUsage);

    CommandOptions v;
    v.inject_fault = "bogus";
    CHECK(cmd_verify(v, out, err) == kExitUsage);
}

TEST_CASE("verify summary and fault injection") {
    std::ostringstream out, err;
    CommandOptions v;
    v.inject_fault = "nonmonotone";
    CHECK(cmd_verify(v, out, err) == kExitFailure);
    const std::string text = out.str();
    CHECK(text.find("FAIL transform.endpoint_preservation") != std::string::npos);
    const auto lines = static_cast<std::size_t>(std::count(text.begin(), text.end(), '\n'));
    CHECK(lines == property_names().size() + 1);
}

}
