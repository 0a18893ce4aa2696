#include "bezierflow/ode.hpp"

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <istream>
#include <ostream>
#include <sstream>

namespace bezierflow {

std::string_view to_string(FixedMethod method) { return method == FixedMethod::rk1 ? "rk1" : "rk2"; }

FixedMethod fixed_method_from_string(std::string_view name) {
    if (name == "rk1" || name == "euler") return FixedMethod::rk1;
    if (name == "rk2" || name == "midpoint") return FixedMethod::rk2;
    throw std::invalid_argument("unknown fixed-step method '" + std::string(name) + "'");
}

int evals_per_step(FixedMethod method) { return method == FixedMethod::rk1 ? 1 : 2; }

Trajectory integrate_fixed(const VelocityFn& field, const State& x0, const TimeGrid& grid, FixedMethod method,
                           std::span<const double> time_offsets) {
    const auto& times = grid.times();
    const std::size_t steps = times.size() - 1;
    if (!time_offsets.empty() && time_offsets.size() != steps) {
        throw std::invalid_argument("integrate_fixed: need one time offset per step");
    }
    Trajectory traj;
    traj.times = times;
    traj.states.reserve(times.size());
    traj.states.push_back(x0);

    State x = x0;
    for (std::size_t i = 0; i < steps; ++i) {
        const double s = times[i];
        const double h = times[i + 1] - s;
        const double shift = time_offsets.empty() ? 0.0 : time_offsets[i];
        auto model_time = [shift](double t) { return std::clamp(t + shift, 0.0, 1.0); };

        if (method == FixedMethod::rk1) {
            x = x + h * field(x, model_time(s));
            traj.nfe += 1;
        } else {
            const State mid = x + (0.5 * h) * field(x, model_time(s));
            x = x + h * field(mid, model_time(s + 0.5 * h));
            traj.nfe += 2;
        }
        traj.states.push_back(x);
    }
    return traj;
}

namespace {

// Dormand-Prince 5(4) tableau.
constexpr double c2 = 1.0 / 5, c3 = 3.0 / 10, c4 = 4.0 / 5, c5 = 8.0 / 9;
constexpr double a21 = 1.0 / 5;
constexpr double a31 = 3.0 / 40, a32 = 9.0 / 40;
constexpr double a41 = 44.0 / 45, a42 = -56.0 / 15, a43 = 32.0 / 9;
constexpr double a51 = 19372.0 / 6561, a52 = -25360.0 / 2187, a53 = 64448.0 / 6561, a54 = -212.0 / 729;
constexpr double a61 = 9017.0 / 3168, a62 = -355.0 / 33, a63 = 46732.0 / 5247, a64 = 49.0 / 176,
                 a65 = -5103.0 / 18656;
constexpr double a71 = 35.0 / 384, a73 = 500.0 / 1113, a74 = 125.0 / 192, a75 = -2187.0 / 6784,
                 a76 = 11.0 / 84;
// Difference between the 5th- and 4th-order weights.
constexpr double e1 = 71.0 / 57600, e3 = -71.0 / 16695, e4 = 71.0 / 1920, e5 = -17253.0 / 339200,
                 e6 = 22.0 / 525, e7 = -1.0 / 40;

double error_norm(const State& err, const State& y0, const State& y1, double rtol, double atol) {
    double acc = 0.0;
    for (Eigen::Index i = 0; i < err.size(); ++i) {
        const double scale = atol + rtol * std::max(std::abs(y0[i]), std::abs(y1[i]));
        const double r = err[i] / scale;
        acc += r * r;
    }
    return std::sqrt(acc / static_cast<double>(err.size()));
}

}  // namespace

AdaptiveResult integrate_adaptive(const VelocityFn& field, const State& x0, double s0, double s1,
                                  const AdaptiveOptions& opts) {
    if (!(s0 < s1)) throw std::invalid_argument("integrate_adaptive: need s0 < s1");
    if (!(opts.rtol > 0.0) || !(opts.atol >= 0.0)) throw std::invalid_argument("integrate_adaptive: bad tolerances");

    constexpr double kMinStep = 1e-12;
    constexpr double kSafety = 0.9, kFacMin = 0.2, kFacMax = 10.0;
    constexpr double kBeta = 0.04, kExpo = 0.2 - kBeta * 0.75;

    AdaptiveResult out;
    if (opts.record) {
        out.trajectory.emplace();
        out.trajectory->times.push_back(s0);
        out.trajectory->states.push_back(x0);
    }

    State y = x0;
    double s = s0;
    State k1 = field(y, s);
    out.nfe = 1;

    // Initial step from the derivative scale.
    double h;
    {
        const State sc = (opts.atol + opts.rtol * y.array().abs()).matrix();
        const double d0 = (y.array() / sc.array()).matrix().norm() / std::sqrt(double(y.size()));
        const double d1 = (k1.array() / sc.array()).matrix().norm() / std::sqrt(double(y.size()));
        h = (d0 < 1e-5 || d1 < 1e-5) ? 1e-6 : 0.01 * d0 / d1;
        h = std::min(h, s1 - s0);
    }

    double err_prev = 1e-4;
    bool last_rejected = false;
    while (s < s1) {
        if (out.accepted + out.rejected >= opts.max_steps) {
            throw StiffnessError("integrate_adaptive: step budget exhausted");
        }
        bool final_step = false;
        if (s + h >= s1) {
            h = s1 - s;
            final_step = true;
        }
        if (h < kMinStep) throw StiffnessError("integrate_adaptive: step size underflow");

        const State k2 = field(y + h * (a21 * k1), s + c2 * h);
        const State k3 = field(y + h * (a31 * k1 + a32 * k2), s + c3 * h);
        const State k4 = field(y + h * (a41 * k1 + a42 * k2 + a43 * k3), s + c4 * h);
        const State k5 = field(y + h * (a51 * k1 + a52 * k2 + a53 * k3 + a54 * k4), s + c5 * h);
        const State k6 = field(y + h * (a61 * k1 + a62 * k2 + a63 * k3 + a64 * k4 + a65 * k5),
                               final_step ? s1 : s + h);
        const State y_new = y + h * (a71 * k1 + a73 * k3 + a74 * k4 + a75 * k5 + a76 * k6);
        const double s_new = final_step ? s1 : s + h;
        const State k7 = field(y_new, s_new);
        out.nfe += 6;

        const State err = h * (e1 * k1 + e3 * k3 + e4 * k4 + e5 * k5 + e6 * k6 + e7 * k7);
        const double en = error_norm(err, y, y_new, opts.rtol, opts.atol);
        if (!std::isfinite(en)) throw StiffnessError("integrate_adaptive: non-finite error estimate");

        if (en <= 1.0) {
            const double e = std::max(en, 1e-10);
            double fac = std::pow(e, kExpo) / std::pow(err_prev, kBeta) / kSafety;
            fac = std::clamp(fac, 1.0 / kFacMax, 1.0 / kFacMin);
            double h_next = h / fac;
            if (last_rejected) h_next = std::min(h_next, h);
            err_prev = std::max(en, 1e-4);
            y = y_new;
            s = s_new;
            k1 = k7;
            ++out.accepted;
            last_rejected = false;
            if (out.trajectory) {
                out.trajectory->times.push_back(s);
                out.trajectory->states.push_back(y);
            }
            h = h_next;
        } else {
            const double fac = std::min(1.0 / kFacMin, std::pow(en, kExpo) / kSafety);
            h = h / fac;
            ++out.rejected;
            last_rejected = true;
        }
    }
    out.endpoint = y;
    if (out.trajectory) out.trajectory->nfe = out.nfe;
    return out;
}

Trajectory solve_student(const TransformContext& ctx, const VelocityFn& source_field, const State& x0,
                         const TimeGrid& grid, FixedMethod method, std::span<const double> time_offsets) {
    const VelocityFn student = [&ctx, &source_field](const State& xbar, double s) {
        return ctx.transformed_velocity(source_field, s, xbar);
    };
    return integrate_fixed(student, x0, grid, method, time_offsets);
}

void write_trajectories_csv(std::ostream& out, std::span<const Trajectory> trajectories, std::string_view label) {
    const int nfe = trajectories.empty() ? 0 : trajectories.front().nfe;
    const Eigen::Index dim = trajectories.empty() ? 0 : trajectories.front().states.front().size();
    out << "# label=" << label << "\n# nfe=" << nfe << "\n";
    out << "id,time";
    for (Eigen::Index d = 0; d < dim; ++d) out << ",x" << d;
    out << "\n";
    std::ostringstream row;
    row << std::setprecision(17);
    for (std::size_t id = 0; id < trajectories.size(); ++id) {
        const auto& traj = trajectories[id];
        for (std::size_t i = 0; i < traj.times.size(); ++i) {
            row.str("");
            row << id << ',' << traj.times[i];
            for (Eigen::Index d = 0; d < traj.states[i].size(); ++d) row << ',' << traj.states[i][d];
            out << row.str() << "\n";
        }
    }
}

TrajectoryFile read_trajectories_csv(std::istream& in) {
    TrajectoryFile file;
    std::string line;
    int line_no = 0;
    bool header_seen = false;
    long dim = -1;
    auto fail = [&line_no](const std::string& what) {
        throw std::runtime_error("trajectory csv line " + std::to_string(line_no) + ": " + what);
    };
    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty()) continue;
        if (line.front() == '#') {
            const auto eq = line.find('=');
            if (eq == std::string::npos) continue;
            const std::string key = line.substr(1, eq - 1);
            const std::string value = line.substr(eq + 1);
            if (key.find("label") != std::string::npos) file.label = value;
            if (key.find("nfe") != std::string::npos) {
                try {
                    file.nfe = std::stoi(value);
                } catch (const std::exception&) {
                    fail("bad nfe value");
                }
            }
            continue;
        }
        if (!header_seen) {
            if (line.rfind("id,time", 0) != 0) fail("expected header 'id,time,...'");
            dim = std::count(line.begin(), line.end(), ',') - 1;
            if (dim < 1) fail("header has no state columns");
            header_seen = true;
            continue;
        }
        std::vector<double> fields;
        std::stringstream ss(line);
        std::string cell;
        while (std::getline(ss, cell, ',')) {
            try {
                std::size_t used = 0;
                fields.push_back(std::stod(cell, &used));
                if (used != cell.size()) fail("trailing characters in '" + cell + "'");
            } catch (const std::invalid_argument&) {
                fail("not a number: '" + cell + "'");
            } catch (const std::out_of_range&) {
                fail("number out of range: '" + cell + "'");
            }
        }
        if (static_cast<long>(fields.size()) != dim + 2) fail("expected " + std::to_string(dim + 2) + " columns");
        const double id_value = fields[0];
        if (id_value < 0 || id_value != std::floor(id_value)) fail("id must be a nonnegative integer");
        const auto id = static_cast<std::size_t>(id_value);
        if (id > file.trajectories.size()) fail("trajectory ids must be contiguous");
        if (id == file.trajectories.size()) file.trajectories.emplace_back();
        auto& traj = file.trajectories[id];
        if (!traj.times.empty() && !(fields[1] > traj.times.back())) fail("times must increase within a trajectory");
        traj.times.push_back(fields[1]);
        State x(dim);
        for (long d = 0; d < dim; ++d) x[d] = fields[static_cast<std::size_t>(d) + 2];
        traj.states.push_back(std::move(x));
        traj.nfe = file.nfe;
    }
    return file;
}

}  // namespace bezierflow
