#include "bezierflow/svg.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <sstream>

namespace bezierflow {

namespace {

constexpr const char* kPalette[] = {"#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b"};

std::string num(double v) {
    char buf[64];
    const double rounded = std::round(v * 1000.0) / 1000.0;
    std::snprintf(buf, sizeof buf, "%.3f", rounded == 0.0 ? 0.0 : rounded);
    return buf;
}

std::string escape(const std::string& text) {
    std::string out;
    for (char c : text) {
        switch (c) {
            case '<': out += "&lt;"; break;
            case '>': out += "&gt;"; break;
            case '&': out += "&amp;"; break;
            case '"': out += "&quot;"; break;
            default: out += c;
        }
    }
    return out;
}

// Maps data coordinates into a pixel box with y pointing up.
struct Frame {
    double x0, y0, width, height;
    double xmin, xmax, ymin, ymax;

    double px(double x) const { return x0 + (x - xmin) / (xmax - xmin) * width; }
    double py(double y) const { return y0 + height - (y - ymin) / (ymax - ymin) * height; }
};

class Canvas {
public:
    Canvas(double width, double height) {
        out_ << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << num(width) << "\" height=\"" << num(height)
             << "\" viewBox=\"0 0 " << num(width) << ' ' << num(height) << "\">\n";
        out_ << "<rect x=\"0\" y=\"0\" width=\"" << num(width) << "\" height=\"" << num(height)
             << "\" fill=\"white\"/>\n";
    }

    void polyline(const std::vector<std::pair<double, double>>& pts, const std::string& color, double stroke,
                  const std::string& dash = {}) {
        out_ << "<polyline fill=\"none\" stroke=\"" << color << "\" stroke-width=\"" << num(stroke) << '"';
        if (!dash.empty()) out_ << " stroke-dasharray=\"" << dash << '"';
        out_ << " points=\"";
        for (std::size_t i = 0; i < pts.size(); ++i) {
            if (i) out_ << ' ';
            out_ << num(pts[i].first) << ',' << num(pts[i].second);
        }
        out_ << "\"/>\n";
    }

    void circle(double x, double y, double r, const std::string& color) {
        out_ << "<circle cx=\"" << num(x) << "\" cy=\"" << num(y) << "\" r=\"" << num(r) << "\" fill=\"" << color
             << "\"/>\n";
    }

    void text(double x, double y, const std::string& content, const std::string& color = "black") {
        out_ << "<text x=\"" << num(x) << "\" y=\"" << num(y) << "\" font-family=\"sans-serif\" font-size=\"12\" fill=\""
             << color << "\">" << escape(content) << "</text>\n";
    }

    void box(const Frame& f) {
        out_ << "<rect x=\"" << num(f.x0) << "\" y=\"" << num(f.y0) << "\" width=\"" << num(f.width)
             << "\" height=\"" << num(f.height) << "\" fill=\"none\" stroke=\"#999999\" stroke-width=\"1.000\"/>\n";
    }

    std::string finish() {
        out_ << "</svg>\n";
        return out_.str();
    }

private:
    std::ostringstream out_;
};

}  // namespace

std::string render_trajectories_svg(std::span<const TrajectoryFile> files) {
    constexpr double kSize = 480.0, kMargin = 30.0;
    Canvas canvas(kSize, kSize + 20.0 * static_cast<double>(files.size()));

    double lo = std::numeric_limits<double>::infinity();
    double hi = -lo;
    for (const auto& file : files) {
        for (const auto& traj : file.trajectories) {
            for (const auto& x : traj.states) {
                if (x.size() < 2) continue;
                lo = std::min({lo, x[0], x[1]});
                hi = std::max({hi, x[0], x[1]});
            }
        }
    }
    if (!(lo < hi)) {
        lo = -1.0;
        hi = 1.0;
    }
    const double pad = 0.05 * (hi - lo);
    const Frame frame{kMargin, kMargin, kSize - 2 * kMargin, kSize - 2 * kMargin, lo - pad, hi + pad, lo - pad, hi + pad};
    canvas.box(frame);

    for (std::size_t f = 0; f < files.size(); ++f) {
        const std::string color = kPalette[f % std::size(kPalette)];
        for (const auto& traj : files[f].trajectories) {
            std::vector<std::pair<double, double>> pts;
            for (const auto& x : traj.states) {
                if (x.size() >= 2) pts.emplace_back(frame.px(x[0]), frame.py(x[1]));
            }
            if (pts.empty()) continue;
            canvas.polyline(pts, color, 1.0);
            canvas.circle(pts.back().first, pts.back().second, 2.0, color);
        }
        const std::string label = files[f].label.empty() ? "series " + std::to_string(f) : files[f].label;
        canvas.text(kMargin, kSize + 20.0 * static_cast<double>(f), label + " (nfe=" + std::to_string(files[f].nfe) + ")",
                    color);
    }
    return canvas.finish();
}

namespace {

void draw_curve(Canvas& canvas, const Frame& frame, const ControlVector& points, bool complement,
                const std::string& color) {
    std::vector<std::pair<double, double>> pts;
    constexpr int kSamples = 200;
    for (int i = 0; i <= kSamples; ++i) {
        const double s = static_cast<double>(i) / kSamples;
        const double v = bezier_eval(points, s);
        pts.emplace_back(frame.px(s), frame.py(complement ? 1.0 - v : v));
    }
    canvas.polyline(pts, color, 2.0);
    const int n = points.degree();
    for (int i = 0; i <= n; ++i) {
        const double v = complement ? 1.0 - points[i] : points[i];
        canvas.circle(frame.px(static_cast<double>(i) / n), frame.py(v), 3.0, color);
    }
}

}  // namespace

std::string render_scheduler_svg(const Scheduler& sched) {
    constexpr double kSize = 480.0, kMargin = 40.0;
    Canvas canvas(kSize, kSize);
    const Frame frame{kMargin, kMargin, kSize - 2 * kMargin, kSize - 2 * kMargin, 0.0, 1.0, 0.0, 1.0};
    canvas.box(frame);
    if (sched.kind() == SchedulerKind::bezier) {
        draw_curve(canvas, frame, *sched.alpha_points(), false, kPalette[0]);
        draw_curve(canvas, frame, *sched.sigma_points(), true, kPalette[1]);
    } else {
        std::vector<std::pair<double, double>> alpha, sigma;
        for (int i = 0; i <= 200; ++i) {
            const double s = i / 200.0;
            const auto v = sched.eval(s);
            alpha.emplace_back(frame.px(s), frame.py(v.alpha));
            sigma.emplace_back(frame.px(s), frame.py(v.sigma));
        }
        canvas.polyline(alpha, kPalette[0], 2.0);
        canvas.polyline(sigma, kPalette[1], 2.0);
    }
    canvas.text(kMargin, kMargin - 10.0, "alpha(s)", kPalette[0]);
    canvas.text(kMargin + 80.0, kMargin - 10.0, "sigma(s)", kPalette[1]);
    canvas.text(kMargin, kSize - 10.0, std::string("kind=") + std::string(to_string(sched.kind())));
    return canvas.finish();
}

std::vector<ControlVector> gallery_control_vectors() {
    return {
        ControlVector({0.0, 0.125, 0.25, 0.375, 0.5, 0.625, 0.75, 0.875, 1.0}),  // uniform: identity curve
        ControlVector({0.0, 0.0, 0.0, 0.0, 0.05, 0.1, 0.3, 0.6, 1.0}),         // slow start
        ControlVector({0.0, 0.4, 0.7, 0.9, 0.95, 1.0, 1.0, 1.0, 1.0}),         // fast start
        ControlVector({0.0, 0.0, 0.0, 0.5, 0.5, 0.5, 1.0, 1.0, 1.0}),          // plateau in the middle
    };
}

std::string render_gallery_svg() {
    constexpr double kPanel = 220.0, kMargin = 20.0;
    const auto curves = gallery_control_vectors();
    Canvas canvas(kPanel * static_cast<double>(curves.size()), kPanel);
    for (std::size_t k = 0; k < curves.size(); ++k) {
        const Frame frame{kPanel * static_cast<double>(k) + kMargin, kMargin, kPanel - 2 * kMargin,
                          kPanel - 2 * kMargin, 0.0, 1.0, 0.0, 1.0};
        canvas.box(frame);
        draw_curve(canvas, frame, curves[k], false, kPalette[k % std::size(kPalette)]);
    }
    return canvas.finish();
}

}  // namespace bezierflow
