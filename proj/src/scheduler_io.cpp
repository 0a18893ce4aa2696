#include "bezierflow/scheduler_io.hpp"

#include <cmath>
#include <fstream>
#include <string>

namespace bezierflow {

using nlohmann::json;

json scheduler_to_json(const Scheduler& sched) {
    json doc;
    doc["kind"] = std::string(to_string(sched.kind()));
    doc["degree"] = sched.degree();
    doc["logits_alpha"] = json::array();
    doc["logits_sigma"] = json::array();
    if (sched.alpha_logits()) {
        const auto a = sched.alpha_logits()->values();
        const auto s = sched.sigma_logits()->values();
        doc["logits_alpha"] = std::vector<double>(a.begin(), a.end());
        doc["logits_sigma"] = std::vector<double>(s.begin(), s.end());
    }
    if (sched.kind() == SchedulerKind::bezier) {
        const auto a = sched.alpha_points()->points();
        const auto s = sched.sigma_points()->points();
        doc["control_points_alpha"] = std::vector<double>(a.begin(), a.end());
        doc["control_points_sigma"] = std::vector<double>(s.begin(), s.end());
    }
    return doc;
}

namespace {

std::vector<double> number_list(const json& doc, const char* key) {
    const auto& node = doc.at(key);
    if (!node.is_array()) throw SchedulerFormatError(std::string(key) + ": expected an array");
    std::vector<double> out;
    for (const auto& v : node) {
        if (!v.is_number()) throw SchedulerFormatError(std::string(key) + ": expected numbers");
        out.push_back(v.get<double>());
    }
    return out;
}

ControlVector checked_points(const json& doc, const char* key) {
    try {
        return ControlVector(number_list(doc, key));
    } catch (const std::invalid_argument& e) {
        throw SchedulerFormatError(std::string(key) + ": " + e.what());
    }
}

void check_agreement(const ControlVector& stored, const ControlVector& derived, const char* key) {
    if (stored.degree() != derived.degree()) throw SchedulerFormatError(std::string(key) + ": degree mismatch");
    for (int i = 0; i <= stored.degree(); ++i) {
        if (std::abs(stored[i] - derived[i]) > 1e-9) {
            throw SchedulerFormatError(std::string(key) + ": disagrees with logits at index " + std::to_string(i));
        }
    }
}

}  // namespace

Scheduler scheduler_from_json(const json& doc) {
    try {
        if (!doc.is_object()) throw SchedulerFormatError("scheduler document must be a JSON object");
        if (!doc.contains("kind")) throw SchedulerFormatError("kind: missing");
        const auto kind = scheduler_kind_from_string(doc.at("kind").get<std::string>());
        if (kind == SchedulerKind::linear) return Scheduler::linear();
        if (kind == SchedulerKind::vp) return Scheduler::vp();

        const bool has_logits = doc.contains("logits_alpha") && !doc.at("logits_alpha").empty();
        const bool has_points = doc.contains("control_points_alpha");
        std::optional<Scheduler> sched;
        if (has_logits) {
            const auto la = number_list(doc, "logits_alpha");
            const auto ls = number_list(doc, "logits_sigma");
            if (doc.contains("degree") && doc.at("degree").get<int>() != static_cast<int>(la.size())) {
                throw SchedulerFormatError("degree: does not match the number of logits");
            }
            sched = Scheduler::bezier(LogitVector(la), LogitVector(ls));
        }
        if (has_points) {
            const ControlVector pa = checked_points(doc, "control_points_alpha");
            const ControlVector ps = checked_points(doc, "control_points_sigma");
            if (sched) {
                check_agreement(pa, *sched->alpha_points(), "control_points_alpha");
                check_agreement(ps, *sched->sigma_points(), "control_points_sigma");
            } else {
                sched = Scheduler::bezier_from_points(pa, ps);
            }
        }
        if (!sched) throw SchedulerFormatError("bezier scheduler needs logits or control points");
        return *sched;
    } catch (const json::exception& e) {
        throw SchedulerFormatError(std::string("malformed scheduler document: ") + e.what());
    } catch (const std::invalid_argument& e) {
        throw SchedulerFormatError(e.what());
    } catch (const std::domain_error& e) {
        throw SchedulerFormatError(e.what());
    }
}

void save_scheduler(const Scheduler& sched, const std::filesystem::path& path) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write " + path.string());
    out << scheduler_to_json(sched).dump(2) << "\n";
}

Scheduler load_scheduler(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw SchedulerFormatError("cannot read " + path.string());
    json doc;
    try {
        doc = json::parse(in);
    } catch (const json::exception& e) {
        throw SchedulerFormatError(path.string() + ": " + e.what());
    }
    return scheduler_from_json(doc);
}

}  // namespace bezierflow
