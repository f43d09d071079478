#pragma once

// JSON forms of the library types shared by the CLI and the service.

#include <nlohmann/json.hpp>

#include "sabd/grasp.hpp"
#include "sabd/retargeting.hpp"

namespace sabd {

namespace detail {

inline const nlohmann::json& member(const nlohmann::json& j, const char* key, const std::string& where) {
    if (!j.is_object() || !j.contains(key)) throw ParseError(where + ": missing '" + key + "'");
    return j.at(key);
}

inline double number(const nlohmann::json& j, const std::string& where) {
    if (!j.is_number()) throw ParseError(where + ": expected a number");
    return j.get<double>();
}

inline Vec3 vec3(const nlohmann::json& j, const std::string& where) {
    if (!j.is_array() || j.size() != 3) throw ParseError(where + ": expected [x, y, z]");
    return {number(j[0], where + "[0]"), number(j[1], where + "[1]"), number(j[2], where + "[2]")};
}

}  // namespace detail

inline nlohmann::json to_json(const Vec3& v) { return {v.x(), v.y(), v.z()}; }

/// Joint values keyed by name.
inline nlohmann::json to_json(const JointVector& q) {
    nlohmann::json j = nlohmann::json::object();
    for (std::size_t i = 0; i < q.size(); ++i) j[q.name(i)] = q[i];
    return j;
}

/// Missing joints take their neutral angle.
inline JointVector joint_vector_from_json(const HandModel& model, const nlohmann::json& j) {
    if (!j.is_object()) throw ParseError("q: expected an object of joint angles");
    JointVector q = model.neutral_vector();
    for (const auto& [name, v] : j.items()) q.set(name, detail::number(v, "q." + name));
    return q;
}

inline nlohmann::json to_json(const KeypointFrame& f) {
    nlohmann::json pts = nlohmann::json::array();
    for (const auto& p : f.landmarks) pts.push_back(to_json(p));
    return {{"timestamp", f.timestamp}, {"landmarks", pts}};
}

inline KeypointFrame keypoint_frame_from_json(const nlohmann::json& j, const std::string& where = "frame") {
    KeypointFrame f;
    f.timestamp = detail::number(detail::member(j, "timestamp", where), where + ".timestamp");
    const auto& pts = detail::member(j, "landmarks", where);
    if (!pts.is_array() || pts.size() != kLandmarkCount)
        throw ParseError(where + ".landmarks: expected " + std::to_string(kLandmarkCount) + " points");
    for (int i = 0; i < kLandmarkCount; ++i)
        f.landmarks[static_cast<std::size_t>(i)] = detail::vec3(pts[static_cast<std::size_t>(i)], where + ".landmarks[" + std::to_string(i) + "]");
    check_frame(f);
    return f;
}

inline nlohmann::json to_json(const RetargetResult& r) {
    return {{"timestamp", r.timestamp}, {"q", to_json(r.q)}, {"converged", r.converged}, {"energy", r.energy},
            {"iterations", r.iterations}};
}

/// Overrides on top of default_retarget_config; keyvectors and optimized
/// joints are replaced wholesale when present.
inline RetargetConfig retarget_config_from_json(const HandModel& model, const nlohmann::json& j) {
    RetargetConfig c = default_retarget_config(model);
    if (j.is_null()) return c;
    if (!j.is_object()) throw ParseError("config: expected an object");
    for (const auto& [key, v] : j.items()) {
        const std::string where = "config." + key;
        if (key == "abduction_gain") c.abduction_gain = detail::number(v, where);
        else if (key == "smoothing") c.smoothing = detail::number(v, where);
        else if (key == "tolerance") c.tolerance = detail::number(v, where);
        else if (key == "max_iterations") c.max_iterations = static_cast<int>(detail::number(v, where));
        else if (key == "optimized_joints") c.optimized_joints = v.get<std::vector<std::string>>();
        else if (key == "keyvectors") {
            c.keyvectors.clear();
            for (const auto& k : v) {
                KeyVectorDef d;
                d.source = k.at("source").get<std::array<std::string, 2>>();
                d.target = k.contains("target") ? k.at("target").get<std::array<std::string, 2>>() : d.source;
                d.name = k.value("name", d.source[0] + ">" + d.source[1]);
                d.weight = k.value("weight", 1.0);
                d.abduction = k.value("abduction", false);
                c.keyvectors.push_back(d);
            }
        } else
            throw ParseError(where + ": unknown field");
    }
    validate_config(c, model);
    return c;
}

inline nlohmann::json to_json(const RetargetConfig& c) {
    nlohmann::json kv = nlohmann::json::array();
    for (const auto& k : c.keyvectors)
        kv.push_back({{"name", k.name}, {"source", k.source}, {"target", k.target}, {"weight", k.weight}, {"abduction", k.abduction}});
    return {{"abduction_gain", c.abduction_gain}, {"smoothing", c.smoothing}, {"tolerance", c.tolerance},
            {"max_iterations", c.max_iterations}, {"optimized_joints", c.optimized_joints}, {"keyvectors", kv}};
}

inline nlohmann::json to_json(const FingertipPoses& p) {
    static const char* names[] = {"thumb", "index", "middle", "ring", "pinky"};
    nlohmann::json digits = nlohmann::json::array();
    for (int d = 0; d < kDigitCount; ++d) {
        const auto& f = p.digits[static_cast<std::size_t>(d)];
        const Eigen::Quaterniond r(f.distal.rotation());
        digits.push_back({{"digit", d + 1},
                          {"name", names[d]},
                          {"tip", to_json(f.tip)},
                          {"distal_position", to_json(f.distal.translation())},
                          {"distal_quaternion", {r.w(), r.x(), r.y(), r.z()}}});
    }
    return {{"fingertips", digits}};
}

inline nlohmann::json to_json(const ContactSet& s) {
    nlohmann::json contacts = nlohmann::json::array();
    for (const auto& c : s.contacts) {
        nlohmann::json row = {{"patch", c.patch}, {"digit", c.digit}, {"position", to_json(c.position)},
                              {"normal", to_json(c.normal)}, {"mu", c.mu}};
        row["max_normal_force"] = std::isfinite(c.max_normal_force) ? nlohmann::json(c.max_normal_force) : nlohmann::json(nullptr);
        contacts.push_back(row);
    }
    return {{"object", {{"kind", s.object.kind == ObjectKind::sphere ? "sphere" : "parallel_plates"},
                        {"size_mm", s.object.size},
                        {"center", to_json(s.object.pose.translation())}}},
            {"up", to_json(s.up)},
            {"contacts", contacts}};
}

inline nlohmann::json to_json(const SphereGrasp& g) {
    return {{"contact_set", to_json(g.contacts)}, {"q", to_json(g.q)}, {"coverage_gap", g.coverage_gap},
            {"digit_contacts", g.digit_contacts}};
}

inline nlohmann::json to_json(const ParallelGrasp& g) {
    return {{"distance_mm", g.distance}, {"plate_normal", to_json(g.plate_normal)}, {"side_one", g.side_one},
            {"side_two", g.side_two}, {"q", to_json(g.q)}};
}

inline nlohmann::json to_json(const PinchResult& p, int digit) {
    return {{"digit", digit}, {"achievable", p.achievable}, {"residual_mm", p.residual}, {"q", to_json(p.q)}};
}

}  // namespace sabd
