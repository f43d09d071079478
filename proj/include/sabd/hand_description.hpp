#pragma once

// Reading and writing the hand-description document (schema "sabd-hand/1").
//
// The document is JSON. Lengths are millimetres, angles radians. Field
// reference is in README.md.

#include <fstream>
#include <sstream>
#include <string>

#include <nlohmann/json.hpp>

#include "sabd/default_hand.hpp"
#include "sabd/hand_model.hpp"
#include "sabd/transmission.hpp"

namespace sabd {

inline constexpr const char* kHandSchema = "sabd-hand/1";

namespace detail {

using nlohmann::json;

class Reader {
public:
    [[noreturn]] static void fail(const std::string& path, const std::string& what) {
        throw ParseError(path + ": " + what);
    }

    static const json& field(const json& obj, const std::string& path, const char* key) {
        if (!obj.is_object()) fail(path, "expected object");
        auto it = obj.find(key);
        if (it == obj.end()) fail(path + "." + key, "missing required field");
        return *it;
    }

    static const json* optional(const json& obj, const char* key) {
        auto it = obj.find(key);
        return it == obj.end() ? nullptr : &*it;
    }

    static double number(const json& v, const std::string& path) {
        if (!v.is_number()) fail(path, "expected number");
        return v.get<double>();
    }

    static std::string string(const json& v, const std::string& path) {
        if (!v.is_string()) fail(path, "expected string");
        return v.get<std::string>();
    }

    static Vec3 vec3(const json& v, const std::string& path) {
        if (!v.is_array() || v.size() != 3) fail(path, "expected array of 3 numbers");
        return {number(v[0], path + "[0]"), number(v[1], path + "[1]"), number(v[2], path + "[2]")};
    }

    static Interval interval(const json& v, const std::string& path) {
        if (!v.is_array() || v.size() != 2) fail(path, "expected [lo, hi]");
        return {number(v[0], path + "[0]"), number(v[1], path + "[1]")};
    }

    static Transform pose(const json& v, const std::string& path) {
        if (!v.is_object()) fail(path, "expected object with xyz/rpy");
        Vec3 xyz = Vec3::Zero(), rpy = Vec3::Zero();
        if (auto* p = optional(v, "xyz")) xyz = vec3(*p, path + ".xyz");
        if (auto* p = optional(v, "rpy")) rpy = vec3(*p, path + ".rpy");
        return make_transform(xyz, rpy);
    }

    static JointSpec joint(const json& v, const std::string& path) {
        JointSpec j;
        j.name = string(field(v, path, "name"), path + ".name");
        const auto kind = string(field(v, path, "kind"), path + ".kind");
        if (kind == "rolling_contact")
            j.kind = JointKind::rolling_contact;
        else if (kind == "revolute")
            j.kind = JointKind::revolute;
        else
            fail(path + ".kind", "expected \"rolling_contact\" or \"revolute\"");
        j.axis = vec3(field(v, path, "axis"), path + ".axis");
        if (auto* p = optional(v, "origin")) j.origin = pose(*p, path + ".origin");
        if (auto* p = optional(v, "rolling_radius")) j.rolling_radius = number(*p, path + ".rolling_radius");
        if (auto* p = optional(v, "link_dir")) j.link_dir = vec3(*p, path + ".link_dir");
        j.limits = interval(field(v, path, "limits"), path + ".limits");
        if (auto* p = optional(v, "neutral")) j.neutral = number(*p, path + ".neutral");
        return j;
    }

    static ContactPatch patch(const json& v, const std::string& path) {
        ContactPatch p;
        p.frame = string(field(v, path, "frame"), path + ".frame");
        p.center = vec3(field(v, path, "center"), path + ".center");
        p.normal = vec3(field(v, path, "normal"), path + ".normal");
        p.radius = number(field(v, path, "radius"), path + ".radius");
        return p;
    }

    template <class F>
    static void each(const json& arr, const std::string& path, F&& f) {
        if (!arr.is_array()) fail(path, "expected array");
        for (std::size_t i = 0; i < arr.size(); ++i) f(arr[i], path + "[" + std::to_string(i) + "]");
    }

    static TendonRole role(const json& v, const std::string& path) {
        const auto s = string(v, path);
        static const std::pair<const char*, TendonRole> kRoles[] = {
            {"flex_adduct", TendonRole::flex_adduct}, {"flex_abduct", TendonRole::flex_abduct},
            {"ext_adduct", TendonRole::ext_adduct},   {"ext_abduct", TendonRole::ext_abduct},
            {"flexor", TendonRole::flexor},           {"extensor", TendonRole::extensor},
            {"link", TendonRole::link}};
        for (const auto& [name, r] : kRoles)
            if (s == name) return r;
        fail(path, "unknown tendon role '" + s + "'");
    }

    static TransmissionSpec transmission(const json& v, const std::string& path) {
        TransmissionSpec t;
        const auto& a = field(v, path, "actuator");
        const std::string ap = path + ".actuator";
        t.actuator.stall_torque = number(field(a, ap, "stall_torque"), ap + ".stall_torque");
        t.actuator.no_load_speed = number(field(a, ap, "no_load_speed"), ap + ".no_load_speed");
        t.actuator.current_limit = number(field(a, ap, "current_limit"), ap + ".current_limit");
        t.actuator.spool_radius_agonist = number(field(a, ap, "spool_radius_agonist"), ap + ".spool_radius_agonist");
        t.actuator.spool_radius_antagonist =
            number(field(a, ap, "spool_radius_antagonist"), ap + ".spool_radius_antagonist");
        const auto& s = field(v, path, "spring");
        const std::string sp = path + ".spring";
        t.spring.rate = number(field(s, sp, "rate"), sp + ".rate");
        t.spring.pretension = number(field(s, sp, "pretension"), sp + ".pretension");
        t.spring.max_deflection = number(field(s, sp, "max_deflection"), sp + ".max_deflection");

        each(field(v, path, "routes"), path + ".routes", [&](const json& r, const std::string& rp) {
            TendonRoute route;
            route.name = string(field(r, rp, "name"), rp + ".name");
            route.role = role(field(r, rp, "role"), rp + ".role");
            each(field(r, rp, "via_points"), rp + ".via_points", [&](const json& vp, const std::string& vpp) {
                route.via_points.push_back(
                    {string(field(vp, vpp, "frame"), vpp + ".frame"), vec3(field(vp, vpp, "point"), vpp + ".point")});
            });
            each(field(r, rp, "crossed_joints"), rp + ".crossed_joints", [&](const json& c, const std::string& cp) {
                CrossedJoint cj;
                cj.joint = string(field(c, cp, "joint"), cp + ".joint");
                if (auto* p = optional(c, "sign")) cj.sign = number(*p, cp + ".sign") < 0 ? -1 : 1;
                if (auto* p = optional(c, "passive")) {
                    if (!p->is_boolean()) fail(cp + ".passive", "expected boolean");
                    cj.passive = p->get<bool>();
                }
                route.crossed_joints.push_back(cj);
            });
            if (auto* p = optional(r, "rest_length")) route.rest_length = number(*p, rp + ".rest_length");
            t.routes.push_back(std::move(route));
        });

        each(field(v, path, "motors"), path + ".motors", [&](const json& m, const std::string& mp) {
            MotorPairing pairing;
            pairing.name = string(field(m, mp, "name"), mp + ".name");
            const auto kind = string(field(m, mp, "kind"), mp + ".kind");
            if (kind == "tendon_pair")
                pairing.kind = MotorKind::tendon_pair;
            else if (kind == "crosswise_pair")
                pairing.kind = MotorKind::crosswise_pair;
            else if (kind == "linkage")
                pairing.kind = MotorKind::linkage;
            else
                fail(mp + ".kind", "expected tendon_pair, crosswise_pair or linkage");
            each(field(m, mp, "joints"), mp + ".joints",
                 [&](const json& j, const std::string& jp) { pairing.joints.push_back(string(j, jp)); });
            auto opt_string = [&](const char* key, std::string& out) {
                if (auto* p = optional(m, key)) out = string(*p, mp + "." + key);
            };
            opt_string("agonist", pairing.agonist);
            opt_string("antagonist", pairing.antagonist);
            opt_string("partner", pairing.partner);
            opt_string("partner_agonist", pairing.partner_agonist);
            opt_string("partner_antagonist", pairing.partner_antagonist);
            if (auto* p = optional(m, "linkage_ratio")) pairing.linkage_ratio = number(*p, mp + ".linkage_ratio");
            t.motors.push_back(std::move(pairing));
        });
        return t;
    }
};

inline json pose_json(const Transform& t) {
    const Vec3 xyz = t.translation();
    const Vec3 rpy = matrix_rpy(t.linear());
    return {{"xyz", {xyz.x(), xyz.y(), xyz.z()}}, {"rpy", {rpy.x(), rpy.y(), rpy.z()}}};
}

inline json vec_json(const Vec3& v) { return {v.x(), v.y(), v.z()}; }

inline json joint_json(const JointSpec& j) {
    json out{{"name", j.name},
             {"kind", to_string(j.kind)},
             {"axis", vec_json(j.axis)},
             {"origin", pose_json(j.origin)},
             {"limits", {j.limits.lo, j.limits.hi}},
             {"neutral", j.neutral}};
    if (j.kind == JointKind::rolling_contact) {
        out["rolling_radius"] = j.rolling_radius;
        out["link_dir"] = vec_json(j.link_dir);
    }
    return out;
}

inline json patch_json(const ContactPatch& p) {
    return {{"frame", p.frame}, {"center", vec_json(p.center)}, {"normal", vec_json(p.normal)}, {"radius", p.radius}};
}

}  // namespace detail

/// Parses a document into an unvalidated description. Throws ParseError with
/// a JSON path on schema violations.
inline HandDescription parse_hand_description(const std::string& text) {
    using detail::Reader;
    nlohmann::json doc;
    try {
        doc = nlohmann::json::parse(text);
    } catch (const nlohmann::json::parse_error& e) {
        throw ParseError(std::string("$: invalid JSON: ") + e.what());
    }
    HandDescription d;
    d.schema = Reader::string(Reader::field(doc, "$", "schema"), "$.schema");
    if (d.schema != kHandSchema) Reader::fail("$.schema", "unsupported schema version '" + d.schema + "'");
    d.name = Reader::string(Reader::field(doc, "$", "name"), "$.name");
    if (auto* p = Reader::optional(doc, "palm_frame")) d.palm_frame = Reader::pose(*p, "$.palm_frame");
    if (auto* p = Reader::optional(doc, "wrist")) d.wrist = Reader::joint(*p, "$.wrist");
    if (auto* p = Reader::optional(doc, "branch")) d.branch = Reader::joint(*p, "$.branch");
    Reader::each(Reader::field(doc, "$", "digits"), "$.digits", [&](const nlohmann::json& v, const std::string& path) {
        DigitSpec digit;
        digit.name = Reader::string(Reader::field(v, path, "name"), path + ".name");
        digit.parent = Reader::string(Reader::field(v, path, "parent"), path + ".parent");
        Reader::each(Reader::field(v, path, "joints"), path + ".joints",
                     [&](const nlohmann::json& j, const std::string& jp) { digit.joints.push_back(Reader::joint(j, jp)); });
        digit.fingertip = Reader::vec3(Reader::field(v, path, "fingertip"), path + ".fingertip");
        if (auto* p = Reader::optional(v, "patches"))
            Reader::each(*p, path + ".patches",
                         [&](const nlohmann::json& c, const std::string& cp) { digit.patches.push_back(Reader::patch(c, cp)); });
        d.digits.push_back(std::move(digit));
    });
    if (auto* p = Reader::optional(doc, "palm_patches"))
        Reader::each(*p, "$.palm_patches",
                     [&](const nlohmann::json& c, const std::string& cp) { d.palm_patches.push_back(Reader::patch(c, cp)); });
    if (auto* p = Reader::optional(doc, "couplings"))
        Reader::each(*p, "$.couplings", [&](const nlohmann::json& c, const std::string& cp) {
            d.couplings.push_back({Reader::string(Reader::field(c, cp, "driver"), cp + ".driver"),
                                   Reader::string(Reader::field(c, cp, "driven"), cp + ".driven"),
                                   Reader::number(Reader::field(c, cp, "factor"), cp + ".factor")});
        });
    if (auto* p = Reader::optional(doc, "effective_limits")) {
        if (auto* e = Reader::optional(*p, "enabled")) {
            if (!e->is_boolean()) Reader::fail("$.effective_limits.enabled", "expected boolean");
            d.use_effective_limits = e->get<bool>();
        }
        if (auto* j = Reader::optional(*p, "joints")) {
            if (!j->is_object()) Reader::fail("$.effective_limits.joints", "expected object");
            for (auto it = j->begin(); it != j->end(); ++it)
                d.effective_limits[it.key()] = Reader::interval(it.value(), "$.effective_limits.joints." + it.key());
        }
    }
    if (auto* p = Reader::optional(doc, "transmission")) d.transmission = Reader::transmission(*p, "$.transmission");
    d.canonical_text = doc.dump();
    return d;
}

/// Serialises a description back into a document (rest lengths included when known).
inline nlohmann::json to_json(const HandDescription& d) {
    using namespace detail;
    json doc{{"schema", d.schema}, {"name", d.name}, {"palm_frame", pose_json(d.palm_frame)}};
    if (d.wrist) doc["wrist"] = joint_json(*d.wrist);
    if (d.branch) doc["branch"] = joint_json(*d.branch);
    json digits = json::array();
    for (const auto& dg : d.digits) {
        json joints = json::array(), patches = json::array();
        for (const auto& j : dg.joints) joints.push_back(joint_json(j));
        for (const auto& p : dg.patches) patches.push_back(patch_json(p));
        digits.push_back({{"name", dg.name},
                          {"parent", dg.parent},
                          {"joints", joints},
                          {"fingertip", vec_json(dg.fingertip)},
                          {"patches", patches}});
    }
    doc["digits"] = digits;
    json pads = json::array();
    for (const auto& p : d.palm_patches) pads.push_back(patch_json(p));
    doc["palm_patches"] = pads;
    json couplings = json::array();
    for (const auto& c : d.couplings) couplings.push_back({{"driver", c.driver}, {"driven", c.driven}, {"factor", c.factor}});
    doc["couplings"] = couplings;
    json eff = json::object();
    for (const auto& [k, v] : d.effective_limits) eff[k] = {v.lo, v.hi};
    doc["effective_limits"] = {{"enabled", d.use_effective_limits}, {"joints", eff}};
    if (d.transmission) {
        const auto& t = *d.transmission;
        json routes = json::array(), motors = json::array();
        for (const auto& r : t.routes) {
            json vps = json::array(), crossed = json::array();
            for (const auto& v : r.via_points) vps.push_back({{"frame", v.frame}, {"point", vec_json(v.point)}});
            for (const auto& c : r.crossed_joints)
                crossed.push_back({{"joint", c.joint}, {"sign", c.sign}, {"passive", c.passive}});
            json jr{{"name", r.name}, {"role", to_string(r.role)}, {"via_points", vps}, {"crossed_joints", crossed}};
            if (r.rest_length >= 0.0) jr["rest_length"] = r.rest_length;
            routes.push_back(jr);
        }
        for (const auto& m : t.motors) {
            json jm{{"name", m.name}, {"kind", to_string(m.kind)}, {"joints", m.joints}};
            if (!m.agonist.empty()) jm["agonist"] = m.agonist;
            if (!m.antagonist.empty()) jm["antagonist"] = m.antagonist;
            if (!m.partner.empty()) jm["partner"] = m.partner;
            if (!m.partner_agonist.empty()) jm["partner_agonist"] = m.partner_agonist;
            if (!m.partner_antagonist.empty()) jm["partner_antagonist"] = m.partner_antagonist;
            if (m.kind == MotorKind::linkage) jm["linkage_ratio"] = m.linkage_ratio;
            motors.push_back(jm);
        }
        doc["transmission"] = {
            {"actuator",
             {{"stall_torque", t.actuator.stall_torque},
              {"no_load_speed", t.actuator.no_load_speed},
              {"current_limit", t.actuator.current_limit},
              {"spool_radius_agonist", t.actuator.spool_radius_agonist},
              {"spool_radius_antagonist", t.actuator.spool_radius_antagonist}}},
            {"spring",
             {{"rate", t.spring.rate}, {"pretension", t.spring.pretension}, {"max_deflection", t.spring.max_deflection}}},
            {"routes", routes},
            {"motors", motors}};
    }
    return doc;
}

struct LoadOptions {
    /// Apply the "effective_limits" overlay regardless of the document's flag.
    bool effective_limits = false;
};

/// Parses and validates a document. Transmission routes are validated
/// against the built model when present.
inline HandModelPtr load_hand_description(const std::string& text, LoadOptions options = {}) {
    HandDescription d = parse_hand_description(text);
    if (options.effective_limits) d.use_effective_limits = true;
    auto model = HandModel::build(std::move(d));
    if (model->transmission()) validate_transmission(*model);
    return model;
}

inline HandModelPtr load_hand_file(const std::string& path, LoadOptions options = {}) {
    std::ifstream in(path);
    if (!in) throw ParseError(path + ": cannot open hand description");
    std::stringstream ss;
    ss << in.rdbuf();
    return load_hand_description(ss.str(), options);
}

/// The bundled nominal description ("sabd_default").
inline HandModelPtr load_default_hand(LoadOptions options = {}) {
    return load_hand_description(default_hand_document(), options);
}

/// Loads `path`, or the bundled description when `path` is empty or "sabd_default".
inline HandModelPtr load_hand(const std::string& path, LoadOptions options = {}) {
    if (path.empty() || path == "sabd_default") return load_default_hand(options);
    return load_hand_file(path, options);
}

}  // namespace sabd
