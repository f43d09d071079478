#pragma once

#include <string>
#include <vector>

#include "sabd/geometry.hpp"

namespace sabd {

struct ActuatorSpec {
    double stall_torque = 0.92;    // N*m
    double no_load_speed = 65.0;   // rpm
    double current_limit = 300.0;  // mA
    double spool_radius_agonist = 6.0;     // mm
    double spool_radius_antagonist = 6.0;  // mm
};

struct SpringSpec {
    double rate = 1.94;            // mN*m per degree
    double pretension = 20.0;      // mN*m
    double max_deflection = 45.0;  // degrees
};

enum class TendonRole { flex_adduct, flex_abduct, ext_adduct, ext_abduct, flexor, extensor, link };

struct ViaPoint {
    std::string frame;
    Vec3 point = Vec3::Zero();  // mm, in `frame`
};

struct CrossedJoint {
    std::string joint;
    int sign = 1;          // +1: tendon shortens when the joint angle increases
    bool passive = false;  // crosses the joint without actuating it
};

struct TendonRoute {
    std::string name;
    TendonRole role = TendonRole::flexor;
    std::vector<ViaPoint> via_points;
    std::vector<CrossedJoint> crossed_joints;
    double rest_length = -1.0;  // mm; negative when not recorded
};

enum class MotorKind { tendon_pair, crosswise_pair, linkage };

/// One motor together with what it drives.
///
/// `tendon_pair`: one joint, agonist/antagonist routes on two spools.
/// `crosswise_pair`: two motors share an MCP flexion/abduction pair; this
/// entry names both motors, the flexion joint first.
/// `linkage`: constant-ratio drive (the wrist four-bar).
struct MotorPairing {
    std::string name;
    MotorKind kind = MotorKind::tendon_pair;
    std::vector<std::string> joints;
    std::string agonist;
    std::string antagonist;
    // crosswise only: second motor and its routes
    std::string partner;
    std::string partner_agonist;
    std::string partner_antagonist;
    double linkage_ratio = 1.0;
};

struct TransmissionSpec {
    ActuatorSpec actuator;
    SpringSpec spring;
    std::vector<TendonRoute> routes;
    std::vector<MotorPairing> motors;
};

inline const char* to_string(TendonRole role) {
    switch (role) {
    case TendonRole::flex_adduct: return "flex_adduct";
    case TendonRole::flex_abduct: return "flex_abduct";
    case TendonRole::ext_adduct: return "ext_adduct";
    case TendonRole::ext_abduct: return "ext_abduct";
    case TendonRole::flexor: return "flexor";
    case TendonRole::extensor: return "extensor";
    case TendonRole::link: return "link";
    }
    return "?";
}

inline const char* to_string(MotorKind kind) {
    switch (kind) {
    case MotorKind::tendon_pair: return "tendon_pair";
    case MotorKind::crosswise_pair: return "crosswise_pair";
    case MotorKind::linkage: return "linkage";
    }
    return "?";
}

}  // namespace sabd
