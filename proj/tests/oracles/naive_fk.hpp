#pragma once

// Straightforward forward kinematics on plain 4x4 arrays, written separately
// from the library so the two can be compared. Reads only the description.

#include <array>
#include <cmath>
#include <map>
#include <string>

#include "sabd/hand_model.hpp"

namespace oracle {

using M4 = std::array<std::array<double, 4>, 4>;

inline M4 identity() {
    M4 m{};
    for (int i = 0; i < 4; ++i) m[i][i] = 1.0;
    return m;
}

inline M4 mul(const M4& a, const M4& b) {
    M4 c{};
    for (int i = 0; i < 4; ++i)
        for (int j = 0; j < 4; ++j)
            for (int k = 0; k < 4; ++k) c[i][j] += a[i][k] * b[k][j];
    return c;
}

inline M4 from_transform(const sabd::Transform& t) {
    M4 m = identity();
    for (int i = 0; i < 3; ++i) {
        for (int j = 0; j < 3; ++j) m[i][j] = t.linear()(i, j);
        m[i][3] = t.translation()(i);
    }
    return m;
}

// Rotation by `angle` about the line through `p` with direction `u` (Rodrigues).
inline M4 rotate_about(const std::array<double, 3>& u, const std::array<double, 3>& p, double angle) {
    const double c = std::cos(angle), s = std::sin(angle), v = 1.0 - c;
    const double x = u[0], y = u[1], z = u[2];
    M4 r = identity();
    r[0][0] = c + x * x * v;
    r[0][1] = x * y * v - z * s;
    r[0][2] = x * z * v + y * s;
    r[1][0] = y * x * v + z * s;
    r[1][1] = c + y * y * v;
    r[1][2] = y * z * v - x * s;
    r[2][0] = z * x * v - y * s;
    r[2][1] = z * y * v + x * s;
    r[2][2] = c + z * z * v;
    for (int i = 0; i < 3; ++i) {
        double rp = 0.0;
        for (int j = 0; j < 3; ++j) rp += r[i][j] * p[j];
        r[i][3] = p[i] - rp;
    }
    return r;
}

inline M4 joint_matrix(const sabd::JointSpec& j, double theta) {
    const std::array<double, 3> u{j.axis.x(), j.axis.y(), j.axis.z()};
    const M4 origin = from_transform(j.origin);
    if (j.kind == sabd::JointKind::revolute) return mul(origin, rotate_about(u, {0, 0, 0}, theta));
    const double s = 2.0 * j.rolling_radius;
    const std::array<double, 3> first{-s * j.link_dir.x(), -s * j.link_dir.y(), -s * j.link_dir.z()};
    return mul(origin, mul(rotate_about(u, first, 0.5 * theta), rotate_about(u, {0, 0, 0}, 0.5 * theta)));
}

inline std::array<double, 3> transform_point(const M4& m, const sabd::Vec3& p) {
    std::array<double, 3> out{};
    for (int i = 0; i < 3; ++i) out[i] = m[i][0] * p.x() + m[i][1] * p.y() + m[i][2] * p.z() + m[i][3];
    return out;
}

/// Fingertip positions (palm frame) for named independent angles.
inline std::array<std::array<double, 3>, 5> fingertips(const sabd::HandDescription& d,
                                                      const std::map<std::string, double>& independent) {
    std::map<std::string, double> angle = independent;
    for (const auto& c : d.couplings) angle[c.driven] = c.factor * angle.at(c.driver);
    std::array<std::array<double, 3>, 5> out{};
    const M4 palm = from_transform(d.palm_frame);
    for (const auto& digit : d.digits) {
        M4 t = palm;
        if (digit.parent != "palm") t = mul(t, joint_matrix(*d.branch, angle.at(d.branch->name)));
        for (const auto& j : digit.joints) t = mul(t, joint_matrix(j, angle.at(j.name)));
        const int idx = digit.name.back() - '1';
        out[static_cast<std::size_t>(idx)] = transform_point(t, digit.fingertip);
    }
    return out;
}

/// Every named frame ("palm", the branch joint, each digit joint) as a matrix,
/// from angles for all joints, driven ones included.
inline std::map<std::string, M4> frames(const sabd::HandDescription& d, const std::map<std::string, double>& angle) {
    std::map<std::string, M4> out;
    out["palm"] = from_transform(d.palm_frame);
    out[d.branch->name] = mul(out["palm"], joint_matrix(*d.branch, angle.at(d.branch->name)));
    out["branch"] = out[d.branch->name];
    for (const auto& digit : d.digits) {
        M4 t = digit.parent == "palm" ? out["palm"] : out[d.branch->name];
        for (const auto& j : digit.joints) {
            t = mul(t, joint_matrix(j, angle.at(j.name)));
            out[j.name] = t;
        }
    }
    return out;
}

/// Tendon length as the sum of straight segments between via points.
inline double polyline_length(const sabd::HandDescription& d, const sabd::TendonRoute& route,
                              const std::map<std::string, double>& angle) {
    const auto f = frames(d, angle);
    double total = 0.0;
    std::array<double, 3> prev{};
    for (std::size_t i = 0; i < route.via_points.size(); ++i) {
        const auto p = transform_point(f.at(route.via_points[i].frame), route.via_points[i].point);
        if (i > 0) total += std::sqrt((p[0] - prev[0]) * (p[0] - prev[0]) + (p[1] - prev[1]) * (p[1] - prev[1]) +
                                      (p[2] - prev[2]) * (p[2] - prev[2]));
        prev = p;
    }
    return total;
}

/// All joints named in the description at zero.
inline std::map<std::string, double> zero_angles(const sabd::HandDescription& d) {
    std::map<std::string, double> a;
    a[d.branch->name] = 0.0;
    if (d.wrist) a[d.wrist->name] = 0.0;
    for (const auto& digit : d.digits)
        for (const auto& j : digit.joints) a[j.name] = 0.0;
    return a;
}

}  // namespace oracle
