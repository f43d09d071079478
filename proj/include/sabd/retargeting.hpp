#pragma once

// Human keypoints to robot joint angles.
//
// Landmarks follow the common 21-point layout: wrist, then thumb
// (cmc, mcp, ip, tip), index, middle, ring and pinky (mcp, pip, dip, tip).
// The thumb revolutes and the combined abduction are solved by minimising a
// weighted keyvector energy; the remaining joints come from segment angles.

#include <algorithm>
#include <array>
#include <cmath>
#include <istream>
#include <limits>
#include <optional>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include <Eigen/SVD>

#include "sabd/hand_model.hpp"
#include "sabd/nelder_mead.hpp"

namespace sabd {

inline constexpr int kLandmarkCount = 21;

inline const std::array<std::string, kLandmarkCount>& landmark_names() {
    static const std::array<std::string, kLandmarkCount> names{
        "wrist",      "thumb_cmc",  "thumb_mcp",  "thumb_ip",   "thumb_tip", "index_mcp",  "index_pip",
        "index_dip",  "index_tip",  "middle_mcp", "middle_pip", "middle_dip", "middle_tip", "ring_mcp",
        "ring_pip",   "ring_dip",   "ring_tip",   "pinky_mcp",  "pinky_pip", "pinky_dip",  "pinky_tip"};
    return names;
}

inline std::optional<int> find_landmark(std::string_view name) {
    const auto& n = landmark_names();
    for (int i = 0; i < kLandmarkCount; ++i)
        if (n[static_cast<std::size_t>(i)] == name) return i;
    return std::nullopt;
}

inline int landmark_index(std::string_view name) {
    if (auto i = find_landmark(name)) return *i;
    throw LookupError("unknown landmark '" + std::string(name) + "'");
}

/// First landmark of digit d (0 = thumb).
inline constexpr int digit_landmark(int d) { return 1 + 4 * d; }

inline std::array<Vec3, kLandmarkCount> zero_landmarks() {
    std::array<Vec3, kLandmarkCount> out;
    out.fill(Vec3::Zero());
    return out;
}

struct KeypointFrame {
    double timestamp = 0.0;  // s
    std::array<Vec3, kLandmarkCount> landmarks = zero_landmarks();  // mm

    const Vec3& at(std::string_view name) const { return landmarks[static_cast<std::size_t>(landmark_index(name))]; }
};

inline void check_frame(const KeypointFrame& f) {
    if (!std::isfinite(f.timestamp)) throw ValidationError("non-finite timestamp");
    for (int i = 0; i < kLandmarkCount; ++i)
        if (!f.landmarks[static_cast<std::size_t>(i)].allFinite())
            throw ValidationError("non-finite landmark '" + landmark_names()[static_cast<std::size_t>(i)] + "'");
}

struct KeyVectorDef {
    std::string name;
    std::array<std::string, 2> source;  // human landmarks, vector = source[1] - source[0]
    std::array<std::string, 2> target;  // robot landmarks or model frame names
    double weight = 1.0;
    bool abduction = false;  // scaled by the abduction gain
};

struct RetargetConfig {
    double abduction_gain = 1.0;
    std::vector<KeyVectorDef> keyvectors;
    std::vector<std::string> optimized_joints;
    double tolerance = 1e-6;  // energy spread, mm^2
    int max_iterations = 200;
    double smoothing = 0.5;   // weight of the previous output
};

/// Fingertip-to-wrist vectors for every digit plus thumb-tip to index and
/// middle tips; ring and pinky carry the abduction gain.
inline RetargetConfig default_retarget_config(const HandModel& model) {
    RetargetConfig c;
    auto kv = [&](std::string a, std::string b, double w, bool abd) {
        c.keyvectors.push_back({a + ">" + b, {a, b}, {a, b}, w, abd});
    };
    kv("wrist", "thumb_tip", 1.0, false);
    kv("wrist", "thumb_mcp", 1.0, false);
    kv("wrist", "index_tip", 1.0, false);
    kv("wrist", "middle_tip", 1.0, false);
    kv("wrist", "ring_tip", 1.0, true);
    kv("wrist", "pinky_tip", 1.0, true);
    kv("thumb_tip", "index_tip", 2.0, false);
    kv("thumb_tip", "middle_tip", 2.0, false);
    const auto& thumb = model.digit(0).own_nodes;
    c.optimized_joints = {model.nodes()[static_cast<std::size_t>(thumb.at(0))].spec.name,
                          model.nodes()[static_cast<std::size_t>(thumb.at(1))].spec.name, model.branch().name};
    return c;
}

struct RetargetResult {
    JointVector q;
    bool converged = false;
    double energy = 0.0;
    int iterations = 0;
    double timestamp = 0.0;
};

// -- robot keypoints ------------------------------------------------------------

namespace detail {

enum class PointKind { origin, fixed_hinge, tip };

struct LandmarkSource {
    int node = -1;  // -1 for the wrist landmark
    PointKind kind = PointKind::origin;
    int digit = -1;
};

enum class AngleRule { none, bend, heading };

struct JointRule {
    AngleRule rule = AngleRule::none;
    int from = 0, to = 0;  // landmark indices of the measured segment
    int digit = -1;
    Vec3 to_local = Vec3::Zero();  // landmark `to` in the joint's child frame
};

struct Layout {
    std::array<LandmarkSource, kLandmarkCount> landmarks{};
    std::vector<JointRule> rules;  // per node
};

inline Vec3 hinge_local(const JointSpec& j) {
    const Vec3 fixed = j.kind == JointKind::revolute ? Vec3::Zero() : Vec3(-2.0 * j.rolling_radius * j.link_dir);
    return j.origin * fixed;
}

inline Layout make_layout(const HandModel& model) {
    Layout l;
    const auto& nodes = model.nodes();
    l.rules.assign(nodes.size(), {});
    l.landmarks[0] = {-1, PointKind::origin, -1};
    auto spec = [&](int n) -> const JointSpec& { return nodes[static_cast<std::size_t>(n)].spec; };
    for (int d = 0; d < kDigitCount; ++d) {
        const auto& own = model.digit(d).own_nodes;
        const int base = digit_landmark(d);
        std::array<int, 3> chain{};
        if (d == 0) {
            if (own.size() != 4) throw ConfigurationError("retargeting expects four thumb joints");
            chain = {own[0], own[2], own[3]};
        } else {
            if (own.size() < 3 || own.size() > 4) throw ConfigurationError("retargeting expects 3 or 4 finger joints");
            const std::size_t k = own.size() - 3;
            chain = {own[k], own[k + 1], own[k + 2]};
            if (k == 1) l.rules[static_cast<std::size_t>(own[0])] = {AngleRule::heading, base, base + 1, d, Vec3::Zero()};
        }
        for (int i = 0; i < 3; ++i)
            l.landmarks[static_cast<std::size_t>(base + i)] = {chain[static_cast<std::size_t>(i)], PointKind::fixed_hinge, d};
        l.landmarks[static_cast<std::size_t>(base + 3)] = {model.digit(d).nodes.back(), PointKind::tip, d};
        const int first = d == 0 ? 1 : 0;
        for (int i = first; i < 3; ++i) {
            const int n = chain[static_cast<std::size_t>(i)];
            const Vec3 next = i < 2 ? hinge_local(spec(chain[static_cast<std::size_t>(i + 1)])) : model.digit(d).fingertip;
            if (i == 2 && model.digit(d).nodes.back() != n)
                throw ConfigurationError("retargeting expects the fingertip on the last digit joint");
            l.rules[static_cast<std::size_t>(n)] = {AngleRule::bend, base + i, base + i + 1, d, next};
        }
    }
    return l;
}

inline Vec3 landmark_point(const HandModel& model, const std::vector<Transform>& frames, const LandmarkSource& s) {
    if (s.node < 0) return frames[kPalmFrame].translation();
    const auto& n = model.nodes()[static_cast<std::size_t>(s.node)];
    const Transform& child = frames[static_cast<std::size_t>(s.node + 1)];
    if (s.kind == PointKind::tip) return child * model.digit(s.digit).fingertip;
    const Transform at_origin = frames[static_cast<std::size_t>(n.parent_frame)] * n.spec.origin;
    if (s.kind == PointKind::origin || n.spec.kind == JointKind::revolute) return at_origin.translation();
    return at_origin * (-2.0 * n.spec.rolling_radius * n.spec.link_dir);
}

inline std::array<Vec3, kLandmarkCount> landmarks_from_frames(const HandModel& model, const Layout& layout,
                                                              const std::vector<Transform>& frames) {
    std::array<Vec3, kLandmarkCount> out{};
    for (int i = 0; i < kLandmarkCount; ++i)
        out[static_cast<std::size_t>(i)] = landmark_point(model, frames, layout.landmarks[static_cast<std::size_t>(i)]);
    return out;
}

}  // namespace detail

/// The 21 robot keypoints (palm frame) at posture q.
inline KeypointFrame robot_keypoints(const HandModel& model, const JointVector& q, double timestamp = 0.0) {
    const auto layout = detail::make_layout(model);
    KeypointFrame f;
    f.timestamp = timestamp;
    f.landmarks = detail::landmarks_from_frames(model, layout, frame_transforms(model, apply_couplings(model, q)));
    return f;
}

// -- normalisation --------------------------------------------------------------

namespace detail {

// Palm-aligned frame of a hand: origin at the wrist, y toward the middle MCP,
// z normal to the palm plane; x points to the thumb side.
inline Transform canonical_frame(const std::array<Vec3, kLandmarkCount>& p) {
    const std::array<int, 5> ids{0, digit_landmark(1), digit_landmark(2), digit_landmark(3), digit_landmark(4)};
    Vec3 mean = Vec3::Zero();
    for (int i : ids) mean += p[static_cast<std::size_t>(i)];
    mean /= 5.0;
    Eigen::Matrix<double, 5, 3> a;
    for (int k = 0; k < 5; ++k) a.row(k) = (p[static_cast<std::size_t>(ids[static_cast<std::size_t>(k)])] - mean).transpose();
    const Eigen::JacobiSVD<Eigen::Matrix<double, 5, 3>> svd(a, Eigen::ComputeFullV);
    const auto& s = svd.singularValues();
    if (!(s[0] > 1e-9) || s[1] < 1e-6 * s[0]) throw GeometryError("palm landmarks are collinear");
    Vec3 z = svd.matrixV().col(2);
    const Vec3 wrist = p[0];
    Vec3 y = project_onto_plane(p[static_cast<std::size_t>(digit_landmark(2))] - wrist, z);
    if (y.norm() < 1e-9) throw GeometryError("middle MCP coincides with the wrist in the palm plane");
    y.normalize();
    Vec3 x = y.cross(z);
    if (x.dot(p[static_cast<std::size_t>(digit_landmark(1))] - p[static_cast<std::size_t>(digit_landmark(4))]) < 0) {
        z = -z;
        x = -x;
    }
    Transform t = Transform::Identity();
    t.linear().col(0) = x;
    t.linear().col(1) = y;
    t.linear().col(2) = z;
    t.translation() = wrist;
    return t;
}

inline double palm_length(const std::array<Vec3, kLandmarkCount>& p) {
    return (p[static_cast<std::size_t>(digit_landmark(2))] - p[0]).norm();
}

}  // namespace detail

/// Wrist to the origin, palm plane onto the robot's palm plane, and uniform
/// scale so the wrist to middle-MCP distance matches the robot.
inline KeypointFrame normalize_human_hand(const KeypointFrame& frame, const HandModel& model) {
    check_frame(frame);
    const auto robot = robot_keypoints(model, model.zero_vector());
    const Transform cr = detail::canonical_frame(robot.landmarks);
    const Transform ch = detail::canonical_frame(frame.landmarks);
    const double scale = detail::palm_length(robot.landmarks) / detail::palm_length(frame.landmarks);
    KeypointFrame out;
    out.timestamp = frame.timestamp;
    const Transform inv = ch.inverse();
    for (int i = 0; i < kLandmarkCount; ++i)
        out.landmarks[static_cast<std::size_t>(i)] = cr * (scale * (inv * frame.landmarks[static_cast<std::size_t>(i)]));
    return out;
}

// -- vector angles --------------------------------------------------------------

namespace detail {

inline Vec3 segment(const KeypointFrame& f, int a, int b) {
    const Vec3 s = f.landmarks[static_cast<std::size_t>(b)] - f.landmarks[static_cast<std::size_t>(a)];
    if (s.norm() < 1e-9)
        throw GeometryError("zero-length segment " + landmark_names()[static_cast<std::size_t>(a)] + " -> " +
                            landmark_names()[static_cast<std::size_t>(b)]);
    return s;
}

inline double heading_angle(const KeypointFrame& f, const JointNode& node, const JointNode& next, const Transform& parent,
                            int base) {
    const Mat3 at = parent.linear() * node.spec.origin.linear();
    const Vec3 u = (at * node.spec.axis).normalized();
    const Vec3 rest = at * node.spec.link_dir;
    const Vec3 rest_axis = at * next.spec.origin.linear() * next.spec.axis;
    const Vec3 s1 = segment(f, base, base + 1), s2 = segment(f, base + 1, base + 2), s3 = segment(f, base + 2, base + 3);
    const Vec3 p1 = project_onto_plane(s1, u);
    const double qa = p1.norm() / s1.norm();
    const Vec3 n = project_onto_plane(s1.cross(s2) + s2.cross(s3), u);
    const double qb = n.norm() / (s1.norm() * s2.norm() + s2.norm() * s3.norm());
    if (qa < 1e-9 && qb < 1e-9) return 0.0;
    if (qa >= qb) return signed_angle(project_onto_plane(rest, u), p1, u);
    double a = signed_angle(project_onto_plane(rest_axis, u), n, u);
    if (a > kPi / 2) a -= kPi;
    if (a <= -kPi / 2) a += kPi;
    return a;
}

// Angle whose robot segment (this joint's landmark to the next one) points
// along the human segment about the joint axis. Rolling contact turns the
// segment by a blend of theta and theta / 2; safeguarded Newton inverts it.
inline double bend_angle(const KeypointFrame& f, const JointNode& node, const Transform& parent, const JointRule& rule) {
    const Transform at = parent * node.spec.origin;
    const Vec3& axis = node.spec.axis;
    const Vec3 span = node.spec.kind == JointKind::revolute ? Vec3::Zero() : Vec3(2.0 * node.spec.rolling_radius * node.spec.link_dir);
    const Vec3 target = project_onto_plane(at.linear().transpose() * segment(f, rule.from, rule.to), axis);
    const Interval& lim = node.spec.limits;
    if (target.norm() < 1e-9) return lim.clamp(0.0);
    const Vec3 p = project_onto_plane(rule.to_local, axis), h = project_onto_plane(span, axis);
    auto robot = [&](double t, Vec3* deriv) {
        const Vec3 a = Eigen::AngleAxisd(t, axis) * p, b = Eigen::AngleAxisd(0.5 * t, axis) * h;
        if (deriv) *deriv = axis.cross(a) + 0.5 * axis.cross(b);
        return Vec3(a + b);
    };
    const Vec3 rest = robot(0.0, nullptr);
    const double want = signed_angle(rest, target, axis);
    auto phi = [&](double t) { return signed_angle(rest, robot(t, nullptr), axis); };
    double a = lim.lo, b = lim.hi;
    if (want <= phi(a)) return a;
    if (want >= phi(b)) return b;
    double t = std::clamp(want, a, b);
    for (int i = 0; i < 50; ++i) {
        Vec3 dv;
        const Vec3 v = robot(t, &dv);
        const double g = signed_angle(rest, v, axis) - want;
        if (std::abs(g) < 1e-13) break;
        (g < 0 ? a : b) = t;
        const double slope = v.cross(dv).dot(axis) / v.squaredNorm();
        double next = slope > 0 ? t - g / slope : 0.5 * (a + b);
        if (!(next > a && next < b)) next = 0.5 * (a + b);
        t = next;
    }
    return t;
}

/// Recomputes every segment-angle joint not marked fixed, walking the tree
/// so each joint is measured in its parent's posed frame. Returns the frames.
inline std::vector<Transform> complete_pose(const HandModel& model, const Layout& layout, const KeypointFrame& f,
                                            JointVector& q, const std::vector<bool>& fixed) {
    const auto& nodes = model.nodes();
    JointAngles full = model.zero_angles();
    std::vector<Transform> frames(nodes.size() + 1, Transform::Identity());
    frames[kPalmFrame] = model.description().palm_frame;
    for (std::size_t i = 0; i < nodes.size(); ++i) {
        const auto& n = nodes[i];
        const Transform& parent = n.parent_frame == kBaseFrame ? Transform::Identity() : frames[static_cast<std::size_t>(n.parent_frame)];
        if (n.dof >= 0) {
            const auto dof = static_cast<std::size_t>(n.dof);
            const auto& rule = layout.rules[i];
            if (!fixed[dof] && rule.rule != AngleRule::none) {
                double a = 0.0;
                if (rule.rule == AngleRule::bend) {
                    a = bend_angle(f, n, parent, rule);
                } else {
                    const auto& own = model.digit(rule.digit).own_nodes;
                    a = heading_angle(f, n, nodes[static_cast<std::size_t>(own[1])], parent, rule.from);
                }
                q[dof] = n.spec.limits.clamp(a);
            }
            full[i] = q[dof];
        } else if (n.driver >= 0) {
            full[i] = n.factor * full[static_cast<std::size_t>(n.driver)];
        }
        frames[i + 1] = n.parent_frame == kBaseFrame ? joint_motion(n.spec, full[i]) : parent * joint_motion(n.spec, full[i]);
    }
    return frames;
}

}  // namespace detail

/// Segment-angle estimate of every joint except the thumb revolutes, the
/// combined abduction and the wrist, which are copied from `base`
/// (neutral when omitted). The frame must be normalised.
inline JointVector vector_angles(const KeypointFrame& frame, const HandModel& model,
                                 std::optional<JointVector> base = std::nullopt) {
    check_frame(frame);
    const auto layout = detail::make_layout(model);
    JointVector q = base ? *base : model.neutral_vector();
    if (q.model_id() != model.id()) throw LookupError("joint vector indexes a different model");
    std::vector<bool> fixed(model.dof_count(), false);
    detail::complete_pose(model, layout, frame, q, fixed);
    return clamp_to_limits(model, q);
}

// -- energy ---------------------------------------------------------------------

inline void validate_config(const RetargetConfig& c, const HandModel& model) {
    if (!(std::isfinite(c.abduction_gain) && c.abduction_gain >= 0))
        throw ValidationError("abduction_gain must be finite and >= 0");
    if (!(c.smoothing >= 0 && c.smoothing <= 1)) throw ValidationError("smoothing must lie in [0, 1]");
    if (!(c.tolerance > 0)) throw ValidationError("solver tolerance must be > 0");
    if (c.max_iterations < 1) throw ValidationError("max_iterations must be >= 1");
    for (const auto& k : c.keyvectors) {
        if (!(std::isfinite(k.weight) && k.weight >= 0))
            throw ValidationError("keyvector '" + k.name + "' weight must be finite and >= 0");
        if (k.source[0] == k.source[1] || k.target[0] == k.target[1])
            throw ValidationError("keyvector '" + k.name + "' endpoints must differ");
        for (const auto& s : k.source)
            if (!find_landmark(s)) throw ValidationError("keyvector '" + k.name + "' uses unknown landmark '" + s + "'");
        for (const auto& t : k.target)
            if (!find_landmark(t) && !model.has_frame(t))
                throw ValidationError("keyvector '" + k.name + "' uses unknown robot point '" + t + "'");
    }
    for (const auto& j : c.optimized_joints) {
        if (!model.dof_table()->find(j)) throw ValidationError("optimized joint '" + j + "' is not an independent joint");
    }
}

namespace detail {

class RetargetProblem {
public:
    RetargetProblem(const HandModel& model, const RetargetConfig& config, const KeypointFrame& frame, JointVector base)
        : model_(model), config_(config), frame_(frame), layout_(make_layout(model)), base_(std::move(base)),
          fixed_(model.dof_count(), false) {
        validate_config(config, model);
        for (const auto& j : config.optimized_joints) {
            const auto d = model.dof_index(j);
            optimized_.push_back(d);
            fixed_[d] = true;
        }
        fixed_[static_cast<std::size_t>(model.nodes()[static_cast<std::size_t>(model.wrist_node())].dof)] = true;
        for (const auto& k : config.keyvectors) {
            human_.push_back(frame.at(k.source[1]) - frame.at(k.source[0]));
            ends_.push_back({resolve(k.target[0]), resolve(k.target[1])});
        }
        targets_ = human_;
        for (std::size_t d : optimized_)
            if (d == model.branch_dof()) scale_abduction();
    }

    std::size_t dimension() const { return optimized_.size(); }
    const std::vector<std::size_t>& optimized() const { return optimized_; }

    JointVector pose(const Eigen::VectorXd& x) const {
        JointVector q = base_;
        for (std::size_t i = 0; i < optimized_.size(); ++i) q[optimized_[i]] = x[static_cast<Eigen::Index>(i)];
        detail::complete_pose(model_, layout_, frame_, q, fixed_);
        return q;
    }

    double energy(const Eigen::VectorXd& x) const {
        JointVector q = base_;
        for (std::size_t i = 0; i < optimized_.size(); ++i) q[optimized_[i]] = x[static_cast<Eigen::Index>(i)];
        return energy_of(q, targets_);
    }

    Eigen::VectorXd lower() const { return bound(true); }
    Eigen::VectorXd upper() const { return bound(false); }
    Eigen::VectorXd start(const JointVector& q) const {
        Eigen::VectorXd x(static_cast<Eigen::Index>(optimized_.size()));
        for (std::size_t i = 0; i < optimized_.size(); ++i) x[static_cast<Eigen::Index>(i)] = q[optimized_[i]];
        return x;
    }

private:
    // robot point: landmark index, or -(frame + 1) for a model frame origin
    int resolve(const std::string& name) const {
        if (auto i = find_landmark(name)) return *i;
        return -(model_.frame_index(name) + 1);
    }

    Vec3 robot_point(const std::vector<Transform>& frames, int id) const {
        if (id >= 0) return landmark_point(model_, frames, layout_.landmarks[static_cast<std::size_t>(id)]);
        return frames[static_cast<std::size_t>(-id - 1)].translation();
    }

    std::vector<Vec3> robot_vectors(JointVector q) const {
        const auto frames = detail::complete_pose(model_, layout_, frame_, q, fixed_);
        std::vector<Vec3> out;
        for (const auto& [a, b] : ends_) out.push_back(robot_point(frames, b) - robot_point(frames, a));
        return out;
    }

    double energy_of(const JointVector& q, const std::vector<Vec3>& targets) const {
        const auto v = robot_vectors(q);
        double e = 0.0;
        for (std::size_t i = 0; i < v.size(); ++i) e += config_.keyvectors[i].weight * (v[i] - targets[i]).squaredNorm();
        return e;
    }

    // Human combined abduction is read off by fitting the robot's abduction
    // vectors, scaled about neutral, clamped, and turned back into targets.
    void scale_abduction() {
        std::vector<std::size_t> flagged;
        for (std::size_t i = 0; i < config_.keyvectors.size(); ++i)
            if (config_.keyvectors[i].abduction && config_.keyvectors[i].weight > 0) flagged.push_back(i);
        if (flagged.empty()) return;
        const auto dof = model_.branch_dof();
        const auto& lim = model_.limits(dof);
        auto misfit = [&](double phi) {
            JointVector q = base_;
            q[dof] = phi;
            const auto v = robot_vectors(q);
            double e = 0.0;
            for (auto i : flagged) e += config_.keyvectors[i].weight * (v[i] - human_[i]).squaredNorm();
            return e;
        };
        const double lo = lim.lo - 0.5, hi = lim.hi + 0.5, step = 0.02;
        double best = lo, best_e = misfit(lo);
        for (double t = lo + step; t <= hi + 1e-12; t += step) {
            const double e = misfit(t);
            if (e < best_e) {
                best_e = e;
                best = t;
            }
        }
        double a = std::max(lo, best - step), b = std::min(hi, best + step);
        const double g = 0.5 * (std::sqrt(5.0) - 1.0);
        double c = b - g * (b - a), d = a + g * (b - a), fc = misfit(c), fd = misfit(d);
        while (b - a > 1e-10) {
            if (fc < fd) {
                b = d;
                d = c;
                fd = fc;
                c = b - g * (b - a);
                fc = misfit(c);
            } else {
                a = c;
                c = d;
                fc = fd;
                d = a + g * (b - a);
                fd = misfit(d);
            }
        }
        const double human = 0.5 * (a + b);
        const double neutral = model_.neutral(dof);
        JointVector q = base_;
        q[dof] = lim.clamp(neutral + config_.abduction_gain * (human - neutral));
        const auto scaled = robot_vectors(q);
        for (auto i : flagged) targets_[i] = scaled[i];
        human_abduction_ = human;
    }

    Eigen::VectorXd bound(bool low) const {
        Eigen::VectorXd b(static_cast<Eigen::Index>(optimized_.size()));
        for (std::size_t i = 0; i < optimized_.size(); ++i) {
            const auto& lim = model_.limits(optimized_[i]);
            b[static_cast<Eigen::Index>(i)] = low ? lim.lo : lim.hi;
        }
        return b;
    }

    const HandModel& model_;
    const RetargetConfig& config_;
    const KeypointFrame& frame_;
    Layout layout_;
    JointVector base_;
    std::vector<bool> fixed_;
    std::vector<std::size_t> optimized_;
    std::vector<Vec3> human_, targets_;
    std::vector<std::pair<int, int>> ends_;
    double human_abduction_ = 0.0;
};

}  // namespace detail

namespace detail {

// Best of the warm start and a coarse lattice over the box (5 points per
// axis, at most three axes); the thumb energy has separate basins.
template <class F>
Eigen::VectorXd seed(const F& f, const Eigen::VectorXd& warm, const Eigen::VectorXd& lo, const Eigen::VectorXd& hi) {
    const auto n = warm.size();
    Eigen::VectorXd best = warm;
    double best_f = f(warm);
    if (n == 0 || n > 3) return best;
    constexpr int k = 5;
    int total = 1;
    for (Eigen::Index i = 0; i < n; ++i) total *= k;
    Eigen::VectorXd x(n);
    for (int c = 0; c < total; ++c) {
        int r = c;
        for (Eigen::Index i = 0; i < n; ++i) {
            x[i] = lo[i] + (hi[i] - lo[i]) * ((r % k) + 0.5) / k;
            r /= k;
        }
        const double v = f(x);
        if (v < best_f) {
            best_f = v;
            best = x;
        }
    }
    return best;
}

}  // namespace detail

/// Weighted squared keyvector mismatch with the optimised joints set to
/// `q_subset` (in config order) and the rest completed from segment angles.
inline double retarget_energy(const std::vector<double>& q_subset, const KeypointFrame& frame, const RetargetConfig& config,
                              const HandModel& model, std::optional<JointVector> base = std::nullopt) {
    if (q_subset.size() != config.optimized_joints.size())
        throw ConfigurationError("q_subset must have one value per optimized joint");
    const detail::RetargetProblem problem(model, config, frame, base ? *base : model.neutral_vector());
    return problem.energy(Eigen::Map<const Eigen::VectorXd>(q_subset.data(), static_cast<Eigen::Index>(q_subset.size())));
}

/// Joint posture for one normalised frame. Never throws on solver trouble;
/// `converged` reports whether the simplex met the tolerance.
inline RetargetResult retarget(const KeypointFrame& frame, const RetargetConfig& config, const HandModel& model,
                               const std::optional<JointVector>& prev_q = std::nullopt) {
    check_frame(frame);
    if (prev_q && prev_q->model_id() != model.id()) throw LookupError("previous posture indexes a different model");
    validate_config(config, model);
    JointVector warm = prev_q ? clamp_to_limits(model, *prev_q) : model.neutral_vector();
    const JointVector previous = warm;
    RetargetConfig cfg = config;
    const auto branch = model.branch_dof();
    auto& opt_joints = cfg.optimized_joints;
    const bool pin = config.abduction_gain == 0.0 &&
                     std::find(opt_joints.begin(), opt_joints.end(), model.branch().name) != opt_joints.end();
    if (pin) {
        std::erase(opt_joints, model.branch().name);
        warm[branch] = model.neutral(branch);
    }
    const detail::RetargetProblem problem(model, cfg, frame, warm);
    NelderMeadOptions opt;
    opt.f_tol = config.tolerance;
    opt.max_iterations = config.max_iterations;
    auto f = [&](const Eigen::VectorXd& x) { return problem.energy(x); };
    const auto nm = nelder_mead(f, detail::seed(f, problem.start(warm), problem.lower(), problem.upper()), problem.lower(),
                                problem.upper(), opt);
    JointVector q = problem.pose(nm.x);
    if (prev_q)
        for (std::size_t i = 0; i < q.size(); ++i) q[i] = config.smoothing * previous[i] + (1.0 - config.smoothing) * q[i];
    if (pin) q[branch] = model.neutral(branch);
    RetargetResult out{clamp_to_limits(model, q), nm.converged, nm.f, nm.iterations, frame.timestamp};
    return out;
}

/// Stateful per-operator stream: normalises, retargets, and smooths against
/// the previous output. Not thread-safe; use one session per stream.
class RetargetSession {
public:
    RetargetSession(HandModelPtr model, RetargetConfig config) : model_(std::move(model)), config_(std::move(config)) {
        validate_config(config_, *model_);
    }

    RetargetResult step(const KeypointFrame& raw) {
        auto result = retarget(normalize_human_hand(raw, *model_), config_, *model_, prev_);
        prev_ = result.q;
        ++frames_;
        return result;
    }

    void reset() { prev_.reset(); }
    void set_gain(double gain) {
        RetargetConfig c = config_;
        c.abduction_gain = gain;
        validate_config(c, *model_);
        config_ = std::move(c);
    }

    const RetargetConfig& config() const { return config_; }
    const HandModelPtr& model() const { return model_; }
    const std::optional<JointVector>& previous() const { return prev_; }
    std::size_t frame_count() const { return frames_; }

private:
    HandModelPtr model_;
    RetargetConfig config_;
    std::optional<JointVector> prev_;
    std::size_t frames_ = 0;
};

// -- keypoint stream files ------------------------------------------------------

/// One frame per line: timestamp then x y z for each landmark in
/// landmark_names() order. Separators are spaces, tabs or commas; lines
/// starting with '#' are comments.
inline std::vector<KeypointFrame> read_keypoint_stream(std::istream& is) {
    std::vector<KeypointFrame> out;
    std::string line;
    int line_no = 0;
    while (std::getline(is, line)) {
        ++line_no;
        const auto first = line.find_first_not_of(" \t\r");
        if (first == std::string::npos || line[first] == '#') continue;
        for (auto& ch : line)
            if (ch == ',') ch = ' ';
        std::istringstream ls(line);
        std::vector<double> v;
        std::string tok;
        while (ls >> tok) {
            try {
                std::size_t used = 0;
                v.push_back(std::stod(tok, &used));
                if (used != tok.size()) throw std::invalid_argument(tok);
            } catch (const std::exception&) {
                throw ParseError("line " + std::to_string(line_no) + ": not a number '" + tok + "'");
            }
        }
        if (v.size() != 1 + 3 * kLandmarkCount)
            throw ParseError("line " + std::to_string(line_no) + ": expected 64 numbers (timestamp + 21 x 3), got " +
                             std::to_string(v.size()));
        KeypointFrame f;
        f.timestamp = v[0];
        for (int i = 0; i < kLandmarkCount; ++i)
            f.landmarks[static_cast<std::size_t>(i)] = Vec3(v[static_cast<std::size_t>(1 + 3 * i)], v[static_cast<std::size_t>(2 + 3 * i)],
                                                            v[static_cast<std::size_t>(3 + 3 * i)]);
        try {
            check_frame(f);
        } catch (const ValidationError& e) {
            throw ParseError("line " + std::to_string(line_no) + ": " + e.what());
        }
        out.push_back(f);
    }
    return out;
}

inline void write_keypoint_stream(std::ostream& os, const std::vector<KeypointFrame>& frames) {
    os << "# timestamp";
    for (const auto& n : landmark_names()) os << ' ' << n << "_x " << n << "_y " << n << "_z";
    os << '\n';
    os.precision(std::numeric_limits<double>::max_digits10);
    for (const auto& f : frames) {
        os << f.timestamp;
        for (const auto& p : f.landmarks) os << ' ' << p.x() << ' ' << p.y() << ' ' << p.z();
        os << '\n';
    }
}

}  // namespace sabd
