#pragma once

// Motor space <-> joint space through via-point tendon routes.
//
// A motor angle is the agonist shortening divided by the agonist spool
// radius, measured from the all-zero posture. Crosswise MCP pairs are the
// exception: their two motors are the sum and difference coordinates
//   m1 = s(flex) + d(abd),  m2 = s(flex) - d(abd)
// built from the flexion-only and abduction-only shortening of the two
// agonists.

#include <algorithm>
#include <cmath>
#include <functional>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "sabd/hand_model.hpp"

namespace sabd {

namespace detail {
struct MotorAnglesTag {
    static constexpr const char* noun = "motor";
};
}  // namespace detail

/// Motor angles in radians, one per motor, in declaration order.
using MotorAngles = detail::NamedVector<detail::MotorAnglesTag>;

inline constexpr double kRatioStep = 1e-5;

// -- lengths ------------------------------------------------------------------

/// Polyline length of a route with every joint at `full` (no limit checks).
inline double tendon_length(const HandModel& model, const TendonRoute& route, const JointAngles& full) {
    if (route.via_points.size() < 2) throw ValidationError("tendon route '" + route.name + "' has fewer than 2 via points");
    double total = 0.0;
    Vec3 prev = Vec3::Zero();
    for (std::size_t i = 0; i < route.via_points.size(); ++i) {
        const auto& vp = route.via_points[i];
        const Vec3 p = chain_transform(model, full, model.frame_index(vp.frame)) * vp.point;
        if (i > 0) total += (p - prev).norm();
        prev = p;
    }
    return total;
}

inline double tendon_length(const HandModel& model, const TendonRoute& route, const JointVector& q) {
    return tendon_length(model, route, apply_couplings(model, q));
}

/// Joints (by node index) lying on the tree path between consecutive via points.
inline std::set<int> route_crossings(const HandModel& model, const TendonRoute& route) {
    auto ancestors = [&](int frame) {
        std::vector<int> chain;  // node indices, child first
        while (frame != kPalmFrame && frame != kBaseFrame) {
            chain.push_back(frame - 1);
            frame = model.nodes()[static_cast<std::size_t>(frame - 1)].parent_frame;
        }
        return chain;
    };
    std::set<int> out;
    for (std::size_t i = 1; i < route.via_points.size(); ++i) {
        auto a = ancestors(model.frame_index(route.via_points[i - 1].frame));
        auto b = ancestors(model.frame_index(route.via_points[i].frame));
        std::set<int> sa(a.begin(), a.end()), sb(b.begin(), b.end());
        for (int n : a)
            if (!sb.count(n)) out.insert(n);
        for (int n : b)
            if (!sa.count(n)) out.insert(n);
    }
    return out;
}

// -- the map ------------------------------------------------------------------

class TransmissionMap {
public:
    struct Motor {
        std::string name;
        std::size_t pairing = 0;
        bool second = false;  // the partner motor of a crosswise pair
    };

    explicit TransmissionMap(HandModelPtr model) : model_(std::move(model)) {
        if (!model_->transmission()) throw ConfigurationError("hand description has no transmission section");
        const auto& spec = *model_->transmission();
        auto table = std::make_shared<NameTable>();
        table->model_id = model_->id();
        auto add_motor = [&](const std::string& name, std::size_t pairing, bool second) {
            if (name.empty()) throw ValidationError("motor with empty name");
            if (table->index.count(name)) throw ValidationError("duplicate motor '" + name + "'");
            table->index[name] = table->names.size();
            table->names.push_back(name);
            motors_.push_back({name, pairing, second});
        };
        for (std::size_t i = 0; i < spec.motors.size(); ++i) {
            add_motor(spec.motors[i].name, i, false);
            if (spec.motors[i].kind == MotorKind::crosswise_pair) add_motor(spec.motors[i].partner, i, true);
        }
        motor_table_ = table;
        for (const auto& r : spec.routes) route_index_[r.name] = &r;
        order_ = solve_order();
    }

    const HandModelPtr& model() const { return model_; }
    const TransmissionSpec& spec() const { return *model_->transmission(); }
    std::size_t motor_count() const { return motors_.size(); }
    const std::vector<std::string>& motor_names() const { return motor_table_->names; }
    const std::vector<Motor>& motors() const { return motors_; }
    MotorAngles zero_motors() const { return MotorAngles(motor_table_); }
    MotorAngles make_motors(std::vector<double> values) const { return MotorAngles(motor_table_, std::move(values)); }

    const MotorPairing& pairing(std::string_view name) const {
        for (const auto& p : spec().motors)
            if (p.name == name || (p.kind == MotorKind::crosswise_pair && p.partner == name)) return p;
        throw LookupError("unknown motor '" + std::string(name) + "'");
    }
    /// The pairing that drives a joint.
    const MotorPairing& pairing_for_joint(std::string_view joint) const {
        (void)model_->dof_index(joint);
        for (const auto& p : spec().motors)
            for (const auto& j : p.joints)
                if (j == joint) return p;
        throw LookupError("no motor drives joint '" + std::string(joint) + "'");
    }
    const TendonRoute& route(std::string_view name) const {
        auto it = route_index_.find(std::string(name));
        if (it == route_index_.end()) throw LookupError("unknown tendon route '" + std::string(name) + "'");
        return *it->second;
    }
    /// Pairing indices, upstream (passively crossed) joints first.
    const std::vector<std::size_t>& solve_sequence() const { return order_; }

private:
    std::vector<std::size_t> solve_order() const {
        const auto& pairings = spec().motors;
        std::vector<std::set<std::size_t>> deps(pairings.size());
        auto owner = [&](const std::string& joint) -> std::optional<std::size_t> {
            for (std::size_t i = 0; i < pairings.size(); ++i)
                for (const auto& j : pairings[i].joints)
                    if (j == joint) return i;
            return std::nullopt;
        };
        for (std::size_t i = 0; i < pairings.size(); ++i) {
            for (const auto* rn : {&pairings[i].agonist, &pairings[i].antagonist, &pairings[i].partner_agonist,
                                   &pairings[i].partner_antagonist}) {
                if (rn->empty()) continue;
                for (const auto& c : route(*rn).crossed_joints)
                    if (c.passive)
                        if (auto o = owner(c.joint); o && *o != i) deps[i].insert(*o);
            }
        }
        std::vector<std::size_t> order;
        std::vector<bool> done(pairings.size(), false);
        while (order.size() < pairings.size()) {
            bool progress = false;
            for (std::size_t i = 0; i < pairings.size(); ++i) {
                if (done[i]) continue;
                bool ready = true;
                for (auto d : deps[i]) ready = ready && done[d];
                if (!ready) continue;
                done[i] = true;
                order.push_back(i);
                progress = true;
            }
            if (!progress) throw ValidationError("cyclic passive tendon crossings");
        }
        return order;
    }

    HandModelPtr model_;
    std::shared_ptr<NameTable> motor_table_;
    std::vector<Motor> motors_;
    std::map<std::string, const TendonRoute*> route_index_;
    std::vector<std::size_t> order_;
};

// -- scalar motor coordinates ---------------------------------------------------

namespace detail {

inline double spool_of(const TransmissionSpec& t) { return t.actuator.spool_radius_agonist; }

/// Motor coordinate of one pairing axis as a function of its joint angle with
/// every other joint taken from `full`. `axis` is 0 for the first joint
/// (flexion of a crosswise pair), 1 for the second (abduction).
class AxisMap {
public:
    AxisMap(const TransmissionMap& map, const MotorPairing& p, int axis, JointAngles base)
        : map_(map), p_(p), axis_(axis), base_(std::move(base)) {
        const auto& model = *map_.model();
        node_ = model.node_index(p_.joints[static_cast<std::size_t>(axis_)]);
        if (p_.kind == MotorKind::crosswise_pair) other_ = model.node_index(p_.joints[static_cast<std::size_t>(1 - axis_)]);
        ref_ = base_;
        ref_[node_] = 0.0;
        if (p_.kind == MotorKind::crosswise_pair) ref_[other_] = 0.0;
        if (p_.kind == MotorKind::tendon_pair) {
            // rest = all joints zero, so passive upstream motion shows up in the motor coordinate
            JointAngles rest = base_;
            for (std::size_t i = 0; i < rest.size(); ++i) rest[i] = 0.0;
            l0_a_ = tendon_length(model, map_.route(p_.agonist), rest);
        } else if (p_.kind == MotorKind::crosswise_pair) {
            l0_a_ = tendon_length(model, map_.route(p_.agonist), ref_);
            l0_b_ = tendon_length(model, map_.route(p_.partner_agonist), ref_);
        }
    }

    /// Motor coordinate (rad) at joint angle theta.
    double operator()(double theta) const {
        const auto& model = *map_.model();
        const double r = spool_of(map_.spec());
        if (p_.kind == MotorKind::linkage) return p_.linkage_ratio * theta;
        JointAngles full = p_.kind == MotorKind::crosswise_pair ? ref_ : base_;
        full[node_] = theta;
        propagate(full);
        if (p_.kind == MotorKind::tendon_pair) return (l0_a_ - tendon_length(model, map_.route(p_.agonist), full)) / r;
        const double da = l0_a_ - tendon_length(model, map_.route(p_.agonist), full);
        const double db = l0_b_ - tendon_length(model, map_.route(p_.partner_agonist), full);
        return axis_ == 0 ? (da + db) / (2.0 * r) : (da - db) / (2.0 * r);
    }

    double derivative(double theta, double h = kRatioStep) const {
        return ((*this)(theta + h) - (*this)(theta - h)) / (2.0 * h);
    }

    /// Effective length rate |dL/dtheta| (mm/rad) of this axis.
    double moment_arm(double theta, double h = kRatioStep) const {
        const double r = spool_of(map_.spec());
        if (p_.kind == MotorKind::linkage) return r / p_.linkage_ratio;
        return std::abs(derivative(theta, h)) * r;
    }

    const Interval& limits() const { return map_.model()->nodes()[node_].spec.limits; }

private:
    void propagate(JointAngles& full) const {
        // keep driven joints consistent with their drivers
        const auto& nodes = map_.model()->nodes();
        for (std::size_t i = 0; i < nodes.size(); ++i)
            if (nodes[i].driver >= 0) full[i] = nodes[i].factor * full[static_cast<std::size_t>(nodes[i].driver)];
    }

    const TransmissionMap& map_;
    const MotorPairing& p_;
    int axis_;
    JointAngles base_, ref_;
    std::size_t node_ = 0, other_ = 0;
    double l0_a_ = 0.0, l0_b_ = 0.0;
};

/// Solves f(theta) = target on [lo, hi] for monotone f by safeguarded Newton.
/// Returns nullopt when the target lies outside f([lo, hi]).
inline std::optional<double> invert_monotone(const std::function<double(double)>& f, double lo, double hi, double target,
                                             double tol = 1e-13) {
    double flo = f(lo) - target, fhi = f(hi) - target;
    if (flo == 0.0) return lo;
    if (fhi == 0.0) return hi;
    if ((flo > 0) == (fhi > 0)) return std::nullopt;
    double a = lo, b = hi, fa = flo;
    double x = lo + (hi - lo) * flo / (flo - fhi);
    for (int it = 0; it < 100; ++it) {
        const double fx = f(x) - target;
        if (std::abs(fx) < tol) return x;
        if ((fx > 0) == (fa > 0)) {
            a = x;
            fa = fx;
        } else {
            b = x;
        }
        const double h = std::max(1e-7, 1e-6 * (b - a));
        const double d = (f(x + h) - f(x - h)) / (2.0 * h);
        double next = d != 0.0 ? x - fx / d : 0.5 * (a + b);
        if (!(next > std::min(a, b) && next < std::max(a, b))) next = 0.5 * (a + b);
        x = next;
        if (std::abs(b - a) < 1e-15) return x;
    }
    return x;
}

}  // namespace detail

/// Motor angles that hold posture q.
inline MotorAngles joint_to_motor(const TransmissionMap& map, const JointVector& q) {
    const auto& model = *map.model();
    check_within_limits(model, q);
    const JointAngles full = apply_couplings(model, q);
    MotorAngles m = map.zero_motors();
    const auto& pairings = map.spec().motors;
    for (std::size_t i = 0; i < pairings.size(); ++i) {
        const auto& p = pairings[i];
        if (p.kind == MotorKind::crosswise_pair) {
            const double s = detail::AxisMap(map, p, 0, full)(full[model.node_index(p.joints[0])]);
            const double d = detail::AxisMap(map, p, 1, full)(full[model.node_index(p.joints[1])]);
            m.set(p.name, s + d);
            m.set(p.partner, s - d);
        } else {
            m.set(p.name, detail::AxisMap(map, p, 0, full)(full[model.node_index(p.joints[0])]));
        }
    }
    return m;
}

/// Named-joint form; unnamed joints stay at zero. Naming a driven joint is a
/// DrivenJointError.
inline MotorAngles joint_to_motor(const TransmissionMap& map, const std::map<std::string, double>& named) {
    JointVector q = map.model()->zero_vector();
    for (const auto& [name, value] : named) q.set(name, value);
    return joint_to_motor(map, q);
}

struct MotorToJointResult {
    JointVector q;
    bool clamped = false;  // some motor angle was outside the reachable range
};

/// Joint posture produced by motor angles m. Joints solve in upstream-first
/// order so passive crossings see their final upstream angles.
inline MotorToJointResult motor_to_joint(const TransmissionMap& map, const MotorAngles& m) {
    const auto& model = *map.model();
    if (m.model_id() != model.id() || m.size() != map.motor_count())
        throw LookupError("motor vector does not index this transmission");
    MotorToJointResult out{model.zero_vector(), false};
    JointAngles full = model.zero_angles();
    const auto& nodes = model.nodes();
    auto set_joint = [&](const std::string& name, double v) {
        const auto n = model.node_index(name);
        full[n] = v;
        for (std::size_t i = 0; i < nodes.size(); ++i)
            if (nodes[i].driver == static_cast<int>(n)) full[i] = nodes[i].factor * v;
        out.q.set(name, v);
    };
    auto solve = [&](const detail::AxisMap& f, double target) {
        const auto& lim = f.limits();
        if (auto t = detail::invert_monotone(std::cref(f), lim.lo, lim.hi, target)) return *t;
        out.clamped = true;
        return std::abs(f(lim.lo) - target) < std::abs(f(lim.hi) - target) ? lim.lo : lim.hi;
    };
    for (std::size_t i : map.solve_sequence()) {
        const auto& p = map.spec().motors[i];
        if (p.kind == MotorKind::crosswise_pair) {
            const double m1 = m.at(p.name), m2 = m.at(p.partner);
            const double flex = solve(detail::AxisMap(map, p, 0, full), 0.5 * (m1 + m2));
            const double abd = solve(detail::AxisMap(map, p, 1, full), 0.5 * (m1 - m2));
            set_joint(p.joints[0], flex);
            set_joint(p.joints[1], abd);
        } else {
            set_joint(p.joints[0], solve(detail::AxisMap(map, p, 0, full), m.at(p.name)));
        }
    }
    return out;
}

/// Spool radius over effective moment arm at joint angle theta, all other
/// joints at zero.
inline double transmission_ratio(const TransmissionMap& map, const MotorPairing& pairing, std::string_view joint,
                                 double theta) {
    const auto& model = *map.model();
    int axis = -1;
    for (std::size_t i = 0; i < pairing.joints.size(); ++i)
        if (pairing.joints[i] == joint) axis = static_cast<int>(i);
    if (axis < 0) throw LookupError("pairing '" + pairing.name + "' does not drive '" + std::string(joint) + "'");
    const auto& lim = model.node(joint).spec.limits;
    if (!lim.contains(theta, 1e-12)) throw RangeError("angle outside limits of '" + std::string(joint) + "'");
    const detail::AxisMap f(map, pairing, axis, model.zero_angles());
    const double arm = f.moment_arm(theta);
    if (!(arm > 1e-9))
        throw SingularityError("zero moment arm at joint '" + std::string(joint) + "', theta = " + std::to_string(theta));
    return map.spec().actuator.spool_radius_agonist / arm;
}

struct SpoolCompensation {
    double spring_deflection = 0.0;  // degrees, signed
    bool within_range = true;
};

/// Antagonist-spring deflection needed between two postures.
inline SpoolCompensation spool_compensation(const TransmissionMap& map, const MotorPairing& pairing,
                                            const JointVector& q_from, const JointVector& q_to) {
    const auto& model = *map.model();
    check_within_limits(model, q_from);
    check_within_limits(model, q_to);
    if (pairing.kind == MotorKind::linkage) return {};
    const auto a = apply_couplings(model, q_from), b = apply_couplings(model, q_to);
    auto delta = [&](const std::string& route) {
        const auto& r = map.route(route);
        return tendon_length(model, r, b) - tendon_length(model, r, a);
    };
    double worst = 0.0;
    auto consider = [&](const std::string& ag, const std::string& ant) {
        const double d = (delta(ag) + delta(ant)) / map.spec().actuator.spool_radius_antagonist * 180.0 / kPi;
        if (std::abs(d) > std::abs(worst)) worst = d;
    };
    consider(pairing.agonist, pairing.antagonist);
    if (pairing.kind == MotorKind::crosswise_pair) consider(pairing.partner_agonist, pairing.partner_antagonist);
    return {worst, std::abs(worst) <= map.spec().spring.max_deflection};
}

/// Largest |dL/dtheta| of `route` over a passively crossed joint's range,
/// divided by the moment arm of the route's own joint at rest.
inline double parasitic_coupling(const HandModel& model, const TendonRoute& route, std::string_view joint,
                                 Interval range, int steps = 200) {
    const CrossedJoint* active = nullptr;
    bool found = false;
    for (const auto& c : route.crossed_joints) {
        if (c.joint == joint) found = true;
        if (!c.passive && !active) active = &c;
    }
    if (!found) throw PreconditionError("route '" + route.name + "' does not cross '" + std::string(joint) + "'");
    if (!active) throw PreconditionError("route '" + route.name + "' drives no joint");
    const auto jn = model.node_index(joint), an = model.node_index(active->joint);
    JointAngles full = model.zero_angles();
    auto rate = [&](std::size_t node, double theta) {
        JointAngles a = full, b = full;
        a[node] = theta - kRatioStep;
        b[node] = theta + kRatioStep;
        return (tendon_length(model, route, b) - tendon_length(model, route, a)) / (2.0 * kRatioStep);
    };
    const double arm = std::abs(rate(an, 0.0));
    if (!(arm > 1e-12)) throw SingularityError("zero moment arm at joint '" + active->joint + "'");
    double worst = 0.0;
    for (int i = 0; i <= steps; ++i) {
        const double t = range.lo + (range.hi - range.lo) * i / steps;
        worst = std::max(worst, std::abs(rate(jn, t)));
    }
    return worst / arm;
}

// -- validation ---------------------------------------------------------------

/// Checks routes and the pairing table against the model. Called on load.
inline void validate_transmission(const HandModel& model) {
    const auto& t = *model.transmission();
    const auto& a = t.actuator;
    if (!(a.stall_torque > 0 && a.no_load_speed > 0 && a.current_limit > 0 && a.spool_radius_agonist > 0 &&
          a.spool_radius_antagonist > 0))
        throw ValidationError("actuator parameters must be strictly positive");
    if (!(t.spring.rate > 0)) throw ValidationError("spring rate must be > 0");
    if (!(t.spring.max_deflection > 0)) throw ValidationError("spring max_deflection must be > 0");

    std::map<std::string, const TendonRoute*> routes;
    for (const auto& r : t.routes) {
        if (routes.count(r.name)) throw ValidationError("duplicate tendon route '" + r.name + "'");
        routes[r.name] = &r;
        if (r.via_points.size() < 2) throw ValidationError("tendon route '" + r.name + "' has fewer than 2 via points");
        for (const auto& vp : r.via_points)
            if (!model.has_frame(vp.frame))
                throw ValidationError("tendon route '" + r.name + "' references unknown frame '" + vp.frame + "'");
        if (r.role == TendonRole::link) continue;
        if (r.crossed_joints.empty()) throw ValidationError("tendon route '" + r.name + "' crosses no joint");
        std::set<int> declared;
        for (const auto& c : r.crossed_joints) {
            if (!model.has_frame(c.joint) || c.joint == "branch")
                throw ValidationError("tendon route '" + r.name + "' crosses unknown joint '" + c.joint + "'");
            declared.insert(static_cast<int>(model.node_index(c.joint)));
        }
        if (declared != route_crossings(model, r))
            throw ValidationError("tendon route '" + r.name + "': crossed_joints do not match its via points");
        for (const auto& c : r.crossed_joints) {
            if (c.passive) continue;
            JointAngles full = model.zero_angles();
            const auto n = model.node_index(c.joint);
            full[n] = kRatioStep;
            const double up = tendon_length(model, r, full);
            full[n] = -kRatioStep;
            const double down = tendon_length(model, r, full);
            if ((up < down ? 1 : -1) != c.sign)
                throw ValidationError("tendon route '" + r.name + "': moment sign at '" + c.joint + "' contradicts geometry");
        }
        if (r.rest_length >= 0.0) {
            const double l0 = tendon_length(model, r, model.zero_angles());
            if (std::abs(l0 - r.rest_length) > 1e-6)
                throw ValidationError("tendon route '" + r.name + "': rest_length " + std::to_string(r.rest_length) +
                                      " differs from geometry " + std::to_string(l0));
        }
    }

    std::map<std::string, int> driven;
    auto need_route = [&](const MotorPairing& p, const std::string& name, std::vector<std::string>* active) {
        if (name.empty()) throw ValidationError("motor '" + p.name + "' is missing a tendon route");
        auto it = routes.find(name);
        if (it == routes.end()) throw ValidationError("motor '" + p.name + "' references unknown route '" + name + "'");
        for (const auto& c : it->second->crossed_joints)
            if (!c.passive) active->push_back(c.joint);
    };
    for (const auto& p : t.motors) {
        const std::size_t want = p.kind == MotorKind::crosswise_pair ? 2 : 1;
        if (p.joints.size() != want)
            throw ValidationError("motor '" + p.name + "' must drive " + std::to_string(want) + " joint(s)");
        for (const auto& j : p.joints) {
            (void)model.dof_index(j);
            if (++driven[j] > 1) throw ValidationError("joint '" + j + "' is driven by more than one motor");
        }
        if (p.kind == MotorKind::linkage) {
            if (!(p.linkage_ratio > 0)) throw ValidationError("motor '" + p.name + "': linkage ratio must be > 0");
            continue;
        }
        std::vector<std::string> active;
        need_route(p, p.agonist, &active);
        need_route(p, p.antagonist, &active);
        if (p.kind == MotorKind::crosswise_pair) {
            if (p.partner.empty()) throw ValidationError("crosswise motor '" + p.name + "' has no partner");
            need_route(p, p.partner_agonist, &active);
            need_route(p, p.partner_antagonist, &active);
        }
        for (const auto& j : active)
            if (std::find(p.joints.begin(), p.joints.end(), j) == p.joints.end())
                throw ValidationError("motor '" + p.name + "' actuates '" + j + "' which it does not declare");
    }
    for (const auto& name : model.dof_names())
        if (!driven.count(name)) throw ValidationError("independent joint '" + name + "' is driven by no motor");
}

}  // namespace sabd
