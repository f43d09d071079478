#pragma once

#include <array>
#include <cstdint>
#include <cstdio>
#include <map>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "sabd/errors.hpp"
#include "sabd/geometry.hpp"
#include "sabd/transmission_types.hpp"

namespace sabd {

inline constexpr int kDigitCount = 5;
inline constexpr int kExpectedDofs = 16;
inline constexpr double kMinBranchUpper = 1.48;  // "nearly 90 degrees"

enum class JointKind { rolling_contact, revolute };

inline const char* to_string(JointKind kind) {
    return kind == JointKind::rolling_contact ? "rolling_contact" : "revolute";
}

struct Interval {
    double lo = 0.0;
    double hi = 0.0;

    double width() const { return hi - lo; }
    double mid() const { return 0.5 * (lo + hi); }
    bool contains(double v, double tol = 0.0) const { return v >= lo - tol && v <= hi + tol; }
    double clamp(double v) const { return std::clamp(v, lo, hi); }
    bool operator==(const Interval&) const = default;
};

struct JointSpec {
    std::string name;
    JointKind kind = JointKind::revolute;
    Vec3 axis = Vec3::UnitX();          // unit, expressed in the frame reached by `origin`
    Transform origin = Transform::Identity();
    double rolling_radius = 0.0;        // mm, rolling contact only
    Vec3 link_dir = Vec3::UnitY();      // rolling contact: direction between the hinge pair
    Interval limits;
    double neutral = 0.0;
};

/// Child-frame transform without range checking.
///
/// A rolling-contact joint is a pair of parallel hinges 2r apart along
/// `link_dir`, each turning by half the joint angle. The child frame sits on
/// the second hinge, so theta = 0 reproduces `origin`.
inline Transform joint_motion(const JointSpec& joint, double theta) {
    if (joint.kind == JointKind::revolute) return joint.origin * rotation(joint.axis, theta);
    const Vec3 span = 2.0 * joint.rolling_radius * joint.link_dir;
    // Transl(-span) * R(theta/2) * Transl(span) * R(theta/2), expanded
    const Mat3 half = Eigen::AngleAxisd(0.5 * theta, joint.axis).toRotationMatrix();
    Transform motion = Transform::Identity();
    motion.linear() = half * half;
    motion.translation() = half * span - span;
    return joint.origin * motion;
}

inline Transform rolling_contact_transform(const JointSpec& joint, double theta) {
    if (joint.kind != JointKind::rolling_contact)
        throw PreconditionError("joint '" + joint.name + "' is not a rolling-contact joint");
    if (!joint.limits.contains(theta, 1e-12))
        throw RangeError("angle " + std::to_string(theta) + " outside limits of '" + joint.name + "'");
    return joint_motion(joint, theta);
}

/// Anatomical joint centre in the parent frame: the contact point of a rolling
/// joint, the axis point of a revolute one. Used for keypoints.
inline Vec3 joint_center(const JointSpec& joint, double theta) {
    if (joint.kind == JointKind::revolute) return joint.origin.translation();
    const Vec3 span = 2.0 * joint.rolling_radius * joint.link_dir;
    const Transform t = joint.origin * translation(-span) * rotation(joint.axis, 0.5 * theta);
    return t * (joint.rolling_radius * joint.link_dir);
}

struct CouplingSpec {
    std::string driver;
    std::string driven;
    double factor = 1.0;
};

struct ContactPatch {
    std::string frame;
    Vec3 center = Vec3::Zero();        // mm, in `frame`
    Vec3 normal = Vec3::UnitZ();       // outward pad normal, in `frame`
    double radius = 5.0;               // mm
};

struct DigitSpec {
    std::string name;
    std::string parent;                // "palm" or the branch joint
    std::vector<JointSpec> joints;     // proximal to distal
    Vec3 fingertip = Vec3::Zero();     // in the distal frame
    std::vector<ContactPatch> patches;
};

/// Unvalidated hand description as read from a document.
struct HandDescription {
    std::string schema;
    std::string name;
    Transform palm_frame = Transform::Identity();
    std::optional<JointSpec> wrist;
    std::optional<JointSpec> branch;
    std::vector<DigitSpec> digits;
    std::vector<ContactPatch> palm_patches;
    std::vector<CouplingSpec> couplings;
    std::map<std::string, Interval> effective_limits;
    bool use_effective_limits = false;
    std::optional<TransmissionSpec> transmission;
    std::string canonical_text;        // normalised document, hashed into the model id
};

/// Name <-> index table shared by every vector indexing the same model.
struct NameTable {
    std::vector<std::string> names;
    std::unordered_map<std::string, std::size_t> index;
    std::vector<std::string> driven;   // JointVector only: names that exist but are coupled
    std::string model_id;

    std::optional<std::size_t> find(std::string_view name) const {
        auto it = index.find(std::string(name));
        if (it == index.end()) return std::nullopt;
        return it->second;
    }
};

namespace detail {

template <class Tag>
class NamedVector {
public:
    NamedVector() = default;
    explicit NamedVector(std::shared_ptr<const NameTable> table)
        : table_(std::move(table)), values_(table_->names.size(), 0.0) {}
    NamedVector(std::shared_ptr<const NameTable> table, std::vector<double> values)
        : table_(std::move(table)), values_(std::move(values)) {
        if (values_.size() != table_->names.size())
            throw ConfigurationError("vector size does not match model");
    }

    std::size_t size() const { return values_.size(); }
    double operator[](std::size_t i) const { return values_[i]; }
    double& operator[](std::size_t i) { return values_[i]; }
    std::span<const double> values() const { return values_; }
    std::span<double> values() { return values_; }
    const NameTable& table() const { return *table_; }
    const std::shared_ptr<const NameTable>& table_ptr() const { return table_; }
    const std::string& model_id() const { return table_->model_id; }
    const std::string& name(std::size_t i) const { return table_->names[i]; }

    bool contains(std::string_view n) const { return table_->find(n).has_value(); }

    std::size_t index_of(std::string_view n) const {
        if (auto i = table_->find(n)) return *i;
        for (const auto& d : table_->driven)
            if (d == n) throw DrivenJointError(std::string(n) + " is driven, not independent");
        throw LookupError(std::string("unknown ") + Tag::noun + " '" + std::string(n) + "'");
    }
    double at(std::string_view n) const { return values_[index_of(n)]; }
    void set(std::string_view n, double v) { values_[index_of(n)] = v; }

    bool operator==(const NamedVector& o) const {
        return model_id() == o.model_id() && values_ == o.values_;
    }

private:
    std::shared_ptr<const NameTable> table_;
    std::vector<double> values_;
};

struct JointVectorTag {
    static constexpr const char* noun = "joint";
};
struct JointAnglesTag {
    static constexpr const char* noun = "joint";
};

}  // namespace detail

/// Angles of the independent DoFs of one model.
using JointVector = detail::NamedVector<detail::JointVectorTag>;
/// Angles of every joint of a model (independent and coupled).
using JointAngles = detail::NamedVector<detail::JointAnglesTag>;

inline constexpr int kPalmFrame = 0;
inline constexpr int kBaseFrame = -1;

/// Flattened joint of the kinematic tree. Frame `node + 1` is the joint's child frame.
struct JointNode {
    JointSpec spec;
    int parent_frame = kPalmFrame;  // kBaseFrame for the wrist
    int digit = -1;                 // 0..4, -1 for wrist and branch
    int dof = -1;                   // index into JointVector, -1 when driven
    int driver = -1;                // node index of the driver when coupled
    double factor = 0.0;
};

struct PatchNode {
    ContactPatch patch;
    int frame = kPalmFrame;
    int digit = -1;                 // -1 for palm pads
    int local_index = 0;            // order within its digit, proximal first
};

struct DigitInfo {
    std::string name;
    std::vector<int> nodes;         // chain from the palm, branch included for digits 4/5
    std::vector<int> own_nodes;     // nodes belonging to the digit itself
    Vec3 fingertip = Vec3::Zero();
    std::vector<int> patches;
};

inline std::uint64_t fnv1a64(std::string_view text) {
    std::uint64_t h = 1469598103934665603ull;
    for (unsigned char c : text) {
        h ^= c;
        h *= 1099511628211ull;
    }
    return h;
}

class HandModel {
public:
    static std::shared_ptr<const HandModel> build(HandDescription description);

    const HandDescription& description() const { return desc_; }
    const std::string& name() const { return desc_.name; }
    const std::string& id() const { return dofs_->model_id; }

    std::size_t dof_count() const { return dofs_->names.size(); }
    const std::vector<std::string>& dof_names() const { return dofs_->names; }
    std::size_t dof_index(std::string_view name) const {
        if (auto i = dofs_->find(name)) return *i;
        ensure_not_driven(name);
        throw LookupError("unknown joint '" + std::string(name) + "'");
    }
    int dof_node(std::size_t dof) const { return dof_nodes_[dof]; }

    const std::vector<JointNode>& nodes() const { return nodes_; }
    std::size_t node_index(std::string_view name) const {
        if (auto i = all_->find(name)) return *i;
        throw LookupError("unknown joint '" + std::string(name) + "'");
    }
    const JointNode& node(std::string_view name) const { return nodes_[node_index(name)]; }

    /// Frame index for a frame identifier ("palm", "branch" or a joint name).
    int frame_index(std::string_view name) const {
        if (name == "palm") return kPalmFrame;
        if (name == "branch") return static_cast<int>(branch_node_) + 1;
        auto i = all_->find(name);
        if (!i || static_cast<int>(*i) == wrist_node_)
            throw LookupError("unknown frame '" + std::string(name) + "'");
        return static_cast<int>(*i) + 1;
    }
    bool has_frame(std::string_view name) const {
        try {
            (void)frame_index(name);
            return true;
        } catch (const LookupError&) {
            return false;
        }
    }

    const std::array<DigitInfo, kDigitCount>& digits() const { return digits_; }
    const DigitInfo& digit(int d) const { return digits_.at(static_cast<std::size_t>(d)); }
    /// 1-based digit number ("digit4" -> 3). Throws LookupError("unknown digit").
    int digit_index(std::string_view name) const;

    const std::vector<PatchNode>& patches() const { return patches_; }

    int branch_node() const { return static_cast<int>(branch_node_); }
    int wrist_node() const { return wrist_node_; }
    const JointSpec& branch() const { return nodes_[branch_node_].spec; }
    std::size_t branch_dof() const { return static_cast<std::size_t>(nodes_[branch_node_].dof); }

    const Interval& limits(std::size_t dof) const { return nodes_[dof_nodes_[dof]].spec.limits; }
    double neutral(std::size_t dof) const { return nodes_[dof_nodes_[dof]].spec.neutral; }

    const std::optional<TransmissionSpec>& transmission() const { return desc_.transmission; }

    JointVector zero_vector() const { return JointVector(dofs_); }
    JointVector neutral_vector() const {
        JointVector q(dofs_);
        for (std::size_t i = 0; i < dof_count(); ++i) q[i] = neutral(i);
        return q;
    }
    JointVector make_vector(std::vector<double> values) const { return JointVector(dofs_, std::move(values)); }
    JointAngles zero_angles() const { return JointAngles(all_); }
    const std::shared_ptr<const NameTable>& dof_table() const { return dofs_; }
    const std::shared_ptr<const NameTable>& joint_table() const { return all_; }

private:
    HandModel() = default;
    void ensure_not_driven(std::string_view name) const {
        for (const auto& d : dofs_->driven)
            if (d == name) throw DrivenJointError(std::string(name) + " is driven, not independent");
    }

    HandDescription desc_;
    std::vector<JointNode> nodes_;
    std::vector<int> dof_nodes_;
    std::array<DigitInfo, kDigitCount> digits_;
    std::vector<PatchNode> patches_;
    std::size_t branch_node_ = 0;
    int wrist_node_ = -1;
    std::shared_ptr<const NameTable> dofs_;
    std::shared_ptr<const NameTable> all_;
};

using HandModelPtr = std::shared_ptr<const HandModel>;

// -- validation -------------------------------------------------------------

namespace detail {

inline void validate_joint(const JointSpec& j) {
    if (j.name.empty()) throw ValidationError("joint with empty name");
    if (!(j.limits.lo <= j.limits.hi))
        throw ValidationError("joint '" + j.name + "': limits lo > hi");
    if (std::abs(j.axis.norm() - 1.0) > 1e-9)
        throw ValidationError("joint '" + j.name + "': axis is not unit length");
    const bool rolling = j.kind == JointKind::rolling_contact;
    if (rolling != (j.rolling_radius > 0.0))
        throw ValidationError("joint '" + j.name + "': rolling_radius > 0 iff kind == rolling_contact");
    if (rolling && std::abs(j.link_dir.norm() - 1.0) > 1e-9)
        throw ValidationError("joint '" + j.name + "': link_dir is not unit length");
    if (!j.limits.contains(j.neutral))
        throw ValidationError("joint '" + j.name + "': neutral angle outside limits");
    if (!j.origin.matrix().allFinite()) throw ValidationError("joint '" + j.name + "': non-finite origin");
}

inline void validate_patch(const ContactPatch& p, const std::string& where) {
    if (std::abs(p.normal.norm() - 1.0) > 1e-9)
        throw ValidationError(where + ": contact patch normal is not unit length");
    if (!(p.radius > 0.0)) throw ValidationError(where + ": contact patch radius must be > 0");
    if (!p.center.allFinite()) throw ValidationError(where + ": non-finite contact patch centre");
}

}  // namespace detail

inline int HandModel::digit_index(std::string_view name) const {
    for (int d = 0; d < kDigitCount; ++d)
        if (digits_[static_cast<std::size_t>(d)].name == name) return d;
    throw LookupError("unknown digit '" + std::string(name) + "'");
}

inline std::shared_ptr<const HandModel> HandModel::build(HandDescription desc) {
    using detail::validate_joint;
    if (desc.schema.empty()) throw ValidationError("missing schema version");
    if (!desc.wrist) throw ValidationError("missing wrist joint");
    if (!desc.branch) throw ValidationError("missing combined abduction");
    if (desc.branch->kind != JointKind::revolute)
        throw ValidationError("combined abduction must be a revolute joint");

    static const std::array<const char*, kDigitCount> kNames{"digit1", "digit2", "digit3", "digit4", "digit5"};
    if (desc.digits.size() != kDigitCount)
        throw ValidationError("expected five digits, found " + std::to_string(desc.digits.size()));

    auto model = std::shared_ptr<HandModel>(new HandModel());
    HandModel& m = *model;
    auto all = std::make_shared<NameTable>();

    auto add_node = [&](JointSpec spec, int parent_frame, int digit) {
        validate_joint(spec);
        if (desc.use_effective_limits) {
            if (auto it = desc.effective_limits.find(spec.name); it != desc.effective_limits.end()) {
                spec.limits = it->second;
                spec.neutral = spec.limits.clamp(spec.neutral);
                validate_joint(spec);
            }
        }
        if (all->index.count(spec.name)) throw ValidationError("duplicate joint name '" + spec.name + "'");
        const auto idx = m.nodes_.size();
        all->index[spec.name] = idx;
        all->names.push_back(spec.name);
        m.nodes_.push_back(JointNode{std::move(spec), parent_frame, digit, -1, -1, 0.0});
        return static_cast<int>(idx);
    };

    m.wrist_node_ = add_node(*desc.wrist, kBaseFrame, -1);
    m.branch_node_ = static_cast<std::size_t>(add_node(*desc.branch, kPalmFrame, -1));
    const int branch_frame = static_cast<int>(m.branch_node_) + 1;
    if (desc.branch->limits.lo > 0.0 || desc.branch->limits.hi < kMinBranchUpper)
        throw ValidationError("combined abduction limits must span at least [0, 1.48] rad");

    std::map<std::string, int> digit_slot;
    for (std::size_t i = 0; i < desc.digits.size(); ++i) digit_slot[desc.digits[i].name] = static_cast<int>(i);
    for (int d = 0; d < kDigitCount; ++d) {
        auto it = digit_slot.find(kNames[static_cast<std::size_t>(d)]);
        if (it == digit_slot.end())
            throw ValidationError(std::string("missing ") + kNames[static_cast<std::size_t>(d)]);
        const DigitSpec& spec = desc.digits[static_cast<std::size_t>(it->second)];
        if (spec.joints.empty()) throw ValidationError(spec.name + ": digit has no joints");
        const bool on_branch = (spec.parent == "branch" || spec.parent == desc.branch->name);
        if ((d >= 3) != on_branch)
            throw ValidationError(spec.name + (d >= 3 ? ": digits four and five must descend from the combined abduction"
                                                      : ": only digits four and five may descend from the combined abduction"));
        if (!on_branch && spec.parent != "palm")
            throw ValidationError(spec.name + ": unknown parent frame '" + spec.parent + "'");
        if (!spec.fingertip.allFinite()) throw ValidationError(spec.name + ": non-finite fingertip point");

        DigitInfo& info = m.digits_[static_cast<std::size_t>(d)];
        info.name = spec.name;
        info.fingertip = spec.fingertip;
        int parent = on_branch ? branch_frame : kPalmFrame;
        if (on_branch) info.nodes.push_back(static_cast<int>(m.branch_node_));
        for (const auto& js : spec.joints) {
            const int idx = add_node(js, parent, d);
            info.nodes.push_back(idx);
            info.own_nodes.push_back(idx);
            parent = idx + 1;
        }
    }

    // couplings
    std::map<std::string, const CouplingSpec*> driven_by;
    for (const auto& c : desc.couplings) {
        if (c.driver == c.driven) throw ValidationError("coupling driver equals driven ('" + c.driver + "')");
        if (!all->index.count(c.driver)) throw ValidationError("coupling references unknown joint '" + c.driver + "'");
        if (!all->index.count(c.driven)) throw ValidationError("coupling references unknown joint '" + c.driven + "'");
        if (driven_by.count(c.driven)) throw ValidationError("joint '" + c.driven + "' is driven by more than one coupling");
        if (!std::isfinite(c.factor)) throw ValidationError("non-finite coupling factor");
        driven_by[c.driven] = &c;
    }
    for (const auto& c : desc.couplings) {
        if (driven_by.count(c.driver)) throw ValidationError("coupling driver '" + c.driver + "' is itself driven");
        auto& driven = m.nodes_[all->index[c.driven]];
        const auto& driver = m.nodes_[all->index[c.driver]];
        driven.driver = static_cast<int>(all->index[c.driver]);
        driven.factor = c.factor;
        const double a = c.factor * driver.spec.limits.lo, b = c.factor * driver.spec.limits.hi;
        const Interval implied{std::min(a, b), std::max(a, b)};
        if (!driven.spec.limits.contains(implied.lo, 1e-9) || !driven.spec.limits.contains(implied.hi, 1e-9))
            throw ValidationError("limits of driven joint '" + c.driven + "' do not contain factor x driver limits");
    }
    if (m.nodes_[m.branch_node_].driver >= 0) throw ValidationError("combined abduction cannot be driven");

    // independent DoFs
    auto dofs = std::make_shared<NameTable>();
    for (std::size_t i = 0; i < m.nodes_.size(); ++i) {
        auto& n = m.nodes_[i];
        if (n.driver >= 0) {
            dofs->driven.push_back(n.spec.name);
            continue;
        }
        n.dof = static_cast<int>(dofs->names.size());
        dofs->index[n.spec.name] = dofs->names.size();
        dofs->names.push_back(n.spec.name);
        m.dof_nodes_.push_back(static_cast<int>(i));
    }
    if (dofs->names.size() != kExpectedDofs)
        throw ValidationError("expected 16 independent DoFs after couplings, found " + std::to_string(dofs->names.size()));

    // contact patches
    auto resolve_frame = [&](const std::string& f) -> int {
        if (f == "palm") return kPalmFrame;
        if (f == "branch") return branch_frame;
        auto it = all->index.find(f);
        if (it == all->index.end() || static_cast<int>(it->second) == m.wrist_node_)
            throw ValidationError("contact patch references unknown frame '" + f + "'");
        return static_cast<int>(it->second) + 1;
    };
    for (const auto& p : desc.palm_patches) {
        detail::validate_patch(p, "palm pad");
        const int f = resolve_frame(p.frame);
        if (f != kPalmFrame && f != branch_frame) throw ValidationError("palm pad must live on the palm or branch frame");
        m.patches_.push_back(PatchNode{p, f, -1, static_cast<int>(m.patches_.size())});
    }
    for (int d = 0; d < kDigitCount; ++d) {
        const DigitSpec& spec = desc.digits[static_cast<std::size_t>(digit_slot[kNames[static_cast<std::size_t>(d)]])];
        int local = 0;
        for (const auto& p : spec.patches) {
            detail::validate_patch(p, spec.name);
            const int f = resolve_frame(p.frame);
            bool own = false;
            for (int n : m.digits_[static_cast<std::size_t>(d)].own_nodes) own = own || (n + 1 == f);
            if (!own) throw ValidationError(spec.name + ": contact patch frame '" + p.frame + "' is not a phalanx of the digit");
            m.digits_[static_cast<std::size_t>(d)].patches.push_back(static_cast<int>(m.patches_.size()));
            m.patches_.push_back(PatchNode{p, f, d, local++});
        }
    }

    char hex[17];
    std::snprintf(hex, sizeof hex, "%016llx", static_cast<unsigned long long>(fnv1a64(desc.canonical_text + (desc.use_effective_limits ? "|effective" : ""))));
    all->model_id = dofs->model_id = desc.name + "#" + hex;
    m.dofs_ = dofs;
    m.all_ = all;
    m.desc_ = std::move(desc);
    return model;
}

// -- kinematics ---------------------------------------------------------------

/// Expands independent DoFs to every joint: driven joints get factor x driver.
inline JointAngles apply_couplings(const HandModel& model, const JointVector& q) {
    if (q.model_id() != model.id()) throw LookupError("joint vector indexes a different model");
    JointAngles full = model.zero_angles();
    const auto& nodes = model.nodes();
    for (std::size_t i = 0; i < nodes.size(); ++i)
        if (nodes[i].dof >= 0) full[i] = q[static_cast<std::size_t>(nodes[i].dof)];
    for (std::size_t i = 0; i < nodes.size(); ++i)
        if (nodes[i].driver >= 0) full[i] = nodes[i].factor * full[static_cast<std::size_t>(nodes[i].driver)];
    return full;
}

/// Projects every value into its joint interval. Idempotent.
inline JointVector clamp_to_limits(const HandModel& model, JointVector q) {
    for (std::size_t i = 0; i < q.size(); ++i) q[i] = model.limits(i).clamp(q[i]);
    return q;
}

inline void check_within_limits(const HandModel& model, const JointVector& q, double tol = 1e-9) {
    for (std::size_t i = 0; i < q.size(); ++i) {
        if (!std::isfinite(q[i])) throw RangeError("non-finite angle for '" + model.dof_names()[i] + "'");
        if (!model.limits(i).contains(q[i], tol))
            throw RangeError("angle " + std::to_string(q[i]) + " outside limits of '" + model.dof_names()[i] + "'");
    }
}

/// Child-frame transforms of every joint in palm coordinates, index = frame
/// (frame 0 is the palm root). The wrist entry holds base_from_palm instead.
inline std::vector<Transform> frame_transforms(const HandModel& model, const JointAngles& full) {
    const auto& nodes = model.nodes();
    std::vector<Transform> frames(nodes.size() + 1, Transform::Identity());
    frames[kPalmFrame] = model.description().palm_frame;
    for (std::size_t i = 0; i < nodes.size(); ++i) {
        const auto& n = nodes[i];
        const Transform local = joint_motion(n.spec, full[i]);
        if (n.parent_frame == kBaseFrame)
            frames[i + 1] = local;
        else
            frames[i + 1] = frames[static_cast<std::size_t>(n.parent_frame)] * local;
    }
    return frames;
}

/// Transform of one frame, walking only its ancestor chain.
inline Transform chain_transform(const HandModel& model, const JointAngles& full, int frame) {
    const auto& nodes = model.nodes();
    Transform out = Transform::Identity();
    while (frame != kPalmFrame) {
        const auto i = static_cast<std::size_t>(frame - 1);
        out = joint_motion(nodes[i].spec, full[i]) * out;
        frame = nodes[i].parent_frame;
        if (frame == kBaseFrame) return out;
    }
    return model.description().palm_frame * out;
}

struct FingertipPose {
    Transform distal = Transform::Identity();
    Vec3 tip = Vec3::Zero();
};

struct FingertipPoses {
    std::array<FingertipPose, kDigitCount> digits;
    Transform base_from_palm = Transform::Identity();
};

inline FingertipPoses forward_kinematics(const HandModel& model, const JointVector& q) {
    check_within_limits(model, q);
    const JointAngles full = apply_couplings(model, q);
    const auto frames = frame_transforms(model, full);
    FingertipPoses out;
    for (int d = 0; d < kDigitCount; ++d) {
        const auto& info = model.digit(d);
        auto& pose = out.digits[static_cast<std::size_t>(d)];
        pose.distal = frames[static_cast<std::size_t>(info.nodes.back() + 1)];
        pose.tip = pose.distal * info.fingertip;
    }
    out.base_from_palm = frames[static_cast<std::size_t>(model.wrist_node() + 1)];
    return out;
}

/// Fingertip of one digit from full angles (no validation).
inline Vec3 fingertip_position(const HandModel& model, const JointAngles& full, int digit) {
    const auto& info = model.digit(digit);
    return chain_transform(model, full, info.nodes.back() + 1) * info.fingertip;
}

struct PatchPose {
    Vec3 center;
    Vec3 normal;
};

inline PatchPose patch_pose(const std::vector<Transform>& frames, const PatchNode& p) {
    const Transform& t = frames[static_cast<std::size_t>(p.frame)];
    return {t * p.patch.center, t.linear() * p.patch.normal};
}

}  // namespace sabd
