#pragma once

// Grasp capability: thumb opposition, widest parallel-sided grasp, palm-up
// sphere grasps, and quasi-static disturbance resistance.

#include <algorithm>
#include <array>
#include <cmath>
#include <iomanip>
#include <limits>
#include <optional>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "sabd/hand_model.hpp"
#include "sabd/lp.hpp"
#include "sabd/nelder_mead.hpp"
#include "sabd/parallel.hpp"
#include "sabd/transmission.hpp"

namespace sabd {

inline constexpr const char* kDisturbanceSchema = "sabd.disturbance/1";
inline constexpr double kInfiniteForce = std::numeric_limits<double>::infinity();

struct Contact {
    Vec3 position = Vec3::Zero();   // mm, palm frame
    Vec3 normal = Vec3::UnitZ();    // unit, pointing into the object
    double mu = 0.8;
    double max_normal_force = kInfiniteForce;  // N
    std::string patch;              // "<frame>#<index>" or empty
    int digit = -1;                 // -1 for palm pads
};

enum class ObjectKind { sphere, parallel_plates };

struct GraspObject {
    ObjectKind kind = ObjectKind::sphere;
    double size = 0.0;              // sphere diameter or plate distance, mm
    Transform pose = Transform::Identity();  // object frame in the palm frame
};

/// Bound on a motor's joint-side torque: -negative <= sum_c gain_c . f_c <= positive,
/// with f_c the force contact c exerts on the object.
struct TorqueLimit {
    std::string joint;
    double positive = kInfiniteForce;  // N*m, flexion / positive joint direction
    double negative = kInfiniteForce;  // N*m
    std::vector<std::pair<int, Vec3>> gains;  // contact index, N*m per N
};

struct ContactSet {
    std::vector<Contact> contacts;
    GraspObject object;
    Vec3 up = Vec3::UnitZ();        // opposite to gravity, palm frame
    std::vector<TorqueLimit> torque_limits;
};

inline void validate_contact_set(const ContactSet& s) {
    if (s.contacts.empty()) throw ValidationError("contact set is empty");
    for (const auto& c : s.contacts) {
        if (!c.position.allFinite()) throw ValidationError("contact position is not finite");
        if (std::abs(c.normal.norm() - 1.0) > 1e-6) throw ValidationError("contact normal must be unit length");
        if (!(c.mu >= 0) || !std::isfinite(c.mu)) throw ValidationError("friction coefficient must be finite and >= 0");
        if (!(c.max_normal_force > 0)) throw ValidationError("normal force cap must be > 0");
    }
    if (std::abs(s.up.norm() - 1.0) > 1e-6) throw ValidationError("up direction must be unit length");
    for (const auto& t : s.torque_limits) {
        if (!(t.positive > 0 && t.negative > 0)) throw ValidationError("torque limits for " + t.joint + " must be > 0");
        for (const auto& [c, g] : t.gains)
            if (c < 0 || c >= static_cast<int>(s.contacts.size()) || !g.allFinite())
                throw ValidationError("torque limit for " + t.joint + " has a bad contact term");
    }
}

// -- wrench feasibility ---------------------------------------------------------

struct ResistanceOptions {
    bool gravity = true;
    double mass = 0.1;              // kg
    double g = 9.81;                // m/s^2
    int cone_edges = 8;
    double max_scale = 4.0;         // cap on the reported load scale
};

struct ResistanceResult {
    bool resisted = false;
    /// Largest s with s * (required wrench) achievable, capped at max_scale;
    /// resisted iff s >= 1.
    double scale = 0.0;
    double margin() const { return scale - 1.0; }
};

/// Edges of the linearised friction cone, each with unit normal component.
inline std::vector<Vec3> friction_edges(const Vec3& normal, double mu, int edges) {
    const Vec3 n = normal.normalized();
    const Vec3 helper = std::abs(n.x()) < 0.9 ? Vec3::UnitX() : Vec3::UnitY();
    const Vec3 t1 = n.cross(helper).normalized();
    const Vec3 t2 = n.cross(t1);
    std::vector<Vec3> out;
    for (int k = 0; k < edges; ++k) {
        const double a = 2.0 * kPi * k / edges;
        out.push_back(n + mu * (std::cos(a) * t1 + std::sin(a) * t2));
    }
    return out;
}

/// Six-vector (force N, torque N*m about `center`) of a force at `point` (mm).
inline Eigen::Matrix<double, 6, 1> wrench_of(const Vec3& force, const Vec3& point, const Vec3& center) {
    Eigen::Matrix<double, 6, 1> w;
    w.head<3>() = force;
    w.tail<3>() = (1e-3 * (point - center)).cross(force);
    return w;
}

/// Whether contact forces inside the linearised cones and under the caps can
/// supply `required` (the wrench the contacts must exert on the object).
inline ResistanceResult wrench_feasibility(const ContactSet& set, const Eigen::Matrix<double, 6, 1>& required,
                                           const ResistanceOptions& opt = {}) {
    validate_contact_set(set);
    ResistanceResult out;
    if (required.norm() < 1e-12) {
        out.resisted = true;
        out.scale = opt.max_scale;
        return out;
    }
    const Vec3 center = set.object.pose.translation();
    const int k = opt.cone_edges;
    const auto nc = static_cast<int>(set.contacts.size());
    const int vars = nc * k + 1;
    std::vector<int> capped;
    for (int j = 0; j < nc; ++j)
        if (std::isfinite(set.contacts[static_cast<std::size_t>(j)].max_normal_force)) capped.push_back(j);
    std::vector<const TorqueLimit*> limits;
    for (const auto& t : set.torque_limits)
        if (!t.gains.empty() && (std::isfinite(t.positive) || std::isfinite(t.negative))) limits.push_back(&t);
    const int rows = 6 + static_cast<int>(capped.size()) + 2 * static_cast<int>(limits.size()) + 1;
    LinearProgram lp;
    lp.A = Eigen::MatrixXd::Zero(rows, vars);
    lp.b = Eigen::VectorXd::Zero(rows);
    lp.rel.assign(static_cast<std::size_t>(rows), Relation::equal);
    lp.c = Eigen::VectorXd::Zero(vars);
    for (int j = 0; j < nc; ++j) {
        const auto& c = set.contacts[static_cast<std::size_t>(j)];
        const auto edges = friction_edges(c.normal, c.mu, k);
        for (int e = 0; e < k; ++e) lp.A.block<6, 1>(0, j * k + e) = wrench_of(edges[static_cast<std::size_t>(e)], c.position, center);
    }
    lp.A.block<6, 1>(0, vars - 1) = -required;
    int row = 6;
    for (int j : capped) {
        lp.A.block(row, j * k, 1, k).setOnes();
        lp.b[row] = set.contacts[static_cast<std::size_t>(j)].max_normal_force;
        lp.rel[static_cast<std::size_t>(row)] = Relation::less_equal;
        ++row;
    }
    for (const auto* t : limits) {
        for (const auto& [j, g] : t->gains) {
            const auto& c = set.contacts[static_cast<std::size_t>(j)];
            const auto edges = friction_edges(c.normal, c.mu, k);
            for (int e = 0; e < k; ++e) {
                const double v = g.dot(edges[static_cast<std::size_t>(e)]);
                lp.A(row, j * k + e) += v;
                lp.A(row + 1, j * k + e) -= v;
            }
        }
        lp.b[row] = std::min(t->positive, 1e12);
        lp.b[row + 1] = std::min(t->negative, 1e12);
        lp.rel[static_cast<std::size_t>(row)] = lp.rel[static_cast<std::size_t>(row + 1)] = Relation::less_equal;
        row += 2;
    }
    lp.A(row, vars - 1) = 1.0;
    lp.b[row] = opt.max_scale;
    lp.rel[static_cast<std::size_t>(row)] = Relation::less_equal;
    lp.c[vars - 1] = 1.0;
    const auto r = solve_lp(lp);
    if (r.status != LpStatus::optimal) return out;
    out.scale = r.x[vars - 1];
    out.resisted = out.scale >= 1.0 - 1e-9;
    return out;
}

/// External force (N) at the object centre plus gravity on the object.
inline ResistanceResult disturbance_margin(const ContactSet& set, const Vec3& force, const ResistanceOptions& opt = {}) {
    Vec3 load = force;
    if (opt.gravity) load += -opt.mass * opt.g * set.up.normalized();
    Eigen::Matrix<double, 6, 1> required = Eigen::Matrix<double, 6, 1>::Zero();
    required.head<3>() = -load;
    return wrench_feasibility(set, required, opt);
}

inline bool disturbance_resistance(const ContactSet& set, const Vec3& force, const ResistanceOptions& opt = {}) {
    return disturbance_margin(set, force, opt).resisted;
}

// -- shared search helpers ------------------------------------------------------

namespace detail {

struct DofBox {
    std::vector<std::size_t> dofs;
    Eigen::VectorXd lo, hi;
};

inline DofBox dof_box(const HandModel& model, const std::vector<std::size_t>& dofs) {
    DofBox b{dofs, Eigen::VectorXd(static_cast<Eigen::Index>(dofs.size())), Eigen::VectorXd(static_cast<Eigen::Index>(dofs.size()))};
    for (std::size_t i = 0; i < dofs.size(); ++i) {
        b.lo[static_cast<Eigen::Index>(i)] = model.limits(dofs[i]).lo;
        b.hi[static_cast<Eigen::Index>(i)] = model.limits(dofs[i]).hi;
    }
    return b;
}

inline void apply(JointVector& q, const DofBox& box, const Eigen::VectorXd& x) {
    for (std::size_t i = 0; i < box.dofs.size(); ++i) q[box.dofs[i]] = x[static_cast<Eigen::Index>(i)];
}

inline std::vector<std::size_t> digit_dofs(const HandModel& model, int digit) {
    std::vector<std::size_t> out;
    for (int n : model.digit(digit).own_nodes) {
        const int d = model.nodes()[static_cast<std::size_t>(n)].dof;
        if (d >= 0) out.push_back(static_cast<std::size_t>(d));
    }
    return out;
}

inline bool uses_branch(const HandModel& model, int digit) {
    const auto& chain = model.digit(digit).nodes;
    return std::find(chain.begin(), chain.end(), model.branch_node()) != chain.end();
}

inline Eigen::VectorXd random_point(SplitMix64& rng, const Eigen::VectorXd& lo, const Eigen::VectorXd& hi) {
    Eigen::VectorXd x(lo.size());
    for (Eigen::Index i = 0; i < lo.size(); ++i) x[i] = rng.uniform(lo[i], hi[i]);
    return x;
}

/// Pad pose and owning frame for every contact patch.
struct PadPose {
    Vec3 center, normal;
    int frame = kPalmFrame;
    int digit = -1;
    std::string id;
};

inline std::vector<PadPose> pad_poses(const HandModel& model, const std::vector<Transform>& frames) {
    std::vector<PadPose> out;
    for (const auto& p : model.patches()) {
        const auto pose = patch_pose(frames, p);
        out.push_back({pose.center, pose.normal.normalized(), p.frame, p.digit,
                       p.patch.frame + "#" + std::to_string(p.local_index)});
    }
    return out;
}

}  // namespace detail

// -- pinch ----------------------------------------------------------------------

struct SearchOptions {
    int starts = 24;
    int max_iterations = 4000;
    double tolerance = 1e-10;
    std::uint64_t seed = 7;
};

struct PinchResult {
    bool achievable = false;
    JointVector q;
    double residual = 0.0;  // mm
};

inline constexpr double kPinchTolerance = 2.0;  // mm

/// Tip-to-tip opposition of the thumb with digit 2..5 (1-based digit number).
inline PinchResult pinch_check(const HandModelPtr& model_ptr, int digit, const SearchOptions& opt = {}) {
    const auto& model = *model_ptr;
    if (digit < 2 || digit > 5) throw RangeError("pinch digit must be 2..5");
    const int d = digit - 1;
    auto dofs = detail::digit_dofs(model, 0);
    for (auto i : detail::digit_dofs(model, d)) dofs.push_back(i);
    if (detail::uses_branch(model, d)) dofs.push_back(model.branch_dof());
    const auto box = detail::dof_box(model, dofs);
    const int thumb_frame = model.digit(0).nodes.back() + 1, finger_frame = model.digit(d).nodes.back() + 1;
    JointVector q = model.neutral_vector();
    auto distance = [&](const Eigen::VectorXd& x) {
        JointVector t = q;
        detail::apply(t, box, x);
        const auto full = apply_couplings(model, t);
        const Vec3 a = chain_transform(model, full, thumb_frame) * model.digit(0).fingertip;
        const Vec3 b = chain_transform(model, full, finger_frame) * model.digit(d).fingertip;
        return (a - b).squaredNorm();
    };
    NelderMeadOptions nm;
    nm.max_iterations = opt.max_iterations;
    nm.f_tol = opt.tolerance;
    nm.x_tol = 1e-9;
    double best = std::numeric_limits<double>::infinity();
    Eigen::VectorXd best_x;
    for (int s = 0; s < opt.starts; ++s) {
        SplitMix64 rng(opt.seed, static_cast<std::uint64_t>(s));
        const auto r = nelder_mead(distance, detail::random_point(rng, box.lo, box.hi), box.lo, box.hi, nm);
        // a restart from the result sharpens kinks left by bounds
        const auto r2 = nelder_mead(distance, r.x, box.lo, box.hi, nm);
        if (r2.f < best) {
            best = r2.f;
            best_x = r2.x;
        }
        if (std::sqrt(best) < 1e-3) break;
    }
    detail::apply(q, box, best_x);
    return {std::sqrt(best) <= kPinchTolerance, q, std::sqrt(best)};
}

// -- widest parallel grasp ------------------------------------------------------

struct ParallelGraspOptions {
    bool use_combined_abd = true;
    double contact_tolerance = 1.0;     // mm, coplanarity of contacts on one plate
    double max_normal_angle = kPi / 6;  // pad normal vs plate normal
    SearchOptions search{8, 3000, 1e-9, 11};
    int pair_starts = 3;
};

struct ParallelGrasp {
    double distance = 0.0;  // mm
    JointVector q;
    Vec3 plate_normal = Vec3::UnitX();  // from plate one toward plate two
    std::vector<std::string> side_one, side_two;
};

namespace detail {

struct PlateEval {
    bool valid = false;
    double distance = -std::numeric_limits<double>::infinity();
    double penalty = 0.0;
    std::vector<int> one, two;
};

inline PlateEval plate_eval(const std::vector<PadPose>& pads, const Vec3& n, int k, double tol, double cos_max) {
    PlateEval e;
    std::vector<std::pair<double, int>> s1, s2;
    for (std::size_t i = 0; i < pads.size(); ++i) {
        const double h = n.dot(pads[i].center);
        const double c = pads[i].normal.dot(n);
        if (c >= cos_max) s1.push_back({-h, static_cast<int>(i)});
        if (-c >= cos_max) s2.push_back({h, static_cast<int>(i)});
    }
    if (static_cast<int>(s1.size()) < k || static_cast<int>(s2.size()) < k) return e;
    std::sort(s1.begin(), s1.end());
    std::sort(s2.begin(), s2.end());
    const double a = -s1[0].first, b = s2[0].first;
    const double spread1 = s1[static_cast<std::size_t>(k - 1)].first - s1[0].first;
    const double spread2 = s2[static_cast<std::size_t>(k - 1)].first - s2[0].first;
    e.penalty = std::pow(std::max(0.0, spread1 - tol), 2) + std::pow(std::max(0.0, spread2 - tol), 2);
    e.valid = e.penalty == 0.0;
    e.distance = b - a;
    for (const auto& [h, i] : s1)
        if (h - s1[0].first <= tol) e.one.push_back(i);
    for (const auto& [h, i] : s2)
        if (h - s2[0].first <= tol) e.two.push_back(i);
    return e;
}

inline Vec3 unit_from_angles(double azimuth, double elevation) {
    return {std::cos(elevation) * std::cos(azimuth), std::cos(elevation) * std::sin(azimuth), std::sin(elevation)};
}

}  // namespace detail

/// Largest plate separation with at least `min_contacts_per_side` pads on
/// each plate, pad normals within 30 deg of the plate normals.
///
/// Feasibility is nested in the separation (closing the plates keeps a
/// grasp), so the bisection over d collapses to maximising the separation
/// over postures and plate orientations directly.
inline ParallelGrasp max_parallel_grasp_distance(const HandModelPtr& model_ptr, int min_contacts_per_side,
                                                 const ParallelGraspOptions& opt = {}) {
    const auto& model = *model_ptr;
    if (min_contacts_per_side < 1) throw PreconditionError("min_contacts_per_side must be >= 1");
    std::vector<std::size_t> dofs;
    const auto wrist = static_cast<std::size_t>(model.nodes()[static_cast<std::size_t>(model.wrist_node())].dof);
    for (std::size_t i = 0; i < model.dof_count(); ++i) {
        if (i == wrist) continue;
        if (!opt.use_combined_abd && i == model.branch_dof()) continue;
        dofs.push_back(i);
    }
    auto box = detail::dof_box(model, dofs);
    const auto nd = static_cast<Eigen::Index>(dofs.size());
    Eigen::VectorXd lo(nd + 2), hi(nd + 2);
    lo << box.lo, -kPi, -kPi / 2;
    hi << box.hi, kPi, kPi / 2;
    const double cos_max = std::cos(opt.max_normal_angle);
    const JointVector base = model.neutral_vector();

    auto evaluate = [&](const Eigen::VectorXd& x, JointVector* q_out) {
        JointVector q = base;
        detail::apply(q, box, x.head(nd));
        const auto frames = frame_transforms(model, apply_couplings(model, q));
        const auto pads = detail::pad_poses(model, frames);
        if (q_out) *q_out = q;
        return std::make_pair(detail::plate_eval(pads, detail::unit_from_angles(x[nd], x[nd + 1]), min_contacts_per_side,
                                                 opt.contact_tolerance, cos_max),
                              pads);
    };
    auto objective = [&](const Eigen::VectorXd& x) {
        const auto e = evaluate(x, nullptr).first;
        if (e.one.empty() || e.two.empty()) return 1e6;
        return -e.distance + 1e3 * e.penalty;
    };

    NelderMeadOptions nm;
    nm.max_iterations = opt.search.max_iterations;
    nm.f_tol = opt.search.tolerance;
    nm.x_tol = 1e-7;
    double best = std::numeric_limits<double>::infinity();
    Eigen::VectorXd best_x;
    for (int s = 0; s < opt.search.starts; ++s) {
        SplitMix64 rng(opt.search.seed, static_cast<std::uint64_t>(s));
        Eigen::VectorXd x0 = detail::random_point(rng, lo, hi);
        // random restarts until the start has pads on both sides
        for (int tries = 0; tries < 200 && objective(x0) >= 1e6; ++tries) x0 = detail::random_point(rng, lo, hi);
        auto r = nelder_mead(objective, x0, lo, hi, nm);
        for (int again = 0; again < 3; ++again) {
            const auto r2 = nelder_mead(objective, r.x, lo, hi, nm);
            if (r2.f >= r.f - 1e-9) break;
            r = r2;
        }
        if (r.f < best) {
            best = r.f;
            best_x = r.x;
        }
    }
    // pad pairs on different bodies: smooth per-pair problem over the two chains
    if (min_contacts_per_side == 1) {
        const auto& patches = model.patches();
        auto chain_dofs = [&](int digit, std::vector<bool>& mask) {
            if (digit < 0) return;
            for (int n : model.digit(digit).nodes) {
                const int d = model.nodes()[static_cast<std::size_t>(n)].dof;
                if (d >= 0) mask[static_cast<std::size_t>(d)] = true;
            }
        };
        NelderMeadOptions polish = nm;
        polish.max_iterations = 800;
        const double cos_pair = std::cos(std::max(0.0, opt.max_normal_angle - 1e-3));
        std::vector<int> index_of(model.dof_count(), -1);
        for (std::size_t i = 0; i < dofs.size(); ++i) index_of[dofs[i]] = static_cast<int>(i);
        // move the digits outside the pair to the lattice posture that interferes least
        auto park = [&](Eigen::VectorXd& x, const std::vector<bool>& used) {
            for (int d = 0; d < kDigitCount; ++d) {
                std::vector<Eigen::Index> free;
                for (int node : model.digit(d).own_nodes) {
                    const int dof = model.nodes()[static_cast<std::size_t>(node)].dof;
                    if (dof >= 0 && !used[static_cast<std::size_t>(dof)] && index_of[static_cast<std::size_t>(dof)] >= 0)
                        free.push_back(index_of[static_cast<std::size_t>(dof)]);
                }
                if (free.empty()) continue;
                int total = 1;
                for (std::size_t i = 0; i < free.size(); ++i) total *= 3;
                Eigen::VectorXd keep = x, trial = x;
                double f_keep = objective(x);
                for (int c = 0; c < total; ++c) {
                    int r = c;
                    for (auto i : free) {
                        trial[i] = lo[i] + 0.5 * (hi[i] - lo[i]) * (r % 3);
                        r /= 3;
                    }
                    const double f = objective(trial);
                    if (f < f_keep) {
                        f_keep = f;
                        keep = trial;
                    }
                }
                x = keep;
            }
        };
        for (std::size_t a = 0; a < patches.size(); ++a)
            for (std::size_t b = a + 1; b < patches.size(); ++b) {
                if (patches[a].digit == patches[b].digit) continue;
                std::vector<bool> mask(model.dof_count(), false);
                chain_dofs(patches[a].digit, mask);
                chain_dofs(patches[b].digit, mask);
                std::vector<Eigen::Index> sub;
                for (std::size_t d = 0; d < mask.size(); ++d)
                    if (mask[d] && index_of[d] >= 0) sub.push_back(index_of[d]);
                const auto ns = static_cast<Eigen::Index>(sub.size());
                Eigen::VectorXd slo(ns + 2), shi(ns + 2);
                for (Eigen::Index i = 0; i < ns; ++i) {
                    slo[i] = lo[sub[static_cast<std::size_t>(i)]];
                    shi[i] = hi[sub[static_cast<std::size_t>(i)]];
                }
                slo.tail(2) = lo.tail(2);
                shi.tail(2) = hi.tail(2);
                auto expand = [&](const Eigen::VectorXd& y) {
                    Eigen::VectorXd x = best_x.size() ? best_x : Eigen::VectorXd((lo + hi) / 2);
                    for (Eigen::Index i = 0; i < nd; ++i) x[i] = base[dofs[static_cast<std::size_t>(i)]];
                    for (Eigen::Index i = 0; i < ns; ++i) x[sub[static_cast<std::size_t>(i)]] = y[i];
                    x.tail(2) = y.tail(2);
                    return x;
                };
                double weight = 1e4;
                auto pair_objective = [&](const Eigen::VectorXd& y) {
                    JointVector q = base;
                    detail::apply(q, box, expand(y).head(nd));
                    const auto frames = frame_transforms(model, apply_couplings(model, q));
                    const auto pa = patch_pose(frames, patches[a]), pb = patch_pose(frames, patches[b]);
                    const Vec3 n = detail::unit_from_angles(y[ns], y[ns + 1]);
                    const double ca = pa.normal.normalized().dot(n), cb = -pb.normal.normalized().dot(n);
                    const double ha = n.dot(pa.center), hb = n.dot(pb.center);
                    double clash = 0.0;
                    for (std::size_t o = 0; o < patches.size(); ++o) {
                        if (o == a || o == b || (patches[o].digit != patches[a].digit && patches[o].digit != patches[b].digit))
                            continue;
                        const auto po = patch_pose(frames, patches[o]);
                        const double co = po.normal.normalized().dot(n), ho = n.dot(po.center);
                        clash += std::max(0.0, co - cos_max + 0.05) * std::max(0.0, ho - ha) +
                                 std::max(0.0, -co - cos_max + 0.05) * std::max(0.0, hb - ho);
                    }
                    return -(hb - ha) + 10.0 * clash +
                           weight * (std::pow(std::max(0.0, cos_pair - ca), 2) + std::pow(std::max(0.0, cos_pair - cb), 2));
                };
                for (int s = 0; s < opt.pair_starts; ++s) {
                    SplitMix64 rng(opt.search.seed + 1000 + a * 131 + b, static_cast<std::uint64_t>(s));
                    weight = 1e4;
                    auto r = nelder_mead(pair_objective, detail::random_point(rng, slo, shi), slo, shi, nm);
                    for (int again = 0; again < 6; ++again) {
                        const auto r2 = nelder_mead(pair_objective, r.x, slo, shi, nm);
                        const bool done = r2.f >= r.f - 1e-9;
                        r = r2;
                        if (done) break;
                    }
                    weight = 1e8;
                    r = nelder_mead(pair_objective, r.x, slo, shi, polish);
                    Eigen::VectorXd x = expand(r.x);
                    park(x, mask);
                    const double f = objective(x);
                    if (f < best) {
                        best = f;
                        best_x = x;
                    }
                }
            }
    }
    if (!std::isfinite(best) || best >= 1e6) throw DegenerateModelError("no posture puts pads on two opposing plates");
    ParallelGrasp out;
    const auto [e, pads] = evaluate(best_x, &out.q);
    if (!e.valid || e.distance < 0.0)
        throw DegenerateModelError("no posture reaches a zero-thickness parallel grasp");
    out.distance = e.distance;
    out.plate_normal = detail::unit_from_angles(best_x[nd], best_x[nd + 1]);
    for (int i : e.one) out.side_one.push_back(pads[static_cast<std::size_t>(i)].id);
    for (int i : e.two) out.side_two.push_back(pads[static_cast<std::size_t>(i)].id);
    return out;
}

// -- sphere grasp ---------------------------------------------------------------

struct SphereGraspOptions {
    double mu = 0.8;
    double contact_tolerance = 1.0;          // mm
    double max_facing_angle = kPi / 3;       // pad normal vs direction to the centre
    double stall_torque = 0.92;              // N*m, used when the model has no transmission
    int lattice = 7;                         // per-DoF grid for the posture search
    int branch_steps = 15;
    bool joint_torque_limits = true;         // contacts on one chain share its motors
    bool current_limited = true;             // scale stall torque by current_limit / stall_current
    double stall_current = 1.8;              // A
};

struct SphereGrasp {
    ContactSet contacts;
    JointVector q;
    bool coverage_gap = false;   // no contact opposite the thumb
    int digit_contacts = 0;
};

namespace detail {

struct SphereScene {
    Vec3 center;
    double radius;
    double tol;
    double cos_facing;
};

struct DigitScore {
    int count = -1;     // -1: penetrates the sphere
    double fit = std::numeric_limits<double>::infinity();
    bool better_than(const DigitScore& o) const { return count > o.count || (count == o.count && fit < o.fit - 1e-12); }
};

inline bool pad_touches(const PadPose& p, const SphereScene& s) {
    const Vec3 to_center = s.center - p.center;
    const double gap = to_center.norm() - s.radius;
    return std::abs(gap) <= s.tol && p.normal.dot(to_center.normalized()) >= s.cos_facing;
}

inline DigitScore score_digit(const HandModel& model, const std::vector<Transform>& frames, int digit, const SphereScene& s) {
    DigitScore out;
    auto gap = [&](const Vec3& p) { return (p - s.center).norm() - s.radius; };
    const auto& info = model.digit(digit);
    for (int n : info.own_nodes)
        if (gap(frames[static_cast<std::size_t>(n + 1)].translation()) < -s.tol) return out;
    if (gap(frames[static_cast<std::size_t>(info.nodes.back() + 1)] * info.fingertip) < -s.tol) return out;
    out.count = 0;
    out.fit = 0.0;
    for (int pi : info.patches) {
        const auto& p = model.patches()[static_cast<std::size_t>(pi)];
        const auto pose = patch_pose(frames, p);
        const PadPose pad{pose.center, pose.normal.normalized(), p.frame, p.digit, ""};
        const double g = gap(pad.center);
        if (g < -s.tol) {
            out.count = -1;
            return out;
        }
        if (pad_touches(pad, s)) ++out.count;
        out.fit += std::min(g * g, 100.0);
    }
    return out;
}

inline double normal_force_cap(const HandModel& model, const TransmissionMap* map, const std::vector<Transform>& frames,
                               const JointAngles& full, const PadPose& pad, const Vec3& point, double stall_torque) {
    if (pad.frame == kPalmFrame || pad.digit < 0) return kInfiniteForce;
    int node = pad.frame - 1;
    const auto& nodes = model.nodes();
    if (nodes[static_cast<std::size_t>(node)].driver >= 0) node = nodes[static_cast<std::size_t>(node)].driver;
    const auto& n = nodes[static_cast<std::size_t>(node)];
    double ratio = 1.0;
    if (map) {
        const auto& pairing = map->pairing_for_joint(n.spec.name);
        ratio = transmission_ratio(*map, pairing, n.spec.name, n.spec.limits.clamp(full[static_cast<std::size_t>(node)]));
    }
    const Transform& child = frames[static_cast<std::size_t>(node + 1)];
    const Vec3 axis = (child.linear() * n.spec.axis).normalized();
    const double lever = std::max(1.0, (point - child.translation()).cross(axis).norm());
    return stall_torque * 1e3 / ratio / lever;
}

// One row per motor: the torques its joints need for the contact forces,
// driven joints weighted by their coupling factor.
inline std::vector<TorqueLimit> motor_torque_limits(const HandModel& model, const TransmissionMap* map,
                                                    const std::vector<Transform>& frames, const JointVector& q,
                                                    const ContactSet& set, double stall_torque) {
    const auto full = apply_couplings(model, q);
    const auto& nodes = model.nodes();
    std::vector<int> row_of(nodes.size(), -1);
    std::vector<TorqueLimit> out;
    for (std::size_t i = 0; i < set.contacts.size(); ++i) {
        const auto& c = set.contacts[i];
        if (c.digit < 0 || c.patch.empty()) continue;
        const auto frame = model.frame_index(c.patch.substr(0, c.patch.find('#')));
        for (int node = frame - 1; node >= 0 && node != model.wrist_node();
             node = nodes[static_cast<std::size_t>(node)].parent_frame - 1) {
            const auto& n = nodes[static_cast<std::size_t>(node)];
            const int motor = n.driver >= 0 ? n.driver : node;
            const double factor = n.driver >= 0 ? n.factor : 1.0;
            auto& row = row_of[static_cast<std::size_t>(motor)];
            if (row < 0) {
                const auto& m = nodes[static_cast<std::size_t>(motor)];
                double ratio = 1.0;
                if (map)
                    ratio = transmission_ratio(*map, map->pairing_for_joint(m.spec.name), m.spec.name,
                                               m.spec.limits.clamp(full[static_cast<std::size_t>(motor)]));
                // the spring-loaded antagonist spool works against flexion
                double spring = 0.0;
                if (map) {
                    const auto& sp = map->spec().spring;
                    const auto dq = spool_compensation(*map, map->pairing_for_joint(m.spec.name), model.neutral_vector(), q);
                    spring = 1e-3 * (sp.pretension + sp.rate * std::abs(dq.spring_deflection));
                }
                row = static_cast<int>(out.size());
                out.push_back({m.spec.name, std::max(1e-3 * stall_torque, stall_torque - spring) / ratio, stall_torque / ratio, {}});
            }
            const Transform& child = frames[static_cast<std::size_t>(node + 1)];
            const Vec3 axis = (child.linear() * n.spec.axis).normalized();
            const Vec3 gain = factor * 1e-3 * axis.cross(c.position - child.translation());
            auto& gains = out[static_cast<std::size_t>(row)].gains;
            if (!gains.empty() && gains.back().first == static_cast<int>(i))
                gains.back().second += gain;
            else
                gains.push_back({static_cast<int>(i), gain});
        }
    }
    return out;
}

/// Smallest force magnitude (N, gravity off) over 26 fixed directions that
/// the contacts cannot hold.
inline double worst_case_strength(const ContactSet& set) {
    ResistanceOptions o;
    o.gravity = false;
    o.max_scale = 1e4;
    double worst = o.max_scale;
    for (int x = -1; x <= 1; ++x)
        for (int y = -1; y <= 1; ++y)
            for (int z = -1; z <= 1; ++z) {
                if (!x && !y && !z) continue;
                worst = std::min(worst, disturbance_margin(set, Vec3(x, y, z).normalized(), o).scale);
            }
    return worst;
}

}  // namespace detail

/// Palm-up sphere grasp: the sphere rests on the main palm pad and every digit
/// is posed to bring as many pads as possible onto its surface.
inline SphereGrasp synthesize_sphere_grasp(const HandModelPtr& model_ptr, double diameter, bool use_combined_abd,
                                           double palm_tilt = 0.15, const SphereGraspOptions& opt = {}) {
    const auto& model = *model_ptr;
    if (!(diameter > 0) || !std::isfinite(diameter)) throw PreconditionError("sphere diameter must be > 0");
    if (model.description().palm_patches.empty()) throw EmptyGraspError("model has no palm pad to rest the sphere on");
    const auto& palm = model.description().palm_patches.front();
    const auto frames0 = frame_transforms(model, apply_couplings(model, model.neutral_vector()));
    const Transform palm_pad = frames0[static_cast<std::size_t>(model.frame_index(palm.frame))];
    const Vec3 pad_normal = (palm_pad.linear() * palm.normal).normalized();
    detail::SphereScene scene{palm_pad * palm.center + 0.5 * diameter * pad_normal, 0.5 * diameter, opt.contact_tolerance,
                              std::cos(opt.max_facing_angle)};

    JointVector q = model.neutral_vector();
    const auto branch = model.branch_dof();

    auto best_digit = [&](int d, JointVector& pose) {
        const auto box = detail::dof_box(model, detail::digit_dofs(model, d));
        const auto n = box.dofs.size();
        std::vector<Eigen::VectorXd> cands;
        int total = 1;
        for (std::size_t i = 0; i < n; ++i) total *= opt.lattice;
        detail::DigitScore best;
        Eigen::VectorXd best_x = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(n));
        for (std::size_t i = 0; i < n; ++i) best_x[static_cast<Eigen::Index>(i)] = pose[box.dofs[i]];
        auto score = [&](const Eigen::VectorXd& x) {
            JointVector t = pose;
            detail::apply(t, box, x);
            return detail::score_digit(model, frame_transforms(model, apply_couplings(model, t)), d, scene);
        };
        best = score(best_x);
        std::vector<std::pair<detail::DigitScore, Eigen::VectorXd>> ranked;
        Eigen::VectorXd x(static_cast<Eigen::Index>(n));
        for (int c = 0; c < total; ++c) {
            int r = c;
            for (std::size_t i = 0; i < n; ++i) {
                const auto ii = static_cast<Eigen::Index>(i);
                x[ii] = box.lo[ii] + (box.hi[ii] - box.lo[ii]) * (r % opt.lattice) / (opt.lattice - 1);
                r /= opt.lattice;
            }
            const auto s = score(x);
            if (s.count >= 0) ranked.push_back({s, x});
        }
        std::stable_sort(ranked.begin(), ranked.end(), [](const auto& a, const auto& b) { return a.first.better_than(b.first); });
        if (ranked.size() > 6) ranked.resize(6);
        NelderMeadOptions nm;
        nm.max_iterations = 600;
        nm.f_tol = 1e-8;
        nm.x_tol = 1e-6;
        nm.initial_step = 0.5 / opt.lattice;
        auto surrogate = [&](const Eigen::VectorXd& v) {
            const auto s = score(v);
            if (s.count < 0) return 1e9;
            return s.fit - 1e3 * s.count;
        };
        for (auto& [s, x0] : ranked) {
            if (s.better_than(best)) {
                best = s;
                best_x = x0;
            }
            const auto r = nelder_mead(surrogate, x0, box.lo, box.hi, nm);
            const auto s2 = score(r.x);
            if (s2.better_than(best)) {
                best = s2;
                best_x = r.x;
            }
        }
        detail::apply(pose, box, best_x);
        return best;
    };

    int digit_contacts = 0;
    for (int d = 0; d < kDigitCount; ++d) {
        if (detail::uses_branch(model, d)) continue;
        digit_contacts += std::max(0, best_digit(d, q).count);
    }
    // digits on the branch are posed for each candidate branch angle
    std::vector<double> branch_values{model.neutral(branch)};
    if (use_combined_abd) {
        const auto& lim = model.limits(branch);
        for (int i = 0; i < opt.branch_steps; ++i) branch_values.push_back(lim.lo + lim.width() * i / (opt.branch_steps - 1));
    }
    std::optional<TransmissionMap> map;
    if (model.transmission()) map.emplace(model_ptr);
    double torque = opt.stall_torque;
    if (model.transmission() && opt.current_limited) {
        const auto& a = model.transmission()->actuator;
        torque = a.stall_torque * std::min(1.0, 1e-3 * a.current_limit / opt.stall_current);
    }
    auto contacts_at = [&](const JointVector& pose) {
        const auto full = apply_couplings(model, pose);
        const auto frames = frame_transforms(model, full);
        ContactSet set;
        set.object.kind = ObjectKind::sphere;
        set.object.size = diameter;
        set.object.pose = Transform::Identity();
        set.object.pose.translation() = scene.center;
        set.up = Vec3(0.0, -std::sin(palm_tilt), std::cos(palm_tilt));
        for (const auto& pad : detail::pad_poses(model, frames)) {
            if (!detail::pad_touches(pad, scene)) continue;
            const Vec3 dir = (scene.center - pad.center).normalized();
            const Vec3 point = scene.center - scene.radius * dir;
            const double cap = detail::normal_force_cap(model, map ? &*map : nullptr, frames, full, pad, point, torque);
            set.contacts.push_back({point, dir, opt.mu, cap, pad.id, pad.digit});
        }
        if (opt.joint_torque_limits && !set.contacts.empty())
            set.torque_limits = detail::motor_torque_limits(model, map ? &*map : nullptr, frames, pose, set, torque);
        return set;
    };

    // most contacts first, then the strongest worst-case hold
    int best_count = -1;
    double best_fit = std::numeric_limits<double>::infinity();
    double best_strength = -1.0;
    JointVector best_q = q;
    for (double b : branch_values) {
        JointVector t = q;
        t[branch] = b;
        int count = 0;
        double fit = 0.0;
        for (int d = 0; d < kDigitCount; ++d) {
            if (!detail::uses_branch(model, d)) continue;
            const auto s = best_digit(d, t);
            count += std::max(0, s.count);
            fit += s.fit;
        }
        if (count < best_count) continue;
        const auto set = contacts_at(t);
        const double strength = set.contacts.empty() ? 0.0 : detail::worst_case_strength(set);
        if (count > best_count || strength > best_strength + 1e-9 ||
            (std::abs(strength - best_strength) <= 1e-9 && fit < best_fit - 1e-9)) {
            best_count = count;
            best_fit = fit;
            best_strength = strength;
            best_q = t;
        }
    }
    q = best_q;
    digit_contacts += std::max(0, best_count);

    SphereGrasp out;
    out.q = q;
    out.digit_contacts = digit_contacts;
    out.contacts = contacts_at(q);
    auto& set = out.contacts;
    if (set.contacts.empty()) throw EmptyGraspError("no pad touches a " + std::to_string(diameter) + " mm sphere");

    // the region opposite the thumb, in the palm plane
    Vec3 thumb_side = Vec3::UnitX();
    Vec3 sum = Vec3::Zero();
    int thumb = 0;
    for (const auto& c : set.contacts)
        if (c.digit == 0) {
            sum += c.position - scene.center;
            ++thumb;
        }
    if (thumb > 0) {
        const Vec3 planar(sum.x(), sum.y(), 0.0);
        if (planar.norm() > 1e-9) thumb_side = planar.normalized();
    }
    bool covered = false;
    for (const auto& c : set.contacts)
        if (c.digit > 0 && (c.position - scene.center).dot(-thumb_side) >= 0.5 * scene.radius) covered = true;
    out.coverage_gap = !covered;
    return out;
}

// -- disturbance protocol -------------------------------------------------------

struct DisturbanceProtocolConfig {
    double force_lo = 0.0;             // N
    double force_hi = 5.0;             // N
    double resample_interval = 1.0;    // s
    int episode_steps = 600;
    double step_dt = 1.0 / 60.0;       // s per step
    double hold_reward = 0.016;
    double drop_reward = -1.0;
    std::vector<double> sphere_diameters{70, 80, 90, 100};
    std::uint64_t seed = 0;
    int episodes = 10;                 // seeds seed .. seed + episodes - 1
    double palm_tilt = 0.15;
    ResistanceOptions resistance;
    SphereGraspOptions grasp;
    unsigned workers = 0;
};

inline void validate_protocol(const DisturbanceProtocolConfig& c) {
    if (!(c.force_lo >= 0 && c.force_lo <= c.force_hi && std::isfinite(c.force_hi)))
        throw ValidationError("force range must satisfy 0 <= lo <= hi");
    if (c.episode_steps <= 0) throw ValidationError("episode_steps must be > 0");
    if (!(c.resample_interval > 0) || !(c.step_dt > 0)) throw ValidationError("intervals must be > 0");
    if (c.episodes <= 0) throw ValidationError("episodes must be > 0");
    for (double d : c.sphere_diameters)
        if (!(d > 0)) throw ValidationError("sphere diameters must be > 0");
}

struct ForceDraw {
    Vec3 force = Vec3::Zero();  // N
    bool resisted = false;
};

struct EpisodeRecord {
    std::uint64_t seed = 0;
    double diameter = 0.0;
    bool combined_abd = false;
    std::vector<ForceDraw> draws;     // one per interval, up to the first failure
    bool success = false;
    int steps_held = 0;
    double score = 0.0;
};

struct DiameterSummary {
    double diameter = 0.0;
    int contacts = 0;
    bool coverage_gap = false;
    double success_rate = 0.0;
    double mean_score = 0.0;
};

struct ProtocolResult {
    DisturbanceProtocolConfig config;
    bool combined_abd = false;
    std::vector<DiameterSummary> summary;
    std::vector<EpisodeRecord> episodes;
};

/// Uniform direction and magnitude in [lo, hi], from the episode's stream.
inline Vec3 draw_force(SplitMix64& rng, double lo, double hi) {
    Vec3 d;
    do {
        d = Vec3(rng.uniform(-1, 1), rng.uniform(-1, 1), rng.uniform(-1, 1));
    } while (d.squaredNorm() > 1.0 || d.squaredNorm() < 1e-12);
    return rng.uniform(lo, hi) * d.normalized();
}

inline EpisodeRecord run_episode(const ContactSet& grasp, const DisturbanceProtocolConfig& cfg, std::uint64_t seed) {
    EpisodeRecord e;
    e.seed = seed;
    const int per_interval = std::max(1, static_cast<int>(std::lround(cfg.resample_interval / cfg.step_dt)));
    const int intervals = (cfg.episode_steps + per_interval - 1) / per_interval;
    SplitMix64 rng(seed, 0);
    e.success = true;
    for (int k = 0; k < intervals; ++k) {
        ForceDraw draw;
        draw.force = draw_force(rng, cfg.force_lo, cfg.force_hi);
        draw.resisted = disturbance_resistance(grasp, draw.force, cfg.resistance);
        e.draws.push_back(draw);
        if (!draw.resisted) {
            e.success = false;
            e.steps_held = k * per_interval;
            break;
        }
    }
    if (e.success) e.steps_held = cfg.episode_steps;
    e.score = cfg.hold_reward * e.steps_held + (e.success ? 0.0 : cfg.drop_reward);
    return e;
}

inline std::vector<SphereGrasp> protocol_grasps(const HandModelPtr& model, const DisturbanceProtocolConfig& cfg,
                                                bool use_combined_abd) {
    validate_protocol(cfg);
    std::vector<SphereGrasp> grasps(cfg.sphere_diameters.size());
    parallel_chunks(grasps.size(), cfg.workers, [&](unsigned, std::size_t b, std::size_t e) {
        for (std::size_t i = b; i < e; ++i)
            grasps[i] = synthesize_sphere_grasp(model, cfg.sphere_diameters[i], use_combined_abd, cfg.palm_tilt, cfg.grasp);
    });
    return grasps;
}

/// Episodes against grasps already synthesised for cfg.sphere_diameters.
inline ProtocolResult run_disturbance_protocol(const std::vector<SphereGrasp>& grasps, const DisturbanceProtocolConfig& cfg,
                                               bool use_combined_abd) {
    validate_protocol(cfg);
    if (grasps.size() != cfg.sphere_diameters.size()) throw ConfigurationError("one grasp per sphere diameter is required");
    ProtocolResult out;
    out.config = cfg;
    out.combined_abd = use_combined_abd;
    const auto nd = cfg.sphere_diameters.size();
    const auto ne = static_cast<std::size_t>(cfg.episodes);
    out.episodes.resize(nd * ne);
    parallel_chunks(nd * ne, cfg.workers, [&](unsigned, std::size_t b, std::size_t e) {
        for (std::size_t i = b; i < e; ++i) {
            const std::size_t di = i / ne, ei = i % ne;
            auto rec = run_episode(grasps[di].contacts, cfg, cfg.seed + ei);
            rec.diameter = cfg.sphere_diameters[di];
            rec.combined_abd = use_combined_abd;
            out.episodes[i] = std::move(rec);
        }
    });
    for (std::size_t di = 0; di < nd; ++di) {
        DiameterSummary s{cfg.sphere_diameters[di], static_cast<int>(grasps[di].contacts.contacts.size()), grasps[di].coverage_gap,
                          0.0, 0.0};
        for (std::size_t ei = 0; ei < ne; ++ei) {
            const auto& rec = out.episodes[di * ne + ei];
            s.success_rate += rec.success ? 1.0 : 0.0;
            s.mean_score += rec.score;
        }
        s.success_rate /= static_cast<double>(ne);
        s.mean_score /= static_cast<double>(ne);
        out.summary.push_back(s);
    }
    return out;
}

inline ProtocolResult run_disturbance_protocol(const HandModelPtr& model, const DisturbanceProtocolConfig& cfg,
                                               bool use_combined_abd) {
    return run_disturbance_protocol(protocol_grasps(model, cfg, use_combined_abd), cfg, use_combined_abd);
}

/// Success rates over force bins [k - 1, k] N for k = 1..bins, both
/// abduction settings. rows[flag][bin][diameter].
struct ForceBinStudy {
    std::vector<double> diameters;
    std::vector<std::pair<double, double>> bins;
    std::array<std::vector<std::vector<double>>, 2> success;  // [0] off, [1] on
    std::vector<ProtocolResult> runs;
};

inline ForceBinStudy run_force_bin_study(const HandModelPtr& model, DisturbanceProtocolConfig cfg, int bins = 5,
                                         double bin_width = 1.0) {
    ForceBinStudy study;
    study.diameters = cfg.sphere_diameters;
    for (int k = 1; k <= bins; ++k) study.bins.push_back({(k - 1) * bin_width, k * bin_width});
    for (int flag = 0; flag < 2; ++flag) {
        const auto grasps = protocol_grasps(model, cfg, flag == 1);
        for (const auto& [lo, hi] : study.bins) {
            cfg.force_lo = lo;
            cfg.force_hi = hi;
            auto r = run_disturbance_protocol(grasps, cfg, flag == 1);
            std::vector<double> row;
            for (const auto& s : r.summary) row.push_back(s.success_rate);
            study.success[static_cast<std::size_t>(flag)].push_back(row);
            study.runs.push_back(std::move(r));
        }
    }
    return study;
}

// -- reports --------------------------------------------------------------------

inline nlohmann::json protocol_json(const ProtocolResult& r) {
    using nlohmann::json;
    json rows = json::array();
    for (const auto& e : r.episodes) {
        json draws = json::array();
        for (const auto& d : e.draws) draws.push_back({d.force.x(), d.force.y(), d.force.z()});
        rows.push_back({{"seed", e.seed},
                        {"diameter_mm", e.diameter},
                        {"combined_abd", e.combined_abd},
                        {"force_draws_n", draws},
                        {"success", e.success},
                        {"steps_held", e.steps_held},
                        {"score", e.score}});
    }
    json summary = json::array();
    for (const auto& s : r.summary)
        summary.push_back({{"diameter_mm", s.diameter},
                           {"contacts", s.contacts},
                           {"coverage_gap", s.coverage_gap},
                           {"success_rate", s.success_rate},
                           {"mean_score", s.mean_score}});
    return {{"schema", kDisturbanceSchema},
            {"force_range_n", {r.config.force_lo, r.config.force_hi}},
            {"episode_steps", r.config.episode_steps},
            {"resample_interval_s", r.config.resample_interval},
            {"combined_abd", r.combined_abd},
            {"summary", summary},
            {"episodes", rows}};
}

inline std::string format_force_bin_table(const ForceBinStudy& s) {
    std::ostringstream os;
    os << std::fixed << std::setprecision(2);
    os << "force bin (N)  abd ";
    for (double d : s.diameters) os << "  " << std::setw(6) << d << "mm";
    os << '\n';
    for (std::size_t b = 0; b < s.bins.size(); ++b)
        for (int flag = 1; flag >= 0; --flag) {
            os << "[" << s.bins[b].first << ", " << s.bins[b].second << "]   " << (flag ? "on " : "off");
            for (double v : s.success[static_cast<std::size_t>(flag)][b]) os << "  " << std::setw(8) << v;
            os << '\n';
        }
    return os.str();
}

}  // namespace sabd
