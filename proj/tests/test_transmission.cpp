#include <gtest/gtest.h>

#include <random>

#include "oracles/naive_fk.hpp"
#include "sabd/transmission.hpp"
#include "support.hpp"

using namespace sabd;
using testing_support::default_document;
using testing_support::default_model;
using testing_support::random_q;

namespace {

const TransmissionMap& default_map() {
    static const TransmissionMap map(default_model());
    return map;
}

std::map<std::string, double> named_full(const HandModel& m, const JointVector& q) {
    const auto full = apply_couplings(m, q);
    std::map<std::string, double> out;
    for (std::size_t i = 0; i < m.nodes().size(); ++i) out[m.nodes()[i].spec.name] = full[i];
    return out;
}

double oracle_length(const HandModel& m, const std::string& route, std::map<std::string, double> angles) {
    return oracle::polyline_length(m.description(), default_map().route(route), angles);
}

// d(length)/d(joint) by central difference on the oracle polyline, other joints at zero
double oracle_rate(const HandModel& m, const std::string& route, const std::string& joint, double theta) {
    auto a = oracle::zero_angles(m.description());
    const double h = 1e-5;
    a[joint] = theta + h;
    const double up = oracle_length(m, route, a);
    a[joint] = theta - h;
    return (up - oracle_length(m, route, a)) / (2 * h);
}

std::string validation_message(nlohmann::json doc) {
    try {
        load_hand_description(doc.dump());
    } catch (const ValidationError& e) {
        return e.what();
    }
    return "ok";
}

nlohmann::json& route_of(nlohmann::json& doc, const std::string& name) {
    for (auto& r : doc["transmission"]["routes"])
        if (r["name"] == name) return r;
    throw std::runtime_error("no route " + name);
}

}  // namespace

// -- lengths --------------------------------------------------------------------

TEST(TendonLength, RestPoseGivesRecordedRestLength) {
    const auto& m = *default_model();
    for (const auto& r : m.transmission()->routes) {
        ASSERT_GE(r.rest_length, 0.0) << r.name;
        EXPECT_NEAR(tendon_length(m, r, m.zero_vector()), r.rest_length, 1e-6) << r.name;
    }
}

TEST(TendonLength, FlexingShortensFlexorAndLengthensExtensor) {
    const auto& m = *default_model();
    const auto& map = default_map();
    for (const std::string j : {"d2_pip", "d3_pip", "d4_pip", "d5_pip", "d4_mcp_flex", "d1_ip"}) {
        const auto& p = map.pairing_for_joint(j);
        auto q = m.zero_vector();
        double last_flex = tendon_length(m, map.route(p.agonist), q);
        double last_ext = tendon_length(m, map.route(p.antagonist), q);
        for (int i = 1; i <= 10; ++i) {
            q.set(j, m.node(j).spec.limits.hi * i / 10.0);
            const double flex = tendon_length(m, map.route(p.agonist), q);
            const double ext = tendon_length(m, map.route(p.antagonist), q);
            EXPECT_LT(flex, last_flex) << j;
            EXPECT_GT(ext, last_ext) << j;
            last_flex = flex;
            last_ext = ext;
        }
    }
}

TEST(TendonLength, MatchesHandComputedPolyline) {
    const auto& m = *default_model();
    std::mt19937_64 rng(17);
    for (int i = 0; i < 200; ++i) {
        const auto q = random_q(m, rng);
        const auto angles = named_full(m, q);
        for (const auto& r : m.transmission()->routes)
            ASSERT_NEAR(tendon_length(m, r, q), oracle::polyline_length(m.description(), r, angles), 1e-9) << r.name;
    }
}

TEST(TendonLength, PipFlexorByHand) {
    // Two via points 10 mm before and 4 mm past the PIP, 6 mm palmar.
    // At PIP = t the distal point sits on the rolled child frame.
    const auto& m = *default_model();
    const double t = 0.9, r = 3.0;
    const Vec3 a(0.0, 35.0, 6.0);
    // child origin: two half rotations about axes 2r apart along y
    const Vec3 first_axis(0.0, 45.0 - 2 * r, 0.0);
    auto rot = [](double ang, const Vec3& v) {
        return Vec3(v.x(), std::cos(ang) * v.y() - std::sin(ang) * v.z(), std::sin(ang) * v.y() + std::cos(ang) * v.z());
    };
    const Vec3 second_axis = first_axis + rot(t / 2, Vec3(0.0, 2 * r, 0.0));
    const Vec3 b = second_axis + rot(t, Vec3(0.0, 4.0, 6.0));
    auto q = m.zero_vector();
    q.set("d2_pip", t);
    EXPECT_NEAR(tendon_length(m, default_map().route("d2_pip_flexor"), q), (b - a).norm(), 1e-9);
}

TEST(TendonLength, UnknownFrameIsLookupError) {
    const auto& m = *default_model();
    TendonRoute r;
    r.name = "bad";
    r.via_points = {{"palm", Vec3::Zero()}, {"d9_pip", Vec3::Zero()}};
    EXPECT_THROW(tendon_length(m, r, m.zero_vector()), LookupError);
}

// -- transmission ratio ---------------------------------------------------------

TEST(TransmissionRatio, PipGoldenValueAtZero) {
    const auto& m = *default_model();
    const auto& map = default_map();
    const double r0 = transmission_ratio(map, map.pairing("m_d2_pip"), "d2_pip", 0.0);
    const double oracle = map.spec().actuator.spool_radius_agonist / std::abs(oracle_rate(m, "d2_pip_flexor", "d2_pip", 0.0));
    EXPECT_NEAR(r0, oracle, 1e-6);
    EXPECT_NEAR(r0, 1.0, 1e-6);  // 6 mm spool over a 6 mm hinge offset
}

TEST(TransmissionRatio, PositiveAndSmoothOverEveryRom) {
    const auto& m = *default_model();
    const auto& map = default_map();
    for (const auto& p : map.spec().motors)
        for (const auto& j : p.joints) {
            const auto& lim = m.node(j).spec.limits;
            double prev = transmission_ratio(map, p, j, lim.lo);
            for (double t = lim.lo + 0.01; t <= lim.hi; t += 0.01) {
                const double r = transmission_ratio(map, p, j, t);
                ASSERT_GT(r, 0.0) << j;
                ASSERT_LT(std::abs(r - prev) / prev, 0.05) << j << " at " << t;
                prev = r;
            }
        }
}

TEST(TransmissionRatio, MinimumWhereMomentArmIsMaximal) {
    const auto& m = *default_model();
    const auto& map = default_map();
    const auto& p = map.pairing("m_d1_cmc");
    const auto& lim = m.node("d1_cmc").spec.limits;
    double best_arm = 0.0, at_best = 0.0, min_ratio = 1e9;
    for (int i = 0; i <= 140; ++i) {
        const double t = lim.lo + lim.width() * i / 140;
        const double arm = std::abs(oracle_rate(m, p.agonist, "d1_cmc", t));
        if (arm > best_arm) {
            best_arm = arm;
            at_best = t;
        }
        min_ratio = std::min(min_ratio, transmission_ratio(map, p, "d1_cmc", t));
    }
    EXPECT_NEAR(transmission_ratio(map, p, "d1_cmc", at_best), min_ratio, 1e-9);
}

TEST(TransmissionRatio, FinerStepAgreesWithinTenthPercent) {
    const auto& m = *default_model();
    const auto& map = default_map();
    for (const auto& p : map.spec().motors) {
        if (p.kind == MotorKind::linkage) continue;
        for (std::size_t axis = 0; axis < p.joints.size(); ++axis) {
            const detail::AxisMap f(map, p, static_cast<int>(axis), m.zero_angles());
            const auto& lim = f.limits();
            for (int i = 1; i < 10; ++i) {
                const double t = lim.lo + lim.width() * i / 10;
                const double coarse = f.moment_arm(t, 1e-5), fine = f.moment_arm(t, 1e-6);
                ASSERT_LT(std::abs(coarse - fine) / coarse, 1e-3) << p.joints[axis] << " at " << t;
            }
        }
    }
}

TEST(TransmissionRatio, ErrorsOutsideLimitsAndOnZeroArm) {
    const auto& map = default_map();
    EXPECT_THROW(transmission_ratio(map, map.pairing("m_d2_pip"), "d2_pip", 2.5), RangeError);
    EXPECT_THROW(transmission_ratio(map, map.pairing("m_d2_pip"), "d3_pip", 0.0), LookupError);

    auto doc = default_document();
    // both via points on the hinge axis: no moment arm
    auto& r = route_of(doc, "d2_pip_flexor");
    r["via_points"][0]["point"] = {0.0, 35.0, 0.0};
    r["via_points"][1]["point"] = {0.0, 4.0, 0.0};
    r.erase("rest_length");
    auto& e = route_of(doc, "d2_pip_extensor");
    e["via_points"][0]["point"] = {0.0, 35.0, 0.0};
    e["via_points"][1]["point"] = {0.0, 4.0, 0.0};
    e.erase("rest_length");
    const auto m2 = [&] {
        auto desc = parse_hand_description(doc.dump());
        return HandModel::build(desc);
    }();
    const TransmissionMap map2(m2);
    try {
        transmission_ratio(map2, map2.pairing("m_d2_pip"), "d2_pip", 0.0);
        FAIL() << "expected a singularity";
    } catch (const SingularityError& err) {
        EXPECT_NE(std::string(err.what()).find("d2_pip"), std::string::npos);
    }
}

// -- motor/joint maps -----------------------------------------------------------

TEST(MotorMap, RestPoseIsZeroMotors) {
    const auto& map = default_map();
    const auto m = joint_to_motor(map, default_model()->zero_vector());
    for (std::size_t i = 0; i < m.size(); ++i) EXPECT_NEAR(m[i], 0.0, 1e-12) << map.motor_names()[i];
}

TEST(MotorMap, RoundTripOnRandomPostures) {
    const auto& model = *default_model();
    const auto& map = default_map();
    std::mt19937_64 rng(2024);
    double worst = 0.0;
    for (int i = 0; i < 1000; ++i) {
        const auto q = random_q(model, rng);
        const auto back = motor_to_joint(map, joint_to_motor(map, q));
        EXPECT_FALSE(back.clamped);
        for (std::size_t k = 0; k < q.size(); ++k) worst = std::max(worst, std::abs(back.q[k] - q[k]));
    }
    EXPECT_LT(worst, 1e-6);
}

TEST(MotorMap, EqualCrosswiseMotorsGivePureFlexion) {
    const auto& map = default_map();
    auto m = map.zero_motors();
    m.set("m_d2_mcp_1", 0.6);
    m.set("m_d2_mcp_2", 0.6);
    const auto r = motor_to_joint(map, m);
    EXPECT_GT(r.q.at("d2_mcp_flex"), 0.3);
    EXPECT_NEAR(r.q.at("d2_mcp_abd"), 0.0, 1e-9);
}

TEST(MotorMap, OppositeCrosswiseMotorsGivePureAbduction) {
    const auto& map = default_map();
    auto m = map.zero_motors();
    m.set("m_d3_mcp_1", 0.2);
    m.set("m_d3_mcp_2", -0.2);
    const auto r = motor_to_joint(map, m);
    EXPECT_NEAR(r.q.at("d3_mcp_flex"), 0.0, 1e-9);
    EXPECT_GT(std::abs(r.q.at("d3_mcp_abd")), 0.1);
}

TEST(MotorMap, CrosswiseDecompositionIsUnique) {
    const auto& model = *default_model();
    const auto& map = default_map();
    auto q = model.zero_vector();
    q.set("d2_mcp_flex", 0.7);
    q.set("d2_mcp_abd", -0.2);
    const auto m = joint_to_motor(map, q);
    const double s = 0.5 * (m.at("m_d2_mcp_1") + m.at("m_d2_mcp_2"));
    const double d = 0.5 * (m.at("m_d2_mcp_1") - m.at("m_d2_mcp_2"));
    auto flex_only = model.zero_vector();
    flex_only.set("d2_mcp_flex", 0.7);
    auto abd_only = model.zero_vector();
    abd_only.set("d2_mcp_abd", -0.2);
    const auto mf = joint_to_motor(map, flex_only), ma = joint_to_motor(map, abd_only);
    EXPECT_NEAR(s, mf.at("m_d2_mcp_1"), 1e-12);
    EXPECT_NEAR(d, ma.at("m_d2_mcp_1"), 1e-12);
    EXPECT_NEAR(mf.at("m_d2_mcp_1"), mf.at("m_d2_mcp_2"), 1e-12);
    EXPECT_NEAR(ma.at("m_d2_mcp_1"), -ma.at("m_d2_mcp_2"), 1e-12);
}

TEST(MotorMap, MatchesRk4IntegrationOfTheRatio) {
    const auto& model = *default_model();
    const auto& map = default_map();
    const double r = map.spec().actuator.spool_radius_agonist;
    // PIP tendon pair: dtheta/dm = r / (-dL/dtheta)
    auto f = [&](double theta) { return r / -oracle_rate(model, "d2_pip_flexor", "d2_pip", theta); };
    const double target = 1.2, h = 1e-3;
    double theta = 0.0;
    for (int i = 0; i < 1200; ++i) {
        const double k1 = f(theta), k2 = f(theta + 0.5 * h * k1), k3 = f(theta + 0.5 * h * k2), k4 = f(theta + h * k3);
        theta += h / 6.0 * (k1 + 2 * k2 + 2 * k3 + k4);
    }
    auto m = map.zero_motors();
    m.set("m_d2_pip", target);
    EXPECT_NEAR(motor_to_joint(map, m).q.at("d2_pip"), theta, 1e-6);

    // crosswise sum coordinate s = (dLa + dLb) / 2r
    auto g = [&](double t) {
        const double rate = oracle_rate(model, "d3_mcp_flex_abduct", "d3_mcp_flex", t) +
                            oracle_rate(model, "d3_mcp_flex_adduct", "d3_mcp_flex", t);
        return 2 * r / -rate;
    };
    theta = 0.0;
    for (int i = 0; i < 500; ++i) {
        const double k1 = g(theta), k2 = g(theta + 0.5 * h * k1), k3 = g(theta + 0.5 * h * k2), k4 = g(theta + h * k3);
        theta += h / 6.0 * (k1 + 2 * k2 + 2 * k3 + k4);
    }
    auto mc = map.zero_motors();
    mc.set("m_d3_mcp_1", 0.5);
    mc.set("m_d3_mcp_2", 0.5);
    EXPECT_NEAR(motor_to_joint(map, mc).q.at("d3_mcp_flex"), theta, 1e-6);
}

TEST(MotorMap, OutOfRangeMotorClamps) {
    const auto& model = *default_model();
    const auto& map = default_map();
    auto m = map.zero_motors();
    m.set("m_d2_pip", 50.0);
    const auto r = motor_to_joint(map, m);
    EXPECT_TRUE(r.clamped);
    EXPECT_DOUBLE_EQ(r.q.at("d2_pip"), model.node("d2_pip").spec.limits.hi);
}

TEST(MotorMap, Errors) {
    const auto& model = *default_model();
    const auto& map = default_map();
    try {
        joint_to_motor(map, {{"d2_dip", 0.4}});
        FAIL() << "expected DrivenJointError";
    } catch (const DrivenJointError& e) {
        EXPECT_STREQ(e.what(), "d2_dip is driven, not independent");
    }
    auto q = model.zero_vector();
    q.set("d2_pip", 2.5);
    EXPECT_THROW(joint_to_motor(map, q), RangeError);
    EXPECT_THROW(map.zero_motors().at("m_missing"), LookupError);

    auto doc = default_document();
    doc["name"] = "other";
    const TransmissionMap other(load_hand_description(doc.dump()));
    EXPECT_THROW(motor_to_joint(map, other.zero_motors()), LookupError);
}

TEST(MotorMap, UpstreamBranchMotionIsSeenByDigitFour) {
    const auto& model = *default_model();
    const auto& map = default_map();
    auto q = model.zero_vector();
    q.set("abd45", 1.2);
    q.set("d4_mcp_flex", 0.8);
    const auto m = joint_to_motor(map, q);
    auto q_flat = model.zero_vector();
    q_flat.set("d4_mcp_flex", 0.8);
    EXPECT_GT(std::abs(m.at("m_d4_mcp_flex") - joint_to_motor(map, q_flat).at("m_d4_mcp_flex")), 1e-3);
    const auto back = motor_to_joint(map, m);
    EXPECT_NEAR(back.q.at("d4_mcp_flex"), 0.8, 1e-9);
    EXPECT_NEAR(back.q.at("abd45"), 1.2, 1e-9);
}

// -- spool compensation ---------------------------------------------------------

TEST(SpoolCompensation, NoMotionNoDeflection) {
    const auto& model = *default_model();
    const auto& map = default_map();
    std::mt19937_64 rng(5);
    const auto q = random_q(model, rng);
    for (const auto& p : map.spec().motors) {
        const auto c = spool_compensation(map, p, q, q);
        EXPECT_EQ(c.spring_deflection, 0.0);
        EXPECT_TRUE(c.within_range);
    }
}

TEST(SpoolCompensation, SymmetricInMagnitude) {
    const auto& model = *default_model();
    const auto& map = default_map();
    std::mt19937_64 rng(6);
    for (int i = 0; i < 20; ++i) {
        const auto a = random_q(model, rng), b = random_q(model, rng);
        for (const auto& p : map.spec().motors)
            EXPECT_NEAR(std::abs(spool_compensation(map, p, a, b).spring_deflection),
                        std::abs(spool_compensation(map, p, b, a).spring_deflection), 1e-9);
    }
}

TEST(SpoolCompensation, FullCombinedAbductionExceedsSpringRange) {
    const auto& model = *default_model();
    const auto& map = default_map();
    auto to = model.zero_vector();
    to.set("abd45", model.branch().limits.hi);
    for (const std::string motor : {"m_d4_mcp_flex", "m_d5_mcp_flex"}) {
        const auto c = spool_compensation(map, map.pairing(motor), model.zero_vector(), to);
        EXPECT_FALSE(c.within_range) << motor;
        EXPECT_GT(std::abs(c.spring_deflection), map.spec().spring.max_deflection) << motor;
    }
    // flexing a single rolling joint needs little compensation
    auto pip = model.zero_vector();
    pip.set("d2_pip", 1.0);
    EXPECT_TRUE(spool_compensation(map, map.pairing("m_d2_pip"), model.zero_vector(), pip).within_range);
}

// -- parasitic coupling ---------------------------------------------------------

TEST(ParasiticCoupling, DefaultDigitFiveFlexorIsPositive) {
    const auto& model = *default_model();
    const auto& map = default_map();
    const double c = parasitic_coupling(model, map.route("d5_mcp_flex_flexor"), "abd45", model.branch().limits);
    EXPECT_GT(c, 0.0);
    EXPECT_LT(c, 1.0);
}

TEST(ParasiticCoupling, GrowsWithOffsetFromBranchAxis) {
    const auto& model = *default_model();
    const auto& map = default_map();
    TendonRoute route = map.route("d5_mcp_flex_flexor");
    // the via point fixed to the branch link next to its axis
    std::size_t near = 0;
    for (std::size_t i = 0; i < route.via_points.size(); ++i)
        if (route.via_points[i].frame == "abd45") {
            near = i;
            break;
        }
    ASSERT_GT(near, 0u);
    const Vec3 dir = Vec3(route.via_points[near].point.x(), route.via_points[near].point.y(), 0.0).normalized();
    const double z = route.via_points[near].point.z();
    double prev = -1.0;
    for (double offset = 0.0; offset <= 4.0 + 1e-9; offset += 0.5) {
        route.via_points[near].point = offset * dir + Vec3(0, 0, z);
        const double c = parasitic_coupling(model, route, "abd45", model.branch().limits);
        if (offset == 0.0)
            EXPECT_NEAR(c, 0.0, 1e-9);
        else
            EXPECT_GT(c, prev) << offset;
        prev = c;
    }
}

TEST(ParasiticCoupling, RequiresACrossedJoint) {
    const auto& model = *default_model();
    EXPECT_THROW(parasitic_coupling(model, default_map().route("d2_pip_flexor"), "abd45", {0, 1}), PreconditionError);
}

// -- validation -----------------------------------------------------------------

TEST(TransmissionValidation, DefaultIsValid) { EXPECT_NO_THROW(validate_transmission(*default_model())); }

TEST(TransmissionValidation, RejectsBrokenTables) {
    {
        auto doc = default_document();
        doc["transmission"]["actuator"]["spool_radius_agonist"] = 0.0;
        EXPECT_NE(validation_message(doc).find("strictly positive"), std::string::npos);
    }
    {
        auto doc = default_document();
        auto& r = route_of(doc, "d2_pip_flexor");
        r["via_points"].erase(1);
        EXPECT_NE(validation_message(doc).find("fewer than 2"), std::string::npos);
    }
    {
        auto doc = default_document();
        route_of(doc, "d2_pip_flexor")["crossed_joints"][0]["joint"] = "d2_dip";
        EXPECT_NE(validation_message(doc), "ok");
    }
    {
        auto doc = default_document();
        route_of(doc, "d2_pip_flexor")["crossed_joints"][0]["sign"] = -1;
        EXPECT_NE(validation_message(doc).find("contradicts geometry"), std::string::npos);
    }
    {
        auto doc = default_document();
        route_of(doc, "d2_pip_flexor")["rest_length"] = 15.0;
        EXPECT_NE(validation_message(doc).find("rest_length"), std::string::npos);
    }
    {
        auto doc = default_document();
        auto& motors = doc["transmission"]["motors"];
        for (auto it = motors.begin(); it != motors.end(); ++it)
            if ((*it)["name"] == "m_d3_pip") {
                motors.erase(it);
                break;
            }
        EXPECT_NE(validation_message(doc).find("driven by no motor"), std::string::npos);
    }
    {
        auto doc = default_document();
        for (auto& p : doc["transmission"]["motors"])
            if (p["name"] == "m_d3_pip") p["agonist"] = "d2_pip_flexor";
        EXPECT_NE(validation_message(doc).find("does not declare"), std::string::npos);
    }
}
