#include <gtest/gtest.h>

#include <random>

#include "grasp_cases.hpp"
#include "sabd/lp.hpp"
#include "support.hpp"

using namespace sabd;
using testing_support::default_document;
using testing_support::default_model;

namespace {

using Wrench = Eigen::Matrix<double, 6, 1>;

LinearProgram program(std::initializer_list<std::initializer_list<double>> rows, std::initializer_list<double> b,
                      std::vector<Relation> rel, std::initializer_list<double> c) {
    LinearProgram lp;
    lp.A.resize(static_cast<Eigen::Index>(rows.size()), static_cast<Eigen::Index>(c.size()));
    Eigen::Index i = 0;
    for (const auto& r : rows) {
        Eigen::Index j = 0;
        for (double v : r) lp.A(i, j++) = v;
        ++i;
    }
    lp.b = Eigen::Map<const Eigen::VectorXd>(b.begin(), static_cast<Eigen::Index>(b.size()));
    lp.c = Eigen::Map<const Eigen::VectorXd>(c.begin(), static_cast<Eigen::Index>(c.size()));
    lp.rel = std::move(rel);
    return lp;
}

Contact contact_at(const Vec3& center, const Vec3& dir, double radius, double mu, double cap = kInfiniteForce) {
    Contact c;
    c.position = center + radius * dir.normalized();
    c.normal = -dir.normalized();
    c.mu = mu;
    c.max_normal_force = cap;
    return c;
}

ContactSet tetrahedral_grasp(double mu) {
    ContactSet s;
    s.object.size = 60.0;
    const Vec3 center = s.object.pose.translation();
    for (const Vec3& d : {Vec3(1, 1, 1), Vec3(1, -1, -1), Vec3(-1, 1, -1), Vec3(-1, -1, 1)})
        s.contacts.push_back(contact_at(center, d, 30.0, mu));
    return s;
}

std::vector<Vec3> sphere_directions(int n, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> g(0.0, 1.0);
    std::vector<Vec3> out;
    for (int i = 0; i < n; ++i) out.push_back(Vec3(g(rng), g(rng), g(rng)).normalized());
    return out;
}

const ParallelGrasp& parallel(bool combined) {
    static const ParallelGrasp on = [] {
        ParallelGraspOptions o;
        return max_parallel_grasp_distance(default_model(), 1, o);
    }();
    static const ParallelGrasp off = [] {
        ParallelGraspOptions o;
        o.use_combined_abd = false;
        return max_parallel_grasp_distance(default_model(), 1, o);
    }();
    return combined ? on : off;
}

DisturbanceProtocolConfig small_protocol() {
    DisturbanceProtocolConfig c;
    c.sphere_diameters = {70, 100};
    c.episodes = 4;
    return c;
}

}  // namespace

// -- linear programs -----------------------------------------------------------

TEST(LinearProgram, TwoVariableOptimum) {
    const auto r = solve_lp(program({{1, 2}, {3, 1}}, {4, 6}, {Relation::less_equal, Relation::less_equal}, {1, 1}));
    ASSERT_EQ(r.status, LpStatus::optimal);
    EXPECT_NEAR(r.x[0], 1.6, 1e-12);
    EXPECT_NEAR(r.x[1], 1.2, 1e-12);
    EXPECT_NEAR(r.value, 2.8, 1e-12);
}

TEST(LinearProgram, EqualityAndNegativeRhs) {
    auto r = solve_lp(program({{1, 1}, {1, 0}}, {3, 2}, {Relation::equal, Relation::less_equal}, {2, 1}));
    ASSERT_EQ(r.status, LpStatus::optimal);
    EXPECT_NEAR(r.value, 5.0, 1e-12);
    r = solve_lp(program({{-1}}, {-1}, {Relation::less_equal}, {-1}));
    ASSERT_EQ(r.status, LpStatus::optimal);
    EXPECT_NEAR(r.x[0], 1.0, 1e-12);
}

TEST(LinearProgram, InfeasibleAndUnbounded) {
    EXPECT_EQ(solve_lp(program({{1}, {1}}, {2, 1}, {Relation::greater_equal, Relation::less_equal}, {1})).status,
              LpStatus::infeasible);
    EXPECT_EQ(solve_lp(program({{1, -1}}, {1}, {Relation::less_equal}, {1, 0})).status, LpStatus::unbounded);
}

TEST(LinearProgram, DimensionMismatch) {
    auto lp = program({{1, 1}}, {1}, {Relation::less_equal}, {1, 1});
    lp.c.resize(3);
    EXPECT_THROW(solve_lp(lp), ConfigurationError);
}

// -- wrench feasibility --------------------------------------------------------

TEST(WrenchFeasibility, FrictionEdgesHaveUnitNormalComponent) {
    const Vec3 n = Vec3(0.3, -0.2, 0.9).normalized();
    const auto edges = friction_edges(n, 0.7, 8);
    ASSERT_EQ(edges.size(), 8u);
    for (const auto& e : edges) {
        EXPECT_NEAR(e.dot(n), 1.0, 1e-12);
        EXPECT_NEAR((e - n).norm(), 0.7, 1e-12);
    }
}

TEST(WrenchFeasibility, ZeroLoadIsResisted) {
    ContactSet s;
    s.contacts = {contact_at(Vec3::Zero(), Vec3::UnitX(), 30, 0.5), contact_at(Vec3::Zero(), -Vec3::UnitX(), 30, 0.5)};
    ResistanceOptions o;
    o.gravity = false;
    EXPECT_TRUE(disturbance_resistance(s, Vec3::Zero(), o));
}

TEST(WrenchFeasibility, FrictionlessContactCannotPull) {
    ContactSet s;
    s.contacts = {contact_at(Vec3::Zero(), -Vec3::UnitZ(), 30, 0.0)};
    ResistanceOptions o;
    o.gravity = false;
    const Vec3 n = s.contacts[0].normal;
    EXPECT_FALSE(disturbance_resistance(s, 2.0 * n, o));
    EXPECT_TRUE(disturbance_resistance(s, -2.0 * n, o));
    EXPECT_FALSE(disturbance_resistance(s, 2.0 * Vec3::UnitX(), o));
}

TEST(WrenchFeasibility, SymmetricGraspResistsEveryDirection) {
    const auto s = tetrahedral_grasp(0.8);
    for (const auto& d : sphere_directions(200, 3)) EXPECT_TRUE(disturbance_resistance(s, 5.0 * d)) << d.transpose();
}

TEST(WrenchFeasibility, SampledContactWrenchesAreFeasible) {
    const auto s = tetrahedral_grasp(0.8);
    std::vector<oracle::PointContact> pts;
    for (const auto& c : s.contacts) pts.push_back({c.position, c.normal, c.mu, 50.0});
    const oracle::WrenchSet ws(pts, s.object.pose.translation());
    std::mt19937_64 rng(11);
    for (int i = 0; i < 10000; ++i) {
        const Wrench w = ws.sample(rng);
        if (w.norm() < 1e-9) continue;
        ASSERT_TRUE(wrench_feasibility(s, w).resisted) << w.transpose();
    }
}

TEST(WrenchFeasibility, CapsBoundTheNormalForce) {
    ContactSet s;
    s.contacts = {contact_at(Vec3::Zero(), -Vec3::UnitZ(), 30, 0.0, 3.0)};
    ResistanceOptions o;
    o.gravity = false;
    EXPECT_NEAR(disturbance_margin(s, -Vec3::UnitZ(), o).scale, 3.0, 1e-9);
    EXPECT_FALSE(disturbance_resistance(s, -4.0 * Vec3::UnitZ(), o));
}

TEST(WrenchFeasibility, TorqueLimitsBoundSharedEffort) {
    ContactSet s;
    s.contacts = {contact_at(Vec3::Zero(), -Vec3::UnitZ(), 30, 0.0)};
    TorqueLimit t;
    t.joint = "j";
    t.positive = 0.2;
    t.gains = {{0, Vec3(0, 0, 0.1)}};
    s.torque_limits = {t};
    ResistanceOptions o;
    o.gravity = false;
    EXPECT_NEAR(disturbance_margin(s, -Vec3::UnitZ(), o).scale, 2.0, 1e-9);
    s.torque_limits[0].gains[0].second = Vec3(0, 0, -0.1);
    s.torque_limits[0].negative = 0.05;
    EXPECT_NEAR(disturbance_margin(s, -Vec3::UnitZ(), o).scale, 0.5, 1e-9);
}

TEST(WrenchFeasibility, GravityActsAgainstUp) {
    ContactSet s;
    s.contacts = {contact_at(Vec3::Zero(), -Vec3::UnitZ(), 30, 0.0, 2.0)};
    ResistanceOptions o;
    EXPECT_TRUE(disturbance_resistance(s, Vec3::Zero(), o));
    EXPECT_NEAR(disturbance_margin(s, -Vec3::UnitZ(), o).scale, 2.0 / (1.0 + o.mass * o.g), 1e-9);
    s.up = -Vec3::UnitZ();
    EXPECT_FALSE(disturbance_resistance(s, Vec3::Zero(), o));
}

TEST(WrenchFeasibility, ValidatesContactSets) {
    ContactSet s;
    EXPECT_THROW(disturbance_resistance(s, Vec3::Zero()), ValidationError);
    s.contacts = {contact_at(Vec3::Zero(), Vec3::UnitZ(), 30, 0.5)};
    s.contacts[0].normal *= 2.0;
    EXPECT_THROW(disturbance_resistance(s, Vec3::Zero()), ValidationError);
    s.contacts[0].normal.normalize();
    s.contacts[0].mu = -0.1;
    EXPECT_THROW(disturbance_resistance(s, Vec3::Zero()), ValidationError);
    s.contacts[0].mu = 0.5;
    s.contacts[0].max_normal_force = 0.0;
    EXPECT_THROW(disturbance_resistance(s, Vec3::Zero()), ValidationError);
    s.contacts[0].max_normal_force = kInfiniteForce;
    s.torque_limits = {TorqueLimit{"j", 1.0, 1.0, {{3, Vec3::UnitX()}}}};
    EXPECT_THROW(disturbance_resistance(s, Vec3::Zero()), ValidationError);
}

TEST(WrenchFeasibility, MatchesOracleOnRandomSets) {
    const auto a = testing_support::compare_with_oracle(1000, 2024);
    EXPECT_EQ(a.disagreements, 0);
    EXPECT_LT(a.max_gap, 1e-6);
    EXPECT_GT(a.resisted, 100);
    EXPECT_LT(a.resisted, 900);
}

TEST(WrenchFeasibility, AddingAContactNeverHurts) {
    std::mt19937_64 rng(5);
    for (int i = 0; i < 200; ++i) {
        auto w = testing_support::random_wrench_case(rng);
        const double before = wrench_feasibility(w.set, w.required).scale;
        auto extra = testing_support::random_wrench_case(rng).set.contacts.front();
        const Vec3 center = w.set.object.pose.translation();
        extra.position = center - 0.5 * w.set.object.size * extra.normal;
        w.set.contacts.push_back(extra);
        EXPECT_GE(wrench_feasibility(w.set, w.required).scale, before - 1e-9);
    }
}

TEST(WrenchFeasibility, MoreFrictionNeverHurts) {
    std::mt19937_64 rng(6);
    for (int i = 0; i < 200; ++i) {
        auto w = testing_support::random_wrench_case(rng);
        const double before = wrench_feasibility(w.set, w.required).scale;
        for (auto& c : w.set.contacts) c.mu *= 2.0;
        EXPECT_GE(wrench_feasibility(w.set, w.required).scale, before - 1e-9);
    }
}

// -- pinch ---------------------------------------------------------------------

TEST(Pinch, ThumbOpposesEveryFinger) {
    for (int d = 2; d <= 5; ++d) {
        const auto r = pinch_check(default_model(), d);
        EXPECT_TRUE(r.achievable) << d;
        EXPECT_LE(r.residual, kPinchTolerance) << d;
        const auto& m = *default_model();
        for (std::size_t i = 0; i < r.q.size(); ++i) {
            EXPECT_GE(r.q[i], m.limits(i).lo - 1e-12);
            EXPECT_LE(r.q[i], m.limits(i).hi + 1e-12);
        }
    }
}

TEST(Pinch, RejectsOtherDigits) {
    EXPECT_THROW(pinch_check(default_model(), 1), RangeError);
    EXPECT_THROW(pinch_check(default_model(), 6), RangeError);
}

TEST(Pinch, ModelWithoutThumbIsRejectedAtLoad) {
    auto doc = default_document();
    doc["digits"].erase(0);
    EXPECT_THROW(load_hand_description(doc.dump()), ValidationError);
}

// -- parallel plates -----------------------------------------------------------

TEST(ParallelGrasp, CombinedAbductionReachesTwoHundredMillimetres) {
    const auto& g = parallel(true);
    EXPECT_GE(g.distance, 200.0);
    EXPECT_FALSE(g.side_one.empty());
    EXPECT_FALSE(g.side_two.empty());
    EXPECT_NEAR(g.plate_normal.norm(), 1.0, 1e-9);
}

TEST(ParallelGrasp, LockedBranchIsStrictlySmaller) {
    const auto& off = parallel(false);
    EXPECT_LT(off.distance, parallel(true).distance);
    EXPECT_GT(off.distance, 0.0);
    EXPECT_EQ(off.q.at("abd45"), default_model()->branch().neutral);
}

TEST(ParallelGrasp, ContactsLieOnThePlates) {
    const auto& g = parallel(true);
    const auto& m = *default_model();
    const auto frames = frame_transforms(m, apply_couplings(m, g.q));
    const auto pads = detail::pad_poses(m, frames);
    auto find = [&](const std::string& id) {
        for (const auto& p : pads)
            if (p.id == id) return p;
        ADD_FAILURE() << id;
        return pads.front();
    };
    ParallelGraspOptions o;
    const double cos_max = std::cos(o.max_normal_angle);
    double a = -std::numeric_limits<double>::infinity(), b = -a;
    for (const auto& id : g.side_one) {
        const auto p = find(id);
        EXPECT_GE(p.normal.dot(g.plate_normal), cos_max - 1e-9) << id;
        a = std::max(a, g.plate_normal.dot(p.center));
    }
    for (const auto& id : g.side_two) {
        const auto p = find(id);
        EXPECT_GE(-p.normal.dot(g.plate_normal), cos_max - 1e-9) << id;
        b = std::min(b, g.plate_normal.dot(p.center));
    }
    EXPECT_NEAR(b - a, g.distance, 1e-9);
}

TEST(ParallelGrasp, PreconditionOnContactCount) {
    EXPECT_THROW(max_parallel_grasp_distance(default_model(), 0), PreconditionError);
}

// -- sphere grasps -------------------------------------------------------------

TEST(SphereGrasp, SeventyMillimetreGraspWithAbduction) {
    const auto g = synthesize_sphere_grasp(default_model(), 70.0, true);
    EXPECT_GE(g.contacts.contacts.size(), 4u);
    EXPECT_EQ(g.contacts.contacts.size(), 10u);
    EXPECT_NO_THROW(validate_contact_set(g.contacts));
    const Vec3 center = g.contacts.object.pose.translation();
    SphereGraspOptions o;
    for (const auto& c : g.contacts.contacts) {
        EXPECT_NEAR((c.position - center).norm(), 35.0, 1e-6) << c.patch;
        EXPECT_NEAR(c.normal.dot((center - c.position).normalized()), 1.0, 1e-9) << c.patch;
        EXPECT_DOUBLE_EQ(c.mu, o.mu);
    }
}

TEST(SphereGrasp, LockedBranchStaysNeutral) {
    for (double d : {70.0, 100.0}) {
        const auto g = synthesize_sphere_grasp(default_model(), d, false);
        EXPECT_EQ(g.q.at("abd45"), default_model()->branch().neutral) << d;
    }
}

TEST(SphereGrasp, LargeSphereLeavesGapOppositeThumbWithoutAbduction) {
    EXPECT_TRUE(synthesize_sphere_grasp(default_model(), 100.0, false).coverage_gap);
}

TEST(SphereGrasp, FingerContactsAreCapped) {
    const auto g = synthesize_sphere_grasp(default_model(), 80.0, true);
    int capped = 0;
    for (const auto& c : g.contacts.contacts)
        if (c.digit >= 0) {
            EXPECT_TRUE(std::isfinite(c.max_normal_force)) << c.patch;
            EXPECT_GT(c.max_normal_force, 0.0) << c.patch;
            ++capped;
        }
    EXPECT_EQ(capped, g.digit_contacts);
    EXPECT_FALSE(g.contacts.torque_limits.empty());
}

TEST(SphereGrasp, RejectsBadDiameter) {
    EXPECT_THROW(synthesize_sphere_grasp(default_model(), 0.0, true), PreconditionError);
    EXPECT_THROW(synthesize_sphere_grasp(default_model(), -5.0, true), PreconditionError);
}

// -- disturbance protocol ------------------------------------------------------

TEST(DisturbanceProtocol, ZeroForceAlwaysHolds) {
    auto c = small_protocol();
    c.force_hi = 0.0;
    const auto r = run_disturbance_protocol(default_model(), c, false);
    for (const auto& s : r.summary) EXPECT_EQ(s.success_rate, 1.0) << s.diameter;
    for (const auto& e : r.episodes) {
        EXPECT_EQ(e.steps_held, c.episode_steps);
        EXPECT_NEAR(e.score, 600 * 0.016, 1e-12);
        EXPECT_EQ(e.draws.size(), 10u);
    }
}

TEST(DisturbanceProtocol, SuccessFallsWithForceAndAbductionDominates) {
    DisturbanceProtocolConfig c;
    const auto study = run_force_bin_study(default_model(), c);
    ASSERT_EQ(study.bins.size(), 5u);
    for (int flag = 0; flag < 2; ++flag)
        for (std::size_t b = 1; b < study.bins.size(); ++b)
            for (std::size_t d = 0; d < study.diameters.size(); ++d)
                EXPECT_LE(study.success[flag][b][d], study.success[flag][b - 1][d]);
    for (std::size_t d = 0; d < study.diameters.size(); ++d) {
        bool strict = false;
        for (std::size_t b = 0; b < study.bins.size(); ++b) {
            EXPECT_GE(study.success[1][b][d], study.success[0][b][d]) << study.diameters[d] << " bin " << b;
            strict = strict || study.success[1][b][d] > study.success[0][b][d];
        }
        if (study.diameters[d] >= 90.0) {
            EXPECT_TRUE(strict) << study.diameters[d];
        }
    }
}

TEST(DisturbanceProtocol, ReproducibleAndWorkerIndependent) {
    auto c = small_protocol();
    c.force_lo = 3.0;
    c.workers = 1;
    const auto a = protocol_json(run_disturbance_protocol(default_model(), c, true));
    c.workers = 3;
    const auto b = protocol_json(run_disturbance_protocol(default_model(), c, true));
    EXPECT_EQ(a.dump(), b.dump());
    c.seed = 7;
    EXPECT_NE(a.dump(), protocol_json(run_disturbance_protocol(default_model(), c, true)).dump());
}

TEST(DisturbanceProtocol, EpisodeStopsAtFirstFailure) {
    ContactSet s;
    s.contacts = {contact_at(Vec3::Zero(), -Vec3::UnitZ(), 30, 0.0, 1.0)};
    DisturbanceProtocolConfig c;
    c.force_lo = 4.0;
    const auto e = run_episode(s, c, 0);
    EXPECT_FALSE(e.success);
    ASSERT_FALSE(e.draws.empty());
    EXPECT_FALSE(e.draws.back().resisted);
    for (std::size_t i = 0; i + 1 < e.draws.size(); ++i) EXPECT_TRUE(e.draws[i].resisted);
    EXPECT_EQ(e.steps_held, 60 * static_cast<int>(e.draws.size() - 1));
    EXPECT_NEAR(e.score, 0.016 * e.steps_held - 1.0, 1e-12);
    for (const auto& d : e.draws) {
        EXPECT_GE(d.force.norm(), 4.0 - 1e-12);
        EXPECT_LE(d.force.norm(), 5.0 + 1e-12);
    }
}

TEST(DisturbanceProtocol, ValidatesConfig) {
    auto c = small_protocol();
    c.force_lo = 3.0;
    c.force_hi = 2.0;
    EXPECT_THROW(run_disturbance_protocol(default_model(), c, true), ValidationError);
    c = small_protocol();
    c.episode_steps = 0;
    EXPECT_THROW(run_disturbance_protocol(default_model(), c, true), ValidationError);
    c = small_protocol();
    EXPECT_THROW(run_disturbance_protocol(std::vector<SphereGrasp>(1), c, true), ConfigurationError);
}

TEST(DisturbanceProtocol, ResultsFileSchema) {
    auto c = small_protocol();
    c.force_lo = 2.0;
    const auto j = protocol_json(run_disturbance_protocol(default_model(), c, true));
    EXPECT_EQ(j.at("schema"), kDisturbanceSchema);
    EXPECT_EQ(j.at("episodes").size(), 8u);
    for (const auto& row : j.at("episodes")) {
        for (const char* key : {"seed", "diameter_mm", "combined_abd", "force_draws_n", "success", "steps_held", "score"})
            EXPECT_TRUE(row.contains(key)) << key;
        for (const auto& f : row.at("force_draws_n")) EXPECT_EQ(f.size(), 3u);
    }
    EXPECT_EQ(j.at("summary").size(), 2u);
    const auto table = format_force_bin_table(run_force_bin_study(default_model(), c, 2));
    EXPECT_NE(table.find("[1.00, 2.00]"), std::string::npos) << table;
}
