#include <gtest/gtest.h>

#include <algorithm>
#include <cstdio>
#include <filesystem>
#include <random>
#include <set>
#include <sstream>

#include <unistd.h>

#include "oracles/naive_fk.hpp"
#include "sabd/workspace_io.hpp"
#include "support.hpp"

using namespace sabd;
using testing_support::default_model;

namespace {

OccupancyGrid box_grid(double res, Index3 lo, std::array<std::int64_t, 3> dims) {
    OccupancyGrid g(res, lo, dims);
    for (std::int64_t k = 0; k < dims[2]; ++k)
        for (std::int64_t j = 0; j < dims[1]; ++j)
            for (std::int64_t i = 0; i < dims[0]; ++i) g.set({lo[0] + i, lo[1] + j, lo[2] + k});
    return g;
}

std::vector<Vec3> ball_points(std::size_t n, double radius, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> u(-radius, radius);
    std::vector<Vec3> pts;
    while (pts.size() < n) {
        Vec3 p(u(rng), u(rng), u(rng));
        if (p.norm() <= radius) pts.push_back(p);
    }
    return pts;
}

std::filesystem::path temp_file(const std::string& name) {
    return std::filesystem::temp_directory_path() / ("sabd_ws_" + std::to_string(::getpid()) + "_" + name);
}

}  // namespace

// -- sampling -------------------------------------------------------------------

TEST(SampleWorkspace, ZeroWidthOverrideGivesRestPoint) {
    const auto& m = *default_model();
    RomOverride rom;
    for (auto d : digit_dofs(m, 3)) rom[m.dof_names()[d]] = {0.0, 0.0};
    const auto cloud = sample_workspace(m, 3, 1, 7, {rom, 1});
    ASSERT_EQ(cloud.points.size(), 1u);
    EXPECT_EQ(cloud.sample_count, 1u);
    const Vec3 rest = forward_kinematics(m, m.zero_vector()).digits[2].tip;
    EXPECT_LT((cloud.points[0] - rest).norm(), 1e-12);
}

TEST(SampleWorkspace, SameSeedSameCloud) {
    const auto& m = *default_model();
    const auto a = sample_workspace(m, 4, 5000, 11, {{}, 1});
    const auto b = sample_workspace(m, 4, 5000, 11, {{}, 3});
    EXPECT_EQ(a.points, b.points);
    const auto c = sample_workspace(m, 4, 5000, 12, {{}, 1});
    EXPECT_NE(a.points, c.points);
}

TEST(SampleWorkspace, RejectsBadArguments) {
    const auto& m = *default_model();
    EXPECT_THROW(sample_workspace(m, 2, 0, 1), PreconditionError);
    EXPECT_THROW(sample_workspace(m, 6, 10, 1), LookupError);
    EXPECT_THROW(sample_workspace(m, 2, 10, 1, {{{"d2_pip", {0.0, 3.0}}}, 1}), RangeError);
    EXPECT_THROW(sample_workspace(m, 2, 10, 1, {{{"d2_dip", {0.0, 0.1}}}, 1}), DrivenJointError);
}

TEST(SampleWorkspace, BoundingBoxMatchesJointSweep) {
    const auto& m = *default_model();
    const auto& desc = m.description();
    const auto dofs = digit_dofs(m, 4);
    std::map<std::string, double> named;
    for (const auto& n : m.dof_names()) named[n] = 0.0;
    Vec3 lo = Vec3::Constant(1e9), hi = Vec3::Constant(-1e9);
    const int steps = 24;
    std::vector<int> idx(dofs.size(), 0);
    while (true) {
        for (std::size_t k = 0; k < dofs.size(); ++k) {
            const auto& lim = m.limits(dofs[k]);
            named[m.dof_names()[dofs[k]]] = lim.lo + lim.width() * idx[k] / steps;
        }
        const auto tip = oracle::fingertips(desc, named)[3];
        const Vec3 p(tip[0], tip[1], tip[2]);
        lo = lo.cwiseMin(p);
        hi = hi.cwiseMax(p);
        std::size_t k = 0;
        while (k < idx.size() && ++idx[k] > steps) idx[k++] = 0;
        if (k == idx.size()) break;
    }
    const auto cloud = sample_workspace(m, 4, 500000, 42);
    Vec3 clo = Vec3::Constant(1e9), chi = Vec3::Constant(-1e9);
    for (const auto& p : cloud.points) {
        clo = clo.cwiseMin(p);
        chi = chi.cwiseMax(p);
    }
    const double cell = 2.0;
    for (int a = 0; a < 3; ++a) {
        EXPECT_NEAR(clo[a], lo[a], cell) << "axis " << a;
        EXPECT_NEAR(chi[a], hi[a], cell) << "axis " << a;
    }
}

// -- voxelization ---------------------------------------------------------------

TEST(Voxelize, DenseCubeHasCubeVolume) {
    std::mt19937_64 rng(3);
    std::uniform_real_distribution<double> u(0.0, 10.0);
    std::vector<Vec3> pts;
    for (int i = 0; i < 50000; ++i) pts.emplace_back(u(rng), u(rng), u(rng));
    const auto g = voxelize(pts, 1.0);
    EXPECT_NEAR(g.volume(), 1000.0, 100.0);
}

TEST(Voxelize, SinglePointIsOneCell) {
    const auto g = voxelize(std::vector<Vec3>{Vec3(1.3, -2.2, 7.9)}, 0.5);
    EXPECT_EQ(g.count(), 1u);
    EXPECT_DOUBLE_EQ(g.volume(), 0.125);
    EXPECT_TRUE(g.occupied(g.cell_of(Vec3(1.3, -2.2, 7.9))));
}

TEST(Voxelize, VolumeShrinksAsPointsAreRemoved) {
    auto pts = ball_points(4000, 15.0, 5);
    double last = voxelize(pts, 2.0).volume();
    while (pts.size() > 100) {
        pts.resize(pts.size() / 2);
        const double v = voxelize(pts, 2.0).volume();
        EXPECT_LE(v, last);
        last = v;
    }
}

TEST(Voxelize, RejectsNonPositiveResolution) {
    EXPECT_THROW(voxelize(std::vector<Vec3>{Vec3::Zero()}, 0.0), PreconditionError);
    EXPECT_THROW(OccupancyGrid(-1.0, {0, 0, 0}, {1, 1, 1}), PreconditionError);
}

TEST(Voxelize, SolidBodyVolumeConverges) {
    // Halving the cell size on a volumetric body changes the volume by < 10%.
    const auto pts = ball_points(500000, 30.0, 9);
    const double v2 = voxelize(pts, 2.0).volume(), v1 = voxelize(pts, 1.0).volume();
    EXPECT_LT(std::abs(v2 - v1) / v1, 0.10);
    EXPECT_NEAR(v1, 4.0 / 3.0 * kPi * 27000.0, 0.1 * 4.0 / 3.0 * kPi * 27000.0);
}

TEST(Voxelize, EndToEndIsBitIdentical) {
    const auto& m = *default_model();
    const auto a = voxelize(sample_workspace(m, 5, 20000, 99, {{}, 2}), 2.0);
    const auto b = voxelize(sample_workspace(m, 5, 20000, 99, {{}, 1}), 2.0);
    EXPECT_EQ(a.words(), b.words());
    EXPECT_EQ(a.lattice_origin(), b.lattice_origin());
    EXPECT_EQ(a.volume(), b.volume());
}

// -- set operations -------------------------------------------------------------

TEST(Intersect, IdempotentAndCommutative) {
    const auto a = voxelize(ball_points(3000, 10.0, 1), 1.0);
    std::vector<Vec3> shifted;
    for (const auto& p : ball_points(3000, 10.0, 2)) shifted.push_back(p + Vec3(6, 0, 0));
    const auto b = voxelize(shifted, 1.0);
    EXPECT_TRUE(intersect(a, a) == a);
    const auto ab = intersect(a, b), ba = intersect(b, a);
    EXPECT_TRUE(ab == ba);
    EXPECT_EQ(ab.words(), ba.words());
    EXPECT_GT(ab.count(), 0u);
    EXPECT_LE(ab.volume(), std::min(a.volume(), b.volume()));
}

TEST(Intersect, DisjointBoxesAreEmpty) {
    const auto a = box_grid(1.0, {0, 0, 0}, {3, 3, 3});
    const auto b = box_grid(1.0, {10, 0, 0}, {3, 3, 3});
    EXPECT_TRUE(intersect(a, b).empty());
    const auto c = box_grid(1.0, {2, 2, 2}, {3, 3, 3});
    EXPECT_EQ(intersect(a, c).count(), 1u);
}

TEST(Intersect, MismatchedResolutionIsConfigurationError) {
    const auto a = box_grid(1.0, {0, 0, 0}, {2, 2, 2});
    const auto b = box_grid(2.0, {0, 0, 0}, {2, 2, 2});
    EXPECT_THROW(intersect(a, b), ConfigurationError);
    EXPECT_THROW(unite(a, b), ConfigurationError);
}

TEST(Unite, ContainsBothAndIsMonotone) {
    const auto a = box_grid(1.0, {0, 0, 0}, {3, 3, 3});
    const auto b = box_grid(1.0, {2, 0, 0}, {3, 3, 3});
    const auto u = unite(a, b);
    EXPECT_EQ(u.count(), 45u);
    EXPECT_GE(u.volume(), std::max(a.volume(), b.volume()));
    EXPECT_TRUE(intersect(u, a) == a);
}

TEST(PinchNullspace, ThumbMeetsEveryFinger) {
    const auto& m = *default_model();
    const auto thumb = voxelize(sample_workspace(m, 1, 100000, 42), 2.0);
    for (int d = 2; d <= 5; ++d) {
        const auto finger = voxelize(sample_workspace(m, d, 100000, 42), 2.0);
        EXPECT_GT(intersect(thumb, finger).volume(), 0.0) << "digit " << d;
    }
}

// -- abduction study ------------------------------------------------------------

TEST(AbductionStudy, RestrictedIntervalHasRequestedWidth) {
    const auto& m = *default_model();
    const auto iv = restricted_branch_interval(m, 0.2);
    EXPECT_NEAR(iv.width(), 0.2, 1e-12);
    EXPECT_GE(iv.lo, m.branch().limits.lo);
    EXPECT_LE(iv.hi, m.branch().limits.hi);
}

TEST(AbductionStudy, FullWidthGivesUnitRatio) {
    const auto& m = *default_model();
    AbductionStudyOptions opt;
    opt.restricted_width = m.branch().limits.width();
    const auto s = abduction_ratio_study(m, 50000, 3, opt);
    for (const auto& d : s.digits) EXPECT_NEAR(d.ratio, 1.0, 0.05) << d.digit;
}

TEST(AbductionStudy, DefaultRatiosNearFivefold) {
    const auto& m = *default_model();
    const auto s = abduction_ratio_study(m, 500000, 42);
    ASSERT_EQ(s.digits.size(), 2u);
    for (const auto& d : s.digits) {
        EXPECT_GE(d.ratio, 4.0) << d.digit;
        EXPECT_LE(d.ratio, 6.0) << d.digit;
        EXPECT_NEAR(d.ratio, d.volume_full / d.volume_restricted, 1e-12);
    }
    EXPECT_GE(s.combined.ratio, 0.95);
}

TEST(AbductionStudy, RatioAtLeastOneForOtherDigits) {
    const auto& m = *default_model();
    AbductionStudyOptions opt;
    opt.digits = {4, 5};
    opt.restricted_width = 0.7;
    const auto s = abduction_ratio_study(m, 20000, 8, opt);
    for (const auto& d : s.digits) EXPECT_GE(d.ratio, 0.95);
}

// -- boundary -------------------------------------------------------------------

TEST(Boundary, SingleVoxelIsTwelveTriangleBox) {
    const auto g = box_grid(2.0, {1, 1, 1}, {1, 1, 1});
    const auto mesh = extract_boundary(g);
    EXPECT_EQ(mesh.triangles.size(), 12u);
    EXPECT_EQ(mesh.vertices.size(), 8u);
    EXPECT_TRUE(mesh.watertight);
    EXPECT_NEAR(enclosed_volume(mesh), 8.0, 1e-9);
}

TEST(Boundary, CubeHasSixFlatFaces) {
    const auto g = box_grid(1.0, {-2, -2, -2}, {4, 4, 4});
    const auto mesh = extract_boundary(g);
    EXPECT_TRUE(mesh.watertight);
    EXPECT_NEAR(surface_area(mesh), 6 * 16.0, 1e-9);
    EXPECT_NEAR(enclosed_volume(mesh), 64.0, 1e-9);
    std::set<std::array<int, 3>> normals;
    for (const auto& t : mesh.triangles) {
        const Vec3 n = (mesh.vertices[t[1]] - mesh.vertices[t[0]]).cross(mesh.vertices[t[2]] - mesh.vertices[t[0]]).normalized();
        normals.insert({static_cast<int>(std::lround(n.x())), static_cast<int>(std::lround(n.y())),
                        static_cast<int>(std::lround(n.z()))});
        // outward: the normal points away from the cube centre
        const Vec3 c = (mesh.vertices[t[0]] + mesh.vertices[t[1]] + mesh.vertices[t[2]]) / 3.0;
        EXPECT_GT(n.dot(c), 0.0);
    }
    EXPECT_EQ(normals.size(), 6u);
    for (const auto& v : mesh.vertices) EXPECT_NEAR(v.cwiseAbs().maxCoeff(), 2.0, 1e-12);
}

TEST(Boundary, EmptyGridIsEmptyInput) {
    OccupancyGrid g(1.0, {0, 0, 0}, {2, 2, 2});
    EXPECT_THROW(extract_boundary(g), EmptyInputError);
}

TEST(Boundary, EnclosedVolumeTracksGridVolume) {
    const auto g = voxelize(ball_points(200000, 20.0, 4), 1.5);
    for (auto s : {Smoothing::none, Smoothing::alpha_like}) {
        const auto mesh = extract_boundary(g, s);
        EXPECT_TRUE(mesh.watertight) << to_string(s);
        EXPECT_NEAR(enclosed_volume(mesh), g.volume(), 0.15 * g.volume()) << to_string(s);
    }
    EXPECT_NEAR(enclosed_volume(extract_boundary(g)), g.volume(), 1e-6 * g.volume());
}

TEST(Boundary, WorkspaceMeshIsClosed) {
    const auto& m = *default_model();
    const auto g = voxelize(sample_workspace(m, 2, 50000, 42), 4.0);
    const auto mesh = extract_boundary(g);
    EXPECT_TRUE(mesh.watertight);
    EXPECT_NEAR(enclosed_volume(mesh), g.volume(), 1e-6 * g.volume());
    EXPECT_TRUE(extract_boundary(g, Smoothing::alpha_like).watertight);
}

TEST(Boundary, ParsesSmoothingNames) {
    EXPECT_EQ(parse_smoothing("none"), Smoothing::none);
    EXPECT_EQ(parse_smoothing("alpha_like"), Smoothing::alpha_like);
    EXPECT_THROW(parse_smoothing("alpha"), ValidationError);
}

// -- file formats ---------------------------------------------------------------

TEST(WorkspaceIo, GridRoundTrip) {
    const auto g = voxelize(ball_points(5000, 12.0, 6), 1.0);
    const auto path = temp_file("grid.bin");
    save_grid(path.string(), g);
    const auto back = load_grid(path.string());
    std::filesystem::remove(path);
    EXPECT_EQ(back.words(), g.words());
    EXPECT_EQ(back.lattice_origin(), g.lattice_origin());
    EXPECT_EQ(back.dims(), g.dims());
    EXPECT_EQ(back.resolution(), g.resolution());
}

TEST(WorkspaceIo, CloudRoundTrip) {
    const auto& m = *default_model();
    const auto c = sample_workspace(m, 1, 1000, 5);
    std::stringstream ss;
    write_cloud(ss, c);
    const auto back = read_cloud(ss);
    EXPECT_EQ(back.digit, 1);
    EXPECT_EQ(back.sample_count, 1000u);
    EXPECT_EQ(back.rng_seed, 5u);
    ASSERT_EQ(back.points.size(), c.points.size());
    for (std::size_t i = 0; i < c.points.size(); ++i) EXPECT_LT((back.points[i] - c.points[i]).norm(), 1e-4);
}

TEST(WorkspaceIo, MeshRoundTripPlyAndObj) {
    const auto mesh = extract_boundary(box_grid(1.0, {0, 0, 0}, {2, 3, 1}));
    for (const std::string ext : {".ply", ".obj"}) {
        const auto path = temp_file("mesh" + ext);
        save_mesh(path.string(), mesh);
        const auto back = load_mesh(path.string());
        std::filesystem::remove(path);
        EXPECT_EQ(back.triangles, mesh.triangles) << ext;
        EXPECT_EQ(back.vertices, mesh.vertices) << ext;
        EXPECT_TRUE(back.watertight) << ext;
    }
    EXPECT_THROW(save_mesh(temp_file("mesh.stl").string(), mesh), FormatError);
}

TEST(WorkspaceIo, RejectsCorruptFiles) {
    std::stringstream wrong("NOTAGRID........");
    EXPECT_THROW(read_grid(wrong), FormatError);
    std::stringstream full;
    write_grid(full, box_grid(1.0, {0, 0, 0}, {4, 4, 4}));
    std::string bytes = full.str();
    std::stringstream truncated(bytes.substr(0, bytes.size() - 3));
    EXPECT_THROW(read_grid(truncated), FormatError);
    std::stringstream ply("ply\nformat ascii 1.0\nelement vertex 1\nelement face 1\nend_header\n0 0 0\n3 0 1 2\n");
    EXPECT_THROW(read_ply(ply), FormatError);
    EXPECT_THROW(load_grid("/nonexistent/grid.bin"), FormatError);
}
