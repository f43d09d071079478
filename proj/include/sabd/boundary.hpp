#pragma once

// Surface extraction from occupancy grids for visualization and export.

#include <algorithm>
#include <array>
#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "sabd/workspace.hpp"

namespace sabd {

struct BoundaryMesh {
    std::vector<Vec3> vertices;               // mm
    std::vector<std::array<int, 3>> triangles;  // counter-clockwise seen from outside
    bool watertight = false;
};

enum class Smoothing { none, alpha_like };

inline std::string to_string(Smoothing s) { return s == Smoothing::none ? "none" : "alpha_like"; }

inline Smoothing parse_smoothing(const std::string& s) {
    if (s == "none") return Smoothing::none;
    if (s == "alpha_like") return Smoothing::alpha_like;
    throw ValidationError("unknown smoothing '" + s + "' (expected none or alpha_like)");
}

/// Enclosed volume by the divergence theorem (mm^3).
inline double enclosed_volume(const BoundaryMesh& m) {
    double v = 0.0;
    for (const auto& t : m.triangles)
        v += m.vertices[static_cast<std::size_t>(t[0])].dot(
            m.vertices[static_cast<std::size_t>(t[1])].cross(m.vertices[static_cast<std::size_t>(t[2])]));
    return v / 6.0;
}

inline double surface_area(const BoundaryMesh& m) {
    double a = 0.0;
    for (const auto& t : m.triangles) {
        const Vec3& p = m.vertices[static_cast<std::size_t>(t[0])];
        a += 0.5 * (m.vertices[static_cast<std::size_t>(t[1])] - p).cross(m.vertices[static_cast<std::size_t>(t[2])] - p).norm();
    }
    return a;
}

/// Every directed edge is matched by its reverse exactly as often.
inline bool is_closed(const BoundaryMesh& m) {
    std::map<std::pair<int, int>, int> balance;
    for (const auto& t : m.triangles)
        for (int e = 0; e < 3; ++e) {
            const int a = t[static_cast<std::size_t>(e)], b = t[static_cast<std::size_t>((e + 1) % 3)];
            if (a < b)
                ++balance[{a, b}];
            else
                --balance[{b, a}];
        }
    for (const auto& [edge, n] : balance)
        if (n != 0) return false;
    return !m.triangles.empty();
}

namespace detail {

// Morphological closing with a 6-neighbourhood, on a grid padded by one cell.
inline OccupancyGrid close_grid(const OccupancyGrid& g) {
    const auto& lo = g.lattice_origin();
    const auto& d = g.dims();
    const Index3 plo{lo[0] - 2, lo[1] - 2, lo[2] - 2};
    const std::array<std::int64_t, 3> pd{d[0] + 4, d[1] + 4, d[2] + 4};
    static const std::array<Index3, 6> nb{{{1, 0, 0}, {-1, 0, 0}, {0, 1, 0}, {0, -1, 0}, {0, 0, 1}, {0, 0, -1}}};
    OccupancyGrid dil(g.resolution(), plo, pd);
    g.for_each_occupied([&](const Index3& c) {
        dil.set(c);
        for (const auto& o : nb) dil.set({c[0] + o[0], c[1] + o[1], c[2] + o[2]});
    });
    OccupancyGrid out(g.resolution(), plo, pd);
    dil.for_each_occupied([&](const Index3& c) {
        for (const auto& o : nb)
            if (!dil.occupied({c[0] + o[0], c[1] + o[1], c[2] + o[2]})) return;
        out.set(c);
    });
    return out;
}

inline BoundaryMesh voxel_faces(const OccupancyGrid& g) {
    BoundaryMesh m;
    std::map<Index3, int> corner_index;
    auto corner = [&](const Index3& c) {
        auto [it, inserted] = corner_index.emplace(c, static_cast<int>(m.vertices.size()));
        if (inserted)
            m.vertices.emplace_back(static_cast<double>(c[0]) * g.resolution(), static_cast<double>(c[1]) * g.resolution(),
                                    static_cast<double>(c[2]) * g.resolution());
        return it->second;
    };
    g.for_each_occupied([&](const Index3& c) {
        for (int axis = 0; axis < 3; ++axis)
            for (int side = 0; side < 2; ++side) {
                Index3 n = c;
                n[static_cast<std::size_t>(axis)] += side ? 1 : -1;
                if (g.occupied(n)) continue;
                const int u = (axis + 1) % 3, v = (axis + 2) % 3;
                Index3 base = c;
                base[static_cast<std::size_t>(axis)] += side;
                auto at = [&](int du, int dv) {
                    Index3 p = base;
                    p[static_cast<std::size_t>(u)] += du;
                    p[static_cast<std::size_t>(v)] += dv;
                    return corner(p);
                };
                const int a = at(0, 0), b = at(1, 0), cc = at(1, 1), dd = at(0, 1);
                // (u, v, axis) is right-handed, so a-b-c faces +axis.
                if (side) {
                    m.triangles.push_back({a, b, cc});
                    m.triangles.push_back({a, cc, dd});
                } else {
                    m.triangles.push_back({a, cc, b});
                    m.triangles.push_back({a, dd, cc});
                }
            }
    });
    return m;
}

// Taubin lambda/mu smoothing; shrinks far less than plain Laplacian passes.
inline void taubin_smooth(BoundaryMesh& m, int iterations, double lambda = 0.5, double mu = -0.53) {
    std::vector<std::vector<int>> adj(m.vertices.size());
    for (const auto& t : m.triangles)
        for (int e = 0; e < 3; ++e) {
            const int a = t[static_cast<std::size_t>(e)], b = t[static_cast<std::size_t>((e + 1) % 3)];
            adj[static_cast<std::size_t>(a)].push_back(b);
            adj[static_cast<std::size_t>(b)].push_back(a);
        }
    for (auto& list : adj) {
        std::sort(list.begin(), list.end());
        list.erase(std::unique(list.begin(), list.end()), list.end());
    }
    std::vector<Vec3> next(m.vertices.size());
    auto pass = [&](double w) {
        for (std::size_t i = 0; i < m.vertices.size(); ++i) {
            if (adj[i].empty()) {
                next[i] = m.vertices[i];
                continue;
            }
            Vec3 mean = Vec3::Zero();
            for (int j : adj[i]) mean += m.vertices[static_cast<std::size_t>(j)];
            mean /= static_cast<double>(adj[i].size());
            next[i] = m.vertices[i] + w * (mean - m.vertices[i]);
        }
        m.vertices.swap(next);
    };
    for (int k = 0; k < iterations; ++k) {
        pass(lambda);
        pass(mu);
    }
}

}  // namespace detail

/// Closed surface of the occupied region. `none` returns the exact voxel
/// faces; `alpha_like` closes one-cell gaps first and then smooths.
inline BoundaryMesh extract_boundary(const OccupancyGrid& grid, Smoothing smoothing = Smoothing::none) {
    if (grid.empty()) throw EmptyInputError("cannot extract a boundary from an empty grid");
    BoundaryMesh m;
    if (smoothing == Smoothing::none) {
        m = detail::voxel_faces(grid);
    } else {
        m = detail::voxel_faces(detail::close_grid(grid));
        detail::taubin_smooth(m, 10);
    }
    m.watertight = is_closed(m);
    return m;
}

}  // namespace sabd
