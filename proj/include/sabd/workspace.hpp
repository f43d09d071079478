#pragma once

// Monte-Carlo fingertip workspaces on a voxel lattice.
//
// Voxel (i, j, k) covers [i, i+1) x [j, j+1) x [k, k+1) times the resolution,
// so every grid with the same resolution shares one lattice and grids can be
// combined without resampling.

#include <array>
#include <cmath>
#include <cstdint>
#include <limits>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "sabd/hand_model.hpp"
#include "sabd/parallel.hpp"

namespace sabd {

struct PointCloud {
    std::vector<Vec3> points;  // mm, palm frame
    int digit = 0;             // 1..5
    std::size_t sample_count = 0;
    std::uint64_t rng_seed = 0;
};

/// Joint interval overrides keyed by joint name.
using RomOverride = std::map<std::string, Interval>;

struct SampleOptions {
    RomOverride rom_override;
    unsigned workers = 0;
};

/// Independent DoFs that move a digit's fingertip, branch included for digits 4/5.
inline std::vector<std::size_t> digit_dofs(const HandModel& model, int digit) {
    std::vector<std::size_t> out;
    for (int n : model.digit(digit - 1).nodes) {
        const auto& node = model.nodes()[static_cast<std::size_t>(n)];
        if (node.dof >= 0) out.push_back(static_cast<std::size_t>(node.dof));
    }
    return out;
}

inline void check_digit_number(int digit) {
    if (digit < 1 || digit > kDigitCount) throw LookupError("unknown digit " + std::to_string(digit));
}

/// Uniform joint-space sampling of one digit's fingertip. Sample i draws from
/// its own counter-based stream, so the cloud does not depend on the worker count.
inline PointCloud sample_workspace(const HandModel& model, int digit, std::size_t n_samples, std::uint64_t rng_seed,
                                   const SampleOptions& opt = {}) {
    check_digit_number(digit);
    if (n_samples < 1) throw PreconditionError("n_samples must be >= 1");
    const auto dofs = digit_dofs(model, digit);
    std::vector<Interval> ranges;
    for (auto d : dofs) ranges.push_back(model.limits(d));
    for (const auto& [name, iv] : opt.rom_override) {
        const auto d = model.dof_index(name);
        const auto& lim = model.limits(d);
        if (iv.lo > iv.hi || iv.lo < lim.lo - 1e-12 || iv.hi > lim.hi + 1e-12)
            throw RangeError("override for '" + name + "' lies outside the joint limits");
        for (std::size_t k = 0; k < dofs.size(); ++k)
            if (dofs[k] == d) ranges[k] = iv;
    }
    PointCloud cloud;
    cloud.digit = digit;
    cloud.sample_count = n_samples;
    cloud.rng_seed = rng_seed;
    cloud.points.resize(n_samples);
    const auto& nodes = model.nodes();
    const int tip_frame = model.digit(digit - 1).nodes.back() + 1;
    parallel_chunks(n_samples, opt.workers, [&](unsigned, std::size_t b, std::size_t e) {
        JointAngles full = model.zero_angles();
        for (std::size_t i = b; i < e; ++i) {
            SplitMix64 rng(rng_seed, i);
            for (std::size_t k = 0; k < dofs.size(); ++k)
                full[static_cast<std::size_t>(model.dof_node(dofs[k]))] = rng.uniform(ranges[k].lo, ranges[k].hi);
            for (int n : model.digit(digit - 1).nodes) {
                const auto& node = nodes[static_cast<std::size_t>(n)];
                if (node.driver >= 0)
                    full[static_cast<std::size_t>(n)] = node.factor * full[static_cast<std::size_t>(node.driver)];
            }
            cloud.points[i] = chain_transform(model, full, tip_frame) * model.digit(digit - 1).fingertip;
        }
    });
    return cloud;
}

// -- occupancy grid -------------------------------------------------------------

using Index3 = std::array<std::int64_t, 3>;

class OccupancyGrid {
public:
    OccupancyGrid() = default;
    /// Empty grid covering lattice cells [lo, lo + dims).
    OccupancyGrid(double resolution, Index3 lo, std::array<std::int64_t, 3> dims)
        : resolution_(resolution), lo_(lo), dims_(dims) {
        if (!(resolution > 0)) throw PreconditionError("resolution must be > 0");
        for (auto d : dims_)
            if (d < 0) throw PreconditionError("negative grid dimension");
        bits_.assign(static_cast<std::size_t>((cell_count() + 63) / 64), 0);
    }

    double resolution() const { return resolution_; }
    const Index3& lattice_origin() const { return lo_; }
    const std::array<std::int64_t, 3>& dims() const { return dims_; }
    Vec3 origin() const {
        return Vec3(static_cast<double>(lo_[0]), static_cast<double>(lo_[1]), static_cast<double>(lo_[2])) * resolution_;
    }
    std::int64_t cell_count() const { return dims_[0] * dims_[1] * dims_[2]; }

    bool in_bounds(const Index3& c) const {
        for (int a = 0; a < 3; ++a)
            if (c[a] < lo_[a] || c[a] >= lo_[a] + dims_[a]) return false;
        return true;
    }
    bool occupied(const Index3& c) const {
        if (!in_bounds(c)) return false;
        const auto i = linear(c);
        return (bits_[static_cast<std::size_t>(i >> 6)] >> (i & 63)) & 1u;
    }
    void set(const Index3& c, bool v = true) {
        if (!in_bounds(c)) throw RangeError("voxel outside grid");
        const auto i = linear(c);
        auto& w = bits_[static_cast<std::size_t>(i >> 6)];
        const std::uint64_t m = std::uint64_t{1} << (i & 63);
        w = v ? (w | m) : (w & ~m);
    }
    std::size_t count() const {
        std::size_t n = 0;
        for (auto w : bits_) n += static_cast<std::size_t>(__builtin_popcountll(w));
        return n;
    }
    bool empty() const { return count() == 0; }
    /// mm^3
    double volume() const { return static_cast<double>(count()) * resolution_ * resolution_ * resolution_; }

    Index3 cell_of(const Vec3& p) const { return cell_of(p, resolution_); }
    static Index3 cell_of(const Vec3& p, double resolution) {
        return {static_cast<std::int64_t>(std::floor(p.x() / resolution)),
                static_cast<std::int64_t>(std::floor(p.y() / resolution)),
                static_cast<std::int64_t>(std::floor(p.z() / resolution))};
    }
    Vec3 cell_center(const Index3& c) const {
        return (Vec3(static_cast<double>(c[0]), static_cast<double>(c[1]), static_cast<double>(c[2])) + Vec3::Constant(0.5)) *
               resolution_;
    }

    template <class F>
    void for_each_occupied(F&& f) const {
        for (std::int64_t k = 0; k < dims_[2]; ++k)
            for (std::int64_t j = 0; j < dims_[1]; ++j)
                for (std::int64_t i = 0; i < dims_[0]; ++i) {
                    const Index3 c{lo_[0] + i, lo_[1] + j, lo_[2] + k};
                    if (occupied(c)) f(c);
                }
    }

    const std::vector<std::uint64_t>& words() const { return bits_; }
    std::vector<std::uint64_t>& words() { return bits_; }

    bool operator==(const OccupancyGrid& o) const {
        if (resolution_ != o.resolution_ || count() != o.count()) return false;
        bool same = true;
        for_each_occupied([&](const Index3& c) { same = same && o.occupied(c); });
        return same;
    }

private:
    std::int64_t linear(const Index3& c) const {
        return (c[0] - lo_[0]) + dims_[0] * ((c[1] - lo_[1]) + dims_[1] * (c[2] - lo_[2]));
    }

    double resolution_ = 1.0;
    Index3 lo_{0, 0, 0};
    std::array<std::int64_t, 3> dims_{0, 0, 0};
    std::vector<std::uint64_t> bits_;
};

/// Occupies every voxel containing at least one point.
inline OccupancyGrid voxelize(const std::vector<Vec3>& points, double resolution) {
    if (!(resolution > 0)) throw PreconditionError("resolution must be > 0");
    if (points.empty()) return OccupancyGrid(resolution, {0, 0, 0}, {0, 0, 0});
    Index3 lo{std::numeric_limits<std::int64_t>::max(), std::numeric_limits<std::int64_t>::max(),
              std::numeric_limits<std::int64_t>::max()};
    Index3 hi{std::numeric_limits<std::int64_t>::min(), std::numeric_limits<std::int64_t>::min(),
              std::numeric_limits<std::int64_t>::min()};
    for (const auto& p : points) {
        if (!p.allFinite()) throw GeometryError("non-finite point in cloud");
        const auto c = OccupancyGrid::cell_of(p, resolution);
        for (int a = 0; a < 3; ++a) {
            lo[a] = std::min(lo[a], c[a]);
            hi[a] = std::max(hi[a], c[a]);
        }
    }
    OccupancyGrid g(resolution, lo, {hi[0] - lo[0] + 1, hi[1] - lo[1] + 1, hi[2] - lo[2] + 1});
    for (const auto& p : points) g.set(g.cell_of(p));
    return g;
}

inline OccupancyGrid voxelize(const PointCloud& cloud, double resolution) { return voxelize(cloud.points, resolution); }

namespace detail {
inline void check_same_resolution(const OccupancyGrid& a, const OccupancyGrid& b) {
    if (std::abs(a.resolution() - b.resolution()) > 1e-12 * std::max(a.resolution(), b.resolution()))
        throw ConfigurationError("grids have different resolutions");
}
}  // namespace detail

/// Voxels occupied in both grids.
inline OccupancyGrid intersect(const OccupancyGrid& a, const OccupancyGrid& b) {
    detail::check_same_resolution(a, b);
    Index3 lo{}, hi{};
    for (int k = 0; k < 3; ++k) {
        lo[k] = std::max(a.lattice_origin()[k], b.lattice_origin()[k]);
        hi[k] = std::min(a.lattice_origin()[k] + a.dims()[k], b.lattice_origin()[k] + b.dims()[k]);
        if (hi[k] < lo[k]) hi[k] = lo[k];
    }
    OccupancyGrid out(a.resolution(), lo, {hi[0] - lo[0], hi[1] - lo[1], hi[2] - lo[2]});
    for (auto k = lo[2]; k < hi[2]; ++k)
        for (auto j = lo[1]; j < hi[1]; ++j)
            for (auto i = lo[0]; i < hi[0]; ++i) {
                const Index3 c{i, j, k};
                if (a.occupied(c) && b.occupied(c)) out.set(c);
            }
    return out;
}

/// Voxels occupied in either grid.
inline OccupancyGrid unite(const OccupancyGrid& a, const OccupancyGrid& b) {
    detail::check_same_resolution(a, b);
    if (a.cell_count() == 0) return b;
    if (b.cell_count() == 0) return a;
    Index3 lo{}, hi{};
    for (int k = 0; k < 3; ++k) {
        lo[k] = std::min(a.lattice_origin()[k], b.lattice_origin()[k]);
        hi[k] = std::max(a.lattice_origin()[k] + a.dims()[k], b.lattice_origin()[k] + b.dims()[k]);
    }
    OccupancyGrid out(a.resolution(), lo, {hi[0] - lo[0], hi[1] - lo[1], hi[2] - lo[2]});
    a.for_each_occupied([&](const Index3& c) { out.set(c); });
    b.for_each_occupied([&](const Index3& c) { out.set(c); });
    return out;
}

// -- abduction study ------------------------------------------------------------

struct AbductionStudyOptions {
    std::vector<int> digits{4, 5};
    double resolution = 2.0;
    double restricted_width = 0.2;  // rad
    unsigned workers = 0;
};

struct DigitRatio {
    int digit = 0;
    double volume_full = 0.0;        // mm^3
    double volume_restricted = 0.0;  // mm^3
    double ratio = 0.0;
};

struct AbductionStudy {
    std::vector<DigitRatio> digits;
    DigitRatio combined;  // union over the studied digits, digit = 0
    Interval restricted;  // branch interval used for the restricted run
};

/// Branch interval of the given width centred on the neutral angle, shifted
/// to stay inside the joint limits.
inline Interval restricted_branch_interval(const HandModel& model, double width) {
    const auto& lim = model.branch().limits;
    width = std::min(width, lim.width());
    double lo = model.branch().neutral - 0.5 * width;
    lo = std::clamp(lo, lim.lo, lim.hi - width);
    return {lo, lo + width};
}

inline AbductionStudy abduction_ratio_study(const HandModel& model, std::size_t n_samples, std::uint64_t seed,
                                            const AbductionStudyOptions& opt = {}) {
    AbductionStudy out;
    out.restricted = restricted_branch_interval(model, opt.restricted_width);
    SampleOptions full_opt{{}, opt.workers};
    SampleOptions restricted_opt{{{model.branch().name, out.restricted}}, opt.workers};
    OccupancyGrid all_full, all_restricted;
    bool first = true;
    for (int d : opt.digits) {
        const auto gf = voxelize(sample_workspace(model, d, n_samples, seed, full_opt), opt.resolution);
        const auto gr = voxelize(sample_workspace(model, d, n_samples, seed, restricted_opt), opt.resolution);
        out.digits.push_back({d, gf.volume(), gr.volume(), gf.volume() / gr.volume()});
        all_full = first ? gf : unite(all_full, gf);
        all_restricted = first ? gr : unite(all_restricted, gr);
        first = false;
    }
    out.combined = {0, all_full.volume(), all_restricted.volume(), all_full.volume() / all_restricted.volume()};
    return out;
}

}  // namespace sabd
