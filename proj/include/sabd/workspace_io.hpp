#pragma once

// File formats for workspace artifacts.
//
// grid  : "SABDGRID" u32 version, f64 resolution, i64 lattice lo[3], i64 dims[3],
//         f64 origin[3] (mm, informative), u64 word count, u64 words; x fastest.
// cloud : "SABDPCLD" u32 version, i32 digit, u64 sample count, u64 seed,
//         u64 point count, f32 x y z per point.
// All numbers little-endian.

#include <algorithm>
#include <array>
#include <bit>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>
#include <string>
#include <type_traits>
#include <vector>

#include "sabd/boundary.hpp"
#include "sabd/workspace.hpp"

namespace sabd {

inline constexpr std::uint32_t kGridFormatVersion = 1;
inline constexpr std::uint32_t kCloudFormatVersion = 1;

namespace detail {

template <class T>
void put_le(std::ostream& os, T value) {
    static_assert(std::is_trivially_copyable_v<T>);
    unsigned char bytes[sizeof(T)];
    std::memcpy(bytes, &value, sizeof(T));
    if constexpr (std::endian::native == std::endian::big) std::reverse(bytes, bytes + sizeof(T));
    os.write(reinterpret_cast<const char*>(bytes), sizeof(T));
}

template <class T>
T get_le(std::istream& is, const char* what) {
    unsigned char bytes[sizeof(T)];
    if (!is.read(reinterpret_cast<char*>(bytes), sizeof(T))) throw FormatError(std::string("truncated file reading ") + what);
    if constexpr (std::endian::native == std::endian::big) std::reverse(bytes, bytes + sizeof(T));
    T value;
    std::memcpy(&value, bytes, sizeof(T));
    return value;
}

inline void expect_magic(std::istream& is, const char (&magic)[9]) {
    char got[8];
    if (!is.read(got, 8) || std::memcmp(got, magic, 8) != 0)
        throw FormatError(std::string("not a ") + magic + " file");
}

inline std::ofstream open_out(const std::string& path, bool binary) {
    std::ofstream os(path, binary ? std::ios::binary : std::ios::out);
    if (!os) throw FormatError("cannot write " + path);
    return os;
}

inline std::ifstream open_in(const std::string& path, bool binary) {
    std::ifstream is(path, binary ? std::ios::binary : std::ios::in);
    if (!is) throw FormatError("cannot read " + path);
    return is;
}

}  // namespace detail

// -- grid -----------------------------------------------------------------------

inline void write_grid(std::ostream& os, const OccupancyGrid& g) {
    os.write("SABDGRID", 8);
    detail::put_le(os, kGridFormatVersion);
    detail::put_le(os, g.resolution());
    for (auto v : g.lattice_origin()) detail::put_le(os, v);
    for (auto v : g.dims()) detail::put_le(os, v);
    const Vec3 o = g.origin();
    for (int a = 0; a < 3; ++a) detail::put_le(os, o[a]);
    detail::put_le(os, static_cast<std::uint64_t>(g.words().size()));
    for (auto w : g.words()) detail::put_le(os, w);
}

inline OccupancyGrid read_grid(std::istream& is) {
    detail::expect_magic(is, "SABDGRID");
    const auto version = detail::get_le<std::uint32_t>(is, "version");
    if (version != kGridFormatVersion) throw FormatError("unsupported grid version " + std::to_string(version));
    const auto res = detail::get_le<double>(is, "resolution");
    Index3 lo{};
    std::array<std::int64_t, 3> dims{};
    for (auto& v : lo) v = detail::get_le<std::int64_t>(is, "lattice origin");
    for (auto& v : dims) v = detail::get_le<std::int64_t>(is, "dims");
    for (int a = 0; a < 3; ++a) detail::get_le<double>(is, "origin");
    if (!(res > 0) || dims[0] < 0 || dims[1] < 0 || dims[2] < 0) throw FormatError("invalid grid header");
    OccupancyGrid g(res, lo, dims);
    const auto n = detail::get_le<std::uint64_t>(is, "word count");
    if (n != g.words().size()) throw FormatError("grid body size does not match dims");
    for (auto& w : g.words()) w = detail::get_le<std::uint64_t>(is, "grid body");
    return g;
}

inline void save_grid(const std::string& path, const OccupancyGrid& g) {
    auto os = detail::open_out(path, true);
    write_grid(os, g);
}
inline OccupancyGrid load_grid(const std::string& path) {
    auto is = detail::open_in(path, true);
    return read_grid(is);
}

// -- cloud ----------------------------------------------------------------------

inline void write_cloud(std::ostream& os, const PointCloud& c) {
    os.write("SABDPCLD", 8);
    detail::put_le(os, kCloudFormatVersion);
    detail::put_le(os, static_cast<std::int32_t>(c.digit));
    detail::put_le(os, static_cast<std::uint64_t>(c.sample_count));
    detail::put_le(os, c.rng_seed);
    detail::put_le(os, static_cast<std::uint64_t>(c.points.size()));
    for (const auto& p : c.points)
        for (int a = 0; a < 3; ++a) detail::put_le(os, static_cast<float>(p[a]));
}

inline PointCloud read_cloud(std::istream& is) {
    detail::expect_magic(is, "SABDPCLD");
    const auto version = detail::get_le<std::uint32_t>(is, "version");
    if (version != kCloudFormatVersion) throw FormatError("unsupported cloud version " + std::to_string(version));
    PointCloud c;
    c.digit = detail::get_le<std::int32_t>(is, "digit");
    c.sample_count = detail::get_le<std::uint64_t>(is, "sample count");
    c.rng_seed = detail::get_le<std::uint64_t>(is, "seed");
    const auto n = detail::get_le<std::uint64_t>(is, "point count");
    c.points.reserve(static_cast<std::size_t>(std::min<std::uint64_t>(n, 1u << 24)));
    for (std::uint64_t i = 0; i < n; ++i) {
        Vec3 p;
        for (int a = 0; a < 3; ++a) p[a] = detail::get_le<float>(is, "points");
        c.points.push_back(p);
    }
    return c;
}

inline void save_cloud(const std::string& path, const PointCloud& c) {
    auto os = detail::open_out(path, true);
    write_cloud(os, c);
}
inline PointCloud load_cloud(const std::string& path) {
    auto is = detail::open_in(path, true);
    return read_cloud(is);
}

// -- meshes ---------------------------------------------------------------------

inline void write_ply(std::ostream& os, const BoundaryMesh& m) {
    os << "ply\nformat ascii 1.0\ncomment sabd boundary mesh\n";
    os << "element vertex " << m.vertices.size() << "\nproperty double x\nproperty double y\nproperty double z\n";
    os << "element face " << m.triangles.size() << "\nproperty list uchar int vertex_indices\nend_header\n";
    os.precision(17);
    for (const auto& v : m.vertices) os << v.x() << ' ' << v.y() << ' ' << v.z() << '\n';
    for (const auto& t : m.triangles) os << "3 " << t[0] << ' ' << t[1] << ' ' << t[2] << '\n';
}

namespace detail {
inline void check_indices(const BoundaryMesh& m) {
    for (const auto& t : m.triangles)
        for (int i : t)
            if (i < 0 || static_cast<std::size_t>(i) >= m.vertices.size()) throw FormatError("face index out of range");
}
}  // namespace detail

inline BoundaryMesh read_ply(std::istream& is) {
    std::string line;
    if (!std::getline(is, line) || line != "ply") throw FormatError("not a PLY file");
    std::size_t nv = 0, nf = 0;
    while (std::getline(is, line) && line != "end_header") {
        std::istringstream ls(line);
        std::string word, elem;
        ls >> word;
        if (word == "format" && line.find("ascii") == std::string::npos) throw FormatError("only ASCII PLY is supported");
        if (word == "element") {
            std::size_t n = 0;
            ls >> elem >> n;
            if (elem == "vertex") nv = n;
            if (elem == "face") nf = n;
        }
    }
    if (line != "end_header") throw FormatError("PLY header not terminated");
    BoundaryMesh m;
    for (std::size_t i = 0; i < nv; ++i) {
        double x, y, z;
        if (!(is >> x >> y >> z)) throw FormatError("truncated PLY vertex list");
        m.vertices.emplace_back(x, y, z);
    }
    for (std::size_t i = 0; i < nf; ++i) {
        int k = 0;
        std::array<int, 3> t{};
        if (!(is >> k) || k != 3 || !(is >> t[0] >> t[1] >> t[2])) throw FormatError("PLY faces must be triangles");
        m.triangles.push_back(t);
    }
    detail::check_indices(m);
    m.watertight = is_closed(m);
    return m;
}

inline void write_obj(std::ostream& os, const BoundaryMesh& m) {
    os << "# sabd boundary mesh\n";
    os.precision(17);
    for (const auto& v : m.vertices) os << "v " << v.x() << ' ' << v.y() << ' ' << v.z() << '\n';
    for (const auto& t : m.triangles) os << "f " << t[0] + 1 << ' ' << t[1] + 1 << ' ' << t[2] + 1 << '\n';
}

inline BoundaryMesh read_obj(std::istream& is) {
    BoundaryMesh m;
    std::string line;
    while (std::getline(is, line)) {
        std::istringstream ls(line);
        std::string tag;
        ls >> tag;
        if (tag == "v") {
            double x, y, z;
            if (!(ls >> x >> y >> z)) throw FormatError("bad OBJ vertex: " + line);
            m.vertices.emplace_back(x, y, z);
        } else if (tag == "f") {
            std::array<int, 3> t{};
            for (auto& i : t) {
                std::string ref;
                if (!(ls >> ref)) throw FormatError("OBJ faces must be triangles: " + line);
                try {
                    i = std::stoi(ref.substr(0, ref.find('/'))) - 1;
                } catch (const std::exception&) {
                    throw FormatError("bad OBJ face: " + line);
                }
            }
            std::string extra;
            if (ls >> extra) throw FormatError("OBJ faces must be triangles: " + line);
            m.triangles.push_back(t);
        }
    }
    detail::check_indices(m);
    m.watertight = is_closed(m);
    return m;
}

/// Writes PLY or OBJ depending on the extension.
inline void save_mesh(const std::string& path, const BoundaryMesh& m) {
    auto os = detail::open_out(path, false);
    if (path.size() >= 4 && path.compare(path.size() - 4, 4, ".obj") == 0)
        write_obj(os, m);
    else if (path.size() >= 4 && path.compare(path.size() - 4, 4, ".ply") == 0)
        write_ply(os, m);
    else
        throw FormatError("mesh path must end in .ply or .obj: " + path);
}

inline BoundaryMesh load_mesh(const std::string& path) {
    auto is = detail::open_in(path, false);
    if (path.size() >= 4 && path.compare(path.size() - 4, 4, ".obj") == 0) return read_obj(is);
    return read_ply(is);
}

}  // namespace sabd
