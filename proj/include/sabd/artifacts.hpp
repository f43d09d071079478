#pragma once

// Workspace and nullspace artifacts keyed by (model id, parameters), with an
// on-disk cache whose writes are atomic.

#include <atomic>
#include <filesystem>
#include <fstream>
#include <functional>
#include <map>
#include <memory>
#include <mutex>
#include <sstream>
#include <string>

#include <unistd.h>

#include "sabd/boundary.hpp"
#include "sabd/workspace.hpp"
#include "sabd/workspace_io.hpp"

namespace sabd {

enum class RomVariant { full, restricted };

inline std::string to_string(RomVariant v) { return v == RomVariant::full ? "full" : "restricted"; }

inline RomVariant parse_rom_variant(const std::string& s) {
    if (s == "full") return RomVariant::full;
    if (s == "restricted") return RomVariant::restricted;
    throw ValidationError("unknown ROM variant '" + s + "' (expected full or restricted)");
}

struct WorkspaceParams {
    std::size_t samples = 50000;
    double resolution = 4.0;          // mm
    std::uint64_t seed = 42;
    double restricted_width = 0.2;    // rad, branch interval of the restricted variant
    RomOverride rom;                  // applied to every sampled digit
    unsigned workers = 0;
};

inline void validate(const WorkspaceParams& p) {
    if (p.samples < 1) throw PreconditionError("sample count must be >= 1");
    if (!(p.resolution > 0) || !std::isfinite(p.resolution)) throw PreconditionError("resolution must be > 0");
    if (!(p.restricted_width >= 0)) throw PreconditionError("restricted width must be >= 0");
}

inline OccupancyGrid digit_grid(const HandModel& model, int digit, const WorkspaceParams& p, RomVariant v = RomVariant::full) {
    validate(p);
    check_digit_number(digit);
    SampleOptions opt{p.rom, p.workers};
    if (v == RomVariant::restricted) opt.rom_override[model.branch().name] = restricted_branch_interval(model, p.restricted_width);
    return voxelize(sample_workspace(model, digit, p.samples, p.seed, opt), p.resolution);
}

/// Thumb x digit workspace intersection (digits 2..5).
inline OccupancyGrid nullspace_grid(const HandModel& model, int digit, const WorkspaceParams& p, RomVariant v = RomVariant::full) {
    check_digit_number(digit);
    if (digit == 1) throw RangeError("nullspaces pair the thumb with digits 2..5");
    return intersect(digit_grid(model, 1, p, v), digit_grid(model, digit, p, v));
}

inline std::string format_double(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

/// Stable key of an artifact: hash of the model id and every parameter that
/// changes its content.
inline std::string artifact_key(const HandModel& model, const std::string& kind, int digit, RomVariant v,
                                const WorkspaceParams& p) {
    std::ostringstream os;
    os << model.id() << '|' << kind << '|' << digit << '|' << to_string(v) << '|' << p.samples << '|'
       << format_double(p.resolution) << '|' << p.seed << '|' << format_double(p.restricted_width);
    for (const auto& [name, iv] : p.rom) os << '|' << name << '=' << format_double(iv.lo) << ',' << format_double(iv.hi);
    char hex[17];
    std::snprintf(hex, sizeof hex, "%016llx", static_cast<unsigned long long>(fnv1a64(os.str())));
    return kind + "_d" + std::to_string(digit) + "_" + to_string(v) + "_" + hex;
}

/// Writes through a temporary file in the same directory, then renames it
/// over `path`, so readers never see a partial file.
inline void write_file_atomic(const std::filesystem::path& path, const std::string& bytes) {
    static std::atomic<unsigned long> counter{0};
    if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
    auto tmp = path;
    tmp += ".tmp." + std::to_string(::getpid()) + "." + std::to_string(counter++);
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) throw ConfigurationError(tmp.string() + ": cannot write");
        out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
        if (!out) throw ConfigurationError(tmp.string() + ": write failed");
    }
    std::error_code ec;
    std::filesystem::rename(tmp, path, ec);
    if (ec) {
        std::filesystem::remove(tmp);
        throw ConfigurationError(path.string() + ": cannot rename into place: " + ec.message());
    }
}

inline std::string read_file(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ConfigurationError(path.string() + ": cannot read");
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

inline std::string grid_bytes(const OccupancyGrid& g) {
    std::ostringstream os(std::ios::binary);
    write_grid(os, g);
    return os.str();
}

inline std::string ply_bytes(const BoundaryMesh& m) {
    std::ostringstream os(std::ios::binary);
    write_ply(os, m);
    return os.str();
}

/// Memory plus disk cache of artifact bytes. An empty directory keeps the
/// cache in memory only. Safe for concurrent use; concurrent misses on one
/// key may compute it twice but always store identical bytes.
class ArtifactCache {
public:
    explicit ArtifactCache(std::filesystem::path dir = {}) : dir_(std::move(dir)) {
        if (!dir_.empty()) std::filesystem::create_directories(dir_);
    }

    std::shared_ptr<const std::string> get(const std::string& name, const std::function<std::string()>& make) {
        {
            std::lock_guard lock(mutex_);
            if (auto it = memory_.find(name); it != memory_.end()) return it->second;
        }
        std::shared_ptr<const std::string> bytes;
        const auto path = dir_ / name;
        if (!dir_.empty() && std::filesystem::exists(path)) {
            bytes = std::make_shared<const std::string>(read_file(path));
        } else {
            bytes = std::make_shared<const std::string>(make());
            ++computed_;
            if (!dir_.empty()) write_file_atomic(path, *bytes);
        }
        std::lock_guard lock(mutex_);
        return memory_.emplace(name, bytes).first->second;
    }

    std::size_t computed() const { return computed_; }
    const std::filesystem::path& dir() const { return dir_; }

private:
    std::filesystem::path dir_;
    std::mutex mutex_;
    std::map<std::string, std::shared_ptr<const std::string>> memory_;
    std::atomic<std::size_t> computed_{0};
};

}  // namespace sabd
