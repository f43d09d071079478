#include <atomic>
#include <chrono>
#include <csignal>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <thread>

#include <CLI11.hpp>

#include "sabd/artifacts.hpp"
#include "sabd/grasp.hpp"
#include "sabd/hand_description.hpp"
#include "sabd/messages.hpp"
#include "sabd/retargeting.hpp"
#include "sabd/service.hpp"

namespace fs = std::filesystem;
using nlohmann::json;
using namespace sabd;

namespace {

constexpr const char* kReportSchema = "sabd.report/1";

struct RunConfig {
    std::string model_path;
    std::string out_dir = "sabd_out";
    std::uint64_t seed = 42;
    std::size_t samples = 500000;
    double resolution = 2.0;
    bool fast = false;
    unsigned workers = 0;
    bool effective_limits = false;
};

std::atomic<bool> g_stop{false};

void on_signal(int) { g_stop = true; }

HandModelPtr load_model(const RunConfig& rc) { return load_hand(rc.model_path, {rc.effective_limits}); }

fs::path prepare_out(const RunConfig& rc) {
    const fs::path dir(rc.out_dir);
    std::error_code ec;
    fs::create_directories(dir, ec);
    if (ec || !fs::is_directory(dir)) throw ConfigurationError("output directory '" + rc.out_dir + "' cannot be created");
    const auto probe = dir / ".sabd_probe";
    if (!std::ofstream(probe)) throw ConfigurationError("output directory '" + rc.out_dir + "' is not writable");
    fs::remove(probe);
    return dir;
}

void write_json(const fs::path& path, const json& j) { write_file_atomic(path, j.dump(2) + "\n"); }

WorkspaceParams workspace_params(const RunConfig& rc, const std::vector<std::string>& rom) {
    WorkspaceParams p;
    p.samples = rc.samples;
    p.resolution = rc.resolution;
    p.seed = rc.seed;
    p.workers = rc.workers;
    for (const auto& r : rom) {
        const auto eq = r.find('='), colon = r.find(':');
        if (eq == std::string::npos || colon == std::string::npos || colon < eq)
            throw ValidationError("--rom expects joint=lo:hi, got '" + r + "'");
        Interval iv;
        try {
            iv = {std::stod(r.substr(eq + 1, colon - eq - 1)), std::stod(r.substr(colon + 1))};
        } catch (const std::exception&) {
            throw ValidationError("--rom expects joint=lo:hi, got '" + r + "'");
        }
        if (!(iv.lo <= iv.hi)) throw ValidationError("--rom " + r + ": lo > hi");
        p.rom[r.substr(0, eq)] = iv;
    }
    return p;
}

json base_report(const std::string& command, const HandModel& model, const RunConfig& rc) {
    return {{"schema", kReportSchema}, {"command", command}, {"model_id", model.id()}, {"seed", rc.seed}};
}

json grid_summary(const OccupancyGrid& g) { return {{"voxels", g.count()}, {"volume_mm3", g.volume()}}; }

json mesh_summary(const BoundaryMesh& m) {
    return {{"vertices", m.vertices.size()}, {"triangles", m.triangles.size()}, {"watertight", m.watertight},
            {"enclosed_volume_mm3", enclosed_volume(m)}};
}

// -- workspace ----------------------------------------------------------------------

struct WorkspaceArgs {
    std::vector<int> digits{1, 2, 3, 4, 5};
    std::string study;
    std::string smoothing = "none";
    double restricted_width = 0.2;
    std::vector<std::string> rom;
};

int cmd_workspace(const RunConfig& rc, const WorkspaceArgs& a) {
    const auto model = load_model(rc);
    const auto out = prepare_out(rc);
    auto p = workspace_params(rc, a.rom);
    p.restricted_width = a.restricted_width;
    const auto smoothing = parse_smoothing(a.smoothing);
    if (!a.study.empty() && a.study != "abduction") throw ValidationError("unknown study '" + a.study + "' (expected abduction)");
    auto report = base_report("workspace", *model, rc);
    report["samples"] = p.samples;
    report["resolution_mm"] = p.resolution;
    report["smoothing"] = to_string(smoothing);
    json digits = json::array();
    std::map<int, OccupancyGrid> full;
    for (int d : a.digits) {
        check_digit_number(d);
        SampleOptions opt{p.rom, p.workers};
        const auto cloud = sample_workspace(*model, d, p.samples, p.seed, opt);
        const auto grid = voxelize(cloud, p.resolution);
        const auto mesh = extract_boundary(grid, smoothing);
        const std::string stem = "workspace_d" + std::to_string(d);
        save_cloud((out / (stem + ".cloud")).string(), cloud);
        save_grid((out / (stem + ".grid")).string(), grid);
        save_mesh((out / (stem + ".ply")).string(), mesh);
        digits.push_back({{"digit", d}, {"grid", grid_summary(grid)}, {"mesh", mesh_summary(mesh)}, {"files", {stem + ".cloud", stem + ".grid", stem + ".ply"}}});
        std::cout << "digit " << d << ": " << grid.count() << " voxels, " << grid.volume() << " mm^3\n";
        full.emplace(d, grid);
    }
    report["digits"] = digits;
    if (a.study == "abduction") {
        const auto restricted = restricted_branch_interval(*model, p.restricted_width);
        json rows = json::array();
        OccupancyGrid all_full, all_restricted;
        bool first = true;
        for (int d : a.digits) {
            const auto gr = digit_grid(*model, d, p, RomVariant::restricted);
            const auto& gf = full.at(d);
            const std::string stem = "workspace_d" + std::to_string(d) + "_restricted";
            save_grid((out / (stem + ".grid")).string(), gr);
            rows.push_back({{"digit", d}, {"volume_full_mm3", gf.volume()}, {"volume_restricted_mm3", gr.volume()},
                            {"ratio", gf.volume() / gr.volume()}});
            std::printf("digit %d: full/restricted volume ratio %.3f\n", d, gf.volume() / gr.volume());
            all_full = first ? gf : unite(all_full, gf);
            all_restricted = first ? gr : unite(all_restricted, gr);
            first = false;
        }
        report["study"] = {{"kind", "abduction"},
                           {"restricted_interval", {restricted.lo, restricted.hi}},
                           {"digits", rows},
                           {"combined", {{"volume_full_mm3", all_full.volume()}, {"volume_restricted_mm3", all_restricted.volume()},
                                         {"ratio", all_full.volume() / all_restricted.volume()}}}};
    }
    write_json(out / "workspace_report.json", report);
    return 0;
}

// -- nullspace ----------------------------------------------------------------------

struct NullspaceArgs {
    std::vector<int> digits{2, 3, 4, 5};
    std::string smoothing = "none";
    std::vector<std::string> rom;
};

int cmd_nullspace(const RunConfig& rc, const NullspaceArgs& a) {
    const auto model = load_model(rc);
    const auto out = prepare_out(rc);
    const auto p = workspace_params(rc, a.rom);
    const auto smoothing = parse_smoothing(a.smoothing);
    auto report = base_report("nullspace", *model, rc);
    report["samples"] = p.samples;
    report["resolution_mm"] = p.resolution;
    const auto thumb = digit_grid(*model, 1, p);
    report["thumb"] = grid_summary(thumb);
    json pairs = json::array();
    for (int d : a.digits) {
        check_digit_number(d);
        if (d == 1) throw RangeError("nullspaces pair the thumb with digits 2..5");
        const auto grid = intersect(thumb, digit_grid(*model, d, p));
        const std::string stem = "nullspace_d1_d" + std::to_string(d);
        save_grid((out / (stem + ".grid")).string(), grid);
        json row = {{"digits", {1, d}}, {"grid", grid_summary(grid)}, {"nonempty", grid.count() > 0}, {"mesh", nullptr},
                    {"files", {stem + ".grid"}}};
        if (grid.count() > 0) {
            const auto mesh = extract_boundary(grid, smoothing);
            save_mesh((out / (stem + ".ply")).string(), mesh);
            row["mesh"] = mesh_summary(mesh);
            row["files"].push_back(stem + ".ply");
        } else {
            fs::remove(out / (stem + ".ply"));
        }
        pairs.push_back(row);
        std::cout << "thumb x digit " << d << ": " << grid.count() << " voxels, " << grid.volume() << " mm^3\n";
    }
    report["pairs"] = pairs;
    write_json(out / "nullspace_report.json", report);
    return 0;
}

// -- grasp --------------------------------------------------------------------------

struct GraspArgs {
    bool max_size = false, pinch = false, protocol = false;
    int bins = 0;
    int min_contacts = 1;
    std::vector<double> diameters{70, 80, 90, 100};
    std::vector<double> force_range{0.0, 5.0};
    int episodes = 10;
    double mu = 0.8, mass = 0.1, tilt = 0.15;
    std::string abd = "both";
};

std::vector<bool> abd_flags(const std::string& s) {
    if (s == "both") return {true, false};
    if (s == "on") return {true};
    if (s == "off") return {false};
    throw ValidationError("--abd expects on, off or both");
}

json summary_json(const ProtocolResult& r) { return protocol_json(r).at("summary"); }

int cmd_grasp(const RunConfig& rc, GraspArgs a) {
    const auto model = load_model(rc);
    const auto out = prepare_out(rc);
    if (!a.max_size && !a.pinch && !a.protocol && a.bins == 0) a.max_size = a.pinch = a.protocol = true;
    if (a.force_range.size() != 2) throw ValidationError("--force-range expects lo,hi");
    if (a.bins < 0) throw ValidationError("--bins must be >= 0");
    DisturbanceProtocolConfig cfg;
    cfg.seed = rc.seed;
    cfg.episodes = a.episodes;
    cfg.sphere_diameters = a.diameters;
    cfg.force_lo = a.force_range[0];
    cfg.force_hi = a.force_range[1];
    cfg.palm_tilt = a.tilt;
    cfg.grasp.mu = a.mu;
    cfg.resistance.mass = a.mass;
    cfg.workers = rc.workers;
    validate_protocol(cfg);
    const auto flags = abd_flags(a.abd);
    auto report = base_report("grasp", *model, rc);

    if (a.pinch) {
        json rows = json::array();
        for (int d = 2; d <= 5; ++d) {
            const auto r = pinch_check(model, d);
            rows.push_back(to_json(r, d));
            std::printf("pinch thumb-digit %d: residual %.3g mm, %s\n", d, r.residual, r.achievable ? "achievable" : "not achievable");
        }
        report["pinch"] = rows;
    }
    if (a.max_size) {
        json m = json::object();
        for (bool on : {true, false}) {
            ParallelGraspOptions o;
            o.use_combined_abd = on;
            const auto g = max_parallel_grasp_distance(model, a.min_contacts, o);
            m[on ? "abduction_on" : "abduction_off"] = to_json(g);
            std::printf("max parallel grasp, abduction %s: %.1f mm\n", on ? "on " : "off", g.distance);
        }
        m["min_contacts_per_side"] = a.min_contacts;
        m["locked_is_smaller"] = m["abduction_off"]["distance_mm"].get<double>() < m["abduction_on"]["distance_mm"].get<double>();
        report["max_size"] = m;
    }
    std::map<bool, std::vector<SphereGrasp>> grasps;
    auto grasps_for = [&](bool on) -> const std::vector<SphereGrasp>& {
        auto it = grasps.find(on);
        if (it == grasps.end()) it = grasps.emplace(on, protocol_grasps(model, cfg, on)).first;
        return it->second;
    };
    if (a.protocol) {
        json p = {{"force_range_n", {cfg.force_lo, cfg.force_hi}}, {"diameters_mm", cfg.sphere_diameters}, {"episodes", cfg.episodes}};
        for (bool on : flags) {
            const auto r = run_disturbance_protocol(grasps_for(on), cfg, on);
            const std::string name = on ? "protocol_abduction_on.json" : "protocol_abduction_off.json";
            write_json(out / name, protocol_json(r));
            p[on ? "abduction_on" : "abduction_off"] = {{"summary", summary_json(r)}, {"episodes_file", name}};
            for (const auto& s : r.summary)
                std::printf("protocol abduction %s, %.0f mm: %d contacts, success %.2f, mean score %.3f\n", on ? "on " : "off", s.diameter,
                            s.contacts, s.success_rate, s.mean_score);
        }
        report["protocol"] = p;
    }
    if (a.bins > 0) {
        const auto study = run_force_bin_study(model, cfg, a.bins);
        json bins = json::array();
        for (const auto& [lo, hi] : study.bins) bins.push_back({lo, hi});
        bool ordering = true;
        json strict = json::array();
        for (std::size_t d = 0; d < study.diameters.size(); ++d) {
            bool any = false;
            for (std::size_t b = 0; b < study.bins.size(); ++b) {
                ordering = ordering && study.success[1][b][d] >= study.success[0][b][d];
                any = any || study.success[1][b][d] > study.success[0][b][d];
            }
            strict.push_back({{"diameter_mm", study.diameters[d]}, {"strict_improvement", any}});
        }
        report["force_bins"] = {{"bins_n", bins},
                                {"diameters_mm", study.diameters},
                                {"success_abduction_on", study.success[1]},
                                {"success_abduction_off", study.success[0]},
                                {"on_dominates_off", ordering},
                                {"per_diameter", strict}};
        const auto table = format_force_bin_table(study);
        write_file_atomic(out / "force_bins.txt", table);
        std::cout << table;
    }
    write_json(out / "grasp_report.json", report);
    return 0;
}

// -- retarget -----------------------------------------------------------------------

struct RetargetArgs {
    std::string input;
    std::string output;
    double gain = 1.0;
    double smoothing = 0.5;
};

int cmd_retarget(const RunConfig& rc, const RetargetArgs& a) {
    const auto model = load_model(rc);
    std::ifstream in(a.input);
    if (!in) throw ParseError(a.input + ": cannot open keypoint stream");
    const auto frames = read_keypoint_stream(in);
    auto cfg = default_retarget_config(*model);
    cfg.abduction_gain = a.gain;
    cfg.smoothing = a.smoothing;
    RetargetSession session(model, cfg);
    std::ostringstream os;
    const auto names = model->neutral_vector();
    os << "timestamp";
    for (std::size_t i = 0; i < names.size(); ++i) os << ',' << names.name(i);
    os << ",converged,energy,iterations\n";
    int converged = 0;
    for (const auto& f : frames) {
        const auto r = session.step(f);
        os << format_double(r.timestamp);
        for (std::size_t i = 0; i < r.q.size(); ++i) os << ',' << format_double(r.q[i]);
        os << ',' << (r.converged ? 1 : 0) << ',' << format_double(r.energy) << ',' << r.iterations << '\n';
        converged += r.converged;
    }
    fs::path path = a.output.empty() ? prepare_out(rc) / "trajectory.csv" : fs::path(a.output);
    write_file_atomic(path, os.str());
    std::cout << "retargeted " << frames.size() << " frames (" << converged << " converged) -> " << path.string() << "\n";
    return 0;
}

// -- serve --------------------------------------------------------------------------

struct ServeArgs {
    std::string host = "127.0.0.1";
    int port = 8765;
    std::string cache_dir;
    double session_timeout = 300.0;
    bool precompute = false;
};

int cmd_serve(const RunConfig& rc, const ServeArgs& a) {
    if (rc.model_path.empty())
        throw ConfigurationError("serve needs a model path (--model, or SABD_MODEL; use 'sabd_default' for the bundled hand)");
    ServiceConfig c;
    c.host = a.host;
    c.port = a.port;
    c.model_path = rc.model_path;
    c.cache_dir = a.cache_dir;
    c.session_timeout = a.session_timeout;
    c.precompute = a.precompute;
    c.workspace.samples = rc.samples;
    c.workspace.resolution = rc.resolution;
    c.workspace.seed = rc.seed;
    c.workspace.workers = rc.workers;
    Service service(c);
    std::signal(SIGINT, on_signal);
    std::signal(SIGTERM, on_signal);
    service.start();
    std::cout << "serving " << service.core().model()->id() << " on http://" << a.host << ":" << service.port() << std::endl;
    while (!g_stop) std::this_thread::sleep_for(std::chrono::milliseconds(100));
    service.stop();
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Kinematic, transmission, workspace, retargeting and grasp analyses for the SABD hand model."};
    app.set_config("--config", "", "TOML/INI file with option values; [section] per subcommand");
    app.require_subcommand(1);
    app.fallthrough();
    RunConfig rc;
    app.add_option("--model", rc.model_path, "hand description JSON ('sabd_default' or empty: bundled)")->envname("SABD_MODEL");
    app.add_option("--out", rc.out_dir, "output directory");
    app.add_option("--seed", rc.seed, "random seed");
    auto* samples = app.add_option("--samples", rc.samples, "workspace samples per digit")->check(CLI::PositiveNumber);
    auto* resolution = app.add_option("--resolution", rc.resolution, "voxel size (mm)")->check(CLI::PositiveNumber);
    app.add_flag("--fast", rc.fast, "5e4 samples and 4 mm voxels unless given explicitly");
    app.add_option("--workers", rc.workers, "worker threads (0: hardware concurrency)");
    app.add_flag("--effective-limits", rc.effective_limits, "apply the effective-limits overlay");

    WorkspaceArgs ws;
    auto* w = app.add_subcommand("workspace", "sample, voxelise and mesh fingertip workspaces");
    w->add_option("--digits", ws.digits, "digits (1..5)")->delimiter(',');
    w->add_option("--study", ws.study, "'abduction': full vs restricted combined-abduction ROM");
    w->add_option("--smoothing", ws.smoothing, "mesh smoothing: none or alpha_like");
    w->add_option("--restricted-width", ws.restricted_width, "restricted branch interval width (rad)");
    w->add_option("--rom", ws.rom, "joint interval override joint=lo:hi (repeatable)");

    NullspaceArgs ns;
    auto* n = app.add_subcommand("nullspace", "thumb x digit workspace intersections");
    n->add_option("--digits", ns.digits, "digits paired with the thumb (2..5)")->delimiter(',');
    n->add_option("--smoothing", ns.smoothing, "mesh smoothing: none or alpha_like");
    n->add_option("--rom", ns.rom, "joint interval override joint=lo:hi (repeatable)");

    GraspArgs ga;
    auto* g = app.add_subcommand("grasp", "pinch, maximum parallel grasp and disturbance protocol");
    g->add_flag("--max-size", ga.max_size, "maximum parallel-plate distance, abduction on and off");
    g->add_flag("--pinch", ga.pinch, "thumb opposition with digits 2..5");
    g->add_flag("--protocol", ga.protocol, "disturbance protocol over --force-range");
    g->add_option("--bins", ga.bins, "force-bin study with this many 1 N bins");
    g->add_option("--min-contacts", ga.min_contacts, "contacts per plate for --max-size");
    g->add_option("--diameters", ga.diameters, "sphere diameters (mm)")->delimiter(',');
    g->add_option("--force-range", ga.force_range, "force magnitude range lo,hi (N)")->delimiter(',')->expected(2);
    g->add_option("--episodes", ga.episodes, "episodes per diameter (seeds seed..seed+episodes-1)");
    g->add_option("--mu", ga.mu, "friction coefficient");
    g->add_option("--mass", ga.mass, "sphere mass (kg)");
    g->add_option("--tilt", ga.tilt, "palm tilt (rad)");
    g->add_option("--abd", ga.abd, "combined abduction for --protocol: on, off or both");

    RetargetArgs ra;
    auto* r = app.add_subcommand("retarget", "batch-retarget a keypoint stream file to a joint trajectory");
    r->add_option("--input", ra.input, "keypoint stream file")->required();
    r->add_option("--output", ra.output, "trajectory CSV (default <out>/trajectory.csv)");
    r->add_option("--gain", ra.gain, "abduction gain");
    r->add_option("--smoothing", ra.smoothing, "weight of the previous output in [0, 1]");

    ServeArgs sa;
    auto* s = app.add_subcommand("serve", "run the HTTP service");
    s->add_option("--host", sa.host, "bind address");
    s->add_option("--port", sa.port, "port (0: any free port)");
    s->add_option("--cache-dir", sa.cache_dir, "artifact cache directory");
    s->add_option("--session-timeout", sa.session_timeout, "idle session timeout (s)");
    s->add_flag("--precompute", sa.precompute, "build every workspace artifact at startup");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        if (e.get_exit_code() == 0) return app.exit(e);
        std::cerr << "sabd: error: usage: " << e.what() << "\n";
        return 2;
    }
    if (rc.fast) {
        if (samples->count() == 0) rc.samples = 50000;
        if (resolution->count() == 0) rc.resolution = 4.0;
    }
    try {
        if (*w) return cmd_workspace(rc, ws);
        if (*n) return cmd_nullspace(rc, ns);
        if (*g) return cmd_grasp(rc, ga);
        if (*r) return cmd_retarget(rc, ra);
        if (*s) return cmd_serve(rc, sa);
    } catch (const sabd::Error& e) {
        std::cerr << "sabd: error: " << e.code() << ": " << e.what() << "\n";
        return 1;
    } catch (const std::exception& e) {
        std::cerr << "sabd: error: " << e.what() << "\n";
        return 1;
    }
    return 1;
}
