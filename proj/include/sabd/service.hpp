#pragma once

// HTTP/JSON service over the toolkit. The wire format is described in README.md.

#include <chrono>
#include <condition_variable>
#include <map>
#include <memory>
#include <mutex>
#include <random>
#include <string>
#include <thread>

#include <sys/socket.h>

#include <nlohmann/json.hpp>

#include "sabd/artifacts.hpp"
#include "sabd/hand_description.hpp"
#include "sabd/messages.hpp"

#include <httplib.h>

namespace sabd {

inline constexpr const char* kServiceSchema = "sabd.service/1";

struct ServiceConfig {
    std::string host = "127.0.0.1";
    int port = 8765;                  // 0 picks a free port
    std::string model_path;           // empty or "sabd_default": bundled description
    std::string cache_dir;            // empty: memory only
    double session_timeout = 300.0;   // s of inactivity before a session is dropped
    bool precompute = false;          // build every workspace artifact at startup
    WorkspaceParams workspace;
    DisturbanceProtocolConfig protocol;  // defaults for grasp requests
};

namespace detail {

inline int http_status(const std::string& code) {
    if (code == "unknown_session" || code == "unknown_digit" || code == "not_found") return 404;
    if (code == "internal_error") return 500;
    return 400;
}

inline nlohmann::json error_payload(const std::string& code, const std::string& message) {
    return {{"schema", kServiceSchema}, {"error", {{"code", code}, {"message", message}}}};
}

}  // namespace detail

/// Request handling without the transport; every method takes and returns
/// schema-tagged JSON messages.
class ServiceCore {
public:
    using Clock = std::chrono::steady_clock;

    explicit ServiceCore(ServiceConfig cfg)
        : cfg_(std::move(cfg)), model_(load_hand(cfg_.model_path)), cache_(cfg_.cache_dir) {
        validate(cfg_.workspace);
        validate_protocol(cfg_.protocol);
        if (!(cfg_.session_timeout > 0)) throw ValidationError("session timeout must be > 0");
        std::random_device rd;
        id_prefix_ = std::to_string(rd() % 1000000);
    }

    const HandModelPtr& model() const { return model_; }
    const ServiceConfig& config() const { return cfg_; }
    ArtifactCache& cache() { return cache_; }

    nlohmann::json model_info() const {
        nlohmann::json dofs = nlohmann::json::array();
        for (std::size_t i = 0; i < model_->dof_count(); ++i) {
            const auto& lim = model_->limits(i);
            dofs.push_back({{"name", model_->neutral_vector().name(i)}, {"lo", lim.lo}, {"hi", lim.hi}, {"neutral", model_->neutral(i)}});
        }
        return tagged({{"model_id", model_->id()}, {"name", model_->name()}, {"dofs", dofs},
                       {"description", to_json(model_->description())}});
    }

    nlohmann::json fk(const nlohmann::json& req) const {
        check_schema(req);
        const auto q = joint_vector_from_json(*model_, req.contains("q") ? req.at("q") : nlohmann::json::object());
        auto out = to_json(forward_kinematics(*model_, q));
        out["model_id"] = model_->id();
        return tagged(std::move(out));
    }

    nlohmann::json open_session(const nlohmann::json& req) {
        check_schema(req);
        auto cfg = retarget_config_from_json(*model_, req.contains("config") ? req.at("config") : nlohmann::json());
        auto s = std::make_shared<Session>(model_, std::move(cfg));
        sweep();
        std::lock_guard lock(sessions_mutex_);
        const std::string id = "s" + id_prefix_ + "-" + std::to_string(++next_session_);
        s->last = Clock::now();
        sessions_.emplace(id, s);
        return tagged({{"session_id", id}, {"config", to_json(s->session.config())}});
    }

    /// Frames in order; outputs equal RetargetSession::step on the same frames.
    nlohmann::json stream(const std::string& id, const nlohmann::json& req) {
        check_schema(req);
        std::vector<KeypointFrame> frames;
        if (req.contains("frame")) frames.push_back(keypoint_frame_from_json(req.at("frame")));
        if (req.contains("frames")) {
            if (!req.at("frames").is_array()) throw ParseError("frames: expected an array");
            for (std::size_t i = 0; i < req.at("frames").size(); ++i)
                frames.push_back(keypoint_frame_from_json(req.at("frames")[i], "frames[" + std::to_string(i) + "]"));
        }
        auto s = session(id);
        std::lock_guard lock(s->mutex);
        nlohmann::json results = nlohmann::json::array();
        nlohmann::json compute = nlohmann::json::array();
        for (const auto& f : frames) {
            const auto t0 = Clock::now();
            const auto r = s->session.step(f);
            compute.push_back(std::chrono::duration<double, std::milli>(Clock::now() - t0).count());
            results.push_back(to_json(r));
        }
        s->last = Clock::now();
        return tagged({{"session_id", id}, {"results", results}, {"compute_ms", compute}});
    }

    nlohmann::json update_session(const std::string& id, const nlohmann::json& req) {
        check_schema(req);
        auto s = session(id);
        std::lock_guard lock(s->mutex);
        if (req.value("reset", false)) s->session.reset();
        if (req.contains("abduction_gain")) s->session.set_gain(detail::number(req.at("abduction_gain"), "abduction_gain"));
        s->last = Clock::now();
        return tagged({{"session_id", id}, {"config", to_json(s->session.config())}});
    }

    nlohmann::json close_session(const std::string& id) {
        std::lock_guard lock(sessions_mutex_);
        if (sessions_.erase(id) == 0) throw SessionError("unknown session '" + id + "'");
        return tagged({{"closed", id}});
    }

    nlohmann::json list_sessions() {
        sweep();
        std::lock_guard lock(sessions_mutex_);
        nlohmann::json ids = nlohmann::json::array();
        for (const auto& [id, s] : sessions_) ids.push_back(id);
        return tagged({{"sessions", ids}});
    }

    /// Drops sessions idle for longer than the timeout.
    std::size_t sweep() {
        const auto limit = std::chrono::duration<double>(cfg_.session_timeout);
        const auto now = Clock::now();
        std::lock_guard lock(sessions_mutex_);
        std::size_t dropped = 0;
        for (auto it = sessions_.begin(); it != sessions_.end();) {
            std::unique_lock busy(it->second->mutex, std::try_to_lock);
            if (busy.owns_lock() && now - it->second->last > limit) {
                busy.unlock();
                it = sessions_.erase(it);
                ++dropped;
            } else {
                ++it;
            }
        }
        return dropped;
    }

    std::size_t session_count() {
        std::lock_guard lock(sessions_mutex_);
        return sessions_.size();
    }

    struct Artifact {
        std::shared_ptr<const std::string> bytes;
        std::string content_type;
        std::string name;
    };

    /// kind "workspace" (digits 1..5) or "nullspace" (2..5); format grid, ply or json.
    Artifact artifact(const std::string& kind, const std::string& digit_text, const std::string& rom_text,
                      const std::string& format, const std::string& smoothing_text) {
        const int digit = parse_digit(digit_text, kind == "nullspace" ? 2 : 1);
        const auto rom = parse_rom_variant(rom_text.empty() ? "full" : rom_text);
        const auto smoothing = parse_smoothing(smoothing_text.empty() ? "none" : smoothing_text);
        const auto key = artifact_key(*model_, kind, digit, rom, cfg_.workspace);
        auto grid = [&] {
            return cache_.get(key + ".grid", [&] {
                return grid_bytes(kind == "nullspace" ? nullspace_grid(*model_, digit, cfg_.workspace, rom)
                                                      : digit_grid(*model_, digit, cfg_.workspace, rom));
            });
        };
        if (format == "grid" || format.empty()) return {grid(), "application/octet-stream", key + ".grid"};
        if (format == "ply") {
            const auto name = key + "_" + to_string(smoothing) + ".ply";
            auto bytes = cache_.get(name, [&] {
                std::istringstream is(*grid(), std::ios::binary);
                return ply_bytes(extract_boundary(read_grid(is), smoothing));
            });
            return {bytes, "application/octet-stream", name};
        }
        if (format == "json") {
            std::istringstream is(*grid(), std::ios::binary);
            const auto g = read_grid(is);
            const auto body = tagged({{"kind", kind},
                                      {"digit", digit},
                                      {"rom", to_string(rom)},
                                      {"key", key},
                                      {"resolution_mm", g.resolution()},
                                      {"voxels", g.count()},
                                      {"volume_mm3", g.volume()},
                                      {"samples", cfg_.workspace.samples},
                                      {"seed", cfg_.workspace.seed}})
                                  .dump();
            return {std::make_shared<const std::string>(body), "application/json", key + ".json"};
        }
        throw ValidationError("unknown artifact format '" + format + "' (expected grid, ply or json)");
    }

    void precompute_all() {
        for (const char* rom : {"full", "restricted"}) {
            for (int d = 1; d <= kDigitCount; ++d) artifact("workspace", std::to_string(d), rom, "grid", "");
            for (int d = 2; d <= kDigitCount; ++d) artifact("nullspace", std::to_string(d), rom, "grid", "");
        }
    }

    /// Sphere grasp plus its resistance summary under the protocol.
    nlohmann::json grasp(const nlohmann::json& req) const {
        check_schema(req);
        const double diameter = detail::number(detail::member(req, "diameter", "grasp"), "diameter");
        const bool combined = req.value("combined_abd", true);
        DisturbanceProtocolConfig cfg = cfg_.protocol;
        cfg.sphere_diameters = {diameter};
        if (req.contains("palm_tilt")) cfg.palm_tilt = detail::number(req.at("palm_tilt"), "palm_tilt");
        if (req.contains("force_range")) {
            const auto& r = req.at("force_range");
            if (!r.is_array() || r.size() != 2) throw ParseError("force_range: expected [lo, hi]");
            cfg.force_lo = detail::number(r[0], "force_range[0]");
            cfg.force_hi = detail::number(r[1], "force_range[1]");
        }
        if (req.contains("episodes")) cfg.episodes = static_cast<int>(detail::number(req.at("episodes"), "episodes"));
        if (req.contains("seed")) cfg.seed = static_cast<std::uint64_t>(detail::number(req.at("seed"), "seed"));
        if (!(diameter > 0) || !std::isfinite(diameter)) throw PreconditionError("sphere diameter must be > 0");
        validate_protocol(cfg);
        const auto g = synthesize_sphere_grasp(model_, diameter, combined, cfg.palm_tilt, cfg.grasp);
        const auto run = run_disturbance_protocol(std::vector<SphereGrasp>{g}, cfg, combined);
        const auto& s = run.summary.front();
        return tagged({{"grasp", to_json(g)},
                       {"resistance",
                        {{"strength_n", detail::worst_case_strength(g.contacts)},
                         {"force_range_n", {cfg.force_lo, cfg.force_hi}},
                         {"episodes", cfg.episodes},
                         {"seed", cfg.seed},
                         {"success_rate", s.success_rate},
                         {"mean_score", s.mean_score}}}});
    }

    static nlohmann::json tagged(nlohmann::json j) {
        j["schema"] = kServiceSchema;
        return j;
    }

    static void check_schema(const nlohmann::json& req) {
        if (!req.is_object()) throw ParseError("request body must be a JSON object");
        if (!req.contains("schema")) throw ValidationError("request is missing 'schema'");
        if (req.at("schema") != kServiceSchema)
            throw ValidationError("unsupported schema " + req.at("schema").dump() + " (expected " + kServiceSchema + ")");
    }

private:
    struct Session {
        Session(HandModelPtr m, RetargetConfig c) : session(std::move(m), std::move(c)) {}
        std::mutex mutex;
        RetargetSession session;
        Clock::time_point last;
    };

    std::shared_ptr<Session> session(const std::string& id) {
        sweep();
        std::lock_guard lock(sessions_mutex_);
        auto it = sessions_.find(id);
        if (it == sessions_.end()) throw SessionError("unknown session '" + id + "'");
        return it->second;
    }

    static int parse_digit(const std::string& text, int lo) {
        int d = 0;
        try {
            std::size_t used = 0;
            d = std::stoi(text, &used);
            if (used != text.size()) d = 0;
        } catch (const std::exception&) {
            d = 0;
        }
        if (d < lo || d > kDigitCount) throw Error("unknown_digit", "unknown digit '" + text + "'");
        return d;
    }

    ServiceConfig cfg_;
    HandModelPtr model_;
    ArtifactCache cache_;
    std::mutex sessions_mutex_;
    std::map<std::string, std::shared_ptr<Session>> sessions_;
    std::uint64_t next_session_ = 0;
    std::string id_prefix_;
};

/// The HTTP transport: binds on start(), serves on a background thread.
class Service {
public:
    explicit Service(ServiceConfig cfg) : core_(std::move(cfg)) { routes(); }
    ~Service() { stop(); }
    Service(const Service&) = delete;
    Service& operator=(const Service&) = delete;

    void start() {
        if (core_.config().precompute) core_.precompute_all();
        // SO_REUSEADDR only, so a port already in use fails to bind
        server_.set_socket_options([](socket_t sock) {
            int yes = 1;
            setsockopt(sock, SOL_SOCKET, SO_REUSEADDR, &yes, sizeof yes);
        });
        const auto& c = core_.config();
        if (c.port == 0) {
            port_ = server_.bind_to_any_port(c.host);
            if (port_ < 0) throw StartupError("cannot bind " + c.host);
        } else {
            if (!server_.bind_to_port(c.host, c.port)) throw StartupError("port " + std::to_string(c.port) + " is busy or unavailable");
            port_ = c.port;
        }
        listener_ = std::thread([this] { server_.listen_after_bind(); });
        sweeper_ = std::thread([this] {
            const auto period = std::chrono::duration<double>(std::clamp(core_.config().session_timeout / 4, 0.02, 5.0));
            std::unique_lock lock(stop_mutex_);
            while (!stopping_) {
                stop_cv_.wait_for(lock, period);
                if (!stopping_) core_.sweep();
            }
        });
        server_.wait_until_ready();
    }

    void stop() {
        {
            std::lock_guard lock(stop_mutex_);
            stopping_ = true;
        }
        stop_cv_.notify_all();
        server_.stop();
        if (listener_.joinable()) listener_.join();
        if (sweeper_.joinable()) sweeper_.join();
    }

    int port() const { return port_; }
    ServiceCore& core() { return core_; }

private:
    template <class F>
    static void respond(httplib::Response& res, F&& f) {
        try {
            res.set_content(f().dump(), "application/json");
        } catch (const Error& e) {
            res.status = detail::http_status(e.code());
            res.set_content(detail::error_payload(e.code(), e.what()).dump(), "application/json");
        } catch (const nlohmann::json::exception& e) {
            res.status = 400;
            res.set_content(detail::error_payload("parse_error", e.what()).dump(), "application/json");
        } catch (const std::exception& e) {
            res.status = 500;
            res.set_content(detail::error_payload("internal_error", e.what()).dump(), "application/json");
        }
    }

    static nlohmann::json body(const httplib::Request& req) {
        try {
            return nlohmann::json::parse(req.body);
        } catch (const nlohmann::json::parse_error& e) {
            throw ParseError(std::string("malformed JSON: ") + e.what());
        }
    }

    static std::string param(const httplib::Request& req, const char* key) {
        return req.has_param(key) ? req.get_param_value(key) : std::string();
    }

    void routes() {
        using httplib::Request;
        using httplib::Response;
        server_.Get("/v1/model", [this](const Request&, Response& res) { respond(res, [&] { return core_.model_info(); }); });
        server_.Post("/v1/fk", [this](const Request& req, Response& res) { respond(res, [&] { return core_.fk(body(req)); }); });
        server_.Get("/v1/sessions", [this](const Request&, Response& res) { respond(res, [&] { return core_.list_sessions(); }); });
        server_.Post("/v1/sessions",
                     [this](const Request& req, Response& res) { respond(res, [&] { return core_.open_session(body(req)); }); });
        server_.Post(R"(/v1/sessions/([^/]+)/frames)", [this](const Request& req, Response& res) {
            respond(res, [&] { return core_.stream(req.matches[1], body(req)); });
        });
        server_.Post(R"(/v1/sessions/([^/]+))", [this](const Request& req, Response& res) {
            respond(res, [&] { return core_.update_session(req.matches[1], body(req)); });
        });
        server_.Delete(R"(/v1/sessions/([^/]+))", [this](const Request& req, Response& res) {
            respond(res, [&] { return core_.close_session(req.matches[1]); });
        });
        auto artifact_route = [this](const std::string& kind) {
            return [this, kind](const Request& req, Response& res) {
                try {
                    const auto a = core_.artifact(kind, req.matches[1], param(req, "rom"), param(req, "format"), param(req, "smoothing"));
                    res.set_header("Content-Disposition", "attachment; filename=\"" + a.name + "\"");
                    res.set_content(*a.bytes, a.content_type);
                } catch (...) {
                    respond(res, [] () -> nlohmann::json { throw; });
                }
            };
        };
        server_.Get(R"(/v1/workspace/([^/]+))", artifact_route("workspace"));
        server_.Get(R"(/v1/nullspace/([^/]+))", artifact_route("nullspace"));
        server_.Post("/v1/grasp", [this](const Request& req, Response& res) { respond(res, [&] { return core_.grasp(body(req)); }); });
        server_.set_error_handler([](const Request& req, Response& res) {
            if (!res.body.empty()) return;
            res.set_content(detail::error_payload("not_found", "no endpoint " + req.method + " " + req.path).dump(), "application/json");
        });
    }

    ServiceCore core_;
    httplib::Server server_;
    std::thread listener_, sweeper_;
    std::mutex stop_mutex_;
    std::condition_variable stop_cv_;
    bool stopping_ = false;
    int port_ = -1;
};

}  // namespace sabd
