#pragma once

#include <cstdint>
#include <filesystem>
#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "picoweb/errors.hpp"
#include "picoweb/http.hpp"
#include "picoweb/pipeline.hpp"
#include "picoweb/router.hpp"
#include "picoweb/staticfs.hpp"
#include "picoweb/wire.hpp"

namespace picoweb {

using TlsConfig = std::pair<std::string, std::string>; // certificate path, key path

/// The public facade. Two-phase lifecycle: every configuring call happens
/// before start(); start() freezes the table and pipeline (synthesizing CORS
/// preflight routes) and serves until stop().
class App {
public:
    App() = default;
    App(const App&) = delete;
    App& operator=(const App&) = delete;
    ~App() { stop(); }

    // ---- route registration (setup phase) ----

    void register_route(HttpVerb verb, std::string_view pattern_text, Handler handler,
                        std::vector<Middleware> middleware = {}) {
        require_setup();
        PathPattern pattern = parse_pattern(normalize_path(pattern_text));
        table_.insert(verb, std::move(pattern),
                      wrap_with_middleware(std::move(handler), std::move(middleware)));
    }

    void Get(std::string_view pattern, Handler h, std::vector<Middleware> mw = {}) {
        register_route(HttpVerb::GET, pattern, std::move(h), std::move(mw));
    }
    void Post(std::string_view pattern, Handler h, std::vector<Middleware> mw = {}) {
        register_route(HttpVerb::POST, pattern, std::move(h), std::move(mw));
    }
    void Put(std::string_view pattern, Handler h, std::vector<Middleware> mw = {}) {
        register_route(HttpVerb::PUT, pattern, std::move(h), std::move(mw));
    }
    void Delete(std::string_view pattern, Handler h, std::vector<Middleware> mw = {}) {
        register_route(HttpVerb::DELETE, pattern, std::move(h), std::move(mw));
    }
    void Connect(std::string_view pattern, Handler h, std::vector<Middleware> mw = {}) {
        register_route(HttpVerb::CONNECT, pattern, std::move(h), std::move(mw));
    }
    void Trace(std::string_view pattern, Handler h, std::vector<Middleware> mw = {}) {
        register_route(HttpVerb::TRACE, pattern, std::move(h), std::move(mw));
    }
    void Head(std::string_view pattern, Handler h, std::vector<Middleware> mw = {}) {
        register_route(HttpVerb::HEAD, pattern, std::move(h), std::move(mw));
    }
    void Patch(std::string_view pattern, Handler h, std::vector<Middleware> mw = {}) {
        register_route(HttpVerb::PATCH, pattern, std::move(h), std::move(mw));
    }

    /// Replaces the key-0 fallback (default: 404 "Not found").
    void not_found(Handler handler) {
        require_setup();
        table_.set_not_found(std::move(handler));
    }

    // ---- pipeline configuration (setup phase) ----

    void headers_always(const std::vector<std::pair<std::string, std::string>>& pairs) {
        require_setup();
        picoweb::headers_always(pipeline_, pairs);
    }

    void use_cors(CorsConfig cors) {
        require_setup();
        picoweb::use_cors(pipeline_, std::move(cors));
    }

    void body_parser(std::string_view content_type, BodyParser parser) {
        require_setup();
        register_body_parser(pipeline_, content_type, std::move(parser));
    }

    // ---- static files ----

    void webroot(const std::filesystem::path& dir) {
        require_setup();
        set_webroot(statics_, dir);
    }

    /// Contents of a file under the webroot, for use inside handlers.
    std::string file_contents(std::string_view rel) const {
        return picoweb::file_contents(statics_, rel);
    }

    /// Registers GET routes for the files currently under the webroot that
    /// pass `filter_text` ("*" or "ext|ext|..."). Returns how many were added.
    std::size_t expose_files(std::string_view filter_text) {
        require_setup();
        return picoweb::expose_files(statics_, parse_filter(filter_text), table_);
    }

    // ---- server lifecycle ----

    /// Freezes configuration and serves until stop() is called from another
    /// thread or control path. Defaults mirror ServerConfig: 127.0.0.1:8086.
    void start(const std::string& host = "127.0.0.1", std::uint16_t port = 8086,
               std::optional<TlsConfig> tls = std::nullopt) {
        start_async(host, port, std::move(tls));
        server_->wait();
    }

    /// start() without the blocking wait; pair with stop().
    void start_async(const std::string& host = "127.0.0.1", std::uint16_t port = 8086,
                     std::optional<TlsConfig> tls = std::nullopt) {
        require_setup();
        if (tls) {
            throw UnsupportedError("TLS transport is not implemented");
        }
        freeze();
        ServerConfig config{host, port, std::nullopt};
        server_ = std::make_unique<Server>(std::move(config), [this](Request req) {
            return dispatch(table_, pipeline_, std::move(req));
        });
        server_->start(); // throws StartupError without leaving setup phase
        phase_ = Phase::Running;
    }

    void stop() {
        if (server_) {
            server_->stop();
        }
    }

    void wait() {
        if (server_) {
            server_->wait();
        }
    }

    bool running() const { return phase_ == Phase::Running; }
    std::uint16_t port() const { return server_ ? server_->port() : 0; }

    const RouteTable& table() const { return table_; }
    const PipelineConfig& pipeline() const { return pipeline_; }
    const StaticConfig& statics() const { return statics_; }

private:
    enum class Phase { Setup, Running };

    void require_setup() const {
        if (phase_ != Phase::Setup) {
            throw PhaseError("configuration is frozen once the server has started");
        }
    }

    void freeze() {
        if (!frozen_) {
            synthesize_preflight_routes(table_, pipeline_);
            frozen_ = true;
        }
    }

    RouteTable table_;
    PipelineConfig pipeline_;
    StaticConfig statics_;
    Phase phase_ = Phase::Setup;
    bool frozen_ = false;
    std::unique_ptr<Server> server_;
};

} // namespace picoweb
