#pragma once

#include <algorithm>
#include <functional>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <variant>
#include <vector>

#include "json.hpp"
#include "picoweb/errors.hpp"
#include "picoweb/http.hpp"
#include "picoweb/router.hpp"

namespace picoweb {

struct CorsConfig {
    std::string allow_origins;
    std::string allow_headers;
    std::string allow_methods;
    std::string max_age;
};

/// Turns raw body text into a generic value tree.
using BodyParser = std::function<nlohmann::json(const std::string&)>;

struct PipelineConfig {
    std::vector<std::pair<std::string, std::string>> always_headers;
    std::optional<CorsConfig> cors;
    std::map<std::string, BodyParser> parsers; // keyed by bare lower-case media type
};

/// Appends the pairs; cumulative across calls, applied in call order.
inline void headers_always(PipelineConfig& config,
                           const std::vector<std::pair<std::string, std::string>>& pairs) {
    config.always_headers.insert(config.always_headers.end(), pairs.begin(), pairs.end());
}

/// Adds each always-header the response does not already carry (by
/// case-insensitive name); handler-set headers win.
inline Response apply_always_headers(const PipelineConfig& config, Response response) {
    for (const auto& [name, value] : config.always_headers) {
        if (!response.headers.contains(name)) {
            response.headers.add(name, value);
        }
    }
    return response;
}

/// Records the CORS settings; route synthesis happens at freeze time via
/// synthesize_preflight_routes. Calling again replaces the configuration.
inline void use_cors(PipelineConfig& config, CorsConfig cors) {
    if (cors.allow_origins.empty() || cors.allow_headers.empty() ||
        cors.allow_methods.empty() || cors.max_age.empty()) {
        throw ConfigError("all four CORS fields must be non-empty");
    }
    config.cors = std::move(cors);
}

inline Handler make_preflight_handler(const CorsConfig& cors) {
    return [cors](const Request&) {
        Response r(204, "");
        r.headers.add("Access-Control-Allow-Origin", cors.allow_origins);
        r.headers.add("Access-Control-Allow-Headers", cors.allow_headers);
        r.headers.add("Access-Control-Allow-Methods", cors.allow_methods);
        r.headers.add("Access-Control-Max-Age", cors.max_age);
        return r;
    };
}

/// Freeze-time half of use_cors: an OPTIONS route per distinct registered
/// pattern (skipping patterns that already have one), and the Allow-Origin
/// header joins the always-headers so non-preflight responses carry it too.
inline void synthesize_preflight_routes(RouteTable& table, PipelineConfig& config) {
    if (!config.cors) {
        return;
    }
    const CorsConfig& cors = *config.cors;
    // copies, not pointers: the inserts below may grow the source buckets
    std::vector<PathPattern> patterns;
    std::vector<std::string> seen;
    for (const RouteEntry* entry : table.entries_by_ordinal()) {
        const std::string& raw = entry->pattern.raw;
        if (std::find(seen.begin(), seen.end(), raw) == seen.end()) {
            seen.push_back(raw);
            patterns.push_back(entry->pattern);
        }
    }
    for (PathPattern& pattern : patterns) {
        if (!table.has_route(HttpVerb::OPTIONS, pattern.raw)) {
            table.insert(HttpVerb::OPTIONS, std::move(pattern), make_preflight_handler(cors));
        }
    }
    config.always_headers.emplace_back("Access-Control-Allow-Origin", cors.allow_origins);
}

/// Registers `parser` for a bare lower-case media type; re-registration
/// replaces.
inline void register_body_parser(PipelineConfig& config, std::string_view content_type,
                                 BodyParser parser) {
    if (content_type.empty() || content_type.find('/') == std::string_view::npos ||
        content_type.find(';') != std::string_view::npos ||
        content_type.find(' ') != std::string_view::npos ||
        content_type.find('\t') != std::string_view::npos) {
        throw ConfigError("malformed media type '" + std::string(content_type) + "'");
    }
    config.parsers[to_lower(content_type)] = std::move(parser);
}

namespace detail {

/// "application/json; charset=utf-8" -> "application/json"
inline std::string bare_media_type(std::string_view header_value) {
    std::size_t semi = header_value.find(';');
    return to_lower(trim_ows(header_value.substr(0, semi)));
}

} // namespace detail

/// RawText unless a parser is registered for the (parameter-stripped,
/// lower-cased) content type; a parser that throws becomes a BodyParseError,
/// which dispatch answers with 400.
inline BodyPayload parse_body(const PipelineConfig& config,
                              const std::optional<std::string>& content_type_header,
                              std::string raw) {
    if (!content_type_header) {
        return BodyPayload::raw(std::move(raw));
    }
    auto parser = config.parsers.find(detail::bare_media_type(*content_type_header));
    if (parser == config.parsers.end()) {
        return BodyPayload::raw(std::move(raw));
    }
    try {
        return BodyPayload::parsed(parser->second(raw));
    } catch (const std::exception& e) {
        throw BodyParseError(e.what());
    }
}

/// What a middleware returns: pass the (possibly augmented) request onward,
/// or answer immediately and skip the rest of the chain and the handler.
class Outcome {
public:
    static Outcome proceed(Request req) { return Outcome(std::move(req)); }
    static Outcome short_circuit(Response resp) { return Outcome(std::move(resp)); }

    bool is_short_circuit() const { return std::holds_alternative<Response>(value_); }
    Request&& take_request() { return std::move(std::get<Request>(value_)); }
    Response&& take_response() { return std::move(std::get<Response>(value_)); }

private:
    explicit Outcome(Request req) : value_(std::move(req)) {}
    explicit Outcome(Response resp) : value_(std::move(resp)) {}

    std::variant<Request, Response> value_;
};

using Middleware = std::function<Outcome(Request)>;

/// Runs the chain in order before the handler. An empty chain returns the
/// handler unchanged.
inline Handler wrap_with_middleware(Handler handler, std::vector<Middleware> chain) {
    if (chain.empty()) {
        return handler;
    }
    return [handler = std::move(handler), chain = std::move(chain)](const Request& req) {
        Request current = req;
        for (const Middleware& middleware : chain) {
            Outcome outcome = middleware(std::move(current));
            if (outcome.is_short_circuit()) {
                return outcome.take_response();
            }
            current = outcome.take_request();
        }
        return handler(current);
    };
}

/// The request-to-response spine: route lookup, key-0 fallback on a miss,
/// body parsing (400 on parser failure), the matched handler, always-headers
/// on whatever comes out. Handler and middleware failures propagate; the wire
/// layer maps them to 500.
inline Response dispatch(const RouteTable& table, const PipelineConfig& config, Request req) {
    std::optional<MatchResult> match = table.lookup(req.verb, req.path);
    if (!match) {
        return apply_always_headers(config, table.not_found()(req));
    }
    req.params = std::move(match->params);
    try {
        std::string raw = req.body.is_parsed() ? std::string() : req.body.text();
        req.body = parse_body(config, req.headers.get("Content-Type"), std::move(raw));
    } catch (const BodyParseError& e) {
        return apply_always_headers(config, Response(400, e.what()));
    }
    return apply_always_headers(config, match->handler()(req));
}

} // namespace picoweb
