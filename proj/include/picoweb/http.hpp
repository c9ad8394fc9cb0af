#pragma once

#include <any>
#include <array>
#include <cctype>
#include <functional>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <variant>
#include <vector>

#include "json.hpp"

namespace picoweb {

/// The eight verbs of the registration API plus OPTIONS (needed for CORS
/// preflight). The enumerator value doubles as the verb code used in route
/// keys.
enum class HttpVerb : int {
    GET = 1,
    POST = 2,
    PUT = 3,
    DELETE = 4,
    CONNECT = 5,
    TRACE = 6,
    HEAD = 7,
    PATCH = 8,
    OPTIONS = 9,
};

inline constexpr std::array<HttpVerb, 9> kAllVerbs = {
    HttpVerb::GET,     HttpVerb::POST,  HttpVerb::PUT,
    HttpVerb::DELETE,  HttpVerb::CONNECT, HttpVerb::TRACE,
    HttpVerb::HEAD,    HttpVerb::PATCH, HttpVerb::OPTIONS,
};

constexpr int verb_code(HttpVerb verb) { return static_cast<int>(verb); }

constexpr std::string_view verb_name(HttpVerb verb) {
    switch (verb) {
    case HttpVerb::GET: return "GET";
    case HttpVerb::POST: return "POST";
    case HttpVerb::PUT: return "PUT";
    case HttpVerb::DELETE: return "DELETE";
    case HttpVerb::CONNECT: return "CONNECT";
    case HttpVerb::TRACE: return "TRACE";
    case HttpVerb::HEAD: return "HEAD";
    case HttpVerb::PATCH: return "PATCH";
    case HttpVerb::OPTIONS: return "OPTIONS";
    }
    return "GET";
}

/// Wire-format verb names are case-sensitive.
inline std::optional<HttpVerb> verb_from_name(std::string_view name) {
    for (HttpVerb verb : kAllVerbs) {
        if (verb_name(verb) == name) {
            return verb;
        }
    }
    return std::nullopt;
}

inline bool iequals(std::string_view a, std::string_view b) {
    if (a.size() != b.size()) {
        return false;
    }
    for (std::size_t i = 0; i < a.size(); ++i) {
        if (std::tolower(static_cast<unsigned char>(a[i])) !=
            std::tolower(static_cast<unsigned char>(b[i]))) {
            return false;
        }
    }
    return true;
}

inline std::string to_lower(std::string_view text) {
    std::string out(text);
    for (char& c : out) {
        c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
    }
    return out;
}

inline std::string_view trim_ows(std::string_view s) {
    while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) {
        s.remove_prefix(1);
    }
    while (!s.empty() && (s.back() == ' ' || s.back() == '\t')) {
        s.remove_suffix(1);
    }
    return s;
}

/// Ordered header list with case-insensitive name lookup. Stored names keep
/// their original casing.
class HeaderMap {
public:
    using Entry = std::pair<std::string, std::string>;

    void add(std::string name, std::string value) {
        entries_.emplace_back(std::move(name), std::move(value));
    }

    /// Replaces every entry of `name` with a single one.
    void set(std::string name, std::string value) {
        std::erase_if(entries_, [&](const Entry& e) { return iequals(e.first, name); });
        add(std::move(name), std::move(value));
    }

    bool contains(std::string_view name) const {
        return static_cast<bool>(get(name));
    }

    /// First value stored under `name`, if any.
    std::optional<std::string> get(std::string_view name) const {
        for (const Entry& e : entries_) {
            if (iequals(e.first, name)) {
                return e.second;
            }
        }
        return std::nullopt;
    }

    std::vector<std::string> get_all(std::string_view name) const {
        std::vector<std::string> out;
        for (const Entry& e : entries_) {
            if (iequals(e.first, name)) {
                out.push_back(e.second);
            }
        }
        return out;
    }

    const std::vector<Entry>& entries() const { return entries_; }
    std::size_t size() const { return entries_.size(); }
    bool empty() const { return entries_.empty(); }

    auto begin() const { return entries_.begin(); }
    auto end() const { return entries_.end(); }

private:
    std::vector<Entry> entries_;
};

/// Request body: raw text by default, a parsed value tree once a registered
/// body parser has succeeded.
class BodyPayload {
public:
    BodyPayload() : value_(std::string()) {}

    static BodyPayload raw(std::string text) {
        BodyPayload p;
        p.value_ = std::move(text);
        return p;
    }

    static BodyPayload parsed(nlohmann::json value) {
        BodyPayload p;
        p.value_ = std::move(value);
        return p;
    }

    bool is_parsed() const { return std::holds_alternative<nlohmann::json>(value_); }

    const std::string& text() const { return std::get<std::string>(value_); }
    const nlohmann::json& json() const { return std::get<nlohmann::json>(value_); }

private:
    std::variant<std::string, nlohmann::json> value_;
};

using Params = std::map<std::string, std::string>;

struct Request {
    HttpVerb verb = HttpVerb::GET;
    std::string path;      // normalized
    std::string raw_query; // text after "?", possibly empty
    std::map<std::string, std::string> query;
    HeaderMap headers;
    Params params;         // filled by the router at dispatch
    BodyPayload body;
    std::map<std::string, std::any> attachments; // filled by middleware
};

struct Response {
    int status = 200;
    HeaderMap headers;
    std::string body;

    Response() = default;
    Response(int status, std::string body) : status(status), body(std::move(body)) {}
    Response(int status, std::string body, std::string content_type)
        : status(status), body(std::move(body)) {
        headers.add("Content-Type", std::move(content_type));
    }
};

using Handler = std::function<Response(const Request&)>;

inline std::string_view reason_phrase(int status) {
    switch (status) {
    case 100: return "Continue";
    case 101: return "Switching Protocols";
    case 200: return "OK";
    case 201: return "Created";
    case 202: return "Accepted";
    case 204: return "No Content";
    case 206: return "Partial Content";
    case 301: return "Moved Permanently";
    case 302: return "Found";
    case 303: return "See Other";
    case 304: return "Not Modified";
    case 307: return "Temporary Redirect";
    case 308: return "Permanent Redirect";
    case 400: return "Bad Request";
    case 401: return "Unauthorized";
    case 403: return "Forbidden";
    case 404: return "Not Found";
    case 405: return "Method Not Allowed";
    case 408: return "Request Timeout";
    case 409: return "Conflict";
    case 410: return "Gone";
    case 411: return "Length Required";
    case 413: return "Payload Too Large";
    case 414: return "URI Too Long";
    case 415: return "Unsupported Media Type";
    case 429: return "Too Many Requests";
    case 500: return "Internal Server Error";
    case 501: return "Not Implemented";
    case 502: return "Bad Gateway";
    case 503: return "Service Unavailable";
    case 504: return "Gateway Timeout";
    default: return "Unknown";
    }
}

} // namespace picoweb
