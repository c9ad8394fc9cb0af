#pragma once

// Brute-force routing oracle: a flat scan over every registered route in
// registration order, with its own path splitting and segment matching. It
// shares nothing with the library's key/bucket/filter path so the two can
// check each other.

#include <array>
#include <cstdint>
#include <map>
#include <optional>
#include <random>
#include <regex>
#include <string>
#include <vector>

#include "picoweb/http.hpp"

namespace testsupport {

struct OracleRoute {
    picoweb::HttpVerb verb;
    std::string raw; // pattern text as registered
    std::uint64_t ordinal;
};

struct OracleResult {
    std::uint64_t ordinal;
    std::map<std::string, std::string> params;

    bool operator==(const OracleResult&) const = default;
};

inline std::vector<std::string> oracle_split(const std::string& path) {
    std::vector<std::string> out;
    std::string piece;
    for (char c : path) {
        if (c == '/') {
            if (!piece.empty()) {
                out.push_back(piece);
                piece.clear();
            }
        } else {
            piece += c;
        }
    }
    if (!piece.empty()) {
        out.push_back(piece);
    }
    return out;
}

inline std::optional<OracleResult> oracle_lookup(const std::vector<OracleRoute>& routes,
                                                 picoweb::HttpVerb verb,
                                                 const std::string& path) {
    std::vector<std::string> segments = oracle_split(path);
    for (const OracleRoute& route : routes) {
        if (route.verb != verb) {
            continue;
        }
        std::vector<std::string> pattern = oracle_split(route.raw);
        if (pattern.size() != segments.size()) {
            continue;
        }
        std::map<std::string, std::string> params;
        bool matched = true;
        for (std::size_t i = 0; i < pattern.size(); ++i) {
            const std::string& p = pattern[i];
            if (p.front() == ':') {
                params[p.substr(1)] = segments[i];
            } else if (p.size() >= 2 && p.front() == '(' && p.back() == ')') {
                std::regex re(p.substr(1, p.size() - 2));
                if (!std::regex_match(segments[i], re)) {
                    matched = false;
                    break;
                }
                params[std::to_string(i + 1)] = segments[i];
            } else if (p != segments[i]) {
                matched = false;
                break;
            }
        }
        if (matched) {
            return OracleResult{route.ordinal, std::move(params)};
        }
    }
    return std::nullopt;
}

// ---- random workload generation ----

inline const std::vector<std::string>& literal_pool() {
    static const std::vector<std::string> pool = {
        "data", "hola", "users", "api", "v1", "files", "alpha", "beta",
        "gamma", "x", "y", "static", "posts", "items", "abc", "neo",
    };
    return pool;
}

inline const std::vector<std::string>& name_pool() {
    static const std::vector<std::string> pool = {"usr", "id", "name", "slug", "key", "status"};
    return pool;
}

// regex sources paired with a sample that matches and one that does not
struct RegexSample {
    std::string source;
    std::string hit;
    std::string miss;
};

inline const std::vector<RegexSample>& regex_pool() {
    static const std::vector<RegexSample> pool = {
        {"\\w+\\d+", "abc123", "abc"},
        {"[a-z]+", "hello", "HELLO9"},
        {"\\d+", "42", "x42"},
        {"[A-Za-z]{3}", "Neo", "ne"},
    };
    return pool;
}

/// A random pattern of 0..max_segments segments mixing literal, named, and
/// regex pieces, registered under one of the eight registration verbs.
inline OracleRoute random_route(std::mt19937_64& rng, std::size_t max_segments = 6) {
    static const std::array<picoweb::HttpVerb, 8> verbs = {
        picoweb::HttpVerb::GET,     picoweb::HttpVerb::POST,  picoweb::HttpVerb::PUT,
        picoweb::HttpVerb::DELETE,  picoweb::HttpVerb::CONNECT, picoweb::HttpVerb::TRACE,
        picoweb::HttpVerb::HEAD,    picoweb::HttpVerb::PATCH,
    };
    OracleRoute route;
    route.verb = verbs[rng() % verbs.size()];
    route.ordinal = 0;
    std::size_t count = rng() % (max_segments + 1);
    if (count == 0) {
        route.raw = "/";
        return route;
    }
    for (std::size_t i = 0; i < count; ++i) {
        std::size_t roll = rng() % 10;
        if (roll < 7) {
            route.raw += "/" + literal_pool()[rng() % literal_pool().size()];
        } else if (roll < 9) {
            route.raw += "/:" + name_pool()[rng() % name_pool().size()];
        } else {
            route.raw += "/(" + regex_pool()[rng() % regex_pool().size()].source + ")";
        }
    }
    return route;
}

/// A concrete path that the given pattern usually matches.
inline std::string instantiate(const std::string& raw, std::mt19937_64& rng) {
    std::vector<std::string> pattern = oracle_split(raw);
    if (pattern.empty()) {
        return "/";
    }
    std::string path;
    for (const std::string& p : pattern) {
        if (p.front() == ':') {
            path += "/" + literal_pool()[rng() % literal_pool().size()];
        } else if (p.size() >= 2 && p.front() == '(' && p.back() == ')') {
            std::string source = p.substr(1, p.size() - 2);
            for (const RegexSample& sample : regex_pool()) {
                if (sample.source == source) {
                    path += "/" + (rng() % 4 == 0 ? sample.miss : sample.hit);
                    break;
                }
            }
        } else {
            path += "/" + p;
        }
    }
    return path;
}

inline std::string random_path(std::mt19937_64& rng, std::size_t max_segments = 6) {
    std::size_t count = rng() % (max_segments + 1);
    if (count == 0) {
        return "/";
    }
    std::string path;
    for (std::size_t i = 0; i < count; ++i) {
        path += "/" + literal_pool()[rng() % literal_pool().size()];
    }
    return path;
}

} // namespace testsupport
