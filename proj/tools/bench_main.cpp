// Router micro-benchmark: the hash-keyed table against a flat linear scan
// over the same routes. Every lookup is answered by both engines and the
// results must be identical; timings compare mean lookup cost. Prints one
// JSON object and exits nonzero on any mismatch.

#include <chrono>
#include <cstdint>
#include <iostream>
#include <map>
#include <optional>
#include <random>
#include <regex>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"
#include "picoweb/router.hpp"

namespace {

using picoweb::HttpVerb;
using picoweb::Params;

constexpr std::array<HttpVerb, 8> kRegistrationVerbs = {
    HttpVerb::GET,    HttpVerb::POST,  HttpVerb::PUT,  HttpVerb::DELETE,
    HttpVerb::CONNECT, HttpVerb::TRACE, HttpVerb::HEAD, HttpVerb::PATCH,
};

const std::vector<std::string>& literal_pool() {
    static const std::vector<std::string> pool = {
        "data", "hola", "users", "api", "v1", "v2", "files", "alpha", "beta",
        "gamma", "delta", "static", "posts", "items", "orders", "neo",
        "reports", "metrics", "assets", "admin",
    };
    return pool;
}

const std::vector<std::string>& name_pool() {
    static const std::vector<std::string> pool = {"usr", "id", "name", "slug", "key", "status"};
    return pool;
}

struct RegexSample {
    std::string source;
    std::string hit;
};

const std::vector<RegexSample>& regex_pool() {
    static const std::vector<RegexSample> pool = {
        {"\\w+\\d+", "abc123"},
        {"[a-z]+", "hello"},
        {"\\d+", "42"},
        {"[A-Za-z]{3}", "Neo"},
    };
    return pool;
}

// ---- the flat-scan engine ----

struct LinearSegment {
    enum class Kind { Literal, Named, Regex };
    Kind kind;
    std::string text;
    std::regex re;
    std::size_t position = 0;
};

struct LinearEntry {
    HttpVerb verb;
    std::vector<LinearSegment> segments;
    std::uint64_t ordinal;
};

struct LinearResult {
    std::uint64_t ordinal;
    Params params;

    bool operator==(const LinearResult&) const = default;
};

std::vector<std::string> split(const std::string& path) {
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

LinearEntry make_linear_entry(HttpVerb verb, const std::string& raw, std::uint64_t ordinal) {
    LinearEntry entry{verb, {}, ordinal};
    std::size_t position = 0;
    for (const std::string& piece : split(raw)) {
        ++position;
        LinearSegment seg;
        if (piece.front() == ':') {
            seg.kind = LinearSegment::Kind::Named;
            seg.text = piece.substr(1);
        } else if (piece.size() >= 2 && piece.front() == '(' && piece.back() == ')') {
            seg.kind = LinearSegment::Kind::Regex;
            seg.text = piece.substr(1, piece.size() - 2);
            seg.re = std::regex(seg.text, std::regex::ECMAScript | std::regex::optimize);
            seg.position = position;
        } else {
            seg.kind = LinearSegment::Kind::Literal;
            seg.text = piece;
        }
        entry.segments.push_back(std::move(seg));
    }
    return entry;
}

std::optional<LinearResult> linear_lookup(const std::vector<LinearEntry>& entries, HttpVerb verb,
                                          const std::vector<std::string>& segments) {
    for (const LinearEntry& entry : entries) {
        if (entry.verb != verb || entry.segments.size() != segments.size()) {
            continue;
        }
        Params params;
        bool matched = true;
        for (std::size_t i = 0; i < segments.size(); ++i) {
            const LinearSegment& seg = entry.segments[i];
            switch (seg.kind) {
            case LinearSegment::Kind::Literal:
                matched = seg.text == segments[i];
                break;
            case LinearSegment::Kind::Named:
                params[seg.text] = segments[i];
                break;
            case LinearSegment::Kind::Regex:
                matched = std::regex_match(segments[i], seg.re);
                if (matched) {
                    params[std::to_string(seg.position)] = segments[i];
                }
                break;
            }
            if (!matched) {
                break;
            }
        }
        if (matched) {
            return LinearResult{entry.ordinal, std::move(params)};
        }
    }
    return std::nullopt;
}

// ---- workload ----

struct RouteSpec {
    HttpVerb verb;
    std::string raw;
};

RouteSpec random_route(std::mt19937_64& rng) {
    RouteSpec spec;
    spec.verb = kRegistrationVerbs[rng() % kRegistrationVerbs.size()];
    std::size_t count = 1 + rng() % 6;
    bool parameterized = rng() % 100 < 20;
    std::size_t param_at = parameterized ? rng() % count : count;
    for (std::size_t i = 0; i < count; ++i) {
        if (i == param_at) {
            if (rng() % 2 == 0) {
                spec.raw += "/:" + name_pool()[rng() % name_pool().size()];
            } else {
                spec.raw += "/(" + regex_pool()[rng() % regex_pool().size()].source + ")";
            }
        } else {
            spec.raw += "/" + literal_pool()[rng() % literal_pool().size()];
        }
    }
    return spec;
}

std::string instantiate(const RouteSpec& spec, std::mt19937_64& rng) {
    std::string path;
    for (const std::string& piece : split(spec.raw)) {
        if (piece.front() == ':') {
            path += "/" + literal_pool()[rng() % literal_pool().size()];
        } else if (piece.size() >= 2 && piece.front() == '(' && piece.back() == ')') {
            std::string source = piece.substr(1, piece.size() - 2);
            for (const RegexSample& sample : regex_pool()) {
                if (sample.source == source) {
                    path += "/" + sample.hit;
                    break;
                }
            }
        } else {
            path += "/" + piece;
        }
    }
    return path;
}

struct Lookup {
    HttpVerb verb;
    std::string path;
};

} // namespace

int main(int argc, char** argv) {
    CLI::App cli{"picoweb router benchmark: hash-keyed lookup vs. flat linear scan"};
    std::uint64_t route_count = 10000;
    std::uint64_t lookup_count = 100000;
    std::uint64_t seed = 42;
    cli.add_option("--routes", route_count, "number of random routes to register")
        ->capture_default_str();
    cli.add_option("--lookups", lookup_count, "number of random lookups to run")
        ->capture_default_str();
    cli.add_option("--seed", seed, "RNG seed (identical seeds give identical workloads)")
        ->capture_default_str();
    try {
        cli.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        int code = cli.exit(e);
        return code == 0 ? 0 : 1;
    }

    std::mt19937_64 rng(seed);

    picoweb::RouteTable table;
    std::vector<LinearEntry> linear;
    std::vector<RouteSpec> specs;
    picoweb::Handler noop = [](const picoweb::Request&) { return picoweb::Response(200, ""); };
    for (std::uint64_t i = 0; i < route_count; ++i) {
        RouteSpec spec = random_route(rng);
        std::uint64_t ordinal = table.insert(spec.verb, picoweb::parse_pattern(spec.raw), noop);
        linear.push_back(make_linear_entry(spec.verb, spec.raw, ordinal));
        specs.push_back(std::move(spec));
    }

    std::vector<Lookup> lookups;
    lookups.reserve(lookup_count);
    for (std::uint64_t i = 0; i < lookup_count; ++i) {
        Lookup q;
        if (!specs.empty() && rng() % 100 < 80) {
            const RouteSpec& base = specs[rng() % specs.size()];
            q.verb = base.verb;
            q.path = instantiate(base, rng);
        } else {
            q.verb = kRegistrationVerbs[rng() % kRegistrationVerbs.size()];
            std::size_t count = 1 + rng() % 6;
            for (std::size_t s = 0; s < count; ++s) {
                q.path += "/" + literal_pool()[rng() % literal_pool().size()] + "x";
            }
        }
        lookups.push_back(std::move(q));
    }

    // correctness: both engines must agree on every lookup
    std::uint64_t mismatches = 0;
    for (const Lookup& q : lookups) {
        auto hash_result = table.lookup(q.verb, q.path);
        auto linear_result = linear_lookup(linear, q.verb, split(q.path));
        if (static_cast<bool>(hash_result) != static_cast<bool>(linear_result)) {
            ++mismatches;
            continue;
        }
        if (hash_result && (hash_result->entry->ordinal != linear_result->ordinal ||
                            hash_result->params != linear_result->params)) {
            ++mismatches;
        }
    }

    using clock = std::chrono::steady_clock;
    std::uint64_t sink = 0;

    auto hash_begin = clock::now();
    for (const Lookup& q : lookups) {
        if (auto r = table.lookup(q.verb, q.path)) {
            sink += r->entry->ordinal;
        }
    }
    auto hash_end = clock::now();

    auto linear_begin = clock::now();
    for (const Lookup& q : lookups) {
        if (auto r = linear_lookup(linear, q.verb, split(q.path))) {
            sink += r->ordinal;
        }
    }
    auto linear_end = clock::now();

    double denom = lookup_count == 0 ? 1.0 : static_cast<double>(lookup_count);
    double hash_mean_ns =
        std::chrono::duration<double, std::nano>(hash_end - hash_begin).count() / denom;
    double linear_mean_ns =
        std::chrono::duration<double, std::nano>(linear_end - linear_begin).count() / denom;
    double speedup = hash_mean_ns > 0.0 ? linear_mean_ns / hash_mean_ns : 0.0;

    nlohmann::ordered_json report;
    report["route_count"] = route_count;
    report["lookup_count"] = lookup_count;
    report["hash_mean_ns"] = hash_mean_ns;
    report["linear_mean_ns"] = linear_mean_ns;
    report["speedup"] = speedup;
    report["mismatches"] = mismatches;
    std::cout << report.dump() << "\n";

    volatile std::uint64_t keep = sink; // the timing loops must stay observable
    (void)keep;
    return mismatches == 0 ? 0 : 1;
}
