#include <catch2/catch_amalgamated.hpp>

#include <map>
#include <random>
#include <set>
#include <string>
#include <vector>

#include "picoweb/router.hpp"
#include "support/route_oracle.hpp"

using namespace picoweb;
using testsupport::oracle_lookup;
using testsupport::OracleRoute;

namespace {

Handler tag_handler(int tag) {
    return [tag](const Request&) { return Response(200, std::to_string(tag)); };
}

Request empty_request() { return Request{}; }

} // namespace

TEST_CASE("verb codes follow the fixed table") {
    CHECK(verb_code(HttpVerb::GET) == 1);
    CHECK(verb_code(HttpVerb::POST) == 2);
    CHECK(verb_code(HttpVerb::PUT) == 3);
    CHECK(verb_code(HttpVerb::DELETE) == 4);
    CHECK(verb_code(HttpVerb::CONNECT) == 5);
    CHECK(verb_code(HttpVerb::TRACE) == 6);
    CHECK(verb_code(HttpVerb::HEAD) == 7);
    CHECK(verb_code(HttpVerb::PATCH) == 8);
    CHECK(verb_code(HttpVerb::OPTIONS) == 9);
}

TEST_CASE("verb names round-trip and unknown names are rejected") {
    for (HttpVerb verb : kAllVerbs) {
        CHECK(verb_from_name(verb_name(verb)) == verb);
    }
    CHECK_FALSE(verb_from_name("BLORP"));
    CHECK_FALSE(verb_from_name("get")); // wire names are case-sensitive
}

TEST_CASE("segment_count counts non-empty segments") {
    CHECK(segment_count("/") == 0);
    CHECK(segment_count("/data") == 1);
    CHECK(segment_count("/hola/neo") == 2);
}

TEST_CASE("compute_key concatenates verb code and segment count") {
    CHECK(compute_key(HttpVerb::GET, 1) == 1001);
    CHECK(compute_key(HttpVerb::GET, 0) == 1000);
    CHECK(compute_key(HttpVerb::PATCH, 3) == 8003);
    CHECK(compute_key(HttpVerb::OPTIONS, 999) == 9999);
    CHECK_THROWS_AS(compute_key(HttpVerb::GET, 1000), CapacityError);
}

TEST_CASE("compute_key is injective and never produces the reserved key 0") {
    std::set<RouteKey> seen;
    for (HttpVerb verb : kAllVerbs) {
        for (std::size_t count = 0; count <= kMaxSegments; ++count) {
            RouteKey key = compute_key(verb, count);
            CHECK(key != kNotFoundKey);
            CHECK(seen.insert(key).second);
        }
    }
    CHECK(seen.size() == kAllVerbs.size() * (kMaxSegments + 1));
}

TEST_CASE("normalize_path strips the trailing slash and keeps the root") {
    CHECK(normalize_path("/a/") == "/a");
    CHECK(normalize_path("/") == "/");
    CHECK(normalize_path("/a/b") == "/a/b");
    CHECK(normalize_path("//") == "/");
    CHECK(normalize_path("/a//b") == "/a//b"); // interior slashes untouched
    CHECK_THROWS_AS(normalize_path(""), PathError);
    CHECK_THROWS_AS(normalize_path("a/b"), PathError);
}

TEST_CASE("normalize_path is idempotent") {
    std::mt19937_64 rng(11);
    const std::string chars = "ab/c./";
    for (int i = 0; i < 500; ++i) {
        std::string raw = "/";
        std::size_t len = rng() % 12;
        for (std::size_t j = 0; j < len; ++j) {
            raw += chars[rng() % chars.size()];
        }
        std::string once = normalize_path(raw);
        CHECK(normalize_path(once) == once);
    }
}

TEST_CASE("parse_pattern classifies literal, named, and regex segments") {
    PathPattern data = parse_pattern("/data");
    REQUIRE(data.segments.size() == 1);
    CHECK(data.segments[0].kind == PatternSegment::Kind::Literal);
    CHECK(data.segments[0].text == "data");

    PathPattern hola = parse_pattern("/hola/:usr");
    REQUIRE(hola.segments.size() == 2);
    CHECK(hola.segments[0].kind == PatternSegment::Kind::Literal);
    CHECK(hola.segments[1].kind == PatternSegment::Kind::Named);
    CHECK(hola.segments[1].text == "usr");

    PathPattern rx = parse_pattern("/regex/(\\w+\\d+)");
    REQUIRE(rx.segments.size() == 2);
    CHECK(rx.segments[1].kind == PatternSegment::Kind::Regex);
    CHECK(rx.segments[1].text == "\\w+\\d+");
    CHECK(rx.segments[1].position == 2);

    CHECK(parse_pattern("/").segments.empty());
}

TEST_CASE("parse_pattern rejects empty names and bad regexes") {
    CHECK_THROWS_AS(parse_pattern("/:"), PatternError);
    CHECK_THROWS_AS(parse_pattern("/a/:"), PatternError);
    CHECK_THROWS_AS(parse_pattern("/x/([)"), PatternError);
}

TEST_CASE("match_segments binds named and regex parameters") {
    PathPattern hola = parse_pattern("/hola/:usr");
    auto segs = split_segments("/hola/neo");
    auto params = match_segments(hola, segs);
    REQUIRE(params);
    CHECK(*params == Params{{"usr", "neo"}});

    PathPattern rx = parse_pattern("/regex/(\\w+\\d+)");
    auto hit = split_segments("/regex/abc123");
    auto bound = match_segments(rx, hit);
    REQUIRE(bound);
    CHECK(*bound == Params{{"2", "abc123"}});

    auto miss = split_segments("/regex/abc");
    CHECK_FALSE(match_segments(rx, miss));
}

TEST_CASE("literal matching is byte-exact and case-sensitive") {
    PathPattern p = parse_pattern("/Data");
    auto exact = split_segments("/Data");
    auto lower = split_segments("/data");
    CHECK(match_segments(p, exact));
    CHECK_FALSE(match_segments(p, lower));
}

TEST_CASE("each regex segment binds under its own position") {
    PathPattern p = parse_pattern("/(\\d+)/x/([a-z]+)");
    auto segs = split_segments("/42/x/abc");
    auto params = match_segments(p, segs);
    REQUIRE(params);
    CHECK(*params == Params{{"1", "42"}, {"3", "abc"}});
}

TEST_CASE("insert then lookup returns the same handler") {
    RouteTable table;
    auto ordinal = table.insert(HttpVerb::GET, parse_pattern("/data"), tag_handler(7));
    auto match = table.lookup(HttpVerb::GET, "/data");
    REQUIRE(match);
    CHECK(match->entry->ordinal == ordinal);
    CHECK(match->handler()(empty_request()).body == "7");
}

TEST_CASE("earlier registration wins among overlapping candidates") {
    RouteTable table;
    auto first = table.insert(HttpVerb::GET, parse_pattern("/a"), tag_handler(1));
    table.insert(HttpVerb::GET, parse_pattern("/:x"), tag_handler(2));
    auto match = table.lookup(HttpVerb::GET, "/a");
    REQUIRE(match);
    CHECK(match->entry->ordinal == first);

    // duplicates are both stored; the earlier one wins
    RouteTable dup;
    auto keep = dup.insert(HttpVerb::GET, parse_pattern("/d"), tag_handler(1));
    dup.insert(HttpVerb::GET, parse_pattern("/d"), tag_handler(2));
    CHECK(dup.size() == 2);
    REQUIRE(dup.lookup(HttpVerb::GET, "/d"));
    CHECK(dup.lookup(HttpVerb::GET, "/d")->entry->ordinal == keep);
}

TEST_CASE("ordinals increase strictly across the whole table") {
    RouteTable table;
    std::uint64_t previous = table.insert(HttpVerb::GET, parse_pattern("/a"), tag_handler(0));
    for (int i = 1; i < 20; ++i) {
        HttpVerb verb = kAllVerbs[i % kAllVerbs.size()];
        std::uint64_t ordinal =
            table.insert(verb, parse_pattern("/seg" + std::to_string(i % 3)), tag_handler(i));
        CHECK(ordinal > previous);
        previous = ordinal;
    }
}

TEST_CASE("lookup misses on an empty table and across verbs") {
    RouteTable empty;
    CHECK_FALSE(empty.lookup(HttpVerb::GET, "/missing"));

    RouteTable table;
    table.insert(HttpVerb::GET, parse_pattern("/data"), tag_handler(1));
    CHECK_FALSE(table.lookup(HttpVerb::POST, "/data"));
    CHECK_FALSE(table.lookup(HttpVerb::GET, "/data/extra"));
}

TEST_CASE("the not-found fallback defaults to 404 and is replaceable") {
    RouteTable table;
    Response def = table.not_found()(empty_request());
    CHECK(def.status == 404);
    CHECK(def.body == "Not found");

    table.set_not_found([](const Request&) { return Response(410, "gone fishing"); });
    table.set_not_found([](const Request&) { return Response(418, "teapot"); });
    Response replaced = table.not_found()(empty_request());
    CHECK(replaced.status == 418); // last registration wins
}

TEST_CASE("every stored entry re-derives its own bucket key") {
    std::mt19937_64 rng(21);
    RouteTable table;
    for (int i = 0; i < 100; ++i) {
        OracleRoute route = testsupport::random_route(rng);
        table.insert(route.verb, parse_pattern(route.raw), tag_handler(i));
    }
    for (const auto& [key, bucket] : table.buckets()) {
        for (const RouteEntry& entry : bucket) {
            CHECK(compute_key(entry.verb, entry.pattern.segment_count()) == key);
        }
    }
}

TEST_CASE("params cover exactly the non-literal segments") {
    std::mt19937_64 rng(31);
    for (int i = 0; i < 300; ++i) {
        OracleRoute route = testsupport::random_route(rng);
        PathPattern pattern = parse_pattern(route.raw);
        std::string path = testsupport::instantiate(route.raw, rng);
        auto segs = split_segments(path);
        auto params = match_segments(pattern, segs);
        if (!params) {
            continue;
        }
        std::set<std::string> expected;
        for (const PatternSegment& s : pattern.segments) {
            if (s.kind == PatternSegment::Kind::Named) {
                expected.insert(s.text);
            } else if (s.kind == PatternSegment::Kind::Regex) {
                expected.insert(std::to_string(s.position));
            }
        }
        std::set<std::string> actual;
        for (const auto& [k, v] : *params) {
            actual.insert(k);
        }
        CHECK(actual == expected);
    }
}

TEST_CASE("lookup agrees with the linear-scan oracle") {
    std::mt19937_64 rng(41);
    for (int round = 0; round < 200; ++round) {
        RouteTable table;
        std::vector<OracleRoute> routes;
        std::size_t route_count = rng() % 41;
        for (std::size_t i = 0; i < route_count; ++i) {
            OracleRoute route = testsupport::random_route(rng);
            route.ordinal = table.insert(route.verb, parse_pattern(route.raw), tag_handler(0));
            routes.push_back(route);
        }
        for (int q = 0; q < 10; ++q) {
            HttpVerb verb = kAllVerbs[rng() % 8];
            std::string path;
            if (!routes.empty() && rng() % 10 < 7) {
                const OracleRoute& base = routes[rng() % routes.size()];
                verb = base.verb;
                path = testsupport::instantiate(base.raw, rng);
            } else {
                path = testsupport::random_path(rng);
            }
            auto expected = oracle_lookup(routes, verb, path);
            auto actual = table.lookup(verb, path);
            REQUIRE(static_cast<bool>(actual) == static_cast<bool>(expected));
            if (actual) {
                CHECK(actual->entry->ordinal == expected->ordinal);
                CHECK(actual->params == expected->params);
            }
        }
    }
}

TEST_CASE("make_literal_pattern treats special characters as plain text") {
    PathPattern p = make_literal_pattern({"files", "(note).txt"});
    CHECK(p.raw == "/files/(note).txt");
    auto hit = split_segments("/files/(note).txt");
    CHECK(match_segments(p, hit));
    auto miss = split_segments("/files/notetxt");
    CHECK_FALSE(match_segments(p, miss));
}
