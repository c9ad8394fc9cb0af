#pragma once

#include <algorithm>
#include <cstdint>
#include <optional>
#include <regex>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <utility>
#include <vector>

#include "picoweb/errors.hpp"
#include "picoweb/http.hpp"

namespace picoweb {

/// Bucket key: verb code * 1000 + segment count. 0 is reserved for the
/// not-found fallback and never produced for a real route.
using RouteKey = std::uint32_t;

inline constexpr RouteKey kNotFoundKey = 0;
inline constexpr std::size_t kMaxSegments = 999;

/// Strips the trailing "/" run so lookups and registrations agree on one
/// spelling; "/" itself is kept. Interior slashes are left alone.
inline std::string normalize_path(std::string_view raw) {
    if (raw.empty() || raw.front() != '/') {
        throw PathError("path must begin with '/': '" + std::string(raw) + "'");
    }
    std::size_t end = raw.size();
    while (end > 1 && raw[end - 1] == '/') {
        --end;
    }
    return std::string(raw.substr(0, end));
}

/// Non-empty "/"-separated pieces of a normalized path. "/" yields none.
inline std::vector<std::string_view> split_segments(std::string_view path) {
    std::vector<std::string_view> segments;
    std::size_t pos = 0;
    while (pos < path.size()) {
        if (path[pos] == '/') {
            ++pos;
            continue;
        }
        std::size_t next = path.find('/', pos);
        if (next == std::string_view::npos) {
            next = path.size();
        }
        segments.push_back(path.substr(pos, next - pos));
        pos = next;
    }
    return segments;
}

inline std::size_t segment_count(std::string_view path) {
    return split_segments(path).size();
}

inline RouteKey compute_key(HttpVerb verb, std::size_t count) {
    if (count > kMaxSegments) {
        throw CapacityError("path depth " + std::to_string(count) +
                            " exceeds the maximum of " + std::to_string(kMaxSegments));
    }
    return static_cast<RouteKey>(verb_code(verb)) * 1000u + static_cast<RouteKey>(count);
}

struct PatternSegment {
    enum class Kind { Literal, Named, Regex };

    Kind kind = Kind::Literal;
    std::string text;      // literal text, parameter name, or regex source
    std::regex re;         // compiled source; Regex only
    std::size_t position = 0; // 1-based segment index; Regex only

    static PatternSegment literal(std::string text) {
        PatternSegment s;
        s.kind = Kind::Literal;
        s.text = std::move(text);
        return s;
    }

    static PatternSegment named(std::string name) {
        PatternSegment s;
        s.kind = Kind::Named;
        s.text = std::move(name);
        return s;
    }

    static PatternSegment regex(std::string source, std::size_t position) {
        PatternSegment s;
        s.kind = Kind::Regex;
        try {
            s.re = std::regex(source, std::regex::ECMAScript | std::regex::optimize);
        } catch (const std::regex_error& e) {
            throw PatternError("invalid regex segment '" + source + "': " + e.what());
        }
        s.text = std::move(source);
        s.position = position;
        return s;
    }
};

struct PathPattern {
    std::string raw;
    std::vector<PatternSegment> segments;

    std::size_t segment_count() const { return segments.size(); }
};

/// Splits a normalized path into pattern segments: ":name" becomes a named
/// parameter, "(source)" an anchored regex keyed by its 1-based position,
/// anything else a literal.
inline PathPattern parse_pattern(std::string_view raw) {
    PathPattern pattern;
    pattern.raw = std::string(raw);
    std::size_t position = 0;
    for (std::string_view piece : split_segments(raw)) {
        ++position;
        if (piece.front() == ':') {
            std::string name(piece.substr(1));
            if (name.empty()) {
                throw PatternError("named parameter without a name in '" + std::string(raw) + "'");
            }
            pattern.segments.push_back(PatternSegment::named(std::move(name)));
        } else if (piece.size() >= 2 && piece.front() == '(' && piece.back() == ')') {
            std::string source(piece.substr(1, piece.size() - 2));
            pattern.segments.push_back(PatternSegment::regex(std::move(source), position));
        } else {
            pattern.segments.push_back(PatternSegment::literal(std::string(piece)));
        }
    }
    return pattern;
}

/// Pattern of literal segments only, for routes that come from filesystem
/// walks rather than pattern text (filenames may contain ':' or parentheses).
inline PathPattern make_literal_pattern(const std::vector<std::string>& segments) {
    PathPattern pattern;
    pattern.raw = segments.empty() ? "/" : "";
    for (const std::string& s : segments) {
        pattern.raw += "/" + s;
        pattern.segments.push_back(PatternSegment::literal(s));
    }
    return pattern;
}

/// Matches one pattern against path segments of equal length. Literals
/// compare byte-exact and case-sensitive; named parameters bind any segment;
/// regex segments must match the whole segment and bind under their position.
inline std::optional<Params> match_segments(const PathPattern& pattern,
                                            std::span<const std::string_view> segments) {
    if (pattern.segments.size() != segments.size()) {
        return std::nullopt;
    }
    Params params;
    for (std::size_t i = 0; i < segments.size(); ++i) {
        const PatternSegment& ps = pattern.segments[i];
        std::string_view seg = segments[i];
        switch (ps.kind) {
        case PatternSegment::Kind::Literal:
            if (ps.text != seg) {
                return std::nullopt;
            }
            break;
        case PatternSegment::Kind::Named:
            params[ps.text] = std::string(seg);
            break;
        case PatternSegment::Kind::Regex:
            if (!std::regex_match(seg.begin(), seg.end(), ps.re)) {
                return std::nullopt;
            }
            params[std::to_string(ps.position)] = std::string(seg);
            break;
        }
    }
    return params;
}

struct RouteEntry {
    HttpVerb verb = HttpVerb::GET;
    PathPattern pattern;
    Handler handler;
    std::uint64_t ordinal = 0; // registration sequence, table-wide
};

struct MatchResult {
    const RouteEntry* entry = nullptr;
    Params params;

    const Handler& handler() const { return entry->handler; }
};

/// Hash table from route key to the candidate list for that (verb, segment
/// count). Candidates keep registration order; the first match wins.
class RouteTable {
public:
    RouteTable() {
        not_found_ = [](const Request&) { return Response(404, "Not found"); };
    }

    std::uint64_t insert(HttpVerb verb, PathPattern pattern, Handler handler) {
        RouteKey key = compute_key(verb, pattern.segment_count());
        std::uint64_t ordinal = next_ordinal_++;
        buckets_[key].push_back(RouteEntry{verb, std::move(pattern), std::move(handler), ordinal});
        return ordinal;
    }

    /// First candidate under compute_key(verb, count) whose segments all
    /// match, with its captured parameters. NotFound resolution to the key-0
    /// handler is the pipeline's job, not the router's.
    std::optional<MatchResult> lookup(HttpVerb verb, std::string_view path) const {
        std::vector<std::string_view> segments = split_segments(path);
        if (segments.size() > kMaxSegments) {
            return std::nullopt; // no such route can exist
        }
        auto bucket = buckets_.find(compute_key(verb, segments.size()));
        if (bucket == buckets_.end()) {
            return std::nullopt;
        }
        for (const RouteEntry& entry : bucket->second) {
            if (auto params = match_segments(entry.pattern, segments)) {
                return MatchResult{&entry, std::move(*params)};
            }
        }
        return std::nullopt;
    }

    void set_not_found(Handler handler) { not_found_ = std::move(handler); }
    const Handler& not_found() const { return not_found_; }

    const std::unordered_map<RouteKey, std::vector<RouteEntry>>& buckets() const {
        return buckets_;
    }

    /// Every entry, ordered by ordinal.
    std::vector<const RouteEntry*> entries_by_ordinal() const {
        std::vector<const RouteEntry*> out;
        for (const auto& [key, bucket] : buckets_) {
            for (const RouteEntry& entry : bucket) {
                out.push_back(&entry);
            }
        }
        std::sort(out.begin(), out.end(),
                  [](const RouteEntry* a, const RouteEntry* b) { return a->ordinal < b->ordinal; });
        return out;
    }

    bool has_route(HttpVerb verb, std::string_view raw) const {
        for (const auto& [key, bucket] : buckets_) {
            for (const RouteEntry& entry : bucket) {
                if (entry.verb == verb && entry.pattern.raw == raw) {
                    return true;
                }
            }
        }
        return false;
    }

    std::size_t size() const {
        std::size_t n = 0;
        for (const auto& [key, bucket] : buckets_) {
            n += bucket.size();
        }
        return n;
    }

private:
    std::unordered_map<RouteKey, std::vector<RouteEntry>> buckets_;
    Handler not_found_;
    std::uint64_t next_ordinal_ = 0;
};

} // namespace picoweb
