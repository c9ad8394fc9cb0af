#pragma once

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <set>
#include <string>
#include <string_view>
#include <system_error>
#include <utility>
#include <vector>

#include "picoweb/errors.hpp"
#include "picoweb/http.hpp"
#include "picoweb/router.hpp"

namespace picoweb {

struct StaticConfig {
    std::filesystem::path webroot = std::filesystem::current_path();
    std::set<std::string> exposed; // webroot-relative paths registered so far
};

inline void set_webroot(StaticConfig& config, const std::filesystem::path& dir) {
    std::error_code ec;
    if (!std::filesystem::is_directory(dir, ec)) {
        throw ConfigError("webroot '" + dir.string() + "' is not a directory");
    }
    config.webroot = dir;
}

/// Either everything, or a set of lower-case extensions.
struct ExtensionFilter {
    bool all = false;
    std::set<std::string> extensions;

    bool passes(std::string_view extension) const {
        return all || extensions.count(to_lower(extension)) > 0;
    }
};

/// "*" exposes everything; otherwise pipe-separated extensions ("html|css").
inline ExtensionFilter parse_filter(std::string_view raw) {
    ExtensionFilter filter;
    if (raw == "*") {
        filter.all = true;
        return filter;
    }
    if (raw.empty()) {
        throw ConfigError("empty extension filter");
    }
    std::size_t pos = 0;
    while (pos <= raw.size()) {
        std::size_t pipe = raw.find('|', pos);
        if (pipe == std::string_view::npos) {
            pipe = raw.size();
        }
        std::string_view piece = raw.substr(pos, pipe - pos);
        if (piece.empty()) {
            throw ConfigError("empty piece in extension filter '" + std::string(raw) + "'");
        }
        filter.extensions.insert(to_lower(piece));
        pos = pipe + 1;
    }
    return filter;
}

inline std::string content_type_for(std::string_view extension) {
    std::string ext = to_lower(extension);
    if (ext == "html") return "text/html";
    if (ext == "css") return "text/css";
    if (ext == "js") return "text/javascript";
    if (ext == "json") return "application/json";
    if (ext == "txt") return "text/plain";
    if (ext == "png") return "image/png";
    if (ext == "jpg" || ext == "jpeg") return "image/jpeg";
    if (ext == "gif") return "image/gif";
    if (ext == "svg") return "image/svg+xml";
    return "application/octet-stream";
}

namespace detail {

/// True when `path` is `root` or lies under it, component-wise.
inline bool path_within(const std::filesystem::path& root, const std::filesystem::path& path) {
    auto root_it = root.begin();
    auto path_it = path.begin();
    for (; root_it != root.end(); ++root_it, ++path_it) {
        if (path_it == path.end() || *path_it != *root_it) {
            return false;
        }
    }
    return true;
}

} // namespace detail

/// Exact bytes of the file at `rel` under the webroot. The resolved real path
/// (symlinks and ".." included) must stay inside the webroot.
inline std::string file_contents(const std::filesystem::path& webroot, std::string_view rel) {
    namespace fs = std::filesystem;
    std::error_code ec;
    fs::path root = fs::canonical(webroot, ec);
    if (ec) {
        throw ConfigError("webroot '" + webroot.string() + "' is not accessible");
    }
    fs::path resolved = fs::weakly_canonical(root / fs::path(std::string(rel)), ec);
    if (ec || !detail::path_within(root, resolved) || resolved == root) {
        throw TraversalError("'" + std::string(rel) + "' resolves outside the webroot");
    }
    if (!fs::is_regular_file(resolved, ec)) {
        throw FileNotFoundError("file '" + std::string(rel) + "' not found under the webroot");
    }
    std::ifstream in(resolved, std::ios::binary);
    if (!in) {
        throw FileNotFoundError("file '" + std::string(rel) + "' could not be opened");
    }
    std::string bytes((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
    return bytes;
}

inline std::string file_contents(const StaticConfig& config, std::string_view rel) {
    return file_contents(config.webroot, rel);
}

namespace detail {

inline std::string extension_of(const std::filesystem::path& p) {
    std::string ext = p.extension().string();
    if (!ext.empty() && ext.front() == '.') {
        ext.erase(0, 1);
    }
    return ext;
}

} // namespace detail

/// Walks the webroot once (a snapshot) and registers a GET route for every
/// regular file the filter passes, at "/" + its webroot-relative path. File
/// bytes are read per request, with the same containment check as
/// file_contents. Returns how many routes were added.
inline std::size_t expose_files(StaticConfig& config, const ExtensionFilter& filter,
                                RouteTable& table) {
    namespace fs = std::filesystem;
    std::error_code ec;
    fs::path root = fs::canonical(config.webroot, ec);
    if (ec) {
        throw ConfigError("webroot '" + config.webroot.string() + "' is not accessible");
    }

    std::vector<fs::path> files;
    fs::recursive_directory_iterator it(root, fs::directory_options::none, ec);
    if (ec) {
        throw ConfigError("webroot '" + root.string() + "' is not readable");
    }
    for (auto end = fs::recursive_directory_iterator(); it != end; it.increment(ec)) {
        if (ec) {
            throw ConfigError("error walking '" + root.string() + "': " + ec.message());
        }
        if (it->is_regular_file(ec)) {
            files.push_back(it->path());
        }
    }
    std::sort(files.begin(), files.end());

    std::size_t added = 0;
    for (const fs::path& file : files) {
        std::string ext = detail::extension_of(file);
        if (!filter.all && (ext.empty() || !filter.passes(ext))) {
            continue;
        }
        fs::path rel = file.lexically_relative(root);
        std::vector<std::string> segments;
        for (const fs::path& part : rel) {
            segments.push_back(part.string());
        }
        std::string content_type = content_type_for(ext);
        Handler handler = [root, rel_text = rel.generic_string(), content_type](const Request&) {
            try {
                return Response(200, file_contents(root, rel_text), content_type);
            } catch (const Error&) {
                return Response(404, "Not found");
            }
        };
        table.insert(HttpVerb::GET, make_literal_pattern(segments), std::move(handler));
        config.exposed.insert(rel.generic_string());
        ++added;
    }
    return added;
}

} // namespace picoweb
