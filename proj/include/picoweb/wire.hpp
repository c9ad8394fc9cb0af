#pragma once

#include <arpa/inet.h>
#include <netinet/in.h>
#include <netinet/tcp.h>
#include <sys/socket.h>
#include <unistd.h>

#include <atomic>
#include <cerrno>
#include <condition_variable>
#include <cstdint>
#include <cstring>
#include <functional>
#include <map>
#include <mutex>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <thread>
#include <utility>
#include <vector>

#include "picoweb/errors.hpp"
#include "picoweb/http.hpp"
#include "picoweb/router.hpp"

namespace picoweb {

inline constexpr std::size_t kMaxHeaderBytes = 64 * 1024;
inline constexpr std::size_t kMaxBodyBytes = 8 * 1024 * 1024;

/// Lenient percent decoding: invalid escapes pass through verbatim.
inline std::string percent_decode(std::string_view text, bool plus_as_space = true) {
    auto hex = [](char c) -> int {
        if (c >= '0' && c <= '9') return c - '0';
        if (c >= 'a' && c <= 'f') return c - 'a' + 10;
        if (c >= 'A' && c <= 'F') return c - 'A' + 10;
        return -1;
    };
    std::string out;
    out.reserve(text.size());
    for (std::size_t i = 0; i < text.size(); ++i) {
        char c = text[i];
        if (c == '+' && plus_as_space) {
            out += ' ';
        } else if (c == '%' && i + 2 < text.size()) {
            int hi = hex(text[i + 1]);
            int lo = hex(text[i + 2]);
            if (hi >= 0 && lo >= 0) {
                out += static_cast<char>((hi << 4) | lo);
                i += 2;
            } else {
                out += c;
            }
        } else {
            out += c;
        }
    }
    return out;
}

/// Splits on "&", each piece on its first "="; names and values are percent
/// decoded and "+" becomes a space. A piece without "=" maps to "". Later
/// duplicates overwrite earlier ones.
inline std::map<std::string, std::string> parse_query(std::string_view raw) {
    std::map<std::string, std::string> out;
    std::size_t pos = 0;
    while (pos <= raw.size()) {
        std::size_t amp = raw.find('&', pos);
        if (amp == std::string_view::npos) {
            amp = raw.size();
        }
        std::string_view piece = raw.substr(pos, amp - pos);
        pos = amp + 1;
        if (piece.empty()) {
            continue;
        }
        std::size_t eq = piece.find('=');
        if (eq == std::string_view::npos) {
            out[percent_decode(piece)] = "";
        } else {
            out[percent_decode(piece.substr(0, eq))] = percent_decode(piece.substr(eq + 1));
        }
    }
    return out;
}

namespace detail {

inline bool valid_header_name(std::string_view name) {
    if (name.empty()) {
        return false;
    }
    for (char c : name) {
        if (c <= ' ' || c == ':' || static_cast<unsigned char>(c) >= 127) {
            return false;
        }
    }
    return true;
}

} // namespace detail

/// Parses one HTTP/1.1 request from the front of `data`. Returns nullopt when
/// more bytes are needed; sets `consumed` on success so keep-alive callers can
/// advance. Malformed framing throws ParseError with the status to answer
/// (400, or 413 for an oversized body).
inline std::optional<Request> try_parse_request(std::string_view data, std::size_t& consumed) {
    std::size_t head_end = data.find("\r\n\r\n");
    if (head_end == std::string_view::npos) {
        if (data.size() > kMaxHeaderBytes) {
            throw ParseError(400, "header section exceeds 64 KiB");
        }
        return std::nullopt;
    }
    if (head_end + 4 > kMaxHeaderBytes) {
        throw ParseError(400, "header section exceeds 64 KiB");
    }

    std::string_view head = data.substr(0, head_end);
    std::size_t line_end = head.find("\r\n");
    std::string_view request_line = head.substr(0, line_end == std::string_view::npos ? head.size() : line_end);

    // request line: METHOD SP request-target SP HTTP/1.1
    std::size_t sp1 = request_line.find(' ');
    std::size_t sp2 = sp1 == std::string_view::npos ? std::string_view::npos
                                                    : request_line.find(' ', sp1 + 1);
    if (sp1 == std::string_view::npos || sp2 == std::string_view::npos ||
        request_line.find(' ', sp2 + 1) != std::string_view::npos) {
        throw ParseError(400, "malformed request line");
    }
    std::string_view method = request_line.substr(0, sp1);
    std::string_view target = request_line.substr(sp1 + 1, sp2 - sp1 - 1);
    std::string_view version = request_line.substr(sp2 + 1);
    if (method.empty() || target.empty()) {
        throw ParseError(400, "malformed request line");
    }
    if (version != "HTTP/1.1") {
        throw ParseError(400, "unsupported HTTP version");
    }
    std::optional<HttpVerb> verb = verb_from_name(method);
    if (!verb) {
        throw ParseError(400, "unknown method '" + std::string(method) + "'");
    }

    Request req;
    req.verb = *verb;
    std::size_t question = target.find('?');
    std::string_view path_part = target.substr(0, question);
    if (question != std::string_view::npos) {
        req.raw_query = std::string(target.substr(question + 1));
    }
    try {
        req.path = normalize_path(path_part);
    } catch (const PathError& e) {
        throw ParseError(400, e.what());
    }
    req.query = parse_query(req.raw_query);

    // header lines
    std::size_t pos = line_end == std::string_view::npos ? head.size() : line_end + 2;
    while (pos < head.size()) {
        std::size_t eol = head.find("\r\n", pos);
        if (eol == std::string_view::npos) {
            eol = head.size();
        }
        std::string_view line = head.substr(pos, eol - pos);
        pos = eol + 2;
        std::size_t colon = line.find(':');
        if (colon == std::string_view::npos) {
            throw ParseError(400, "malformed header line");
        }
        std::string_view name = line.substr(0, colon);
        if (!detail::valid_header_name(name)) {
            throw ParseError(400, "malformed header name");
        }
        req.headers.add(std::string(name), std::string(trim_ows(line.substr(colon + 1))));
    }

    if (req.headers.contains("Transfer-Encoding")) {
        throw ParseError(400, "transfer codings are not supported");
    }

    std::size_t content_length = 0;
    std::vector<std::string> lengths = req.headers.get_all("Content-Length");
    if (!lengths.empty()) {
        for (const std::string& value : lengths) {
            if (value.empty() || value != lengths.front()) {
                throw ParseError(400, "invalid Content-Length");
            }
        }
        std::uint64_t parsed = 0;
        for (char c : lengths.front()) {
            if (c < '0' || c > '9') {
                throw ParseError(400, "invalid Content-Length");
            }
            parsed = parsed * 10 + static_cast<std::uint64_t>(c - '0');
            if (parsed > kMaxBodyBytes) {
                throw ParseError(413, "body exceeds 8 MiB");
            }
        }
        content_length = static_cast<std::size_t>(parsed);
    }

    std::size_t total = head_end + 4 + content_length;
    if (data.size() < total) {
        return std::nullopt;
    }
    req.body = BodyPayload::raw(std::string(data.substr(head_end + 4, content_length)));
    consumed = total;
    return req;
}

/// Whole-buffer variant: the bytes must hold exactly one complete request.
inline Request parse_request(std::string_view data) {
    std::size_t consumed = 0;
    std::optional<Request> req = try_parse_request(data, consumed);
    if (!req) {
        throw ParseError(400, "incomplete request");
    }
    return std::move(*req);
}

/// Emits the status line, the caller's headers, an accurate Content-Length
/// (replacing any caller-set one), and the connection disposition.
inline std::string serialize_response(const Response& r, bool keep_alive = false) {
    std::string out;
    out.reserve(r.body.size() + 256);
    out += "HTTP/1.1 " + std::to_string(r.status) + " ";
    out += reason_phrase(r.status);
    out += "\r\n";
    for (const auto& [name, value] : r.headers) {
        if (iequals(name, "Content-Length") || iequals(name, "Connection")) {
            continue;
        }
        out += name;
        out += ": ";
        out += value;
        out += "\r\n";
    }
    out += "Content-Length: " + std::to_string(r.body.size()) + "\r\n";
    out += keep_alive ? "Connection: keep-alive\r\n" : "Connection: close\r\n";
    out += "\r\n";
    out += r.body;
    return out;
}

struct ServerConfig {
    std::string host = "127.0.0.1";
    std::uint16_t port = 8086;
    std::optional<std::pair<std::string, std::string>> tls; // reserved, not implemented
};

/// HTTP/1.1 default is persistent unless the client asks to close.
inline bool wants_keep_alive(const Request& req) {
    std::optional<std::string> connection = req.headers.get("Connection");
    if (!connection) {
        return true;
    }
    std::string_view value = *connection;
    std::size_t pos = 0;
    while (pos <= value.size()) {
        std::size_t comma = value.find(',', pos);
        if (comma == std::string_view::npos) {
            comma = value.size();
        }
        if (iequals(trim_ows(value.substr(pos, comma - pos)), "close")) {
            return false;
        }
        pos = comma + 1;
    }
    return true;
}

/// Accepts connections and feeds each parsed request to `dispatch`; one
/// thread per connection, sequential keep-alive requests per connection.
/// Parse failures answer 400/413, dispatch failures 500.
class Server {
public:
    using Dispatch = std::function<Response(Request)>;

    Server(ServerConfig config, Dispatch dispatch)
        : config_(std::move(config)), dispatch_(std::move(dispatch)) {}

    Server(const Server&) = delete;
    Server& operator=(const Server&) = delete;

    ~Server() { stop(); }

    void start() {
        if (config_.tls) {
            throw UnsupportedError("TLS transport is not implemented");
        }
        if (config_.port == 0) {
            throw StartupError("port must be in 1..65535");
        }

        sockaddr_storage addr{};
        socklen_t addr_len = 0;
        in6_addr addr6{};
        in_addr addr4{};
        if (inet_pton(AF_INET, config_.host.c_str(), &addr4) == 1) {
            auto* a = reinterpret_cast<sockaddr_in*>(&addr);
            a->sin_family = AF_INET;
            a->sin_port = htons(config_.port);
            a->sin_addr = addr4;
            addr_len = sizeof(sockaddr_in);
        } else if (inet_pton(AF_INET6, config_.host.c_str(), &addr6) == 1) {
            auto* a = reinterpret_cast<sockaddr_in6*>(&addr);
            a->sin6_family = AF_INET6;
            a->sin6_port = htons(config_.port);
            a->sin6_addr = addr6;
            addr_len = sizeof(sockaddr_in6);
        } else {
            throw StartupError("host '" + config_.host + "' is not a literal IP address");
        }

        int fd = ::socket(reinterpret_cast<sockaddr*>(&addr)->sa_family, SOCK_STREAM, 0);
        if (fd < 0) {
            throw StartupError(std::string("socket: ") + std::strerror(errno));
        }
        int one = 1;
        ::setsockopt(fd, SOL_SOCKET, SO_REUSEADDR, &one, sizeof(one));
        if (::bind(fd, reinterpret_cast<sockaddr*>(&addr), addr_len) != 0) {
            int err = errno;
            ::close(fd);
            throw StartupError("bind " + config_.host + ":" + std::to_string(config_.port) +
                               ": " + std::strerror(err));
        }
        if (::listen(fd, 64) != 0) {
            int err = errno;
            ::close(fd);
            throw StartupError(std::string("listen: ") + std::strerror(err));
        }
        listen_fd_.store(fd);
        running_ = true;
        accept_thread_ = std::thread([this] { accept_loop(); });
    }

    std::uint16_t port() const { return config_.port; }
    bool running() const { return running_; }

    /// Blocks until stop() is called (from another thread or a signal-driven
    /// control path).
    void wait() {
        std::unique_lock<std::mutex> lock(state_mutex_);
        stopped_cv_.wait(lock, [this] { return !running_; });
    }

    /// Graceful shutdown: stop accepting, shut down open connections, join
    /// every worker. Idempotent.
    void stop() {
        {
            std::lock_guard<std::mutex> lock(state_mutex_);
            int fd = listen_fd_.exchange(-1);
            if (!running_ && fd < 0) {
                stopped_cv_.notify_all();
                return;
            }
            running_ = false;
            if (fd >= 0) {
                ::shutdown(fd, SHUT_RDWR);
                ::close(fd);
            }
        }
        {
            std::lock_guard<std::mutex> lock(conn_mutex_);
            for (int fd : open_connections_) {
                ::shutdown(fd, SHUT_RDWR);
            }
        }
        if (accept_thread_.joinable()) {
            accept_thread_.join();
        }
        std::vector<std::thread> workers;
        {
            std::lock_guard<std::mutex> lock(conn_mutex_);
            workers.swap(workers_);
        }
        for (std::thread& t : workers) {
            if (t.joinable()) {
                t.join();
            }
        }
        stopped_cv_.notify_all();
    }

private:
    void accept_loop() {
        while (running_) {
            int listener = listen_fd_.load();
            if (listener < 0) {
                break;
            }
            int fd = ::accept(listener, nullptr, nullptr);
            if (fd < 0) {
                if (errno == EINTR) {
                    continue;
                }
                break; // listener closed by stop()
            }
            std::lock_guard<std::mutex> lock(conn_mutex_);
            if (!running_) {
                ::close(fd);
                break;
            }
            open_connections_.insert(fd);
            workers_.emplace_back([this, fd] { handle_connection(fd); });
        }
    }

    void handle_connection(int fd) {
        std::string buffer;
        char chunk[16384];
        bool open = true;
        while (open && running_) {
            // accumulate until one complete request is buffered
            std::optional<Request> req;
            std::size_t consumed = 0;
            try {
                while (!(req = try_parse_request(buffer, consumed))) {
                    ssize_t n = ::recv(fd, chunk, sizeof(chunk), 0);
                    if (n < 0 && errno == EINTR) {
                        continue;
                    }
                    if (n <= 0) {
                        if (!buffer.empty() && running_) {
                            send_all(fd, serialize_response(Response(400, "incomplete request"), false));
                        }
                        open = false;
                        break;
                    }
                    buffer.append(chunk, static_cast<std::size_t>(n));
                }
            } catch (const ParseError& e) {
                send_all(fd, serialize_response(Response(e.status(), e.what()), false));
                open = false;
            }
            if (!open || !req) {
                break;
            }
            buffer.erase(0, consumed);

            bool keep_alive = wants_keep_alive(*req);
            Response resp;
            try {
                resp = dispatch_(std::move(*req));
            } catch (const std::exception&) {
                resp = Response(500, "Internal server error");
            } catch (...) {
                resp = Response(500, "Internal server error");
            }
            if (!send_all(fd, serialize_response(resp, keep_alive)) || !keep_alive) {
                open = false;
            }
        }
        // untrack before closing so a reused descriptor number is never erased
        {
            std::lock_guard<std::mutex> lock(conn_mutex_);
            open_connections_.erase(fd);
        }
        ::close(fd);
    }

    static bool send_all(int fd, std::string_view data) {
        while (!data.empty()) {
            ssize_t n = ::send(fd, data.data(), data.size(), MSG_NOSIGNAL);
            if (n < 0) {
                if (errno == EINTR) {
                    continue;
                }
                return false;
            }
            data.remove_prefix(static_cast<std::size_t>(n));
        }
        return true;
    }

    ServerConfig config_;
    Dispatch dispatch_;
    std::atomic<int> listen_fd_{-1};
    std::atomic<bool> running_{false};
    std::thread accept_thread_;
    std::mutex conn_mutex_;
    std::set<int> open_connections_;
    std::vector<std::thread> workers_;
    std::mutex state_mutex_;
    std::condition_variable stopped_cv_;
};

/// Runs a server until stop() is invoked on it from elsewhere.
inline void serve(ServerConfig config, Server::Dispatch dispatch) {
    Server server(std::move(config), std::move(dispatch));
    server.start();
    server.wait();
}

} // namespace picoweb
