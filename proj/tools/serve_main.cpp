// Demo server covering the framework surface: the eight verb routes on
// /data, path parameters, an anchored-regex segment, a JSON body echo, an
// authentication middleware, optional CORS, always-headers, and static file
// exposure. Runs until SIGINT/SIGTERM.

#include <atomic>
#include <chrono>
#include <csignal>
#include <iostream>
#include <string>
#include <thread>
#include <utility>
#include <vector>

#include "CLI11.hpp"
#include "picoweb/picoweb.hpp"

namespace {

std::atomic<bool> g_stop{false};

void on_signal(int) { g_stop.store(true); }

void register_demo_routes(picoweb::App& app) {
    using picoweb::Middleware;
    using picoweb::Outcome;
    using picoweb::Request;
    using picoweb::Response;

    app.Get("/", [](const Request&) { return Response(200, "Hello World!"); });

    app.Get("/data", [](const Request&) { return Response(200, "test text Get"); });
    // With JSON parsed bodies this route doubles as the body-parser echo;
    // plain posts keep the verb-matrix text.
    app.Post("/data", [](const Request& req) {
        if (req.body.is_parsed() && req.body.json().contains("query")) {
            return Response(200,
                            "I did something! " + req.body.json()["query"].get<std::string>(),
                            "text/plain");
        }
        return Response(200, "test text Post");
    });
    app.Put("/data", [](const Request&) { return Response(200, "test text Put"); });
    app.Delete("/data", [](const Request&) { return Response(200, "test text Delete"); });
    app.Connect("/data", [](const Request&) { return Response(200, "test text Connect"); });
    app.Trace("/data", [](const Request&) { return Response(200, "test text Trace"); });
    app.Head("/data", [](const Request&) { return Response(200, "test text head"); });
    app.Patch("/data", [](const Request&) { return Response(200, "test text Patch"); });

    app.Get("/hola/:usr", [](const Request& req) {
        return Response(200, "<b>Hello " + req.params.at("usr") + "!</b>");
    });

    app.Get("/regex/(\\w+\\d+)", [](const Request& req) {
        return Response(200, "datos " + req.params.at("2"));
    });

    Middleware authenticate = [](Request req) {
        if (req.params.at("status") == "authenticated") {
            req.attachments["isAuthenticated"] = true;
            return Outcome::proceed(std::move(req));
        }
        return Outcome::short_circuit(Response(403, "Unauthenticated. Please signup!"));
    };
    app.Get("/verify/:status",
            [](const Request&) { return Response(200, "<b>verify !</b>"); },
            {authenticate});

    app.body_parser("application/json",
                    [](const std::string& text) { return nlohmann::json::parse(text); });
}

} // namespace

int main(int argc, char** argv) {
    CLI::App cli{"picoweb demo server"};
    std::string host = "127.0.0.1";
    std::uint16_t port = 8086;
    std::string root;
    std::string expose;
    bool cors = false;
    std::vector<std::string> always;
    cli.add_option("--host", host, "IP address to bind")->capture_default_str();
    cli.add_option("--port", port, "TCP port to bind")->capture_default_str();
    cli.add_option("--root", root, "webroot directory for static files");
    cli.add_option("--expose", expose, "static file filter: '*' or 'ext|ext|...'");
    cli.add_flag("--cors", cors, "enable CORS with the demo configuration");
    cli.add_option("--always", always, "header added to every response, as Name=Value")
        ->take_all();
    try {
        cli.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        int code = cli.exit(e);
        return code == 0 ? 0 : 1;
    }

    picoweb::App app;
    try {
        register_demo_routes(app);

        std::vector<std::pair<std::string, std::string>> pairs;
        for (const std::string& entry : always) {
            std::size_t eq = entry.find('=');
            if (eq == std::string::npos || eq == 0) {
                std::cerr << "--always expects Name=Value, got '" << entry << "'\n";
                return 1;
            }
            pairs.emplace_back(entry.substr(0, eq), entry.substr(eq + 1));
        }
        if (!pairs.empty()) {
            app.headers_always(pairs);
        }

        if (cors) {
            app.use_cors(picoweb::CorsConfig{"*", "Origin, Content-Type, Accept",
                                             "GET,POST,PUT,DELETE", "178000"});
        }

        if (!root.empty()) {
            app.webroot(root);
        }
        if (!expose.empty()) {
            std::size_t count = app.expose_files(expose);
            std::cout << "exposing " << count << " static file(s)\n";
        }
    } catch (const picoweb::Error& e) {
        std::cerr << "configuration error: " << e.what() << "\n";
        return 1;
    }

    std::signal(SIGINT, on_signal);
    std::signal(SIGTERM, on_signal);

    try {
        app.start_async(host, port);
    } catch (const picoweb::Error& e) {
        std::cerr << "startup failed: " << e.what() << "\n";
        return 2;
    }
    std::cout << "listening on " << host << ":" << port << "\n";

    while (!g_stop.load()) {
        std::this_thread::sleep_for(std::chrono::milliseconds(100));
    }
    app.stop();
    std::cout << "stopped\n";
    return 0;
}
