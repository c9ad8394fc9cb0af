#pragma once

#include <stdexcept>
#include <string>

namespace picoweb {

/// Base class for every error thrown by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// A path that does not begin with "/".
class PathError : public Error {
public:
    using Error::Error;
};

/// A route pattern that cannot be parsed (empty parameter name, bad regex).
class PatternError : public Error {
public:
    using Error::Error;
};

/// Path depth beyond what the key scheme can represent (> 999 segments).
class CapacityError : public Error {
public:
    using Error::Error;
};

/// Invalid configuration value (media type, filter, webroot, CORS field).
class ConfigError : public Error {
public:
    using Error::Error;
};

/// A setup-phase call made after the server has started.
class PhaseError : public Error {
public:
    using Error::Error;
};

/// A feature the interface reserves but does not implement (TLS).
class UnsupportedError : public Error {
public:
    using Error::Error;
};

/// Server could not start (bad host literal, bind failure).
class StartupError : public Error {
public:
    using Error::Error;
};

/// Malformed HTTP framing. `status` is the response the caller should send.
class ParseError : public Error {
public:
    ParseError(int status, const std::string& what) : Error(what), status_(status) {}
    int status() const noexcept { return status_; }

private:
    int status_;
};

/// A registered body parser rejected the payload.
class BodyParseError : public Error {
public:
    using Error::Error;
};

/// A static-file path that resolves outside the webroot.
class TraversalError : public Error {
public:
    using Error::Error;
};

/// A static file that does not exist (or is not a regular file).
class FileNotFoundError : public Error {
public:
    using Error::Error;
};

} // namespace picoweb
