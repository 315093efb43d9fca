#pragma once

#include <stdexcept>
#include <string>

namespace memgrow {

// Error categories map 1:1 onto CLI exit codes (config=2, transport=3, data=4).
struct ConfigError : std::runtime_error {
    explicit ConfigError(const std::string& msg) : std::runtime_error(msg) {}
};

struct TransportError : std::runtime_error {
    int attempts{0};
    explicit TransportError(const std::string& msg, int attempts_ = 0)
        : std::runtime_error(msg), attempts(attempts_) {}
};

struct DataError : std::runtime_error {
    explicit DataError(const std::string& msg) : std::runtime_error(msg) {}
};

struct ProtocolError : std::runtime_error {
    explicit ProtocolError(const std::string& msg) : std::runtime_error(msg) {}
};

struct DomainError : std::runtime_error {
    explicit DomainError(const std::string& msg) : std::runtime_error(msg) {}
};

}  // namespace memgrow
