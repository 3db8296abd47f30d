#pragma once

#include <stdexcept>
#include <string>

namespace satbridge {

struct ParseError : std::runtime_error {
    explicit ParseError(const std::string& msg) : std::runtime_error("parse error: " + msg) {}
};

struct ArgumentError : std::runtime_error {
    explicit ArgumentError(const std::string& msg) : std::runtime_error("argument error: " + msg) {}
};

struct GenerationError : std::runtime_error {
    explicit GenerationError(const std::string& msg) : std::runtime_error("generation error: " + msg) {}
};

struct InfeasibleError : std::runtime_error {
    explicit InfeasibleError(const std::string& msg) : std::runtime_error("infeasible: " + msg) {}
};

struct NumericError : std::runtime_error {
    explicit NumericError(const std::string& msg) : std::runtime_error("numeric error: " + msg) {}
};

struct ExternalSolverError : std::runtime_error {
    explicit ExternalSolverError(const std::string& msg)
        : std::runtime_error("external solver error: " + msg) {}
};

struct ConfigError : std::runtime_error {
    explicit ConfigError(const std::string& msg) : std::runtime_error("config error: " + msg) {}
};

struct IoError : std::runtime_error {
    explicit IoError(const std::string& msg) : std::runtime_error("io error: " + msg) {}
};

}  // namespace satbridge
