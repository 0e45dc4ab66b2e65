#pragma once

#include <stdexcept>
#include <string>

namespace meshchain {

// Bad configuration or input files. The CLI maps this to exit code 1.
class ConfigError : public std::runtime_error {
public:
    explicit ConfigError(const std::string& msg) : std::runtime_error(msg) {}
};

// Failures during a run (chain integrity, kernel misuse). Exit code 2.
class SimError : public std::runtime_error {
public:
    explicit SimError(const std::string& msg) : std::runtime_error(msg) {}
};

}  // namespace meshchain
