#pragma once
#include <stdexcept>
#include <string>

namespace dsm {

// Bad user input: malformed config files, invalid flag combinations.
class ConfigError : public std::runtime_error {
public:
    explicit ConfigError(const std::string& what) : std::runtime_error(what) {}
};

// Numerical failure at runtime: divergence, non-finite activations, q >= 1.
class NumericError : public std::runtime_error {
public:
    explicit NumericError(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace dsm
