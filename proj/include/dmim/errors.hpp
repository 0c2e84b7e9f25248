#pragma once

#include <stdexcept>
#include <string>

namespace dmim {

// Base for all library errors.
class Error : public std::runtime_error {
public:
    explicit Error(const std::string& what) : std::runtime_error(what) {}
};

// Malformed values: dimension mismatches, non-stochastic rows, bad files,
// out-of-range answers. CLI exit code 2.
class ValidationError : public Error {
public:
    explicit ValidationError(const std::string& what) : Error(what) {}
};

// Arguments outside a documented domain: T < 2C, alpha >= kappa,
// instance too large to enumerate. CLI exit code 3.
class ParameterError : public Error {
public:
    explicit ParameterError(const std::string& what) : Error(what) {}
};

} // namespace dmim
