#pragma once

#include <stdexcept>
#include <string>

namespace hypctl {

/// Base class for all library errors.
class Error : public std::runtime_error {
public:
    explicit Error(const std::string& what) : std::runtime_error(what) {}
};

/// Malformed or out-of-range configuration input.
class ConfigError : public Error {
public:
    explicit ConfigError(const std::string& what) : Error(what) {}
};

/// A scenario failed its pre-run validation pipeline (weight residual,
/// dissipativity certificate, partition consistency, ...).
class ValidationError : public Error {
public:
    explicit ValidationError(const std::string& what) : Error(what) {}
};

/// The time integration blew up (non-finite state or norm above the abort threshold).
class InstabilityError : public Error {
public:
    explicit InstabilityError(const std::string& what) : Error(what) {}
};

/// Feedback control cannot be realized (empty controlled boundary set,
/// vanishing control authority, stale signal).
class ControlError : public Error {
public:
    explicit ControlError(const std::string& what) : Error(what) {}
};

} // namespace hypctl
