#pragma once

#include <stdexcept>
#include <string>

namespace molt {

/// An argument violated a documented precondition (caller bug).
class argument_error : public std::invalid_argument {
public:
    explicit argument_error(const std::string& msg) : std::invalid_argument(msg) {}
};

/// A run configuration is invalid or inconsistent.
class config_error : public std::runtime_error {
public:
    explicit config_error(const std::string& msg) : std::runtime_error(msg) {}
};

/// A numerical procedure failed at run time (lost bracket, blow-up,
/// non-convergent iteration, ill-conditioned correction system).
class numeric_error : public std::runtime_error {
public:
    explicit numeric_error(const std::string& msg) : std::runtime_error(msg) {}
};

/// Internal invariant violated (library bug, e.g. workspace/grid mismatch).
class internal_error : public std::logic_error {
public:
    explicit internal_error(const std::string& msg) : std::logic_error(msg) {}
};

} // namespace molt
