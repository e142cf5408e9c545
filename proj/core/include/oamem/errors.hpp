#pragma once

#include <stdexcept>
#include <string>

namespace oamem {

// Invalid arguments are reported with std::invalid_argument. The types below
// cover the remaining failure classes; the CLI maps each one to an exit code.

/// Solver or quadrature failure (instability, non-finite values, no convergence).
class numeric_error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Measured data cannot support the requested estimate (e.g. an empty basis pair).
class degenerate_data_error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class config_error : public std::runtime_error {
public:
    config_error(std::string location, const std::string& what)
        : std::runtime_error(location.empty() ? what : location + ": " + what),
          location_(std::move(location)) {}

    const std::string& location() const noexcept { return location_; }

private:
    std::string location_;
};

class io_error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

}  // namespace oamem
