#pragma once

#include <stdexcept>
#include <string>

namespace logscar {

// Bad input or parameter combinations. The CLI maps this to exit code 2.
class ConfigError : public std::invalid_argument {
public:
    explicit ConfigError(const std::string& what) : std::invalid_argument(what) {}
};

// A computation could not reach its tolerance (basis too small, quadrature
// not converging, ...). The CLI maps this to exit code 3.
class NumericalError : public std::runtime_error {
public:
    explicit NumericalError(const std::string& what) : std::runtime_error(what) {}
};

} // namespace logscar
