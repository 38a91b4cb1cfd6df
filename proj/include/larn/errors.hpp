#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace larn {

/// Argument outside the domain of a mathematical function (negative radius, NaN, ...).
class DomainError : public std::domain_error {
public:
    using std::domain_error::domain_error;
};

/// Invalid configuration: bad flags, inconsistent grids, malformed config files.
class ConfigError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

/// Numerical failure inside an iterative solver.
class SolverError : public std::runtime_error {
public:
    static constexpr std::size_t no_row = static_cast<std::size_t>(-1);

    explicit SolverError(const std::string& what, std::size_t row = no_row)
        : std::runtime_error(row == no_row ? what : what + " (row " + std::to_string(row) + ")"),
          row_(row)
    {}

    std::size_t row() const noexcept { return row_; }

private:
    std::size_t row_;
};

/// File system or parse failure.
class IoError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

} // namespace larn
