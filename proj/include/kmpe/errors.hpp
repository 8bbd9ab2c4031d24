#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace kmpe {

/// Malformed arguments: dimension mismatch, empty sets, out-of-range parameters.
class InputError : public std::invalid_argument {
public:
    explicit InputError(const std::string& what) : std::invalid_argument(what) {}
};

/// Data that admits no meaningful answer, e.g. every point identical.
class DegenerateDataError : public std::runtime_error {
public:
    explicit DegenerateDataError(const std::string& what) : std::runtime_error(what) {}
};

/// CSV / config parse failure. `row()` is 1-based, 0 when not tied to a row.
class ParseError : public std::runtime_error {
public:
    ParseError(const std::string& what, std::size_t row);
    std::size_t row() const noexcept { return row_; }

private:
    std::size_t row_;
};

/// File could not be opened, read or written.
class IoError : public std::runtime_error {
public:
    explicit IoError(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace kmpe
