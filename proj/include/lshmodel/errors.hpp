#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace lshmodel {

// Argument outside an operation's domain: std::domain_error.
// Request too large for an exact enumeration or raster grid.
class CapacityError : public std::length_error {
public:
    using std::length_error::length_error;
};

// Malformed point file. `row()` is 1-based and counts the header line.
class ParseError : public std::runtime_error {
public:
    ParseError(std::size_t row, const std::string& what)
        : std::runtime_error("row " + std::to_string(row) + ": " + what), row_(row) {}

    std::size_t row() const noexcept { return row_; }

private:
    std::size_t row_;
};

} // namespace lshmodel
