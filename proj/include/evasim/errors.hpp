#pragma once

#include <stdexcept>
#include <string>

namespace evasim {

struct EmptySetError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct NoIntegerError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct SchemaMismatchError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct EmptyDatasetError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct MisalignedHistoryError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct LengthMismatchError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct ParseError : std::runtime_error {
    ParseError(std::string msg, std::size_t line, std::size_t column)
        : std::runtime_error(msg + " (line " + std::to_string(line) + ", column " +
                             std::to_string(column) + ")"),
          line(line),
          column(column) {}
    std::size_t line;
    std::size_t column;
};

}  // namespace evasim
