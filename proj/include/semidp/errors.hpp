#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace semidp {

/// Category of a failure. The CLI maps these onto process exit codes.
enum class ErrorKind {
    usage,      // bad call: descriptor mismatch, unknown element, non-dioid...
    parse,      // malformed input text
    legality,   // structural-legality or validation failure
    overflow,   // 64-bit cost overflow
    resource,   // enumeration or materialization budget exceeded
    mismatch,   // solver and oracle disagree
};

class Error : public std::runtime_error {
public:
    Error(ErrorKind kind, const std::string& what) : std::runtime_error(what), kind_(kind) {}
    ErrorKind kind() const noexcept { return kind_; }

private:
    ErrorKind kind_;
};

struct UsageError : Error {
    explicit UsageError(const std::string& what) : Error(ErrorKind::usage, what) {}
};

struct LegalityError : Error {
    explicit LegalityError(const std::string& what) : Error(ErrorKind::legality, what) {}
};

struct OverflowError : Error {
    explicit OverflowError(const std::string& what) : Error(ErrorKind::overflow, what) {}
};

struct ResourceError : Error {
    explicit ResourceError(const std::string& what) : Error(ErrorKind::resource, what) {}
};

struct MismatchError : Error {
    explicit MismatchError(const std::string& what) : Error(ErrorKind::mismatch, what) {}
};

struct ParseError : Error {
    /// Error without a source position (semantic checks after parsing).
    explicit ParseError(const std::string& what) : Error(ErrorKind::parse, what), line(0), column(0) {}

    ParseError(const std::string& what, std::size_t line, std::size_t column)
        : Error(ErrorKind::parse, std::to_string(line) + ":" + std::to_string(column) + ": " + what),
          line(line), column(column) {}

    std::size_t line;
    std::size_t column;
};

}  // namespace semidp
