#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace firuq {

/// Broad failure category; the CLI maps each one to a process exit code.
enum class ErrorKind {
    usage = 1,            ///< bad flags, bad configuration, invalid design spec
    data = 2,             ///< malformed or inconsistent input data
    numerical_limit = 3,  ///< a configured computational cap was exceeded
};

class Error : public std::runtime_error {
public:
    Error(ErrorKind kind, const std::string& what) : std::runtime_error(what), kind_(kind) {}
    [[nodiscard]] ErrorKind kind() const noexcept { return kind_; }

private:
    ErrorKind kind_;
};

/// Sequence lengths that must agree do not.
class InputShapeError : public Error {
public:
    explicit InputShapeError(const std::string& what) : Error(ErrorKind::data, what) {}
};

/// Input that makes the requested quantity undefined (all-zero taps, zero variance...).
class DegenerateError : public Error {
public:
    explicit DegenerateError(const std::string& what) : Error(ErrorKind::data, what) {}
};

/// Too many coefficients for the 2^(M+1)-term expansion.
class CombinatorialLimitError : public Error {
public:
    CombinatorialLimitError(std::size_t requested, std::size_t cap)
        : Error(ErrorKind::numerical_limit,
                "sign-term expansion needs " + std::to_string(requested) +
                    " coefficients but the cap is " + std::to_string(cap) +
                    " (raise the cap or use a larger dominance threshold)"),
          requested_(requested),
          cap_(cap) {}
    [[nodiscard]] std::size_t requested() const noexcept { return requested_; }
    [[nodiscard]] std::size_t cap() const noexcept { return cap_; }

private:
    std::size_t requested_;
    std::size_t cap_;
};

/// Filter design parameters violate a constraint.
class DesignError : public Error {
public:
    explicit DesignError(const std::string& what) : Error(ErrorKind::usage, what) {}
};

/// Index or window outside the valid range.
class BoundsError : public Error {
public:
    explicit BoundsError(const std::string& what) : Error(ErrorKind::data, what) {}
};

/// Too few samples for a statistic.
class SampleSizeError : public Error {
public:
    explicit SampleSizeError(const std::string& what) : Error(ErrorKind::data, what) {}
};

/// Structured parse failure. `offset` is a byte offset for binary formats and
/// a 1-based line number for text formats; `column` is 0 when not applicable.
class ParseError : public Error {
public:
    ParseError(const std::string& what, std::size_t offset, std::size_t column = 0)
        : Error(ErrorKind::data, what + " (at " + (column ? "line " : "byte ") +
                                     std::to_string(offset) +
                                     (column ? ", column " + std::to_string(column) : "") + ")"),
          offset_(offset),
          column_(column) {}
    [[nodiscard]] std::size_t offset() const noexcept { return offset_; }
    [[nodiscard]] std::size_t column() const noexcept { return column_; }

private:
    std::size_t offset_;
    std::size_t column_;
};

}  // namespace firuq
