#pragma once

#include <stdexcept>
#include <string>

namespace bubbledyn {

enum class ErrorCode {
    invalid_argument,
    domain,
    degenerate,
    alignment,
    io,
    parse,
    fit,
};

[[nodiscard]] const char* to_string(ErrorCode code) noexcept;

/// Base of every exception the library throws. The code maps 1:1 onto the
/// C API status values.
class Error : public std::runtime_error {
public:
    Error(ErrorCode code, const std::string& message)
        : std::runtime_error(message), code_(code) {}

    [[nodiscard]] ErrorCode code() const noexcept { return code_; }

private:
    ErrorCode code_;
};

class DomainError : public Error {
public:
    explicit DomainError(const std::string& message) : Error(ErrorCode::domain, message) {}
};

class DegenerateInputError : public Error {
public:
    explicit DegenerateInputError(const std::string& message) : Error(ErrorCode::degenerate, message) {}
};

class AlignmentError : public Error {
public:
    explicit AlignmentError(const std::string& message) : Error(ErrorCode::alignment, message) {}
};

class InvalidArgument : public Error {
public:
    explicit InvalidArgument(const std::string& message) : Error(ErrorCode::invalid_argument, message) {}
};

class IoError : public Error {
public:
    explicit IoError(const std::string& message) : Error(ErrorCode::io, message) {}
};

class ParseError : public Error {
public:
    explicit ParseError(const std::string& message) : Error(ErrorCode::parse, message) {}
};

}  // namespace bubbledyn
