#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace somos {

enum class ErrorCode {
    InvalidArgument,
    OutOfRange,
    NotRepresentable,
    GapPoint,
    UnsupportedBase,
    OutOfDomain,
    PrecisionUnreachable,
    ResourceLimit,
};

std::string_view to_string(ErrorCode code) noexcept;

// Every library failure is reported through this type; `code()` lets callers
// (the CLI in particular) map failures onto exit codes without string matching.
class Error : public std::runtime_error {
public:
    Error(ErrorCode code, const std::string& what)
        : std::runtime_error(std::string(to_string(code)) + ": " + what), code_(code) {}

    ErrorCode code() const noexcept { return code_; }

private:
    ErrorCode code_;
};

} // namespace somos
