// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace shear {

enum class ErrorCode {
    OutOfDomain,
    OrderUnavailable,
    EmptyGrid,
    InvalidArgument,
    DegenerateProfile,
    InvalidGrid,
    LengthMismatch,
    ZeroVector,
    SingularMatrix,
    NoConvergence,
    WindowTooSmall,
    GridMismatch,
    InsufficientRows,
    FactorCheckFailed,
    GridTooLarge,
    ConfigError,
    IoFailure,
    EdgeNotDecayed,
};

std::string_view to_string(ErrorCode code);

class Error : public std::runtime_error {
public:
    Error(ErrorCode code, const std::string& what)
        : std::runtime_error(std::string(to_string(code)) + ": " + what), code_(code)
    {
    }

    ErrorCode code() const noexcept { return code_; }

private:
    ErrorCode code_;
};

// Numerical failures get their own type so the CLI can map them to exit code 3.
class NumericalError : public Error {
public:
    using Error::Error;
};

[[noreturn]] inline void fail(ErrorCode code, const std::string& what)
{
    throw Error(code, what);
}

inline void require(bool cond, ErrorCode code, const std::string& what)
{
    if (!cond) fail(code, what);
}

} // namespace shear
