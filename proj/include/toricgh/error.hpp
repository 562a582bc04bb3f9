#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace toricgh {

enum class ErrorKind {
    InvalidInput,
    Unbounded,
    Empty,
    Degenerate,
    DimensionMismatch,
    BadK,
    BadBound,
    AssumptionViolated,
    SolverDiverged,
    BoundaryOrExterior,
    BadConfig,
    TooLarge,
    NormalFanMismatch,
    NotDelzant,
    UnknownTestFunction,
};

std::string_view to_string(ErrorKind kind);

/// The single exception type thrown by the library; callers branch on kind().
class Error : public std::runtime_error {
public:
    Error(ErrorKind kind, const std::string& message)
        : std::runtime_error(std::string(to_string(kind)) + ": " + message), kind_(kind) {}

    ErrorKind kind() const noexcept { return kind_; }

private:
    ErrorKind kind_;
};

[[noreturn]] inline void fail(ErrorKind kind, const std::string& message) { throw Error(kind, message); }

}  // namespace toricgh
