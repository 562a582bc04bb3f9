#include "toricgh/error.hpp"

namespace toricgh {

std::string_view to_string(ErrorKind kind) {
    switch (kind) {
        case ErrorKind::InvalidInput: return "InvalidInput";
        case ErrorKind::Unbounded: return "Unbounded";
        case ErrorKind::Empty: return "Empty";
        case ErrorKind::Degenerate: return "Degenerate";
        case ErrorKind::DimensionMismatch: return "DimensionMismatch";
        case ErrorKind::BadK: return "BadK";
        case ErrorKind::BadBound: return "BadBound";
        case ErrorKind::AssumptionViolated: return "AssumptionViolated";
        case ErrorKind::SolverDiverged: return "SolverDiverged";
        case ErrorKind::BoundaryOrExterior: return "BoundaryOrExterior";
        case ErrorKind::BadConfig: return "BadConfig";
        case ErrorKind::TooLarge: return "TooLarge";
        case ErrorKind::NormalFanMismatch: return "NormalFanMismatch";
        case ErrorKind::NotDelzant: return "NotDelzant";
        case ErrorKind::UnknownTestFunction: return "UnknownTestFunction";
    }
    return "Unknown";
}

}  // namespace toricgh
