#include "dcrp/error.hpp"

namespace dcrp {

const char* to_string(ErrorKind kind) {
    switch (kind) {
    case ErrorKind::Parse: return "ParseError";
    case ErrorKind::UnsupportedHorizon: return "UnsupportedHorizon";
    case ErrorKind::NoNormalizers: return "NoNormalizers";
    case ErrorKind::NoSolution: return "NoSolution";
    case ErrorKind::WrongClass: return "WrongClass";
    case ErrorKind::Domain: return "DomainError";
    case ErrorKind::TooFewTables: return "TooFewTables";
    case ErrorKind::ScheduleInfeasible: return "ScheduleInfeasible";
    case ErrorKind::BudgetExceeded: return "BudgetExceeded";
    }
    return "Error";
}

} // namespace dcrp
