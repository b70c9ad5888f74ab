#include "skt/error.hpp"

#include <sstream>

namespace skt {

std::string_view to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::NonPositiveDiffusion: return "NonPositiveDiffusion";
    case ErrorCode::NegativeRate: return "NegativeRate";
    case ErrorCode::InvalidGrid: return "InvalidGrid";
    case ErrorCode::NegativeInitialData: return "NegativeInitialData";
    case ErrorCode::NonPositiveWidth: return "NonPositiveWidth";
    case ErrorCode::NonPositiveRadicand: return "NonPositiveRadicand";
    case ErrorCode::NonFiniteState: return "NonFiniteState";
    case ErrorCode::InvalidSolverConfig: return "InvalidSolverConfig";
    case ErrorCode::CFLViolation: return "CFLViolation";
    case ErrorCode::NoConvergence: return "NoConvergence";
    case ErrorCode::GridMismatch: return "GridMismatch";
    case ErrorCode::InvalidConfig: return "InvalidConfig";
  }
  return "Unknown";
}

namespace {
std::string cfl_message(double requested, double admissible) {
  std::ostringstream os;
  os.precision(17);
  os << "time step " << requested << " exceeds the stability bound; admissible step <= "
     << admissible;
  return os.str();
}
}  // namespace

CflViolation::CflViolation(double requested, double admissible)
    : Error(ErrorCode::CFLViolation, cfl_message(requested, admissible)),
      requested_(requested),
      admissible_(admissible) {}

}  // namespace skt
