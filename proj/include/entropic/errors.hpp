#pragma once

#include <stdexcept>
#include <string>

namespace entropic {

// Every failure mode the engines can report. Validation-class codes map to
// CLI exit code 2, solver-class codes to exit code 3.
enum class Errc {
    NonPositiveProbability,
    ProbabilitySumMismatch,
    DanglingNode,
    NumeraireNotOne,
    StrategyTreeMismatch,
    ClaimTreeMismatch,
    DimensionMismatch,
    NoMartingaleMeasure,
    NewtonDivergence,
    GammaOutOfRange,
    SingularGram,
    TreeMismatch,
    ReplicableCombination,
    DegenerateClaim,
    QuadratureNotConverged,
    GridTooLarge,
    ParseError,
    SchemaViolation,
    IoError,
};

class Error : public std::runtime_error {
  public:
    Error(Errc code, const std::string& what) : std::runtime_error(what), code_(code) {}
    Errc code() const { return code_; }

  private:
    Errc code_;
};

inline const char* errc_name(Errc c) {
    switch (c) {
        case Errc::NonPositiveProbability: return "NonPositiveProbability";
        case Errc::ProbabilitySumMismatch: return "ProbabilitySumMismatch";
        case Errc::DanglingNode: return "DanglingNode";
        case Errc::NumeraireNotOne: return "NumeraireNotOne";
        case Errc::StrategyTreeMismatch: return "StrategyTreeMismatch";
        case Errc::ClaimTreeMismatch: return "ClaimTreeMismatch";
        case Errc::DimensionMismatch: return "DimensionMismatch";
        case Errc::NoMartingaleMeasure: return "NoMartingaleMeasure";
        case Errc::NewtonDivergence: return "NewtonDivergence";
        case Errc::GammaOutOfRange: return "GammaOutOfRange";
        case Errc::SingularGram: return "SingularGram";
        case Errc::TreeMismatch: return "TreeMismatch";
        case Errc::ReplicableCombination: return "ReplicableCombination";
        case Errc::DegenerateClaim: return "DegenerateClaim";
        case Errc::QuadratureNotConverged: return "QuadratureNotConverged";
        case Errc::GridTooLarge: return "GridTooLarge";
        case Errc::ParseError: return "ParseError";
        case Errc::SchemaViolation: return "SchemaViolation";
        case Errc::IoError: return "IoError";
    }
    return "Unknown";
}

// True for input/shape problems, false for numerical solver failures.
inline bool is_validation_error(Errc c) {
    switch (c) {
        case Errc::NoMartingaleMeasure:
        case Errc::NewtonDivergence:
        case Errc::SingularGram:
        case Errc::DegenerateClaim:
        case Errc::QuadratureNotConverged:
        case Errc::GridTooLarge:
            return false;
        default:
            return true;
    }
}

[[noreturn]] inline void raise(Errc code, const std::string& what) {
    throw Error(code, std::string(errc_name(code)) + ": " + what);
}

} // namespace entropic
