#include "relrisk/error.hpp"

namespace relrisk {

std::string_view errc_name(errc code) noexcept {
    switch (code) {
        case errc::undefined_measure: return "UndefinedMeasure";
        case errc::not_closed: return "NotClosed";
        case errc::empty_margin: return "EmptyMargin";
        case errc::zero_cell: return "ZeroCell";
        case errc::monotonicity_violated: return "MonotonicityViolated";
        case errc::empty_population: return "EmptyPopulation";
        case errc::inconsistent_pattern: return "InconsistentPattern";
        case errc::not_converged: return "NotConverged";
        case errc::separation_detected: return "SeparationDetected";
        case errc::collinear_design: return "CollinearDesign";
    }
    return "UnknownError";
}

Error::Error(errc code, const std::string& what_arg)
    : std::runtime_error(std::string(errc_name(code)) + ": " + what_arg), code_(code) {}

NotClosedError::NotClosedError(double implied, const std::string& what_arg)
    : Error(errc::not_closed, what_arg), implied_(implied) {}

}  // namespace relrisk
