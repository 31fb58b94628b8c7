#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace relrisk {

// Stable reason codes for domain failures. Preconditions on arguments
// (probabilities out of range, malformed input) are not domain failures
// and throw std::invalid_argument instead.
enum class errc {
    undefined_measure,
    not_closed,
    empty_margin,
    zero_cell,
    monotonicity_violated,
    empty_population,
    inconsistent_pattern,
    not_converged,
    separation_detected,
    collinear_design,
};

// Canonical display name, e.g. "UndefinedMeasure".
std::string_view errc_name(errc code) noexcept;

class Error : public std::runtime_error {
public:
    Error(errc code, const std::string& what_arg);

    errc code() const noexcept { return code_; }

private:
    errc code_;
};

// A requested transport would push the implied risk outside [0,1].
// The offending value is preserved for diagnostics; it is never clamped.
class NotClosedError : public Error {
public:
    NotClosedError(double implied, const std::string& what_arg);

    double implied() const noexcept { return implied_; }

private:
    double implied_;
};

}  // namespace relrisk
