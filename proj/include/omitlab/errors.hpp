#pragma once

#include <stdexcept>
#include <string>

// Exception taxonomy for the simulator.  Every failure mode a caller can
// meaningfully react to gets its own type; the CLI maps them to exit codes
// (config errors -> 2, numerical failures -> 3, precondition violations -> 4).

namespace omitlab {

// Common base so callers can catch all library errors in one handler.
class OmitError : public std::runtime_error {
public:
    explicit OmitError(const std::string& msg) : std::runtime_error(msg) {}
};

// --- configuration / input errors (exit code 2) ---

// Malformed config text; carries the 1-based line number where parsing failed.
class ParseError : public OmitError {
public:
    ParseError(const std::string& msg, int line)
        : OmitError(msg + " (line " + std::to_string(line) + ")"), line_number(line) {}
    int line_number;
};

// Structurally valid config whose values violate a documented invariant.
class ValidationError : public OmitError {
public:
    explicit ValidationError(const std::string& msg) : OmitError(msg) {}
};

// --- numerical failures (exit code 3) ---

// Linear solve abandoned because the system matrix is ill-conditioned.
class SingularSystem : public OmitError {
public:
    SingularSystem(const std::string& msg, double condition_number)
        : OmitError(msg), condition(condition_number) {}
    double condition;
};

// Iterative fit exceeded its iteration budget; carries the last iterate so
// callers can inspect how far it got.
class NoConvergence : public OmitError {
public:
    NoConvergence(const std::string& msg, int iters,
                  double last_center_hz, double last_fwhm_hz, double last_depth)
        : OmitError(msg), iterations(iters), center_hz(last_center_hz),
          fwhm_hz(last_fwhm_hz), depth(last_depth) {}
    int iterations;
    double center_hz;   // last iterate: dip center, Hz
    double fwhm_hz;     // last iterate: full width, Hz
    double depth;       // last iterate: dip depth, dimensionless
};

// --- precondition violations (exit code 4) ---

// Argument outside the mathematical domain of a formula (e.g. |r_m| >= 1).
class DomainError : public OmitError {
public:
    explicit DomainError(const std::string& msg) : OmitError(msg) {}
};

// Physical model used outside its regime of validity (e.g. gas damping above
// the free-molecular-flow pressure ceiling).
class OutOfValidityRange : public OmitError {
public:
    explicit OutOfValidityRange(const std::string& msg) : OmitError(msg) {}
};

// Requested sampling grid cannot resolve the feature being computed.
class GridTooCoarse : public OmitError {
public:
    explicit GridTooCoarse(const std::string& msg) : OmitError(msg) {}
};

// Too few samples inside the dip for a linewidth measurement.
class DipNotResolved : public OmitError {
public:
    explicit DipNotResolved(const std::string& msg) : OmitError(msg) {}
};

// Time series sampled too slowly for the requested demodulation frequency.
class AliasError : public OmitError {
public:
    explicit AliasError(const std::string& msg) : OmitError(msg) {}
};

// Lock-in integration window shorter than the documented minimum.
class WindowTooShort : public OmitError {
public:
    explicit WindowTooShort(const std::string& msg) : OmitError(msg) {}
};

// Input that makes the requested statistic undefined (e.g. zero covariance).
class DegenerateInput : public OmitError {
public:
    explicit DegenerateInput(const std::string& msg) : OmitError(msg) {}
};

} // namespace omitlab
