#pragma once

#include <stdexcept>
#include <string>

namespace spinpointer {

/// Base class for all domain errors raised by this library.
struct Error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Pre/post selection states are (numerically) orthogonal; the weak value diverges.
struct ZeroOverlap : Error {
    using Error::Error;
};

/// Adaptive integration failed to reach the requested tolerance.
struct QuadratureFailure : Error {
    using Error::Error;
};

/// Post-selection probability fell below the configured floor.
struct VanishingPostselection : Error {
    using Error::Error;
};

/// First-order formulas are singular at theta = 0 mod pi.
struct AngleSingularity : Error {
    using Error::Error;
};

/// sin(theta_i)/n >= 1; no transmitted wave (cannot occur for external reflection).
struct TotalInternalReflection : Error {
    using Error::Error;
};

/// r_p is (numerically) zero; the spin Hall shift diverges.
struct BrewsterSingularity : Error {
    using Error::Error;
};

/// A binary outcome probability hit 0 or 1; Fisher information undefined.
struct DegenerateOutcome : Error {
    using Error::Error;
};

/// The supplied search interval does not bracket a monotonic signal branch.
struct NonMonotonicInterval : Error {
    using Error::Error;
};

/// A pixel frame contained no counts.
struct EmptyFrame : Error {
    using Error::Error;
};

/// Config document is syntactically malformed (message carries line and key).
struct ParseError : Error {
    using Error::Error;
};

/// Config document violates a declared invariant.
struct ValidationError : Error {
    using Error::Error;
};

/// Filesystem failure while writing artifacts.
struct IoError : Error {
    using Error::Error;
};

}  // namespace spinpointer
