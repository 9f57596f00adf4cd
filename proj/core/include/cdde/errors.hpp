#pragma once

#include <stdexcept>
#include <string>

namespace cdde {

/// Base class for all library errors.
struct Error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// kernels
struct DiracDensityUndefined : Error { using Error::Error; };
struct NegativeTime : Error { using Error::Error; };
struct LaplaceDiverges : Error { using Error::Error; };
struct InvalidTailMass : Error { using Error::Error; };
struct KernelConstructionError : Error { using Error::Error; };

// model / config
struct ModelError : Error { using Error::Error; };
struct ParseError : Error { using Error::Error; };
struct MissingParameter : Error { using Error::Error; };
struct UnknownParameter : Error { using Error::Error; };
struct InfeasibleParameters : Error { using Error::Error; };

// simulation
struct InsufficientHistory : Error { using Error::Error; };
struct StepTooLarge : Error { using Error::Error; };
struct OutOfSpan : Error { using Error::Error; };
struct UnsupportedKernel : Error { using Error::Error; };

// reduction
struct NonContiguousElimination : Error { using Error::Error; };

// stability
struct ZeroClearanceAtCandidate : Error { using Error::Error; };
struct PoleAtEvaluation : Error { using Error::Error; };
struct EquilibriumLostDuringSweep : Error { using Error::Error; };

} // namespace cdde
