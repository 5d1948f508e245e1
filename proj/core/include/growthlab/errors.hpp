#pragma once
#include <stdexcept>

namespace growthlab {

// Base class for all library errors.
struct Error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Construction-time contract violations (bad weights, negative density, ...).
struct ValidationError : Error { using Error::Error; };
// Argument outside the domain of an operation.
struct DomainError : Error { using Error::Error; };

// measures
struct NonPositiveMass : Error { using Error::Error; };
struct MomentUndecidable : Error { using Error::Error; };
struct WrongSupport : Error { using Error::Error; };
struct BadWindow : Error { using Error::Error; };

// nonlinearity
struct BadTheta : Error { using Error::Error; };
struct LambdaMismatch : Error { using Error::Error; };
struct NonMonotoneTail : Error { using Error::Error; };
struct InconclusiveTrend : Error { using Error::Error; };

// dynamics
struct StepTooLarge : Error { using Error::Error; };
struct NonPositiveHistory : Error { using Error::Error; };
struct OverflowGuard : Error { using Error::Error; };

// asymptotics
struct WrongRegime : Error { using Error::Error; };

// cli / configuration
struct ConfigError : Error { using Error::Error; };

}  // namespace growthlab
