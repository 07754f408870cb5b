#pragma once

#include <stdexcept>
#include <string>

namespace bcropt {

/// Base class for all library errors.
struct Error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// lp-core
struct MalformedProgram : Error {
  using Error::Error;
};
struct NumericalBreakdown : Error {
  using Error::Error;
};

// mip-solver
struct EnumerationTooLarge : Error {
  using Error::Error;
};
struct LimitExceeded : Error {
  explicit LimitExceeded(const std::string& what, bool has_incumbent_)
      : Error(what), has_incumbent(has_incumbent_) {}
  bool has_incumbent = false;
};

// fractional-solver
struct InfeasibleModel : Error {
  using Error::Error;
};
struct DenominatorViolation : Error {
  using Error::Error;
};
struct InfeasiblePoint : Error {
  using Error::Error;
};
struct NonpositiveDenominator : Error {
  using Error::Error;
};

// rhy-model
struct InfeasibleWindow : Error {
  using Error::Error;
};
struct MissingParameter : Error {
  using Error::Error;
};
struct DimensionMismatch : Error {
  using Error::Error;
};
struct OutOfWindow : Error {
  using Error::Error;
};
struct NotACandidate : Error {
  using Error::Error;
};

// instance-gen
struct ConfigInvalid : Error {
  using Error::Error;
};
struct IoError : Error {
  using Error::Error;
};
struct SchemaVersionMismatch : Error {
  using Error::Error;
};
struct ValidationError : Error {
  using Error::Error;
};

// experiment-harness
struct InfeasibleLambda : Error {
  using Error::Error;
};
struct InvalidScenario : Error {
  using Error::Error;
};
struct ScenarioFailure : Error {
  using Error::Error;
};

}  // namespace bcropt
