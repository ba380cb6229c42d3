#pragma once

#include <stdexcept>
#include <string>

namespace mixedsolve {

/// Base of every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

#define MIXEDSOLVE_DEFINE_ERROR(Name) \
  class Name : public Error {         \
   public:                            \
    using Error::Error;               \
  }

MIXEDSOLVE_DEFINE_ERROR(GeometryError);
MIXEDSOLVE_DEFINE_ERROR(DomainError);
MIXEDSOLVE_DEFINE_ERROR(ConfigError);
MIXEDSOLVE_DEFINE_ERROR(SingularityError);
MIXEDSOLVE_DEFINE_ERROR(MarchingError);
MIXEDSOLVE_DEFINE_ERROR(DataError);
MIXEDSOLVE_DEFINE_ERROR(DivergenceError);
MIXEDSOLVE_DEFINE_ERROR(QuadratureError);
MIXEDSOLVE_DEFINE_ERROR(GluingResidualError);
MIXEDSOLVE_DEFINE_ERROR(BoundViolation);
MIXEDSOLVE_DEFINE_ERROR(IterationBudgetError);
MIXEDSOLVE_DEFINE_ERROR(ResolutionError);
MIXEDSOLVE_DEFINE_ERROR(ConstructionError);

#undef MIXEDSOLVE_DEFINE_ERROR

}  // namespace mixedsolve
