#pragma once

#include <stdexcept>
#include <string>

namespace kantor {

// Base class for all library errors. Infinite transfer values are NOT
// errors; they are first-class results (see ExtReal).
class Error : public std::runtime_error {
 public:
  explicit Error(const std::string& what) : std::runtime_error(what) {}
};

#define KANTOR_DEFINE_ERROR(Name)                                 \
  class Name : public Error {                                     \
   public:                                                        \
    explicit Name(const std::string& what) : Error(#Name ": " + what) {} \
  }

KANTOR_DEFINE_ERROR(DimensionMismatch);
KANTOR_DEFINE_ERROR(NotAProbability);
KANTOR_DEFINE_ERROR(NegativeMass);
KANTOR_DEFINE_ERROR(NoEmbedding);
KANTOR_DEFINE_ERROR(SpaceMismatch);
KANTOR_DEFINE_ERROR(SpaceChainMismatch);
KANTOR_DEFINE_ERROR(ArithmeticError);   // (+inf) + (-inf) and friends
KANTOR_DEFINE_ERROR(Malformed);
KANTOR_DEFINE_ERROR(NumericalFailure);
KANTOR_DEFINE_ERROR(FwNoConverge);
KANTOR_DEFINE_ERROR(Infeasible);
KANTOR_DEFINE_ERROR(NonStandard);
KANTOR_DEFINE_ERROR(NotStandard);
KANTOR_DEFINE_ERROR(NonPositiveLambda);
KANTOR_DEFINE_ERROR(BadEpsilon);
KANTOR_DEFINE_ERROR(DivergentDual);
KANTOR_DEFINE_ERROR(NotAttained);
KANTOR_DEFINE_ERROR(CandidateSetTooSmall);
KANTOR_DEFINE_ERROR(OrderFails);
KANTOR_DEFINE_ERROR(EmptyRow);
KANTOR_DEFINE_ERROR(IterationDiverges);
KANTOR_DEFINE_ERROR(NegativeFunction);
KANTOR_DEFINE_ERROR(NotCommon);
KANTOR_DEFINE_ERROR(NotCompactlyStandard);
KANTOR_DEFINE_ERROR(SizeCap);

#undef KANTOR_DEFINE_ERROR

}  // namespace kantor
