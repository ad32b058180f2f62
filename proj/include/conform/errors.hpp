#pragma once

// Exception hierarchy shared by every layer of the harness.
//
// Everything derives from conform::Error so callers (the CLI in particular)
// can map "no valid verdict" conditions onto a single exit path. Infeasible
// plans are NOT an error: optimize_plan reports them as an empty optional.

#include <stdexcept>
#include <string>

namespace conform {

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

#define CONFORM_DEFINE_ERROR(Name)          \
  class Name : public Error {               \
   public:                                  \
    using Error::Error;                     \
  }

// core-model
CONFORM_DEFINE_ERROR(UnsupportedRequirement);
CONFORM_DEFINE_ERROR(IncompleteResults);
CONFORM_DEFINE_ERROR(InvalidVerdict);
CONFORM_DEFINE_ERROR(InvalidRequirement);
CONFORM_DEFINE_ERROR(ClaimCheckFailed);

// sut-sim
CONFORM_DEFINE_ERROR(ConfigError);
CONFORM_DEFINE_ERROR(DimensionMismatch);
CONFORM_DEFINE_ERROR(UnknownPrincipal);
CONFORM_DEFINE_ERROR(UnknownObject);
CONFORM_DEFINE_ERROR(UnknownLabelRank);
CONFORM_DEFINE_ERROR(UnknownArea);
CONFORM_DEFINE_ERROR(SentinelNotPlaced);
CONFORM_DEFINE_ERROR(UnknownPid);
CONFORM_DEFINE_ERROR(AlphabetViolation);
CONFORM_DEFINE_ERROR(UnknownFile);
CONFORM_DEFINE_ERROR(DefectParseError);

// method modules
CONFORM_DEFINE_ERROR(IndexOutOfRange);
CONFORM_DEFINE_ERROR(FixtureError);

// optimizer
CONFORM_DEFINE_ERROR(InvalidStrength);
CONFORM_DEFINE_ERROR(CoveringArrayTooLarge);
CONFORM_DEFINE_ERROR(Overflow);

// cli-report
CONFORM_DEFINE_ERROR(PlanFormatError);

#undef CONFORM_DEFINE_ERROR

}  // namespace conform
