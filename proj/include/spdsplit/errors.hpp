#pragma once

#include <stdexcept>
#include <string>

namespace spdsplit {

enum class ErrorCode {
  InvalidArgument,
  DimensionMismatch,
  NotPositiveDefinite,
  PatternOutsideBand,
  RankDeficientBasis,
  NotInvariantSubspace,
  NotOrthogonal,
  Infeasible,
  LineSearchFailure,
  MaxIterations,
  SuspectedInfeasibleSubspace,
  ProvenInfeasibleSubspace,
  NoObviousDualStart,
  SingularJacobian,
  ParseError,
  IoError,
};

const char* errorCodeName(ErrorCode code);

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(what), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

[[noreturn]] inline void fail(ErrorCode code, const std::string& what) {
  throw Error(code, what);
}

}  // namespace spdsplit
