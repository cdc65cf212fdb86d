#pragma once

#include <stdexcept>
#include <string>

namespace hirank {

enum class ErrorCode {
  NonPrime,
  UnsupportedField,
  DimensionMismatch,
  SyntaxError,
  UnknownVariable,
  InfeasibleSearch,
  CharTwo,
  NotQuadratic,
  DegenerateSampling,
  BudgetExceeded,
  VertexOutsideDomain,
  EmptyFiber,
  BasepointNotOnVariety,
  PreconditionViolated,
  NoSolutionFound,
  DegenerateSquare,
  RankTooLow,
  NoMajority,
  InconsistentRepresentations,
  EmptyZ,
  NoX0Found,
  InconsistentFit,
  ConfigError,
  IOError,
  InvalidArgument,
};

const char* error_name(ErrorCode code);

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(std::string(error_name(code)) + ": " + what), code_(code) {}
  ErrorCode code() const { return code_; }

 private:
  ErrorCode code_;
};

[[noreturn]] inline void fail(ErrorCode code, const std::string& what) { throw Error(code, what); }

}  // namespace hirank
