// errors.hpp
#pragma once

#include <stdexcept>
#include <string>

namespace phase_bandit {

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

#define PHASE_BANDIT_ERROR(Name)                 \
  class Name : public Error {                    \
   public:                                       \
    explicit Name(const std::string& what)       \
        : Error(std::string(#Name ": ") + what) {} \
  }

PHASE_BANDIT_ERROR(InvalidDimension);
PHASE_BANDIT_ERROR(EmptyComplement);
PHASE_BANDIT_ERROR(InvalidBasis);
PHASE_BANDIT_ERROR(ContractViolation);
PHASE_BANDIT_ERROR(BudgetExhausted);
PHASE_BANDIT_ERROR(InvalidProblem);
PHASE_BANDIT_ERROR(UnsupportedDimension);
PHASE_BANDIT_ERROR(InfeasibleRadius);
PHASE_BANDIT_ERROR(DegenerateRatio);
PHASE_BANDIT_ERROR(InvalidArgument);
PHASE_BANDIT_ERROR(ConfigError);
PHASE_BANDIT_ERROR(IoError);
PHASE_BANDIT_ERROR(ParseError);

#undef PHASE_BANDIT_ERROR

}  // namespace phase_bandit
