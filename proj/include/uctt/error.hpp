#pragma once

#include <stdexcept>
#include <string>

namespace uctt {

struct Error : std::runtime_error {
  explicit Error(const std::string& m) : std::runtime_error(m) {}
};

#define UCTT_ERROR(Name)                                  \
  struct Name : Error {                                   \
    explicit Name(const std::string& m) : Error(#Name ": " + m) {} \
  }

UCTT_ERROR(TypeMismatch);
UCTT_ERROR(UnboundIndex);
UCTT_ERROR(NotASubtype);
UCTT_ERROR(NotAProgramFormula);
UCTT_ERROR(IllegalSubstitution);
UCTT_ERROR(NotARenaming);
UCTT_ERROR(NotFlex);
UCTT_ERROR(RuleShapeMismatch);
UCTT_ERROR(LevelViolation);
UCTT_ERROR(NoUnifier);
UCTT_ERROR(NonPatternProblem);
UCTT_ERROR(OccursCheck);
UCTT_ERROR(HypothesisUnmet);
UCTT_ERROR(CertificateMismatch);
UCTT_ERROR(NotSingleState);
UCTT_ERROR(NotUniform);
UCTT_ERROR(SyntaxError);
UCTT_ERROR(TypeError);
UCTT_ERROR(UnknownSymbol);

#undef UCTT_ERROR

}  // namespace uctt
