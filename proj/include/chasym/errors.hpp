#pragma once

#include <stdexcept>
#include <string>

namespace chasym {

// Base for every numerical or contract failure raised by the library.
// name() is the stable identifier surfaced by the CLI.
class Error : public std::runtime_error {
 public:
  Error(std::string name, const std::string& what)
      : std::runtime_error(what), name_(std::move(name)) {}

  const std::string& name() const noexcept { return name_; }

 private:
  std::string name_;
};

#define CHASYM_DEFINE_ERROR(Type)                                  \
  class Type : public Error {                                      \
   public:                                                         \
    explicit Type(const std::string& what) : Error(#Type, what) {} \
  }

CHASYM_DEFINE_ERROR(DimensionError);
CHASYM_DEFINE_ERROR(InvalidChannel);
CHASYM_DEFINE_ERROR(ConvergenceError);
CHASYM_DEFINE_ERROR(SingularRestriction);
CHASYM_DEFINE_ERROR(NotCompletelyPositive);
CHASYM_DEFINE_ERROR(PeripheralJordanError);
CHASYM_DEFINE_ERROR(IrrationalPhase);
CHASYM_DEFINE_ERROR(EigenvalueCollision);
CHASYM_DEFINE_ERROR(CornerConditionError);
CHASYM_DEFINE_ERROR(DegenerateProbe);
CHASYM_DEFINE_ERROR(NonCanonicalShape);
CHASYM_DEFINE_ERROR(NotRecoveryForm);
CHASYM_DEFINE_ERROR(ConstructionError);
CHASYM_DEFINE_ERROR(NotCanonical);
CHASYM_DEFINE_ERROR(CannotCanonicalize);
CHASYM_DEFINE_ERROR(DegenerateBoundary);

#undef CHASYM_DEFINE_ERROR

}  // namespace chasym
