#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace effstab {

// Root of every domain error raised by the library. `name()` is the stable
// category string that reports and the CLI surface to callers.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
  [[nodiscard]] virtual const char* name() const noexcept = 0;
};

#define EFFSTAB_DEFINE_ERROR(Type)                                   \
  class Type : public Error {                                        \
   public:                                                           \
    using Error::Error;                                              \
    [[nodiscard]] const char* name() const noexcept override {       \
      return #Type;                                                  \
    }                                                                \
  }

// A risk, weight or measure value lies outside its admissible range.
EFFSTAB_DEFINE_ERROR(InvalidArgument);
// A measure's denominator vanishes for the given risk pair.
EFFSTAB_DEFINE_ERROR(UndefinedMeasure);
EFFSTAB_DEFINE_ERROR(WeightError);
EFFSTAB_DEFINE_ERROR(UnknownModifier);
EFFSTAB_DEFINE_ERROR(IncoherentMechanism);
EFFSTAB_DEFINE_ERROR(NotMonotone);
EFFSTAB_DEFINE_ERROR(DependencePresent);
EFFSTAB_DEFINE_ERROR(InfeasibleDependence);
EFFSTAB_DEFINE_ERROR(Infeasible);
EFFSTAB_DEFINE_ERROR(ValidationError);

#undef EFFSTAB_DEFINE_ERROR

// An effect function mapped a baseline risk outside [0,1].
class InvalidPrediction : public Error {
 public:
  InvalidPrediction(const std::string& message, double raw_value)
      : Error(message), raw_value_(raw_value) {}
  [[nodiscard]] const char* name() const noexcept override {
    return "InvalidPrediction";
  }
  [[nodiscard]] double raw_value() const noexcept { return raw_value_; }

 private:
  double raw_value_;
};

class ParseError : public Error {
 public:
  ParseError(const std::string& message, std::size_t line)
      : Error("line " + std::to_string(line) + ": " + message), line_(line) {}
  [[nodiscard]] const char* name() const noexcept override {
    return "ParseError";
  }
  [[nodiscard]] std::size_t line() const noexcept { return line_; }

 private:
  std::size_t line_;
};

}  // namespace effstab
