#pragma once

#include <stdexcept>
#include <string>

namespace onedim {

// Every library error derives from Error so callers can map it to an exit code.
struct Error : std::runtime_error {
  using std::runtime_error::runtime_error;
  virtual const char* kind() const noexcept = 0;
  virtual bool numerical() const noexcept { return true; }
};

#define ONEDIM_ERROR(Name, tag, is_numerical)                         \
  struct Name : Error {                                               \
    using Error::Error;                                               \
    const char* kind() const noexcept override { return tag; }        \
    bool numerical() const noexcept override { return is_numerical; } \
  };

ONEDIM_ERROR(InvalidParameter, "invalid_parameter", false)
ONEDIM_ERROR(LookupError, "lookup_error", false)
ONEDIM_ERROR(AmbiguousSteadyState, "ambiguous_steady_state", true)
ONEDIM_ERROR(ConvergenceError, "convergence_error", true)
ONEDIM_ERROR(DegenerateSignal, "degenerate_signal", true)
ONEDIM_ERROR(SingularGenerator, "singular_generator", true)
ONEDIM_ERROR(PoleError, "pole_error", true)
ONEDIM_ERROR(TruncationError, "truncation_error", true)
ONEDIM_ERROR(UndefinedAmplitude, "undefined_amplitude", true)

#undef ONEDIM_ERROR

}  // namespace onedim
