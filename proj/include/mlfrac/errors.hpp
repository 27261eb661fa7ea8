#pragma once

#include <stdexcept>
#include <string>

namespace mlfrac {

/// Base of every error raised by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
    virtual const char* name() const noexcept { return "Error"; }
};

#define MLFRAC_DEFINE_ERROR(Type)                                          \
    class Type : public Error {                                            \
    public:                                                                \
        using Error::Error;                                                \
        const char* name() const noexcept override { return #Type; }       \
    };

MLFRAC_DEFINE_ERROR(DomainError)
MLFRAC_DEFINE_ERROR(OverflowError)
MLFRAC_DEFINE_ERROR(QuadratureError)
MLFRAC_DEFINE_ERROR(QuadratureBudgetExceeded)
MLFRAC_DEFINE_ERROR(NotHermitian)
MLFRAC_DEFINE_ERROR(ConvergenceFailure)
MLFRAC_DEFINE_ERROR(GridMismatch)
MLFRAC_DEFINE_ERROR(InsufficientSamples)
MLFRAC_DEFINE_ERROR(SingularSystem)
MLFRAC_DEFINE_ERROR(FormatError)
MLFRAC_DEFINE_ERROR(ConfigError)

#undef MLFRAC_DEFINE_ERROR

} // namespace mlfrac
