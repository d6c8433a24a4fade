#pragma once

#include <stdexcept>
#include <string>

namespace fl3 {

struct Error : std::runtime_error {
    explicit Error(const std::string& msg) : std::runtime_error(msg) {}
};

#define FL3_ERROR_TYPE(Name)                                                 \
    struct Name : Error {                                                    \
        explicit Name(const std::string& msg) : Error(#Name ": " + msg) {}  \
    }

FL3_ERROR_TYPE(NotAUnit);
FL3_ERROR_TYPE(NotInvertible);
FL3_ERROR_TYPE(NotMaximallyNonSplit);
FL3_ERROR_TYPE(PivotFailure);
FL3_ERROR_TYPE(SingularModCap);
FL3_ERROR_TYPE(ComponentMismatch);
FL3_ERROR_TYPE(GradingViolation);
FL3_ERROR_TYPE(GenericityViolation);
FL3_ERROR_TYPE(CongruenceFailure);
FL3_ERROR_TYPE(ShapeMismatch);
FL3_ERROR_TYPE(AxiomViolation);
FL3_ERROR_TYPE(NotUngradeable);
FL3_ERROR_TYPE(OutOfFLRange);
FL3_ERROR_TYPE(PrecisionExhausted);
FL3_ERROR_TYPE(DegenerateRatio);
FL3_ERROR_TYPE(UsageError);

#undef FL3_ERROR_TYPE

}  // namespace fl3
