#pragma once

#include <stdexcept>
#include <string>

namespace opm {

struct Error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

#define OPM_ERROR(Name)                                   \
    struct Name : Error {                                 \
        explicit Name(const std::string& what)            \
            : Error(std::string(#Name ": ") + what) {}    \
    }

OPM_ERROR(UnboundSymbol);
OPM_ERROR(SingularDiagonal);
OPM_ERROR(DimensionMismatch);
OPM_ERROR(NotPositiveDefinite);
OPM_ERROR(DegreeMismatch);
OPM_ERROR(UnknownNorms);
OPM_ERROR(ProductDivergence);
OPM_ERROR(NonFinite);
OPM_ERROR(DegeneratePhat);
OPM_ERROR(NonUniqueDecomposition);
OPM_ERROR(NotAHarness);
OPM_ERROR(ZeroDenominator);
OPM_ERROR(NotNormalized);
OPM_ERROR(DivisionByZero);
OPM_ERROR(ConfigError);

#undef OPM_ERROR

} // namespace opm
