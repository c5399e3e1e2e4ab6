#pragma once

#include <stdexcept>
#include <string>

namespace eqdiff {

// Errors fall into three families, which the CLI maps onto exit codes.
enum class ErrorFamily { Schema, Math, Internal };

class Error : public std::runtime_error {
public:
    Error(std::string kind, const std::string& what, ErrorFamily family)
        : std::runtime_error(what), kind_(std::move(kind)), family_(family) {}
    const std::string& kind() const noexcept { return kind_; }
    ErrorFamily family() const noexcept { return family_; }

private:
    std::string kind_;
    ErrorFamily family_;
};

#define EQDIFF_MATH_ERROR(Name)                                      \
    class Name : public Error {                                      \
    public:                                                          \
        explicit Name(const std::string& what)                       \
            : Error(#Name, what, ErrorFamily::Math) {}               \
    };

EQDIFF_MATH_ERROR(CompositionNotZero)
EQDIFF_MATH_ERROR(IllFormedDoubleComplex)
EQDIFF_MATH_ERROR(NotChainMap)
EQDIFF_MATH_ERROR(AxiomViolation)
EQDIFF_MATH_ERROR(NotACocycle)
EQDIFF_MATH_ERROR(InvalidAction)
EQDIFF_MATH_ERROR(CoefficientNotDivisible)
EQDIFF_MATH_ERROR(NotACover)
EQDIFF_MATH_ERROR(TruncationUnstable)
EQDIFF_MATH_ERROR(ConnectionNotInvariant)
EQDIFF_MATH_ERROR(PositiveDimensionalInput)
EQDIFF_MATH_ERROR(InconsistentCorners)
EQDIFF_MATH_ERROR(DimensionMismatch)

#undef EQDIFF_MATH_ERROR

class SchemaError : public Error {
public:
    explicit SchemaError(const std::string& what) : Error("SchemaError", what, ErrorFamily::Schema) {}
};

class InternalError : public Error {
public:
    explicit InternalError(const std::string& what) : Error("InternalError", what, ErrorFamily::Internal) {}
};

}  // namespace eqdiff
