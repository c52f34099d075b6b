#pragma once

#include <stdexcept>
#include <string>

namespace kmlift {

enum class ErrorKind {
    NotEven,
    Degenerate,
    NotSymmetric,
    NotIsotropic,
    NotPrimitive,
    BadPairing,
    NotPositiveDefinite,
    NotNegativeDefinite,
    DimensionMismatch,
    NotHomogeneous,
    DegreeMismatch,
    DegenerateFrame,
    NotOrthogonalToU,
    NotExactlyRepresentable,
    NonconvergentRequest,
    WordDecompositionFailure,
    IndexMismatch,
    ModeMismatch,
    NegativeNorm,
    DivergentIntegral,
    BadSignature,
    InconsistentTables,
    WeightMismatch,
    ParseError,
};

const char* error_name(ErrorKind kind);

class Error : public std::runtime_error {
public:
    Error(ErrorKind kind, const std::string& message)
        : std::runtime_error(std::string(error_name(kind)) + ": " + message), kind_(kind) {}
    ErrorKind kind() const { return kind_; }

private:
    ErrorKind kind_;
};

}  // namespace kmlift
