#pragma once

#include <stdexcept>
#include <string>

namespace mors {

// Base class for everything this library throws. The CLI maps the three
// families below onto distinct exit codes (parse=2, generation=3,
// evaluation=4), so new error types should pick a family.
struct Error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct ParseError : Error {
    using Error::Error;
};

struct MalformedHeader : ParseError {
    using ParseError::ParseError;
};

struct CoordinateOutOfRange : ParseError {
    using ParseError::ParseError;
};

struct GenerationError : Error {
    using Error::Error;
};

struct InfeasibleTarget : GenerationError {
    using GenerationError::GenerationError;
};

struct EmptyHistogram : GenerationError {
    using GenerationError::GenerationError;
};

struct EvaluationError : Error {
    using Error::Error;
};

struct CapacityExceeded : EvaluationError {
    using EvaluationError::EvaluationError;
};

struct GeometryMismatch : EvaluationError {
    using EvaluationError::EvaluationError;
};

struct ShapeMismatch : EvaluationError {
    using EvaluationError::EvaluationError;
};

struct MaskRequired : EvaluationError {
    using EvaluationError::EvaluationError;
};

struct NonFiniteInput : EvaluationError {
    using EvaluationError::EvaluationError;
};

struct MissingProfile : EvaluationError {
    using EvaluationError::EvaluationError;
};

struct GridMismatch : EvaluationError {
    using EvaluationError::EvaluationError;
};

} // namespace mors
