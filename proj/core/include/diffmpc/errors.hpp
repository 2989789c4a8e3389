#pragma once

#include <stdexcept>
#include <string>

namespace diffmpc {

/// Base class for all diffmpc errors.
struct Error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// autodiff
struct DomainError : Error {
    using Error::Error;
};
struct TapeMismatch : Error {
    using Error::Error;
};
struct SeedNotScalar : Error {
    using Error::Error;
};

// optim
struct LengthMismatch : Error {
    using Error::Error;
};
struct InfeasibleConstraint : Error {
    using Error::Error;
};

// plant
struct StaticPlantHasNoStep : Error {
    using Error::Error;
};
struct WrongPlantKind : Error {
    using Error::Error;
};
struct DimensionMismatch : Error {
    using Error::Error;
};
struct NonpositiveTheta : Error {
    using Error::Error;
};

// estimation
struct EmptyWindow : Error {
    using Error::Error;
};

// config / io
struct ConfigError : Error {
    using Error::Error;
};
struct IoError : Error {
    using Error::Error;
};

}  // namespace diffmpc
