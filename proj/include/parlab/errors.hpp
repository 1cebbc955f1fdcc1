#pragma once

#include <stdexcept>
#include <string>

namespace parlab {

struct Error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// lattice
struct EmptyCylinder : Error { using Error::Error; };
struct OutOfDomain : Error { using Error::Error; };
struct InvalidGrid : Error { using Error::Error; };

// operators
struct BoundaryNode : Error { using Error::Error; };
struct FirstSlice : Error { using Error::Error; };
struct InvalidParams : Error { using Error::Error; };

// solver
struct DegenerateTimeStep : Error { using Error::Error; };
struct UnstableStep : Error { using Error::Error; };
struct InvalidProblem : Error { using Error::Error; };

// analytic
struct UnsupportedKind : Error { using Error::Error; };

// probe
struct DomainTooSmall : Error { using Error::Error; };

// cli
struct ConfigError : Error { using Error::Error; };
struct ComputeError : Error { using Error::Error; };

} // namespace parlab
