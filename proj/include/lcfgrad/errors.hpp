#pragma once

#include <stdexcept>
#include <string>

namespace lcfgrad {

/// Base class for all library errors.
struct Error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// |det ∇T| of an element fell below the degeneracy tolerance (inverted or collapsed).
struct DegenerateElement : Error {
  using Error::Error;
};

/// Gram determinant of a surface face is not positive.
struct DegenerateFace : Error {
  using Error::Error;
};

/// A face is referenced by more than two elements.
struct NonManifold : Error {
  using Error::Error;
};

/// The constrained system could not be factorized / solved.
struct SingularSystem : Error {
  using Error::Error;
};

/// Iterative solver or scalar root finder ran out of iterations.
struct NoConvergence : Error {
  using Error::Error;
};

/// Loaded surface area is non-positive under a force-controlled traction.
struct ZeroArea : Error {
  using Error::Error;
};

/// Scalar inversion target lies outside the image of the monotone function.
struct NoBracket : Error {
  using Error::Error;
};

/// A surface node without any adjacent surface face was queried for a normal.
struct IsolatedNode : Error {
  using Error::Error;
};

/// A finite-difference step inverted an element; the sample is skipped.
struct MeshInversion : Error {
  using Error::Error;
};

/// Configuration / input file problem (CLI exit code 2).
struct ConfigError : Error {
  using Error::Error;
};

}  // namespace lcfgrad
