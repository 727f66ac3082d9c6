#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace holdercover {

struct Error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Bad arguments: mismatched dimensions, coincident points, out-of-range parameters.
struct DomainError : Error {
  using Error::Error;
};

/// A lattice level finer than the exact coordinate precision of the sample.
struct PrecisionError : Error {
  using Error::Error;
};

/// A Grassmannian net or viewpoint grid too coarse for the radii it must resolve.
struct MeshError : Error {
  using Error::Error;
};

/// The explicit angle bound 4r/R requires R >= 4r.
struct BoundNotApplicable : Error {
  using Error::Error;
};

/// Percolation subtree died out; caller should draw another seed.
struct ExtinctionError : Error {
  using Error::Error;
};

/// Projection is not injective on the sample.
struct CollisionError : Error {
  CollisionError(std::size_t a, std::size_t b, const std::string& what)
      : Error(what), first(a), second(b) {}
  std::size_t first;
  std::size_t second;
};

}  // namespace holdercover
