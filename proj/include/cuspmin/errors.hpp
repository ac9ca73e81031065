#pragma once

#include <stdexcept>
#include <string>

namespace cuspmin {

/// A height below the cusp chart (z < 1/2), or outside a profile's domain.
class DomainError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

/// A caller-supplied argument violates an operation's precondition.
class ArgumentError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// A Mobius map is not of the kind the operation requires.
class ClassificationError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// The parabolic triple is on the degenerate branch (common fixed point at infinity).
class DegenerateBranchError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A point lies outside the coordinate chart of a surgered or solid-torus metric.
class ChartError : public std::out_of_range {
 public:
  using std::out_of_range::out_of_range;
};

/// Malformed mesh: bad indices, non-closing offsets, degenerate or non-manifold triangles.
class MeshError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Geometric consistency failure (e.g. ideal tetrahedron angles not summing to pi).
class GeometryError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// An output file could not be written.
class IoError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace cuspmin
