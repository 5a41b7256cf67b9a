// Error types shared across the library.
#pragma once

#include <stdexcept>
#include <string>

namespace kstab {

/// Malformed or out-of-contract input (bad JSON, invalid polytope data, ...).
struct InputError : std::runtime_error {
  explicit InputError(const std::string& what) : std::runtime_error(what) {}
};

/// Geometric contract violation (unbounded, lower-dimensional, empty where
/// a full-dimensional polytope is required).
struct GeometryError : std::runtime_error {
  explicit GeometryError(const std::string& what) : std::runtime_error(what) {}
};

/// The canonical deformation P -> P_s changed the combinatorial type of P
/// (or of a derived subdivision), i.e. s lies beyond the deformation radius.
struct CombinatorialCollapse : std::runtime_error {
  explicit CombinatorialCollapse(const std::string& what) : std::runtime_error(what) {}
};

/// A measure handed to an inverse operator does not carry the required mass.
struct MassMismatch : std::runtime_error {
  explicit MassMismatch(const std::string& what) : std::runtime_error(what) {}
};

/// An iterative solver stopped at its budget; carries the best residual seen.
struct NonConvergence : std::runtime_error {
  double best_residual;
  NonConvergence(const std::string& what, double residual)
      : std::runtime_error(what), best_residual(residual) {}
};

/// The linear system defining the extremal function is singular.
struct SingularSystem : std::runtime_error {
  std::string kernel_description;
  SingularSystem(const std::string& what, std::string kernel)
      : std::runtime_error(what), kernel_description(std::move(kernel)) {}
};

/// Numerical quadrature failed to reach the requested tolerance.
struct QuadratureError : std::runtime_error {
  double achieved_error;
  QuadratureError(const std::string& what, double err)
      : std::runtime_error(what), achieved_error(err) {}
};

/// Two independent derivative estimates disagree beyond tolerance.
struct DiagnosticError : std::runtime_error {
  explicit DiagnosticError(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace kstab
