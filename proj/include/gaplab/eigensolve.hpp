#pragma once

#include <Eigen/Core>
#include <cstdint>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "gaplab/assembly.hpp"

namespace gaplab {

/// Smallest part of a pencil spectrum: ascending eigenvalues with
/// M-orthonormal eigenvectors, per-pair residuals and solve metadata.
struct Spectrum {
  std::vector<double> eigenvalues;
  Eigen::MatrixXd eigenvectors;  // one column per eigenvalue
  std::vector<double> residuals;
  double h = 0.0;
  uint64_t seed = 0;
  int iterations = 0;
  bool extrapolated = false;
  /// Grid parameter and raw eigenvalues per level when extrapolation applies.
  std::vector<std::pair<double, std::vector<double>>> levels;
  /// Cluster index per eigenvalue; members of a near-degenerate group
  /// (within 1e-8 relative) share an index.
  std::vector<int> cluster_of;

  bool has_cluster() const;
  std::string to_json() const;
};

struct SolveOptions {
  double tol = 1e-9;
  int max_restarts = 500;
  int block_size = 2;
  uint64_t seed = 0x5eed5eedULL;
  std::optional<double> shift;  // default -1, moved below the spectrum if needed
};

class SolverError : public std::runtime_error {
 public:
  SolverError(const std::string& msg, int pivot = -1)
      : std::runtime_error(msg), pivot_index(pivot) {}
  int pivot_index;  // -1 when not a factorization failure
};

/// Shift-invert block Lanczos (full reorthogonalization) for the k smallest
/// eigenpairs of A x = lambda M x with M positive definite.
Spectrum smallest_eigenpairs(const SymPencil& pencil, int k,
                             const SolveOptions& opts = {});

/// (v'Av)/(v'Mv); throws when the M-norm of v vanishes.
double rayleigh_quotient(const SymPencil& pencil, std::span<const double> v);

/// fine + (fine - coarse) / (2^order - 1), the h -> h/2 limit for an
/// order-p discretization.
double richardson_extrapolate(double coarse, double fine, int order = 2);

}  // namespace gaplab
