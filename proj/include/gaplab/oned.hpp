#pragma once

#include <cstdint>
#include <functional>
#include <istream>
#include <random>
#include <string>
#include <vector>

#include "gaplab/eigensolve.hpp"

namespace gaplab {

/// Function on [0, R] given by n >= 2 equispaced samples, linear interpolation.
struct Profile1D {
  double R = 1.0;
  std::vector<double> samples;

  Profile1D(double R_, std::vector<double> samples_);
  double value(double x) const;
  int size() const { return static_cast<int>(samples.size()); }

  static Profile1D constant(double R, double c, int n);
  static Profile1D from_function(double R, int n, const std::function<double(double)>& f);
  /// CSV rows "x,value" with strictly increasing equispaced x starting at 0.
  static Profile1D from_csv(std::istream& in);
};

/// Three-point finite differences for -u'' + V u on [0, R]; the Neumann rows
/// come from the ghost-point closure (equivalently a lumped-mass weak form).
/// Eigenvalues are Richardson-extrapolated across grids n and 2n; vectors and
/// residuals refer to the fine grid.
Spectrum schrodinger_eigs_1d(const Profile1D& V, Bc bc, int n, int k);

/// Drift form pair (sum_cells w_mid (u_{i+1}-u_i)^2 / h, sum_nodes w_i u_i^2 h)
/// for weight w = e^{-phi}. Endpoint nodes with zero weight are condensed out
/// exactly (their cells carry no energy at stationarity); a weight vanishing
/// on an interior subinterval is an error. Extrapolated across n and 2n.
Spectrum bakry_emery_eigs_1d(const Profile1D& weight, Bc bc, int n, int k);

/// Closed forms on [0, R]: Dirichlet j^2 pi^2 / R^2 (j >= 1), Neumann
/// (j-1)^2 pi^2 / R^2 starting from 0.
std::vector<double> exact_interval_eigs(double R, Bc bc, int k);

/// First eigenfunction of -u'' + V u, positive with sup norm 1, on the n-grid.
std::vector<double> ground_state_1d(const Profile1D& V, Bc bc, int n);

/// Single-grid pencils, exposed for cross-checks and trace-bound experiments.
/// Dofs are interior nodes (Dirichlet) or all nodes (Neumann).
SymPencil schrodinger_pencil_1d(const Profile1D& V, Bc bc, int n);
SymPencil bakry_emery_pencil_1d(const Profile1D& weight, Bc bc, int n);

/// Convex piecewise-affine potential: max of m <= 5 affine functions with
/// coefficients from the given generator, amplitude capped at 50.
Profile1D random_convex_potential(double R, int n, std::mt19937_64& rng);

}  // namespace gaplab
