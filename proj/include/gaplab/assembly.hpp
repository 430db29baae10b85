#pragma once

#include <Eigen/SparseCore>
#include <string>
#include <vector>

#include "gaplab/mesh.hpp"

namespace gaplab {

using SpMat = Eigen::SparseMatrix<double>;

/// Nonnegative measure weight, either uniform (== 1) or one value per vertex.
struct Weight {
  bool is_uniform = true;
  std::vector<double> values;

  static Weight uniform() { return {}; }
  static Weight nodal(std::vector<double> v);
};

/// Nodal potential; values may take either sign.
struct Potential2D {
  std::vector<double> values;
};

enum class Bc { dirichlet, neumann };

/// Weighted stiffness: sum over triangles of (grad hat_i . grad hat_j) * area
/// * mean weight, the mean taken over the three edge midpoints (exact for
/// weights linear on the triangle).
SpMat assemble_stiffness(const TriMesh& mesh, const Weight& w);

/// Weighted mass by the 3-edge-midpoint rule (degree-2 exact). With w == 1
/// the element block is area/12 * [[2,1,1],[1,2,1],[1,1,2]].
SpMat assemble_mass(const TriMesh& mesh, const Weight& w);

/// Potential term: mass-like matrix with weight V; may be indefinite.
SpMat assemble_potential(const TriMesh& mesh, const Potential2D& V);

/// Symmetric pencil (A, M) plus the vertex <-> dof correspondence after
/// boundary-condition treatment. M is positive definite on the retained dofs.
struct SymPencil {
  SpMat A;
  SpMat M;
  Bc bc = Bc::neumann;
  std::vector<int32_t> dof_of_vertex;  // -1 = eliminated
  std::vector<int32_t> vertex_of_dof;

  int64_t dim() const { return A.rows(); }
  /// Scatter a dof vector back to all mesh vertices (eliminated dofs get 0).
  std::vector<double> expand(const Eigen::VectorXd& dof_values) const;
};

/// Row/column elimination of boundary vertices.
SymPencil apply_dirichlet(const SpMat& A, const SpMat& M, const TriMesh& mesh);
/// Natural boundary conditions: dofs are all vertices, matrices unchanged.
SymPencil apply_neumann(const SpMat& A, const SpMat& M, const TriMesh& mesh);

/// Stiffness (+ optional potential) and mass with a shared weight, then
/// boundary treatment.
SymPencil assemble_pencil(const TriMesh& mesh, Bc bc, const Weight& w,
                          const Potential2D* V = nullptr);

/// Coordinate-triplet text: "row col value" per line, sorted by (row, col),
/// upper triangle of the symmetric matrix.
std::string matrix_to_text(const SpMat& m);

}  // namespace gaplab
