#pragma once

#include <array>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "gaplab/geometry.hpp"

namespace gaplab {

/// Conforming triangle mesh. Triangles are counterclockwise index triples;
/// on_boundary marks vertices that lie on the domain boundary.
struct TriMesh {
  std::vector<Vec2> vertices;
  std::vector<std::array<int32_t, 3>> triangles;
  std::vector<uint8_t> on_boundary;
  double h_max = 0.0;

  int n_vertices() const { return static_cast<int>(vertices.size()); }
  int n_triangles() const { return static_cast<int>(triangles.size()); }
  int n_interior() const;
  double triangle_area(int t) const;
  double area() const;
};

/// Checks positive areas, index bounds, conformity (every edge shared by at
/// most two triangles, boundary edges by exactly one) and that endpoints of
/// boundary edges are marked. Throws std::invalid_argument on violation.
void validate_mesh(const TriMesh& mesh);

/// Triangulates a convex polygon so that h_max <= target_h. Triangles get a
/// uniform similar subdivision; other polygons are fanned from the centroid
/// and refined. Mesh area equals polygon area exactly (straight edges).
TriMesh triangulate(const Polygon& poly, double target_h);

/// One level of uniform (red) refinement: each triangle splits into 4 via
/// edge midpoints. Parent vertices keep their indices, h_max halves, and
/// midpoints of boundary edges are marked boundary.
TriMesh refine(const TriMesh& mesh);

/// Structured mesh of a graph domain: grid (i/nx, j/ny) mapped to
/// (x_i, (j/ny) * epsilon * w(x_i)), two triangles per cell. Zero-width
/// fibers collapse to single points; degenerate cells are omitted.
TriMesh mesh_graph_domain(const GraphDomain& gd, int nx, int ny);

/// Plain-text export: counts, then one vertex per line, then one triangle per line.
std::string mesh_to_text(const TriMesh& mesh);

/// Point evaluation of a P1 nodal field with a uniform-grid triangle locator.
class P1Interpolator {
 public:
  P1Interpolator(const TriMesh& mesh, std::vector<double> nodal);

  /// Returns false if p lies outside the mesh; otherwise writes the value.
  bool try_eval(Vec2 p, double* value) const;
  double operator()(Vec2 p) const;  // throws when p is outside

 private:
  const TriMesh& mesh_;
  std::vector<double> nodal_;
  double x0_, y0_, cell_;
  int gx_, gy_;
  std::vector<std::vector<int32_t>> bins_;
};

/// Per-vertex gradient of a P1 field by area-weighted averaging of the
/// adjacent element gradients.
std::vector<Vec2> recover_vertex_gradients(const TriMesh& mesh,
                                           std::span<const double> nodal);

}  // namespace gaplab
