#pragma once

#include <Eigen/Core>
#include <cstdint>
#include <functional>
#include <vector>

namespace gaplab {

/// 2D point / vector in domain coordinates.
struct Vec2 {
  double x = 0.0;
  double y = 0.0;

  Vec2 operator+(Vec2 o) const { return {x + o.x, y + o.y}; }
  Vec2 operator-(Vec2 o) const { return {x - o.x, y - o.y}; }
  Vec2 operator*(double s) const { return {x * s, y * s}; }
  double dot(Vec2 o) const { return x * o.x + y * o.y; }
  double cross(Vec2 o) const { return x * o.y - y * o.x; }
  double norm() const;
};

double dist(Vec2 a, Vec2 b);

/// Simple polygon, counterclockwise vertex order, at least 3 distinct vertices.
/// The constructor rejects clockwise, degenerate and self-intersecting input.
class Polygon {
 public:
  explicit Polygon(std::vector<Vec2> vertices);

  const std::vector<Vec2>& vertices() const { return verts_; }
  int size() const { return static_cast<int>(verts_.size()); }
  double area() const;
  /// Max pairwise vertex distance.
  double diameter() const;
  bool convex() const;
  /// Distance from p to the boundary polyline.
  double boundary_distance(Vec2 p) const;

  static Polygon rectangle(double a, double b);
  static Polygon regular_ngon(int n, double radius);

 private:
  std::vector<Vec2> verts_;
};

/// n-simplex spanned by n+1 affinely independent vertices in R^n, n in {1,2,3}.
/// Rows of the vertex matrix are the vertices.
class Simplex {
 public:
  explicit Simplex(Eigen::MatrixXd vertices);

  int dim() const { return static_cast<int>(verts_.cols()); }
  const Eigen::MatrixXd& vertices() const { return verts_; }
  /// Max pairwise vertex distance; for a simplex this is the longest edge.
  double diameter() const;
  /// Distance from vertex `opposite` to the affine hull of the facet spanned
  /// by the remaining vertices.
  double height(int opposite) const;
  double volume() const;

  static Simplex triangle(Vec2 a, Vec2 b, Vec2 c);
  Polygon to_polygon() const;  // 2D only

 private:
  Eigen::MatrixXd verts_;
};

/// Thin domain {(x,y) : 0 <= x <= L, 0 <= y <= epsilon * w(x)} where w is a
/// nonnegative profile given by equispaced samples and linear interpolation.
class GraphDomain {
 public:
  GraphDomain(double L, double epsilon, std::vector<double> samples);

  double length() const { return L_; }
  double epsilon() const { return eps_; }
  const std::vector<double>& samples() const { return w_; }
  double width(double x) const;
  double max_width() const;
  /// Max distance between sampled boundary points (bottom edge and top curve).
  double diameter() const;

  static GraphDomain constant(double L, double eps, int n);
  static GraphDomain sin2(double L, double eps, int n);
  /// Triangle over base [0,1] with apex (apex_x, apex_h), as a tent profile.
  static GraphDomain tent(double apex_x, double apex_h, int n);
  static GraphDomain from_function(double L, double eps, int n,
                                   const std::function<double(double)>& w);

 private:
  double L_ = 1.0;
  double eps_ = 1.0;
  std::vector<double> w_;
};

/// Fundamental region of the moduli parametrization: triangles with base
/// [(0,0),(1,0)] and apex p with y > 0, x >= 1/2, |p| <= 1, |p-(1,0)| <= 1.
/// Every triangle in the region has diameter exactly 1 (the base).
bool in_moduli_region(Vec2 p);
Simplex make_triangle_from_moduli(Vec2 p);

}  // namespace gaplab
