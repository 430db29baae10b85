#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <stdexcept>

#include "gaplab/mesh.hpp"

using namespace gaplab;

TEST_CASE("triangulate covers the polygon exactly") {
  const Polygon square = Polygon::rectangle(1.0, 1.0);
  const TriMesh mesh = triangulate(square, 0.3);
  validate_mesh(mesh);
  CHECK(mesh.h_max <= 0.3 + 1e-12);
  CHECK(mesh.area() == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(mesh.n_interior() > 0);
}

TEST_CASE("triangle input gets a similar subdivision") {
  const Polygon tri = Simplex::triangle({0, 0}, {1, 0}, {0, 1}).to_polygon();
  const TriMesh mesh = triangulate(tri, 0.3);
  validate_mesh(mesh);
  CHECK(mesh.area() == doctest::Approx(0.5).epsilon(1e-12));
  // Uniform subdivision: all elements congruent up to reflection.
  const double a0 = mesh.triangle_area(0);
  for (int t = 0; t < mesh.n_triangles(); ++t)
    CHECK(mesh.triangle_area(t) == doctest::Approx(a0).epsilon(1e-12));
  // n^2 triangles for subdivision depth n.
  const int n2 = mesh.n_triangles();
  const int n = static_cast<int>(std::lround(std::sqrt(double(n2))));
  CHECK(n * n == n2);
}

TEST_CASE("red refinement quarters elements and halves h") {
  const TriMesh coarse = triangulate(Polygon::rectangle(2.0, 1.0), 0.5);
  const TriMesh fine = refine(coarse);
  validate_mesh(fine);
  CHECK(fine.n_triangles() == 4 * coarse.n_triangles());
  CHECK(fine.h_max == doctest::Approx(0.5 * coarse.h_max).epsilon(1e-12));
  CHECK(fine.area() == doctest::Approx(coarse.area()).epsilon(1e-12));
  // Parent vertices keep their indices.
  for (int i = 0; i < coarse.n_vertices(); ++i) {
    CHECK(fine.vertices[i].x == coarse.vertices[i].x);
    CHECK(fine.vertices[i].y == coarse.vertices[i].y);
  }
}

TEST_CASE("validate_mesh rejects broken meshes") {
  TriMesh m;
  m.vertices = {{0, 0}, {1, 0}, {0, 1}};
  m.triangles = {{0, 2, 1}};  // clockwise: negative area
  m.on_boundary = {1, 1, 1};
  m.h_max = std::sqrt(2.0);
  CHECK_THROWS_AS(validate_mesh(m), std::invalid_argument);

  m.triangles = {{0, 1, 2}};
  m.on_boundary = {1, 1, 0};  // boundary edge (1,2) has an unmarked endpoint
  CHECK_THROWS_AS(validate_mesh(m), std::invalid_argument);

  m.on_boundary = {1, 1, 1};
  validate_mesh(m);  // now a valid one-element mesh

  m.triangles.push_back({0, 1, 3});  // index out of range
  CHECK_THROWS_AS(validate_mesh(m), std::invalid_argument);
}

TEST_CASE("graph-domain mesh area matches the profile integral") {
  const GraphDomain gd = GraphDomain::sin2(1.0, 0.5, 257);
  // Equispaced piecewise-linear sin^2 integrates to exactly 1/2, and a mesh
  // grid aligned with the samples reproduces that integral exactly.
  const double exact = 0.5 * 0.5;
  const TriMesh m1 = mesh_graph_domain(gd, 16, 3);
  const TriMesh m2 = mesh_graph_domain(gd, 32, 3);
  validate_mesh(m1);
  validate_mesh(m2);
  CHECK(std::abs(m1.area() - exact) <= 1e-12);
  CHECK(std::abs(m2.area() - exact) <= 1e-12);
  // Unaligned grids only interpolate the profile; stay within one percent.
  const TriMesh m3 = mesh_graph_domain(gd, 7, 3);
  CHECK(m3.area() == doctest::Approx(exact).epsilon(1e-2));
}

TEST_CASE("zero-width fibers collapse to single vertices") {
  const GraphDomain gd = GraphDomain::sin2(1.0, 0.5, 257);
  const TriMesh m = mesh_graph_domain(gd, 16, 3);
  int at0 = 0, at1 = 0;
  for (const Vec2 v : m.vertices) {
    if (std::abs(v.x) < 1e-12) ++at0;
    if (std::abs(v.x - 1.0) < 1e-12) ++at1;
  }
  CHECK(at0 == 1);
  CHECK(at1 == 1);
}

TEST_CASE("p1 interpolation is exact for linear fields") {
  const TriMesh mesh = refine(triangulate(Polygon::rectangle(1.0, 1.0), 0.4));
  std::vector<double> nodal(mesh.n_vertices());
  for (int i = 0; i < mesh.n_vertices(); ++i)
    nodal[i] = 2.0 * mesh.vertices[i].x + 3.0 * mesh.vertices[i].y - 1.0;
  const P1Interpolator f(mesh, nodal);
  const Vec2 pts[] = {{0.03, 0.97}, {0.5, 0.5}, {0.25, 0.125}, {0.999, 0.001}};
  for (const Vec2 p : pts)
    CHECK(f(p) == doctest::Approx(2.0 * p.x + 3.0 * p.y - 1.0).epsilon(1e-12));
  double v;
  CHECK_FALSE(f.try_eval({1.5, 0.5}, &v));
  CHECK_THROWS(f({-1.0, 0.0}));
}

TEST_CASE("gradient recovery reproduces constant gradients") {
  const TriMesh mesh = triangulate(Polygon::rectangle(1.0, 1.0), 0.3);
  std::vector<double> nodal(mesh.n_vertices());
  for (int i = 0; i < mesh.n_vertices(); ++i)
    nodal[i] = -0.5 * mesh.vertices[i].x + 4.0 * mesh.vertices[i].y;
  const auto grads = recover_vertex_gradients(mesh, nodal);
  REQUIRE(static_cast<int>(grads.size()) == mesh.n_vertices());
  for (const Vec2 g : grads) {
    CHECK(g.x == doctest::Approx(-0.5).epsilon(1e-12));
    CHECK(g.y == doctest::Approx(4.0).epsilon(1e-12));
  }
}

TEST_CASE("mesh text export lists counts first") {
  const TriMesh mesh = triangulate(Polygon::rectangle(1.0, 1.0), 0.6);
  const std::string text = mesh_to_text(mesh);
  CHECK(text.find(std::to_string(mesh.n_vertices())) == 0);
  CHECK(text.find('\n') != std::string::npos);
}
