#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <stdexcept>

#include "gaplab/geometry.hpp"

using namespace gaplab;

namespace {
constexpr double kPi = 3.14159265358979323846;
}

TEST_CASE("rectangle polygon basics") {
  const Polygon r = Polygon::rectangle(2.0, 1.0);
  CHECK(r.size() == 4);
  CHECK(r.area() == doctest::Approx(2.0).epsilon(1e-14));
  CHECK(r.diameter() == doctest::Approx(std::sqrt(5.0)).epsilon(1e-14));
  CHECK(r.convex());
  CHECK(r.boundary_distance({1.0, 0.5}) == doctest::Approx(0.5).epsilon(1e-14));
  // Outside points measure distance to the boundary polyline.
  CHECK(r.boundary_distance({3.0, 0.5}) == doctest::Approx(1.0).epsilon(1e-14));
}

TEST_CASE("polygon constructor rejects bad input") {
  CHECK_THROWS_AS(Polygon({{0, 0}, {0, 1}, {1, 0}}), std::invalid_argument);  // clockwise
  CHECK_THROWS_AS(Polygon({{0, 0}, {1, 0}, {2, 0}}), std::invalid_argument);  // collinear
  CHECK_THROWS_AS(Polygon({{0, 0}, {1, 1}, {1, 0}, {0, 1}}),
                  std::invalid_argument);  // self-intersecting bowtie
  CHECK_THROWS_AS(Polygon({{0, 0}, {1, 0}}), std::invalid_argument);
}

TEST_CASE("regular n-gon area and diameter") {
  const Polygon hex = Polygon::regular_ngon(6, 1.0);
  // Circumradius R: area = n/2 R^2 sin(2 pi / n).
  CHECK(hex.area() == doctest::Approx(3.0 * std::sin(kPi / 3.0)).epsilon(1e-13));
  CHECK(hex.diameter() == doctest::Approx(2.0).epsilon(1e-13));
  CHECK(hex.convex());
  const Polygon disk = Polygon::regular_ngon(64, 1.0);
  CHECK(disk.area() == doctest::Approx(kPi).epsilon(2e-3));
}

TEST_CASE("simplex heights, volume, longest edge") {
  const Simplex t = Simplex::triangle({0, 0}, {1, 0}, {0, 1});
  CHECK(t.dim() == 2);
  CHECK(t.volume() == doctest::Approx(0.5).epsilon(1e-14));
  CHECK(t.diameter() == doctest::Approx(std::sqrt(2.0)).epsilon(1e-14));
  CHECK(t.height(0) == doctest::Approx(1.0 / std::sqrt(2.0)).epsilon(1e-13));
  CHECK(t.height(1) == doctest::Approx(1.0).epsilon(1e-13));
  CHECK(t.height(2) == doctest::Approx(1.0).epsilon(1e-13));
  CHECK(t.to_polygon().area() == doctest::Approx(0.5).epsilon(1e-14));
}

TEST_CASE("graph domain profiles") {
  const GraphDomain c = GraphDomain::constant(2.0, 0.25, 5);
  CHECK(c.length() == 2.0);
  CHECK(c.epsilon() == 0.25);
  CHECK(c.width(1.3) == doctest::Approx(1.0).epsilon(1e-14));
  CHECK(c.max_width() == doctest::Approx(1.0).epsilon(1e-14));

  const GraphDomain s = GraphDomain::sin2(1.0, 0.5, 129);
  CHECK(s.width(0.0) == doctest::Approx(0.0));
  CHECK(s.width(0.5) == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(s.diameter() == doctest::Approx(1.0).epsilon(1e-9));

  const GraphDomain tent = GraphDomain::tent(0.5, 0.3, 65);
  CHECK(tent.max_width() == doctest::Approx(0.3).epsilon(1e-14));
  CHECK(tent.width(0.25) == doctest::Approx(0.15).epsilon(1e-13));
  CHECK(tent.diameter() == doctest::Approx(1.0).epsilon(1e-12));
  CHECK_THROWS_AS(GraphDomain::tent(0.0, 0.3, 9), std::invalid_argument);
  CHECK_THROWS_AS(GraphDomain::tent(0.5, -1.0, 9), std::invalid_argument);
}

TEST_CASE("moduli region membership") {
  const double apex_y = std::sqrt(3.0) / 2.0;
  CHECK(in_moduli_region({0.5, apex_y}));          // equilateral apex
  CHECK(in_moduli_region({0.75, 0.2}));            // generic thin-ish triangle
  CHECK(in_moduli_region({0.5, 0.05}));            // thin isoceles
  CHECK_FALSE(in_moduli_region({0.4, 0.5}));       // x < 1/2
  CHECK_FALSE(in_moduli_region({0.5, 0.9}));       // |p| > 1
  CHECK_FALSE(in_moduli_region({1.2, 0.3}));       // |p - (1,0)| fine but |p| > 1
  CHECK_FALSE(in_moduli_region({0.6, 0.0}));       // degenerate apex on the base
}

TEST_CASE("moduli triangles have unit diameter") {
  // The base [(0,0),(1,0)] is the longest side everywhere in the region.
  const double apex_y = std::sqrt(3.0) / 2.0;
  const Vec2 samples[] = {
      {0.5, apex_y}, {0.5, 0.05}, {0.75, 0.2}, {0.9, 0.4}, {0.6, 0.7}};
  for (const Vec2 p : samples) {
    REQUIRE(in_moduli_region(p));
    const Simplex t = make_triangle_from_moduli(p);
    CHECK(std::abs(t.diameter() - 1.0) <= 1e-14);
  }
}
