#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <Eigen/Dense>
#include <cmath>
#include <stdexcept>

#include "gaplab/experiments.hpp"

using namespace gaplab;

namespace {
constexpr double kPi = 3.14159265358979323846;
}

TEST_CASE("closed-form rectangle spectrum") {
  const RectangleExact r = rectangle_gap_exact(2.0, 1.0);
  CHECK(r.gap == doctest::Approx(3.0 * kPi * kPi / 4.0).epsilon(1e-14));
  CHECK(r.xi == doctest::Approx(3.0 * kPi * kPi * 5.0 / 4.0).epsilon(1e-14));
  CHECK(r.eigenvalues.front() ==
        doctest::Approx(kPi * kPi * (0.25 + 1.0)).epsilon(1e-14));
  for (size_t i = 1; i < r.eigenvalues.size(); ++i)
    CHECK(r.eigenvalues[i] >= r.eigenvalues[i - 1]);
  CHECK(r.eigenvalues[1] - r.eigenvalues[0] ==
        doctest::Approx(r.gap).epsilon(1e-13));
  CHECK_THROWS_AS(rectangle_gap_exact(1.0, 2.0), std::invalid_argument);
  CHECK_THROWS_AS(rectangle_gap_exact(1.0, 0.0), std::invalid_argument);
}

TEST_CASE("square gap function approaches 6 pi^2") {
  const GapResult g = fundamental_gap(Polygon::rectangle(1.0, 1.0), 4);
  CHECK(g.extrapolated);
  CHECK(g.per_level.size() == 4);
  CHECK(g.d == doctest::Approx(std::sqrt(2.0)).epsilon(1e-14));
  CHECK(g.xi == doctest::Approx(6.0 * kPi * kPi).epsilon(1e-3));
  CHECK(g.cluster_flag);  // lambda_2 is doubly degenerate on the square
  for (size_t i = 1; i < g.per_level.size(); ++i)
    CHECK(g.per_level[i].h < g.per_level[i - 1].h);
  CHECK_THROWS_AS(fundamental_gap(Polygon::rectangle(1.0, 1.0), 1),
                  std::invalid_argument);
}

TEST_CASE("gap function handles tiny starting meshes") {
  // The equilateral's diameter/4 triangulation has 3 interior vertices; the
  // level ladder must refine before asking for 3 eigenpairs.
  const Simplex tri = make_triangle_from_moduli({0.5, std::sqrt(3.0) / 2.0});
  const GapResult g = fundamental_gap(tri, 3);
  CHECK(g.xi == doctest::Approx(64.0 * kPi * kPi / 9.0).epsilon(5e-3));
  CHECK(g.cluster_flag);
}

TEST_CASE("sin^2 collapse converges to the interval gap") {
  const CollapseTable t = collapse_corollary1({0.4, 0.2, 0.1}, 64, 4);
  CHECK(t.target == doctest::Approx(3.0 * kPi * kPi));
  CHECK(std::abs(t.mu_ref[1] - 3.0 * kPi * kPi) <= 1e-3 * 3.0 * kPi * kPi);
  REQUIRE(t.rows.size() == 3);
  for (size_t i = 1; i < t.rows.size(); ++i)
    CHECK(t.rows[i].errors[0] < t.rows[i - 1].errors[0]);
  CHECK(t.rows.back().errors[0] <= 0.10 * 3.0 * kPi * kPi);
}

TEST_CASE("flat drift collapse reproduces the free interval") {
  // phi = 0 means weight 1: the thin-domain limit is the plain Neumann interval.
  const Profile1D phi = Profile1D::constant(1.0, 0.0, 9);
  const CollapseTable t = collapse_theorem1(phi, 1, {0.4, 0.2, 0.1}, 64, 4);
  CHECK(std::abs(t.mu_ref[1] - kPi * kPi) <= 1e-4 * kPi * kPi);
  CHECK(t.rows.back().errors[0] <= 0.05 * kPi * kPi);
  CHECK_THROWS_AS(collapse_theorem1(phi, 1, {0.1, 0.2, 0.4}, 64, 4),
                  std::invalid_argument);  // eps must decrease
  CHECK_THROWS_AS(collapse_theorem1(phi, 1, {0.4, 0.2}, 64, 4),
                  std::invalid_argument);  // too few eps
}

TEST_CASE("ratio residual shrinks under refinement") {
  const Domain d = Polygon::rectangle(1.5, 1.0);
  const double r1 = prop1_residual_check(d, 2, 0.1);
  const double r2 = prop1_residual_check(d, 2, 0.05);
  CHECK(r2 < r1);
  CHECK(r2 <= 0.5);
  CHECK_THROWS_AS(prop1_residual_check(d, 0, 0.1), std::invalid_argument);
}

TEST_CASE("gap equals the drift eigenvalue on the interval") {
  const auto rows = prop2_identity_interval(1.0, 4, 512);
  REQUIRE(rows.size() == 3);
  for (const Prop2Row& r : rows) {
    CHECK(r.k >= 2);
    CHECK(std::abs(r.difference) <= 1e-4 * r.gap);
  }
  // Both sides of the k = 2 row equal the interval gap 3 pi^2.
  CHECK(rows[0].gap == doctest::Approx(3.0 * kPi * kPi).epsilon(1e-6));
  CHECK_THROWS_AS(prop2_identity_interval(1.0, 5, 512), std::invalid_argument);
}

TEST_CASE("gap equals the drift eigenvalue on the square within FEM error") {
  const auto rows = prop2_identity_check(Polygon::rectangle(1.0, 1.0), 2, 3);
  REQUIRE(rows.size() == 1);
  CHECK(rows[0].k == 2);
  CHECK(std::abs(rows[0].difference) <= 0.03 * rows[0].gap);
}

TEST_CASE("trace bound holds and is tight for eigenvector families") {
  const SymPencil p = schrodinger_pencil_1d(Profile1D::constant(1.0, 0.0, 9),
                                            Bc::neumann, 128);
  const int n = static_cast<int>(p.dim());
  // x - 1/2 at the nodes is M-orthogonal to constants by symmetry; its
  // Rayleigh quotient tends to 12.
  Eigen::VectorXd v(n);
  for (int i = 0; i < n; ++i) v[i] = static_cast<double>(i) / (n - 1) - 0.5;
  const Prop4Result r = prop4_sum_bound_check(p, {v});
  CHECK(r.holds);
  CHECK(r.rhs == doctest::Approx(12.0).epsilon(1e-3));
  CHECK(r.lhs == doctest::Approx(kPi * kPi).epsilon(1e-3));  // mu_0 + mu_1

  const Spectrum s = smallest_eigenpairs(p, 4);
  std::vector<Eigen::VectorXd> eig = {s.eigenvectors.col(1),
                                      s.eigenvectors.col(2),
                                      s.eigenvectors.col(3)};
  const Prop4Result eq = prop4_sum_bound_check(p, eig);
  CHECK(eq.holds);
  CHECK(std::abs(eq.lhs - eq.rhs) <= 1e-6 * std::abs(eq.rhs));

  // Vectors with a constant component or repeated directions are rejected.
  CHECK_THROWS_AS(prop4_sum_bound_check(p, {Eigen::VectorXd::Ones(n)}),
                  std::invalid_argument);
  CHECK_THROWS_AS(prop4_sum_bound_check(p, {v, v}), std::invalid_argument);
}

TEST_CASE("seeded families are orthonormal and satisfy the bound") {
  const SymPencil p = schrodinger_pencil_1d(Profile1D::constant(1.0, 0.0, 9),
                                            Bc::neumann, 96);
  const auto fam = random_orthogonal_family(p, 3, 42);
  REQUIRE(fam.size() == 3);
  const Eigen::VectorXd ones = Eigen::VectorXd::Ones(p.dim());
  for (size_t i = 0; i < fam.size(); ++i) {
    CHECK(std::abs(fam[i].dot(p.M * ones)) <= 1e-10);
    for (size_t j = 0; j < i; ++j)
      CHECK(std::abs(fam[i].dot(p.M * fam[j])) <= 1e-10);
  }
  CHECK(prop4_sum_bound_check(p, fam).holds);
}

TEST_CASE("modulus checks on hand-picked functions") {
  PairList pairs;
  for (int i = 0; i < 20; ++i) {
    Eigen::VectorXd x(1), y(1);
    x[0] = 0.05 * i;
    y[0] = 1.0 - 0.04 * i;
    pairs.push_back({x, y});
  }

  // f(t) = 3t meets eta(s) = 3s with equality and fails a smaller modulus.
  const PointFn f = [](const Eigen::VectorXd& p) { return 3.0 * p[0]; };
  const ModulusReport ok = check_modulus_continuity(
      f, [](double s) { return 3.0 * s; }, pairs, 1e-12);
  CHECK(ok.holds);
  const ModulusReport tight = check_modulus_continuity(
      f, [](double s) { return 2.9 * s; }, pairs, 1e-12);
  CHECK_FALSE(tight.holds);
  CHECK(tight.margin < 0.0);

  // X(p) = p is a 1-expansion: equality with omega(s) = s.
  const FieldFn X = [](const Eigen::VectorXd& p) { return p; };
  CHECK(check_modulus_expansion(X, [](double s) { return s; }, pairs, 1e-12)
            .holds);
  CHECK_FALSE(
      check_modulus_expansion(X, [](double s) { return 1.1 * s; }, pairs, -1e-9)
          .holds);
  // Contraction of -X mirrors the expansion statement with modulus -omega.
  const FieldFn negX = [](const Eigen::VectorXd& p) { return (-p).eval(); };
  CHECK(check_modulus_contraction(negX, [](double s) { return -s; }, pairs,
                                  1e-12)
            .holds);
  CHECK_THROWS_AS(check_modulus_continuity(f, [](double s) { return s; }, {}),
                  std::invalid_argument);
}

TEST_CASE("ground-state log-concavity certificate on the square") {
  LogConcavityOptions options;
  options.levels = 3;
  options.random_pairs = 500;
  const ModulusReport r =
      log_concavity_check(Polygon::rectangle(1.0, 1.0), options);
  CHECK(r.holds);
  CHECK(r.margin >= 0.0);
  CHECK_THROWS_AS(
      log_concavity_check(GraphDomain::constant(1.0, 0.5, 9), options),
      std::invalid_argument);  // needs a polygonal domain
}

TEST_CASE("random convex potentials never beat the constant-potential gaps") {
  const LavineReport r = lavine_suite(25, 1.0, 0xd0d0cacaULL, 384);
  CHECK(r.pass);
  CHECK(r.trials == 25);
  CHECK(r.violations == 0);
  CHECK(r.strict_violations == 0);
  CHECK(r.dir_equality_err <= 1e-6);
  CHECK(r.neu_equality_err <= 1e-6);
  REQUIRE(r.rows.size() == 26);
  CHECK(r.rows.front().index == -1);  // the V = 0 equality case leads
}

TEST_CASE("diameter bound suite holds on seeded convex domains") {
  const auto domains = ac_default_domains(1, 0xacce55edULL);
  const auto potentials = ac_default_potentials();
  REQUIRE(domains.size() == 3);
  REQUIRE(potentials.size() == 3);
  const AcGapReport rep = ac_gap_suite(domains, potentials, 3);
  CHECK(rep.pass);
  CHECK(rep.violations == 0);
  CHECK(rep.cases.size() == 9);
  for (const AcGapCase& c : rep.cases) CHECK(c.gap >= c.bound - c.tol);
}

TEST_CASE("thin triangles blow up monotonically") {
  const ScalingFit fit = thin_triangle_scaling({0.3, 0.2, 0.15, 0.1}, 96, 4);
  CHECK(fit.strictly_increasing);
  CHECK(fit.slope < -0.8);
  REQUIRE(fit.points.size() == 4);
  CHECK(fit.points.front().second > 64.0 * kPi * kPi / 9.0);
  CHECK_THROWS_AS(thin_triangle_scaling({0.3, 0.2, 0.1}, 96, 4),
                  std::invalid_argument);  // needs >= 4 heights
  CHECK_THROWS_AS(thin_triangle_scaling({0.3, 0.2, 0.15, 0.1}, 95, 4),
                  std::invalid_argument);  // odd nx has no apex column
}

TEST_CASE("moduli scan bottoms out at the equilateral apex") {
  const ModuliScan scan = triangle_moduli_scan(5, 2);
  CHECK(scan.argmin.x == doctest::Approx(0.5).epsilon(1e-12));
  CHECK(scan.argmin.y == doctest::Approx(std::sqrt(3.0) / 2.0).epsilon(1e-12));
  CHECK(scan.min_xi > 64.0 * kPi * kPi / 9.0 - 0.5);
  for (const ModuliPoint& p : scan.table) {
    CHECK(in_moduli_region({p.x, p.y}));
    CHECK(p.xi >= scan.min_xi);
    CHECK(p.lambda2 > p.lambda1);
  }
}

TEST_CASE("domain specs parse and reject garbage") {
  const Domain r = parse_domain(R"({"type":"rectangle","a":2.0,"b":1.0})");
  CHECK(domain_kind(r) == "polygon");
  CHECK(domain_diameter(r) == doctest::Approx(std::sqrt(5.0)).epsilon(1e-12));

  const Domain t = parse_domain(R"({"type":"triangle_moduli","p":[0.75,0.3]})");
  CHECK(domain_kind(t) == "simplex");
  CHECK(domain_diameter(t) == doctest::Approx(1.0).epsilon(1e-12));

  const Domain g = parse_domain(
      R"({"type":"graph","L":1.0,"epsilon":0.25,"profile":"sin2"})");
  CHECK(domain_kind(g) == "graph");

  CHECK_THROWS_AS(parse_domain(R"({"type":"dodecahedron"})"),
                  std::invalid_argument);
  CHECK_THROWS_AS(parse_domain(R"({"type":"rectangle","a":-1,"b":1})"),
                  std::invalid_argument);
  CHECK_THROWS_AS(parse_domain(R"({"type":"triangle_moduli","p":[0.2,0.3]})"),
                  std::invalid_argument);  // apex outside the moduli region
  CHECK_THROWS_AS(parse_domain("not json"), std::invalid_argument);
  CHECK_THROWS_AS(load_domain("/nonexistent/file.json"), std::exception);
}

TEST_CASE("initial meshes track the requested resolution") {
  const Domain sq = Polygon::rectangle(1.0, 1.0);
  const TriMesh m = initial_mesh(sq, 0.2);
  CHECK(m.h_max <= 0.2 + 1e-12);
  CHECK(m.area() == doctest::Approx(1.0).epsilon(1e-12));

  const TriMesh cm = initial_mesh(GraphDomain::constant(1.0, 0.3, 9), 0.05);
  CHECK(cm.area() == doctest::Approx(0.3).epsilon(1e-12));

  const TriMesh gm = initial_mesh(GraphDomain::sin2(1.0, 0.3, 129), 0.05);
  validate_mesh(gm);
  CHECK(gm.area() == doctest::Approx(0.3 * 0.5).epsilon(2e-3));
}

TEST_CASE("seeded convex polygons are convex with unit diameter") {
  for (uint64_t seed : {1ULL, 2ULL, 3ULL}) {
    const Polygon p = random_convex_polygon(7, seed);
    CHECK(p.convex());
    CHECK(p.diameter() == doctest::Approx(1.0).epsilon(1e-9));
  }
}

TEST_CASE("parallel_for covers every index exactly once") {
  std::vector<int> hits(100, 0);
  parallel_for(100, 3, [&](int i) { hits[i] += 1; });
  for (int h : hits) CHECK(h == 1);
  parallel_for(0, 2, [&](int) { CHECK(false); });
  CHECK(default_workers() >= 1);
}
