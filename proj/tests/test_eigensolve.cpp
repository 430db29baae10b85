#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <Eigen/Dense>
#include <cmath>
#include <stdexcept>

#include "gaplab/eigensolve.hpp"
#include "gaplab/mesh.hpp"

using namespace gaplab;

namespace {
constexpr double kPi = 3.14159265358979323846;

SymPencil square_pencil(Bc bc, int refinements = 1) {
  TriMesh m = triangulate(Polygon::rectangle(1.0, 1.0), 0.26);
  for (int i = 0; i < refinements; ++i) m = refine(m);
  return assemble_pencil(m, bc, Weight::uniform());
}

// First positive zero of the Bessel function J0, found independently of any
// spectral code by bisection.
double bessel_j0_first_zero() {
  double lo = 2.0, hi = 3.0;
  REQUIRE(std::cyl_bessel_j(0.0, lo) > 0.0);
  REQUIRE(std::cyl_bessel_j(0.0, hi) < 0.0);
  for (int i = 0; i < 80; ++i) {
    const double mid = 0.5 * (lo + hi);
    (std::cyl_bessel_j(0.0, mid) > 0.0 ? lo : hi) = mid;
  }
  return 0.5 * (lo + hi);
}
}  // namespace

TEST_CASE("sparse solver agrees with a dense factorization") {
  const SymPencil p = square_pencil(Bc::dirichlet);
  const int k = 5;
  const Spectrum s = smallest_eigenpairs(p, k);

  Eigen::GeneralizedSelfAdjointEigenSolver<Eigen::MatrixXd> dense(
      Eigen::MatrixXd(p.A), Eigen::MatrixXd(p.M));
  REQUIRE(dense.info() == Eigen::Success);
  for (int j = 0; j < k; ++j)
    CHECK(s.eigenvalues[j] ==
          doctest::Approx(dense.eigenvalues()[j]).epsilon(1e-9));
}

TEST_CASE("eigenvectors are M-orthonormal with small residuals") {
  const SymPencil p = square_pencil(Bc::neumann);
  const int k = 4;
  const Spectrum s = smallest_eigenpairs(p, k);
  const Eigen::MatrixXd G =
      s.eigenvectors.transpose() * (p.M * s.eigenvectors);
  CHECK((G - Eigen::MatrixXd::Identity(k, k)).cwiseAbs().maxCoeff() <= 1e-8);
  const double scale = std::abs(s.eigenvalues[k - 1]);
  for (int j = 0; j < k; ++j) CHECK(s.residuals[j] <= 1e-8 * scale);
}

TEST_CASE("disk ground eigenvalue matches the Bessel oracle") {
  const double j01 = bessel_j0_first_zero();
  CHECK(j01 == doctest::Approx(2.40482555769577).epsilon(1e-12));

  TriMesh m = triangulate(Polygon::regular_ngon(64, 1.0), 0.3);
  double prev = 0.0, fin = 0.0;
  for (int lev = 0; lev < 3; ++lev) {
    if (lev) m = refine(m);
    const SymPencil p = assemble_pencil(m, Bc::dirichlet, Weight::uniform());
    prev = fin;
    fin = smallest_eigenpairs(p, 1).eigenvalues[0];
  }
  const double lam1 = richardson_extrapolate(prev, fin);
  CHECK(std::abs(lam1 - j01 * j01) <= 0.01 * j01 * j01);
}

TEST_CASE("neumann spectrum starts at zero and hits pi^2") {
  const Spectrum coarse = smallest_eigenpairs(square_pencil(Bc::neumann, 1), 2);
  const Spectrum fine = smallest_eigenpairs(square_pencil(Bc::neumann, 2), 2);
  CHECK(std::abs(fine.eigenvalues[0]) <= 1e-9);
  const double mu1 =
      richardson_extrapolate(coarse.eigenvalues[1], fine.eigenvalues[1]);
  CHECK(mu1 == doctest::Approx(kPi * kPi).epsilon(2e-3));
}

TEST_CASE("square symmetry pair is reported as one cluster") {
  const Spectrum s = smallest_eigenpairs(square_pencil(Bc::dirichlet, 2), 4);
  CHECK(s.cluster_of[1] == s.cluster_of[2]);  // discrete degeneracy is exact
  CHECK(s.cluster_of[0] != s.cluster_of[1]);
  CHECK(s.has_cluster());
  CHECK(s.eigenvalues[1] == doctest::Approx(s.eigenvalues[2]).epsilon(1e-12));
}

TEST_CASE("fixed seeds reproduce bitwise, seeds do not change values") {
  const SymPencil p = square_pencil(Bc::dirichlet);
  SolveOptions a;
  a.seed = 123;
  const Spectrum s1 = smallest_eigenpairs(p, 3, a);
  const Spectrum s2 = smallest_eigenpairs(p, 3, a);
  for (int j = 0; j < 3; ++j) {
    CHECK(s1.eigenvalues[j] == s2.eigenvalues[j]);  // bitwise
    CHECK((s1.eigenvectors.col(j) - s2.eigenvectors.col(j)).norm() == 0.0);
  }
  SolveOptions b;
  b.seed = 987654321;
  const Spectrum s3 = smallest_eigenpairs(p, 3, b);
  for (int j = 0; j < 3; ++j)
    CHECK(s3.eigenvalues[j] ==
          doctest::Approx(s1.eigenvalues[j]).epsilon(1e-8));
}

TEST_CASE("an explicit shift inside the spectrum is recovered") {
  const SymPencil p = square_pencil(Bc::dirichlet);
  SolveOptions opts;
  opts.shift = 100.0;  // above lambda_1: the factorization must re-shift
  const Spectrum s = smallest_eigenpairs(p, 2, opts);
  const Spectrum ref = smallest_eigenpairs(p, 2);
  CHECK(s.eigenvalues[0] == doctest::Approx(ref.eigenvalues[0]).epsilon(1e-9));
  CHECK(s.eigenvalues[1] == doctest::Approx(ref.eigenvalues[1]).epsilon(1e-9));
}

TEST_CASE("nested refinement only lowers Galerkin eigenvalues") {
  const TriMesh coarse = triangulate(Polygon::rectangle(1.0, 1.0), 0.26);
  const SymPencil pc = assemble_pencil(coarse, Bc::dirichlet, Weight::uniform());
  const SymPencil pf =
      assemble_pencil(refine(coarse), Bc::dirichlet, Weight::uniform());
  const double lc = smallest_eigenpairs(pc, 1).eigenvalues[0];
  const double lf = smallest_eigenpairs(pf, 1).eigenvalues[0];
  CHECK(lc >= lf - 1e-10);
}

TEST_CASE("argument validation") {
  const SymPencil p = square_pencil(Bc::dirichlet, 0);
  CHECK_THROWS_AS(smallest_eigenpairs(p, 0), std::invalid_argument);
  CHECK_THROWS_AS(smallest_eigenpairs(p, static_cast<int>(p.dim())),
                  std::invalid_argument);
}

TEST_CASE("rayleigh quotient of an eigenvector is its eigenvalue") {
  const SymPencil p = square_pencil(Bc::dirichlet, 0);
  const Spectrum s = smallest_eigenpairs(p, 2);
  const Eigen::VectorXd v = s.eigenvectors.col(1);
  const double rq = rayleigh_quotient(p, {v.data(), static_cast<size_t>(v.size())});
  CHECK(rq == doctest::Approx(s.eigenvalues[1]).epsilon(1e-10));

  const std::vector<double> zeros(p.dim(), 0.0);
  CHECK_THROWS_AS(rayleigh_quotient(p, zeros), std::invalid_argument);
  const std::vector<double> short_vec(3, 1.0);
  CHECK_THROWS_AS(rayleigh_quotient(p, short_vec), std::invalid_argument);
}

TEST_CASE("richardson extrapolation closed form") {
  CHECK(richardson_extrapolate(20.1, 19.83) ==
        doctest::Approx(19.74).epsilon(1e-12));
  CHECK(richardson_extrapolate(1.0, 1.0) == doctest::Approx(1.0));
  CHECK_THROWS_AS(richardson_extrapolate(1.0, 1.0, 0), std::invalid_argument);
}

TEST_CASE("spectrum json rendering names its fields") {
  const Spectrum s = smallest_eigenpairs(square_pencil(Bc::dirichlet, 0), 1);
  const std::string j = s.to_json();
  CHECK(j.find("\"eigenvalues\"") != std::string::npos);
  CHECK(j.find("\"residuals\"") != std::string::npos);
  CHECK(j.find("\"seed\"") != std::string::npos);
}
