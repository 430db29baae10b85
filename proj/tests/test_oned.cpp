#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <random>
#include <sstream>
#include <stdexcept>

#include "gaplab/oned.hpp"

using namespace gaplab;

namespace {
constexpr double kPi = 3.14159265358979323846;

Profile1D zero_potential(double R = 1.0) { return Profile1D::constant(R, 0.0, 9); }

Profile1D sin2_profile(int n = 513) {
  return Profile1D::from_function(1.0, n, [](double x) {
    const double s = std::sin(kPi * x);
    return s * s;
  });
}
}  // namespace

TEST_CASE("profile sampling and interpolation") {
  const Profile1D p(2.0, {0.0, 1.0, 4.0});
  CHECK(p.value(0.0) == 0.0);
  CHECK(p.value(2.0) == 4.0);
  CHECK(p.value(0.5) == doctest::Approx(0.5));   // linear between samples
  CHECK(p.value(1.5) == doctest::Approx(2.5));
  CHECK(p.value(-1.0) == 0.0);                   // clamped to the interval
  CHECK_THROWS_AS(Profile1D(1.0, {1.0}), std::invalid_argument);
  CHECK_THROWS_AS(Profile1D(-1.0, {1.0, 1.0}), std::invalid_argument);
}

TEST_CASE("profile csv round trip") {
  const Profile1D p = Profile1D::from_function(1.0, 5, [](double x) { return x * x; });
  std::ostringstream csv;
  for (int i = 0; i < p.size(); ++i)
    csv << 0.25 * i << "," << p.samples[i] << "\n";
  std::istringstream in(csv.str());
  const Profile1D q = Profile1D::from_csv(in);
  REQUIRE(q.size() == p.size());
  CHECK(q.R == doctest::Approx(1.0));
  for (int i = 0; i < p.size(); ++i)
    CHECK(q.samples[i] == doctest::Approx(p.samples[i]).epsilon(1e-12));

  std::istringstream bad("0,1\n0.5,2\n0.6,3\n");  // not equispaced
  CHECK_THROWS_AS(Profile1D::from_csv(bad), std::invalid_argument);
}

TEST_CASE("closed-form interval eigenvalues") {
  const auto d = exact_interval_eigs(1.0, Bc::dirichlet, 3);
  CHECK(d[0] == doctest::Approx(kPi * kPi).epsilon(1e-14));
  CHECK(d[1] == doctest::Approx(4.0 * kPi * kPi).epsilon(1e-14));
  CHECK(d[2] == doctest::Approx(9.0 * kPi * kPi).epsilon(1e-14));
  const auto n = exact_interval_eigs(2.0, Bc::neumann, 3);
  CHECK(n[0] == 0.0);
  CHECK(n[1] == doctest::Approx(kPi * kPi / 4.0).epsilon(1e-14));
  CHECK(n[2] == doctest::Approx(kPi * kPi).epsilon(1e-14));
}

TEST_CASE("free interval operator hits the closed form after extrapolation") {
  const Spectrum s = schrodinger_eigs_1d(zero_potential(), Bc::dirichlet, 256, 2);
  CHECK(std::abs(s.eigenvalues[0] - kPi * kPi) <= 1e-7);
  CHECK(std::abs(s.eigenvalues[1] - 4.0 * kPi * kPi) <= 1e-6);
  CHECK(s.extrapolated);
  CHECK(s.levels.size() == 2);

  const Spectrum m = schrodinger_eigs_1d(zero_potential(), Bc::neumann, 256, 2);
  CHECK(std::abs(m.eigenvalues[0]) <= 1e-8);
  CHECK(std::abs(m.eigenvalues[1] - kPi * kPi) <= 1e-6);
}

TEST_CASE("constant potential shifts the spectrum exactly") {
  const Profile1D five = Profile1D::constant(1.0, 5.0, 9);
  const Spectrum s0 = schrodinger_eigs_1d(zero_potential(), Bc::dirichlet, 128, 3);
  const Spectrum s5 = schrodinger_eigs_1d(five, Bc::dirichlet, 128, 3);
  for (int j = 0; j < 3; ++j)
    CHECK(s5.eigenvalues[j] - s0.eigenvalues[j] ==
          doctest::Approx(5.0).epsilon(1e-11));
}

TEST_CASE("single-grid discretization is second order") {
  double err[3];
  int idx = 0;
  for (int n : {32, 64, 128}) {
    const SymPencil p = schrodinger_pencil_1d(zero_potential(), Bc::dirichlet, n);
    CHECK(p.dim() == n - 1);
    const Spectrum s = smallest_eigenpairs(p, 1);
    err[idx++] = std::abs(s.eigenvalues[0] - kPi * kPi);
  }
  const double order1 = std::log2(err[0] / err[1]);
  const double order2 = std::log2(err[1] / err[2]);
  CHECK(order1 == doctest::Approx(2.0).epsilon(0.1));
  CHECK(order2 == doctest::Approx(2.0).epsilon(0.1));
}

TEST_CASE("unit weight drift operator equals the free operator") {
  const Profile1D w = Profile1D::constant(1.0, 1.0, 9);
  for (Bc bc : {Bc::dirichlet, Bc::neumann}) {
    const Spectrum a = bakry_emery_eigs_1d(w, bc, 128, 3);
    const Spectrum b = schrodinger_eigs_1d(zero_potential(), bc, 128, 3);
    for (int j = 0; j < 3; ++j)
      CHECK(std::abs(a.eigenvalues[j] - b.eigenvalues[j]) <=
            1e-12 * std::max(1.0, std::abs(b.eigenvalues[j])));
  }
}

TEST_CASE("sin^2 weight reproduces the interval gap spectrum") {
  // Weight = squared free ground state: mu_k = lambda_{k+1} - lambda_1,
  // i.e. 3 pi^2 and 8 pi^2 for the first two nonzero values.
  const Spectrum mu = bakry_emery_eigs_1d(sin2_profile(), Bc::neumann, 512, 3);
  CHECK(std::abs(mu.eigenvalues[0]) <= 1e-8);
  CHECK(std::abs(mu.eigenvalues[1] - 3.0 * kPi * kPi) <= 1e-4 * 3.0 * kPi * kPi);
  CHECK(std::abs(mu.eigenvalues[2] - 8.0 * kPi * kPi) <= 1e-4 * 8.0 * kPi * kPi);
}

TEST_CASE("weights vanishing inside the interval are rejected") {
  const Profile1D w = Profile1D::from_function(1.0, 257, [](double x) {
    const double s = std::sin(2.0 * kPi * x);
    return s * s;  // zero at x = 1/2
  });
  CHECK_THROWS_AS(bakry_emery_eigs_1d(w, Bc::neumann, 128, 2),
                  std::invalid_argument);
}

TEST_CASE("ground state is the discrete sine, positive, sup-normalized") {
  const auto g = ground_state_1d(zero_potential(), Bc::dirichlet, 200);
  REQUIRE(g.size() == 201);
  double sup = 0.0;
  for (size_t i = 0; i < g.size(); ++i) {
    const double x = static_cast<double>(i) / 200.0;
    sup = std::max(sup, std::abs(g[i] - std::sin(kPi * x)));
    CHECK(g[i] >= 0.0);
  }
  CHECK(sup <= 1e-10);  // nodal values of the FD eigenvector are exact sines
}

TEST_CASE("random convex potentials are convex, bounded, reproducible") {
  std::mt19937_64 rng(7);
  const Profile1D v = random_convex_potential(1.0, 257, rng);
  CHECK(v.size() == 257);
  double second_diff_min = 0.0, amp = 0.0;
  for (size_t i = 1; i + 1 < v.samples.size(); ++i)
    second_diff_min = std::min(
        second_diff_min, v.samples[i - 1] - 2.0 * v.samples[i] + v.samples[i + 1]);
  for (double s : v.samples) amp = std::max(amp, std::abs(s));
  CHECK(second_diff_min >= -1e-9);
  CHECK(amp <= 50.0 + 1e-9);

  std::mt19937_64 rng2(7);
  const Profile1D v2 = random_convex_potential(1.0, 257, rng2);
  for (int i = 0; i < v.size(); ++i) CHECK(v.samples[i] == v2.samples[i]);
}
