#pragma once

#include <Eigen/Core>
#include <cstdint>
#include <functional>
#include <string>
#include <utility>
#include <vector>

#include "gaplab/assembly.hpp"
#include "gaplab/domain_spec.hpp"
#include "gaplab/eigensolve.hpp"
#include "gaplab/oned.hpp"

namespace gaplab {

// ---- Gap function ----------------------------------------------------------

struct LevelRecord {
  double h;
  double lambda1;
  double lambda2;
};

/// Diameter-normalized fundamental gap xi = d^2 (lambda2 - lambda1) of the
/// Dirichlet Laplacian, with per-level values and Richardson extrapolation.
struct GapResult {
  double lambda1 = 0.0;  // extrapolated
  double lambda2 = 0.0;  // extrapolated
  double d = 0.0;
  double xi = 0.0;
  std::vector<LevelRecord> per_level;
  bool extrapolated = false;
  bool cluster_flag = false;    // lambda2 nearly degenerate with lambda3
  double error_estimate = 0.0;  // |extrapolated gap - finest-level gap|
};

/// Solves lambda1, lambda2 on `levels` nested refinements and extrapolates.
/// An optional nodal potential (evaluated at vertices) is added to the form.
GapResult fundamental_gap(const Domain& domain, int levels,
                          const SolveOptions& opts = {},
                          const std::function<double(Vec2)>* potential = nullptr);

struct RectangleExact {
  std::vector<double> eigenvalues;  // sorted pi^2 (j^2/a^2 + k^2/b^2), j,k <= 4
  double gap;                       // 3 pi^2 / a^2 for a >= b
  double xi;                        // 3 pi^2 (a^2 + b^2) / a^2
};

/// Closed-form rectangle spectrum; requires a >= b > 0.
RectangleExact rectangle_gap_exact(double a, double b);

// ---- Thin-domain collapse --------------------------------------------------

struct CollapseRow {
  double eps;
  std::vector<double> mu;      // extrapolated thin-domain Neumann values, j=0..k
  std::vector<double> errors;  // |mu[j] - mu_ref[j]|, j=1..k
};

struct CollapseTable {
  std::vector<CollapseRow> rows;   // one per eps, in input order
  std::vector<double> mu_ref;      // 1D weighted Neumann reference, j=0..k
  double target = 0.0;             // closed-form mu_1 target when known, else 0
};

/// Thin-domain Neumann spectra over {0 <= y <= eps e^{-phi(x)}} against the
/// 1D weighted (drift) Neumann values; one row per eps.
CollapseTable collapse_theorem1(const Profile1D& phi, int k,
                                const std::vector<double>& eps_list, int nx = 128,
                                int ny = 6, const SolveOptions& opts = {});

/// Same experiment for the profile sin^2(pi x), whose first nonzero weighted
/// eigenvalue equals the interval gap 3 pi^2.
CollapseTable collapse_corollary1(const std::vector<double>& eps_list, int nx = 128,
                                  int ny = 6, const SolveOptions& opts = {});

// ---- Eigenfunction-ratio identities ----------------------------------------

/// Weighted weak-form residual of the ratio psi_k = phi_k / phi_1 under the
/// drift eigenvalue lambda_k - lambda_1, with weight phi_1^2. Rows are kept
/// only at vertices whose entire stencil is interior.
double prop1_residual_check(const Domain& domain, int k, double target_h,
                            const SolveOptions& opts = {});

struct Prop2Row {
  int k;              // Dirichlet index >= 2
  double gap;         // lambda_k - lambda_1
  double mu;          // weighted Neumann mu_{k-1}
  double difference;  // gap - mu
};

/// 1D path: both sides on [0, R] via the interval solvers (the weight is the
/// squared numeric ground state).
std::vector<Prop2Row> prop2_identity_interval(double R, int kmax, int n = 512);

/// 2D path: Dirichlet eigenvalues and ground state on the finest mesh, then
/// the weighted Neumann spectrum on the same mesh.
std::vector<Prop2Row> prop2_identity_check(const Domain& domain, int kmax,
                                           int levels, const SolveOptions& opts = {});

struct Prop4Result {
  double lhs;   // sum of mu_0..mu_k from the solver
  double rhs;   // sum of Rayleigh quotients of the k test vectors
  bool holds;   // lhs <= rhs + 1e-9 * scale
};

/// Trace bound for a Neumann pencil: the constant direction is the implicit
/// zeroth member of the family, so the k test vectors must be M-orthogonal to
/// it and to each other (Gram off-diagonals above 1e-8 relative are an error).
Prop4Result prop4_sum_bound_check(const SymPencil& pencil,
                                  const std::vector<Eigen::VectorXd>& test_vectors,
                                  const SolveOptions& opts = {});

/// Seeded test family for the bound: random vectors projected against the
/// constant and M-orthonormalized.
std::vector<Eigen::VectorXd> random_orthogonal_family(const SymPencil& pencil,
                                                      int k, uint64_t seed);

// ---- Modulus checkers ------------------------------------------------------

struct ModulusReport {
  bool holds = false;
  Eigen::VectorXd worst_x, worst_y;
  double margin = 0.0;     // min over pairs of LHS - RHS
  double tolerance = 0.0;  // holds <=> margin >= -tolerance
};

using PointFn = std::function<double(const Eigen::VectorXd&)>;
using FieldFn = std::function<Eigen::VectorXd(const Eigen::VectorXd&)>;
using Modulus = std::function<double(double)>;
using PairList = std::vector<std::pair<Eigen::VectorXd, Eigen::VectorXd>>;

/// Continuity: |f(y) - f(x)| <= 2 eta(|y-x|/2) over the sampled pairs.
ModulusReport check_modulus_continuity(const PointFn& f, const Modulus& eta,
                                       const PairList& pairs,
                                       double tolerance = 0.0);

/// Expansion: (X(y) - X(x)) . (y-x)/|y-x| >= 2 omega(|y-x|/2) over the pairs.
/// A convexity modulus is this check applied to X = grad f.
ModulusReport check_modulus_expansion(const FieldFn& X, const Modulus& omega,
                                      const PairList& pairs,
                                      double tolerance = 0.0);

/// Contraction is expansion of -X with modulus -omega.
ModulusReport check_modulus_contraction(const FieldFn& X, const Modulus& omega,
                                        const PairList& pairs,
                                        double tolerance = 0.0);

struct LogConcavityOptions {
  int levels = 4;
  int lattice_n = 12;       // interior lattice resolution per axis
  int random_pairs = 2000;  // fixed-seed random segment batch
  uint64_t seed = 0x10c0c0a1ULL;
  double slack_C = 1.0;     // second differences must stay <= slack_C * h
};

/// Second-difference concavity certificate for log of the Dirichlet ground
/// state: log phi1(x) + log phi1(y) - 2 log phi1(m) <= C h on sampled interior
/// segments with midpoint m. Margin is min of C h - second difference.
ModulusReport log_concavity_check(const Domain& domain,
                                  const LogConcavityOptions& options = {},
                                  const SolveOptions& opts = {});

// ---- 1D Schroedinger gap suite ---------------------------------------------

struct LavineTrial {
  int index;         // -1 marks the V = 0 equality case
  double amplitude;  // max V - min V
  double dgap, ngap;
  double dmargin, nmargin;  // gap minus the constant-potential bound
  bool ok;                  // both gaps at or above their bounds
  bool strict_ok;           // margins > 1e-3 when the amplitude reaches 1
};

struct LavineReport {
  int trials = 0;
  int violations = 0;         // bound violations
  int strict_violations = 0;  // missing strict margin at amplitude >= 1
  double dir_equality_err = 0.0;  // |gap(V=0) - 3 pi^2/R^2|
  double neu_equality_err = 0.0;  // |gap(V=0) - pi^2/R^2|
  std::vector<LavineTrial> rows;
  bool pass = false;
};

/// Random convex potentials on [0, R]: Dirichlet gap >= 3 pi^2/R^2 - 1e-6 and
/// Neumann gap >= pi^2/R^2 - 1e-6, strict margin > 1e-3 once the amplitude
/// reaches 1, equality within 1e-6 at V = 0.
LavineReport lavine_suite(int trials, double R, uint64_t seed, int n = 512);

// ---- Gap lower bound on convex domains --------------------------------------

struct AcGapCase {
  std::string domain_name;
  std::string potential_name;
  double gap = 0.0;     // extrapolated Dirichlet gap of the Schroedinger form
  double bound = 0.0;   // 3 pi^2 / diameter^2
  double tol = 0.0;     // 2 * self-reported extrapolation error
  double margin = 0.0;  // gap - bound
  bool ok = false;
};

struct AcGapReport {
  std::vector<AcGapCase> cases;
  int violations = 0;
  bool pass = false;
};

using NamedDomain = std::pair<std::string, Domain>;
using NamedPotential = std::pair<std::string, std::function<double(Vec2)>>;

/// Gap of Delta + V versus the diameter bound for each (domain, potential).
AcGapReport ac_gap_suite(const std::vector<NamedDomain>& domains,
                         const std::vector<NamedPotential>& potentials, int levels,
                         const SolveOptions& opts = {});

/// The default suite inputs: square, equilateral triangle, and `extra` seeded
/// random convex polygons; V = 0 plus two convex potentials.
std::vector<NamedDomain> ac_default_domains(int extra, uint64_t seed);
std::vector<NamedPotential> ac_default_potentials();

// ---- Degenerating triangles ------------------------------------------------

struct ScalingFit {
  std::vector<std::pair<double, double>> points;  // (h, xi), h strictly decreasing
  double slope = 0.0;  // least-squares slope of log xi vs log h
  double intercept = 0.0;
  bool strictly_increasing = false;  // xi grows as h decreases
};

/// Gap function along the collapsing family: apex (1/2, h) over the unit base,
/// solved on anisotropic mapped meshes with per-h extrapolation.
ScalingFit thin_triangle_scaling(const std::vector<double>& h_list, int nx = 320,
                                 int ny = 6, const SolveOptions& opts = {});

struct ModuliPoint {
  double x, y;  // apex
  double xi;
  double lambda1, lambda2;
};

struct ModuliScan {
  std::vector<ModuliPoint> table;  // row-major over the grid, skipped points absent
  Vec2 argmin;
  double min_xi = 0.0;
  double grid_dx = 0.0, grid_dy = 0.0;
};

/// xi over a grid_n x grid_n grid on the moduli region [1/2,1] x (0, sqrt(3)/2];
/// the top-left grid point is exactly the equilateral apex.
ModuliScan triangle_moduli_scan(int grid_n, int levels,
                                const SolveOptions& opts = {});

// ---- Shared helpers ---------------------------------------------------------

/// Runs fn(i) for i in [0, count) on `workers` threads (serial when <= 1).
/// Results must be written by index; the schedule is work-stealing but the
/// output layout is deterministic.
void parallel_for(int count, int workers, const std::function<void(int)>& fn);

/// Default worker count: the GAPLAB_WORKERS environment variable, else 1.
int default_workers();

/// Seeded convex polygon with `sides` vertices on an ellipse-like curve,
/// normalized to diameter about 1.
Polygon random_convex_polygon(int sides, uint64_t seed);

}  // namespace gaplab
