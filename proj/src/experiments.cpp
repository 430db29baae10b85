#include "gaplab/experiments.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdlib>
#include <limits>
#include <mutex>
#include <optional>
#include <random>
#include <stdexcept>
#include <thread>

namespace gaplab {

namespace {

constexpr double kPi = 3.14159265358979323846;

/// Diameter-scaled starting meshes on small domains (an equilateral triangle
/// subdivides into only 3 interior vertices) can be smaller than the number of
/// eigenpairs requested; refine until the Dirichlet pencil has room.
TriMesh ensure_interior(TriMesh mesh, int min_interior) {
  for (int i = 0; i < 12 && mesh.n_interior() < min_interior; ++i)
    mesh = refine(mesh);
  return mesh;
}

Spectrum solve_mesh(const TriMesh& mesh, Bc bc, const Weight& w, int k,
                    const SolveOptions& opts,
                    const std::function<double(Vec2)>* potential = nullptr) {
  Potential2D V;
  const Potential2D* vp = nullptr;
  if (potential) {
    V.values.resize(mesh.vertices.size());
    for (size_t i = 0; i < mesh.vertices.size(); ++i)
      V.values[i] = (*potential)(mesh.vertices[i]);
    vp = &V;
  }
  SymPencil pencil = assemble_pencil(mesh, bc, w, vp);
  Spectrum s = smallest_eigenpairs(pencil, k, opts);
  s.h = mesh.h_max;
  return s;
}

/// Ground state as a full-vertex nodal vector, positive orientation.
std::vector<double> expand_positive(const SymPencil& pencil,
                                    const Eigen::VectorXd& dof_values) {
  std::vector<double> full = pencil.expand(dof_values);
  double sum = 0.0;
  for (double v : full) sum += v;
  if (sum < 0.0)
    for (double& v : full) v = -v;
  return full;
}

std::vector<Vec2> convex_hull(std::vector<Vec2> pts) {
  std::sort(pts.begin(), pts.end(), [](Vec2 a, Vec2 b) {
    return a.x < b.x || (a.x == b.x && a.y < b.y);
  });
  pts.erase(std::unique(pts.begin(), pts.end(),
                        [](Vec2 a, Vec2 b) { return a.x == b.x && a.y == b.y; }),
            pts.end());
  const int n = static_cast<int>(pts.size());
  if (n < 3) throw std::invalid_argument("hull needs >= 3 distinct points");
  std::vector<Vec2> hull(2 * n);
  int k = 0;
  for (int i = 0; i < n; ++i) {
    while (k >= 2 &&
           (hull[k - 1] - hull[k - 2]).cross(pts[i] - hull[k - 2]) <= 0.0)
      --k;
    hull[k++] = pts[i];
  }
  for (int i = n - 2, lower = k + 1; i >= 0; --i) {
    while (k >= lower &&
           (hull[k - 1] - hull[k - 2]).cross(pts[i] - hull[k - 2]) <= 0.0)
      --k;
    hull[k++] = pts[i];
  }
  hull.resize(k - 1);
  return hull;
}

}  // namespace

// ---- Gap function ----------------------------------------------------------

GapResult fundamental_gap(const Domain& domain, int levels,
                          const SolveOptions& opts,
                          const std::function<double(Vec2)>* potential) {
  if (levels < 2) throw std::invalid_argument("levels must be >= 2");
  const double d = domain_diameter(domain);
  GapResult out;
  out.d = d;
  TriMesh mesh = ensure_interior(initial_mesh(domain, d / 4.0), 8);
  Spectrum finest, previous;
  for (int lev = 0; lev < levels; ++lev) {
    if (lev > 0) mesh = refine(mesh);
    Spectrum s =
        solve_mesh(mesh, Bc::dirichlet, Weight::uniform(), 3, opts, potential);
    out.per_level.push_back({mesh.h_max, s.eigenvalues[0], s.eigenvalues[1]});
    previous = std::move(finest);
    finest = std::move(s);
  }
  out.lambda1 =
      richardson_extrapolate(previous.eigenvalues[0], finest.eigenvalues[0]);
  out.lambda2 =
      richardson_extrapolate(previous.eigenvalues[1], finest.eigenvalues[1]);
  out.extrapolated = true;
  const double gap = out.lambda2 - out.lambda1;
  out.xi = d * d * gap;
  out.error_estimate =
      std::abs(gap - (finest.eigenvalues[1] - finest.eigenvalues[0]));
  out.cluster_flag = finest.cluster_of.size() >= 3 &&
                     finest.cluster_of[1] == finest.cluster_of[2];
  return out;
}

RectangleExact rectangle_gap_exact(double a, double b) {
  if (!(a >= b) || !(b > 0.0))
    throw std::invalid_argument("rectangle needs a >= b > 0");
  RectangleExact out;
  for (int j = 1; j <= 4; ++j)
    for (int k = 1; k <= 4; ++k)
      out.eigenvalues.push_back(kPi * kPi * (j * j / (a * a) + k * k / (b * b)));
  std::sort(out.eigenvalues.begin(), out.eigenvalues.end());
  out.gap = 3.0 * kPi * kPi / (a * a);
  out.xi = 3.0 * kPi * kPi * (a * a + b * b) / (a * a);
  return out;
}

// ---- Thin-domain collapse --------------------------------------------------

namespace {

CollapseTable collapse_with_weight(const Profile1D& w, int k,
                                   const std::vector<double>& eps_list, int nx,
                                   int ny, const SolveOptions& opts) {
  if (k < 1) throw std::invalid_argument("k must be >= 1");
  if (eps_list.size() < 3)
    throw std::invalid_argument("eps_list needs >= 3 entries");
  for (size_t i = 1; i < eps_list.size(); ++i)
    if (!(eps_list[i] < eps_list[i - 1]))
      throw std::invalid_argument("eps_list must be decreasing");
  if (nx < 2 || ny < 2) throw std::invalid_argument("grid needs nx, ny >= 2");

  CollapseTable table;
  table.mu_ref = bakry_emery_eigs_1d(w, Bc::neumann, 512, k + 1).eigenvalues;

  double wmax = 0.0;
  for (double v : w.samples) wmax = std::max(wmax, v);
  table.rows.resize(eps_list.size());
  for (size_t e = 0; e < eps_list.size(); ++e) {
    const double eps = eps_list[e];
    if (!(eps > 0.0) || eps * wmax < 1e-5 * w.R)
      throw std::invalid_argument("epsilon too small for the requested resolution");
    const GraphDomain gd(w.R, eps, w.samples);
    const Spectrum coarse = solve_mesh(mesh_graph_domain(gd, nx, ny), Bc::neumann,
                                       Weight::uniform(), k + 1, opts);
    const Spectrum fine = solve_mesh(mesh_graph_domain(gd, 2 * nx, 2 * ny),
                                     Bc::neumann, Weight::uniform(), k + 1, opts);
    CollapseRow row;
    row.eps = eps;
    for (int j = 0; j <= k; ++j)
      row.mu.push_back(
          richardson_extrapolate(coarse.eigenvalues[j], fine.eigenvalues[j]));
    for (int j = 1; j <= k; ++j)
      row.errors.push_back(std::abs(row.mu[j] - table.mu_ref[j]));
    table.rows[e] = std::move(row);
  }
  return table;
}

}  // namespace

CollapseTable collapse_theorem1(const Profile1D& phi, int k,
                                const std::vector<double>& eps_list, int nx,
                                int ny, const SolveOptions& opts) {
  const Profile1D w = Profile1D::from_function(
      phi.R, 4097, [&](double x) { return std::exp(-phi.value(x)); });
  return collapse_with_weight(w, k, eps_list, nx, ny, opts);
}

CollapseTable collapse_corollary1(const std::vector<double>& eps_list, int nx,
                                  int ny, const SolveOptions& opts) {
  const Profile1D w = Profile1D::from_function(1.0, 4097, [](double x) {
    const double s = std::sin(kPi * x);
    return s * s;
  });
  CollapseTable table = collapse_with_weight(w, 1, eps_list, nx, ny, opts);
  table.target = 3.0 * kPi * kPi;
  return table;
}

// ---- Eigenfunction-ratio identities ----------------------------------------

double prop1_residual_check(const Domain& domain, int k, double target_h,
                            const SolveOptions& opts) {
  if (k < 1) throw std::invalid_argument("k must be >= 1");
  const TriMesh mesh =
      ensure_interior(initial_mesh(domain, target_h), std::max(k, 2) + 2);
  SymPencil pencil = assemble_pencil(mesh, Bc::dirichlet, Weight::uniform());
  const Spectrum s = smallest_eigenpairs(pencil, std::max(k, 2), opts);
  const std::vector<double> phi1 = expand_positive(pencil, s.eigenvectors.col(0));
  std::vector<double> phik = pencil.expand(s.eigenvectors.col(k - 1));
  if (k == 1) phik = phi1;

  const int nv = mesh.n_vertices();
  double maxphi = 0.0;
  for (double v : phi1) maxphi = std::max(maxphi, std::abs(v));
  Eigen::VectorXd psi(nv);
  std::vector<double> weight(nv);
  for (int i = 0; i < nv; ++i) {
    weight[i] = phi1[i] * phi1[i];
    psi[i] = phi1[i] < 1e-12 * maxphi ? 0.0 : phik[i] / phi1[i];
  }

  SymPencil wp = assemble_pencil(mesh, Bc::neumann, Weight::nodal(weight));
  const double drift = s.eigenvalues[k - 1] - s.eigenvalues[0];
  const Eigen::VectorXd r = wp.A * psi - drift * (wp.M * psi);
  const Eigen::VectorXd b = wp.M * psi;

  // Keep rows whose whole stencil is interior, so guarded ratio values at the
  // boundary never enter the evaluation.
  std::vector<uint8_t> clean(nv, 1);
  for (const auto& t : mesh.triangles) {
    const bool touches = mesh.on_boundary[t[0]] || mesh.on_boundary[t[1]] ||
                         mesh.on_boundary[t[2]];
    if (touches)
      for (int c = 0; c < 3; ++c) clean[t[c]] = 0;
  }
  double rn = 0.0, bn = 0.0;
  int kept = 0;
  for (int i = 0; i < nv; ++i) {
    if (!clean[i]) continue;
    rn += r[i] * r[i];
    bn += b[i] * b[i];
    ++kept;
  }
  if (kept == 0 || !(bn > 0.0))
    throw std::invalid_argument("mesh too coarse for an interior residual");
  return std::sqrt(rn / bn);
}

std::vector<Prop2Row> prop2_identity_interval(double R, int kmax, int n) {
  if (kmax < 2 || kmax > 4) throw std::invalid_argument("kmax must be in [2, 4]");
  const Profile1D zero = Profile1D::constant(R, 0.0, 9);
  const Spectrum lam = schrodinger_eigs_1d(zero, Bc::dirichlet, n, kmax);
  const std::vector<double> g = ground_state_1d(zero, Bc::dirichlet, 4 * n);
  std::vector<double> w(g.size());
  for (size_t i = 0; i < g.size(); ++i) w[i] = g[i] * g[i];
  const Spectrum mu =
      bakry_emery_eigs_1d(Profile1D(R, std::move(w)), Bc::neumann, n, kmax);
  std::vector<Prop2Row> rows;
  for (int k = 2; k <= kmax; ++k) {
    const double gap = lam.eigenvalues[k - 1] - lam.eigenvalues[0];
    const double m = mu.eigenvalues[k - 1];
    rows.push_back({k, gap, m, gap - m});
  }
  return rows;
}

std::vector<Prop2Row> prop2_identity_check(const Domain& domain, int kmax,
                                           int levels, const SolveOptions& opts) {
  if (kmax < 2 || kmax > 4) throw std::invalid_argument("kmax must be in [2, 4]");
  if (levels < 1) throw std::invalid_argument("levels must be >= 1");
  TriMesh mesh =
      ensure_interior(initial_mesh(domain, domain_diameter(domain) / 4.0), 8);
  for (int lev = 1; lev < levels; ++lev) mesh = refine(mesh);

  SymPencil dp = assemble_pencil(mesh, Bc::dirichlet, Weight::uniform());
  const Spectrum lam = smallest_eigenpairs(dp, kmax, opts);
  const std::vector<double> phi1 = expand_positive(dp, lam.eigenvectors.col(0));
  std::vector<double> w(phi1.size());
  for (size_t i = 0; i < phi1.size(); ++i) w[i] = phi1[i] * phi1[i];

  SymPencil np = assemble_pencil(mesh, Bc::neumann, Weight::nodal(std::move(w)));
  const Spectrum mu = smallest_eigenpairs(np, kmax, opts);
  std::vector<Prop2Row> rows;
  for (int k = 2; k <= kmax; ++k) {
    const double gap = lam.eigenvalues[k - 1] - lam.eigenvalues[0];
    const double m = mu.eigenvalues[k - 1];
    rows.push_back({k, gap, m, gap - m});
  }
  return rows;
}

Prop4Result prop4_sum_bound_check(const SymPencil& pencil,
                                  const std::vector<Eigen::VectorXd>& test_vectors,
                                  const SolveOptions& opts) {
  if (pencil.bc != Bc::neumann)
    throw std::invalid_argument("trace bound check needs a Neumann pencil");
  const int k = static_cast<int>(test_vectors.size());
  if (k < 1) throw std::invalid_argument("need at least one test vector");
  const Eigen::Index n = pencil.dim();
  const Eigen::VectorXd ones = Eigen::VectorXd::Ones(n);
  const Eigen::VectorXd Mones = pencil.M * ones;
  const double cnorm = std::sqrt(ones.dot(Mones));

  std::vector<Eigen::VectorXd> mxi(k);
  for (int j = 0; j < k; ++j) {
    if (test_vectors[j].size() != n)
      throw std::invalid_argument("test vector has wrong dimension");
    mxi[j] = pencil.M * test_vectors[j];
    const double nj = std::sqrt(test_vectors[j].dot(mxi[j]));
    if (!(nj > 0.0)) throw std::invalid_argument("test vector is trivial");
    if (std::abs(test_vectors[j].dot(Mones)) > 1e-8 * nj * cnorm)
      throw std::invalid_argument(
          "test vectors must be orthogonal to the constant mode");
    for (int i = 0; i < j; ++i) {
      const double ni = std::sqrt(test_vectors[i].dot(mxi[i]));
      if (std::abs(test_vectors[i].dot(mxi[j])) > 1e-8 * ni * nj)
        throw std::invalid_argument("test vectors are not pairwise orthogonal");
    }
  }

  const Spectrum s = smallest_eigenpairs(pencil, k + 1, opts);
  Prop4Result out;
  out.lhs = 0.0;
  for (int j = 0; j <= k; ++j) out.lhs += s.eigenvalues[j];
  out.rhs = 0.0;
  for (int j = 0; j < k; ++j)
    out.rhs += rayleigh_quotient(
        pencil, std::span<const double>(test_vectors[j].data(),
                                        static_cast<size_t>(n)));
  out.holds = out.lhs <= out.rhs + 1e-9 + 1e-12 * std::abs(out.rhs);
  return out;
}

std::vector<Eigen::VectorXd> random_orthogonal_family(const SymPencil& pencil,
                                                      int k, uint64_t seed) {
  const Eigen::Index n = pencil.dim();
  if (k < 1 || k >= n)
    throw std::invalid_argument("family size must be in [1, dim)");
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> gauss(0.0, 1.0);
  const Eigen::VectorXd ones = Eigen::VectorXd::Ones(n);
  std::vector<Eigen::VectorXd> family;
  std::vector<Eigen::VectorXd> mfam;
  const Eigen::VectorXd Mones = pencil.M * ones;
  const double c2 = ones.dot(Mones);
  while (static_cast<int>(family.size()) < k) {
    Eigen::VectorXd v(n);
    for (Eigen::Index i = 0; i < n; ++i) v[i] = gauss(rng);
    v -= (v.dot(Mones) / c2) * ones;
    for (size_t j = 0; j < family.size(); ++j)
      v -= v.dot(mfam[j]) * family[j];
    // Second pass keeps the family orthogonal to working precision.
    v -= (v.dot(Mones) / c2) * ones;
    for (size_t j = 0; j < family.size(); ++j)
      v -= v.dot(mfam[j]) * family[j];
    Eigen::VectorXd mv = pencil.M * v;
    const double nv = std::sqrt(v.dot(mv));
    if (!(nv > 1e-8)) continue;
    family.push_back(v / nv);
    mfam.push_back(mv / nv);
  }
  return family;
}

// ---- Modulus checkers ------------------------------------------------------

namespace {

ModulusReport report_min_margin(
    const PairList& pairs, double tolerance,
    const std::function<double(const Eigen::VectorXd&, const Eigen::VectorXd&)>&
        lhs_minus_rhs) {
  if (pairs.empty()) throw std::invalid_argument("no pairs to check");
  ModulusReport rep;
  rep.tolerance = tolerance;
  rep.margin = std::numeric_limits<double>::infinity();
  for (const auto& [x, y] : pairs) {
    const double m = lhs_minus_rhs(x, y);
    if (m < rep.margin) {
      rep.margin = m;
      rep.worst_x = x;
      rep.worst_y = y;
    }
  }
  rep.holds = rep.margin >= -tolerance;
  return rep;
}

}  // namespace

ModulusReport check_modulus_continuity(const PointFn& f, const Modulus& eta,
                                       const PairList& pairs, double tolerance) {
  return report_min_margin(
      pairs, tolerance, [&](const Eigen::VectorXd& x, const Eigen::VectorXd& y) {
        const double r = (y - x).norm();
        return 2.0 * eta(0.5 * r) - std::abs(f(y) - f(x));
      });
}

ModulusReport check_modulus_expansion(const FieldFn& X, const Modulus& omega,
                                      const PairList& pairs, double tolerance) {
  return report_min_margin(
      pairs, tolerance, [&](const Eigen::VectorXd& x, const Eigen::VectorXd& y) {
        const double r = (y - x).norm();
        if (!(r > 0.0)) throw std::invalid_argument("coincident pair");
        const double radial = (X(y) - X(x)).dot(y - x) / r;
        return radial - 2.0 * omega(0.5 * r);
      });
}

ModulusReport check_modulus_contraction(const FieldFn& X, const Modulus& omega,
                                        const PairList& pairs, double tolerance) {
  const FieldFn neg = [&](const Eigen::VectorXd& p) -> Eigen::VectorXd {
    return -X(p);
  };
  const Modulus negw = [&](double s) { return -omega(s); };
  return check_modulus_expansion(neg, negw, pairs, tolerance);
}

ModulusReport log_concavity_check(const Domain& domain,
                                  const LogConcavityOptions& options,
                                  const SolveOptions& opts) {
  std::optional<Polygon> storage;
  if (const Simplex* s = std::get_if<Simplex>(&domain))
    storage = s->to_polygon();
  else if (const Polygon* p = std::get_if<Polygon>(&domain))
    storage = *p;
  if (!storage)
    throw std::invalid_argument("log-concavity check needs a polygonal domain");
  const Polygon* poly = &*storage;
  if (!poly->convex()) throw std::invalid_argument("domain must be convex");

  const double d = poly->diameter();
  TriMesh mesh = ensure_interior(triangulate(*poly, d / 4.0), 4);
  for (int lev = 1; lev < options.levels; ++lev) mesh = refine(mesh);
  SymPencil pencil = assemble_pencil(mesh, Bc::dirichlet, Weight::uniform());
  const Spectrum s = smallest_eigenpairs(pencil, 1, opts);
  const std::vector<double> phi1 = expand_positive(pencil, s.eigenvectors.col(0));
  const P1Interpolator interp(mesh, phi1);

  const double h = mesh.h_max;
  const double inset = std::max(2.0 * h, 0.01 * d);
  auto admissible = [&](Vec2 p) {
    double dummy;
    return interp.try_eval(p, &dummy) && poly->boundary_distance(p) >= inset;
  };

  double xlo = poly->vertices()[0].x, xhi = xlo;
  double ylo = poly->vertices()[0].y, yhi = ylo;
  for (Vec2 v : poly->vertices()) {
    xlo = std::min(xlo, v.x);
    xhi = std::max(xhi, v.x);
    ylo = std::min(ylo, v.y);
    yhi = std::max(yhi, v.y);
  }

  std::vector<Vec2> sites;
  for (int i = 0; i < options.lattice_n; ++i)
    for (int j = 0; j < options.lattice_n; ++j) {
      const Vec2 p{xlo + (xhi - xlo) * (i + 0.5) / options.lattice_n,
                   ylo + (yhi - ylo) * (j + 0.5) / options.lattice_n};
      if (admissible(p)) sites.push_back(p);
    }
  PairList pairs;
  for (size_t i = 0; i < sites.size(); ++i)
    for (size_t j = i + 1; j < sites.size(); ++j) {
      Eigen::VectorXd a(2), b(2);
      a << sites[i].x, sites[i].y;
      b << sites[j].x, sites[j].y;
      pairs.emplace_back(std::move(a), std::move(b));
    }
  std::mt19937_64 rng(options.seed);
  std::uniform_real_distribution<double> ux(xlo, xhi), uy(ylo, yhi);
  int made = 0, attempts = 0;
  while (made < options.random_pairs && attempts < 200 * options.random_pairs) {
    ++attempts;
    const Vec2 p{ux(rng), uy(rng)};
    const Vec2 q{ux(rng), uy(rng)};
    if (!admissible(p) || !admissible(q)) continue;
    if (dist(p, q) < 1e-9 * d) continue;
    Eigen::VectorXd a(2), b(2);
    a << p.x, p.y;
    b << q.x, q.y;
    pairs.emplace_back(std::move(a), std::move(b));
    ++made;
  }
  if (pairs.empty())
    throw std::invalid_argument("domain interior too small to sample");

  const double slack = options.slack_C * h;
  // Convexity keeps midpoints of admissible pairs strictly inside.
  ModulusReport rep = report_min_margin(
      pairs, 0.0, [&](const Eigen::VectorXd& a, const Eigen::VectorXd& b) {
        const Vec2 x{a[0], a[1]}, y{b[0], b[1]};
        const Vec2 m{0.5 * (x.x + y.x), 0.5 * (x.y + y.y)};
        const double second =
            std::log(interp(x)) + std::log(interp(y)) - 2.0 * std::log(interp(m));
        return slack - second;
      });
  return rep;
}

// ---- 1D Schroedinger gap suite ---------------------------------------------

namespace {

LavineTrial lavine_trial(int index, const Profile1D& V, double R, int n) {
  const double dbound = 3.0 * kPi * kPi / (R * R);
  const double nbound = kPi * kPi / (R * R);
  LavineTrial t;
  t.index = index;
  double lo = V.samples[0], hi = V.samples[0];
  for (double v : V.samples) {
    lo = std::min(lo, v);
    hi = std::max(hi, v);
  }
  t.amplitude = hi - lo;
  const Spectrum ds = schrodinger_eigs_1d(V, Bc::dirichlet, n, 2);
  const Spectrum ns = schrodinger_eigs_1d(V, Bc::neumann, n, 2);
  t.dgap = ds.eigenvalues[1] - ds.eigenvalues[0];
  t.ngap = ns.eigenvalues[1] - ns.eigenvalues[0];
  t.dmargin = t.dgap - dbound;
  t.nmargin = t.ngap - nbound;
  t.ok = t.dmargin >= -1e-6 && t.nmargin >= -1e-6;
  t.strict_ok =
      t.amplitude < 1.0 || (t.dmargin > 1e-3 && t.nmargin > 1e-3);
  return t;
}

}  // namespace

LavineReport lavine_suite(int trials, double R, uint64_t seed, int n) {
  if (trials < 1) throw std::invalid_argument("trials must be >= 1");
  if (!(R > 0.0)) throw std::invalid_argument("R must be positive");
  LavineReport rep;
  rep.trials = trials;

  const Profile1D zero = Profile1D::constant(R, 0.0, 9);
  const LavineTrial base = lavine_trial(-1, zero, R, n);
  rep.dir_equality_err = std::abs(base.dgap - 3.0 * kPi * kPi / (R * R));
  rep.neu_equality_err = std::abs(base.ngap - kPi * kPi / (R * R));
  rep.rows.push_back(base);

  std::mt19937_64 rng(seed);
  for (int i = 0; i < trials; ++i) {
    const Profile1D V = random_convex_potential(R, 2049, rng);
    LavineTrial t = lavine_trial(i, V, R, n);
    if (!t.ok) ++rep.violations;
    if (!t.strict_ok) ++rep.strict_violations;
    rep.rows.push_back(t);
  }
  rep.pass = rep.violations == 0 && rep.strict_violations == 0 &&
             rep.dir_equality_err <= 1e-6 && rep.neu_equality_err <= 1e-6;
  return rep;
}

// ---- Gap lower bound on convex domains --------------------------------------

AcGapReport ac_gap_suite(const std::vector<NamedDomain>& domains,
                         const std::vector<NamedPotential>& potentials,
                         int levels, const SolveOptions& opts) {
  AcGapReport rep;
  for (const auto& [dname, domain] : domains) {
    const double R = domain_diameter(domain);
    const double bound = 3.0 * kPi * kPi / (R * R);
    for (const auto& [vname, V] : potentials) {
      const GapResult g = fundamental_gap(domain, levels, opts, &V);
      AcGapCase c;
      c.domain_name = dname;
      c.potential_name = vname;
      c.gap = g.lambda2 - g.lambda1;
      c.bound = bound;
      c.tol = 2.0 * g.error_estimate + 1e-9;
      c.margin = c.gap - c.bound;
      c.ok = c.gap >= c.bound - c.tol;
      if (!c.ok) ++rep.violations;
      rep.cases.push_back(std::move(c));
    }
  }
  rep.pass = rep.violations == 0;
  return rep;
}

Polygon random_convex_polygon(int sides, uint64_t seed) {
  if (sides < 3) throw std::invalid_argument("sides must be >= 3");
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> uangle(0.0, 2.0 * kPi);
  std::uniform_real_distribution<double> uradius(0.35, 0.5);
  for (int attempt = 0; attempt < 64; ++attempt) {
    std::vector<double> angles(sides);
    for (double& a : angles) a = uangle(rng);
    std::sort(angles.begin(), angles.end());
    bool spaced = true;
    for (int i = 1; i < sides; ++i)
      if (angles[i] - angles[i - 1] < 0.15) spaced = false;
    if (!spaced) continue;
    std::vector<Vec2> pts;
    for (double a : angles) {
      const double r = uradius(rng);
      pts.push_back({r * std::cos(a), r * std::sin(a)});
    }
    std::vector<Vec2> hull = convex_hull(pts);
    if (static_cast<int>(hull.size()) < 3) continue;
    Polygon poly(hull);
    const double d = poly.diameter();
    std::vector<Vec2> scaled;
    for (Vec2 v : hull) scaled.push_back({v.x / d, v.y / d});
    return Polygon(scaled);
  }
  throw std::runtime_error("could not draw a convex polygon");
}

std::vector<NamedDomain> ac_default_domains(int extra, uint64_t seed) {
  std::vector<NamedDomain> out;
  out.emplace_back("square", Polygon::rectangle(1.0, 1.0));
  out.emplace_back("equilateral",
                   make_triangle_from_moduli({0.5, std::sqrt(3.0) / 2.0}));
  for (int i = 0; i < extra; ++i)
    out.emplace_back("polygon" + std::to_string(i + 1),
                     random_convex_polygon(5 + (i % 3), seed + 101 * i));
  return out;
}

std::vector<NamedPotential> ac_default_potentials() {
  std::vector<NamedPotential> out;
  out.emplace_back("zero", [](Vec2) { return 0.0; });
  out.emplace_back("quadratic", [](Vec2 p) {
    const double dx = p.x - 0.4, dy = p.y - 0.3;
    return 30.0 * (dx * dx + dy * dy);
  });
  out.emplace_back("hinge",
                   [](Vec2 p) { return 25.0 * std::max(0.0, p.x + p.y - 0.7); });
  return out;
}

// ---- Degenerating triangles ------------------------------------------------

ScalingFit thin_triangle_scaling(const std::vector<double>& h_list, int nx,
                                 int ny, const SolveOptions& opts) {
  if (h_list.size() < 4) throw std::invalid_argument("need >= 4 heights");
  for (size_t i = 0; i < h_list.size(); ++i) {
    if (!(h_list[i] > 0.0) || h_list[i] > std::sqrt(3.0) / 2.0 + 1e-12)
      throw std::invalid_argument("heights must lie in (0, sqrt(3)/2]");
    if (i > 0 && !(h_list[i] < h_list[i - 1]))
      throw std::invalid_argument("heights must be strictly decreasing");
  }
  if (nx % 2 != 0) throw std::invalid_argument("nx must be even (apex column)");
  ScalingFit fit;
  fit.points.resize(h_list.size());
  for (size_t i = 0; i < h_list.size(); ++i) {
    const double h = h_list[i];
    if (h < 1e-5)
      throw std::invalid_argument("height too small for the requested resolution");
    const GraphDomain gd = GraphDomain::tent(0.5, h, nx + 1);
    const double d = gd.diameter();
    const Spectrum coarse = solve_mesh(mesh_graph_domain(gd, nx, ny),
                                       Bc::dirichlet, Weight::uniform(), 3, opts);
    const Spectrum fine = solve_mesh(mesh_graph_domain(gd, 2 * nx, 2 * ny),
                                     Bc::dirichlet, Weight::uniform(), 3, opts);
    const double l1 =
        richardson_extrapolate(coarse.eigenvalues[0], fine.eigenvalues[0]);
    const double l2 =
        richardson_extrapolate(coarse.eigenvalues[1], fine.eigenvalues[1]);
    fit.points[i] = {h, d * d * (l2 - l1)};
  }
  fit.strictly_increasing = true;
  for (size_t i = 1; i < fit.points.size(); ++i)
    if (!(fit.points[i].second > fit.points[i - 1].second))
      fit.strictly_increasing = false;

  const int m = static_cast<int>(fit.points.size());
  double sx = 0.0, sy = 0.0, sxx = 0.0, sxy = 0.0;
  for (const auto& [h, xi] : fit.points) {
    const double lx = std::log(h), ly = std::log(xi);
    sx += lx;
    sy += ly;
    sxx += lx * lx;
    sxy += lx * ly;
  }
  fit.slope = (m * sxy - sx * sy) / (m * sxx - sx * sx);
  fit.intercept = (sy - fit.slope * sx) / m;
  return fit;
}

ModuliScan triangle_moduli_scan(int grid_n, int levels, const SolveOptions& opts) {
  if (grid_n < 2) throw std::invalid_argument("grid_n must be >= 2");
  ModuliScan scan;
  scan.grid_dx = 0.5 / (grid_n - 1);
  scan.grid_dy = (std::sqrt(3.0) / 2.0) / (grid_n - 1);

  std::vector<Vec2> points;
  for (int j = grid_n - 1; j >= 1; --j)
    for (int i = 0; i < grid_n; ++i) {
      const Vec2 p{0.5 + i * scan.grid_dx, j * scan.grid_dy};
      if (in_moduli_region(p)) points.push_back(p);
    }

  std::vector<ModuliPoint> table(points.size());
  parallel_for(static_cast<int>(points.size()), default_workers(), [&](int idx) {
    const Vec2 p = points[idx];
    const GapResult g =
        fundamental_gap(make_triangle_from_moduli(p), levels, opts);
    table[idx] = {p.x, p.y, g.xi, g.lambda1, g.lambda2};
  });

  scan.table = std::move(table);
  scan.min_xi = std::numeric_limits<double>::infinity();
  for (const ModuliPoint& mp : scan.table)
    if (mp.xi < scan.min_xi) {
      scan.min_xi = mp.xi;
      scan.argmin = {mp.x, mp.y};
    }
  return scan;
}

// ---- Shared helpers ---------------------------------------------------------

void parallel_for(int count, int workers, const std::function<void(int)>& fn) {
  if (count <= 0) return;
  if (workers <= 1 || count == 1) {
    for (int i = 0; i < count; ++i) fn(i);
    return;
  }
  std::atomic<int> next{0};
  std::exception_ptr error;
  std::mutex error_mutex;
  auto work = [&]() {
    for (;;) {
      const int i = next.fetch_add(1);
      if (i >= count) return;
      try {
        fn(i);
      } catch (...) {
        std::lock_guard<std::mutex> lock(error_mutex);
        if (!error) error = std::current_exception();
        return;
      }
    }
  };
  std::vector<std::thread> pool;
  const int nthreads = std::min(workers, count);
  pool.reserve(nthreads);
  for (int t = 0; t < nthreads; ++t) pool.emplace_back(work);
  for (auto& t : pool) t.join();
  if (error) std::rethrow_exception(error);
}

int default_workers() {
  const char* env = std::getenv("GAPLAB_WORKERS");
  if (!env) return 1;
  const int v = std::atoi(env);
  return v >= 1 ? v : 1;
}

}  // namespace gaplab
