#include "gaplab/oned.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <sstream>
#include <stdexcept>

namespace gaplab {

namespace {

constexpr double kPi = std::numbers::pi;

// ---- symmetric tridiagonal eigensolver: Sturm bisection + inverse iteration.

struct Tridiag {
  std::vector<double> d;  // diagonal, size n
  std::vector<double> e;  // off-diagonal, size n-1
};

// Number of eigenvalues strictly below x (Sturm count via LDL^T recurrence).
int count_below(const Tridiag& T, double x) {
  const int n = static_cast<int>(T.d.size());
  double emax = 0.0;
  for (double v : T.e) emax = std::max(emax, std::abs(v));
  const double pivmin = std::numeric_limits<double>::min() +
                        1e-300 * emax * emax;
  int count = 0;
  double q = T.d[0] - x;
  if (q < 0.0) ++count;
  for (int i = 1; i < n; ++i) {
    if (std::abs(q) < pivmin) q = q < 0.0 ? -pivmin : pivmin;
    q = (T.d[i] - x) - T.e[i - 1] * T.e[i - 1] / q;
    if (q < 0.0) ++count;
  }
  return count;
}

std::vector<double> k_smallest_tridiag(const Tridiag& T, int k) {
  const int n = static_cast<int>(T.d.size());
  double lo = T.d[0], hi = T.d[0];
  for (int i = 0; i < n; ++i) {
    const double r = (i > 0 ? std::abs(T.e[i - 1]) : 0.0) +
                     (i + 1 < n ? std::abs(T.e[i]) : 0.0);
    lo = std::min(lo, T.d[i] - r);
    hi = std::max(hi, T.d[i] + r);
  }
  const double span = std::max(hi - lo, 1e-300);
  std::vector<double> vals(k);
  for (int j = 0; j < k; ++j) {
    double a = lo, b = hi;
    for (int it = 0; it < 120 && b - a > 4.0 * 1e-16 * std::max(std::abs(a), std::abs(b)) +
                                          1e-300 * span;
         ++it) {
      const double m = 0.5 * (a + b);
      if (count_below(T, m) > j)
        b = m;
      else
        a = m;
    }
    vals[j] = 0.5 * (a + b);
  }
  return vals;
}

// Solves (T - lambda I) x = b by tridiagonal LU with partial pivoting.
struct ShiftedLU {
  std::vector<double> dl, dd, du, du2;
  std::vector<int> piv;
  int n;

  ShiftedLU(const Tridiag& T, double lambda) {
    n = static_cast<int>(T.d.size());
    dl.assign(n, 0.0);
    dd.assign(n, 0.0);
    du.assign(n, 0.0);
    du2.assign(n, 0.0);
    piv.assign(n, 0);
    for (int i = 0; i < n; ++i) dd[i] = T.d[i] - lambda;
    for (int i = 0; i + 1 < n; ++i) {
      dl[i + 1] = T.e[i];
      du[i] = T.e[i];
    }
    double scale = 0.0;
    for (int i = 0; i < n; ++i) scale = std::max(scale, std::abs(dd[i]));
    for (double v : du) scale = std::max(scale, std::abs(v));
    const double tiny = 1e-300 + 1e-20 * scale;
    for (int i = 0; i + 1 < n; ++i) {
      if (std::abs(dd[i]) >= std::abs(dl[i + 1])) {
        piv[i] = 0;
        if (std::abs(dd[i]) < tiny) dd[i] = tiny;
        const double f = dl[i + 1] / dd[i];
        dl[i + 1] = f;  // store multiplier
        dd[i + 1] -= f * du[i];
      } else {
        piv[i] = 1;
        const double f = dd[i] / dl[i + 1];
        dd[i] = dl[i + 1];
        dl[i + 1] = f;
        const double tmp = dd[i + 1];
        dd[i + 1] = du[i] - f * tmp;
        du2[i] = i + 2 < n ? du[i + 1] : 0.0;
        du[i] = tmp;
        if (i + 2 < n) du[i + 1] = -f * du2[i];
      }
    }
    if (std::abs(dd[n - 1]) < tiny) dd[n - 1] = tiny;
  }

  void solve(std::vector<double>& x) const {
    for (int i = 0; i + 1 < n; ++i) {
      if (piv[i] == 0) {
        x[i + 1] -= dl[i + 1] * x[i];
      } else {
        std::swap(x[i], x[i + 1]);
        x[i + 1] -= dl[i + 1] * x[i];
      }
    }
    x[n - 1] /= dd[n - 1];
    if (n >= 2) x[n - 2] = (x[n - 2] - du[n - 2] * x[n - 1]) / dd[n - 2];
    for (int i = n - 3; i >= 0; --i)
      x[i] = (x[i] - du[i] * x[i + 1] - du2[i] * x[i + 2]) / dd[i];
  }
};

std::vector<double> tridiag_eigenvector(const Tridiag& T, double lambda,
                                        uint64_t salt) {
  const int n = static_cast<int>(T.d.size());
  double scale = 0.0;
  for (double v : T.d) scale = std::max(scale, std::abs(v));
  for (double v : T.e) scale = std::max(scale, std::abs(v));
  // Nudge off the exact eigenvalue so the shifted LU stays solvable.
  const ShiftedLU lu(T, lambda + (2.0 + static_cast<double>(salt % 7)) * 1e-14 * scale);
  std::vector<double> x(n);
  std::mt19937_64 rng(0xabcdef12u + salt);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  for (double& v : x) v = u(rng);
  for (int it = 0; it < 4; ++it) {
    lu.solve(x);
    double norm = 0.0;
    for (double v : x) norm += v * v;
    norm = std::sqrt(norm);
    if (!(norm > 0.0) || !std::isfinite(norm)) {
      for (double& v : x) v = u(rng);
      continue;
    }
    for (double& v : x) v /= norm;
  }
  return x;
}

struct TridiagPairs {
  std::vector<double> values;
  std::vector<std::vector<double>> vectors;
  std::vector<double> residuals;
};

TridiagPairs solve_tridiag(const Tridiag& T, int k) {
  const int n = static_cast<int>(T.d.size());
  if (k > n) throw std::invalid_argument("k exceeds grid dimension");
  TridiagPairs out;
  out.values = k_smallest_tridiag(T, k);
  double scale = 0.0;
  for (double v : T.d) scale = std::max(scale, std::abs(v));
  for (double v : T.e) scale = std::max(scale, std::abs(v));
  for (int j = 0; j < k; ++j) {
    auto x = tridiag_eigenvector(T, out.values[j], static_cast<uint64_t>(j));
    // Orthogonalize inside near-degenerate groups (safety net; interval
    // operators have simple spectra).
    for (int i = 0; i < j; ++i) {
      if (std::abs(out.values[j] - out.values[i]) < 1e-10 * std::max(scale, 1.0)) {
        double dot = 0.0;
        for (int m = 0; m < n; ++m) dot += x[m] * out.vectors[i][m];
        for (int m = 0; m < n; ++m) x[m] -= dot * out.vectors[i][m];
      }
    }
    double norm = 0.0;
    for (double v : x) norm += v * v;
    norm = std::sqrt(norm);
    for (double& v : x) v /= norm;
    double res = 0.0;
    for (int i = 0; i < n; ++i) {
      double r = (T.d[i] - out.values[j]) * x[i];
      if (i > 0) r += T.e[i - 1] * x[i - 1];
      if (i + 1 < n) r += T.e[i] * x[i + 1];
      res += r * r;
    }
    // Backward error: residual norm relative to the operator scale.
    out.residuals.push_back(std::sqrt(res) / std::max(scale, 1e-300));
    out.vectors.push_back(std::move(x));
  }
  return out;
}

// ---- 1D discretizations (lumped-mass weak forms on the node grid).

struct Grid1D {
  double h;
  std::vector<double> x;  // node coordinates
};

Grid1D make_grid(double R, int n) {
  Grid1D g;
  g.h = R / n;
  g.x.resize(n + 1);
  for (int i = 0; i <= n; ++i) g.x[i] = R * i / n;
  return g;
}

struct Generalized {
  Tridiag A;               // stiffness + potential, over retained nodes
  std::vector<double> m;   // lumped mass diagonal, positive
  std::vector<int> nodes;  // retained node indices on the full grid
  int total_nodes = 0;     // full grid size, including eliminated nodes
};

// Standard reduction to a symmetric tridiagonal via the congruence
// D^{-1/2} A D^{-1/2}, D = diag(m).
Tridiag reduce(const Generalized& g) {
  const int n = static_cast<int>(g.A.d.size());
  Tridiag t;
  t.d.resize(n);
  t.e.resize(n - 1);
  for (int i = 0; i < n; ++i) t.d[i] = g.A.d[i] / g.m[i];
  for (int i = 0; i + 1 < n; ++i)
    t.e[i] = g.A.e[i] / std::sqrt(g.m[i] * g.m[i + 1]);
  return t;
}

Generalized schrodinger_form(const Profile1D& V, Bc bc, int n) {
  if (n < 2) throw std::invalid_argument("grid needs n >= 2 cells");
  const Grid1D g = make_grid(V.R, n);
  const double h = g.h;
  Generalized out;
  out.total_nodes = n + 1;
  if (bc == Bc::dirichlet) {
    const int nd = n - 1;
    out.A.d.resize(nd);
    out.A.e.assign(nd - 1, -1.0 / h);
    out.m.assign(nd, h);
    for (int i = 0; i < nd; ++i) {
      out.nodes.push_back(i + 1);
      out.A.d[i] = 2.0 / h + V.value(g.x[i + 1]) * h;
    }
  } else {
    const int nd = n + 1;
    out.A.d.resize(nd);
    out.A.e.assign(nd - 1, -1.0 / h);
    out.m.assign(nd, h);
    out.m.front() = out.m.back() = 0.5 * h;
    for (int i = 0; i < nd; ++i) {
      out.nodes.push_back(i);
      const double k = (i == 0 || i == n) ? 1.0 / h : 2.0 / h;
      out.A.d[i] = k + V.value(g.x[i]) * out.m[i];
    }
  }
  return out;
}

Generalized bakry_emery_form(const Profile1D& w, Bc bc, int n) {
  if (n < 2) throw std::invalid_argument("grid needs n >= 2 cells");
  const Grid1D g = make_grid(w.R, n);
  const double h = g.h;
  std::vector<double> wn(n + 1), wc(n);  // node and cell-midpoint weights
  double wmax = 0.0;
  for (int i = 0; i <= n; ++i) {
    wn[i] = w.value(g.x[i]);
    wmax = std::max(wmax, wn[i]);
  }
  for (int i = 0; i < n; ++i) wc[i] = w.value(g.x[i] + 0.5 * h);
  if (!(wmax > 0.0)) throw std::invalid_argument("weight is identically zero");
  const double tol = 1e-14 * wmax;
  for (int i = 0; i < n; ++i) {
    if (wc[i] <= tol && i > 0 && i + 1 < n)
      throw std::invalid_argument(
          "weight vanishes on an interior subinterval; the measure disconnects");
  }

  // Endpoint nodes without mass are condensed exactly: stationarity of the
  // cell energy forces u at the node to copy its neighbor, and the cell then
  // carries neither energy nor mass.
  int first = 0, last = n;
  while (first < last && wn[first] <= tol) ++first;
  while (last > first && wn[last] <= tol) --last;
  if (last - first < 2)
    throw std::invalid_argument("weight support is too small for the grid");
  for (int i = first + 1; i < last; ++i)
    if (wn[i] <= tol)
      throw std::invalid_argument(
          "weight vanishes at an interior node; the measure disconnects");

  Generalized out;
  out.total_nodes = n + 1;
  const bool dir = bc == Bc::dirichlet;
  const int lo = dir ? first + 1 : first;
  const int hi = dir ? last - 1 : last;
  const int nd = hi - lo + 1;
  if (nd < 2) throw std::invalid_argument("too few dofs after boundary treatment");
  out.A.d.assign(nd, 0.0);
  out.A.e.assign(nd - 1, 0.0);
  out.m.assign(nd, 0.0);
  for (int i = lo; i <= hi; ++i) out.nodes.push_back(i);
  auto cell_w = [&](int c) {  // cell c joins nodes c and c+1
    if (c < first || c >= last) return 0.0;
    return wc[c];
  };
  for (int idx = 0; idx < nd; ++idx) {
    const int i = lo + idx;
    // Dirichlet keeps boundary-cell energy against the zero trace; a cell
    // condensed away with a zero-mass endpoint reports weight 0 here.
    out.A.d[idx] = cell_w(i - 1) / h + cell_w(i) / h;
    if (idx + 1 < nd) out.A.e[idx] = -cell_w(i) / h;
    double mass = wn[i] * h;
    // Trapezoid end factor at true grid endpoints; a node that became an
    // endpoint by condensation keeps the full share (its lost half-cell
    // carries the same mass to leading order).
    if (i == 0 || i == n) mass *= 0.5;
    out.m[idx] = std::max(mass, 1e-300);
  }
  return out;
}

Spectrum solve_generalized(const Generalized& gen, int k, double grid_h) {
  const Tridiag t = reduce(gen);
  TridiagPairs pairs = solve_tridiag(t, k);
  Spectrum s;
  s.eigenvalues = pairs.values;
  s.residuals = pairs.residuals;
  s.h = grid_h;
  const int n = static_cast<int>(gen.A.d.size());
  s.eigenvectors.resize(n, k);
  for (int j = 0; j < k; ++j) {
    // Undo the congruence; columns become M-orthonormal.
    double norm2 = 0.0;
    for (int i = 0; i < n; ++i) {
      const double v = pairs.vectors[j][i] / std::sqrt(gen.m[i]);
      s.eigenvectors(i, j) = v;
      norm2 += v * v * gen.m[i];
    }
    s.eigenvectors.col(j) /= std::sqrt(norm2);
  }
  s.cluster_of.assign(k, 0);
  for (int j = 1; j < k; ++j) {
    const double scale =
        std::max({std::abs(s.eigenvalues[j]), std::abs(s.eigenvalues[j - 1]), 1e-300});
    s.cluster_of[j] = s.cluster_of[j - 1] +
                      (std::abs(s.eigenvalues[j] - s.eigenvalues[j - 1]) > 1e-8 * scale);
  }
  return s;
}

Spectrum extrapolated_pair(const std::function<Generalized(int)>& form, double R,
                           int n, int k) {
  const Generalized coarse = form(n);
  const Generalized fine = form(2 * n);
  Spectrum sc = solve_generalized(coarse, k, R / n);
  Spectrum sf = solve_generalized(fine, k, R / (2 * n));
  Spectrum out = sf;
  out.extrapolated = true;
  out.levels = {{R / n, sc.eigenvalues}, {R / (2 * n), sf.eigenvalues}};
  for (int j = 0; j < k; ++j)
    out.eigenvalues[j] = richardson_extrapolate(sc.eigenvalues[j], sf.eigenvalues[j]);
  return out;
}

SymPencil pencil_from_generalized(const Generalized& gen, Bc bc) {
  const int n = static_cast<int>(gen.A.d.size());
  std::vector<Eigen::Triplet<double>> ta, tm;
  for (int i = 0; i < n; ++i) {
    ta.emplace_back(i, i, gen.A.d[i]);
    tm.emplace_back(i, i, gen.m[i]);
    if (i + 1 < n) {
      ta.emplace_back(i, i + 1, gen.A.e[i]);
      ta.emplace_back(i + 1, i, gen.A.e[i]);
    }
  }
  SymPencil p;
  p.bc = bc;
  p.A.resize(n, n);
  p.M.resize(n, n);
  p.A.setFromTriplets(ta.begin(), ta.end());
  p.M.setFromTriplets(tm.begin(), tm.end());
  p.dof_of_vertex.assign(gen.total_nodes, -1);
  for (int i = 0; i < n; ++i) {
    p.dof_of_vertex[gen.nodes[i]] = i;
    p.vertex_of_dof.push_back(gen.nodes[i]);
  }
  return p;
}

}  // namespace

Profile1D::Profile1D(double R_, std::vector<double> samples_)
    : R(R_), samples(std::move(samples_)) {
  if (!(R > 0.0)) throw std::invalid_argument("profile length must be positive");
  if (samples.size() < 2) throw std::invalid_argument("profile needs n >= 2 samples");
  for (double v : samples)
    if (!std::isfinite(v)) throw std::invalid_argument("profile sample is not finite");
}

double Profile1D::value(double x) const {
  const int n = size() - 1;
  double t = std::clamp(x / R, 0.0, 1.0) * n;
  const int i = std::min(static_cast<int>(t), n - 1);
  const double f = t - i;
  return samples[i] * (1.0 - f) + samples[i + 1] * f;
}

Profile1D Profile1D::constant(double R, double c, int n) {
  return Profile1D(R, std::vector<double>(n, c));
}

Profile1D Profile1D::from_function(double R, int n,
                                   const std::function<double(double)>& f) {
  if (n < 2) throw std::invalid_argument("profile needs n >= 2 samples");
  std::vector<double> s(n);
  for (int i = 0; i < n; ++i) s[i] = f(R * i / (n - 1));
  return Profile1D(R, std::move(s));
}

Profile1D Profile1D::from_csv(std::istream& in) {
  std::vector<double> xs, vs;
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty() || line[0] == '#') continue;
    std::replace(line.begin(), line.end(), ',', ' ');
    std::istringstream row(line);
    double x, v;
    if (!(row >> x >> v)) throw std::invalid_argument("bad CSV row: " + line);
    xs.push_back(x);
    vs.push_back(v);
  }
  if (xs.size() < 2) throw std::invalid_argument("profile CSV needs >= 2 rows");
  const double R = xs.back();
  if (!(R > 0.0) || std::abs(xs.front()) > 1e-12 * R)
    throw std::invalid_argument("profile CSV must span [0, R]");
  const double h = xs[1] - xs[0];
  for (size_t i = 1; i < xs.size(); ++i)
    if (std::abs(xs[i] - xs[i - 1] - h) > 1e-9 * R)
      throw std::invalid_argument("profile CSV must be equispaced");
  return Profile1D(R, std::move(vs));
}

Spectrum schrodinger_eigs_1d(const Profile1D& V, Bc bc, int n, int k) {
  return extrapolated_pair([&](int m) { return schrodinger_form(V, bc, m); }, V.R,
                           n, k);
}

Spectrum bakry_emery_eigs_1d(const Profile1D& weight, Bc bc, int n, int k) {
  return extrapolated_pair([&](int m) { return bakry_emery_form(weight, bc, m); },
                           weight.R, n, k);
}

std::vector<double> exact_interval_eigs(double R, Bc bc, int k) {
  if (!(R > 0.0)) throw std::invalid_argument("interval length must be positive");
  if (k < 1) throw std::invalid_argument("k must be positive");
  std::vector<double> v(k);
  for (int j = 0; j < k; ++j) {
    const double m = bc == Bc::dirichlet ? j + 1 : j;
    v[j] = m * m * kPi * kPi / (R * R);
  }
  return v;
}

std::vector<double> ground_state_1d(const Profile1D& V, Bc bc, int n) {
  const Generalized gen = schrodinger_form(V, bc, n);
  const Spectrum s = solve_generalized(gen, 1, V.R / n);
  std::vector<double> full(n + 1, 0.0);
  for (size_t i = 0; i < gen.nodes.size(); ++i)
    full[gen.nodes[i]] = s.eigenvectors(static_cast<Eigen::Index>(i), 0);
  double mx = 0.0;
  for (double v : full) mx = std::max(mx, std::abs(v));
  double signed_mx = 0.0;
  for (double v : full)
    if (std::abs(v) == mx) signed_mx = v;
  if (signed_mx < 0.0)
    for (double& v : full) v = -v;
  for (double& v : full) v /= mx;
  return full;
}

SymPencil schrodinger_pencil_1d(const Profile1D& V, Bc bc, int n) {
  return pencil_from_generalized(schrodinger_form(V, bc, n), bc);
}

SymPencil bakry_emery_pencil_1d(const Profile1D& weight, Bc bc, int n) {
  return pencil_from_generalized(bakry_emery_form(weight, bc, n), bc);
}

Profile1D random_convex_potential(double R, int n, std::mt19937_64& rng) {
  std::uniform_int_distribution<int> pieces(1, 5);
  std::uniform_real_distribution<double> slope(-40.0, 40.0);
  // Anchors stay away from the endpoints so any steep piece is active on a
  // wide subinterval; that keeps nonconstant draws far from the equality case.
  std::uniform_real_distribution<double> anchor(0.15, 0.85);
  const int m = pieces(rng);
  std::vector<double> a(m), b(m);
  for (int i = 0; i < m; ++i) {
    const double s = slope(rng);
    const double x0 = anchor(rng) * R;
    a[i] = s;
    b[i] = -s * x0;  // piece vanishes at its anchor; max stays moderate
  }
  Profile1D V = Profile1D::from_function(R, n, [&](double x) {
    double v = a[0] * x + b[0];
    for (int i = 1; i < m; ++i) v = std::max(v, a[i] * x + b[i]);
    return v;
  });
  double lo = V.samples[0], hi = V.samples[0];
  for (double v : V.samples) {
    lo = std::min(lo, v);
    hi = std::max(hi, v);
  }
  if (hi - lo > 50.0) {
    const double f = 50.0 / (hi - lo);
    for (double& v : V.samples) v = lo + (v - lo) * f;
  }
  return V;
}

}  // namespace gaplab
