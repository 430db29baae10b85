#include "gaplab/assembly.hpp"

#include <cmath>
#include <cstdio>
#include <stdexcept>

namespace gaplab {

namespace {

void check_nodal_size(const TriMesh& mesh, size_t n, const char* what) {
  if (static_cast<int>(n) != mesh.n_vertices()) {
    char buf[128];
    std::snprintf(buf, sizeof buf, "%s has %zu values for %d vertices", what, n,
                  mesh.n_vertices());
    throw std::invalid_argument(buf);
  }
}

struct ElemGeom {
  Vec2 grad[3];  // hat-function gradients, constant per element
  double area;
};

ElemGeom elem_geom(const TriMesh& mesh, int t) {
  const auto& tri = mesh.triangles[t];
  const Vec2 a = mesh.vertices[tri[0]];
  const Vec2 b = mesh.vertices[tri[1]];
  const Vec2 c = mesh.vertices[tri[2]];
  const double area2 = (b - a).cross(c - a);
  ElemGeom g;
  g.area = 0.5 * area2;
  g.grad[0] = Vec2{b.y - c.y, c.x - b.x} * (1.0 / area2);
  g.grad[1] = Vec2{c.y - a.y, a.x - c.x} * (1.0 / area2);
  g.grad[2] = Vec2{a.y - b.y, b.x - a.x} * (1.0 / area2);
  return g;
}

// Mass-like matrix with an arbitrary nodal coefficient (3-edge-midpoint rule).
SpMat assemble_mass_like(const TriMesh& mesh, const std::vector<double>* coeff) {
  const int nv = mesh.n_vertices();
  std::vector<Eigen::Triplet<double>> trip;
  trip.reserve(9 * mesh.n_triangles());
  for (int t = 0; t < mesh.n_triangles(); ++t) {
    const auto& tri = mesh.triangles[t];
    const double area = mesh.triangle_area(t);
    double w[3] = {1.0, 1.0, 1.0};
    if (coeff)
      for (int k = 0; k < 3; ++k) w[k] = (*coeff)[tri[k]];
    // Edge-midpoint values of the linear coefficient; midpoint m_kl sits
    // opposite vertex (3-k-l) and carries hat values 1/2 at k and l.
    const double m01 = 0.5 * (w[0] + w[1]);
    const double m12 = 0.5 * (w[1] + w[2]);
    const double m20 = 0.5 * (w[2] + w[0]);
    const double f = area / 12.0;  // = area/3 * (1/2)^2
    const double diag[3] = {f * (m01 + m20), f * (m01 + m12), f * (m12 + m20)};
    const double off[3] = {f * m01, f * m12, f * m20};  // (0,1), (1,2), (2,0)
    for (int k = 0; k < 3; ++k) trip.emplace_back(tri[k], tri[k], diag[k]);
    const int pair[3][2] = {{0, 1}, {1, 2}, {2, 0}};
    for (int e = 0; e < 3; ++e) {
      trip.emplace_back(tri[pair[e][0]], tri[pair[e][1]], off[e]);
      trip.emplace_back(tri[pair[e][1]], tri[pair[e][0]], off[e]);
    }
  }
  SpMat m(nv, nv);
  m.setFromTriplets(trip.begin(), trip.end());
  return m;
}

}  // namespace

Weight Weight::nodal(std::vector<double> v) {
  if (v.empty()) throw std::invalid_argument("nodal weight is empty");
  bool positive = false;
  for (double x : v) {
    if (!std::isfinite(x) || x < 0.0)
      throw std::invalid_argument("weight values must be finite and nonnegative");
    positive = positive || x > 0.0;
  }
  if (!positive) throw std::invalid_argument("weight is identically zero");
  Weight w;
  w.is_uniform = false;
  w.values = std::move(v);
  return w;
}

SpMat assemble_stiffness(const TriMesh& mesh, const Weight& w) {
  if (!w.is_uniform) check_nodal_size(mesh, w.values.size(), "weight");
  const int nv = mesh.n_vertices();
  std::vector<Eigen::Triplet<double>> trip;
  trip.reserve(9 * mesh.n_triangles());
  for (int t = 0; t < mesh.n_triangles(); ++t) {
    const auto& tri = mesh.triangles[t];
    const ElemGeom g = elem_geom(mesh, t);
    double wbar = 1.0;
    if (!w.is_uniform) {
      // Mean over edge midpoints equals the nodal mean for a linear weight.
      wbar = (w.values[tri[0]] + w.values[tri[1]] + w.values[tri[2]]) / 3.0;
    }
    for (int i = 0; i < 3; ++i)
      for (int j = 0; j < 3; ++j)
        trip.emplace_back(tri[i], tri[j], g.grad[i].dot(g.grad[j]) * g.area * wbar);
  }
  SpMat a(nv, nv);
  a.setFromTriplets(trip.begin(), trip.end());
  return a;
}

SpMat assemble_mass(const TriMesh& mesh, const Weight& w) {
  if (!w.is_uniform) check_nodal_size(mesh, w.values.size(), "weight");
  return assemble_mass_like(mesh, w.is_uniform ? nullptr : &w.values);
}

SpMat assemble_potential(const TriMesh& mesh, const Potential2D& V) {
  check_nodal_size(mesh, V.values.size(), "potential");
  for (double x : V.values)
    if (!std::isfinite(x)) throw std::invalid_argument("potential value is not finite");
  return assemble_mass_like(mesh, &V.values);
}

std::vector<double> SymPencil::expand(const Eigen::VectorXd& dof_values) const {
  if (dof_values.size() != static_cast<Eigen::Index>(vertex_of_dof.size()))
    throw std::invalid_argument("dof vector size does not match pencil");
  std::vector<double> out(dof_of_vertex.size(), 0.0);
  for (size_t d = 0; d < vertex_of_dof.size(); ++d)
    out[vertex_of_dof[d]] = dof_values[static_cast<Eigen::Index>(d)];
  return out;
}

namespace {

SymPencil restrict_pencil(const SpMat& A, const SpMat& M, const TriMesh& mesh,
                          Bc bc, bool drop_boundary) {
  const int nv = mesh.n_vertices();
  if (A.rows() != nv || M.rows() != nv)
    throw std::invalid_argument("matrix size does not match mesh");
  SymPencil p;
  p.bc = bc;
  p.dof_of_vertex.assign(nv, -1);
  for (int v = 0; v < nv; ++v) {
    if (drop_boundary && mesh.on_boundary[v]) continue;
    p.dof_of_vertex[v] = static_cast<int32_t>(p.vertex_of_dof.size());
    p.vertex_of_dof.push_back(v);
  }
  const int nd = static_cast<int>(p.vertex_of_dof.size());
  if (nd == 0) throw std::invalid_argument("no interior vertices to keep");
  auto restricted = [&](const SpMat& src) {
    std::vector<Eigen::Triplet<double>> trip;
    trip.reserve(src.nonZeros());
    for (int col = 0; col < src.outerSize(); ++col) {
      const int32_t jc = p.dof_of_vertex[col];
      if (jc < 0) continue;
      for (SpMat::InnerIterator it(src, col); it; ++it) {
        const int32_t ir = p.dof_of_vertex[it.row()];
        if (ir >= 0) trip.emplace_back(ir, jc, it.value());
      }
    }
    SpMat out(nd, nd);
    out.setFromTriplets(trip.begin(), trip.end());
    return out;
  };
  p.A = restricted(A);
  p.M = restricted(M);
  return p;
}

}  // namespace

SymPencil apply_dirichlet(const SpMat& A, const SpMat& M, const TriMesh& mesh) {
  return restrict_pencil(A, M, mesh, Bc::dirichlet, true);
}

SymPencil apply_neumann(const SpMat& A, const SpMat& M, const TriMesh& mesh) {
  return restrict_pencil(A, M, mesh, Bc::neumann, false);
}

SymPencil assemble_pencil(const TriMesh& mesh, Bc bc, const Weight& w,
                          const Potential2D* V) {
  SpMat A = assemble_stiffness(mesh, w);
  if (V) A += assemble_potential(mesh, *V);
  const SpMat M = assemble_mass(mesh, w);
  return bc == Bc::dirichlet ? apply_dirichlet(A, M, mesh)
                             : apply_neumann(A, M, mesh);
}

std::string matrix_to_text(const SpMat& m) {
  std::vector<std::array<double, 3>> entries;
  for (int col = 0; col < m.outerSize(); ++col)
    for (SpMat::InnerIterator it(m, col); it; ++it)
      if (it.row() <= it.col())
        entries.push_back({static_cast<double>(it.row()),
                           static_cast<double>(it.col()), it.value()});
  std::sort(entries.begin(), entries.end(),
            [](const auto& a, const auto& b) {
              return a[0] < b[0] || (a[0] == b[0] && a[1] < b[1]);
            });
  std::string out;
  char buf[96];
  std::snprintf(buf, sizeof buf, "%ld %ld %zu\n", static_cast<long>(m.rows()),
                static_cast<long>(m.cols()), entries.size());
  out += buf;
  for (const auto& e : entries) {
    std::snprintf(buf, sizeof buf, "%d %d %.17g\n", static_cast<int>(e[0]),
                  static_cast<int>(e[1]), e[2]);
    out += buf;
  }
  return out;
}

}  // namespace gaplab
