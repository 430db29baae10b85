#include "gaplab/mesh.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <map>
#include <stdexcept>

namespace gaplab {

namespace {

double tri_area(Vec2 a, Vec2 b, Vec2 c) { return 0.5 * (b - a).cross(c - a); }

double max_edge(const TriMesh& m) {
  double h = 0.0;
  for (const auto& t : m.triangles) {
    h = std::max(h, dist(m.vertices[t[0]], m.vertices[t[1]]));
    h = std::max(h, dist(m.vertices[t[1]], m.vertices[t[2]]));
    h = std::max(h, dist(m.vertices[t[2]], m.vertices[t[0]]));
  }
  return h;
}

// Uniform k x k similar subdivision of one triangle. All children share the
// parent's angles, so element quality matches the parent exactly.
TriMesh subdivide_triangle(Vec2 a, Vec2 b, Vec2 c, int k) {
  TriMesh m;
  auto index = [&](int i, int j) {  // i + j <= k, barycentric lattice
    return i * (k + 1) - i * (i - 1) / 2 + j;
  };
  for (int i = 0; i <= k; ++i) {
    for (int j = 0; j <= k - i; ++j) {
      const double u = static_cast<double>(i) / k;
      const double v = static_cast<double>(j) / k;
      m.vertices.push_back(a + (b - a) * u + (c - a) * v);
      m.on_boundary.push_back(i == 0 || j == 0 || i + j == k);
    }
  }
  for (int i = 0; i < k; ++i) {
    for (int j = 0; j < k - i; ++j) {
      const int32_t p = index(i, j);
      const int32_t q = index(i + 1, j);
      const int32_t r = index(i, j + 1);
      m.triangles.push_back({p, q, r});
      if (j < k - i - 1) m.triangles.push_back({q, index(i + 1, j + 1), r});
    }
  }
  m.h_max = max_edge(m);
  return m;
}

}  // namespace

int TriMesh::n_interior() const {
  int n = 0;
  for (uint8_t b : on_boundary) n += b == 0;
  return n;
}

double TriMesh::triangle_area(int t) const {
  const auto& tri = triangles[t];
  return tri_area(vertices[tri[0]], vertices[tri[1]], vertices[tri[2]]);
}

double TriMesh::area() const {
  double s = 0.0;
  for (int t = 0; t < n_triangles(); ++t) s += triangle_area(t);
  return s;
}

void validate_mesh(const TriMesh& mesh) {
  const int nv = mesh.n_vertices();
  if (static_cast<int>(mesh.on_boundary.size()) != nv)
    throw std::invalid_argument("boundary marker count does not match vertices");
  std::map<std::pair<int32_t, int32_t>, int> edge_count;
  for (int t = 0; t < mesh.n_triangles(); ++t) {
    const auto& tri = mesh.triangles[t];
    for (int32_t v : tri)
      if (v < 0 || v >= nv) throw std::invalid_argument("triangle index out of range");
    if (!(mesh.triangle_area(t) > 0.0))
      throw std::invalid_argument("triangle has nonpositive area");
    for (int e = 0; e < 3; ++e) {
      int32_t u = tri[e], v = tri[(e + 1) % 3];
      if (u > v) std::swap(u, v);
      edge_count[{u, v}]++;
    }
  }
  for (const auto& [edge, count] : edge_count) {
    if (count > 2) throw std::invalid_argument("edge shared by more than two triangles");
    if (count == 1 &&
        (!mesh.on_boundary[edge.first] || !mesh.on_boundary[edge.second]))
      throw std::invalid_argument("boundary edge with unmarked endpoint");
  }
}

TriMesh triangulate(const Polygon& poly, double target_h) {
  if (!(target_h > 0.0)) throw std::invalid_argument("target_h must be positive");
  if (!poly.convex())
    throw std::invalid_argument("triangulate handles convex polygons only");
  const auto& v = poly.vertices();
  const int n = poly.size();

  TriMesh m;
  if (n == 3) {
    double longest = 0.0;
    for (int i = 0; i < 3; ++i) longest = std::max(longest, dist(v[i], v[(i + 1) % 3]));
    const int k = std::max(1, static_cast<int>(std::ceil(longest / target_h)));
    m = subdivide_triangle(v[0], v[1], v[2], k);
  } else {
    Vec2 centroid{0.0, 0.0};
    for (const Vec2& p : v) centroid = centroid + p;
    centroid = centroid * (1.0 / n);
    m.vertices = v;
    m.vertices.push_back(centroid);
    m.on_boundary.assign(n, 1);
    m.on_boundary.push_back(0);
    for (int i = 0; i < n; ++i)
      m.triangles.push_back({static_cast<int32_t>(i), static_cast<int32_t>((i + 1) % n),
                             static_cast<int32_t>(n)});
    m.h_max = max_edge(m);
    while (m.h_max > target_h) m = refine(m);
  }
  return m;
}

TriMesh refine(const TriMesh& mesh) {
  TriMesh out;
  out.vertices = mesh.vertices;
  out.on_boundary = mesh.on_boundary;

  // Edge -> adjacency count, to recognize boundary edges without geometry.
  std::map<std::pair<int32_t, int32_t>, int> edge_count;
  for (const auto& tri : mesh.triangles) {
    for (int e = 0; e < 3; ++e) {
      int32_t u = tri[e], v = tri[(e + 1) % 3];
      if (u > v) std::swap(u, v);
      edge_count[{u, v}]++;
    }
  }
  std::map<std::pair<int32_t, int32_t>, int32_t> midpoint;
  auto mid = [&](int32_t u, int32_t v) {
    if (u > v) std::swap(u, v);
    auto it = midpoint.find({u, v});
    if (it != midpoint.end()) return it->second;
    const int32_t id = static_cast<int32_t>(out.vertices.size());
    out.vertices.push_back((mesh.vertices[u] + mesh.vertices[v]) * 0.5);
    out.on_boundary.push_back(edge_count.at({u, v}) == 1 ? 1 : 0);
    midpoint[{u, v}] = id;
    return id;
  };

  out.triangles.reserve(4 * mesh.triangles.size());
  for (const auto& t : mesh.triangles) {
    const int32_t m01 = mid(t[0], t[1]);
    const int32_t m12 = mid(t[1], t[2]);
    const int32_t m20 = mid(t[2], t[0]);
    out.triangles.push_back({t[0], m01, m20});
    out.triangles.push_back({m01, t[1], m12});
    out.triangles.push_back({m20, m12, t[2]});
    out.triangles.push_back({m01, m12, m20});
  }
  out.h_max = max_edge(out);
  return out;
}

TriMesh mesh_graph_domain(const GraphDomain& gd, int nx, int ny) {
  if (nx < 1 || ny < 1) throw std::invalid_argument("grid must have nx, ny >= 1");
  const double L = gd.length();
  const double eps = gd.epsilon();
  const double merge_tol = 1e-12 * L;

  std::vector<double> w(nx + 1);
  for (int i = 0; i <= nx; ++i) w[i] = gd.width(L * i / nx);
  const double wmax = *std::max_element(w.begin(), w.end());
  if (!(wmax > 0.0)) throw std::invalid_argument("profile is identically zero");

  TriMesh m;
  // column_ids[i][j] = vertex id of grid node (i, j); collapsed columns hold one id.
  std::vector<std::vector<int32_t>> col(nx + 1);
  for (int i = 0; i <= nx; ++i) {
    const double x = L * i / nx;
    const bool collapsed = eps * w[i] <= merge_tol;
    const int rows = collapsed ? 1 : ny + 1;
    col[i].resize(ny + 1);
    for (int j = 0; j < rows; ++j) {
      const int32_t id = static_cast<int32_t>(m.vertices.size());
      m.vertices.push_back({x, eps * w[i] * j / ny});
      const bool bdry = collapsed || j == 0 || j == ny || i == 0 || i == nx;
      m.on_boundary.push_back(bdry ? 1 : 0);
      col[i][j] = id;
    }
    if (collapsed)
      for (int j = 1; j <= ny; ++j) col[i][j] = col[i][0];
  }

  auto push = [&](int32_t a, int32_t b, int32_t c) {
    if (a == b || b == c || c == a) return;  // degenerate sliver from a collapse
    if (tri_area(m.vertices[a], m.vertices[b], m.vertices[c]) < 0.0) std::swap(b, c);
    m.triangles.push_back({a, b, c});
  };
  for (int i = 0; i < nx; ++i) {
    for (int j = 0; j < ny; ++j) {
      const int32_t a = col[i][j], b = col[i + 1][j];
      const int32_t c = col[i + 1][j + 1], d = col[i][j + 1];
      push(a, b, c);
      push(a, c, d);
    }
  }
  if (m.triangles.empty()) throw std::invalid_argument("mesh has no nondegenerate cells");
  m.h_max = max_edge(m);
  return m;
}

std::string mesh_to_text(const TriMesh& mesh) {
  std::string out;
  char buf[128];
  std::snprintf(buf, sizeof buf, "%d %d\n", mesh.n_vertices(), mesh.n_triangles());
  out += buf;
  for (int i = 0; i < mesh.n_vertices(); ++i) {
    std::snprintf(buf, sizeof buf, "v %.17g %.17g %d\n", mesh.vertices[i].x,
                  mesh.vertices[i].y, static_cast<int>(mesh.on_boundary[i]));
    out += buf;
  }
  for (const auto& t : mesh.triangles) {
    std::snprintf(buf, sizeof buf, "t %d %d %d\n", t[0], t[1], t[2]);
    out += buf;
  }
  return out;
}

P1Interpolator::P1Interpolator(const TriMesh& mesh, std::vector<double> nodal)
    : mesh_(mesh), nodal_(std::move(nodal)) {
  if (static_cast<int>(nodal_.size()) != mesh.n_vertices())
    throw std::invalid_argument("nodal field size does not match mesh");
  double xmin = mesh.vertices[0].x, xmax = xmin, ymin = mesh.vertices[0].y, ymax = ymin;
  for (const Vec2& p : mesh.vertices) {
    xmin = std::min(xmin, p.x);
    xmax = std::max(xmax, p.x);
    ymin = std::min(ymin, p.y);
    ymax = std::max(ymax, p.y);
  }
  const int target = std::max(1, static_cast<int>(std::sqrt(mesh.n_triangles())));
  x0_ = xmin;
  y0_ = ymin;
  gx_ = gy_ = target;
  cell_ = std::max((xmax - xmin) / gx_, (ymax - ymin) / gy_);
  if (!(cell_ > 0.0)) cell_ = 1.0;
  gx_ = std::max(1, static_cast<int>(std::ceil((xmax - xmin) / cell_)));
  gy_ = std::max(1, static_cast<int>(std::ceil((ymax - ymin) / cell_)));
  bins_.assign(static_cast<size_t>(gx_) * gy_, {});
  for (int t = 0; t < mesh.n_triangles(); ++t) {
    const auto& tri = mesh.triangles[t];
    double txmin = mesh.vertices[tri[0]].x, txmax = txmin;
    double tymin = mesh.vertices[tri[0]].y, tymax = tymin;
    for (int k = 1; k < 3; ++k) {
      txmin = std::min(txmin, mesh.vertices[tri[k]].x);
      txmax = std::max(txmax, mesh.vertices[tri[k]].x);
      tymin = std::min(tymin, mesh.vertices[tri[k]].y);
      tymax = std::max(tymax, mesh.vertices[tri[k]].y);
    }
    const int i0 = std::clamp(static_cast<int>((txmin - x0_) / cell_), 0, gx_ - 1);
    const int i1 = std::clamp(static_cast<int>((txmax - x0_) / cell_), 0, gx_ - 1);
    const int j0 = std::clamp(static_cast<int>((tymin - y0_) / cell_), 0, gy_ - 1);
    const int j1 = std::clamp(static_cast<int>((tymax - y0_) / cell_), 0, gy_ - 1);
    for (int i = i0; i <= i1; ++i)
      for (int j = j0; j <= j1; ++j)
        bins_[static_cast<size_t>(i) * gy_ + j].push_back(t);
  }
}

bool P1Interpolator::try_eval(Vec2 p, double* value) const {
  const int i = static_cast<int>((p.x - x0_) / cell_);
  const int j = static_cast<int>((p.y - y0_) / cell_);
  if (i < 0 || i >= gx_ || j < 0 || j >= gy_) return false;
  const double tol = -1e-12 * (mesh_.h_max + 1.0);
  for (int32_t t : bins_[static_cast<size_t>(i) * gy_ + j]) {
    const auto& tri = mesh_.triangles[t];
    const Vec2 a = mesh_.vertices[tri[0]];
    const Vec2 b = mesh_.vertices[tri[1]];
    const Vec2 c = mesh_.vertices[tri[2]];
    const double area2 = (b - a).cross(c - a);
    const double l0 = (b - p).cross(c - p) / area2;
    const double l1 = (c - p).cross(a - p) / area2;
    const double l2 = 1.0 - l0 - l1;
    if (l0 >= tol && l1 >= tol && l2 >= tol) {
      *value = l0 * nodal_[tri[0]] + l1 * nodal_[tri[1]] + l2 * nodal_[tri[2]];
      return true;
    }
  }
  return false;
}

double P1Interpolator::operator()(Vec2 p) const {
  double v = 0.0;
  if (!try_eval(p, &v)) throw std::invalid_argument("point lies outside the mesh");
  return v;
}

std::vector<Vec2> recover_vertex_gradients(const TriMesh& mesh,
                                           std::span<const double> nodal) {
  if (static_cast<int>(nodal.size()) != mesh.n_vertices())
    throw std::invalid_argument("nodal field size does not match mesh");
  std::vector<Vec2> grad(mesh.n_vertices(), {0.0, 0.0});
  std::vector<double> weight(mesh.n_vertices(), 0.0);
  for (int t = 0; t < mesh.n_triangles(); ++t) {
    const auto& tri = mesh.triangles[t];
    const Vec2 a = mesh.vertices[tri[0]];
    const Vec2 b = mesh.vertices[tri[1]];
    const Vec2 c = mesh.vertices[tri[2]];
    const double area2 = (b - a).cross(c - a);
    // Constant element gradient of the P1 interpolant.
    const Vec2 grads[3] = {
        Vec2{(b.y - c.y), (c.x - b.x)} * (1.0 / area2),
        Vec2{(c.y - a.y), (a.x - c.x)} * (1.0 / area2),
        Vec2{(a.y - b.y), (b.x - a.x)} * (1.0 / area2),
    };
    Vec2 g{0.0, 0.0};
    for (int k = 0; k < 3; ++k) g = g + grads[k] * nodal[tri[k]];
    const double area = 0.5 * area2;
    for (int k = 0; k < 3; ++k) {
      grad[tri[k]] = grad[tri[k]] + g * area;
      weight[tri[k]] += area;
    }
  }
  for (int v = 0; v < mesh.n_vertices(); ++v)
    if (weight[v] > 0.0) grad[v] = grad[v] * (1.0 / weight[v]);
  return grad;
}

}  // namespace gaplab
