#include "gaplab/geometry.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>

namespace gaplab {

double Vec2::norm() const { return std::hypot(x, y); }

double dist(Vec2 a, Vec2 b) { return (a - b).norm(); }

namespace {

double signed_area(const std::vector<Vec2>& v) {
  double s = 0.0;
  const int n = static_cast<int>(v.size());
  for (int i = 0; i < n; ++i) {
    const Vec2& a = v[i];
    const Vec2& b = v[(i + 1) % n];
    s += a.cross(b);
  }
  return 0.5 * s;
}

int orient(Vec2 a, Vec2 b, Vec2 c, double eps) {
  const double d = (b - a).cross(c - a);
  if (d > eps) return 1;
  if (d < -eps) return -1;
  return 0;
}

bool on_segment(Vec2 a, Vec2 b, Vec2 p, double eps) {
  return std::min(a.x, b.x) - eps <= p.x && p.x <= std::max(a.x, b.x) + eps &&
         std::min(a.y, b.y) - eps <= p.y && p.y <= std::max(a.y, b.y) + eps;
}

// Proper or improper intersection of segments [a,b] and [c,d].
bool segments_intersect(Vec2 a, Vec2 b, Vec2 c, Vec2 d, double eps) {
  const int o1 = orient(a, b, c, eps);
  const int o2 = orient(a, b, d, eps);
  const int o3 = orient(c, d, a, eps);
  const int o4 = orient(c, d, b, eps);
  if (o1 != o2 && o3 != o4) return true;
  if (o1 == 0 && on_segment(a, b, c, eps)) return true;
  if (o2 == 0 && on_segment(a, b, d, eps)) return true;
  if (o3 == 0 && on_segment(c, d, a, eps)) return true;
  if (o4 == 0 && on_segment(c, d, b, eps)) return true;
  return false;
}

double bbox_diag(const std::vector<Vec2>& v) {
  double xmin = v[0].x, xmax = v[0].x, ymin = v[0].y, ymax = v[0].y;
  for (const Vec2& p : v) {
    xmin = std::min(xmin, p.x);
    xmax = std::max(xmax, p.x);
    ymin = std::min(ymin, p.y);
    ymax = std::max(ymax, p.y);
  }
  return std::hypot(xmax - xmin, ymax - ymin);
}

double point_segment_distance(Vec2 p, Vec2 a, Vec2 b) {
  const Vec2 ab = b - a;
  const double len2 = ab.dot(ab);
  double t = len2 > 0.0 ? (p - a).dot(ab) / len2 : 0.0;
  t = std::clamp(t, 0.0, 1.0);
  return dist(p, a + ab * t);
}

}  // namespace

Polygon::Polygon(std::vector<Vec2> vertices) : verts_(std::move(vertices)) {
  const int n = static_cast<int>(verts_.size());
  if (n < 3) throw std::invalid_argument("polygon needs at least 3 vertices");
  for (const Vec2& p : verts_) {
    if (!std::isfinite(p.x) || !std::isfinite(p.y))
      throw std::invalid_argument("polygon vertex is not finite");
  }
  const double scale = bbox_diag(verts_);
  if (!(scale > 0.0)) throw std::invalid_argument("polygon is degenerate");
  const double eps = 1e-14 * scale;
  for (int i = 0; i < n; ++i) {
    if (dist(verts_[i], verts_[(i + 1) % n]) <= eps)
      throw std::invalid_argument("polygon has repeated consecutive vertices");
  }
  if (!(signed_area(verts_) > eps * scale))
    throw std::invalid_argument("polygon must be counterclockwise and non-degenerate");
  // Simplicity: non-adjacent edges must not meet.
  const double tol = 1e-12 * scale;
  for (int i = 0; i < n; ++i) {
    for (int j = i + 1; j < n; ++j) {
      if (j == i || (j + 1) % n == i || (i + 1) % n == j) continue;
      if (segments_intersect(verts_[i], verts_[(i + 1) % n], verts_[j],
                             verts_[(j + 1) % n], tol))
        throw std::invalid_argument("polygon is self-intersecting");
    }
  }
}

double Polygon::area() const { return signed_area(verts_); }

double Polygon::diameter() const {
  double d = 0.0;
  for (size_t i = 0; i < verts_.size(); ++i)
    for (size_t j = i + 1; j < verts_.size(); ++j)
      d = std::max(d, dist(verts_[i], verts_[j]));
  return d;
}

bool Polygon::convex() const {
  const int n = size();
  const double eps = 1e-12 * bbox_diag(verts_);
  for (int i = 0; i < n; ++i) {
    if (orient(verts_[i], verts_[(i + 1) % n], verts_[(i + 2) % n], eps) < 0)
      return false;
  }
  return true;
}

double Polygon::boundary_distance(Vec2 p) const {
  double d = std::numeric_limits<double>::infinity();
  const int n = size();
  for (int i = 0; i < n; ++i)
    d = std::min(d, point_segment_distance(p, verts_[i], verts_[(i + 1) % n]));
  return d;
}

Polygon Polygon::rectangle(double a, double b) {
  if (!(a > 0.0) || !(b > 0.0))
    throw std::invalid_argument("rectangle sides must be positive");
  return Polygon({{0.0, 0.0}, {a, 0.0}, {a, b}, {0.0, b}});
}

Polygon Polygon::regular_ngon(int n, double radius) {
  if (n < 3) throw std::invalid_argument("regular polygon needs n >= 3");
  if (!(radius > 0.0)) throw std::invalid_argument("radius must be positive");
  std::vector<Vec2> v(n);
  for (int i = 0; i < n; ++i) {
    const double t = 2.0 * std::numbers::pi * i / n;
    v[i] = {radius * std::cos(t), radius * std::sin(t)};
  }
  return Polygon(std::move(v));
}

Simplex::Simplex(Eigen::MatrixXd vertices) : verts_(std::move(vertices)) {
  const int n = static_cast<int>(verts_.cols());
  if (n < 1 || n > 3) throw std::invalid_argument("simplex dimension must be 1, 2 or 3");
  if (verts_.rows() != n + 1)
    throw std::invalid_argument("simplex needs n+1 vertices in R^n");
  if (!verts_.allFinite()) throw std::invalid_argument("simplex vertex is not finite");
  if (!(volume() > 0.0))
    throw std::invalid_argument("simplex vertices are affinely dependent");
}

double Simplex::diameter() const {
  double d = 0.0;
  for (int i = 0; i < verts_.rows(); ++i)
    for (int j = i + 1; j < verts_.rows(); ++j)
      d = std::max(d, (verts_.row(i) - verts_.row(j)).norm());
  return d;
}

double Simplex::volume() const {
  const int n = dim();
  Eigen::MatrixXd edges(n, n);
  for (int i = 0; i < n; ++i) edges.row(i) = verts_.row(i + 1) - verts_.row(0);
  double fact = 1.0;
  for (int i = 2; i <= n; ++i) fact *= i;
  return std::abs(edges.determinant()) / fact;
}

double Simplex::height(int opposite) const {
  const int n = dim();
  if (opposite < 0 || opposite > n)
    throw std::invalid_argument("facet index out of range");
  Eigen::VectorXd q = verts_.row(opposite);
  std::vector<int> facet;
  for (int i = 0; i <= n; ++i)
    if (i != opposite) facet.push_back(i);
  Eigen::VectorXd base = verts_.row(facet[0]);
  Eigen::MatrixXd span(n, n - 1);
  for (int j = 1; j < n; ++j) span.col(j - 1) = (verts_.row(facet[j]) - base.transpose()).transpose();
  Eigen::VectorXd r = q - base;
  if (n == 1) return r.norm();
  Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(span);
  qr.setThreshold(1e-12);
  if (qr.rank() < n - 1)
    throw std::invalid_argument("facet is degenerate; affine hull has no codimension 1");
  const Eigen::VectorXd proj = span * qr.solve(r);
  return (r - proj).norm();
}

Simplex Simplex::triangle(Vec2 a, Vec2 b, Vec2 c) {
  Eigen::MatrixXd v(3, 2);
  v << a.x, a.y, b.x, b.y, c.x, c.y;
  return Simplex(std::move(v));
}

Polygon Simplex::to_polygon() const {
  if (dim() != 2) throw std::invalid_argument("only 2D simplices convert to polygons");
  std::vector<Vec2> v = {{verts_(0, 0), verts_(0, 1)},
                         {verts_(1, 0), verts_(1, 1)},
                         {verts_(2, 0), verts_(2, 1)}};
  if (signed_area(v) < 0.0) std::swap(v[1], v[2]);
  return Polygon(std::move(v));
}

GraphDomain::GraphDomain(double L, double epsilon, std::vector<double> samples)
    : L_(L), eps_(epsilon), w_(std::move(samples)) {
  if (!(L_ > 0.0)) throw std::invalid_argument("graph domain length must be positive");
  if (!(eps_ > 0.0)) throw std::invalid_argument("graph domain epsilon must be positive");
  if (w_.size() < 2) throw std::invalid_argument("profile needs at least 2 samples");
  double wmax = 0.0;
  for (double v : w_) {
    if (!std::isfinite(v) || v < 0.0)
      throw std::invalid_argument("profile samples must be finite and nonnegative");
    wmax = std::max(wmax, v);
  }
  if (!(wmax > 0.0)) throw std::invalid_argument("profile is identically zero");
}

double GraphDomain::width(double x) const {
  const int n = static_cast<int>(w_.size()) - 1;
  double t = std::clamp(x / L_, 0.0, 1.0) * n;
  int i = std::min(static_cast<int>(t), n - 1);
  const double f = t - i;
  return w_[i] * (1.0 - f) + w_[i + 1] * f;
}

double GraphDomain::max_width() const { return *std::max_element(w_.begin(), w_.end()); }

double GraphDomain::diameter() const {
  const int n = static_cast<int>(w_.size());
  std::vector<Vec2> pts;
  pts.reserve(2 * n);
  for (int i = 0; i < n; ++i) {
    const double x = L_ * i / (n - 1);
    pts.push_back({x, 0.0});
    pts.push_back({x, eps_ * w_[i]});
  }
  // Diameter of the point set equals the diameter of its convex hull.
  std::sort(pts.begin(), pts.end(), [](Vec2 a, Vec2 b) {
    return a.x < b.x || (a.x == b.x && a.y < b.y);
  });
  std::vector<Vec2> hull;
  auto build = [&](auto begin, auto end) {
    size_t start = hull.size();
    for (auto it = begin; it != end; ++it) {
      while (hull.size() >= start + 2 &&
             (hull[hull.size() - 1] - hull[hull.size() - 2])
                     .cross(*it - hull[hull.size() - 2]) <= 0.0)
        hull.pop_back();
      hull.push_back(*it);
    }
    hull.pop_back();
  };
  build(pts.begin(), pts.end());
  build(pts.rbegin(), pts.rend());
  double d = 0.0;
  for (size_t i = 0; i < hull.size(); ++i)
    for (size_t j = i + 1; j < hull.size(); ++j) d = std::max(d, dist(hull[i], hull[j]));
  return d;
}

GraphDomain GraphDomain::constant(double L, double eps, int n) {
  return GraphDomain(L, eps, std::vector<double>(n, 1.0));
}

GraphDomain GraphDomain::sin2(double L, double eps, int n) {
  return from_function(L, eps, n, [L](double x) {
    const double s = std::sin(std::numbers::pi * x / L);
    return s * s;
  });
}

GraphDomain GraphDomain::tent(double apex_x, double apex_h, int n) {
  if (!(apex_x > 0.0) || !(apex_x < 1.0))
    throw std::invalid_argument("tent apex must lie over the open base interval");
  if (!(apex_h > 0.0)) throw std::invalid_argument("tent height must be positive");
  return from_function(1.0, 1.0, n, [=](double x) {
    return x <= apex_x ? apex_h * x / apex_x : apex_h * (1.0 - x) / (1.0 - apex_x);
  });
}

GraphDomain GraphDomain::from_function(double L, double eps, int n,
                                       const std::function<double(double)>& w) {
  if (n < 2) throw std::invalid_argument("profile needs at least 2 samples");
  std::vector<double> s(n);
  for (int i = 0; i < n; ++i) s[i] = std::max(0.0, w(L * i / (n - 1)));
  return GraphDomain(L, eps, std::move(s));
}

bool in_moduli_region(Vec2 p) {
  const double tol = 1e-12;
  if (!(p.y > 0.0)) return false;
  if (p.x < 0.5 - tol) return false;
  if (p.norm() > 1.0 + tol) return false;
  if ((p - Vec2{1.0, 0.0}).norm() > 1.0 + tol) return false;
  return true;
}

Simplex make_triangle_from_moduli(Vec2 p) {
  if (!in_moduli_region(p))
    throw std::invalid_argument("apex is outside the moduli fundamental region");
  return Simplex::triangle({0.0, 0.0}, {1.0, 0.0}, p);
}

}  // namespace gaplab
