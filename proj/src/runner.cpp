#include "gaplab/runner.hpp"

#include <json.hpp>

#include <cmath>
#include <cstdarg>
#include <cstdio>
#include <fstream>
#include <functional>
#include <stdexcept>

#include "gaplab/acceptance.hpp"
#include "gaplab/domain_spec.hpp"
#include "gaplab/experiments.hpp"

namespace gaplab {

namespace {

using json = nlohmann::ordered_json;

constexpr double kPi = 3.14159265358979323846;

std::string strf(const char* fmt, ...) {
  char buf[768];
  va_list args;
  va_start(args, fmt);
  vsnprintf(buf, sizeof buf, fmt, args);
  va_end(args);
  return std::string(buf);
}

std::string g17(double v) {
  char buf[40];
  snprintf(buf, sizeof buf, "%.17g", v);
  return std::string(buf);
}

/// Config reader that records every effective value (defaults included) so
/// the output can echo exactly what ran. Unknown keys are rejected.
class Cfg {
 public:
  explicit Cfg(const json& in) : in_(in) {
    if (!in_.is_object()) throw std::invalid_argument("config must be a JSON object");
  }

  void allow(std::initializer_list<const char*> keys) {
    for (const auto& item : in_.items()) {
      bool known = false;
      for (const char* k : keys)
        if (item.key() == k) known = true;
      if (!known)
        throw std::invalid_argument("unknown config key: " + item.key());
    }
  }

  double num(const char* key, double dflt, double lo, double hi) {
    double v = dflt;
    if (in_.contains(key)) {
      if (!in_[key].is_number())
        throw std::invalid_argument(std::string(key) + " must be a number");
      v = in_[key].get<double>();
    }
    if (!(v >= lo && v <= hi))
      throw std::invalid_argument(strf("%s=%g outside [%g, %g]", key, v, lo, hi));
    eff_[key] = v;
    return v;
  }

  int integer(const char* key, int dflt, int lo, int hi) {
    int v = dflt;
    if (in_.contains(key)) {
      if (!in_[key].is_number_integer())
        throw std::invalid_argument(std::string(key) + " must be an integer");
      v = in_[key].get<int>();
    }
    if (v < lo || v > hi)
      throw std::invalid_argument(strf("%s=%d outside [%d, %d]", key, v, lo, hi));
    eff_[key] = v;
    return v;
  }

  uint64_t seed(const char* key, uint64_t dflt) {
    uint64_t v = dflt;
    if (in_.contains(key)) {
      if (!in_[key].is_number_unsigned() && !in_[key].is_number_integer())
        throw std::invalid_argument(std::string(key) + " must be an integer");
      v = in_[key].get<uint64_t>();
    }
    eff_[key] = v;
    return v;
  }

  bool boolean(const char* key, bool dflt) {
    bool v = dflt;
    if (in_.contains(key)) {
      if (!in_[key].is_boolean())
        throw std::invalid_argument(std::string(key) + " must be a boolean");
      v = in_[key].get<bool>();
    }
    eff_[key] = v;
    return v;
  }

  std::string str(const char* key, const std::string& dflt) {
    std::string v = dflt;
    if (in_.contains(key)) {
      if (!in_[key].is_string())
        throw std::invalid_argument(std::string(key) + " must be a string");
      v = in_[key].get<std::string>();
    }
    eff_[key] = v;
    return v;
  }

  std::vector<double> num_list(const char* key, std::vector<double> dflt,
                               double lo, double hi) {
    std::vector<double> v = std::move(dflt);
    if (in_.contains(key)) {
      if (!in_[key].is_array())
        throw std::invalid_argument(std::string(key) + " must be an array");
      v.clear();
      for (const auto& e : in_[key]) {
        if (!e.is_number())
          throw std::invalid_argument(std::string(key) + " entries must be numbers");
        v.push_back(e.get<double>());
      }
    }
    if (v.empty()) throw std::invalid_argument(std::string(key) + " must be nonempty");
    for (double x : v)
      if (!(x >= lo && x <= hi))
        throw std::invalid_argument(strf("%s entry %g outside [%g, %g]", key, x, lo, hi));
    eff_[key] = v;
    return v;
  }

  Domain domain() {
    if (in_.contains("domain")) {
      eff_["domain"] = in_["domain"];
      return parse_domain(in_["domain"].dump());
    }
    if (in_.contains("domain_path")) {
      if (!in_["domain_path"].is_string())
        throw std::invalid_argument("domain_path must be a string");
      eff_["domain_path"] = in_["domain_path"];
      return load_domain(in_["domain_path"].get<std::string>());
    }
    throw std::invalid_argument("config needs domain (inline object) or domain_path");
  }

  bool has(const char* key) const { return in_.contains(key); }

  SolveOptions solver() {
    SolveOptions o;
    o.tol = num("tol", o.tol, 1e-14, 1e-2);
    o.seed = seed("seed", o.seed);
    return o;
  }

  const json& effective() const { return eff_; }

 private:
  const json& in_;
  json eff_ = json::object();
};

/// Profile spec strings: "const:c", "affine:a,b" (a + b x), "quad:a,c"
/// (a (x-c)^2), "sin2", "file:path".
Profile1D profile_from_spec(const std::string& spec, double R, int n) {
  const auto colon = spec.find(':');
  const std::string head = spec.substr(0, colon);
  const std::string rest = colon == std::string::npos ? "" : spec.substr(colon + 1);
  double a = 0.0, b = 0.0;
  if (head == "const") {
    if (sscanf(rest.c_str(), "%lf", &a) != 1)
      throw std::invalid_argument("profile const needs one value: " + spec);
    return Profile1D::constant(R, a, n);
  }
  if (head == "affine") {
    if (sscanf(rest.c_str(), "%lf,%lf", &a, &b) != 2)
      throw std::invalid_argument("profile affine needs two values: " + spec);
    return Profile1D::from_function(R, n, [=](double x) { return a + b * x; });
  }
  if (head == "quad") {
    if (sscanf(rest.c_str(), "%lf,%lf", &a, &b) != 2)
      throw std::invalid_argument("profile quad needs two values: " + spec);
    return Profile1D::from_function(
        R, n, [=](double x) { return a * (x - b) * (x - b); });
  }
  if (head == "sin2") {
    return Profile1D::from_function(R, n, [=](double x) {
      const double s = std::sin(kPi * x / R);
      return s * s;
    });
  }
  if (head == "file") {
    std::ifstream in(rest);
    if (!in) throw std::invalid_argument("cannot open profile file: " + rest);
    return Profile1D::from_csv(in);
  }
  throw std::invalid_argument("unknown profile spec: " + spec);
}

/// 2D potential specs: "const:c", "quadratic:a,cx,cy" (a ((x-cx)^2+(y-cy)^2)),
/// "hinge:a,nx,ny,c" (a max(0, nx x + ny y - c)).
std::function<double(Vec2)> potential2d_from_spec(const std::string& spec) {
  const auto colon = spec.find(':');
  const std::string head = spec.substr(0, colon);
  const std::string rest = colon == std::string::npos ? "" : spec.substr(colon + 1);
  double a = 0.0, b = 0.0, c = 0.0, d = 0.0;
  if (head == "const") {
    if (sscanf(rest.c_str(), "%lf", &a) != 1)
      throw std::invalid_argument("potential const needs one value: " + spec);
    return [=](Vec2) { return a; };
  }
  if (head == "quadratic") {
    if (sscanf(rest.c_str(), "%lf,%lf,%lf", &a, &b, &c) != 3)
      throw std::invalid_argument("potential quadratic needs three values: " + spec);
    return [=](Vec2 p) {
      return a * ((p.x - b) * (p.x - b) + (p.y - c) * (p.y - c));
    };
  }
  if (head == "hinge") {
    if (sscanf(rest.c_str(), "%lf,%lf,%lf,%lf", &a, &b, &c, &d) != 4)
      throw std::invalid_argument("potential hinge needs four values: " + spec);
    return [=](Vec2 p) { return a * std::max(0.0, b * p.x + c * p.y - d); };
  }
  throw std::invalid_argument("unknown potential spec: " + spec);
}

json envelope(const std::string& command, const Cfg& cfg, uint64_t seed) {
  json out;
  out["tool"] = "gaplab";
  out["version"] = kToolVersion;
  out["command"] = command;
  out["seed"] = seed;
  out["config"] = cfg.effective();
  return out;
}

std::string csv_preamble(const std::string& command, const Cfg& cfg,
                         uint64_t seed, const json& tolerances) {
  std::string s;
  s += std::string("# gaplab ") + kToolVersion + "\n";
  s += "# command=" + command + "\n";
  s += "# seed=" + std::to_string(seed) + "\n";
  s += "# config=" + cfg.effective().dump() + "\n";
  s += "# tolerances=" + tolerances.dump() + "\n";
  return s;
}

// ---- command handlers -------------------------------------------------------

RunOutput cmd_gap(Cfg& cfg) {
  cfg.allow({"domain", "domain_path", "levels", "V", "tol", "seed"});
  const Domain d = cfg.domain();
  const int levels = cfg.integer("levels", 5, 1, 8);
  const std::string vspec = cfg.str("V", "");
  const SolveOptions opts = cfg.solver();

  std::function<double(Vec2)> vfn;
  const std::function<double(Vec2)>* vptr = nullptr;
  if (!vspec.empty()) {
    vfn = potential2d_from_spec(vspec);
    vptr = &vfn;
  }
  const GapResult g = fundamental_gap(d, levels, opts, vptr);

  json tol = {{"solver_tol", opts.tol}, {"gap_error_estimate", g.error_estimate}};
  json out = envelope("gap", cfg, opts.seed);
  out["tolerances"] = tol;
  json levels_json = json::array();
  for (const auto& lv : g.per_level)
    levels_json.push_back(
        {{"h", lv.h}, {"lambda1", lv.lambda1}, {"lambda2", lv.lambda2}});
  out["result"] = {{"lambda1", g.lambda1},       {"lambda2", g.lambda2},
                   {"diameter", g.d},            {"gap", g.lambda2 - g.lambda1},
                   {"xi", g.xi},                 {"extrapolated", g.extrapolated},
                   {"cluster_flag", g.cluster_flag},
                   {"error_estimate", g.error_estimate},
                   {"per_level", levels_json}};

  std::string csv = csv_preamble("gap", cfg, opts.seed, tol);
  csv += "level,h,lambda1,lambda2,gap,xi\n";
  const double d2 = g.d * g.d;
  for (size_t i = 0; i < g.per_level.size(); ++i) {
    const auto& lv = g.per_level[i];
    csv += std::to_string(i + 1) + "," + g17(lv.h) + "," + g17(lv.lambda1) + "," +
           g17(lv.lambda2) + "," + g17(lv.lambda2 - lv.lambda1) + "," +
           g17(d2 * (lv.lambda2 - lv.lambda1)) + "\n";
  }
  csv += "extrapolated,0," + g17(g.lambda1) + "," + g17(g.lambda2) + "," +
         g17(g.lambda2 - g.lambda1) + "," + g17(g.xi) + "\n";

  RunOutput ro;
  ro.json_text = out.dump(2) + "\n";
  ro.csv_text = csv;
  ro.summary = strf(
      "gap: lambda1=%.8f lambda2=%.8f d=%.6f xi=%.6f (est err %.2e%s)",
      g.lambda1, g.lambda2, g.d, g.xi, g.error_estimate,
      g.cluster_flag ? ", near-degenerate lambda2" : "");
  return ro;
}

RunOutput cmd_rectangle(Cfg& cfg) {
  cfg.allow({"a", "b"});
  double a = cfg.num("a", 1.0, 1e-6, 1e6);
  double b = cfg.num("b", 1.0, 1e-6, 1e6);
  if (a < b) std::swap(a, b);
  const RectangleExact ex = rectangle_gap_exact(a, b);

  json tol = {{"arithmetic", "closed form, double precision"}};
  json out = envelope("rectangle", cfg, 0);
  out["tolerances"] = tol;
  out["result"] = {{"a", a},
                   {"b", b},
                   {"eigenvalues", ex.eigenvalues},
                   {"gap", ex.gap},
                   {"xi", ex.xi}};

  std::string csv = csv_preamble("rectangle", cfg, 0, tol);
  csv += "index,eigenvalue\n";
  for (size_t i = 0; i < ex.eigenvalues.size(); ++i)
    csv += std::to_string(i + 1) + "," + g17(ex.eigenvalues[i]) + "\n";

  RunOutput ro;
  ro.json_text = out.dump(2) + "\n";
  ro.csv_text = csv;
  ro.summary =
      strf("rectangle %gx%g: gap=%.8f xi=%.8f", a, b, ex.gap, ex.xi);
  return ro;
}

RunOutput collapse_output(const std::string& command, Cfg& cfg,
                          const SolveOptions& opts, const CollapseTable& t) {
  json tol = {{"solver_tol", opts.tol}};
  json out = envelope(command, cfg, opts.seed);
  out["tolerances"] = tol;
  json rows = json::array();
  for (const auto& r : t.rows)
    rows.push_back({{"eps", r.eps}, {"mu", r.mu}, {"errors", r.errors}});
  out["result"] = {
      {"rows", rows}, {"mu_ref", t.mu_ref}, {"target", t.target}};

  std::string csv = csv_preamble(command, cfg, opts.seed, tol);
  csv += "eps,j,mu,mu_ref,error\n";
  for (const auto& r : t.rows)
    for (size_t j = 0; j < r.mu.size(); ++j)
      csv += g17(r.eps) + "," + std::to_string(j) + "," + g17(r.mu[j]) + "," +
             g17(t.mu_ref[j]) + "," + g17(std::abs(r.mu[j] - t.mu_ref[j])) + "\n";

  const auto& last = t.rows.back();
  RunOutput ro;
  ro.json_text = out.dump(2) + "\n";
  ro.csv_text = csv;
  ro.summary = strf("collapse: eps=%g gives mu_1=%.6f (reference %.6f%s)",
                    last.eps, last.mu[1], t.mu_ref[1],
                    t.target > 0 ? strf(", target %.6f", t.target).c_str() : "");
  return ro;
}

RunOutput cmd_collapse_t1(Cfg& cfg) {
  cfg.allow({"phi", "k", "eps_list", "nx", "ny", "tol", "seed"});
  const std::string phispec = cfg.str("phi", "const:0");
  const int k = cfg.integer("k", 1, 1, 6);
  const std::vector<double> eps =
      cfg.num_list("eps_list", {0.4, 0.2, 0.1, 0.05}, 1e-6, 10.0);
  const int nx = cfg.integer("nx", 128, 8, 2048);
  const int ny = cfg.integer("ny", 6, 2, 64);
  const SolveOptions opts = cfg.solver();
  const Profile1D phi = profile_from_spec(phispec, 1.0, 513);
  return collapse_output("collapse-t1", cfg, opts,
                         collapse_theorem1(phi, k, eps, nx, ny, opts));
}

RunOutput cmd_collapse_c1(Cfg& cfg) {
  cfg.allow({"eps_list", "nx", "ny", "tol", "seed"});
  const std::vector<double> eps =
      cfg.num_list("eps_list", {0.4, 0.2, 0.1, 0.05}, 1e-6, 10.0);
  const int nx = cfg.integer("nx", 128, 8, 2048);
  const int ny = cfg.integer("ny", 6, 2, 64);
  const SolveOptions opts = cfg.solver();
  return collapse_output("collapse-c1", cfg, opts,
                         collapse_corollary1(eps, nx, ny, opts));
}

RunOutput cmd_prop1(Cfg& cfg) {
  cfg.allow({"domain", "domain_path", "k", "target_h", "tol", "seed"});
  const Domain d = cfg.domain();
  const int k = cfg.integer("k", 2, 2, 8);
  const double target_h = cfg.num("target_h", 0.05, 1e-4, 1.0);
  const SolveOptions opts = cfg.solver();
  const double residual = prop1_residual_check(d, k, target_h, opts);

  json tol = {{"solver_tol", opts.tol}};
  json out = envelope("prop1", cfg, opts.seed);
  out["tolerances"] = tol;
  out["result"] = {{"k", k}, {"target_h", target_h}, {"residual", residual}};

  std::string csv = csv_preamble("prop1", cfg, opts.seed, tol);
  csv += "k,target_h,residual\n";
  csv += std::to_string(k) + "," + g17(target_h) + "," + g17(residual) + "\n";

  RunOutput ro;
  ro.json_text = out.dump(2) + "\n";
  ro.csv_text = csv;
  ro.summary = strf("ratio-equation residual for k=%d at h=%g: %.3e", k,
                    target_h, residual);
  return ro;
}

RunOutput cmd_prop2(Cfg& cfg) {
  cfg.allow({"domain", "domain_path", "R", "kmax", "n", "levels", "tol", "seed"});
  const int kmax = cfg.integer("kmax", 3, 2, 4);
  const SolveOptions opts = cfg.solver();
  std::vector<Prop2Row> rows;
  std::string where;
  if (cfg.has("domain") || cfg.has("domain_path")) {
    const Domain d = cfg.domain();
    const int levels = cfg.integer("levels", 4, 1, 8);
    rows = prop2_identity_check(d, kmax, levels, opts);
    where = "domain";
  } else {
    const double R = cfg.num("R", 1.0, 1e-3, 1e3);
    const int n = cfg.integer("n", 512, 16, 65536);
    rows = prop2_identity_interval(R, kmax, n);
    where = strf("interval [0, %g]", cfg.effective()["R"].get<double>());
  }

  json tol = {{"solver_tol", opts.tol}};
  json out = envelope("prop2", cfg, opts.seed);
  out["tolerances"] = tol;
  json jrows = json::array();
  for (const auto& r : rows)
    jrows.push_back({{"k", r.k},
                     {"gap", r.gap},
                     {"mu", r.mu},
                     {"difference", r.difference}});
  out["result"] = {{"rows", jrows}};

  std::string csv = csv_preamble("prop2", cfg, opts.seed, tol);
  csv += "k,gap,mu,difference\n";
  for (const auto& r : rows)
    csv += std::to_string(r.k) + "," + g17(r.gap) + "," + g17(r.mu) + "," +
           g17(r.difference) + "\n";

  double worst = 0.0;
  for (const auto& r : rows)
    worst = std::max(worst, std::abs(r.difference) / r.gap);
  RunOutput ro;
  ro.json_text = out.dump(2) + "\n";
  ro.csv_text = csv;
  ro.summary = strf("drift identity on %s: worst relative difference %.3e",
                    where.c_str(), worst);
  return ro;
}

RunOutput cmd_prop4(Cfg& cfg) {
  cfg.allow({"pencil", "n", "target_h", "k", "families", "tol", "seed"});
  const std::string which = cfg.str("pencil", "interval");
  const int k = cfg.integer("k", 3, 1, 8);
  const int families = cfg.integer("families", 20, 1, 1000);
  const SolveOptions opts = cfg.solver();

  SymPencil pencil;
  if (which == "interval") {
    const int n = cfg.integer("n", 128, 16, 4096);
    pencil = schrodinger_pencil_1d(Profile1D::constant(1.0, 0.0, 9),
                                   Bc::neumann, n);
  } else if (which == "square") {
    const double target_h = cfg.num("target_h", 0.125, 0.03, 1.0);
    pencil = assemble_pencil(triangulate(Polygon::rectangle(1.0, 1.0), target_h),
                             Bc::neumann, Weight::uniform());
  } else {
    throw std::invalid_argument("pencil must be interval or square");
  }

  json tol = {{"solver_tol", opts.tol}, {"bound_slack", 1e-9}};
  json out = envelope("prop4", cfg, opts.seed);
  out["tolerances"] = tol;

  std::string csv = csv_preamble("prop4", cfg, opts.seed, tol);
  csv += "family,k,lhs,rhs,margin,holds\n";
  json jrows = json::array();
  int failures = 0;
  for (int i = 0; i < families; ++i) {
    const auto family = random_orthogonal_family(pencil, k, opts.seed + 7 * i);
    const Prop4Result res = prop4_sum_bound_check(pencil, family, opts);
    if (!res.holds) ++failures;
    jrows.push_back({{"family", i},
                     {"lhs", res.lhs},
                     {"rhs", res.rhs},
                     {"holds", res.holds}});
    csv += std::to_string(i) + "," + std::to_string(k) + "," + g17(res.lhs) +
           "," + g17(res.rhs) + "," + g17(res.rhs - res.lhs) + "," +
           (res.holds ? "1" : "0") + "\n";
  }

  const Spectrum s = smallest_eigenpairs(pencil, k + 1, opts);
  std::vector<Eigen::VectorXd> eig;
  for (int j = 1; j <= k; ++j) eig.push_back(s.eigenvectors.col(j));
  const Prop4Result eq = prop4_sum_bound_check(pencil, eig, opts);
  out["result"] = {{"families", jrows},
                   {"failures", failures},
                   {"eigenvector_equality",
                    {{"lhs", eq.lhs},
                     {"rhs", eq.rhs},
                     {"abs_difference", std::abs(eq.lhs - eq.rhs)}}}};

  RunOutput ro;
  ro.json_text = out.dump(2) + "\n";
  ro.csv_text = csv;
  ro.summary = strf(
      "trace bound on %s pencil (dim %lld): %d/%d families hold, eigenvector "
      "equality |lhs-rhs|=%.3e",
      which.c_str(), static_cast<long long>(pencil.dim()), families - failures,
      families, std::abs(eq.lhs - eq.rhs));
  return ro;
}

RunOutput cmd_moduli_scan(Cfg& cfg) {
  cfg.allow({"grid_n", "levels", "tol", "seed"});
  const int grid_n = cfg.integer("grid_n", 12, 2, 64);
  const int levels = cfg.integer("levels", 4, 1, 6);
  const SolveOptions opts = cfg.solver();
  const ModuliScan scan = triangle_moduli_scan(grid_n, levels, opts);

  json tol = {{"solver_tol", opts.tol}};
  json out = envelope("moduli-scan", cfg, opts.seed);
  out["tolerances"] = tol;
  json pts = json::array();
  for (const auto& p : scan.table)
    pts.push_back({{"x", p.x},
                   {"y", p.y},
                   {"lambda1", p.lambda1},
                   {"lambda2", p.lambda2},
                   {"xi", p.xi}});
  out["result"] = {{"argmin", {{"x", scan.argmin.x}, {"y", scan.argmin.y}}},
                   {"min_xi", scan.min_xi},
                   {"grid_dx", scan.grid_dx},
                   {"grid_dy", scan.grid_dy},
                   {"points", pts}};

  std::string csv = csv_preamble("moduli-scan", cfg, opts.seed, tol);
  csv += "x,y,lambda1,lambda2,xi\n";
  for (const auto& p : scan.table)
    csv += g17(p.x) + "," + g17(p.y) + "," + g17(p.lambda1) + "," +
           g17(p.lambda2) + "," + g17(p.xi) + "\n";

  RunOutput ro;
  ro.json_text = out.dump(2) + "\n";
  ro.csv_text = csv;
  ro.summary =
      strf("moduli scan %dx%d: min xi=%.6f at apex (%.6f, %.6f)", grid_n,
           grid_n, scan.min_xi, scan.argmin.x, scan.argmin.y);
  return ro;
}

RunOutput cmd_thin_scaling(Cfg& cfg) {
  cfg.allow({"h_list", "nx", "ny", "tol", "seed"});
  const std::vector<double> h_list =
      cfg.num_list("h_list", {0.2, 0.1, 0.05, 0.025}, 1e-5, 0.9);
  const int nx = cfg.integer("nx", 320, 8, 4096);
  const int ny = cfg.integer("ny", 6, 2, 64);
  const SolveOptions opts = cfg.solver();
  const ScalingFit fit = thin_triangle_scaling(h_list, nx, ny, opts);

  json tol = {{"solver_tol", opts.tol}};
  json out = envelope("thin-scaling", cfg, opts.seed);
  out["tolerances"] = tol;
  json pts = json::array();
  for (const auto& [h, xi] : fit.points) pts.push_back({{"h", h}, {"xi", xi}});
  out["result"] = {{"points", pts},
                   {"slope", fit.slope},
                   {"intercept", fit.intercept},
                   {"strictly_increasing", fit.strictly_increasing}};

  std::string csv = csv_preamble("thin-scaling", cfg, opts.seed, tol);
  csv += "h,xi\n";
  for (const auto& [h, xi] : fit.points) csv += g17(h) + "," + g17(xi) + "\n";

  RunOutput ro;
  ro.json_text = out.dump(2) + "\n";
  ro.csv_text = csv;
  ro.summary = strf("thin-triangle scaling: log-log slope %.4f over %zu heights%s",
                    fit.slope, fit.points.size(),
                    fit.strictly_increasing ? ", xi strictly increasing" : "");
  return ro;
}

RunOutput cmd_schrodinger1d(Cfg& cfg) {
  cfg.allow({"V", "R", "bc", "n", "k", "tol", "seed"});
  const std::string vspec = cfg.str("V", "const:0");
  const double R = cfg.num("R", 1.0, 1e-3, 1e3);
  const std::string bcs = cfg.str("bc", "dirichlet");
  const int n = cfg.integer("n", 512, 8, 65536);
  const int k = cfg.integer("k", 4, 1, 32);
  const SolveOptions opts = cfg.solver();
  if (bcs != "dirichlet" && bcs != "neumann")
    throw std::invalid_argument("bc must be dirichlet or neumann");
  if (k > n - 2) throw std::invalid_argument("k too large for grid size n");
  const Bc bc = bcs == "dirichlet" ? Bc::dirichlet : Bc::neumann;
  const Profile1D V = profile_from_spec(vspec, R, std::max(65, n / 8 + 1));
  const Spectrum s = schrodinger_eigs_1d(V, bc, n, k);

  double residual_max = 0.0;
  for (double r : s.residuals) residual_max = std::max(residual_max, r);
  json tol = {{"solver_tol", opts.tol}, {"residual_max", residual_max}};
  json out = envelope("schrodinger1d", cfg, opts.seed);
  out["tolerances"] = tol;
  json jl = json::array();
  for (const auto& [h, eigs] : s.levels)
    jl.push_back({{"h", h}, {"eigenvalues", eigs}});
  out["result"] = {{"eigenvalues", s.eigenvalues},
                   {"residuals", s.residuals},
                   {"extrapolated", s.extrapolated},
                   {"per_level", jl}};
  if (k >= 2)
    out["result"]["gap"] = s.eigenvalues[1] - s.eigenvalues[0];

  std::string csv = csv_preamble("schrodinger1d", cfg, opts.seed, tol);
  csv += "index,eigenvalue,residual\n";
  for (size_t i = 0; i < s.eigenvalues.size(); ++i)
    csv += std::to_string(i + 1) + "," + g17(s.eigenvalues[i]) + "," +
           g17(s.residuals[i]) + "\n";

  RunOutput ro;
  ro.json_text = out.dump(2) + "\n";
  ro.csv_text = csv;
  if (k >= 2)
    ro.summary = strf("1d %s spectrum: lambda1=%.8f gap=%.8f (n=%d,%d)",
                      bcs.c_str(), s.eigenvalues[0],
                      s.eigenvalues[1] - s.eigenvalues[0], n, 2 * n);
  else
    ro.summary = strf("1d %s spectrum: lambda1=%.8f (n=%d,%d)", bcs.c_str(),
                      s.eigenvalues[0], n, 2 * n);
  return ro;
}

RunOutput cmd_lavine(Cfg& cfg) {
  cfg.allow({"trials", "R", "n", "seed"});
  const int trials = cfg.integer("trials", 100, 1, 10000);
  const double R = cfg.num("R", 1.0, 1e-3, 1e3);
  const int n = cfg.integer("n", 512, 64, 65536);
  const uint64_t seed = cfg.seed("seed", 0xd0d0cacaULL);
  const LavineReport rep = lavine_suite(trials, R, seed, n);

  json tol = {{"bound_slack", 1e-6},
              {"equality_tol", 1e-6},
              {"strict_margin", 1e-3}};
  json out = envelope("lavine", cfg, seed);
  out["tolerances"] = tol;
  json jrows = json::array();
  for (const auto& t : rep.rows)
    jrows.push_back({{"trial", t.index},
                     {"amplitude", t.amplitude},
                     {"dirichlet_gap", t.dgap},
                     {"neumann_gap", t.ngap},
                     {"dirichlet_margin", t.dmargin},
                     {"neumann_margin", t.nmargin},
                     {"ok", t.ok},
                     {"strict_ok", t.strict_ok}});
  out["result"] = {{"trials", rep.trials},
                   {"violations", rep.violations},
                   {"strict_violations", rep.strict_violations},
                   {"dirichlet_bound", 3.0 * kPi * kPi / (R * R)},
                   {"neumann_bound", kPi * kPi / (R * R)},
                   {"dirichlet_equality_err", rep.dir_equality_err},
                   {"neumann_equality_err", rep.neu_equality_err},
                   {"pass", rep.pass},
                   {"rows", jrows}};

  std::string csv = csv_preamble("lavine", cfg, seed, tol);
  csv += "trial,amplitude,dirichlet_gap,neumann_gap,dirichlet_margin,"
         "neumann_margin,ok,strict_ok\n";
  for (const auto& t : rep.rows)
    csv += std::to_string(t.index) + "," + g17(t.amplitude) + "," +
           g17(t.dgap) + "," + g17(t.ngap) + "," + g17(t.dmargin) + "," +
           g17(t.nmargin) + "," + (t.ok ? "1" : "0") + "," +
           (t.strict_ok ? "1" : "0") + "\n";

  RunOutput ro;
  ro.json_text = out.dump(2) + "\n";
  ro.csv_text = csv;
  ro.summary = strf(
      "convex-potential bounds: %d trials, %d violations, %d strict misses, "
      "V=0 equality err %.2e/%.2e",
      rep.trials, rep.violations, rep.strict_violations, rep.dir_equality_err,
      rep.neu_equality_err);
  return ro;
}

RunOutput cmd_ac_suite(Cfg& cfg) {
  cfg.allow({"extra_polygons", "levels", "tol", "seed"});
  const int extra = cfg.integer("extra_polygons", 3, 0, 20);
  const int levels = cfg.integer("levels", 4, 1, 8);
  const SolveOptions opts = cfg.solver();
  const uint64_t seed = cfg.seed("seed", 0xacce55edULL);
  const AcGapReport rep =
      ac_gap_suite(ac_default_domains(extra, seed), ac_default_potentials(),
                   levels, opts);

  json tol = {{"solver_tol", opts.tol},
              {"per_case_tol", "2 * extrapolation error estimate + 1e-9"}};
  json out = envelope("ac-suite", cfg, seed);
  out["tolerances"] = tol;
  json jrows = json::array();
  for (const auto& c : rep.cases)
    jrows.push_back({{"domain", c.domain_name},
                     {"potential", c.potential_name},
                     {"gap", c.gap},
                     {"bound", c.bound},
                     {"tol", c.tol},
                     {"margin", c.margin},
                     {"ok", c.ok}});
  out["result"] = {{"cases", jrows},
                   {"violations", rep.violations},
                   {"pass", rep.pass}};

  std::string csv = csv_preamble("ac-suite", cfg, seed, tol);
  csv += "domain,potential,gap,bound,tol,margin,ok\n";
  for (const auto& c : rep.cases)
    csv += c.domain_name + "," + c.potential_name + "," + g17(c.gap) + "," +
           g17(c.bound) + "," + g17(c.tol) + "," + g17(c.margin) + "," +
           (c.ok ? "1" : "0") + "\n";

  RunOutput ro;
  ro.json_text = out.dump(2) + "\n";
  ro.csv_text = csv;
  ro.summary = strf("diameter gap bound: %zu cases, %d violations",
                    rep.cases.size(), rep.violations);
  return ro;
}

RunOutput cmd_logconcavity(Cfg& cfg) {
  cfg.allow({"domain", "domain_path", "levels", "lattice_n", "random_pairs",
             "slack_C", "tol", "seed"});
  const Domain d = cfg.domain();
  LogConcavityOptions lco;
  lco.levels = cfg.integer("levels", lco.levels, 1, 8);
  lco.lattice_n = cfg.integer("lattice_n", lco.lattice_n, 2, 64);
  lco.random_pairs = cfg.integer("random_pairs", lco.random_pairs, 0, 100000);
  lco.slack_C = cfg.num("slack_C", lco.slack_C, 0.0, 100.0);
  const SolveOptions opts = cfg.solver();
  lco.seed = cfg.seed("seed", lco.seed);
  const ModulusReport rep = log_concavity_check(d, lco, opts);

  json tol = {{"solver_tol", opts.tol}, {"slack", rep.tolerance}};
  json out = envelope("logconcavity", cfg, lco.seed);
  out["tolerances"] = tol;
  out["result"] = {
      {"holds", rep.holds},
      {"margin", rep.margin},
      {"worst_pair",
       {{"x", {rep.worst_x[0], rep.worst_x[1]}},
        {"y", {rep.worst_y[0], rep.worst_y[1]}}}}};

  std::string csv = csv_preamble("logconcavity", cfg, lco.seed, tol);
  csv += "holds,margin,slack\n";
  csv += std::string(rep.holds ? "1" : "0") + "," + g17(rep.margin) + "," +
         g17(rep.tolerance) + "\n";

  RunOutput ro;
  ro.json_text = out.dump(2) + "\n";
  ro.csv_text = csv;
  ro.summary = strf("log-concavity certificate: %s (margin %.3e, slack %.3e)",
                    rep.holds ? "holds" : "VIOLATED", rep.margin, rep.tolerance);
  return ro;
}

RunOutput cmd_verify(Cfg& cfg) {
  cfg.allow({"quick"});
  const bool quick = cfg.boolean("quick", false);
  const std::vector<CriterionResult> results = run_acceptance(quick);

  json tol = {{"note", "per-criterion tolerances pinned in the suite; "
                       "see each detail line"}};
  json out = envelope("verify", cfg, 0);
  out["tolerances"] = tol;
  json jrows = json::array();
  int passed = 0;
  std::string lines;
  for (const auto& r : results) {
    if (r.passed) ++passed;
    jrows.push_back({{"id", r.id},
                     {"name", r.name},
                     {"passed", r.passed},
                     {"seconds", r.seconds},
                     {"detail", r.detail}});
    lines += format_criterion(r) + "\n";
  }
  const bool all = passed == static_cast<int>(results.size());
  out["result"] = {{"criteria", jrows},
                   {"passed", passed},
                   {"total", static_cast<int>(results.size())},
                   {"all_passed", all}};

  std::string csv = csv_preamble("verify", cfg, 0, tol);
  csv += "id,name,passed,seconds\n";
  for (const auto& r : results)
    csv += std::to_string(r.id) + "," + r.name + "," + (r.passed ? "1" : "0") +
           "," + strf("%.3f", r.seconds) + "\n";

  RunOutput ro;
  ro.json_text = out.dump(2) + "\n";
  ro.csv_text = csv;
  ro.summary = lines + strf("acceptance: %d/%zu passed%s", passed,
                            results.size(), quick ? " (quick mode)" : "");
  ro.exit_code = all ? 0 : 1;
  return ro;
}

using Handler = RunOutput (*)(Cfg&);

const std::vector<std::pair<std::string, Handler>>& handlers() {
  static const std::vector<std::pair<std::string, Handler>> table = {
      {"gap", cmd_gap},
      {"rectangle", cmd_rectangle},
      {"collapse-t1", cmd_collapse_t1},
      {"collapse-c1", cmd_collapse_c1},
      {"prop1", cmd_prop1},
      {"prop2", cmd_prop2},
      {"prop4", cmd_prop4},
      {"moduli-scan", cmd_moduli_scan},
      {"thin-scaling", cmd_thin_scaling},
      {"schrodinger1d", cmd_schrodinger1d},
      {"lavine", cmd_lavine},
      {"ac-suite", cmd_ac_suite},
      {"logconcavity", cmd_logconcavity},
      {"verify", cmd_verify},
  };
  return table;
}

}  // namespace

std::vector<std::string> command_names() {
  std::vector<std::string> names;
  for (const auto& [name, fn] : handlers()) names.push_back(name);
  return names;
}

RunOutput run_command(const std::string& command, const std::string& config_json) {
  RunOutput ro;
  Handler handler = nullptr;
  for (const auto& [name, fn] : handlers())
    if (name == command) handler = fn;
  if (!handler) {
    ro.exit_code = 2;
    ro.summary = "unknown command: " + command;
    return ro;
  }
  try {
    const json cfg_in =
        config_json.empty() ? json::object() : json::parse(config_json);
    Cfg cfg(cfg_in);
    return handler(cfg);
  } catch (const json::exception& e) {
    ro.exit_code = 2;
    ro.summary = std::string("config error: ") + e.what();
  } catch (const std::invalid_argument& e) {
    ro.exit_code = 2;
    ro.summary = std::string("config error: ") + e.what();
  } catch (const std::exception& e) {
    ro.exit_code = 3;
    ro.summary = std::string("solver error: ") + e.what();
  }
  return ro;
}

}  // namespace gaplab
