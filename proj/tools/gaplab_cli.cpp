// Command-line driver. All computation goes through the shared C API; this
// file only turns flags into JSON configs and writes the returned texts.

#include <CLI11.hpp>
#include <json.hpp>

#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <memory>
#include <string>
#include <vector>

#include "gaplab.h"

namespace {

using json = nlohmann::ordered_json;

struct GlobalOpts {
  std::string out_base;
  bool to_stdout = false;
  int workers = 0;
  int exit_code = 0;
};

int write_file(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) {
    fprintf(stderr, "error: cannot write %s\n", path.c_str());
    return 2;
  }
  out << text;
  return out.good() ? 0 : 2;
}

void execute(GlobalOpts& g, const std::string& command, json cfg) {
  if (cfg.contains("__inline_domain")) {
    try {
      cfg["domain"] = json::parse(cfg["__inline_domain"].get<std::string>());
    } catch (const std::exception& e) {
      fprintf(stderr, "error: bad inline domain JSON: %s\n", e.what());
      g.exit_code = 2;
      return;
    }
    cfg.erase("__inline_domain");
  }
  if (g.workers > 0)
    setenv("GAPLAB_WORKERS", std::to_string(g.workers).c_str(), 1);

  gaplab_result* res = nullptr;
  const gaplab_status st = gaplab_run(command.c_str(), cfg.dump().c_str(), &res);
  if (st != GAPLAB_OK) {
    fprintf(stderr, "error: %s\n", gaplab_last_error());
    g.exit_code = st == GAPLAB_INVALID_ARGUMENT ? 2 : 3;
    return;
  }
  g.exit_code = gaplab_result_exit_code(res);
  const std::string summary = gaplab_result_summary(res);
  const std::string json_text = gaplab_result_json(res);
  const std::string csv_text = gaplab_result_csv(res);
  gaplab_result_free(res);

  if (g.exit_code >= 2) {
    fprintf(stderr, "error: %s\n", summary.c_str());
    return;
  }
  if (g.to_stdout) {
    fputs(json_text.c_str(), stdout);
    fprintf(stderr, "%s\n", summary.c_str());
    return;
  }
  const std::string base = g.out_base.empty() ? "gaplab-" + command : g.out_base;
  int rc = write_file(base + ".json", json_text);
  if (rc == 0 && !csv_text.empty()) rc = write_file(base + ".csv", csv_text);
  if (rc != 0) {
    g.exit_code = rc;
    return;
  }
  printf("%s\n", summary.c_str());
  if (!csv_text.empty())
    printf("wrote %s.json and %s.csv\n", base.c_str(), base.c_str());
  else
    printf("wrote %s.json\n", base.c_str());
}

// Registers an option that records its parsed value under `key` only when the
// user passes it, so runner defaults stay authoritative.
template <typename T>
void opt(CLI::App* sub, const std::shared_ptr<json>& cfg, const char* flag,
         const char* key, const char* desc) {
  sub->add_option_function<T>(
      flag, [cfg, key](const T& v) { (*cfg)[key] = v; }, desc);
}

void domain_opts(CLI::App* sub, const std::shared_ptr<json>& cfg) {
  opt<std::string>(sub, cfg, "--domain", "domain_path", "domain spec JSON file");
  opt<std::string>(sub, cfg, "--inline", "__inline_domain",
                   "inline domain spec JSON text");
}

void solver_opts(CLI::App* sub, const std::shared_ptr<json>& cfg) {
  opt<double>(sub, cfg, "--tol", "tol", "eigensolver tolerance");
  opt<uint64_t>(sub, cfg, "--seed", "seed", "random seed (recorded in output)");
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{
      std::string("gaplab ") + gaplab_version() +
      " - fundamental-gap experiments on polygons, triangles and thin domains.\n"
      "Outputs: <base>.json (full result) and <base>.csv where tabular; both\n"
      "embed version, config echo, seed and tolerances. Identical configs\n"
      "produce byte-identical outputs."};
  app.require_subcommand(1);

  GlobalOpts g;
  app.add_option("-o,--out", g.out_base,
                 "output base path (default gaplab-<command>)");
  app.add_flag("--stdout", g.to_stdout,
               "print JSON to stdout instead of writing files");
  app.add_option("--workers", g.workers,
                 "worker pool size for scan commands (default: GAPLAB_WORKERS"
                 " or 1)");

  auto add = [&](const char* name, const char* desc) {
    auto cfg = std::make_shared<json>(json::object());
    CLI::App* sub = app.add_subcommand(name, desc);
    sub->fallthrough();
    sub->callback([&g, cfg, name] { execute(g, name, *cfg); });
    return std::pair<CLI::App*, std::shared_ptr<json>>(sub, cfg);
  };

  {
    auto [sub, cfg] = add("gap",
                          "lambda1, lambda2 and xi = d^2 (lambda2 - lambda1) "
                          "of a domain.\nCSV: level,h,lambda1,lambda2,gap,xi");
    domain_opts(sub, cfg);
    opt<int>(sub, cfg, "--levels", "levels", "refinement levels (default 5)");
    opt<std::string>(sub, cfg, "--V", "V",
                     "potential: const:c | quadratic:a,cx,cy | hinge:a,nx,ny,c");
    solver_opts(sub, cfg);
  }
  {
    auto [sub, cfg] = add("rectangle",
                          "closed-form rectangle spectrum, gap and xi.\n"
                          "CSV: index,eigenvalue");
    opt<double>(sub, cfg, "--a", "a", "side length a (default 1)");
    opt<double>(sub, cfg, "--b", "b", "side length b (default 1)");
  }
  {
    auto [sub, cfg] = add("collapse-t1",
                          "thin-domain Neumann values over {0<=y<=eps e^-phi}"
                          " against the 1D drift reference.\n"
                          "CSV: eps,j,mu,mu_ref,error");
    opt<std::string>(sub, cfg, "--phi", "phi",
                     "log-weight profile: const:c | affine:a,b | quad:a,c |"
                     " sin2 | file:path (default const:0)");
    opt<int>(sub, cfg, "--k", "k", "number of nonzero values (default 1)");
    opt<std::vector<double>>(sub, cfg, "--eps", "eps_list",
                             "decreasing eps list (default 0.4 0.2 0.1 0.05)");
    opt<int>(sub, cfg, "--nx", "nx", "horizontal cells (default 128)");
    opt<int>(sub, cfg, "--ny", "ny", "vertical cells (default 6)");
    solver_opts(sub, cfg);
  }
  {
    auto [sub, cfg] = add("collapse-c1",
                          "same collapse with the sin^2(pi x) profile, whose "
                          "limit is the interval gap 3 pi^2.\n"
                          "CSV: eps,j,mu,mu_ref,error");
    opt<std::vector<double>>(sub, cfg, "--eps", "eps_list",
                             "decreasing eps list (default 0.4 0.2 0.1 0.05)");
    opt<int>(sub, cfg, "--nx", "nx", "horizontal cells (default 128)");
    opt<int>(sub, cfg, "--ny", "ny", "vertical cells (default 6)");
    solver_opts(sub, cfg);
  }
  {
    auto [sub, cfg] = add("prop1",
                          "interior residual of the eigenfunction-ratio "
                          "equation for index k.\nCSV: k,target_h,residual");
    domain_opts(sub, cfg);
    opt<int>(sub, cfg, "--k", "k", "eigenvalue index >= 2 (default 2)");
    opt<double>(sub, cfg, "--target-h", "target_h", "mesh size (default 0.05)");
    solver_opts(sub, cfg);
  }
  {
    auto [sub, cfg] = add("prop2",
                          "Dirichlet gaps lambda_k - lambda_1 against the "
                          "ground-state-weighted Neumann values.\n"
                          "CSV: k,gap,mu,difference");
    domain_opts(sub, cfg);
    opt<double>(sub, cfg, "--R", "R", "interval length (1D path, default 1)");
    opt<int>(sub, cfg, "--kmax", "kmax", "highest index (default 3)");
    opt<int>(sub, cfg, "--n", "n", "1D grid size (default 512)");
    opt<int>(sub, cfg, "--levels", "levels", "2D refinement levels (default 4)");
    solver_opts(sub, cfg);
  }
  {
    auto [sub, cfg] = add("prop4",
                          "Neumann eigenvalue-sum bound on seeded orthogonal "
                          "test families.\nCSV: family,k,lhs,rhs,margin,holds");
    opt<std::string>(sub, cfg, "--pencil", "pencil", "interval | square");
    opt<int>(sub, cfg, "--n", "n", "interval grid size (default 128)");
    opt<double>(sub, cfg, "--target-h", "target_h",
                "square mesh size (default 0.125)");
    opt<int>(sub, cfg, "--k", "k", "family size (default 3)");
    opt<int>(sub, cfg, "--families", "families", "family count (default 20)");
    solver_opts(sub, cfg);
  }
  {
    auto [sub, cfg] = add("moduli-scan",
                          "xi over the triangle moduli region; the minimum "
                          "locates the equilateral apex.\n"
                          "CSV: x,y,lambda1,lambda2,xi");
    opt<int>(sub, cfg, "--grid-n", "grid_n", "grid points per axis (default 12)");
    opt<int>(sub, cfg, "--levels", "levels", "refinement levels (default 4)");
    solver_opts(sub, cfg);
  }
  {
    auto [sub, cfg] = add("thin-scaling",
                          "xi along collapsing triangles (apex height h) with "
                          "a log-log slope fit.\nCSV: h,xi");
    opt<std::vector<double>>(sub, cfg, "--heights", "h_list",
                             "decreasing apex heights (default 0.2 0.1 0.05 "
                             "0.025)");
    opt<int>(sub, cfg, "--nx", "nx", "horizontal cells (default 320)");
    opt<int>(sub, cfg, "--ny", "ny", "vertical cells (default 6)");
    solver_opts(sub, cfg);
  }
  {
    auto [sub, cfg] = add("schrodinger1d",
                          "1D spectrum of -u'' + V u on [0, R].\n"
                          "CSV: index,eigenvalue,residual");
    opt<std::string>(sub, cfg, "--V", "V",
                     "potential: const:c | affine:a,b | quad:a,c | sin2 |"
                     " file:path (default const:0)");
    opt<double>(sub, cfg, "--R", "R", "interval length (default 1)");
    opt<std::string>(sub, cfg, "--bc", "bc", "dirichlet | neumann");
    opt<int>(sub, cfg, "--n", "n", "grid size (default 512)");
    opt<int>(sub, cfg, "--k", "k", "eigenvalue count (default 4)");
    solver_opts(sub, cfg);
  }
  {
    auto [sub, cfg] = add("lavine",
                          "random convex potentials on [0, R] against the "
                          "constant-potential gap bounds.\n"
                          "CSV: trial,amplitude,dirichlet_gap,neumann_gap,"
                          "dirichlet_margin,neumann_margin,ok,strict_ok");
    opt<int>(sub, cfg, "--trials", "trials", "trial count (default 100)");
    opt<double>(sub, cfg, "--R", "R", "interval length (default 1)");
    opt<int>(sub, cfg, "--n", "n", "grid size (default 512)");
    opt<uint64_t>(sub, cfg, "--seed", "seed", "random seed");
  }
  {
    auto [sub, cfg] = add("ac-suite",
                          "gap of Delta + V versus the diameter bound "
                          "3 pi^2 / d^2 across domains and convex potentials.\n"
                          "CSV: domain,potential,gap,bound,tol,margin,ok");
    opt<int>(sub, cfg, "--extra-polygons", "extra_polygons",
             "random convex polygons beyond square + equilateral (default 3)");
    opt<int>(sub, cfg, "--levels", "levels", "refinement levels (default 4)");
    solver_opts(sub, cfg);
  }
  {
    auto [sub, cfg] = add("logconcavity",
                          "second-difference concavity certificate for log of "
                          "the ground state.\nCSV: holds,margin,slack");
    domain_opts(sub, cfg);
    opt<int>(sub, cfg, "--levels", "levels", "refinement levels (default 4)");
    opt<int>(sub, cfg, "--lattice-n", "lattice_n",
             "lattice resolution (default 12)");
    opt<int>(sub, cfg, "--random-pairs", "random_pairs",
             "random segment count (default 2000)");
    opt<double>(sub, cfg, "--slack-C", "slack_C",
                "slack constant C in the C*h allowance (default 1)");
    solver_opts(sub, cfg);
  }
  {
    auto [sub, cfg] = add("verify",
                          "run the full acceptance suite; exits 0 iff all "
                          "criteria pass.\nCSV: id,name,passed,seconds");
    sub->add_flag_function("--quick",
                           [cfg](int64_t) { (*cfg)["quick"] = true; },
                           "reduced refinement levels for CI-scale runtime");
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : 2;
  }
  return g.exit_code;
}
