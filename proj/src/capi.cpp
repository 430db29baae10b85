#include "gaplab.h"

#include <fstream>
#include <new>
#include <stdexcept>
#include <string>

#include "gaplab/domain_spec.hpp"
#include "gaplab/eigensolve.hpp"
#include "gaplab/runner.hpp"

struct gaplab_domain {
  gaplab::Domain d;
};
struct gaplab_mesh {
  gaplab::TriMesh m;
};
struct gaplab_pencil {
  gaplab::SymPencil p;
};
struct gaplab_spectrum {
  gaplab::Spectrum s;
  std::string json_cache;
};
struct gaplab_result {
  gaplab::RunOutput out;
};

namespace {

thread_local std::string g_last_error;

template <typename Fn>
gaplab_status wrap(Fn&& fn) noexcept {
  try {
    fn();
    g_last_error.clear();
    return GAPLAB_OK;
  } catch (const std::invalid_argument& e) {
    g_last_error = e.what();
    return GAPLAB_INVALID_ARGUMENT;
  } catch (const gaplab::SolverError& e) {
    g_last_error = e.what();
    return GAPLAB_SOLVER_ERROR;
  } catch (const std::ios_base::failure& e) {
    g_last_error = e.what();
    return GAPLAB_IO_ERROR;
  } catch (const std::bad_alloc&) {
    g_last_error = "out of memory";
    return GAPLAB_INTERNAL_ERROR;
  } catch (const std::exception& e) {
    g_last_error = e.what();
    return GAPLAB_INTERNAL_ERROR;
  } catch (...) {
    g_last_error = "unknown error";
    return GAPLAB_INTERNAL_ERROR;
  }
}

gaplab_status fail(gaplab_status code, const char* msg) {
  g_last_error = msg;
  return code;
}

}  // namespace

extern "C" {

const char* gaplab_version(void) { return gaplab::kToolVersion; }

const char* gaplab_last_error(void) { return g_last_error.c_str(); }

gaplab_status gaplab_domain_parse(const char* json_text, gaplab_domain** out) {
  if (!json_text || !out)
    return fail(GAPLAB_INVALID_ARGUMENT, "null argument");
  return wrap([&] { *out = new gaplab_domain{gaplab::parse_domain(json_text)}; });
}

gaplab_status gaplab_domain_load(const char* path, gaplab_domain** out) {
  if (!path || !out) return fail(GAPLAB_INVALID_ARGUMENT, "null argument");
  if (!std::ifstream(path).good())
    return fail(GAPLAB_IO_ERROR, "cannot open domain file");
  return wrap([&] { *out = new gaplab_domain{gaplab::load_domain(path)}; });
}

gaplab_status gaplab_domain_diameter(const gaplab_domain* d, double* out) {
  if (!d || !out) return fail(GAPLAB_INVALID_ARGUMENT, "null argument");
  return wrap([&] { *out = gaplab::domain_diameter(d->d); });
}

void gaplab_domain_free(gaplab_domain* d) { delete d; }

gaplab_status gaplab_mesh_build(const gaplab_domain* d, double target_h,
                                gaplab_mesh** out) {
  if (!d || !out) return fail(GAPLAB_INVALID_ARGUMENT, "null argument");
  if (!(target_h > 0))
    return fail(GAPLAB_INVALID_ARGUMENT, "target_h must be positive");
  return wrap([&] {
    *out = new gaplab_mesh{gaplab::initial_mesh(d->d, target_h)};
  });
}

gaplab_status gaplab_mesh_refine(const gaplab_mesh* m, gaplab_mesh** out) {
  if (!m || !out) return fail(GAPLAB_INVALID_ARGUMENT, "null argument");
  return wrap([&] { *out = new gaplab_mesh{gaplab::refine(m->m)}; });
}

gaplab_status gaplab_mesh_counts(const gaplab_mesh* m, int32_t* vertices,
                                 int32_t* triangles) {
  if (!m) return fail(GAPLAB_INVALID_ARGUMENT, "null argument");
  if (vertices) *vertices = m->m.n_vertices();
  if (triangles) *triangles = m->m.n_triangles();
  return GAPLAB_OK;
}

void gaplab_mesh_free(gaplab_mesh* m) { delete m; }

gaplab_status gaplab_pencil_assemble(const gaplab_mesh* m, int bc,
                                     const double* weight_values,
                                     size_t weight_len, gaplab_pencil** out) {
  if (!m || !out) return fail(GAPLAB_INVALID_ARGUMENT, "null argument");
  if (bc != 0 && bc != 1)
    return fail(GAPLAB_INVALID_ARGUMENT, "bc must be 0 (Dirichlet) or 1 (Neumann)");
  return wrap([&] {
    gaplab::Weight w = gaplab::Weight::uniform();
    if (weight_values) {
      if (weight_len != static_cast<size_t>(m->m.n_vertices()))
        throw std::invalid_argument("weight length must match vertex count");
      w = gaplab::Weight::nodal(
          std::vector<double>(weight_values, weight_values + weight_len));
    }
    *out = new gaplab_pencil{gaplab::assemble_pencil(
        m->m, bc == 0 ? gaplab::Bc::dirichlet : gaplab::Bc::neumann, w)};
  });
}

gaplab_status gaplab_pencil_dim(const gaplab_pencil* p, int64_t* out) {
  if (!p || !out) return fail(GAPLAB_INVALID_ARGUMENT, "null argument");
  *out = p->p.dim();
  return GAPLAB_OK;
}

void gaplab_pencil_free(gaplab_pencil* p) { delete p; }

gaplab_status gaplab_solve_smallest(const gaplab_pencil* p, int k, double tol,
                                    uint64_t seed, gaplab_spectrum** out) {
  if (!p || !out) return fail(GAPLAB_INVALID_ARGUMENT, "null argument");
  if (k < 1) return fail(GAPLAB_INVALID_ARGUMENT, "k must be at least 1");
  return wrap([&] {
    gaplab::SolveOptions opts;
    if (tol > 0) opts.tol = tol;
    if (seed != 0) opts.seed = seed;
    *out = new gaplab_spectrum{gaplab::smallest_eigenpairs(p->p, k, opts), {}};
  });
}

gaplab_status gaplab_spectrum_size(const gaplab_spectrum* s, int32_t* out) {
  if (!s || !out) return fail(GAPLAB_INVALID_ARGUMENT, "null argument");
  *out = static_cast<int32_t>(s->s.eigenvalues.size());
  return GAPLAB_OK;
}

gaplab_status gaplab_spectrum_eigenvalue(const gaplab_spectrum* s, int32_t i,
                                         double* out) {
  if (!s || !out) return fail(GAPLAB_INVALID_ARGUMENT, "null argument");
  if (i < 0 || i >= static_cast<int32_t>(s->s.eigenvalues.size()))
    return fail(GAPLAB_INVALID_ARGUMENT, "eigenvalue index out of range");
  *out = s->s.eigenvalues[i];
  return GAPLAB_OK;
}

gaplab_status gaplab_spectrum_residual(const gaplab_spectrum* s, int32_t i,
                                       double* out) {
  if (!s || !out) return fail(GAPLAB_INVALID_ARGUMENT, "null argument");
  if (i < 0 || i >= static_cast<int32_t>(s->s.residuals.size()))
    return fail(GAPLAB_INVALID_ARGUMENT, "residual index out of range");
  *out = s->s.residuals[i];
  return GAPLAB_OK;
}

const char* gaplab_spectrum_json(gaplab_spectrum* s) {
  if (!s) return "";
  if (s->json_cache.empty()) s->json_cache = s->s.to_json();
  return s->json_cache.c_str();
}

void gaplab_spectrum_free(gaplab_spectrum* s) { delete s; }

gaplab_status gaplab_run(const char* command, const char* config_json,
                         gaplab_result** out) {
  if (!command || !out) return fail(GAPLAB_INVALID_ARGUMENT, "null argument");
  return wrap([&] {
    *out = new gaplab_result{
        gaplab::run_command(command, config_json ? config_json : "")};
  });
}

int gaplab_result_exit_code(const gaplab_result* r) {
  return r ? r->out.exit_code : 2;
}

const char* gaplab_result_json(const gaplab_result* r) {
  return r ? r->out.json_text.c_str() : "";
}

const char* gaplab_result_csv(const gaplab_result* r) {
  return r ? r->out.csv_text.c_str() : "";
}

const char* gaplab_result_summary(const gaplab_result* r) {
  return r ? r->out.summary.c_str() : "";
}

void gaplab_result_free(gaplab_result* r) { delete r; }

}  // extern "C"
