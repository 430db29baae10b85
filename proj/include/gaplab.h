#ifndef GAPLAB_H
#define GAPLAB_H

/*
 * C interface to the gap-function toolkit. All functions are thread-safe as
 * long as each handle is used from one thread at a time. Functions that can
 * fail return a gaplab_status; on failure the output arguments are untouched
 * and gaplab_last_error() describes the problem for the calling thread.
 */

#include <stddef.h>
#include <stdint.h>

#ifdef __cplusplus
extern "C" {
#endif

typedef enum gaplab_status {
  GAPLAB_OK = 0,
  GAPLAB_INVALID_ARGUMENT = 1,
  GAPLAB_SOLVER_ERROR = 2,
  GAPLAB_IO_ERROR = 3,
  GAPLAB_INTERNAL_ERROR = 4
} gaplab_status;

/* Version string of the library, e.g. "0.1.0". */
const char* gaplab_version(void);

/* Message for the last failing call on this thread; "" when none. */
const char* gaplab_last_error(void);

typedef struct gaplab_domain gaplab_domain;
typedef struct gaplab_mesh gaplab_mesh;
typedef struct gaplab_pencil gaplab_pencil;
typedef struct gaplab_spectrum gaplab_spectrum;
typedef struct gaplab_result gaplab_result;

/* ---- domains: JSON text in the tool's domain-spec format ---------------- */

gaplab_status gaplab_domain_parse(const char* json_text, gaplab_domain** out);
gaplab_status gaplab_domain_load(const char* path, gaplab_domain** out);
gaplab_status gaplab_domain_diameter(const gaplab_domain* d, double* out);
void gaplab_domain_free(gaplab_domain* d);

/* ---- meshing ------------------------------------------------------------- */

gaplab_status gaplab_mesh_build(const gaplab_domain* d, double target_h,
                                gaplab_mesh** out);
gaplab_status gaplab_mesh_refine(const gaplab_mesh* m, gaplab_mesh** out);
gaplab_status gaplab_mesh_counts(const gaplab_mesh* m, int32_t* vertices,
                                 int32_t* triangles);
void gaplab_mesh_free(gaplab_mesh* m);

/* ---- assembly ------------------------------------------------------------ */

/* bc: 0 = Dirichlet, 1 = Neumann. weight_values: NULL for the uniform weight,
 * otherwise one nonnegative value per mesh vertex (weight_len must equal the
 * vertex count). */
gaplab_status gaplab_pencil_assemble(const gaplab_mesh* m, int bc,
                                     const double* weight_values,
                                     size_t weight_len, gaplab_pencil** out);
gaplab_status gaplab_pencil_dim(const gaplab_pencil* p, int64_t* out);
void gaplab_pencil_free(gaplab_pencil* p);

/* ---- eigensolve ----------------------------------------------------------- */

/* Smallest k eigenpairs. tol <= 0 and seed == 0 select the defaults. */
gaplab_status gaplab_solve_smallest(const gaplab_pencil* p, int k, double tol,
                                    uint64_t seed, gaplab_spectrum** out);
gaplab_status gaplab_spectrum_size(const gaplab_spectrum* s, int32_t* out);
gaplab_status gaplab_spectrum_eigenvalue(const gaplab_spectrum* s, int32_t i,
                                         double* out);
gaplab_status gaplab_spectrum_residual(const gaplab_spectrum* s, int32_t i,
                                       double* out);
/* JSON rendering of the spectrum; the string is owned by the handle. */
const char* gaplab_spectrum_json(gaplab_spectrum* s);
void gaplab_spectrum_free(gaplab_spectrum* s);

/* ---- command runner -------------------------------------------------------
 * Same command names and JSON configs as the command-line driver. The call
 * succeeds whenever the command executes; the result's exit code carries the
 * command verdict (0 ok, 1 acceptance failure, 2 bad config, 3 solver
 * failure). Identical command + config produce byte-identical texts. */

gaplab_status gaplab_run(const char* command, const char* config_json,
                         gaplab_result** out);
int gaplab_result_exit_code(const gaplab_result* r);
const char* gaplab_result_json(const gaplab_result* r);    /* "" when none */
const char* gaplab_result_csv(const gaplab_result* r);     /* "" when none */
const char* gaplab_result_summary(const gaplab_result* r); /* human-readable */
void gaplab_result_free(gaplab_result* r);

#ifdef __cplusplus
}
#endif

#endif /* GAPLAB_H */
