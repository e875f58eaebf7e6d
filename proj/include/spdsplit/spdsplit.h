/* C interface of libspdsplit: A = B^{-1} + C with C in S and B orthogonal to S, B SPD.
 *
 * All handles are opaque and owned by the caller; free them with the matching
 * *_free function (NULL is accepted). Every call returning spdsplit_status
 * leaves a message for spdsplit_last_error() on failure; the message is
 * thread-local and valid until the next failing call on the same thread.
 * Dense matrices cross the boundary row-major as n*n doubles.
 */
#ifndef SPDSPLIT_H
#define SPDSPLIT_H

#include <stddef.h>
#include <stdint.h>

#if defined(_WIN32)
#define SPDSPLIT_API __declspec(dllexport)
#else
#define SPDSPLIT_API __attribute__((visibility("default")))
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum spdsplit_status {
  SPDSPLIT_OK = 0,
  SPDSPLIT_INVALID_ARGUMENT = 1,
  SPDSPLIT_PARSE_ERROR = 2,
  SPDSPLIT_INFEASIBLE = 3,
  SPDSPLIT_SOLVER_ERROR = 4,
  SPDSPLIT_VERIFICATION_FAILED = 5,
  SPDSPLIT_OUT_OF_MEMORY = 6,
  SPDSPLIT_INTERNAL_ERROR = 7
} spdsplit_status;

typedef struct spdsplit_matrix spdsplit_matrix;
typedef struct spdsplit_basis spdsplit_basis;
typedef struct spdsplit_group spdsplit_group;
typedef struct spdsplit_options spdsplit_options;
typedef struct spdsplit_result spdsplit_result;
typedef struct spdsplit_demo spdsplit_demo;

SPDSPLIT_API const char* spdsplit_version(void);
SPDSPLIT_API const char* spdsplit_status_name(spdsplit_status status);
SPDSPLIT_API const char* spdsplit_last_error(void);
/* Strings returned through char** out-parameters. */
SPDSPLIT_API void spdsplit_string_free(char* s);

/* --- matrices --- */
SPDSPLIT_API spdsplit_status spdsplit_matrix_from_dense(int64_t n, const double* values, spdsplit_matrix** out);
/* Stores the band |i - j| <= bandwidth; nonzeros outside it are INVALID_ARGUMENT. */
SPDSPLIT_API spdsplit_status spdsplit_matrix_from_dense_banded(int64_t n, const double* values, int64_t bandwidth,
                                                               spdsplit_matrix** out);
SPDSPLIT_API spdsplit_status spdsplit_matrix_from_toeplitz(int64_t n, const double* first_column, spdsplit_matrix** out);
/* Dense text or Matrix Market; must be symmetric. */
SPDSPLIT_API spdsplit_status spdsplit_matrix_read(const char* path, spdsplit_matrix** out);
SPDSPLIT_API int64_t spdsplit_matrix_dim(const spdsplit_matrix* m);
SPDSPLIT_API spdsplit_status spdsplit_matrix_copy_dense(const spdsplit_matrix* m, double* out);
SPDSPLIT_API void spdsplit_matrix_free(spdsplit_matrix* m);
/* Writes an n*n row-major array in the dense text format. */
SPDSPLIT_API spdsplit_status spdsplit_write_dense(const char* path, int64_t n, const double* values);
/* Reads a dense or Matrix Market file into a malloc'ed n*n array (free with spdsplit_array_free). */
SPDSPLIT_API spdsplit_status spdsplit_read_dense(const char* path, int64_t* n, double** values);
SPDSPLIT_API void spdsplit_array_free(double* values);

/* --- subspace bases --- */
SPDSPLIT_API spdsplit_status spdsplit_basis_create(int64_t n, spdsplit_basis** out);
/* Appends a symmetric element; each (row, col, value) sets both (row, col) and (col, row). */
SPDSPLIT_API spdsplit_status spdsplit_basis_add(spdsplit_basis* s, size_t nnz, const int64_t* rows, const int64_t* cols,
                                                const double* values);
/* JSON container or directory of .mtx files. */
SPDSPLIT_API spdsplit_status spdsplit_basis_read(const char* path, spdsplit_basis** out);
SPDSPLIT_API spdsplit_status spdsplit_basis_parse_json(const char* text, spdsplit_basis** out);
SPDSPLIT_API spdsplit_status spdsplit_basis_json(const spdsplit_basis* s, char** out);
SPDSPLIT_API int64_t spdsplit_basis_dim(const spdsplit_basis* s);
SPDSPLIT_API size_t spdsplit_basis_size(const spdsplit_basis* s);
/* Basis of the fixed subspace under the group (orbit sums or Reynolds average). */
SPDSPLIT_API spdsplit_status spdsplit_basis_fixed(const spdsplit_basis* s, const spdsplit_group* g, spdsplit_basis** out);
SPDSPLIT_API void spdsplit_basis_free(spdsplit_basis* s);

/* --- permutation groups --- */
/* perms holds count permutations of 0..n-1 back to back. */
SPDSPLIT_API spdsplit_status spdsplit_group_from_permutations(int64_t n, size_t count, const int64_t* perms,
                                                              spdsplit_group** out);
SPDSPLIT_API spdsplit_status spdsplit_group_read(const char* path, int64_t n, spdsplit_group** out);
SPDSPLIT_API void spdsplit_group_free(spdsplit_group* g);

/* --- solver options --- */
SPDSPLIT_API spdsplit_status spdsplit_options_create(spdsplit_options** out);
/* "newton-cg", "exact-newton", "dual", "auto" */
SPDSPLIT_API spdsplit_status spdsplit_options_set_method(spdsplit_options* o, const char* method);
/* "auto", "dense", "banded", "toeplitz" */
SPDSPLIT_API spdsplit_status spdsplit_options_set_structure(spdsplit_options* o, const char* structure);
SPDSPLIT_API spdsplit_status spdsplit_options_set_tolerance(spdsplit_options* o, double grad_tolerance);
SPDSPLIT_API spdsplit_status spdsplit_options_set_max_iterations(spdsplit_options* o, int max_iterations);
SPDSPLIT_API spdsplit_status spdsplit_options_set_check_feasibility(spdsplit_options* o, int enabled);
SPDSPLIT_API void spdsplit_options_free(spdsplit_options* o);

/* --- decomposition --- */
/* options may be NULL for defaults. */
SPDSPLIT_API spdsplit_status spdsplit_decompose(const spdsplit_matrix* a, const spdsplit_basis* s,
                                                const spdsplit_options* o, spdsplit_result** out);
SPDSPLIT_API int64_t spdsplit_result_dim(const spdsplit_result* r);
SPDSPLIT_API size_t spdsplit_result_basis_size(const spdsplit_result* r);
/* Coefficients of C* in the basis as given; out has basis_size entries. */
SPDSPLIT_API spdsplit_status spdsplit_result_x(const spdsplit_result* r, double* out);
SPDSPLIT_API spdsplit_status spdsplit_result_b(const spdsplit_result* r, double* out);
SPDSPLIT_API spdsplit_status spdsplit_result_c(const spdsplit_result* r, double* out);
SPDSPLIT_API int spdsplit_result_iterations(const spdsplit_result* r);
SPDSPLIT_API double spdsplit_result_grad_norm(const spdsplit_result* r);
SPDSPLIT_API double spdsplit_result_phi(const spdsplit_result* r);
SPDSPLIT_API double spdsplit_result_psi(const spdsplit_result* r);
SPDSPLIT_API double spdsplit_result_reconstruction_error(const spdsplit_result* r);
SPDSPLIT_API double spdsplit_result_orthogonality_residual(const spdsplit_result* r);
SPDSPLIT_API const char* spdsplit_result_method(const spdsplit_result* r);
SPDSPLIT_API const char* spdsplit_result_structure(const spdsplit_result* r);
/* Summary document: method, structure, iterations, residuals, x, histories. */
SPDSPLIT_API spdsplit_status spdsplit_result_json(const spdsplit_result* r, char** out);
SPDSPLIT_API spdsplit_status spdsplit_result_write_b(const spdsplit_result* r, const char* path);
SPDSPLIT_API spdsplit_status spdsplit_result_write_c(const spdsplit_result* r, const char* path);
/* max over the group of ||P B P^T - B||_F + ||P C P^T - C||_F */
SPDSPLIT_API spdsplit_status spdsplit_result_group_check(const spdsplit_result* r, const spdsplit_group* g, double* out);
SPDSPLIT_API void spdsplit_result_free(spdsplit_result* r);

/* --- verification --- */
typedef struct spdsplit_verification {
  double reconstruction_error;
  double orthogonality_residual;
  double min_eigenvalue_b;
  double trace_identity_gap;
  double det_inequality_slack;
  int pass; /* reconstruction, orthogonality, definiteness and determinant checks */
} spdsplit_verification;

/* b and c are n*n row-major. Returns SPDSPLIT_OK whether or not the checks pass. */
SPDSPLIT_API spdsplit_status spdsplit_verify(const spdsplit_matrix* a, const spdsplit_basis* s, const double* b,
                                             const double* c, spdsplit_verification* out);

typedef struct spdsplit_inverse_check {
  double identity_error;
  double orthogonality;
  double resolve_error;
  int pass; /* identity and re-solve within 1e-7 */
} spdsplit_inverse_check;

SPDSPLIT_API spdsplit_status spdsplit_check_inverse(const spdsplit_matrix* a, const spdsplit_basis* s, const double* b,
                                                    const double* c, spdsplit_inverse_check* out);
/* Same quantity as spdsplit_result_group_check for externally supplied B and C. */
SPDSPLIT_API spdsplit_status spdsplit_group_check(const spdsplit_group* g, int64_t n, const double* b, const double* c,
                                                  double* out);

/* --- finance --- */
typedef struct spdsplit_market {
  int n;
  double dt;
  double alpha;
  double hurst;
  int markovian; /* 0 = full information */
} spdsplit_market;

SPDSPLIT_API void spdsplit_market_defaults(spdsplit_market* m);
SPDSPLIT_API spdsplit_status spdsplit_market_parse_json(const char* text, spdsplit_market* out);

typedef struct spdsplit_sweep_options {
  int schur;      /* block/Schur-complement path */
  int warm_start; /* chain each mode's solution along the grid */
  int jobs;
  double grad_tolerance;
} spdsplit_sweep_options;

SPDSPLIT_API void spdsplit_sweep_defaults(spdsplit_sweep_options* o);
/* modes: comma-separated subset of "full,markov". rows_json receives an array
 * of {hurst, mode, ok, v_star, iterations, grad_norm, error}; csv receives the
 * successful rows. Either output may be NULL. */
SPDSPLIT_API spdsplit_status spdsplit_finance_sweep(const spdsplit_market* tmpl, const double* hurst, size_t count,
                                                    const char* modes, const spdsplit_sweep_options* o, char** csv,
                                                    char** rows_json);

/* --- scenario generators --- */
/* name: "example1" .. "example4" */
SPDSPLIT_API spdsplit_status spdsplit_demo_create(const char* name, int64_t n, uint64_t seed, spdsplit_demo** out);
SPDSPLIT_API spdsplit_status spdsplit_demo_matrix(const spdsplit_demo* d, spdsplit_matrix** out);
/* reduced != 0 gives the basis the solver should run on (the fixed subspace for example3). */
SPDSPLIT_API spdsplit_status spdsplit_demo_basis(const spdsplit_demo* d, int reduced, spdsplit_basis** out);
/* *out is NULL when the scenario has no group. */
SPDSPLIT_API spdsplit_status spdsplit_demo_group(const spdsplit_demo* d, spdsplit_group** out);
SPDSPLIT_API const char* spdsplit_demo_method(const spdsplit_demo* d);
/* Largest |B_ij|, i != j, over the active block pairs (example3 only). */
SPDSPLIT_API spdsplit_status spdsplit_demo_structural_zero_residual(const spdsplit_demo* d, const spdsplit_result* r,
                                                                    double* out);
SPDSPLIT_API void spdsplit_demo_free(spdsplit_demo* d);

#ifdef __cplusplus
}
#endif

#endif /* SPDSPLIT_H */
