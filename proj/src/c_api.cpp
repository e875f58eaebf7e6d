#include "spdsplit/spdsplit.h"

#include "spdsplit/demos.hpp"
#include "spdsplit/dual_solver.hpp"
#include "spdsplit/errors.hpp"
#include "spdsplit/finance.hpp"
#include "spdsplit/io.hpp"
#include "spdsplit/properties.hpp"

#include "json.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <cstring>
#include <new>
#include <optional>
#include <sstream>

using namespace spdsplit;
using nlohmann::json;

struct spdsplit_matrix {
  StructuredSpdMatrix m;
};
// Elements appended through the C API are collected and the basis (with its
// independence certificate) is built on first use.
struct spdsplit_basis {
  Index n = 0;
  std::vector<SparseSymMatrix> pending;
  mutable std::optional<SubspaceBasis> built;

  explicit spdsplit_basis(SubspaceBasis b) : n(b.ambientDim()), pending(b.elements()), built(std::move(b)) {}
  spdsplit_basis(Index dim, std::vector<SparseSymMatrix> elems) : n(dim), pending(std::move(elems)) {}

  const SubspaceBasis& get() const {
    if (!built) built = SubspaceBasis(n, pending);
    return *built;
  }
};
struct spdsplit_group {
  GroupAction g;
};
struct spdsplit_options {
  SolverOptions o;
};
struct spdsplit_result {
  DecompositionResult r;
};
struct spdsplit_demo {
  DemoInstance d;
};

namespace {

thread_local std::string lastError;

spdsplit_status statusFor(ErrorCode code) {
  switch (code) {
    case ErrorCode::ParseError:
    case ErrorCode::IoError:
      return SPDSPLIT_PARSE_ERROR;
    case ErrorCode::NotPositiveDefinite:
    case ErrorCode::Infeasible:
    case ErrorCode::SuspectedInfeasibleSubspace:
    case ErrorCode::ProvenInfeasibleSubspace:
      return SPDSPLIT_INFEASIBLE;
    case ErrorCode::LineSearchFailure:
    case ErrorCode::MaxIterations:
    case ErrorCode::SingularJacobian:
    case ErrorCode::NoObviousDualStart:
      return SPDSPLIT_SOLVER_ERROR;
    default:
      return SPDSPLIT_INVALID_ARGUMENT;
  }
}

template <class F>
spdsplit_status guarded(F&& f) {
  try {
    f();
    return SPDSPLIT_OK;
  } catch (const Error& e) {
    lastError = std::string(errorCodeName(e.code())) + ": " + e.what();
    return statusFor(e.code());
  } catch (const std::bad_alloc&) {
    lastError = "out of memory";
    return SPDSPLIT_OUT_OF_MEMORY;
  } catch (const std::exception& e) {
    lastError = e.what();
    return SPDSPLIT_INTERNAL_ERROR;
  } catch (...) {
    lastError = "unknown exception";
    return SPDSPLIT_INTERNAL_ERROR;
  }
}

spdsplit_status invalid(const char* msg) {
  lastError = msg;
  return SPDSPLIT_INVALID_ARGUMENT;
}

#define SPDSPLIT_REQUIRE(cond, msg) \
  do {                              \
    if (!(cond)) return invalid(msg); \
  } while (0)

char* copyString(const std::string& s) {
  char* out = static_cast<char*>(std::malloc(s.size() + 1));
  if (!out) throw std::bad_alloc();
  std::memcpy(out, s.c_str(), s.size() + 1);
  return out;
}

Matrix fromRowMajor(Index n, const double* v) {
  Matrix m(n, n);
  for (Index i = 0; i < n; ++i)
    for (Index j = 0; j < n; ++j) m(i, j) = v[i * n + j];
  return m;
}

void toRowMajor(const Matrix& m, double* out) {
  for (Index i = 0; i < m.rows(); ++i)
    for (Index j = 0; j < m.cols(); ++j) out[i * m.cols() + j] = m(i, j);
}

Matrix checkedSymmetric(Index n, const double* v) {
  Matrix m = fromRowMajor(n, v);
  const double scale = std::max(1.0, m.cwiseAbs().maxCoeff());
  if ((m - m.transpose()).cwiseAbs().maxCoeff() > 1e-12 * scale) fail(ErrorCode::InvalidArgument, "matrix is not symmetric");
  return 0.5 * (m + m.transpose());
}

json vectorJson(const Vector& v) { return json(std::vector<double>(v.data(), v.data() + v.size())); }

}  // namespace

extern "C" {

const char* spdsplit_version(void) { return "1.0.0"; }

const char* spdsplit_status_name(spdsplit_status status) {
  switch (status) {
    case SPDSPLIT_OK: return "ok";
    case SPDSPLIT_INVALID_ARGUMENT: return "invalid argument";
    case SPDSPLIT_PARSE_ERROR: return "parse error";
    case SPDSPLIT_INFEASIBLE: return "infeasible";
    case SPDSPLIT_SOLVER_ERROR: return "solver failure";
    case SPDSPLIT_VERIFICATION_FAILED: return "verification failed";
    case SPDSPLIT_OUT_OF_MEMORY: return "out of memory";
    case SPDSPLIT_INTERNAL_ERROR: return "internal error";
  }
  return "unknown status";
}

const char* spdsplit_last_error(void) { return lastError.c_str(); }

void spdsplit_string_free(char* s) { std::free(s); }

spdsplit_status spdsplit_matrix_from_dense(int64_t n, const double* values, spdsplit_matrix** out) {
  SPDSPLIT_REQUIRE(n > 0 && values && out, "matrix_from_dense: bad arguments");
  return guarded([&] { *out = new spdsplit_matrix{StructuredSpdMatrix::dense(checkedSymmetric(n, values))}; });
}

spdsplit_status spdsplit_matrix_from_dense_banded(int64_t n, const double* values, int64_t bandwidth,
                                                  spdsplit_matrix** out) {
  SPDSPLIT_REQUIRE(n > 0 && values && out && bandwidth >= 0, "matrix_from_dense_banded: bad arguments");
  return guarded([&] {
    *out = new spdsplit_matrix{StructuredSpdMatrix::bandedFromDense(checkedSymmetric(n, values), bandwidth)};
  });
}

spdsplit_status spdsplit_matrix_from_toeplitz(int64_t n, const double* first_column, spdsplit_matrix** out) {
  SPDSPLIT_REQUIRE(n > 0 && first_column && out, "matrix_from_toeplitz: bad arguments");
  return guarded([&] {
    *out = new spdsplit_matrix{StructuredSpdMatrix::toeplitz(Eigen::Map<const Vector>(first_column, n))};
  });
}

spdsplit_status spdsplit_matrix_read(const char* path, spdsplit_matrix** out) {
  SPDSPLIT_REQUIRE(path && out, "matrix_read: bad arguments");
  return guarded([&] { *out = new spdsplit_matrix{StructuredSpdMatrix::dense(readSymmetricMatrix(path))}; });
}

int64_t spdsplit_matrix_dim(const spdsplit_matrix* m) { return m ? m->m.dim() : 0; }

spdsplit_status spdsplit_matrix_copy_dense(const spdsplit_matrix* m, double* out) {
  SPDSPLIT_REQUIRE(m && out, "matrix_copy_dense: bad arguments");
  return guarded([&] { toRowMajor(m->m.toDense(), out); });
}

void spdsplit_matrix_free(spdsplit_matrix* m) { delete m; }

spdsplit_status spdsplit_write_dense(const char* path, int64_t n, const double* values) {
  SPDSPLIT_REQUIRE(path && n > 0 && values, "write_dense: bad arguments");
  return guarded([&] { writeMatrix(path, fromRowMajor(n, values)); });
}

spdsplit_status spdsplit_read_dense(const char* path, int64_t* n, double** values) {
  SPDSPLIT_REQUIRE(path && n && values, "read_dense: bad arguments");
  return guarded([&] {
    const Matrix m = readMatrix(path);
    double* buf = static_cast<double*>(std::malloc(sizeof(double) * static_cast<std::size_t>(m.size())));
    if (!buf) throw std::bad_alloc();
    toRowMajor(m, buf);
    *n = m.rows();
    *values = buf;
  });
}

void spdsplit_array_free(double* values) { std::free(values); }

spdsplit_status spdsplit_basis_create(int64_t n, spdsplit_basis** out) {
  SPDSPLIT_REQUIRE(n > 0 && out, "basis_create: bad arguments");
  return guarded([&] { *out = new spdsplit_basis(n, {}); });
}

spdsplit_status spdsplit_basis_add(spdsplit_basis* s, size_t nnz, const int64_t* rows, const int64_t* cols,
                                   const double* values) {
  SPDSPLIT_REQUIRE(s && (nnz == 0 || (rows && cols && values)), "basis_add: bad arguments");
  return guarded([&] {
    std::vector<SparseEntry> entries;
    entries.reserve(nnz);
    for (size_t k = 0; k < nnz; ++k) entries.push_back({rows[k], cols[k], values[k]});
    s->pending.emplace_back(s->n, std::move(entries));
    s->built.reset();
  });
}

spdsplit_status spdsplit_basis_read(const char* path, spdsplit_basis** out) {
  SPDSPLIT_REQUIRE(path && out, "basis_read: bad arguments");
  return guarded([&] { *out = new spdsplit_basis(readBasis(path)); });
}

spdsplit_status spdsplit_basis_parse_json(const char* text, spdsplit_basis** out) {
  SPDSPLIT_REQUIRE(text && out, "basis_parse_json: bad arguments");
  return guarded([&] { *out = new spdsplit_basis(parseBasisJson(text)); });
}

spdsplit_status spdsplit_basis_json(const spdsplit_basis* s, char** out) {
  SPDSPLIT_REQUIRE(s && out, "basis_json: bad arguments");
  return guarded([&] { *out = copyString(basisJson(s->get())); });
}

int64_t spdsplit_basis_dim(const spdsplit_basis* s) { return s ? s->n : 0; }
size_t spdsplit_basis_size(const spdsplit_basis* s) { return s ? s->pending.size() : 0; }

spdsplit_status spdsplit_basis_fixed(const spdsplit_basis* s, const spdsplit_group* g, spdsplit_basis** out) {
  SPDSPLIT_REQUIRE(s && g && out, "basis_fixed: bad arguments");
  return guarded([&] { *out = new spdsplit_basis(fixedSubspace(s->get(), g->g)); });
}

void spdsplit_basis_free(spdsplit_basis* s) { delete s; }

spdsplit_status spdsplit_group_from_permutations(int64_t n, size_t count, const int64_t* perms, spdsplit_group** out) {
  SPDSPLIT_REQUIRE(n > 0 && out && (count == 0 || perms), "group_from_permutations: bad arguments");
  return guarded([&] {
    std::vector<GroupAction::Permutation> ps;
    for (size_t k = 0; k < count; ++k) {
      const int64_t* p = perms + k * static_cast<size_t>(n);
      ps.emplace_back(p, p + n);
    }
    *out = new spdsplit_group{GroupAction::fromPermutations(n, std::move(ps))};
  });
}

spdsplit_status spdsplit_group_read(const char* path, int64_t n, spdsplit_group** out) {
  SPDSPLIT_REQUIRE(path && n > 0 && out, "group_read: bad arguments");
  return guarded([&] { *out = new spdsplit_group{readGroup(path, n)}; });
}

void spdsplit_group_free(spdsplit_group* g) { delete g; }

spdsplit_status spdsplit_options_create(spdsplit_options** out) {
  SPDSPLIT_REQUIRE(out, "options_create: bad arguments");
  return guarded([&] { *out = new spdsplit_options{}; });
}

spdsplit_status spdsplit_options_set_method(spdsplit_options* o, const char* method) {
  SPDSPLIT_REQUIRE(o && method, "options_set_method: bad arguments");
  const auto m = parseMethod(method);
  if (!m) return invalid(("unknown method '" + std::string(method) + "' (expected newton-cg, exact-newton, dual or auto)").c_str());
  o->o.method = *m;
  return SPDSPLIT_OK;
}

spdsplit_status spdsplit_options_set_structure(spdsplit_options* o, const char* structure) {
  SPDSPLIT_REQUIRE(o && structure, "options_set_structure: bad arguments");
  const std::string s = structure;
  if (s == "auto") {
    o->o.structure.reset();
  } else if (s == "dense") {
    o->o.structure = Structure::Dense;
  } else if (s == "banded") {
    o->o.structure = Structure::Banded;
  } else if (s == "toeplitz") {
    o->o.structure = Structure::Toeplitz;
  } else {
    return invalid("unknown structure (expected auto, dense, banded or toeplitz)");
  }
  return SPDSPLIT_OK;
}

spdsplit_status spdsplit_options_set_tolerance(spdsplit_options* o, double grad_tolerance) {
  SPDSPLIT_REQUIRE(o && grad_tolerance > 0.0, "tolerance must be positive");
  o->o.gradTolerance = grad_tolerance;
  return SPDSPLIT_OK;
}

spdsplit_status spdsplit_options_set_max_iterations(spdsplit_options* o, int max_iterations) {
  SPDSPLIT_REQUIRE(o && max_iterations > 0, "iteration limit must be positive");
  o->o.maxNewtonIterations = max_iterations;
  return SPDSPLIT_OK;
}

spdsplit_status spdsplit_options_set_check_feasibility(spdsplit_options* o, int enabled) {
  SPDSPLIT_REQUIRE(o, "options_set_check_feasibility: bad arguments");
  o->o.checkFeasibility = enabled != 0;
  return SPDSPLIT_OK;
}

void spdsplit_options_free(spdsplit_options* o) { delete o; }

spdsplit_status spdsplit_decompose(const spdsplit_matrix* a, const spdsplit_basis* s, const spdsplit_options* o,
                                   spdsplit_result** out) {
  SPDSPLIT_REQUIRE(a && s && out, "decompose: bad arguments");
  return guarded([&] {
    const SolverOptions opts = o ? o->o : SolverOptions{};
    *out = new spdsplit_result{decompose(a->m, s->get(), opts)};
  });
}

int64_t spdsplit_result_dim(const spdsplit_result* r) { return r ? r->r.bStar.rows() : 0; }
size_t spdsplit_result_basis_size(const spdsplit_result* r) { return r ? static_cast<size_t>(r->r.x.size()) : 0; }

spdsplit_status spdsplit_result_x(const spdsplit_result* r, double* out) {
  SPDSPLIT_REQUIRE(r && (out || r->r.x.size() == 0), "result_x: bad arguments");
  std::copy(r->r.x.data(), r->r.x.data() + r->r.x.size(), out);
  return SPDSPLIT_OK;
}

spdsplit_status spdsplit_result_b(const spdsplit_result* r, double* out) {
  SPDSPLIT_REQUIRE(r && out, "result_b: bad arguments");
  toRowMajor(r->r.bStar, out);
  return SPDSPLIT_OK;
}

spdsplit_status spdsplit_result_c(const spdsplit_result* r, double* out) {
  SPDSPLIT_REQUIRE(r && out, "result_c: bad arguments");
  return guarded([&] { toRowMajor(r->r.cStar.toDense(), out); });
}

int spdsplit_result_iterations(const spdsplit_result* r) { return r ? r->r.iterations : 0; }
double spdsplit_result_grad_norm(const spdsplit_result* r) { return r ? r->r.finalGradNorm : 0.0; }
double spdsplit_result_phi(const spdsplit_result* r) { return r ? r->r.phiStar : 0.0; }
double spdsplit_result_psi(const spdsplit_result* r) { return r ? r->r.psiStar : 0.0; }
double spdsplit_result_reconstruction_error(const spdsplit_result* r) { return r ? r->r.reconstructionError : 0.0; }
double spdsplit_result_orthogonality_residual(const spdsplit_result* r) { return r ? r->r.orthogonalityResidual : 0.0; }
const char* spdsplit_result_method(const spdsplit_result* r) { return r ? methodName(r->r.method) : ""; }
const char* spdsplit_result_structure(const spdsplit_result* r) { return r ? structureName(r->r.structure) : ""; }

spdsplit_status spdsplit_result_json(const spdsplit_result* r, char** out) {
  SPDSPLIT_REQUIRE(r && out, "result_json: bad arguments");
  return guarded([&] {
    const DecompositionResult& d = r->r;
    json j{{"n", d.bStar.rows()},
           {"m", d.x.size()},
           {"method", methodName(d.method)},
           {"structure", structureName(d.structure)},
           {"iterations", d.iterations},
           {"cg_iterations", d.cgIterations},
           {"final_grad_norm", d.finalGradNorm},
           {"phi_star", d.phiStar},
           {"psi_star", d.psiStar},
           {"reconstruction_error", d.reconstructionError},
           {"orthogonality_residual", d.orthogonalityResidual},
           {"projection_residual", d.projectionResidual},
           {"x", vectorJson(d.x)},
           {"grad_norm_history", d.gradNormHistory},
           {"phi_history", d.phiHistory}};
    *out = copyString(j.dump());
  });
}

spdsplit_status spdsplit_result_write_b(const spdsplit_result* r, const char* path) {
  SPDSPLIT_REQUIRE(r && path, "result_write_b: bad arguments");
  return guarded([&] { writeMatrix(path, r->r.bStar); });
}

spdsplit_status spdsplit_result_write_c(const spdsplit_result* r, const char* path) {
  SPDSPLIT_REQUIRE(r && path, "result_write_c: bad arguments");
  return guarded([&] { writeMatrix(path, r->r.cStar.toDense()); });
}

spdsplit_status spdsplit_result_group_check(const spdsplit_result* r, const spdsplit_group* g, double* out) {
  SPDSPLIT_REQUIRE(r && g && out, "result_group_check: bad arguments");
  return guarded([&] { *out = groupFixedCheck(r->r, g->g); });
}

void spdsplit_result_free(spdsplit_result* r) { delete r; }

spdsplit_status spdsplit_verify(const spdsplit_matrix* a, const spdsplit_basis* s, const double* b, const double* c,
                                spdsplit_verification* out) {
  SPDSPLIT_REQUIRE(a && s && b && c && out, "verify: bad arguments");
  return guarded([&] {
    const Index n = a->m.dim();
    const VerificationReport rep = verifyDecomposition(a->m.toDense(), s->get(), fromRowMajor(n, b), fromRowMajor(n, c));
    *out = {rep.reconstructionError, rep.orthogonalityResidual, rep.minEigenvalueB, rep.traceIdentityGap,
            rep.detInequalitySlack,  rep.pass() ? 1 : 0};
  });
}

spdsplit_status spdsplit_check_inverse(const spdsplit_matrix* a, const spdsplit_basis* s, const double* b,
                                       const double* c, spdsplit_inverse_check* out) {
  SPDSPLIT_REQUIRE(a && s && b && c && out, "check_inverse: bad arguments");
  return guarded([&] {
    const Index n = a->m.dim();
    const InverseRoundTrip rt = inverseRoundTrip(a->m.toDense(), s->get(), fromRowMajor(n, b), fromRowMajor(n, c));
    *out = {rt.identityError, rt.orthogonality, rt.resolveError, rt.pass() ? 1 : 0};
  });
}

spdsplit_status spdsplit_group_check(const spdsplit_group* g, int64_t n, const double* b, const double* c,
                                     double* out) {
  SPDSPLIT_REQUIRE(g && n > 0 && b && c && out, "group_check: bad arguments");
  SPDSPLIT_REQUIRE(g->g.dim() == n, "group acts on a different dimension");
  return guarded([&] {
    DecompositionResult r;
    r.bStar = fromRowMajor(n, b);
    r.cStar = SparseSymMatrix::fromDense(fromRowMajor(n, c));
    *out = groupFixedCheck(r, g->g);
  });
}

void spdsplit_market_defaults(spdsplit_market* m) {
  if (!m) return;
  const MarketSpec d;
  *m = {d.N, d.deltaT, d.alpha, d.hurst, d.mode == InfoMode::Markovian ? 1 : 0};
}

spdsplit_status spdsplit_market_parse_json(const char* text, spdsplit_market* out) {
  SPDSPLIT_REQUIRE(text && out, "market_parse_json: bad arguments");
  return guarded([&] {
    const MarketSpec s = parseMarketSpec(text);
    *out = {s.N, s.deltaT, s.alpha, s.hurst, s.mode == InfoMode::Markovian ? 1 : 0};
  });
}

void spdsplit_sweep_defaults(spdsplit_sweep_options* o) {
  if (!o) return;
  *o = {1, 0, 1, SolverOptions{}.gradTolerance};
}

spdsplit_status spdsplit_finance_sweep(const spdsplit_market* tmpl, const double* hurst, size_t count,
                                       const char* modes, const spdsplit_sweep_options* o, char** csv,
                                       char** rows_json) {
  SPDSPLIT_REQUIRE(tmpl && (hurst || count == 0) && modes, "finance_sweep: bad arguments");
  return guarded([&] {
    MarketSpec spec;
    spec.N = tmpl->n;
    spec.deltaT = tmpl->dt;
    spec.alpha = tmpl->alpha;
    spec.hurst = count ? hurst[0] : tmpl->hurst;
    spec.mode = tmpl->markovian ? InfoMode::Markovian : InfoMode::FullInfo;
    spec.validate();

    std::vector<InfoMode> ms;
    std::stringstream ss(modes);
    for (std::string item; std::getline(ss, item, ',');) {
      const auto m = parseInfoMode(item);
      if (!m) fail(ErrorCode::InvalidArgument, "unknown mode '" + item + "' (expected full or markov)");
      ms.push_back(*m);
    }
    if (ms.empty()) fail(ErrorCode::InvalidArgument, "no modes requested");

    spdsplit_sweep_options so;
    spdsplit_sweep_defaults(&so);
    if (o) so = *o;
    SweepOptions opts;
    opts.schur = so.schur != 0;
    opts.warmStart = so.warm_start != 0;
    opts.jobs = so.jobs;
    opts.solver.gradTolerance = so.grad_tolerance;

    const std::vector<SweepRow> rows = valueSweep(spec, std::vector<double>(hurst, hurst + count), ms, opts);
    std::string csvText = sweepCsv(rows);
    json arr = json::array();
    for (const auto& r : rows) {
      arr.push_back({{"hurst", r.hurst},
                     {"mode", infoModeName(r.mode)},
                     {"ok", r.ok},
                     {"v_star", r.vStar},
                     {"iterations", r.iterations},
                     {"grad_norm", r.gradNorm},
                     {"error", r.error}});
    }
    std::string rowsText = arr.dump();
    char* c1 = csv ? copyString(csvText) : nullptr;
    char* c2 = nullptr;
    try {
      c2 = rows_json ? copyString(rowsText) : nullptr;
    } catch (...) {
      std::free(c1);
      throw;
    }
    if (csv) *csv = c1;
    if (rows_json) *rows_json = c2;
  });
}

spdsplit_status spdsplit_demo_create(const char* name, int64_t n, uint64_t seed, spdsplit_demo** out) {
  SPDSPLIT_REQUIRE(name && out, "demo_create: bad arguments");
  const auto kind = parseDemo(name);
  if (!kind) return invalid("unknown demo (expected example1, example2, example3 or example4)");
  return guarded([&] { *out = new spdsplit_demo{makeDemo(*kind, n, seed)}; });
}

spdsplit_status spdsplit_demo_matrix(const spdsplit_demo* d, spdsplit_matrix** out) {
  SPDSPLIT_REQUIRE(d && out, "demo_matrix: bad arguments");
  return guarded([&] { *out = new spdsplit_matrix{d->d.a}; });
}

spdsplit_status spdsplit_demo_basis(const spdsplit_demo* d, int reduced, spdsplit_basis** out) {
  SPDSPLIT_REQUIRE(d && out, "demo_basis: bad arguments");
  return guarded([&] { *out = new spdsplit_basis(reduced ? d->d.solveBasis : d->d.basis); });
}

spdsplit_status spdsplit_demo_group(const spdsplit_demo* d, spdsplit_group** out) {
  SPDSPLIT_REQUIRE(d && out, "demo_group: bad arguments");
  return guarded([&] { *out = d->d.group ? new spdsplit_group{*d->d.group} : nullptr; });
}

const char* spdsplit_demo_method(const spdsplit_demo* d) { return d ? methodName(d->d.method) : ""; }

spdsplit_status spdsplit_demo_structural_zero_residual(const spdsplit_demo* d, const spdsplit_result* r, double* out) {
  SPDSPLIT_REQUIRE(d && r && out, "demo_structural_zero_residual: bad arguments");
  SPDSPLIT_REQUIRE(d->d.kind == DemoKind::GroupInvariant, "structural zeros are defined for example3 only");
  SPDSPLIT_REQUIRE(r->r.bStar.rows() == d->d.a.dim(), "result does not belong to this demo");
  const Index bs = d->d.blockSize;
  double worst = 0.0;
  for (const auto& [p, q] : d->d.activePairs)
    for (Index i = 0; i < bs; ++i)
      for (Index j = 0; j < bs; ++j) {
        const Index row = p * bs + i, col = q * bs + j;
        if (row != col) worst = std::max(worst, std::abs(r->r.bStar(row, col)));
      }
  *out = worst;
  return SPDSPLIT_OK;
}

void spdsplit_demo_free(spdsplit_demo* d) { delete d; }

}  // extern "C"
