#include "spdsplit/primal_solver.hpp"

#include "spdsplit/dual_solver.hpp"
#include "spdsplit/errors.hpp"
#include "spdsplit/log.hpp"

#include <cmath>
#include <string>

namespace spdsplit {

namespace {

std::vector<SparseSymMatrix> negated(const SubspaceBasis& s, bool normalize) {
  std::vector<SparseSymMatrix> out;
  out.reserve(s.size());
  for (std::size_t k = 0; k < s.size(); ++k) out.push_back(s[k].scaled(-1.0 / (normalize ? s.norms()[k] : 1.0)));
  return out;
}

void checkSizes(const StructuredSpdMatrix& a, const SubspaceBasis& s) {
  if (a.dim() != s.ambientDim()) {
    fail(ErrorCode::DimensionMismatch, "matrix is " + std::to_string(a.dim()) + " x " + std::to_string(a.dim()) +
                                           " but the basis acts on dimension " + std::to_string(s.ambientDim()));
  }
}

PrimalState toPrimal(BarrierState&& b) {
  PrimalState p;
  p.x = std::move(b.z);
  p.phi = b.value;
  p.grad = std::move(b.grad);
  p.fact = std::move(b.fact);
  return p;
}

}  // namespace

PrimalState evaluatePhiGrad(const StructuredSpdMatrix& a, const SubspaceBasis& s, const Vector& x) {
  checkSizes(a, s);
  const StructuredAffineFamily family(a, negated(s, false));
  const BarrierProblem problem{&family, {}, 0.0};
  return toPrimal(evaluateBarrier(problem, x));
}

Vector hvProduct(const PrimalState& state, const SubspaceBasis& s, const Vector& p) {
  if (p.size() != static_cast<Index>(s.size())) fail(ErrorCode::DimensionMismatch, "hvProduct: direction length");
  Vector q = Vector::Zero(p.size());
  if (p.isZero(0.0)) return q;
  const Matrix w = state.fact.sandwich(s.combination(std::span<const double>(p.data(), s.size())));
  for (std::size_t k = 0; k < s.size(); ++k) q(static_cast<Index>(k)) = s[k].traceWith(w);
  return q;
}

Matrix exactHessian(const PrimalState& state, const SubspaceBasis& s) {
  const Index m = static_cast<Index>(s.size());
  Matrix h(m, m);
  for (Index k = 0; k < m; ++k) {
    const Matrix w = state.fact.sandwich(s[static_cast<std::size_t>(k)]);
    for (Index l = k; l < m; ++l) h(l, k) = h(k, l) = s[static_cast<std::size_t>(l)].traceWith(w);
  }
  return h;
}

PrimalLineSearch lineSearch(const StructuredSpdMatrix& a, const SubspaceBasis& s, const PrimalState& state,
                            const Vector& d, const SolverOptions& opts) {
  checkSizes(a, s);
  const StructuredAffineFamily family(a, negated(s, false));
  const BarrierProblem problem{&family, {}, 0.0};
  BarrierState b{state.x, state.phi, state.grad, state.fact};
  LineSearchResult ls = barrierLineSearch(problem, b, d, opts);
  return {ls.t, toPrimal(std::move(ls.next)), std::move(ls.trials)};
}

void screenFeasibility(const SubspaceBasis& s) {
  const FeasibilityVerdict v = checkFeasibility(s);
  if (v.status == FeasibilityStatus::ProvenInfeasible) {
    fail(ErrorCode::ProvenInfeasibleSubspace, "the subspace contains a nonzero positive semidefinite matrix");
  }
  if (v.status == FeasibilityStatus::Unknown) {
    logger().warn("feasibility of the subspace could not be certified; relying on the divergence guard");
  }
}

void fillResiduals(const Matrix& a, const SubspaceBasis& s, DecompositionResult& r) {
  const Index n = a.rows();
  Eigen::LLT<Matrix> llt(r.bStar);
  Matrix bInv = llt.info() == Eigen::Success ? Matrix(llt.solve(Matrix::Identity(n, n)))
                                             : Matrix(r.bStar.completeOrthogonalDecomposition().pseudoInverse());
  Matrix recon = a - bInv;
  r.cStar.addTo(recon, -1.0);
  r.reconstructionError = recon.norm();
  r.orthogonalityResidual = 0.0;
  for (const auto& d : s.elements()) r.orthogonalityResidual = std::max(r.orthogonalityResidual, std::abs(d.traceWith(r.bStar)));
}

DecompositionResult solvePrimalOn(const AffineSpdFamily& family, const Matrix& a, const SubspaceBasis& s,
                                  const SolverOptions& opts, Method method, const std::optional<Vector>& x0) {
  opts.validate();
  if (family.dim() != s.ambientDim() || a.rows() != s.ambientDim()) {
    fail(ErrorCode::DimensionMismatch, "family, matrix and basis dimensions differ");
  }
  const BarrierProblem problem{&family, {}, 0.0};
  const Vector norms = Eigen::Map<const Vector>(s.norms().data(), static_cast<Index>(s.size()));
  Vector z0 = Vector::Zero(static_cast<Index>(s.size()));
  if (x0) {
    if (x0->size() != z0.size()) fail(ErrorCode::DimensionMismatch, "warm start has the wrong length");
    z0 = x0->cwiseProduct(norms);
  }

  BarrierRun run;
  try {
    run = minimizeBarrier(problem, z0, opts, method);
  } catch (const Error& e) {
    if (e.code() == ErrorCode::Infeasible && !x0) fail(ErrorCode::Infeasible, "A is not positive definite");
    throw;
  }

  DecompositionResult r;
  r.method = method;
  r.structure = family.structure();
  r.x = run.state.z.cwiseQuotient(norms);
  r.cStar = s.combination(std::span<const double>(r.x.data(), s.size()));
  r.mFactor = run.state.fact;
  r.bStar = r.mFactor.inverse();
  r.iterations = run.iterations;
  r.cgIterations = run.cgIterations;
  r.finalGradNorm = run.gradNorms.back();
  r.gradNormHistory = std::move(run.gradNorms);
  r.phiHistory = std::move(run.values);
  r.phiStar = run.state.value;
  r.psiStar = r.phiStar - a.cwiseProduct(r.bStar).sum();
  fillResiduals(a, s, r);
  logger().info("{}: {} iterations, |g| = {:.3e}, recon = {:.3e}", methodName(method), r.iterations,
                r.finalGradNorm, r.reconstructionError);
  return r;
}

DecompositionResult solvePrimal(const StructuredSpdMatrix& a, const SubspaceBasis& s, const SolverOptions& opts,
                                Method method, const std::optional<Vector>& x0) {
  opts.validate();
  checkSizes(a, s);
  if (opts.checkFeasibility) screenFeasibility(s);
  const StructuredAffineFamily family(a, negated(s, true), opts.structure);
  return solvePrimalOn(family, a.toDense(), s, opts, method, x0);
}

DecompositionResult newtonCg(const StructuredSpdMatrix& a, const SubspaceBasis& s, const SolverOptions& opts) {
  return solvePrimal(a, s, opts, Method::NewtonCG);
}

DecompositionResult exactNewton(const StructuredSpdMatrix& a, const SubspaceBasis& s, const SolverOptions& opts) {
  return solvePrimal(a, s, opts, Method::ExactNewton);
}

Method resolveMethod(const SubspaceBasis& s, const SolverOptions& opts) {
  if (opts.method != Method::Auto) return opts.method;
  if (s.size() <= opts.autoExactThreshold) return Method::ExactNewton;
  if (s.complementDim() < static_cast<Index>(s.size())) return Method::Dual;
  return Method::NewtonCG;
}

DecompositionResult decompose(const StructuredSpdMatrix& a, const SubspaceBasis& s, const SolverOptions& opts) {
  const Method m = resolveMethod(s, opts);
  if (m == Method::Dual) return dualNewtonCg(a, s, opts);
  return solvePrimal(a, s, opts, m);
}

}  // namespace spdsplit
