#include "spdsplit/dual_solver.hpp"

#include "spdsplit/errors.hpp"
#include "spdsplit/log.hpp"

#include <cmath>
#include <string>

namespace spdsplit {

namespace {

bool isSpd(const Matrix& m) {
  Eigen::LLT<Matrix> llt(m);
  return llt.info() == Eigen::Success;
}

Index bandwidthOf(const Matrix& m) {
  Index b = 0;
  for (Index j = 0; j < m.cols(); ++j)
    for (Index i = j + b + 1; i < m.rows(); ++i)
      if (m(i, j) != 0.0) b = i - j;
  return b;
}

// Banded storage when B0 and every E_j share a narrow band.
StructuredSpdMatrix dualBase(const Matrix& b0, const SubspaceBasis& complement) {
  const Index n = b0.rows();
  Index b = bandwidthOf(b0);
  for (const auto& e : complement.elements()) b = std::max(b, e.halfBandwidth());
  if (n > 8 && 4 * (b + 1) <= n) return StructuredSpdMatrix::bandedFromDense(b0, b);
  return StructuredSpdMatrix::dense(b0);
}

struct DualProblem {
  StructuredAffineFamily family;
  BarrierProblem problem;
};

std::unique_ptr<DualProblem> makeProblem(const Matrix& a, const SubspaceBasis& complement, const Matrix& b0,
                                         std::optional<Structure> force) {
  auto p = std::make_unique<DualProblem>(DualProblem{
      StructuredAffineFamily(dualBase(b0, complement), complement.elements(), force), BarrierProblem{}});
  p->problem.family = &p->family;
  p->problem.linear = complement.traces(a);
  p->problem.constant = a.cwiseProduct(b0).sum();
  return p;
}

Matrix assemble(const Matrix& b0, const SubspaceBasis& complement, const Vector& y) {
  Matrix b = b0;
  for (std::size_t j = 0; j < complement.size(); ++j) {
    if (y(static_cast<Index>(j)) != 0.0) complement[j].addTo(b, y(static_cast<Index>(j)));
  }
  return b;
}

}  // namespace

Matrix initialDualPoint(const StructuredSpdMatrix& a, const SubspaceBasis& s) {
  const Index n = a.dim();
  const Matrix eye = Matrix::Identity(n, n);
  Matrix b0 = eye - s.project(eye);
  if (isSpd(b0)) return b0;
  const Matrix ainv = factorize(a).inverse();
  b0 = ainv - s.project(ainv);
  if (isSpd(b0)) return b0;
  // No SPD point in the complement at all means S meets the PSD cone.
  if (checkFeasibility(s).status == FeasibilityStatus::ProvenInfeasible)
    fail(ErrorCode::ProvenInfeasibleSubspace, "S contains a nonzero PSD matrix, so its complement has no SPD point");
  fail(ErrorCode::NoObviousDualStart, "projections of I and A^{-1} onto the complement are not positive definite");
}

DualState evaluatePsiGrad(const StructuredSpdMatrix& a, const SubspaceBasis& complement, const Matrix& b0,
                          const Vector& y) {
  const Matrix ad = a.toDense();
  const auto p = makeProblem(ad, complement, b0, std::nullopt);
  BarrierState st = evaluateBarrier(p->problem, y);
  DualState d;
  d.y = y;
  d.b = assemble(b0, complement, y);
  d.psi = -st.value;
  d.grad = -st.grad;
  d.fact = std::move(st.fact);
  return d;
}

Vector dualHvProduct(const DualState& state, const SubspaceBasis& complement, const Vector& p) {
  if (p.size() != static_cast<Index>(complement.size())) fail(ErrorCode::DimensionMismatch, "dualHvProduct: length");
  Vector q = Vector::Zero(p.size());
  if (p.isZero(0.0)) return q;
  const Matrix w = state.fact.sandwich(complement.combination(std::span<const double>(p.data(), complement.size())));
  for (std::size_t j = 0; j < complement.size(); ++j) q(static_cast<Index>(j)) = complement[j].traceWith(w);
  return q;
}

DecompositionResult dualNewtonCg(const StructuredSpdMatrix& a, const SubspaceBasis& s, const SolverOptions& opts,
                                 const std::optional<Matrix>& b0In) {
  opts.validate();
  if (a.dim() != s.ambientDim()) fail(ErrorCode::DimensionMismatch, "matrix and basis dimensions differ");
  if (opts.checkFeasibility) screenFeasibility(s);
  const Matrix ad = a.toDense();
  if (!isSpd(ad)) fail(ErrorCode::Infeasible, "A is not positive definite");

  const SubspaceBasis complement = complementBasis(s);
  const Matrix b0 = b0In ? *b0In : initialDualPoint(a, s);
  if (b0.rows() != a.dim() || b0.cols() != a.dim()) fail(ErrorCode::DimensionMismatch, "B0 has the wrong size");
  double leak = 0.0;
  for (std::size_t k = 0; k < s.size(); ++k) leak = std::max(leak, std::abs(s[k].traceWith(b0)) / s.norms()[k]);
  if (leak > 1e-10 * std::max(1.0, b0.norm())) fail(ErrorCode::InvalidArgument, "B0 is not orthogonal to S");
  if (!isSpd(b0)) fail(ErrorCode::InvalidArgument, "B0 is not positive definite");

  const auto p = makeProblem(ad, complement, b0, opts.structure);
  const BarrierRun run = minimizeBarrier(p->problem, Vector::Zero(static_cast<Index>(complement.size())), opts,
                                         Method::NewtonCG);

  DecompositionResult r;
  r.method = Method::Dual;
  r.structure = p->family.structure();
  r.bStar = assemble(b0, complement, run.state.z);
  const Matrix bInv = run.state.fact.inverse();
  const Matrix raw = ad - bInv;
  r.x = s.projectCoefficients(raw);
  r.cStar = s.combination(std::span<const double>(r.x.data(), s.size()));
  Matrix outside = raw;
  r.cStar.addTo(outside, -1.0);
  r.projectionResidual = outside.norm();
  const double logDetB = run.state.fact.logDeterminant();
  r.mFactor = Factorization::fromInverse(bInv, r.bStar, -logDetB);
  r.iterations = run.iterations;
  r.cgIterations = run.cgIterations;
  r.finalGradNorm = run.gradNorms.back();
  r.gradNormHistory = run.gradNorms;
  r.phiHistory = run.values;
  r.phiStar = logDetB;
  r.psiStar = -run.state.value;
  fillResiduals(ad, s, r);
  if (r.projectionResidual > 1e-8) {
    logger().warn("dual recovery leaves {:.3e} of A - B^-1 outside S", r.projectionResidual);
  }
  logger().info("dual: {} iterations, |g| = {:.3e}, recon = {:.3e}", r.iterations, r.finalGradNorm,
                r.reconstructionError);
  return r;
}

}  // namespace spdsplit
