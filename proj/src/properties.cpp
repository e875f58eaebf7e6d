#include "spdsplit/properties.hpp"

#include "spdsplit/errors.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace spdsplit {

namespace {

void requireOrthogonal(const Matrix& p) {
  if (p.rows() != p.cols()) fail(ErrorCode::DimensionMismatch, "P is not square");
  const double dev = (p.transpose() * p - Matrix::Identity(p.rows(), p.cols())).norm();
  if (dev > 1e-12) fail(ErrorCode::NotOrthogonal, "||P^T P - I||_F = " + std::to_string(dev));
}

double logDetOrNan(const Matrix& m) {
  Eigen::LLT<Matrix> llt(m);
  if (llt.info() != Eigen::Success) return std::numeric_limits<double>::quiet_NaN();
  return 2.0 * llt.matrixL().toDenseMatrix().diagonal().array().log().sum();
}

}  // namespace

VerificationReport verifyDecomposition(const Matrix& a, const SubspaceBasis& s, const Matrix& b, const Matrix& c,
                                       const VerificationTolerances& tol) {
  VerificationReport rep;
  rep.tolerances = tol;
  const Index n = a.rows();
  if (b.rows() != n || c.rows() != n || s.ambientDim() != n) fail(ErrorCode::DimensionMismatch, "verify: sizes");

  Eigen::SelfAdjointEigenSolver<Matrix> es(0.5 * (b + b.transpose()), Eigen::EigenvaluesOnly);
  rep.minEigenvalueB = n > 0 ? es.eigenvalues()(0) : 0.0;
  rep.positiveDefinitePass = rep.minEigenvalueB > 0.0;

  const Matrix bInv = rep.positiveDefinitePass ? Matrix(Eigen::LLT<Matrix>(b).solve(Matrix::Identity(n, n)))
                                               : Matrix(b.completeOrthogonalDecomposition().pseudoInverse());
  rep.reconstructionError = (a - bInv - c).norm();
  for (const auto& d : s.elements()) rep.orthogonalityResidual = std::max(rep.orthogonalityResidual, std::abs(d.traceWith(b)));
  rep.traceIdentityGap = std::abs(a.cwiseProduct(b).sum() - static_cast<double>(n));
  rep.detInequalitySlack = -logDetOrNan(a) - logDetOrNan(b);

  rep.reconstructionPass = rep.reconstructionError <= tol.reconstruction;
  rep.orthogonalityPass = rep.orthogonalityResidual <= tol.orthogonality;
  rep.detInequalityPass = rep.detInequalitySlack >= tol.detSlack;
  return rep;
}

VerificationReport verifyDecomposition(const StructuredSpdMatrix& a, const SubspaceBasis& s,
                                       const DecompositionResult& r, const VerificationTolerances& tol) {
  return verifyDecomposition(a.toDense(), s, r.bStar, r.cStar.toDense(), tol);
}

DecompositionResult conjugateDecomposition(const DecompositionResult& r, const Matrix& p) {
  requireOrthogonal(p);
  if (p.rows() != r.bStar.rows()) fail(ErrorCode::DimensionMismatch, "P has the wrong size");
  DecompositionResult out = r;
  out.bStar = p * r.bStar * p.transpose();
  const Matrix c = p * r.cStar.toDense() * p.transpose();
  out.cStar = SparseSymMatrix::fromDense(0.5 * (c + c.transpose()), 1e-15 * std::max(1.0, c.norm()));
  const Matrix bInv = p * r.mFactor.reconstruct() * p.transpose();
  out.mFactor = Factorization::fromInverse(0.5 * (bInv + bInv.transpose()), out.bStar, r.mFactor.logDeterminant());
  return out;
}

double groupFixedCheck(const DecompositionResult& r, const GroupAction& g) {
  const Matrix c = r.cStar.toDense();
  double worst = 0.0;
  for (std::size_t k = 0; k < g.size(); ++k) {
    worst = std::max(worst, (g.conjugate(k, r.bStar) - r.bStar).norm() + (g.conjugate(k, c) - c).norm());
  }
  return worst;
}

InverseDecomposition inverseDecomposition(const Matrix& a, const SubspaceBasis& s, const Matrix& b, const Matrix& c) {
  const Index n = a.rows();
  if (b.rows() != n || c.rows() != n || s.ambientDim() != n) fail(ErrorCode::DimensionMismatch, "inverse decomposition sizes");
  const Matrix aInv = Eigen::LLT<Matrix>(a).solve(Matrix::Identity(n, n));
  InverseDecomposition out;
  out.bHat = a * b * a;
  out.cHat = aInv * c * aInv;
  std::vector<SparseSymMatrix> els;
  els.reserve(s.size());
  for (const auto& d : s.elements()) {
    Matrix t = aInv * d.toDense() * aInv;
    t = 0.5 * (t + t.transpose());
    els.push_back(SparseSymMatrix::fromDense(t, 1e-15 * t.norm()));
  }
  out.sHat = SubspaceBasis(n, std::move(els));
  return out;
}

InverseDecomposition inverseDecomposition(const DecompositionResult& r, const Matrix& a, const SubspaceBasis& s) {
  return inverseDecomposition(a, s, r.bStar, r.cStar.toDense());
}

InverseRoundTrip inverseRoundTrip(const Matrix& a, const SubspaceBasis& s, const Matrix& b, const Matrix& c,
                                  const SolverOptions& opts) {
  const Index n = a.rows();
  const InverseDecomposition inv = inverseDecomposition(a, s, b, c);
  Matrix aInv = Eigen::LLT<Matrix>(a).solve(Matrix::Identity(n, n));
  aInv = 0.5 * (aInv + aInv.transpose());
  InverseRoundTrip out;
  Eigen::LLT<Matrix> llt(inv.bHat);
  if (llt.info() != Eigen::Success) {
    out.identityError = out.resolveError = std::numeric_limits<double>::infinity();
    return out;
  }
  out.identityError = (aInv - llt.solve(Matrix::Identity(n, n)) - inv.cHat).norm() / std::max(1.0, aInv.norm());
  for (const auto& d : inv.sHat.elements()) out.orthogonality = std::max(out.orthogonality, std::abs(d.traceWith(inv.bHat)));
  if (inv.sHat.empty()) {
    out.resolveError = (inv.bHat - aInv.inverse()).norm() / inv.bHat.norm();
    return out;
  }
  const DecompositionResult fresh = decompose(StructuredSpdMatrix::dense(aInv), inv.sHat, opts);
  out.resolveError = std::max((fresh.bStar - inv.bHat).norm() / inv.bHat.norm(),
                              (fresh.cStar.toDense() - inv.cHat).norm() / std::max(1.0, inv.cHat.norm()));
  return out;
}

Vector sensitivity(const DecompositionResult& r, const Matrix& a, const SubspaceBasis& s, const Matrix& upsilon) {
  const Index n = a.rows();
  if (upsilon.rows() != n || upsilon.cols() != n) fail(ErrorCode::DimensionMismatch, "direction has the wrong size");
  const Index m = static_cast<Index>(s.size());
  PrimalState st;
  st.x = r.x;
  st.fact = r.mFactor;
  const Matrix j = exactHessian(st, s);
  Eigen::SelfAdjointEigenSolver<Matrix> es(j, Eigen::EigenvaluesOnly);
  if (m > 0) {
    const double lo = es.eigenvalues()(0), hi = es.eigenvalues()(m - 1);
    if (!(lo > 0.0) || hi / lo > 1e12) {
      fail(ErrorCode::SingularJacobian, "Jacobian condition number " + std::to_string(hi / lo) + " exceeds 1e12");
    }
  }
  const Matrix w = r.bStar * upsilon * r.bStar;
  Vector v(m);
  for (Index i = 0; i < m; ++i) v(i) = -s[static_cast<std::size_t>(i)].traceWith(w);
  return -Eigen::LLT<Matrix>(j).solve(v);
}

}  // namespace spdsplit
