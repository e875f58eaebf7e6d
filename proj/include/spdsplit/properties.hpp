#pragma once

#include "spdsplit/primal_solver.hpp"

namespace spdsplit {

struct VerificationTolerances {
  double reconstruction = 1e-8;
  double orthogonality = 1e-6;
  double detSlack = -1e-10;
};

struct VerificationReport {
  double reconstructionError = 0.0;
  double orthogonalityResidual = 0.0;
  double minEigenvalueB = 0.0;
  double traceIdentityGap = 0.0;     // |tr(B* A) - n|
  double detInequalitySlack = 0.0;   // log|A^{-1}| - log|B*|
  VerificationTolerances tolerances;
  bool reconstructionPass = false;
  bool orthogonalityPass = false;
  bool positiveDefinitePass = false;
  bool detInequalityPass = false;
  bool pass() const { return reconstructionPass && orthogonalityPass && positiveDefinitePass && detInequalityPass; }
};

VerificationReport verifyDecomposition(const Matrix& a, const SubspaceBasis& s, const Matrix& b, const Matrix& c,
                                       const VerificationTolerances& tol = {});
VerificationReport verifyDecomposition(const StructuredSpdMatrix& a, const SubspaceBasis& s,
                                       const DecompositionResult& r, const VerificationTolerances& tol = {});

/// Decomposition of P A P^T under P S P^T. Throws NotOrthogonal.
DecompositionResult conjugateDecomposition(const DecompositionResult& r, const Matrix& p);

/// max over listed P of ||P B P^T - B||_F + ||P C P^T - C||_F.
double groupFixedCheck(const DecompositionResult& r, const GroupAction& g);

struct InverseDecomposition {
  Matrix bHat;  // A B* A
  Matrix cHat;  // A^{-1} C* A^{-1}
  SubspaceBasis sHat;  // {A^{-1} D_k A^{-1}}
};
InverseDecomposition inverseDecomposition(const DecompositionResult& r, const Matrix& a, const SubspaceBasis& s);
InverseDecomposition inverseDecomposition(const Matrix& a, const SubspaceBasis& s, const Matrix& b, const Matrix& c);

/// The inverse identity A^{-1} = bHat^{-1} + cHat checked directly and against a
/// fresh solve of A^{-1} over sHat.
struct InverseRoundTrip {
  double identityError = 0.0;  // ||A^{-1} - bHat^{-1} - cHat||_F / max(1, ||A^{-1}||_F)
  double orthogonality = 0.0;  // max_k |tr(bHat Dhat_k)|
  double resolveError = 0.0;   // relative distance of the fresh (B, C) to (bHat, cHat)
  bool pass(double tol = 1e-7) const { return identityError <= tol && resolveError <= tol; }
};
InverseRoundTrip inverseRoundTrip(const Matrix& a, const SubspaceBasis& s, const Matrix& b, const Matrix& c,
                                  const SolverOptions& opts = {});

/// dx/de of x*(A + e Y) at e = 0 in the caller's basis. Throws SingularJacobian
/// when the Hessian's condition number exceeds 1e12.
Vector sensitivity(const DecompositionResult& r, const Matrix& a, const SubspaceBasis& s, const Matrix& upsilon);

}  // namespace spdsplit
