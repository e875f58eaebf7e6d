#pragma once

#include "spdsplit/primal_solver.hpp"

#include <optional>

namespace spdsplit {

/// B(y) = B0 + sum_j y_j E_j with E spanning S^perp.
struct DualState {
  Vector y;
  Matrix b;
  double psi = 0.0;  // log|B| - tr(A B)
  Vector grad;       // tr(B^{-1} E_j) - tr(A E_j)
  Factorization fact;
};

/// SPD element of S^perp: the projection of I, else of A^{-1}. Throws NoObviousDualStart.
Matrix initialDualPoint(const StructuredSpdMatrix& a, const SubspaceBasis& s);

DualState evaluatePsiGrad(const StructuredSpdMatrix& a, const SubspaceBasis& complement, const Matrix& b0,
                          const Vector& y);
/// Product with the positive definite system matrix tr(B^{-1} E_j B^{-1} E_k).
Vector dualHvProduct(const DualState& state, const SubspaceBasis& complement, const Vector& p);

/// Maximizes log|B| - tr(AB) over B in S^perp. C* is recovered as the
/// projection of A - B*^{-1} onto S.
DecompositionResult dualNewtonCg(const StructuredSpdMatrix& a, const SubspaceBasis& s, const SolverOptions& opts = {},
                                 const std::optional<Matrix>& b0 = std::nullopt);

}  // namespace spdsplit
