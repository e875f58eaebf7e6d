#pragma once

#include "spdsplit/barrier.hpp"
#include "spdsplit/subspace.hpp"

#include <optional>
#include <vector>

namespace spdsplit {

/// Iterate of Phi(x) = -log|A - C(x)| in the coordinates of the given basis.
struct PrimalState {
  Vector x;
  double phi = 0.0;
  Vector grad;
  Factorization fact;  // of M(x) = A - C(x)
};

struct DecompositionResult {
  Vector x;  // coefficients w.r.t. the basis as passed in
  SparseSymMatrix cStar;
  Matrix bStar;
  Factorization mFactor;  // factorization of B*^{-1} = A - C*
  Method method = Method::NewtonCG;
  Structure structure = Structure::Dense;
  int iterations = 0;
  int cgIterations = 0;
  double finalGradNorm = 0.0;
  double phiStar = 0.0;  // -log|A - C*|
  double psiStar = 0.0;  // log|B*| - tr(A B*)
  double reconstructionError = 0.0;
  double orthogonalityResidual = 0.0;
  double projectionResidual = 0.0;  // dual path: part of A - B*^{-1} outside S
  std::vector<double> gradNormHistory;
  std::vector<double> phiHistory;
};

PrimalState evaluatePhiGrad(const StructuredSpdMatrix& a, const SubspaceBasis& s, const Vector& x);
Vector hvProduct(const PrimalState& state, const SubspaceBasis& s, const Vector& p);
Matrix exactHessian(const PrimalState& state, const SubspaceBasis& s);

struct PrimalLineSearch {
  double t = 1.0;
  PrimalState next;
  std::vector<LineSearchTrial> trials;
};
PrimalLineSearch lineSearch(const StructuredSpdMatrix& a, const SubspaceBasis& s, const PrimalState& state,
                            const Vector& d, const SolverOptions& opts = {});

/// Primal solvers start at x0 = 0. Internally every D_k is rescaled to unit
/// Frobenius norm; x is reported in the caller's coordinates.
DecompositionResult newtonCg(const StructuredSpdMatrix& a, const SubspaceBasis& s, const SolverOptions& opts = {});
DecompositionResult exactNewton(const StructuredSpdMatrix& a, const SubspaceBasis& s,
                                const SolverOptions& opts = {});
/// Warm start from a caller-provided feasible x0 (caller's coordinates).
DecompositionResult solvePrimal(const StructuredSpdMatrix& a, const SubspaceBasis& s, const SolverOptions& opts,
                                Method method, const std::optional<Vector>& x0 = std::nullopt);

/// solvePrimal over a caller-built family whose directions are -D_k / ||D_k||
/// (e.g. a block-structured path). `a` is the dense matrix M(0).
DecompositionResult solvePrimalOn(const AffineSpdFamily& family, const Matrix& a, const SubspaceBasis& s,
                                  const SolverOptions& opts, Method method,
                                  const std::optional<Vector>& x0 = std::nullopt);

/// Method dispatch: Auto picks exact Newton for m <= autoExactThreshold, the
/// dual when dim S^perp < m, Newton-CG otherwise.
Method resolveMethod(const SubspaceBasis& s, const SolverOptions& opts);
DecompositionResult decompose(const StructuredSpdMatrix& a, const SubspaceBasis& s, const SolverOptions& opts = {});

/// Residual bookkeeping shared by both solvers.
void fillResiduals(const Matrix& a, const SubspaceBasis& s, DecompositionResult& r);

/// Raises ProvenInfeasibleSubspace on a proven-infeasible S, warns on Unknown.
void screenFeasibility(const SubspaceBasis& s);

}  // namespace spdsplit
