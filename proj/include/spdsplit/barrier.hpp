#pragma once

#include "spdsplit/structured_linalg.hpp"

#include <optional>
#include <string_view>
#include <vector>

namespace spdsplit {

enum class Method { NewtonCG, ExactNewton, Dual, Auto };

const char* methodName(Method m);
std::optional<Method> parseMethod(std::string_view name);

struct SolverOptions {
  double gradTolerance = 1e-8;
  // CG relative tolerance eta = max(min(cgForcingCap, sqrt(||g||)), cgForcingFloor)
  double cgForcingCap = 0.5;
  double cgForcingFloor = 1e-12;
  std::optional<int> cgMaxIterations;  // default: number of unknowns
  double armijoC1 = 1e-4;
  double backtrackFactor = 0.5;
  int maxBacktracks = 60;
  int maxNewtonIterations = 200;
  double divergenceRadius = 1e8;
  Method method = Method::Auto;
  std::size_t autoExactThreshold = 64;
  std::optional<Structure> structure;  // force a backend for M(x)
  bool checkFeasibility = true;

  /// Throws InvalidArgument on out-of-range knobs.
  void validate() const;
};

/// M(z) = M0 + sum_k z_k F_k, a family of symmetric matrices that the engine
/// keeps positive definite.
class AffineSpdFamily {
 public:
  virtual ~AffineSpdFamily() = default;
  virtual Index dim() const = 0;
  virtual const std::vector<SparseSymMatrix>& directions() const = 0;
  virtual Structure structure() const = 0;
  /// Throws Error(NotPositiveDefinite) when M(z) is not SPD.
  virtual Factorization factorize(const Vector& z) const = 0;
};

/// Dispatch rule for M0 + span(F): Toeplitz if everything is Toeplitz, banded
/// if M0 is banded (bandwidth max(b_M0, b_F)), dense otherwise.
Structure inheritedStructure(const StructuredSpdMatrix& base, std::span<const SparseSymMatrix> directions,
                             Index* bandwidth = nullptr);

class StructuredAffineFamily final : public AffineSpdFamily {
 public:
  StructuredAffineFamily(const StructuredSpdMatrix& base, std::vector<SparseSymMatrix> directions,
                         std::optional<Structure> force = std::nullopt);

  Index dim() const override { return n_; }
  const std::vector<SparseSymMatrix>& directions() const override { return directions_; }
  Structure structure() const override { return structure_; }
  Factorization factorize(const Vector& z) const override;

 private:
  Index n_ = 0;
  Structure structure_ = Structure::Dense;
  Index bandwidth_ = 0;
  Matrix base_;        // dense matrix or band array
  Vector baseColumn_;  // Toeplitz
  std::vector<SparseSymMatrix> directions_;
  std::vector<Vector> columns_;
};

/// f(z) = -log|M(z)| + c^T z + constant.
struct BarrierProblem {
  const AffineSpdFamily* family = nullptr;
  Vector linear;  // empty means zero
  double constant = 0.0;
  std::size_t size() const { return family->directions().size(); }
};

struct BarrierState {
  Vector z;
  double value = 0.0;
  Vector grad;
  Factorization fact;
};

/// Throws Error(Infeasible) if M(z) is not SPD.
BarrierState evaluateBarrier(const BarrierProblem& problem, const Vector& z);
/// Hessian-vector product, q_k = tr(M^{-1} F_k M^{-1} F(p)).
Vector barrierHv(const BarrierProblem& problem, const BarrierState& state, const Vector& p);
Matrix barrierHessian(const BarrierProblem& problem, const BarrierState& state);

struct LineSearchTrial {
  double t;
  bool feasible;
  bool accepted;
};

struct LineSearchResult {
  double t = 1.0;
  BarrierState next;
  std::vector<LineSearchTrial> trials;
};

/// Feasibility-preserving Armijo backtracking from t = 1. Throws LineSearchFailure.
LineSearchResult barrierLineSearch(const BarrierProblem& problem, const BarrierState& state,
                                   const Vector& d, const SolverOptions& opts);

struct BarrierRun {
  BarrierState state;
  int iterations = 0;
  int cgIterations = 0;
  std::vector<double> gradNorms;  // one per visited iterate, including the start
  std::vector<double> values;
};

/// Newton-CG or exact Newton from z0. Throws MaxIterations, LineSearchFailure,
/// SuspectedInfeasibleSubspace, Infeasible.
BarrierRun minimizeBarrier(const BarrierProblem& problem, const Vector& z0, const SolverOptions& opts,
                           Method method);

}  // namespace spdsplit
