#pragma once

#include "spdsplit/structured_linalg.hpp"

#include <optional>
#include <span>
#include <variant>
#include <vector>

namespace spdsplit {

/// Isometric coordinates for the trace inner product: diagonal entries are
/// copied, off-diagonal entries scaled by sqrt(2). Position (i, j), i <= j,
/// maps to j * (j + 1) / 2 + i.
Vector halfVectorize(const SparseSymMatrix& x);
Vector halfVectorize(const Matrix& x);
Index halfVectorIndex(Index i, Index j);

struct IndependenceCertificate {
  Index rank = 0;
  /// Minimum eigenvalue of the Gram matrix of the unit-normalized elements.
  double gramMinEigenvalue = 1.0;
};

/// Ordered basis D_1..D_m of a subspace of symmetric n x n matrices.
///
/// Elements that share no position are independent of one another, so the
/// Gram matrix is block diagonal over "components" (groups of elements linked
/// by overlapping supports). Gram factorizations are kept per component, which
/// keeps projections cheap for the large coordinate-aligned bases that appear
/// in practice.
class SubspaceBasis {
 public:
  SubspaceBasis() = default;
  /// Throws RankDeficientBasis if the elements are linearly dependent.
  SubspaceBasis(Index n, std::vector<SparseSymMatrix> elements);

  Index ambientDim() const { return n_; }
  std::size_t size() const { return elements_.size(); }
  bool empty() const { return elements_.empty(); }
  const SparseSymMatrix& operator[](std::size_t k) const { return elements_[k]; }
  const std::vector<SparseSymMatrix>& elements() const { return elements_; }

  bool allZeroDiagonal() const { return allZeroDiagonal_; }
  Index maxHalfBandwidth() const { return maxHalfBandwidth_; }
  const IndependenceCertificate& certificate() const { return certificate_; }
  const std::vector<double>& norms() const { return norms_; }
  /// n(n+1)/2 - m.
  Index complementDim() const;

  /// Copy with every element rescaled to unit Frobenius norm.
  SubspaceBasis normalized() const;

  /// C(x) = sum_k x_k D_k.
  SparseSymMatrix combination(std::span<const double> x) const;
  Vector traces(const Matrix& y) const;  // (tr(D_k Y))_k

  /// Coefficients of the trace-orthogonal projection of X onto span(S).
  Vector projectCoefficients(const Matrix& x) const;
  Matrix project(const Matrix& x) const;

  /// Group of element indices per component, and the half-vector positions
  /// each component touches.
  struct Component {
    std::vector<std::size_t> members;
    std::vector<Index> positions;
    Eigen::LLT<Matrix> gram;
  };
  const std::vector<Component>& components() const { return components_; }

 private:
  Index n_ = 0;
  std::vector<SparseSymMatrix> elements_;
  std::vector<double> norms_;
  bool allZeroDiagonal_ = true;
  Index maxHalfBandwidth_ = 0;
  IndependenceCertificate certificate_;
  std::vector<Component> components_;
};

/// Finite set of orthogonal matrices acting by conjugation X -> P X P^T.
/// Permutations are stored as index maps with (P X P^T)(perm[i], perm[j]) = X(i, j).
class GroupAction {
 public:
  using Permutation = std::vector<Index>;
  using Element = std::variant<Permutation, Matrix>;

  GroupAction() = default;
  static GroupAction fromPermutations(Index n, std::vector<Permutation> perms);
  /// Throws NotOrthogonal if some ||P^T P - I||_F > 1e-12.
  static GroupAction fromMatrices(std::vector<Matrix> matrices);
  static GroupAction trivial(Index n);

  Index dim() const { return n_; }
  std::size_t size() const { return elements_.size(); }
  bool allPermutations() const;
  const Element& element(std::size_t k) const { return elements_[k]; }
  Matrix denseElement(std::size_t k) const;

  Matrix conjugate(std::size_t k, const Matrix& x) const;
  SparseSymMatrix conjugate(std::size_t k, const SparseSymMatrix& x) const;
  /// (1/|G|) sum_P P X P^T over the listed elements.
  Matrix reynolds(const Matrix& x) const;

 private:
  Index n_ = 0;
  std::vector<Element> elements_;
};

/// Basis of the trace-orthogonal complement, orthonormal under tr(XY).
SubspaceBasis complementBasis(const SubspaceBasis& s);

/// Basis of S^G = {X in S : P X P^T = X for all P}.
///
/// When every element is a permutation and each permutation maps basis
/// elements onto basis elements, the result is the span of orbit sums, i.e.
/// the fixed space of the group generated by the listed permutations. Otherwise
/// the Reynolds average over the listed elements is used, which requires the
/// list to be the whole group (closure is not checked).
/// Throws NotInvariantSubspace if some Reynolds image leaves span(S).
SubspaceBasis fixedSubspace(const SubspaceBasis& s, const GroupAction& g);

/// P S P^T.
SubspaceBasis conjugateBasis(const SubspaceBasis& s, const Matrix& p);
SubspaceBasis permuteBasis(const SubspaceBasis& s, std::span<const Index> perm);

enum class FeasibilityStatus { ProvenFeasible, ProvenInfeasible, Unknown };

const char* feasibilityStatusName(FeasibilityStatus s);

struct FeasibilityVerdict {
  FeasibilityStatus status = FeasibilityStatus::Unknown;
  /// SPD element of the complement (feasible) or unit-norm PSD element of S (infeasible).
  std::optional<Matrix> witness;
};

/// Incomplete check of S intersect PSD = {0}; Unknown is a valid answer.
FeasibilityVerdict checkFeasibility(const SubspaceBasis& s);

}  // namespace spdsplit
