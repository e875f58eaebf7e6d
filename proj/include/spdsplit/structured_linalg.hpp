#pragma once

#include <Eigen/Dense>

#include <cstddef>
#include <memory>
#include <optional>
#include <span>
#include <utility>
#include <vector>

namespace spdsplit {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;
using Index = Eigen::Index;
using IndexPair = std::pair<Index, Index>;

enum class Structure { Dense, Banded, Toeplitz };

const char* structureName(Structure s);

struct SparseEntry {
  Index row;
  Index col;
  double value;
};

/// Sparse symmetric matrix holding its upper triangle (row <= col), sorted
/// row-major. Exact zeros are dropped on construction.
class SparseSymMatrix {
 public:
  SparseSymMatrix() = default;
  /// Entries with row > col are mirrored into the upper triangle. Duplicate
  /// positions and non-finite values are rejected.
  SparseSymMatrix(Index n, std::vector<SparseEntry> entries);

  static SparseSymMatrix fromDense(const Matrix& m, double dropTolerance = 0.0);
  static SparseSymMatrix unit(Index n, Index i, Index j, double value = 1.0);

  Index dim() const { return n_; }
  const std::vector<SparseEntry>& entries() const { return entries_; }
  std::size_t storedEntries() const { return entries_.size(); }
  bool empty() const { return entries_.empty(); }

  bool zeroDiagonal() const { return zeroDiagonal_; }
  Index halfBandwidth() const { return halfBandwidth_; }
  /// Number of nonzero positions of the full matrix (both triangles).
  std::size_t supportSize() const;
  /// Sorted distinct row/column indices touched by the entries.
  std::vector<Index> supportIndices() const;

  double frobeniusNorm() const;
  SparseSymMatrix scaled(double factor) const;
  Matrix toDense() const;
  void addTo(Matrix& target, double factor) const;

  /// tr(D * Y) for symmetric Y.
  double traceWith(const Matrix& y) const;
  /// tr(D * E) between two sparse symmetric matrices.
  double traceWith(const SparseSymMatrix& other) const;

  /// First column if the matrix is Toeplitz (constant along every diagonal).
  std::optional<Vector> toeplitzColumn() const;

  /// P D P^T for the permutation with (P D P^T)(perm[i], perm[j]) = D(i, j).
  SparseSymMatrix permuted(std::span<const Index> perm) const;

  friend bool operator==(const SparseSymMatrix& a, const SparseSymMatrix& b);

 private:
  Index n_ = 0;
  std::vector<SparseEntry> entries_;
  bool zeroDiagonal_ = true;
  Index halfBandwidth_ = 0;
};

/// sum_k coeffs[k] * terms[k]; zero coefficients are skipped.
SparseSymMatrix linearCombination(std::span<const SparseSymMatrix> terms,
                                  std::span<const double> coeffs, Index n);

/// Symmetric matrix tagged with the structure that drives solver dispatch.
class StructuredSpdMatrix {
 public:
  StructuredSpdMatrix() = default;

  /// Uses the lower triangle of `m`.
  static StructuredSpdMatrix dense(const Matrix& m);
  /// band(d, j) = M(j + d, j), a (b + 1) x n array; entries past the end are ignored.
  static StructuredSpdMatrix banded(Index halfBandwidth, const Matrix& band);
  /// Fails with InvalidArgument if `m` has entries outside the band.
  static StructuredSpdMatrix bandedFromDense(const Matrix& m, Index halfBandwidth);
  static StructuredSpdMatrix toeplitz(const Vector& firstColumn);

  Index dim() const { return n_; }
  Structure structure() const { return structure_; }
  Index halfBandwidth() const;

  double operator()(Index i, Index j) const;
  Matrix toDense() const;

  const Matrix& denseData() const { return dense_; }
  const Matrix& bandData() const { return band_; }
  const Vector& toeplitzData() const { return column_; }

 private:
  Index n_ = 0;
  Structure structure_ = Structure::Dense;
  Index bandwidth_ = 0;
  Matrix dense_;
  Matrix band_;
  Vector column_;
};

/// Polymorphic factorization engine behind `Factorization`. Immutable once
/// constructed; every query is const and thread-safe.
class FactorizationBackend {
 public:
  virtual ~FactorizationBackend() = default;

  virtual Structure structure() const = 0;
  virtual Index dim() const = 0;
  virtual double logDeterminant() const = 0;
  virtual Matrix solve(const Matrix& rhs) const = 0;
  virtual Matrix reconstruct() const = 0;

  virtual double inverseEntry(Index i, Index j) const;
  virtual std::vector<double> selectedInverse(std::span<const IndexPair> pattern) const;
  virtual Matrix inverseColumns(std::span<const Index> cols) const;
  virtual double traceInvTimes(const SparseSymMatrix& d) const;
  virtual double traceInvPair(const SparseSymMatrix& d1, const SparseSymMatrix& d2) const;
  virtual Matrix sandwich(const SparseSymMatrix& d) const;
  virtual Matrix inverse() const;
};

/// Cholesky-type handle for an SPD matrix M: solves, log|M|, entries of M^{-1}.
class Factorization {
 public:
  Factorization() = default;
  explicit Factorization(std::shared_ptr<const FactorizationBackend> backend)
      : backend_(std::move(backend)) {}

  /// Backend serving every query from a precomputed inverse.
  static Factorization fromInverse(Matrix m, Matrix inverse, double logDeterminant);

  bool valid() const { return backend_ != nullptr; }
  Structure structure() const { return backend_->structure(); }
  Index dim() const { return backend_->dim(); }
  double logDeterminant() const { return backend_->logDeterminant(); }

  Matrix solve(const Matrix& rhs) const;
  std::vector<double> selectedInverse(std::span<const IndexPair> pattern) const;
  double traceInvTimes(const SparseSymMatrix& d) const;
  double traceInvPair(const SparseSymMatrix& d1, const SparseSymMatrix& d2) const;
  /// M^{-1} D M^{-1} as a dense symmetric matrix.
  Matrix sandwich(const SparseSymMatrix& d) const;
  Matrix inverse() const { return backend_->inverse(); }
  Matrix reconstruct() const { return backend_->reconstruct(); }

  const FactorizationBackend& backend() const { return *backend_; }

 private:
  std::shared_ptr<const FactorizationBackend> backend_;
};

/// Throws Error(NotPositiveDefinite) on a non-positive pivot or a Levinson breakdown.
Factorization factorize(const StructuredSpdMatrix& m);

/// log|M| for a dense SPD matrix via Cholesky; throws NotPositiveDefinite.
double denseLogDet(const Matrix& m);

}  // namespace spdsplit
