#include "spdsplit/structured_linalg.hpp"

#include "spdsplit/errors.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <string>
#include <unordered_map>

namespace spdsplit {

const char* structureName(Structure s) {
  switch (s) {
    case Structure::Dense: return "dense";
    case Structure::Banded: return "banded";
    case Structure::Toeplitz: return "toeplitz";
  }
  return "unknown";
}

// ---------------------------------------------------------------------------
// SparseSymMatrix

namespace {

bool entryLess(const SparseEntry& a, const SparseEntry& b) {
  return a.row != b.row ? a.row < b.row : a.col < b.col;
}

}  // namespace

SparseSymMatrix::SparseSymMatrix(Index n, std::vector<SparseEntry> entries) : n_(n) {
  if (n < 0) fail(ErrorCode::InvalidArgument, "negative dimension");
  entries_.reserve(entries.size());
  for (auto e : entries) {
    if (e.row < 0 || e.col < 0 || e.row >= n || e.col >= n) {
      fail(ErrorCode::InvalidArgument, "sparse entry (" + std::to_string(e.row) + "," +
                                           std::to_string(e.col) + ") outside dimension " +
                                           std::to_string(n));
    }
    if (!std::isfinite(e.value)) fail(ErrorCode::InvalidArgument, "non-finite sparse entry");
    if (e.value == 0.0) continue;
    if (e.row > e.col) std::swap(e.row, e.col);
    entries_.push_back(e);
  }
  std::sort(entries_.begin(), entries_.end(), entryLess);
  for (std::size_t k = 1; k < entries_.size(); ++k) {
    if (entries_[k].row == entries_[k - 1].row && entries_[k].col == entries_[k - 1].col) {
      fail(ErrorCode::InvalidArgument, "duplicate sparse entry (" +
                                           std::to_string(entries_[k].row) + "," +
                                           std::to_string(entries_[k].col) + ")");
    }
  }
  for (const auto& e : entries_) {
    if (e.row == e.col) zeroDiagonal_ = false;
    halfBandwidth_ = std::max(halfBandwidth_, e.col - e.row);
  }
}

SparseSymMatrix SparseSymMatrix::fromDense(const Matrix& m, double dropTolerance) {
  if (m.rows() != m.cols()) fail(ErrorCode::DimensionMismatch, "matrix is not square");
  std::vector<SparseEntry> entries;
  for (Index j = 0; j < m.cols(); ++j) {
    for (Index i = 0; i <= j; ++i) {
      const double v = 0.5 * (m(i, j) + m(j, i));
      if (std::abs(v) > dropTolerance) entries.push_back({i, j, v});
    }
  }
  return SparseSymMatrix(m.rows(), std::move(entries));
}

SparseSymMatrix SparseSymMatrix::unit(Index n, Index i, Index j, double value) {
  return SparseSymMatrix(n, {{i, j, value}});
}

std::size_t SparseSymMatrix::supportSize() const {
  std::size_t s = 0;
  for (const auto& e : entries_) s += (e.row == e.col) ? 1 : 2;
  return s;
}

std::vector<Index> SparseSymMatrix::supportIndices() const {
  std::vector<Index> idx;
  idx.reserve(2 * entries_.size());
  for (const auto& e : entries_) {
    idx.push_back(e.row);
    idx.push_back(e.col);
  }
  std::sort(idx.begin(), idx.end());
  idx.erase(std::unique(idx.begin(), idx.end()), idx.end());
  return idx;
}

double SparseSymMatrix::frobeniusNorm() const {
  double s = 0.0;
  for (const auto& e : entries_) s += (e.row == e.col ? 1.0 : 2.0) * e.value * e.value;
  return std::sqrt(s);
}

SparseSymMatrix SparseSymMatrix::scaled(double factor) const {
  SparseSymMatrix out = *this;
  if (factor == 0.0) {
    out.entries_.clear();
    out.zeroDiagonal_ = true;
    out.halfBandwidth_ = 0;
    return out;
  }
  for (auto& e : out.entries_) e.value *= factor;
  return out;
}

Matrix SparseSymMatrix::toDense() const {
  Matrix m = Matrix::Zero(n_, n_);
  addTo(m, 1.0);
  return m;
}

void SparseSymMatrix::addTo(Matrix& target, double factor) const {
  for (const auto& e : entries_) {
    target(e.row, e.col) += factor * e.value;
    if (e.row != e.col) target(e.col, e.row) += factor * e.value;
  }
}

double SparseSymMatrix::traceWith(const Matrix& y) const {
  if (y.rows() != n_ || y.cols() != n_) fail(ErrorCode::DimensionMismatch, "traceWith: size");
  double s = 0.0;
  for (const auto& e : entries_) {
    s += (e.row == e.col) ? e.value * y(e.row, e.row)
                          : e.value * (y(e.row, e.col) + y(e.col, e.row));
  }
  return s;
}

double SparseSymMatrix::traceWith(const SparseSymMatrix& other) const {
  if (other.n_ != n_) fail(ErrorCode::DimensionMismatch, "traceWith: size");
  double s = 0.0;
  auto a = entries_.begin();
  auto b = other.entries_.begin();
  while (a != entries_.end() && b != other.entries_.end()) {
    if (entryLess(*a, *b)) {
      ++a;
    } else if (entryLess(*b, *a)) {
      ++b;
    } else {
      s += (a->row == a->col ? 1.0 : 2.0) * a->value * b->value;
      ++a;
      ++b;
    }
  }
  return s;
}

std::optional<Vector> SparseSymMatrix::toeplitzColumn() const {
  std::map<Index, std::pair<std::size_t, double>> diagonals;
  for (const auto& e : entries_) {
    const Index d = e.col - e.row;
    auto it = diagonals.find(d);
    if (it == diagonals.end()) {
      diagonals.emplace(d, std::make_pair(std::size_t{1}, e.value));
    } else {
      if (it->second.second != e.value) return std::nullopt;
      ++it->second.first;
    }
  }
  Vector col = Vector::Zero(n_);
  for (const auto& [d, info] : diagonals) {
    if (info.first != static_cast<std::size_t>(n_ - d)) return std::nullopt;
    col(d) = info.second;
  }
  return col;
}

SparseSymMatrix SparseSymMatrix::permuted(std::span<const Index> perm) const {
  if (static_cast<Index>(perm.size()) != n_) fail(ErrorCode::DimensionMismatch, "permutation size");
  std::vector<SparseEntry> out;
  out.reserve(entries_.size());
  for (const auto& e : entries_) out.push_back({perm[e.row], perm[e.col], e.value});
  return SparseSymMatrix(n_, std::move(out));
}

bool operator==(const SparseSymMatrix& a, const SparseSymMatrix& b) {
  if (a.n_ != b.n_ || a.entries_.size() != b.entries_.size()) return false;
  for (std::size_t k = 0; k < a.entries_.size(); ++k) {
    const auto& x = a.entries_[k];
    const auto& y = b.entries_[k];
    if (x.row != y.row || x.col != y.col || x.value != y.value) return false;
  }
  return true;
}

SparseSymMatrix linearCombination(std::span<const SparseSymMatrix> terms,
                                  std::span<const double> coeffs, Index n) {
  if (terms.size() != coeffs.size()) fail(ErrorCode::DimensionMismatch, "linearCombination");
  std::size_t total = 0;
  for (std::size_t k = 0; k < terms.size(); ++k) {
    if (coeffs[k] != 0.0) total += terms[k].storedEntries();
  }
  std::vector<SparseEntry> all;
  all.reserve(total);
  for (std::size_t k = 0; k < terms.size(); ++k) {
    if (coeffs[k] == 0.0) continue;
    if (terms[k].dim() != n) fail(ErrorCode::DimensionMismatch, "linearCombination: term size");
    for (const auto& e : terms[k].entries()) all.push_back({e.row, e.col, coeffs[k] * e.value});
  }
  std::sort(all.begin(), all.end(), entryLess);
  std::vector<SparseEntry> merged;
  merged.reserve(all.size());
  for (const auto& e : all) {
    if (!merged.empty() && merged.back().row == e.row && merged.back().col == e.col) {
      merged.back().value += e.value;
    } else {
      merged.push_back(e);
    }
  }
  return SparseSymMatrix(n, std::move(merged));
}

// ---------------------------------------------------------------------------
// StructuredSpdMatrix

StructuredSpdMatrix StructuredSpdMatrix::dense(const Matrix& m) {
  if (m.rows() != m.cols()) fail(ErrorCode::DimensionMismatch, "matrix is not square");
  StructuredSpdMatrix s;
  s.n_ = m.rows();
  s.structure_ = Structure::Dense;
  s.dense_ = m.selfadjointView<Eigen::Lower>();
  return s;
}

StructuredSpdMatrix StructuredSpdMatrix::banded(Index halfBandwidth, const Matrix& band) {
  if (halfBandwidth < 0 || band.rows() != halfBandwidth + 1) {
    fail(ErrorCode::InvalidArgument, "band storage must have halfBandwidth + 1 rows");
  }
  StructuredSpdMatrix s;
  s.n_ = band.cols();
  s.structure_ = Structure::Banded;
  s.bandwidth_ = halfBandwidth;
  s.band_ = band;
  for (Index d = 0; d <= halfBandwidth; ++d) {
    for (Index j = std::max<Index>(0, s.n_ - d); j < s.n_; ++j) s.band_(d, j) = 0.0;
  }
  return s;
}

StructuredSpdMatrix StructuredSpdMatrix::bandedFromDense(const Matrix& m, Index halfBandwidth) {
  if (m.rows() != m.cols()) fail(ErrorCode::DimensionMismatch, "matrix is not square");
  const Index n = m.rows();
  const Index b = std::min(halfBandwidth, std::max<Index>(n - 1, 0));
  for (Index j = 0; j < n; ++j) {
    for (Index i = j + b + 1; i < n; ++i) {
      if (m(i, j) != 0.0) {
        fail(ErrorCode::InvalidArgument, "entry (" + std::to_string(i) + "," + std::to_string(j) +
                                             ") outside half-bandwidth " + std::to_string(b));
      }
    }
  }
  Matrix band = Matrix::Zero(b + 1, n);
  for (Index d = 0; d <= b; ++d) {
    for (Index j = 0; j + d < n; ++j) band(d, j) = m(j + d, j);
  }
  return banded(b, band);
}

StructuredSpdMatrix StructuredSpdMatrix::toeplitz(const Vector& firstColumn) {
  StructuredSpdMatrix s;
  s.n_ = firstColumn.size();
  s.structure_ = Structure::Toeplitz;
  s.column_ = firstColumn;
  return s;
}

Index StructuredSpdMatrix::halfBandwidth() const {
  switch (structure_) {
    case Structure::Banded: return bandwidth_;
    default: return std::max<Index>(n_ - 1, 0);
  }
}

double StructuredSpdMatrix::operator()(Index i, Index j) const {
  const Index d = std::abs(i - j);
  switch (structure_) {
    case Structure::Dense: return dense_(i, j);
    case Structure::Banded: return d > bandwidth_ ? 0.0 : band_(d, std::min(i, j));
    case Structure::Toeplitz: return column_(d);
  }
  return 0.0;
}

Matrix StructuredSpdMatrix::toDense() const {
  if (structure_ == Structure::Dense) return dense_;
  Matrix m = Matrix::Zero(n_, n_);
  for (Index j = 0; j < n_; ++j) {
    const Index last = structure_ == Structure::Banded ? std::min(n_ - 1, j + bandwidth_) : n_ - 1;
    for (Index i = j; i <= last; ++i) {
      m(i, j) = (*this)(i, j);
      m(j, i) = m(i, j);
    }
  }
  return m;
}

// ---------------------------------------------------------------------------
// Generic backend queries

double FactorizationBackend::inverseEntry(Index i, Index j) const {
  const Index col[] = {j};
  return inverseColumns(col)(i, 0);
}

std::vector<double> FactorizationBackend::selectedInverse(std::span<const IndexPair> pattern) const {
  std::vector<double> out;
  out.reserve(pattern.size());
  for (const auto& [i, j] : pattern) out.push_back(inverseEntry(i, j));
  return out;
}

Matrix FactorizationBackend::inverseColumns(std::span<const Index> cols) const {
  Matrix rhs = Matrix::Zero(dim(), static_cast<Index>(cols.size()));
  for (std::size_t k = 0; k < cols.size(); ++k) rhs(cols[k], static_cast<Index>(k)) = 1.0;
  return solve(rhs);
}

double FactorizationBackend::traceInvTimes(const SparseSymMatrix& d) const {
  const auto support = d.supportIndices();
  if (support.empty()) return 0.0;
  const Matrix w = inverseColumns(support);
  std::unordered_map<Index, Index> local;
  for (std::size_t k = 0; k < support.size(); ++k) local.emplace(support[k], static_cast<Index>(k));
  double s = 0.0;
  for (const auto& e : d.entries()) {
    s += (e.row == e.col ? 1.0 : 2.0) * e.value * w(e.row, local.at(e.col));
  }
  return s;
}

namespace {

// X = W(:, U) * D(U, U) where `w` holds the columns W(:, U) in the order of `support`.
Matrix applyRight(const Matrix& w, const SparseSymMatrix& d, const std::vector<Index>& support) {
  std::unordered_map<Index, Index> local;
  for (std::size_t k = 0; k < support.size(); ++k) local.emplace(support[k], static_cast<Index>(k));
  Matrix x = Matrix::Zero(w.rows(), static_cast<Index>(support.size()));
  for (const auto& e : d.entries()) {
    const Index r = local.at(e.row);
    const Index c = local.at(e.col);
    x.col(c).noalias() += e.value * w.col(r);
    if (r != c) x.col(r).noalias() += e.value * w.col(c);
  }
  return x;
}

Matrix sandwichFromColumns(const Matrix& w, const SparseSymMatrix& d,
                           const std::vector<Index>& support) {
  const Matrix x = applyRight(w, d, support);
  Matrix y = x * w.transpose();
  return 0.5 * (y + y.transpose());
}

}  // namespace

double FactorizationBackend::traceInvPair(const SparseSymMatrix& d1, const SparseSymMatrix& d2) const {
  const auto u1 = d1.supportIndices();
  const auto u2 = d2.supportIndices();
  if (u1.empty() || u2.empty()) return 0.0;
  std::vector<Index> all = u1;
  all.insert(all.end(), u2.begin(), u2.end());
  std::sort(all.begin(), all.end());
  all.erase(std::unique(all.begin(), all.end()), all.end());
  const Matrix w = inverseColumns(all);
  auto gather = [&](const std::vector<Index>& u) {
    Matrix out(w.rows(), static_cast<Index>(u.size()));
    for (std::size_t k = 0; k < u.size(); ++k) {
      const auto pos = std::lower_bound(all.begin(), all.end(), u[k]) - all.begin();
      out.col(static_cast<Index>(k)) = w.col(pos);
    }
    return out;
  };
  // X1 = M^{-1} D1 and X2 = M^{-1} D2 restricted to their nonzero columns;
  // tr(X1 X2) = sum_{a in U2, b in U1} X1(a, b) X2(b, a).
  const Matrix x1 = applyRight(gather(u1), d1, u1);
  const Matrix x2 = applyRight(gather(u2), d2, u2);
  double s = 0.0;
  for (std::size_t p = 0; p < u2.size(); ++p) {
    for (std::size_t q = 0; q < u1.size(); ++q) {
      s += x1(u2[p], static_cast<Index>(q)) * x2(u1[q], static_cast<Index>(p));
    }
  }
  return s;
}

Matrix FactorizationBackend::sandwich(const SparseSymMatrix& d) const {
  const auto support = d.supportIndices();
  if (support.empty()) return Matrix::Zero(dim(), dim());
  return sandwichFromColumns(inverseColumns(support), d, support);
}

Matrix FactorizationBackend::inverse() const {
  Matrix w = solve(Matrix::Identity(dim(), dim()));
  return 0.5 * (w + w.transpose());
}

// ---------------------------------------------------------------------------
// Backends holding an explicit inverse

namespace {

class InverseCachedBackend : public FactorizationBackend {
 public:
  Index dim() const override { return inv_.rows(); }
  double logDeterminant() const override { return logDet_; }

  double inverseEntry(Index i, Index j) const override { return inv_(i, j); }

  Matrix inverseColumns(std::span<const Index> cols) const override {
    Matrix out(inv_.rows(), static_cast<Index>(cols.size()));
    for (std::size_t k = 0; k < cols.size(); ++k) out.col(static_cast<Index>(k)) = inv_.col(cols[k]);
    return out;
  }

  double traceInvTimes(const SparseSymMatrix& d) const override { return d.traceWith(inv_); }

  Matrix sandwich(const SparseSymMatrix& d) const override {
    const auto support = d.supportIndices();
    if (support.empty()) return Matrix::Zero(dim(), dim());
    if (static_cast<Index>(support.size()) == dim()) {
      // Full support: skip the column gather.
      Matrix x = Matrix::Zero(dim(), dim());
      for (const auto& e : d.entries()) {
        x.col(e.col).noalias() += e.value * inv_.col(e.row);
        if (e.row != e.col) x.col(e.row).noalias() += e.value * inv_.col(e.col);
      }
      Matrix y = x * inv_;
      return 0.5 * (y + y.transpose());
    }
    return sandwichFromColumns(inverseColumns(support), d, support);
  }

  Matrix inverse() const override { return inv_; }

 protected:
  Matrix inv_;
  double logDet_ = 0.0;
};

class DenseBackend final : public InverseCachedBackend {
 public:
  explicit DenseBackend(const Matrix& m) : llt_(m) {
    if (llt_.info() != Eigen::Success) {
      fail(ErrorCode::NotPositiveDefinite, "dense Cholesky: non-positive pivot");
    }
    const auto diag = llt_.matrixLLT().diagonal();
    for (Index i = 0; i < diag.size(); ++i) {
      if (!(diag(i) > 0.0) || !std::isfinite(diag(i))) {
        fail(ErrorCode::NotPositiveDefinite, "dense Cholesky: non-positive pivot");
      }
    }
    logDet_ = 2.0 * diag.array().log().sum();
    inv_ = llt_.solve(Matrix::Identity(m.rows(), m.cols()));
    inv_ = 0.5 * (inv_ + inv_.transpose()).eval();
  }

  Structure structure() const override { return Structure::Dense; }

  Matrix solve(const Matrix& rhs) const override { return llt_.solve(rhs); }

  Matrix reconstruct() const override { return llt_.reconstructedMatrix(); }

 private:
  Eigen::LLT<Matrix, Eigen::Lower> llt_;
};

class ExplicitInverseBackend final : public InverseCachedBackend {
 public:
  ExplicitInverseBackend(Matrix m, Matrix inverse, double logDet) : m_(std::move(m)) {
    inv_ = std::move(inverse);
    logDet_ = logDet;
  }

  Structure structure() const override { return Structure::Dense; }
  Matrix solve(const Matrix& rhs) const override { return inv_ * rhs; }
  Matrix reconstruct() const override { return m_; }

 private:
  Matrix m_;
};

// ---------------------------------------------------------------------------
// Banded Cholesky with Takahashi selected inverse. l_(d, j) = L(j + d, j).

class BandedBackend final : public FactorizationBackend {
 public:
  explicit BandedBackend(const StructuredSpdMatrix& m)
      : n_(m.dim()), b_(std::min(m.halfBandwidth(), std::max<Index>(m.dim() - 1, 0))) {
    const Matrix& a = m.bandData();
    l_ = Matrix::Zero(b_ + 1, n_);
    for (Index j = 0; j < n_; ++j) {
      double diag = a(0, j);
      for (Index k = std::max<Index>(0, j - b_); k < j; ++k) diag -= L(j, k) * L(j, k);
      if (!(diag > 0.0) || !std::isfinite(diag)) {
        fail(ErrorCode::NotPositiveDefinite,
             "banded Cholesky: non-positive pivot at " + std::to_string(j));
      }
      const double ljj = std::sqrt(diag);
      l_(0, j) = ljj;
      for (Index i = j + 1; i <= std::min(n_ - 1, j + b_); ++i) {
        double s = a(i - j, j);
        for (Index k = std::max<Index>(0, i - b_); k < j; ++k) s -= L(i, k) * L(j, k);
        l_(i - j, j) = s / ljj;
      }
    }
    logDet_ = 2.0 * l_.row(0).array().log().sum();

    // Takahashi recursion: entries of M^{-1} inside the band, z_(d, j) = Z(j + d, j).
    z_ = Matrix::Zero(b_ + 1, n_);
    for (Index i = n_ - 1; i >= 0; --i) {
      const Index last = std::min(n_ - 1, i + b_);
      const double lii = l_(0, i);
      for (Index j = last; j >= i; --j) {
        double s = (j == i) ? 1.0 / lii : 0.0;
        for (Index k = i + 1; k <= last; ++k) s -= Z(j, k) * L(k, i);
        z_(j - i, i) = s / lii;
      }
    }
  }

  Structure structure() const override { return Structure::Banded; }
  Index dim() const override { return n_; }
  double logDeterminant() const override { return logDet_; }

  Matrix solve(const Matrix& rhs) const override {
    Matrix x = rhs;
    for (Index c = 0; c < x.cols(); ++c) {
      auto col = x.col(c);
      for (Index i = 0; i < n_; ++i) {
        double s = col(i);
        for (Index k = std::max<Index>(0, i - b_); k < i; ++k) s -= L(i, k) * col(k);
        col(i) = s / l_(0, i);
      }
      for (Index i = n_ - 1; i >= 0; --i) {
        double s = col(i);
        for (Index k = i + 1; k <= std::min(n_ - 1, i + b_); ++k) s -= L(k, i) * col(k);
        col(i) = s / l_(0, i);
      }
    }
    return x;
  }

  Matrix reconstruct() const override {
    Matrix lower = Matrix::Zero(n_, n_);
    for (Index j = 0; j < n_; ++j) {
      for (Index i = j; i <= std::min(n_ - 1, j + b_); ++i) lower(i, j) = L(i, j);
    }
    return lower * lower.transpose();
  }

  double inverseEntry(Index i, Index j) const override {
    if (std::abs(i - j) <= b_) return Z(i, j);
    return FactorizationBackend::inverseEntry(i, j);
  }

  std::vector<double> selectedInverse(std::span<const IndexPair> pattern) const override {
    std::vector<double> out;
    out.reserve(pattern.size());
    for (const auto& [i, j] : pattern) {
      if (std::abs(i - j) > b_) {
        fail(ErrorCode::PatternOutsideBand, "selected inverse entry (" + std::to_string(i) + "," +
                                                std::to_string(j) + ") outside half-bandwidth " +
                                                std::to_string(b_));
      }
      out.push_back(Z(i, j));
    }
    return out;
  }

  double traceInvTimes(const SparseSymMatrix& d) const override {
    if (d.halfBandwidth() > b_) return FactorizationBackend::traceInvTimes(d);
    double s = 0.0;
    for (const auto& e : d.entries()) s += (e.row == e.col ? 1.0 : 2.0) * e.value * Z(e.row, e.col);
    return s;
  }

  Matrix sandwich(const SparseSymMatrix& d) const override {
    const auto support = d.supportIndices();
    if (static_cast<Index>(support.size()) < 2 * b_ + 1) return FactorizationBackend::sandwich(d);
    // Two rounds of banded solves: Y = M^{-1} (M^{-1} D)^T.
    const Matrix x = solve(d.toDense());
    Matrix y = solve(x.transpose());
    return 0.5 * (y + y.transpose());
  }

 private:
  double L(Index i, Index k) const { return l_(i - k, k); }
  double Z(Index i, Index j) const { return i >= j ? z_(i - j, j) : z_(j - i, i); }

  Index n_;
  Index b_;
  Matrix l_;
  Matrix z_;
  double logDet_ = 0.0;
};

// ---------------------------------------------------------------------------
// Toeplitz: Levinson-Durbin recursion, Gohberg-Semencul inverse representation
//   T^{-1} = (L(u) L(u)^T - L(v) L(v)^T) / u_0
// with u the first column of T^{-1}, v = (0, u_{n-1}, ..., u_1) and L(.) the
// lower triangular Toeplitz matrix with the given first column.

class ToeplitzBackend final : public FactorizationBackend {
 public:
  explicit ToeplitzBackend(const Vector& t) : t_(t) {
    const Index n = t.size();
    if (n == 0) return;
    double e = t(0);
    if (!(e > 0.0) || !std::isfinite(e)) {
      fail(ErrorCode::NotPositiveDefinite, "Levinson breakdown at order 0");
    }
    logDet_ = std::log(e);
    Vector a = Vector::Zero(n);  // a(0) = 1 implicit; a(1..k) predictor coefficients
    a(0) = 1.0;
    Vector next(n);
    for (Index k = 0; k + 1 < n; ++k) {
      double acc = t(k + 1);
      for (Index i = 1; i <= k; ++i) acc += a(i) * t(k + 1 - i);
      const double kappa = -acc / e;
      next.head(k + 2) = a.head(k + 2);
      for (Index i = 1; i <= k; ++i) next(i) = a(i) + kappa * a(k + 1 - i);
      next(k + 1) = kappa;
      a.head(k + 2) = next.head(k + 2);
      e *= (1.0 - kappa) * (1.0 + kappa);
      if (!(e > 0.0) || !std::isfinite(e)) {
        fail(ErrorCode::NotPositiveDefinite,
             "Levinson breakdown at order " + std::to_string(k + 1));
      }
      logDet_ += std::log(e);
    }
    u_ = a / e;
    v_ = Vector::Zero(n);
    for (Index r = 1; r < n; ++r) v_(r) = u_(n - r);
  }

  Structure structure() const override { return Structure::Toeplitz; }
  Index dim() const override { return t_.size(); }
  double logDeterminant() const override { return logDet_; }

  Matrix solve(const Matrix& rhs) const override {
    const Index n = dim();
    Matrix out(n, rhs.cols());
    Vector p(n), q(n);
    for (Index c = 0; c < rhs.cols(); ++c) {
      const auto r = rhs.col(c);
      // p = L(u)^T r, q = L(v)^T r
      for (Index k = 0; k < n; ++k) {
        double sp = 0.0, sq = 0.0;
        for (Index i = k; i < n; ++i) {
          sp += u_(i - k) * r(i);
          sq += v_(i - k) * r(i);
        }
        p(k) = sp;
        q(k) = sq;
      }
      for (Index i = 0; i < n; ++i) {
        double s = 0.0;
        for (Index k = 0; k <= i; ++k) s += u_(i - k) * p(k) - v_(i - k) * q(k);
        out(i, c) = s / u_(0);
      }
    }
    return out;
  }

  Matrix reconstruct() const override {
    const Index n = dim();
    Matrix inv(n, n);
    for (Index j = 0; j < n; ++j) {
      for (Index i = j; i < n; ++i) inv(i, j) = inv(j, i) = inverseEntry(i, j);
    }
    return inv.llt().solve(Matrix::Identity(n, n));
  }

  // O(min(i, j, n-1-i, n-1-j)) using persymmetry of T^{-1}.
  double inverseEntry(Index i, Index j) const override {
    const Index n = dim();
    if (i < j) std::swap(i, j);
    const Index ri = n - 1 - j;
    const Index rj = n - 1 - i;
    if (rj < j) {
      i = ri;
      j = rj;
    }
    double s = 0.0;
    for (Index k = 0; k <= j; ++k) s += u_(i - k) * u_(j - k) - v_(i - k) * v_(j - k);
    return s / u_(0);
  }

  Matrix inverseColumns(std::span<const Index> cols) const override {
    const Index n = dim();
    Matrix out(n, static_cast<Index>(cols.size()));
    for (std::size_t k = 0; k < cols.size(); ++k) {
      for (Index i = 0; i < n; ++i) out(i, static_cast<Index>(k)) = inverseEntry(i, cols[k]);
    }
    return out;
  }

  double traceInvTimes(const SparseSymMatrix& d) const override {
    double s = 0.0;
    for (const auto& e : d.entries()) {
      s += (e.row == e.col ? 1.0 : 2.0) * e.value * inverseEntry(e.row, e.col);
    }
    return s;
  }

 private:
  Vector t_;
  Vector u_;
  Vector v_;
  double logDet_ = 0.0;
};

}  // namespace

// ---------------------------------------------------------------------------
// Factorization facade

Factorization Factorization::fromInverse(Matrix m, Matrix inverse, double logDeterminant) {
  if (m.rows() != m.cols() || inverse.rows() != m.rows() || inverse.cols() != m.cols()) {
    fail(ErrorCode::DimensionMismatch, "fromInverse: sizes");
  }
  return Factorization(
      std::make_shared<ExplicitInverseBackend>(std::move(m), std::move(inverse), logDeterminant));
}

Matrix Factorization::solve(const Matrix& rhs) const {
  if (rhs.rows() != dim()) {
    fail(ErrorCode::DimensionMismatch, "solve: rhs has " + std::to_string(rhs.rows()) +
                                           " rows, expected " + std::to_string(dim()));
  }
  return backend_->solve(rhs);
}

std::vector<double> Factorization::selectedInverse(std::span<const IndexPair> pattern) const {
  for (const auto& [i, j] : pattern) {
    if (i < 0 || j < 0 || i >= dim() || j >= dim()) {
      fail(ErrorCode::DimensionMismatch, "selectedInverse: index out of range");
    }
  }
  return backend_->selectedInverse(pattern);
}

double Factorization::traceInvTimes(const SparseSymMatrix& d) const {
  if (d.dim() != dim()) fail(ErrorCode::DimensionMismatch, "traceInvTimes: dimension");
  return backend_->traceInvTimes(d);
}

double Factorization::traceInvPair(const SparseSymMatrix& d1, const SparseSymMatrix& d2) const {
  if (d1.dim() != dim() || d2.dim() != dim()) {
    fail(ErrorCode::DimensionMismatch, "traceInvPair: dimension");
  }
  return backend_->traceInvPair(d1, d2);
}

Matrix Factorization::sandwich(const SparseSymMatrix& d) const {
  if (d.dim() != dim()) fail(ErrorCode::DimensionMismatch, "sandwich: dimension");
  return backend_->sandwich(d);
}

Factorization factorize(const StructuredSpdMatrix& m) {
  switch (m.structure()) {
    case Structure::Dense: return Factorization(std::make_shared<DenseBackend>(m.denseData()));
    case Structure::Banded: return Factorization(std::make_shared<BandedBackend>(m));
    case Structure::Toeplitz:
      return Factorization(std::make_shared<ToeplitzBackend>(m.toeplitzData()));
  }
  fail(ErrorCode::InvalidArgument, "unknown structure");
}

double denseLogDet(const Matrix& m) {
  Eigen::LLT<Matrix> llt(m);
  if (llt.info() != Eigen::Success) fail(ErrorCode::NotPositiveDefinite, "logdet: not SPD");
  const auto diag = llt.matrixLLT().diagonal();
  if ((diag.array() <= 0.0).any()) fail(ErrorCode::NotPositiveDefinite, "logdet: not SPD");
  return 2.0 * diag.array().log().sum();
}

}  // namespace spdsplit
