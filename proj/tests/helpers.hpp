#pragma once

#include "spdsplit/structured_linalg.hpp"

#include <random>

namespace testutil {

using spdsplit::Index;
using spdsplit::Matrix;
using spdsplit::Vector;

inline Matrix randomMatrix(std::mt19937_64& rng, Index rows, Index cols) {
  std::normal_distribution<double> nd;
  Matrix m(rows, cols);
  for (Index j = 0; j < cols; ++j)
    for (Index i = 0; i < rows; ++i) m(i, j) = nd(rng);
  return m;
}

inline Matrix randomSymmetric(std::mt19937_64& rng, Index n) {
  Matrix g = randomMatrix(rng, n, n);
  return 0.5 * (g + g.transpose());
}

// G G^T / n + shift I
inline Matrix randomSpd(std::mt19937_64& rng, Index n, double shift = 1.0) {
  Matrix g = randomMatrix(rng, n, n);
  return g * g.transpose() / static_cast<double>(n) + shift * Matrix::Identity(n, n);
}

inline Matrix randomBandedSpd(std::mt19937_64& rng, Index n, Index b) {
  std::uniform_real_distribution<double> ud(-1.0, 1.0);
  Matrix m = Matrix::Zero(n, n);
  for (Index i = 0; i < n; ++i) {
    for (Index j = i + 1; j <= std::min(n - 1, i + b); ++j) m(i, j) = m(j, i) = ud(rng);
  }
  for (Index i = 0; i < n; ++i) m(i, i) = 2.0 * static_cast<double>(b) + 1.0 + ud(rng) * 0.5;
  return m;
}

// Symmetric positive definite Toeplitz: autocovariance of an MA process.
inline Vector randomToeplitzColumn(std::mt19937_64& rng, Index n) {
  std::uniform_real_distribution<double> ud(-1.0, 1.0);
  const Index q = std::min<Index>(n - 1, 4);
  Vector theta(q + 1);
  theta(0) = 1.0;
  for (Index k = 1; k <= q; ++k) theta(k) = 0.6 * ud(rng);
  Vector col = Vector::Zero(n);
  for (Index d = 0; d <= q; ++d)
    for (Index k = 0; k + d <= q; ++k) col(d) += theta(k) * theta(k + d);
  col(0) += 0.1;
  return col;
}

inline Matrix toeplitzDense(const Vector& col) {
  const Index n = col.size();
  Matrix m(n, n);
  for (Index i = 0; i < n; ++i)
    for (Index j = 0; j < n; ++j) m(i, j) = col(std::abs(i - j));
  return m;
}

}  // namespace testutil

#include "spdsplit/subspace.hpp"

namespace testutil {

struct Instance {
  Matrix a;
  spdsplit::SubspaceBasis s;
  std::vector<Matrix> dense;
};

// Random SPD A and a feasible S: zero-diagonal elements plus, optionally, one
// traceless diagonal element (I stays a certificate in S^perp).
inline Instance randomInstance(std::mt19937_64& rng, Index n, Index m, bool withDiagonal = false) {
  std::normal_distribution<double> nd;
  std::vector<spdsplit::SparseSymMatrix> els;
  std::vector<Matrix> dense;
  for (Index k = 0; k < m; ++k) {
    Matrix d = Matrix::Zero(n, n);
    if (withDiagonal && k == 0) {
      for (Index i = 0; i < n; ++i) d(i, i) = nd(rng);
      d.diagonal().array() -= d.diagonal().mean();
    } else {
      for (Index j = 0; j < n; ++j)
        for (Index i = 0; i < j; ++i) d(i, j) = d(j, i) = nd(rng);
    }
    dense.push_back(d);
    els.push_back(spdsplit::SparseSymMatrix::fromDense(d));
  }
  return {randomSpd(rng, n), spdsplit::SubspaceBasis(n, els), dense};
}

inline std::vector<Matrix> denseElements(const spdsplit::SubspaceBasis& s) {
  std::vector<Matrix> out;
  for (const auto& d : s.elements()) out.push_back(d.toDense());
  return out;
}

}  // namespace testutil
