#include "spdsplit/subspace.hpp"

#include "spdsplit/errors.hpp"
#include "spdsplit/log.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <numeric>
#include <string>
#include <unordered_map>

namespace spdsplit {

namespace {

constexpr double kSqrt2 = 1.4142135623730951;

class UnionFind {
 public:
  explicit UnionFind(std::size_t n) : parent_(n) { std::iota(parent_.begin(), parent_.end(), 0); }
  std::size_t find(std::size_t a) {
    while (parent_[a] != a) {
      parent_[a] = parent_[parent_[a]];
      a = parent_[a];
    }
    return a;
  }
  void unite(std::size_t a, std::size_t b) {
    a = find(a);
    b = find(b);
    if (a != b) parent_[std::max(a, b)] = std::min(a, b);
  }

 private:
  std::vector<std::size_t> parent_;
};

IndexPair positionFromHalfIndex(Index k) {
  Index j = static_cast<Index>((std::sqrt(8.0 * static_cast<double>(k) + 1.0) - 1.0) / 2.0);
  while (j * (j + 1) / 2 > k) --j;
  while ((j + 1) * (j + 2) / 2 <= k) ++j;
  return {k - j * (j + 1) / 2, j};
}

double minEigenvalue(const Matrix& m) {
  if (m.rows() == 0) return 0.0;
  Eigen::SelfAdjointEigenSolver<Matrix> es(m, Eigen::EigenvaluesOnly);
  return es.eigenvalues()(0);
}

double maxEigenvalue(const Matrix& m) {
  if (m.rows() == 0) return 0.0;
  Eigen::SelfAdjointEigenSolver<Matrix> es(m, Eigen::EigenvaluesOnly);
  return es.eigenvalues()(m.rows() - 1);
}

SparseSymMatrix fromHalfVector(Index n, std::span<const Index> positions, const Vector& values,
                               double dropTolerance) {
  std::vector<SparseEntry> entries;
  for (std::size_t p = 0; p < positions.size(); ++p) {
    const double v = values(static_cast<Index>(p));
    if (std::abs(v) <= dropTolerance) continue;
    const auto [i, j] = positionFromHalfIndex(positions[p]);
    entries.push_back({i, j, i == j ? v : v / kSqrt2});
  }
  return SparseSymMatrix(n, std::move(entries));
}

std::size_t hashEntries(const SparseSymMatrix& d) {
  std::size_t h = 1469598103934665603ull;
  for (const auto& e : d.entries()) {
    h ^= static_cast<std::size_t>(e.row) * 0x9E3779B97F4A7C15ull;
    h = (h << 7) | (h >> 57);
    h ^= static_cast<std::size_t>(e.col) * 0xC2B2AE3D27D4EB4Full;
    h = (h << 11) | (h >> 53);
    h ^= std::bit_cast<std::uint64_t>(e.value);
    h *= 1099511628211ull;
  }
  return h;
}

}  // namespace

Index halfVectorIndex(Index i, Index j) {
  if (i > j) std::swap(i, j);
  return j * (j + 1) / 2 + i;
}

Vector halfVectorize(const SparseSymMatrix& x) {
  const Index n = x.dim();
  Vector v = Vector::Zero(n * (n + 1) / 2);
  for (const auto& e : x.entries()) {
    v(halfVectorIndex(e.row, e.col)) = e.row == e.col ? e.value : kSqrt2 * e.value;
  }
  return v;
}

Vector halfVectorize(const Matrix& x) {
  const Index n = x.rows();
  Vector v(n * (n + 1) / 2);
  for (Index j = 0; j < n; ++j) {
    for (Index i = 0; i <= j; ++i) {
      v(halfVectorIndex(i, j)) = i == j ? x(i, i) : kSqrt2 * 0.5 * (x(i, j) + x(j, i));
    }
  }
  return v;
}

// ---------------------------------------------------------------------------
// SubspaceBasis

SubspaceBasis::SubspaceBasis(Index n, std::vector<SparseSymMatrix> elements)
    : n_(n), elements_(std::move(elements)) {
  const std::size_t m = elements_.size();
  if (static_cast<Index>(m) > n * (n + 1) / 2) {
    fail(ErrorCode::RankDeficientBasis, "more basis elements than n(n+1)/2");
  }
  norms_.reserve(m);
  for (std::size_t k = 0; k < m; ++k) {
    const auto& d = elements_[k];
    if (d.dim() != n) {
      fail(ErrorCode::DimensionMismatch, "basis element " + std::to_string(k) + " has dimension " +
                                             std::to_string(d.dim()) + ", expected " +
                                             std::to_string(n));
    }
    const double nrm = d.frobeniusNorm();
    if (!(nrm > 0.0)) fail(ErrorCode::RankDeficientBasis, "basis element " + std::to_string(k) + " is zero");
    norms_.push_back(nrm);
    allZeroDiagonal_ = allZeroDiagonal_ && d.zeroDiagonal();
    maxHalfBandwidth_ = std::max(maxHalfBandwidth_, d.halfBandwidth());
  }

  // Link elements sharing a position.
  UnionFind uf(m);
  std::unordered_map<Index, std::size_t> owner;
  for (std::size_t k = 0; k < m; ++k) {
    for (const auto& e : elements_[k].entries()) {
      auto [it, inserted] = owner.emplace(halfVectorIndex(e.row, e.col), k);
      if (!inserted) uf.unite(k, it->second);
    }
  }
  std::unordered_map<std::size_t, std::size_t> componentOf;
  for (std::size_t k = 0; k < m; ++k) {
    const std::size_t root = uf.find(k);
    auto [it, inserted] = componentOf.emplace(root, components_.size());
    if (inserted) components_.emplace_back();
    components_[it->second].members.push_back(k);
  }
  for (const auto& [pos, k] : owner) components_[componentOf.at(uf.find(k))].positions.push_back(pos);

  certificate_.rank = 0;
  certificate_.gramMinEigenvalue = m == 0 ? 1.0 : std::numeric_limits<double>::infinity();
  for (auto& comp : components_) {
    std::sort(comp.positions.begin(), comp.positions.end());
    const Index mc = static_cast<Index>(comp.members.size());
    Matrix gram(mc, mc);
    for (Index a = 0; a < mc; ++a) {
      for (Index b = 0; b <= a; ++b) {
        gram(a, b) = gram(b, a) = elements_[comp.members[a]].traceWith(elements_[comp.members[b]]);
      }
    }
    double minEig = 1.0;
    if (mc > 1) {
      Matrix normalizedGram = gram;
      for (Index a = 0; a < mc; ++a) {
        for (Index b = 0; b < mc; ++b) {
          normalizedGram(a, b) /= norms_[comp.members[a]] * norms_[comp.members[b]];
        }
      }
      minEig = minEigenvalue(normalizedGram);
    }
    certificate_.gramMinEigenvalue = std::min(certificate_.gramMinEigenvalue, minEig);
    if (!(minEig > 1e-10)) {
      fail(ErrorCode::RankDeficientBasis,
           "basis elements are linearly dependent (Gram minimum eigenvalue " +
               std::to_string(minEig) + ")");
    }
    certificate_.rank += mc;
    comp.gram.compute(gram);
  }
}

Index SubspaceBasis::complementDim() const {
  return n_ * (n_ + 1) / 2 - static_cast<Index>(elements_.size());
}

SubspaceBasis SubspaceBasis::normalized() const {
  SubspaceBasis out = *this;
  for (std::size_t k = 0; k < elements_.size(); ++k) {
    out.elements_[k] = elements_[k].scaled(1.0 / norms_[k]);
    out.norms_[k] = 1.0;
  }
  for (auto& comp : out.components_) {
    const Index mc = static_cast<Index>(comp.members.size());
    Matrix gram(mc, mc);
    for (Index a = 0; a < mc; ++a) {
      for (Index b = 0; b <= a; ++b) {
        gram(a, b) = gram(b, a) =
            out.elements_[comp.members[a]].traceWith(out.elements_[comp.members[b]]);
      }
    }
    comp.gram.compute(gram);
  }
  return out;
}

SparseSymMatrix SubspaceBasis::combination(std::span<const double> x) const {
  if (x.size() != elements_.size()) fail(ErrorCode::DimensionMismatch, "combination: coefficient count");
  return linearCombination(elements_, x, n_);
}

Vector SubspaceBasis::traces(const Matrix& y) const {
  Vector t(static_cast<Index>(elements_.size()));
  for (std::size_t k = 0; k < elements_.size(); ++k) t(static_cast<Index>(k)) = elements_[k].traceWith(y);
  return t;
}

Vector SubspaceBasis::projectCoefficients(const Matrix& x) const {
  if (x.rows() != n_ || x.cols() != n_) fail(ErrorCode::DimensionMismatch, "project: size");
  const Vector b = traces(x);
  Vector c(b.size());
  for (const auto& comp : components_) {
    Vector local(static_cast<Index>(comp.members.size()));
    for (std::size_t a = 0; a < comp.members.size(); ++a) local(static_cast<Index>(a)) = b(static_cast<Index>(comp.members[a]));
    const Vector sol = comp.gram.solve(local);
    for (std::size_t a = 0; a < comp.members.size(); ++a) c(static_cast<Index>(comp.members[a])) = sol(static_cast<Index>(a));
  }
  return c;
}

Matrix SubspaceBasis::project(const Matrix& x) const {
  const Vector c = projectCoefficients(x);
  Matrix out = Matrix::Zero(n_, n_);
  for (std::size_t k = 0; k < elements_.size(); ++k) elements_[k].addTo(out, c(static_cast<Index>(k)));
  return out;
}

// ---------------------------------------------------------------------------
// GroupAction

GroupAction GroupAction::fromPermutations(Index n, std::vector<Permutation> perms) {
  GroupAction g;
  g.n_ = n;
  for (auto& p : perms) {
    if (static_cast<Index>(p.size()) != n) fail(ErrorCode::DimensionMismatch, "permutation length");
    std::vector<bool> seen(static_cast<std::size_t>(n), false);
    for (Index v : p) {
      if (v < 0 || v >= n || seen[static_cast<std::size_t>(v)]) {
        fail(ErrorCode::InvalidArgument, "not a permutation of 0..n-1");
      }
      seen[static_cast<std::size_t>(v)] = true;
    }
    g.elements_.emplace_back(std::move(p));
  }
  return g;
}

GroupAction GroupAction::fromMatrices(std::vector<Matrix> matrices) {
  GroupAction g;
  for (auto& p : matrices) {
    if (p.rows() != p.cols()) fail(ErrorCode::DimensionMismatch, "group element not square");
    if (g.elements_.empty()) g.n_ = p.rows();
    if (p.rows() != g.n_) fail(ErrorCode::DimensionMismatch, "group element size");
    const double dev = (p.transpose() * p - Matrix::Identity(p.rows(), p.cols())).norm();
    if (dev > 1e-12) {
      fail(ErrorCode::NotOrthogonal, "group element is not orthogonal (||P^T P - I|| = " +
                                         std::to_string(dev) + ")");
    }
    g.elements_.emplace_back(std::move(p));
  }
  return g;
}

GroupAction GroupAction::trivial(Index n) {
  Permutation id(static_cast<std::size_t>(n));
  std::iota(id.begin(), id.end(), Index{0});
  return fromPermutations(n, {id});
}

bool GroupAction::allPermutations() const {
  return std::all_of(elements_.begin(), elements_.end(),
                     [](const Element& e) { return std::holds_alternative<Permutation>(e); });
}

Matrix GroupAction::denseElement(std::size_t k) const {
  if (const auto* p = std::get_if<Permutation>(&elements_[k])) {
    Matrix m = Matrix::Zero(n_, n_);
    for (Index i = 0; i < n_; ++i) m((*p)[static_cast<std::size_t>(i)], i) = 1.0;
    return m;
  }
  return std::get<Matrix>(elements_[k]);
}

Matrix GroupAction::conjugate(std::size_t k, const Matrix& x) const {
  if (const auto* p = std::get_if<Permutation>(&elements_[k])) {
    Matrix y(n_, n_);
    for (Index j = 0; j < n_; ++j) {
      for (Index i = 0; i < n_; ++i) y((*p)[i], (*p)[j]) = x(i, j);
    }
    return y;
  }
  const Matrix& pm = std::get<Matrix>(elements_[k]);
  return pm * x * pm.transpose();
}

SparseSymMatrix GroupAction::conjugate(std::size_t k, const SparseSymMatrix& x) const {
  if (const auto* p = std::get_if<Permutation>(&elements_[k])) return x.permuted(*p);
  const Matrix y = conjugate(k, x.toDense());
  return SparseSymMatrix::fromDense(y, 1e-14 * std::max(1.0, x.frobeniusNorm()));
}

Matrix GroupAction::reynolds(const Matrix& x) const {
  Matrix acc = Matrix::Zero(x.rows(), x.cols());
  for (std::size_t k = 0; k < elements_.size(); ++k) acc += conjugate(k, x);
  return acc / static_cast<double>(std::max<std::size_t>(elements_.size(), 1));
}

// ---------------------------------------------------------------------------
// Complement, fixed subspace, conjugation

SubspaceBasis complementBasis(const SubspaceBasis& s) {
  const Index n = s.ambientDim();
  const Index total = n * (n + 1) / 2;
  std::vector<bool> covered(static_cast<std::size_t>(total), false);
  for (const auto& comp : s.components()) {
    for (Index p : comp.positions) covered[static_cast<std::size_t>(p)] = true;
  }
  std::vector<SparseSymMatrix> out;
  out.reserve(static_cast<std::size_t>(s.complementDim()));
  for (Index p = 0; p < total; ++p) {
    if (covered[static_cast<std::size_t>(p)]) continue;
    const auto [i, j] = positionFromHalfIndex(p);
    out.push_back(SparseSymMatrix::unit(n, i, j, i == j ? 1.0 : 1.0 / kSqrt2));
  }
  for (const auto& comp : s.components()) {
    const Index rows = static_cast<Index>(comp.positions.size());
    const Index mc = static_cast<Index>(comp.members.size());
    if (rows == mc) continue;
    std::unordered_map<Index, Index> local;
    for (Index r = 0; r < rows; ++r) local.emplace(comp.positions[static_cast<std::size_t>(r)], r);
    Matrix v = Matrix::Zero(rows, mc);
    for (Index a = 0; a < mc; ++a) {
      for (const auto& e : s[comp.members[static_cast<std::size_t>(a)]].entries()) {
        v(local.at(halfVectorIndex(e.row, e.col)), a) = e.row == e.col ? e.value : kSqrt2 * e.value;
      }
    }
    Eigen::HouseholderQR<Matrix> qr(v);
    const auto q = qr.householderQ();
    for (Index k = mc; k < rows; ++k) {
      Vector col = q * Vector::Unit(rows, k);
      out.push_back(fromHalfVector(n, comp.positions, col, 1e-15));
    }
  }
  return SubspaceBasis(n, std::move(out));
}

namespace {

std::optional<SubspaceBasis> orbitSumFixedSubspace(const SubspaceBasis& s, const GroupAction& g) {
  const std::size_t m = s.size();
  std::unordered_multimap<std::size_t, std::size_t> byHash;
  for (std::size_t k = 0; k < m; ++k) byHash.emplace(hashEntries(s[k]), k);
  UnionFind uf(m);
  for (std::size_t gi = 0; gi < g.size(); ++gi) {
    const auto& perm = std::get<GroupAction::Permutation>(g.element(gi));
    for (std::size_t k = 0; k < m; ++k) {
      const SparseSymMatrix image = s[k].permuted(perm);
      const auto [lo, hi] = byHash.equal_range(hashEntries(image));
      std::optional<std::size_t> match;
      for (auto it = lo; it != hi; ++it) {
        if (s[it->second] == image) {
          match = it->second;
          break;
        }
      }
      if (!match) return std::nullopt;
      uf.unite(k, *match);
    }
  }
  std::unordered_map<std::size_t, std::size_t> orbitOf;
  std::vector<std::vector<std::size_t>> orbits;
  for (std::size_t k = 0; k < m; ++k) {
    auto [it, inserted] = orbitOf.emplace(uf.find(k), orbits.size());
    if (inserted) orbits.emplace_back();
    orbits[it->second].push_back(k);
  }
  std::vector<SparseSymMatrix> sums;
  sums.reserve(orbits.size());
  for (const auto& orbit : orbits) {
    std::vector<SparseSymMatrix> terms;
    for (std::size_t k : orbit) terms.push_back(s[k]);
    const std::vector<double> ones(terms.size(), 1.0);
    sums.push_back(linearCombination(terms, ones, s.ambientDim()));
  }
  return SubspaceBasis(s.ambientDim(), std::move(sums));
}

}  // namespace

SubspaceBasis fixedSubspace(const SubspaceBasis& s, const GroupAction& g) {
  if (g.size() > 0 && g.dim() != s.ambientDim()) {
    fail(ErrorCode::DimensionMismatch, "group acts on a different dimension");
  }
  if (s.empty() || g.size() == 0) return s;
  if (g.allPermutations()) {
    if (auto fast = orbitSumFixedSubspace(s, g)) {
      logger().debug("fixed subspace via orbit sums: m = {}, m_G = {}", s.size(), fast->size());
      return *fast;
    }
  }

  const Index n = s.ambientDim();
  std::vector<Index> positions;
  for (const auto& comp : s.components()) {
    positions.insert(positions.end(), comp.positions.begin(), comp.positions.end());
  }
  std::sort(positions.begin(), positions.end());
  std::vector<Matrix> images;
  Matrix v(static_cast<Index>(positions.size()), static_cast<Index>(s.size()));
  for (std::size_t k = 0; k < s.size(); ++k) {
    Matrix r = g.reynolds(s[k].toDense());
    const Matrix residual = r - s.project(r);
    if (residual.norm() > 1e-8 * std::max(1.0, r.norm())) {
      fail(ErrorCode::NotInvariantSubspace,
           "Reynolds image of basis element " + std::to_string(k) + " leaves the subspace");
    }
    const Vector hv = halfVectorize(r);
    for (std::size_t p = 0; p < positions.size(); ++p) v(static_cast<Index>(p), static_cast<Index>(k)) = hv(positions[p]);
    images.push_back(std::move(r));
  }
  Eigen::ColPivHouseholderQR<Matrix> qr(v);
  qr.setThreshold(1e-10);
  const Index rank = qr.rank();
  std::vector<SparseSymMatrix> out;
  for (Index k = 0; k < rank; ++k) {
    const Matrix& r = images[static_cast<std::size_t>(qr.colsPermutation().indices()(k))];
    out.push_back(SparseSymMatrix::fromDense(r, 1e-14 * std::max(1.0, r.norm())));
  }
  return SubspaceBasis(n, std::move(out));
}

SubspaceBasis conjugateBasis(const SubspaceBasis& s, const Matrix& p) {
  const GroupAction g = GroupAction::fromMatrices({p});
  std::vector<SparseSymMatrix> out;
  out.reserve(s.size());
  for (const auto& d : s.elements()) out.push_back(g.conjugate(0, d));
  return SubspaceBasis(s.ambientDim(), std::move(out));
}

SubspaceBasis permuteBasis(const SubspaceBasis& s, std::span<const Index> perm) {
  std::vector<SparseSymMatrix> out;
  out.reserve(s.size());
  for (const auto& d : s.elements()) out.push_back(d.permuted(perm));
  return SubspaceBasis(s.ambientDim(), std::move(out));
}

// ---------------------------------------------------------------------------
// Feasibility

const char* feasibilityStatusName(FeasibilityStatus s) {
  switch (s) {
    case FeasibilityStatus::ProvenFeasible: return "ProvenFeasible";
    case FeasibilityStatus::ProvenInfeasible: return "ProvenInfeasible";
    case FeasibilityStatus::Unknown: return "Unknown";
  }
  return "Unknown";
}

FeasibilityVerdict checkFeasibility(const SubspaceBasis& s) {
  const Index n = s.ambientDim();
  const Matrix eye = Matrix::Identity(n, n);
  if (s.allZeroDiagonal()) return {FeasibilityStatus::ProvenFeasible, eye};

  // Projection of I onto the complement; SPD means a certificate.
  const Matrix projected = s.project(eye);
  const Matrix witness = eye - projected;
  const double scale = std::max(1.0, witness.norm());
  if (minEigenvalue(witness) > 1e-12 * scale) {
    double worst = 0.0;
    for (std::size_t k = 0; k < s.size(); ++k) {
      worst = std::max(worst, std::abs(s[k].traceWith(witness)) / s.norms()[k]);
    }
    if (worst <= 1e-10 * scale) return {FeasibilityStatus::ProvenFeasible, witness};
  }

  auto semidefiniteWitness = [](const Matrix& h) -> std::optional<Matrix> {
    const double nrm = h.norm();
    if (!(nrm > 0.0)) return std::nullopt;
    const Matrix unit = h / nrm;
    if (minEigenvalue(unit) >= -1e-12) return unit;
    if (maxEigenvalue(unit) <= 1e-12) return Matrix(-unit);
    return std::nullopt;
  };

  for (std::size_t k = 0; k < s.size(); ++k) {
    const auto& d = s[k];
    if (d.zeroDiagonal()) continue;
    bool pos = false, neg = false;
    for (const auto& e : d.entries()) {
      if (e.row == e.col) {
        pos = pos || e.value > 0.0;
        neg = neg || e.value < 0.0;
      }
    }
    if (pos && neg) continue;
    if (auto w = semidefiniteWitness(d.toDense())) return {FeasibilityStatus::ProvenInfeasible, *w};
  }
  if (auto w = semidefiniteWitness(projected)) return {FeasibilityStatus::ProvenInfeasible, *w};
  return {FeasibilityStatus::Unknown, std::nullopt};
}

}  // namespace spdsplit
