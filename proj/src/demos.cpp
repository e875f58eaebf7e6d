#include "spdsplit/demos.hpp"

#include "spdsplit/errors.hpp"

#include <algorithm>
#include <cmath>
#include <random>

namespace spdsplit {

namespace {

constexpr Index kBlocks = 5;

Matrix gaussian(std::mt19937_64& rng, Index rows, Index cols) {
  std::normal_distribution<double> nd;
  Matrix g(rows, cols);
  for (Index j = 0; j < cols; ++j)
    for (Index i = 0; i < rows; ++i) g(i, j) = nd(rng);
  return g;
}

Matrix denseSpd(std::mt19937_64& rng, Index n) {
  const Matrix g = gaussian(rng, n, n);
  return g * g.transpose() / static_cast<double>(n) + Matrix::Identity(n, n);
}

DemoInstance smallSpan(Index n, std::mt19937_64& rng) {
  DemoInstance d;
  d.a = StructuredSpdMatrix::dense(denseSpd(rng, n));
  std::vector<SparseSymMatrix> elems;
  for (int k = 0; k < 5; ++k) {
    Matrix g = gaussian(rng, n, n);
    Matrix s = (g + g.transpose()) / std::sqrt(2.0 * static_cast<double>(n));
    s.diagonal().setZero();
    elems.push_back(SparseSymMatrix::fromDense(s));
  }
  d.basis = SubspaceBasis(n, std::move(elems));
  d.solveBasis = d.basis;
  d.method = Method::ExactNewton;
  return d;
}

DemoInstance dualDemo(Index n, std::mt19937_64& rng) {
  DemoInstance d;
  d.a = StructuredSpdMatrix::dense(denseSpd(rng, n));
  std::vector<SparseSymMatrix> elems;
  elems.reserve(static_cast<std::size_t>(n * n / 2));
  for (Index j = 0; j < n; ++j)
    for (Index i = j + 2; i < n; ++i) elems.push_back(SparseSymMatrix::unit(n, i, j));
  d.basis = SubspaceBasis(n, std::move(elems));
  d.solveBasis = d.basis;
  d.method = Method::Dual;
  return d;
}

DemoInstance groupDemo(Index n, std::mt19937_64& rng) {
  if (n % kBlocks != 0 || n / kBlocks < 2) {
    fail(ErrorCode::InvalidArgument, "example3 needs n divisible by 5 with blocks of size at least 2");
  }
  const Index bs = n / kBlocks;
  DemoInstance d;
  d.blockSize = bs;

  // A = E K E^T + diag(d_block): exchangeable inside each block
  const Matrix g = gaussian(rng, kBlocks, kBlocks);
  const Matrix k = g * g.transpose() / static_cast<double>(kBlocks) + 0.5 * Matrix::Identity(kBlocks, kBlocks);
  std::uniform_real_distribution<double> ud(1.0, 2.0);
  Matrix a(n, n);
  for (Index p = 0; p < kBlocks; ++p) {
    const double diag = ud(rng);
    for (Index q = 0; q < kBlocks; ++q) a.block(p * bs, q * bs, bs, bs).setConstant(k(p, q));
    a.block(p * bs, p * bs, bs, bs).diagonal().array() += diag;
  }
  d.a = StructuredSpdMatrix::dense(a);

  const auto& inactive = demoInactivePairs();
  std::vector<SparseSymMatrix> elems;
  for (Index p = 0; p < kBlocks; ++p) {
    for (Index q = p; q < kBlocks; ++q) {
      if (std::find(inactive.begin(), inactive.end(), std::make_pair(p, q)) != inactive.end()) continue;
      d.activePairs.emplace_back(p, q);
      for (Index i = 0; i < bs; ++i)
        for (Index j = (p == q ? i + 1 : 0); j < bs; ++j) elems.push_back(SparseSymMatrix::unit(n, p * bs + i, q * bs + j));
    }
  }
  d.basis = SubspaceBasis(n, std::move(elems));

  // generators of the within-block permutation group: a swap and a cycle per block
  std::vector<GroupAction::Permutation> gens;
  for (Index p = 0; p < kBlocks; ++p) {
    GroupAction::Permutation swap(static_cast<std::size_t>(n)), cycle(static_cast<std::size_t>(n));
    for (Index i = 0; i < n; ++i) swap[static_cast<std::size_t>(i)] = cycle[static_cast<std::size_t>(i)] = i;
    std::swap(swap[static_cast<std::size_t>(p * bs)], swap[static_cast<std::size_t>(p * bs + 1)]);
    for (Index i = 0; i < bs; ++i) cycle[static_cast<std::size_t>(p * bs + i)] = p * bs + (i + 1) % bs;
    gens.push_back(std::move(swap));
    gens.push_back(std::move(cycle));
  }
  d.group = GroupAction::fromPermutations(n, std::move(gens));
  d.solveBasis = fixedSubspace(d.basis, *d.group);
  d.method = Method::NewtonCG;
  return d;
}

DemoInstance bandedDemo(Index n, std::mt19937_64& rng) {
  if (n < 3) fail(ErrorCode::InvalidArgument, "example4 needs n >= 3");
  constexpr Index b = 2;
  std::uniform_real_distribution<double> off(-1.0, 1.0), slack(0.5, 1.5);
  Matrix a = Matrix::Zero(n, n);
  for (Index j = 0; j < n; ++j)
    for (Index i = j + 1; i <= std::min(n - 1, j + b); ++i) a(i, j) = a(j, i) = off(rng);
  for (Index i = 0; i < n; ++i) a(i, i) = a.row(i).cwiseAbs().sum() + slack(rng);
  DemoInstance d;
  d.a = StructuredSpdMatrix::bandedFromDense(a, b);
  std::vector<SparseSymMatrix> elems;
  for (Index off1 = 1; off1 <= b; ++off1)
    for (Index j = 0; j + off1 < n; ++j) elems.push_back(SparseSymMatrix::unit(n, j + off1, j));
  d.basis = SubspaceBasis(n, std::move(elems));
  d.solveBasis = d.basis;
  d.method = Method::NewtonCG;
  return d;
}

}  // namespace

const char* demoName(DemoKind k) {
  switch (k) {
    case DemoKind::SmallSpan: return "example1";
    case DemoKind::Dual: return "example2";
    case DemoKind::GroupInvariant: return "example3";
    case DemoKind::Banded: return "example4";
  }
  return "?";
}

std::optional<DemoKind> parseDemo(std::string_view name) {
  for (DemoKind k : {DemoKind::SmallSpan, DemoKind::Dual, DemoKind::GroupInvariant, DemoKind::Banded}) {
    if (name == demoName(k)) return k;
  }
  return std::nullopt;
}

const std::vector<std::pair<Index, Index>>& demoInactivePairs() {
  static const std::vector<std::pair<Index, Index>> pairs{{0, 3}, {1, 4}};
  return pairs;
}

DemoInstance makeDemo(DemoKind kind, Index n, std::uint64_t seed) {
  if (n < 2) fail(ErrorCode::InvalidArgument, "demo size must be at least 2");
  std::mt19937_64 rng(seed);
  DemoInstance d;
  switch (kind) {
    case DemoKind::SmallSpan: d = smallSpan(n, rng); break;
    case DemoKind::Dual: d = dualDemo(n, rng); break;
    case DemoKind::GroupInvariant: d = groupDemo(n, rng); break;
    case DemoKind::Banded: d = bandedDemo(n, rng); break;
  }
  d.kind = kind;
  return d;
}

}  // namespace spdsplit
