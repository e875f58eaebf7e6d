#include "doctest.h"
#include "helpers.hpp"

#include "spdsplit/errors.hpp"
#include "spdsplit/subspace.hpp"

#include <cmath>

using namespace spdsplit;
using namespace testutil;

namespace {

SubspaceBasis zeroDiagonalSpan(Index n) {
  std::vector<SparseSymMatrix> els;
  for (Index j = 0; j < n; ++j)
    for (Index i = 0; i < j; ++i) els.push_back(SparseSymMatrix::unit(n, i, j));
  return SubspaceBasis(n, els);
}

double maxCrossTrace(const SubspaceBasis& a, const SubspaceBasis& b) {
  double worst = 0.0;
  for (const auto& x : a.elements())
    for (const auto& y : b.elements()) worst = std::max(worst, std::abs(x.traceWith(y)));
  return worst;
}

}  // namespace

TEST_CASE("half vectorization is an isometry") {
  const Vector v = halfVectorize(Matrix(Matrix::Identity(2, 2)));
  CHECK(v.size() == 3);
  CHECK(v(0) == 1.0);
  CHECK(v(1) == 0.0);
  CHECK(v(2) == 1.0);
  const Vector w = halfVectorize(SparseSymMatrix::unit(2, 0, 1));
  CHECK(w(1) == doctest::Approx(std::sqrt(2.0)));
  CHECK(w.squaredNorm() == doctest::Approx(2.0));

  std::mt19937_64 rng(1);
  const Matrix x = randomSymmetric(rng, 5), y = randomSymmetric(rng, 5);
  CHECK(std::abs(halfVectorize(x).dot(halfVectorize(y)) - (x * y).trace()) < 1e-14 * (1 + x.norm() * y.norm()));
}

TEST_CASE("basis independence is certified") {
  CHECK_THROWS_AS(SubspaceBasis(2, {SparseSymMatrix::unit(2, 0, 1), SparseSymMatrix::unit(2, 0, 1, 3.0)}),
                  Error);
  Matrix a(2, 2), b(2, 2), c(2, 2);
  a << 1, 1, 1, 0;
  b << 0, 1, 1, 1;
  c << 1, 0, 0, -1;
  CHECK_THROWS_AS(SubspaceBasis(2, {SparseSymMatrix::fromDense(a), SparseSymMatrix::fromDense(b),
                                    SparseSymMatrix::fromDense(c)}),
                  Error);
  const SubspaceBasis ok(2, {SparseSymMatrix::fromDense(a), SparseSymMatrix::fromDense(b)});
  CHECK(ok.certificate().rank == 2);
  CHECK(ok.components().size() == 1);
  CHECK(ok.certificate().gramMinEigenvalue > 0.1);
}

TEST_CASE("complement basis") {
  SUBCASE("off-diagonal n=2") {
    const SubspaceBasis s(2, {SparseSymMatrix::unit(2, 0, 1)});
    const SubspaceBasis e = complementBasis(s);
    CHECK(e.size() == 2);
    for (const auto& el : e.elements()) CHECK(el.toDense()(0, 1) == 0.0);
  }
  SUBCASE("empty") {
    const SubspaceBasis s(2, {});
    CHECK(complementBasis(s).size() == 3);
  }
  SUBCASE("zero diagonal n=3") {
    const SubspaceBasis e = complementBasis(zeroDiagonalSpan(3));
    CHECK(e.size() == 3);
    for (const auto& el : e.elements()) CHECK(el.zeroDiagonal() == false);
    for (const auto& el : e.elements()) CHECK(el.halfBandwidth() == 0);
  }
  SUBCASE("random dense basis") {
    std::mt19937_64 rng(7);
    std::vector<SparseSymMatrix> els;
    for (int k = 0; k < 4; ++k) els.push_back(SparseSymMatrix::fromDense(randomSymmetric(rng, 5)));
    const SubspaceBasis s(5, els);
    const SubspaceBasis e = complementBasis(s);
    CHECK(static_cast<Index>(s.size() + e.size()) == 15);
    CHECK(maxCrossTrace(s, e) < 1e-10);
    for (std::size_t i = 0; i < e.size(); ++i)
      for (std::size_t j = 0; j < e.size(); ++j)
        CHECK(std::abs(e[i].traceWith(e[j]) - (i == j ? 1.0 : 0.0)) < 1e-12);
  }
}

TEST_CASE("projection") {
  std::mt19937_64 rng(9);
  std::vector<SparseSymMatrix> els;
  for (int k = 0; k < 3; ++k) els.push_back(SparseSymMatrix::fromDense(randomSymmetric(rng, 4)));
  els.push_back(SparseSymMatrix::unit(4, 1, 1, 2.0));
  const SubspaceBasis s(4, els);
  const Matrix x = randomSymmetric(rng, 4);
  const Matrix p = s.project(x);
  for (const auto& d : s.elements()) CHECK(std::abs(d.traceWith(Matrix(x - p))) < 1e-12);
  CHECK((s.project(p) - p).norm() < 1e-12);
}

TEST_CASE("fixed subspace") {
  SUBCASE("trivial group") {
    const SubspaceBasis s = zeroDiagonalSpan(4);
    CHECK(fixedSubspace(s, GroupAction::trivial(4)).size() == s.size());
  }
  SUBCASE("swap on n=2") {
    const SubspaceBasis s(2, {SparseSymMatrix::unit(2, 0, 1)});
    const GroupAction g = GroupAction::fromPermutations(2, {{0, 1}, {1, 0}});
    CHECK(fixedSubspace(s, g).size() == 1);
    Matrix swap(2, 2);
    swap << 0, 1, 1, 0;
    CHECK(fixedSubspace(s, GroupAction::fromMatrices({Matrix::Identity(2, 2), swap})).size() == 1);
  }
  SUBCASE("orbit sums agree with Reynolds averaging on a full group") {
    // S_3 acting on n=3, S = zero-diagonal span: fixed space is span{J - I}.
    const SubspaceBasis s = zeroDiagonalSpan(3);
    const std::vector<std::vector<Index>> perms{{0, 1, 2}, {1, 0, 2}, {0, 2, 1},
                                                {2, 1, 0}, {1, 2, 0}, {2, 0, 1}};
    const GroupAction gp = GroupAction::fromPermutations(3, perms);
    std::vector<Matrix> dense;
    for (std::size_t k = 0; k < perms.size(); ++k) dense.push_back(gp.denseElement(k));
    const SubspaceBasis fast = fixedSubspace(s, gp);
    const SubspaceBasis slow = fixedSubspace(s, GroupAction::fromMatrices(dense));
    CHECK(fast.size() == 1);
    CHECK(slow.size() == 1);
    const Matrix a = fast[0].toDense() / fast[0].frobeniusNorm();
    const Matrix b = slow[0].toDense() / slow[0].frobeniusNorm();
    CHECK(std::abs(std::abs((a * b).trace()) - 1.0) < 1e-12);
    CHECK(fixedSubspace(fast, gp).size() == 1);
  }
  SUBCASE("non-invariant subspace is rejected") {
    const SubspaceBasis s(3, {SparseSymMatrix::unit(3, 0, 1)});
    Matrix p = Matrix::Zero(3, 3);
    p(1, 0) = p(2, 1) = p(0, 2) = 1.0;
    CHECK_THROWS_AS(fixedSubspace(s, GroupAction::fromMatrices({Matrix::Identity(3, 3), p, Matrix(p * p)})),
                    Error);
  }
  SUBCASE("non-orthogonal element") {
    CHECK_THROWS_AS(GroupAction::fromMatrices({Matrix::Constant(2, 2, 1.0)}), Error);
  }
}

TEST_CASE("feasibility verdicts") {
  const FeasibilityVerdict z = checkFeasibility(zeroDiagonalSpan(5));
  CHECK(z.status == FeasibilityStatus::ProvenFeasible);

  const SubspaceBasis id(3, {SparseSymMatrix::fromDense(Matrix::Identity(3, 3))});
  const FeasibilityVerdict inf = checkFeasibility(id);
  REQUIRE(inf.status == FeasibilityStatus::ProvenInfeasible);
  CHECK(std::abs(inf.witness->norm() - 1.0) < 1e-12);
  Eigen::SelfAdjointEigenSolver<Matrix> es(*inf.witness);
  CHECK(es.eigenvalues()(0) >= -1e-10);

  Matrix d(2, 2);
  d << 1, 0, 0, -1;
  const FeasibilityVerdict f = checkFeasibility(SubspaceBasis(2, {SparseSymMatrix::fromDense(d)}));
  REQUIRE(f.status == FeasibilityStatus::ProvenFeasible);
  CHECK((*f.witness - Matrix::Identity(2, 2)).norm() < 1e-14);
}
