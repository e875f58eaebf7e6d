#include "doctest.h"
#include "helpers.hpp"
#include "oracle/oracle.hpp"

#include "spdsplit/dual_solver.hpp"
#include "spdsplit/errors.hpp"
#include "spdsplit/primal_solver.hpp"

#include <cmath>

using namespace spdsplit;
using namespace testutil;

namespace {

Matrix twoByTwo() {
  Matrix a(2, 2);
  a << 2, 1, 1, 2;
  return a;
}

SubspaceBasis offdiagSpan() { return SubspaceBasis(2, {SparseSymMatrix::unit(2, 0, 1)}); }

Vector scalar(double v) { return Vector::Constant(1, v); }

}  // namespace

TEST_CASE("evaluatePhiGrad on small cases") {
  const auto a = StructuredSpdMatrix::dense(twoByTwo());
  const PrimalState s0 = evaluatePhiGrad(a, offdiagSpan(), scalar(0.0));
  CHECK(s0.phi == doctest::Approx(-std::log(3.0)).epsilon(1e-14));
  CHECK(s0.grad(0) == doctest::Approx(-2.0 / 3.0).epsilon(1e-14));
  const PrimalState s1 = evaluatePhiGrad(a, offdiagSpan(), scalar(1.0));
  CHECK(s1.phi == doctest::Approx(-std::log(4.0)).epsilon(1e-14));
  CHECK(std::abs(s1.grad(0)) < 1e-15);

  const PrimalState id = evaluatePhiGrad(StructuredSpdMatrix::dense(Matrix::Identity(2, 2)), offdiagSpan(), scalar(0));
  CHECK(id.phi == 0.0);
  CHECK(id.grad(0) == 0.0);
  CHECK(hvProduct(id, offdiagSpan(), scalar(1.0))(0) == doctest::Approx(2.0));
  CHECK(exactHessian(id, offdiagSpan())(0, 0) == doctest::Approx(2.0));
  CHECK(hvProduct(s0, offdiagSpan(), scalar(1.0))(0) == doctest::Approx(10.0 / 9.0).epsilon(1e-14));
  CHECK(exactHessian(s0, offdiagSpan())(0, 0) == doctest::Approx(10.0 / 9.0).epsilon(1e-14));

  CHECK_THROWS_AS(evaluatePhiGrad(a, offdiagSpan(), scalar(4.0)), Error);
}

TEST_CASE("line search") {
  const auto eye = StructuredSpdMatrix::dense(Matrix::Identity(2, 2));
  const PrimalState s = evaluatePhiGrad(eye, offdiagSpan(), scalar(0.0));
  SUBCASE("zero direction keeps the state") {
    const PrimalLineSearch ls = lineSearch(eye, offdiagSpan(), s, scalar(0.0));
    CHECK(ls.t == 1.0);
    CHECK(ls.next.x(0) == 0.0);
  }
  SUBCASE("infeasible trials are halved until |t d| < 1") {
    const auto a = StructuredSpdMatrix::dense(twoByTwo());
    const PrimalState s0 = evaluatePhiGrad(a, offdiagSpan(), scalar(0.0));
    const PrimalLineSearch ls = lineSearch(a, offdiagSpan(), s0, scalar(40.0));
    REQUIRE(ls.trials.size() >= 5);
    for (int i = 0; i < 4; ++i) CHECK_FALSE(ls.trials[static_cast<std::size_t>(i)].feasible);
    CHECK(ls.trials[4].feasible);
    CHECK(ls.trials[4].t == 1.0 / 16.0);
    CHECK(ls.next.phi < s0.phi);
  }
  SUBCASE("first feasible trial for d = 10 at the identity") {
    SolverOptions opts;
    opts.maxBacktracks = 4;
    try {
      lineSearch(eye, offdiagSpan(), s, scalar(10.0), opts);
      FAIL("expected a line-search failure: d is not a descent direction at a stationary point");
    } catch (const Error& e) {
      CHECK(e.code() == ErrorCode::LineSearchFailure);
    }
  }
}

TEST_CASE("canonical instance, all methods") {
  const auto a = StructuredSpdMatrix::dense(twoByTwo());
  for (Method m : {Method::NewtonCG, Method::ExactNewton, Method::Dual}) {
    SolverOptions opts;
    opts.method = m;
    const DecompositionResult r = decompose(a, offdiagSpan(), opts);
    CHECK(std::abs(r.x(0) - 1.0) < 1e-10);
    CHECK((r.cStar.toDense() - (Matrix(2, 2) << 0, 1, 1, 0).finished()).norm() < 1e-10);
    CHECK((r.bStar - 0.5 * Matrix::Identity(2, 2)).norm() < 1e-10);
    CHECK(std::abs(r.phiStar + std::log(4.0)) < 1e-10);
    CHECK(r.reconstructionError <= 1e-12);
  }
  const auto o = oracle::bruteForceMinimize(twoByTwo(), denseElements(offdiagSpan()));
  CHECK(std::abs(o.x(0) - 1.0) < 1e-8);

  // Exact Newton takes full steps throughout.
  const DecompositionResult r = exactNewton(a, offdiagSpan());
  CHECK(r.iterations <= 6);
}

TEST_CASE("identity matrix with zero-diagonal subspace") {
  std::mt19937_64 rng(2);
  const Instance inst = randomInstance(rng, 5, 3);
  const DecompositionResult r = newtonCg(StructuredSpdMatrix::dense(Matrix::Identity(5, 5)), inst.s);
  CHECK(r.iterations == 0);
  CHECK(r.x.norm() == 0.0);
  CHECK((r.bStar - Matrix::Identity(5, 5)).norm() == 0.0);
}

TEST_CASE("derivatives against the oracle") {
  std::mt19937_64 rng(11);
  for (int trial = 0; trial < 10; ++trial) {
    const Instance inst = randomInstance(rng, 8, 3, trial % 2 == 0);
    const auto a = StructuredSpdMatrix::dense(inst.a);
    Vector x = 0.05 * randomMatrix(rng, 3, 1);
    const PrimalState st = evaluatePhiGrad(a, inst.s, x);
    CHECK(std::abs(st.phi - oracle::phi(inst.a, inst.dense, x)) < 1e-10);
    const Vector gfd = oracle::finiteDiffGradient(inst.a, inst.dense, x);
    CHECK((gfd - st.grad).norm() <= 1e-6 * st.grad.norm());
    const Matrix h = exactHessian(st, inst.s);
    CHECK((oracle::finiteDiffHessian(inst.a, inst.dense, x) - h).norm() <= 1e-5 * std::max(1.0, h.norm()));
    Eigen::SelfAdjointEigenSolver<Matrix> es(h);
    CHECK(es.eigenvalues()(0) > 0.0);
    const Vector p = randomMatrix(rng, 3, 1);
    CHECK((hvProduct(st, inst.s, p) - h * p).norm() <= 1e-10 * std::max(1.0, (h * p).norm()));
  }
}

TEST_CASE("solvers agree with each other and the oracle") {
  std::mt19937_64 rng(13);
  for (int trial = 0; trial < 6; ++trial) {
    const Instance inst = randomInstance(rng, 5, 3, trial % 3 == 0);
    const auto a = StructuredSpdMatrix::dense(inst.a);
    const DecompositionResult cg = newtonCg(a, inst.s);
    const DecompositionResult ex = exactNewton(a, inst.s);
    const DecompositionResult du = dualNewtonCg(a, inst.s);
    const auto o = oracle::bruteForceMinimize(inst.a, inst.dense);
    CHECK((cg.x - ex.x).norm() < 1e-6);
    CHECK((cg.x - o.x).norm() < 1e-6);
    CHECK(o.phi <= cg.phiStar + 1e-9);
    CHECK((du.bStar - cg.bStar).norm() <= 1e-6 * cg.bStar.norm());
    CHECK(std::abs((inst.a.cwiseProduct(cg.bStar)).sum() - 5.0) < 1e-8);
    CHECK(std::abs((inst.a.cwiseProduct(du.bStar)).sum() - 5.0) < 1e-8);
    CHECK(du.projectionResidual <= 1e-8);
    CHECK(cg.orthogonalityResidual <= 1e-7);
    CHECK(cg.reconstructionError <= 1e-10);
    // Strong duality bookkeeping: Psi* = Phi* - n.
    CHECK(std::abs(du.psiStar - (cg.phiStar - 5.0)) < 1e-8);
    for (std::size_t i = 1; i < cg.phiHistory.size(); ++i) CHECK(cg.phiHistory[i] < cg.phiHistory[i - 1] + 1e-13);
  }
}

TEST_CASE("warm starts reach the same point") {
  std::mt19937_64 rng(19);
  const Instance inst = randomInstance(rng, 6, 4);
  const auto a = StructuredSpdMatrix::dense(inst.a);
  const DecompositionResult ref = newtonCg(a, inst.s);
  for (int trial = 0; trial < 5; ++trial) {
    Vector x0 = 3.0 * randomMatrix(rng, 4, 1);
    while (!std::isfinite(oracle::phi(inst.a, inst.dense, x0))) x0 *= 0.5;
    const DecompositionResult r = solvePrimal(a, inst.s, {}, Method::NewtonCG, x0);
    CHECK((r.x - ref.x).norm() < 1e-6);
  }
}

TEST_CASE("infeasible subspaces are caught") {
  const auto eye = StructuredSpdMatrix::dense(Matrix::Identity(3, 3));
  const SubspaceBasis s(3, {SparseSymMatrix::fromDense(Matrix::Identity(3, 3))});
  try {
    newtonCg(eye, s);
    FAIL("expected an error");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::ProvenInfeasibleSubspace);
  }
  SolverOptions opts;
  opts.checkFeasibility = false;
  for (Method m : {Method::NewtonCG, Method::ExactNewton}) {
    try {
      solvePrimal(eye, s, opts, m);
      FAIL("expected an error");
    } catch (const Error& e) {
      CHECK(e.code() == ErrorCode::SuspectedInfeasibleSubspace);
    }
  }
  Matrix notPd(2, 2);
  notPd << 1, 2, 2, 1;
  try {
    newtonCg(StructuredSpdMatrix::dense(notPd), offdiagSpan());
    FAIL("expected an error");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::Infeasible);
  }
}

TEST_CASE("local convergence of exact Newton is quadratic") {
  std::mt19937_64 rng(29);
  const Instance inst = randomInstance(rng, 10, 4);
  const DecompositionResult r = exactNewton(StructuredSpdMatrix::dense(inst.a), inst.s);
  const auto& g = r.gradNormHistory;
  REQUIRE(g.size() >= 3);
  for (std::size_t i = g.size() - 3; i + 1 < g.size(); ++i) {
    if (g[i] < 1e-2 && g[i + 1] > 1e-14) CHECK(std::log(g[i + 1]) <= 2.0 * std::log(g[i]) + 3.0);
  }
}

TEST_CASE("dual operations") {
  const auto eye = StructuredSpdMatrix::dense(Matrix::Identity(2, 2));
  const SubspaceBasis comp = complementBasis(offdiagSpan());
  CHECK((initialDualPoint(eye, offdiagSpan()) - Matrix::Identity(2, 2)).norm() < 1e-15);
  Matrix d(2, 2);
  d << 1, 0, 0, -1;
  CHECK((initialDualPoint(eye, SubspaceBasis(2, {SparseSymMatrix::fromDense(d)})) - Matrix::Identity(2, 2)).norm() <
        1e-15);

  const DualState s0 = evaluatePsiGrad(eye, comp, Matrix::Identity(2, 2), Vector::Zero(2));
  CHECK(s0.psi == doctest::Approx(-2.0));
  CHECK(s0.grad.norm() < 1e-15);
  const DualState s1 = evaluatePsiGrad(StructuredSpdMatrix::dense(twoByTwo()), comp, Matrix::Identity(2, 2), Vector::Zero(2));
  CHECK(s1.grad(0) == doctest::Approx(-1.0));
  CHECK(s1.grad(1) == doctest::Approx(-1.0));
  const DualState s2 =
      evaluatePsiGrad(StructuredSpdMatrix::dense(twoByTwo()), comp, Matrix::Identity(2, 2), Vector::Constant(2, -0.5));
  CHECK(s2.grad.norm() < 1e-14);
  CHECK((dualHvProduct(s0, comp, Vector::Unit(2, 0)) - Vector::Unit(2, 0)).norm() < 1e-15);
  CHECK((dualHvProduct(s2, comp, Vector::Unit(2, 1)) - 4.0 * Vector::Unit(2, 1)).norm() < 1e-14);

  // Finite differences of the dual gradient.
  std::mt19937_64 rng(41);
  const Instance inst = randomInstance(rng, 6, 5);
  const SubspaceBasis c = complementBasis(inst.s);
  const auto a = StructuredSpdMatrix::dense(inst.a);
  const Matrix b0 = initialDualPoint(a, inst.s);
  const Vector y = 0.01 * randomMatrix(rng, c.size(), 1);
  const DualState st = evaluatePsiGrad(a, c, b0, y);
  const Vector p = randomMatrix(rng, c.size(), 1);
  const double h = 1e-6;
  const Vector fd = (evaluatePsiGrad(a, c, b0, y + h * p).grad - evaluatePsiGrad(a, c, b0, y - h * p).grad) / (2 * h);
  CHECK((fd + dualHvProduct(st, c, p)).norm() <= 1e-6 * std::max(1.0, fd.norm()));
}

TEST_CASE("oracle psd search") {
  CHECK(oracle::exhaustivePsdSearch({Matrix::Identity(2, 2)}).has_value());
  Matrix off(2, 2), dg(2, 2);
  off << 0, 1, 1, 0;
  dg << 1, 0, 0, -1;
  CHECK_FALSE(oracle::exhaustivePsdSearch({off}).has_value());
  CHECK_FALSE(oracle::exhaustivePsdSearch({dg, off}).has_value());
}

TEST_CASE("oracle log-determinant agrees with the library") {
  std::mt19937_64 rng(43);
  for (int i = 0; i < 5; ++i) {
    const Matrix m = randomSpd(rng, 12);
    CHECK(std::abs(oracle::logDet(m) - factorize(StructuredSpdMatrix::dense(m)).logDeterminant()) < 1e-10);
  }
}
