#include "spdsplit/barrier.hpp"

#include "spdsplit/errors.hpp"
#include "spdsplit/log.hpp"

#include <cmath>
#include <limits>
#include <string>

namespace spdsplit {

const char* methodName(Method m) {
  switch (m) {
    case Method::NewtonCG: return "newton-cg";
    case Method::ExactNewton: return "exact-newton";
    case Method::Dual: return "dual";
    case Method::Auto: return "auto";
  }
  return "auto";
}

std::optional<Method> parseMethod(std::string_view name) {
  if (name == "newton-cg") return Method::NewtonCG;
  if (name == "exact-newton") return Method::ExactNewton;
  if (name == "dual") return Method::Dual;
  if (name == "auto") return Method::Auto;
  return std::nullopt;
}

void SolverOptions::validate() const {
  auto require = [](bool ok, const char* what) {
    if (!ok) fail(ErrorCode::InvalidArgument, what);
  };
  require(gradTolerance > 0.0, "gradTolerance must be positive");
  require(cgForcingCap > 0.0 && cgForcingFloor > 0.0, "CG tolerances must be positive");
  require(!cgMaxIterations || *cgMaxIterations > 0, "cgMaxIterations must be positive");
  require(armijoC1 > 0.0 && armijoC1 < 0.5, "armijoC1 must lie in (0, 0.5)");
  require(backtrackFactor > 0.0 && backtrackFactor < 1.0, "backtrackFactor must lie in (0, 1)");
  require(maxBacktracks > 0, "maxBacktracks must be positive");
  require(maxNewtonIterations > 0, "maxNewtonIterations must be positive");
  require(divergenceRadius > 0.0, "divergenceRadius must be positive");
}

// ---------------------------------------------------------------------------

Structure inheritedStructure(const StructuredSpdMatrix& base, std::span<const SparseSymMatrix> directions,
                             Index* bandwidth) {
  Index bF = 0;
  bool allToeplitz = true;
  for (const auto& d : directions) {
    bF = std::max(bF, d.halfBandwidth());
    allToeplitz = allToeplitz && d.toeplitzColumn().has_value();
  }
  if (base.structure() == Structure::Toeplitz && allToeplitz) return Structure::Toeplitz;
  if (base.structure() == Structure::Banded) {
    if (bandwidth) *bandwidth = std::max(base.halfBandwidth(), bF);
    return Structure::Banded;
  }
  return Structure::Dense;
}

namespace {

Index denseBandwidth(const Matrix& m) {
  Index b = 0;
  for (Index j = 0; j < m.cols(); ++j)
    for (Index i = j + b + 1; i < m.rows(); ++i)
      if (m(i, j) != 0.0) b = i - j;
  return b;
}

}  // namespace

StructuredAffineFamily::StructuredAffineFamily(const StructuredSpdMatrix& base,
                                               std::vector<SparseSymMatrix> directions,
                                               std::optional<Structure> force)
    : n_(base.dim()), directions_(std::move(directions)) {
  for (const auto& d : directions_) {
    if (d.dim() != n_) fail(ErrorCode::DimensionMismatch, "direction size differs from the base matrix");
  }
  structure_ = inheritedStructure(base, directions_, &bandwidth_);
  if (force) {
    if (*force == Structure::Toeplitz && structure_ != Structure::Toeplitz) {
      fail(ErrorCode::InvalidArgument, "Toeplitz backend needs a Toeplitz base and Toeplitz directions");
    }
    if (*force == Structure::Banded && structure_ != Structure::Banded) {
      bandwidth_ = denseBandwidth(base.toDense());
      for (const auto& d : directions_) bandwidth_ = std::max(bandwidth_, d.halfBandwidth());
    }
    structure_ = *force;
  }
  switch (structure_) {
    case Structure::Dense: base_ = base.toDense(); break;
    case Structure::Banded: {
      base_ = Matrix::Zero(bandwidth_ + 1, n_);
      for (Index j = 0; j < n_; ++j)
        for (Index d = 0; d <= bandwidth_ && j + d < n_; ++d) base_(d, j) = base(j + d, j);
      break;
    }
    case Structure::Toeplitz: {
      baseColumn_ = base.toeplitzData();
      for (const auto& d : directions_) columns_.push_back(*d.toeplitzColumn());
      break;
    }
  }
  logger().debug("affine family: n = {}, {} directions, {} backend", n_, directions_.size(),
                 structureName(structure_));
}

Factorization StructuredAffineFamily::factorize(const Vector& z) const {
  if (z.size() != static_cast<Index>(directions_.size())) {
    fail(ErrorCode::DimensionMismatch, "coefficient vector length differs from the number of directions");
  }
  switch (structure_) {
    case Structure::Dense: {
      Matrix m = base_;
      for (std::size_t k = 0; k < directions_.size(); ++k) {
        if (z(static_cast<Index>(k)) != 0.0) directions_[k].addTo(m, z(static_cast<Index>(k)));
      }
      return spdsplit::factorize(StructuredSpdMatrix::dense(m));
    }
    case Structure::Banded: {
      Matrix band = base_;
      for (std::size_t k = 0; k < directions_.size(); ++k) {
        const double zk = z(static_cast<Index>(k));
        if (zk == 0.0) continue;
        for (const auto& e : directions_[k].entries()) band(e.col - e.row, e.row) += zk * e.value;
      }
      return spdsplit::factorize(StructuredSpdMatrix::banded(bandwidth_, band));
    }
    case Structure::Toeplitz: {
      Vector col = baseColumn_;
      for (std::size_t k = 0; k < columns_.size(); ++k) col += z(static_cast<Index>(k)) * columns_[k];
      return spdsplit::factorize(StructuredSpdMatrix::toeplitz(col));
    }
  }
  fail(ErrorCode::InvalidArgument, "unknown structure");
}

// ---------------------------------------------------------------------------

namespace {

struct Trial {
  Factorization fact;
  double value;
};

std::optional<Trial> tryValue(const BarrierProblem& problem, const Vector& z) {
  Factorization f;
  try {
    f = problem.family->factorize(z);
  } catch (const Error& e) {
    if (e.code() == ErrorCode::NotPositiveDefinite) return std::nullopt;
    throw;
  }
  double v = -f.logDeterminant() + problem.constant;
  if (problem.linear.size() > 0) v += problem.linear.dot(z);
  if (!std::isfinite(v)) return std::nullopt;
  return Trial{std::move(f), v};
}

Vector gradientAt(const BarrierProblem& problem, const Factorization& f) {
  const auto& dirs = problem.family->directions();
  Vector g(static_cast<Index>(dirs.size()));
  for (std::size_t k = 0; k < dirs.size(); ++k) g(static_cast<Index>(k)) = -f.traceInvTimes(dirs[k]);
  if (problem.linear.size() > 0) g += problem.linear;
  return g;
}

}  // namespace

BarrierState evaluateBarrier(const BarrierProblem& problem, const Vector& z) {
  if (z.size() != static_cast<Index>(problem.size())) {
    fail(ErrorCode::DimensionMismatch, "point has " + std::to_string(z.size()) + " coordinates, expected " +
                                           std::to_string(problem.size()));
  }
  auto trial = tryValue(problem, z);
  if (!trial) fail(ErrorCode::Infeasible, "matrix is not positive definite at the requested point");
  BarrierState s;
  s.z = z;
  s.value = trial->value;
  s.grad = gradientAt(problem, trial->fact);
  s.fact = std::move(trial->fact);
  return s;
}

Vector barrierHv(const BarrierProblem& problem, const BarrierState& state, const Vector& p) {
  const auto& dirs = problem.family->directions();
  if (p.size() != static_cast<Index>(dirs.size())) fail(ErrorCode::DimensionMismatch, "hv: direction length");
  Vector q = Vector::Zero(p.size());
  if (p.isZero(0.0)) return q;
  const SparseSymMatrix fp =
      linearCombination(dirs, std::span<const double>(p.data(), static_cast<std::size_t>(p.size())),
                        problem.family->dim());
  const Matrix s = state.fact.sandwich(fp);
  for (std::size_t k = 0; k < dirs.size(); ++k) q(static_cast<Index>(k)) = dirs[k].traceWith(s);
  return q;
}

Matrix barrierHessian(const BarrierProblem& problem, const BarrierState& state) {
  const auto& dirs = problem.family->directions();
  const Index m = static_cast<Index>(dirs.size());
  Matrix h(m, m);
  for (Index k = 0; k < m; ++k) {
    const Matrix s = state.fact.sandwich(dirs[static_cast<std::size_t>(k)]);
    for (Index l = k; l < m; ++l) h(l, k) = dirs[static_cast<std::size_t>(l)].traceWith(s);
  }
  for (Index k = 0; k < m; ++k)
    for (Index l = k + 1; l < m; ++l) h(k, l) = h(l, k);
  return h;
}

LineSearchResult barrierLineSearch(const BarrierProblem& problem, const BarrierState& state,
                                   const Vector& d, const SolverOptions& opts) {
  LineSearchResult out;
  if (d.isZero(0.0)) {
    out.next = state;
    out.trials.push_back({1.0, true, true});
    return out;
  }
  const double slope = state.grad.dot(d);
  // Round-off allowance on the value comparison; without it Armijo stalls once
  // the predicted decrease drops below the accuracy of log|M|.
  const double noise = 64.0 * std::numeric_limits<double>::epsilon() * std::max(1.0, std::abs(state.value));
  double t = 1.0;
  for (int b = 0; b <= opts.maxBacktracks; ++b, t *= opts.backtrackFactor) {
    const Vector z = state.z + t * d;
    auto trial = tryValue(problem, z);
    if (!trial) {
      out.trials.push_back({t, false, false});
      continue;
    }
    if (trial->value <= state.value + opts.armijoC1 * t * slope + noise) {
      out.trials.push_back({t, true, true});
      out.t = t;
      out.next.z = z;
      out.next.value = trial->value;
      out.next.grad = gradientAt(problem, trial->fact);
      out.next.fact = std::move(trial->fact);
      return out;
    }
    out.trials.push_back({t, true, false});
  }
  fail(ErrorCode::LineSearchFailure,
       "no acceptable step after " + std::to_string(opts.maxBacktracks) + " backtracks");
}

namespace {

// Truncated CG on H d = -g; returns d and the iteration count.
std::pair<Vector, int> truncatedCg(const BarrierProblem& problem, const BarrierState& state, double eta,
                                   int maxIter) {
  const Vector& g = state.grad;
  Vector d = Vector::Zero(g.size());
  Vector r = -g;
  Vector p = r;
  double rr = r.squaredNorm();
  const double target = eta * g.norm();
  int it = 0;
  while (it < maxIter && std::sqrt(rr) > target) {
    const Vector hp = barrierHv(problem, state, p);
    const double curv = p.dot(hp);
    ++it;
    if (!(curv > 0.0)) {
      if (it == 1) d = -g;
      break;
    }
    const double alpha = rr / curv;
    d += alpha * p;
    r -= alpha * hp;
    const double rrNew = r.squaredNorm();
    p = r + (rrNew / rr) * p;
    rr = rrNew;
  }
  return {d, it};
}

}  // namespace

BarrierRun minimizeBarrier(const BarrierProblem& problem, const Vector& z0, const SolverOptions& opts,
                           Method method) {
  opts.validate();
  if (method != Method::NewtonCG && method != Method::ExactNewton) {
    fail(ErrorCode::InvalidArgument, "minimizeBarrier needs newton-cg or exact-newton");
  }
  BarrierRun run;
  run.state = evaluateBarrier(problem, z0);
  const int cgMax = opts.cgMaxIterations.value_or(std::max<int>(1, static_cast<int>(problem.size())));

  for (;;) {
    const double gnorm = run.state.grad.norm();
    run.gradNorms.push_back(gnorm);
    run.values.push_back(run.state.value);
    logger().info("iter {:3d}  f = {:.16e}  |g| = {:.3e}", run.iterations, run.state.value, gnorm);
    if (gnorm <= opts.gradTolerance) return run;
    if (run.iterations >= opts.maxNewtonIterations) {
      fail(ErrorCode::MaxIterations, "gradient norm " + std::to_string(gnorm) + " after " +
                                         std::to_string(run.iterations) + " iterations");
    }

    Vector d;
    if (method == Method::ExactNewton) {
      const Matrix h = barrierHessian(problem, run.state);
      Eigen::LLT<Matrix> llt(h);
      if (llt.info() == Eigen::Success) d = -llt.solve(run.state.grad);
      else d = -run.state.grad;
    } else {
      const double eta = std::max(std::min(opts.cgForcingCap, std::sqrt(gnorm)), opts.cgForcingFloor);
      auto [dir, its] = truncatedCg(problem, run.state, eta, cgMax);
      d = std::move(dir);
      run.cgIterations += its;
    }
    if (!(run.state.grad.dot(d) < 0.0)) {
      logger().warn("direction is not a descent direction; using steepest descent");
      d = -run.state.grad;
    }

    const double before = run.state.value;
    LineSearchResult ls = barrierLineSearch(problem, run.state, d, opts);
    run.state = std::move(ls.next);
    ++run.iterations;
    if (std::abs(before - run.state.value) <= 1e-15 * std::max(1.0, std::abs(before))) {
      logger().warn("objective stagnated at iteration {} (|g| = {:.3e})", run.iterations, gnorm);
    }
    if (run.state.z.norm() > opts.divergenceRadius) {
      fail(ErrorCode::SuspectedInfeasibleSubspace,
           "iterate norm exceeded " + std::to_string(opts.divergenceRadius) +
               "; the objective appears unbounded below");
    }
  }
}

}  // namespace spdsplit
