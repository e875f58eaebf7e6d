#include "spdsplit/finance.hpp"

#include "spdsplit/dual_solver.hpp"
#include "spdsplit/errors.hpp"
#include "spdsplit/log.hpp"
#include "spdsplit/properties.hpp"

#include <fmt/format.h>

#include <atomic>
#include <cmath>
#include <thread>

namespace spdsplit {

const char* infoModeName(InfoMode m) { return m == InfoMode::FullInfo ? "full" : "markov"; }

std::optional<InfoMode> parseInfoMode(std::string_view name) {
  if (name == "full") return InfoMode::FullInfo;
  if (name == "markov") return InfoMode::Markovian;
  return std::nullopt;
}

void MarketSpec::validate() const {
  if (N < 1) fail(ErrorCode::InvalidArgument, "N must be at least 1");
  if (!(deltaT > 0.0)) fail(ErrorCode::InvalidArgument, "deltaT must be positive");
  if (!(alpha > 0.0)) fail(ErrorCode::InvalidArgument, "alpha must be positive");
  if (!(hurst >= 0.5 && hurst < 1.0)) fail(ErrorCode::InvalidArgument, "hurst must lie in [0.5, 1)");
}

StructuredSpdMatrix fbmIncrementCovariance(int n, double deltaT, double hurst) {
  const double h2 = 2.0 * hurst;
  const double scale = 0.5 * std::pow(deltaT, h2);
  Vector col(n);
  for (int d = 0; d < n; ++d) {
    const double dd = d;
    col(d) = scale * (std::pow(dd + 1.0, h2) + std::pow(std::abs(dd - 1.0), h2) - 2.0 * std::pow(dd, h2));
  }
  return StructuredSpdMatrix::toeplitz(col);
}

SubspaceBasis strategyBasis(int n, InfoMode mode) {
  const Index dim = 2 * static_cast<Index>(n);
  std::vector<SparseSymMatrix> els;
  for (Index k = 1; k < n; ++k) {
    const Index c = 2 * k;  // traded increment of period k
    if (mode == InfoMode::FullInfo) {
      for (Index l = 0; l < c; ++l) els.push_back(SparseSymMatrix::unit(dim, l, c));
    } else {
      for (Index parity = 0; parity < 2; ++parity) {
        std::vector<SparseEntry> entries;
        for (Index l = parity; l < c; l += 2) entries.push_back({l, c, 1.0});
        els.emplace_back(dim, std::move(entries));
      }
    }
  }
  return SubspaceBasis(dim, std::move(els));
}

namespace {

std::vector<Index> blockToInterleaved(int n) {
  std::vector<Index> perm(2 * static_cast<std::size_t>(n));
  for (Index k = 0; k < n; ++k) {
    perm[static_cast<std::size_t>(k)] = 2 * k;
    perm[static_cast<std::size_t>(k + n)] = 2 * k + 1;
  }
  return perm;
}

Matrix permutationMatrix(const std::vector<Index>& perm) {
  const Index n = static_cast<Index>(perm.size());
  Matrix p = Matrix::Zero(n, n);
  for (Index i = 0; i < n; ++i) p(perm[static_cast<std::size_t>(i)], i) = 1.0;
  return p;
}

// M(z) = Pi + sum z_k F_k in block coordinates. No direction touches the
// lower-right block, so M22 = K + I/dt is fixed and every factorization goes
// through the N x N Schur complement M11 - M12 M22^{-1} M21.
class BlockSchurFamily final : public AffineSpdFamily {
 public:
  BlockSchurFamily(const MarketSpec& spec, const StructuredSpdMatrix& sigma1, std::vector<SparseSymMatrix> directions)
      : n_(spec.N), directions_(std::move(directions)) {
    const Index n = n_;
    for (const auto& d : directions_) {
      for (const auto& e : d.entries()) {
        if (e.row >= n) fail(ErrorCode::InvalidArgument, "direction touches the fixed lower-right block");
      }
    }
    const Vector tcol = spec.alpha * spec.alpha * sigma1.toeplitzData();
    const Factorization tf = spdsplit::factorize(StructuredSpdMatrix::toeplitz(tcol));
    Vector rcol = tcol;
    rcol(0) += spec.deltaT;
    const Factorization rf = spdsplit::factorize(StructuredSpdMatrix::toeplitz(rcol));
    const Matrix k = tf.inverse();
    m22inv_ = spec.deltaT * Matrix::Identity(n, n) - spec.deltaT * spec.deltaT * rf.inverse();
    m22inv_ = 0.5 * (m22inv_ + m22inv_.transpose());
    logDetM22_ = -tf.logDeterminant() + rf.logDeterminant() - static_cast<double>(n) * std::log(spec.deltaT);
    pi_.resize(2 * n, 2 * n);
    pi_.topLeftCorner(n, n) = k;
    pi_.topRightCorner(n, n) = -k;
    pi_.bottomLeftCorner(n, n) = -k;
    pi_.bottomRightCorner(n, n) = k + Matrix::Identity(n, n) / spec.deltaT;
  }

  Index dim() const override { return 2 * n_; }
  const std::vector<SparseSymMatrix>& directions() const override { return directions_; }
  Structure structure() const override { return Structure::Dense; }
  const Matrix& pi() const { return pi_; }

  Factorization factorize(const Vector& z) const override {
    const Index n = n_;
    Matrix m = pi_;
    for (std::size_t k = 0; k < directions_.size(); ++k) {
      if (z(static_cast<Index>(k)) != 0.0) directions_[k].addTo(m, z(static_cast<Index>(k)));
    }
    const Matrix x = m22inv_ * m.bottomLeftCorner(n, n);
    Matrix schur = m.topLeftCorner(n, n) - m.topRightCorner(n, n) * x;
    schur = 0.5 * (schur + schur.transpose());
    Eigen::LLT<Matrix> llt(schur);
    if (llt.info() != Eigen::Success) fail(ErrorCode::NotPositiveDefinite, "Schur complement is not positive definite");
    const Matrix& l = llt.matrixLLT();
    double logDet = logDetM22_;
    for (Index i = 0; i < n; ++i) {
      if (!(l(i, i) > 0.0)) fail(ErrorCode::NotPositiveDefinite, "Schur complement pivot is not positive");
      logDet += 2.0 * std::log(l(i, i));
    }
    const Matrix sinv = llt.solve(Matrix::Identity(n, n));
    Matrix w(2 * n, 2 * n);
    w.topLeftCorner(n, n) = sinv;
    w.bottomLeftCorner(n, n) = -x * sinv;
    w.topRightCorner(n, n) = w.bottomLeftCorner(n, n).transpose();
    w.bottomRightCorner(n, n) = m22inv_ + x * sinv * x.transpose();
    w = 0.5 * (w + w.transpose());
    return Factorization::fromInverse(std::move(m), std::move(w), logDet);
  }

 private:
  Index n_;
  std::vector<SparseSymMatrix> directions_;
  Matrix pi_;
  Matrix m22inv_;
  double logDetM22_ = 0.0;
};

}  // namespace

MarketInstance buildMarket(const MarketSpec& spec) {
  spec.validate();
  const Index n = spec.N;
  MarketInstance inst;
  inst.sigma1 = fbmIncrementCovariance(spec.N, spec.deltaT, spec.hurst);
  inst.permutation = blockToInterleaved(spec.N);
  const Matrix s1 = inst.sigma1.toDense();
  Matrix block(2 * n, 2 * n);
  block.topLeftCorner(n, n) = spec.alpha * spec.alpha * s1 + spec.deltaT * Matrix::Identity(n, n);
  block.topRightCorner(n, n) = spec.deltaT * Matrix::Identity(n, n);
  block.bottomLeftCorner(n, n) = spec.deltaT * Matrix::Identity(n, n);
  block.bottomRightCorner(n, n) = spec.deltaT * Matrix::Identity(n, n);
  Matrix sigma(2 * n, 2 * n);
  for (Index j = 0; j < 2 * n; ++j)
    for (Index i = 0; i < 2 * n; ++i)
      sigma(inst.permutation[static_cast<std::size_t>(i)], inst.permutation[static_cast<std::size_t>(j)]) = block(i, j);
  inst.sigma = StructuredSpdMatrix::dense(sigma);
  inst.basis = strategyBasis(spec.N, spec.mode);
  return inst;
}

UtilityResult utilityValue(const MarketSpec& spec, const UtilityOptions& opts) {
  const MarketInstance inst = buildMarket(spec);
  const Index n = spec.N;
  UtilityResult out;
  {
    const Vector tcol = spec.alpha * spec.alpha * inst.sigma1.toeplitzData();
    out.sigmaLogDet = static_cast<double>(n) * std::log(spec.deltaT) +
                      factorize(StructuredSpdMatrix::toeplitz(tcol)).logDeterminant();
  }
  Method method = resolveMethod(inst.basis, opts.solver);

  if (opts.schur && method != Method::Dual) {
    std::vector<Index> inverse(inst.permutation.size());
    for (std::size_t i = 0; i < inverse.size(); ++i) inverse[static_cast<std::size_t>(inst.permutation[i])] = static_cast<Index>(i);
    const SubspaceBasis blockBasis = permuteBasis(inst.basis, inverse);
    std::vector<SparseSymMatrix> dirs;
    dirs.reserve(blockBasis.size());
    for (std::size_t k = 0; k < blockBasis.size(); ++k) dirs.push_back(blockBasis[k].scaled(-1.0 / blockBasis.norms()[k]));
    const BlockSchurFamily family(spec, inst.sigma1, std::move(dirs));
    const DecompositionResult blockResult =
        solvePrimalOn(family, family.pi(), blockBasis, opts.solver, method, opts.warmStart);
    out.decomposition = conjugateDecomposition(blockResult, permutationMatrix(inst.permutation));
  } else {
    const Matrix sigma = inst.sigma.toDense();
    Matrix pi = Eigen::LLT<Matrix>(sigma).solve(Matrix::Identity(2 * n, 2 * n));
    pi = 0.5 * (pi + pi.transpose());
    const auto a = StructuredSpdMatrix::dense(pi);
    if (method == Method::Dual) {
      out.decomposition = dualNewtonCg(a, inst.basis, opts.solver);
    } else {
      out.decomposition = solvePrimal(a, inst.basis, opts.solver, method, opts.warmStart);
    }
  }
  out.qHatLogDet = out.decomposition.phiStar;
  out.vStar = 0.5 * (out.sigmaLogDet - out.qHatLogDet);
  return out;
}

std::vector<SweepRow> valueSweep(const MarketSpec& tmpl, const std::vector<double>& hurstGrid,
                                 const std::vector<InfoMode>& modes, const SweepOptions& opts) {
  const std::size_t nm = modes.size();
  std::vector<SweepRow> rows(hurstGrid.size() * nm);
  auto runRow = [&](std::size_t gi, std::size_t mi, std::optional<Vector>& warm) {
    SweepRow& row = rows[gi * nm + mi];
    row.hurst = hurstGrid[gi];
    row.mode = modes[mi];
    MarketSpec spec = tmpl;
    spec.hurst = hurstGrid[gi];
    spec.mode = modes[mi];
    UtilityOptions uo;
    uo.schur = opts.schur;
    uo.solver = opts.solver;
    try {
      UtilityResult res;
      bool done = false;
      if (opts.warmStart && warm) {
        uo.warmStart = warm;
        try {
          res = utilityValue(spec, uo);
          done = true;
        } catch (const Error& e) {
          if (e.code() != ErrorCode::Infeasible) throw;
          logger().info("warm start infeasible at H = {}; restarting from zero", spec.hurst);
        }
        uo.warmStart.reset();
      }
      if (!done) res = utilityValue(spec, uo);
      row.ok = true;
      row.vStar = res.vStar;
      row.iterations = res.decomposition.iterations;
      row.gradNorm = res.decomposition.finalGradNorm;
      if (opts.warmStart) warm = res.decomposition.x;
    } catch (const std::exception& e) {
      row.ok = false;
      row.error = e.what();
      warm.reset();
      logger().error("sweep row H = {} ({}) failed: {}", spec.hurst, infoModeName(spec.mode), e.what());
    }
  };

  // With warm starts each mode walks the grid in order; otherwise rows are independent.
  const std::size_t tasks = opts.warmStart ? nm : rows.size();
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t t; (t = next.fetch_add(1)) < tasks;) {
      std::optional<Vector> warm;
      if (opts.warmStart) {
        for (std::size_t gi = 0; gi < hurstGrid.size(); ++gi) runRow(gi, t, warm);
      } else {
        runRow(t / nm, t % nm, warm);
      }
    }
  };
  const int jobs = std::max(1, std::min<int>(opts.jobs, static_cast<int>(tasks)));
  std::vector<std::thread> pool;
  for (int j = 1; j < jobs; ++j) pool.emplace_back(worker);
  worker();
  for (auto& t : pool) t.join();
  return rows;
}

std::string sweepCsv(const std::vector<SweepRow>& rows) {
  std::string out = "hurst,mode,v_star,iterations,grad_norm\n";
  for (const auto& r : rows) {
    if (!r.ok) continue;
    out += fmt::format("{:.17g},{},{:.17g},{},{:.17g}\n", r.hurst, infoModeName(r.mode), r.vStar, r.iterations,
                       r.gradNorm);
  }
  return out;
}

}  // namespace spdsplit
