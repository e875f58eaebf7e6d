#include "oracle.hpp"

#include <cmath>
#include <limits>
#include <random>

namespace oracle {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

Matrix combination(const Matrix& a, const std::vector<Matrix>& d, const Vector& x) {
  Matrix m = a;
  for (std::size_t k = 0; k < d.size(); ++k) m -= x(static_cast<Eigen::Index>(k)) * d[k];
  return m;
}

Vector eigenvalues(const Matrix& m) {
  Eigen::SelfAdjointEigenSolver<Matrix> es(0.5 * (m + m.transpose()), Eigen::EigenvaluesOnly);
  return es.eigenvalues();
}

// Minimizes f(t) = -sum log1p(-t mu_i) over the interval where it is finite.
double lineMinimize(const Vector& mu, double tol) {
  double lo = -kInf, hi = kInf;
  for (Eigen::Index i = 0; i < mu.size(); ++i) {
    if (mu(i) > 0.0) hi = std::min(hi, 1.0 / mu(i));
    if (mu(i) < 0.0) lo = std::max(lo, 1.0 / mu(i));
  }
  if (!std::isfinite(lo) || !std::isfinite(hi)) throw OracleError("FeasibleIntervalCollapse");
  auto f = [&](double t) {
    double s = 0.0;
    for (Eigen::Index i = 0; i < mu.size(); ++i) {
      const double arg = -t * mu(i);
      if (arg <= -1.0) return kInf;
      s -= std::log1p(arg);
    }
    return s;
  };
  const double g = 0.5 * (std::sqrt(5.0) - 1.0);
  double a = lo, b = hi;
  double c = b - g * (b - a), e = a + g * (b - a);
  double fc = f(c), fe = f(e);
  for (int it = 0; it < 400 && (b - a) > tol * 1e-3 * (1.0 + std::abs(c)); ++it) {
    if (fc < fe) {
      b = e;
      e = c;
      fe = fc;
      c = b - g * (b - a);
      fc = f(c);
    } else {
      a = c;
      c = e;
      fc = fe;
      e = a + g * (b - a);
      fe = f(e);
    }
  }
  return 0.5 * (a + b);
}

}  // namespace

double logDet(const Matrix& m) {
  const Vector ev = eigenvalues(m);
  if (ev.size() > 0 && ev(0) <= 0.0) return -kInf;
  return ev.array().log().sum();
}

double phi(const Matrix& a, const std::vector<Matrix>& d, const Vector& x) {
  const double ld = logDet(combination(a, d, x));
  return std::isfinite(ld) ? -ld : kInf;
}

MinimizeResult bruteForceMinimize(const Matrix& a, const std::vector<Matrix>& d, const OracleOptions& opts) {
  const auto m = static_cast<Eigen::Index>(d.size());
  Vector x = Vector::Zero(m);
  int sweep = 0;
  for (; sweep < opts.coordinateSweeps && m > 0; ++sweep) {
    double moved = 0.0;
    for (Eigen::Index k = 0; k < m; ++k) {
      const Matrix base = combination(a, d, x);
      Eigen::SelfAdjointEigenSolver<Matrix> es(base);
      if (es.eigenvalues()(0) <= 0.0) throw OracleError("FeasibleIntervalCollapse");
      const Matrix root = es.eigenvectors() * es.eigenvalues().cwiseInverse().cwiseSqrt().asDiagonal() *
                          es.eigenvectors().transpose();
      const Vector mu = eigenvalues(root * d[static_cast<std::size_t>(k)] * root);
      const double t = lineMinimize(mu, opts.lineSearchTolerance);
      x(k) += t;
      moved = std::max(moved, std::abs(t));
    }
    if (moved <= 1e-15 * (1.0 + x.norm())) break;
  }
  return {x, phi(a, d, x), sweep};
}

Vector finiteDiffGradient(const Matrix& a, const std::vector<Matrix>& d, const Vector& x, double h) {
  if (h <= 0.0) h = 1e-6 * (1.0 + x.norm());
  Vector g(x.size());
  for (Eigen::Index k = 0; k < x.size(); ++k) {
    Vector xp = x, xm = x;
    xp(k) += h;
    xm(k) -= h;
    const double fp = phi(a, d, xp), fm = phi(a, d, xm);
    if (!std::isfinite(fp) || !std::isfinite(fm)) throw OracleError("StepLeavesFeasibleSet");
    g(k) = (fp - fm) / (2.0 * h);
  }
  return g;
}

Matrix finiteDiffHessian(const Matrix& a, const std::vector<Matrix>& d, const Vector& x, double h) {
  if (h <= 0.0) h = 1e-4 * (1.0 + x.norm());
  const Eigen::Index m = x.size();
  auto at = [&](Eigen::Index i, double si, Eigen::Index j, double sj, double step) {
    Vector y = x;
    y(i) += si * step;
    y(j) += sj * step;
    const double v = phi(a, d, y);
    if (!std::isfinite(v)) throw OracleError("StepLeavesFeasibleSet");
    return v;
  };
  auto central = [&](double step) {
    Matrix hess(m, m);
    for (Eigen::Index i = 0; i < m; ++i) {
      for (Eigen::Index j = i; j < m; ++j) {
        hess(i, j) = hess(j, i) = (at(i, 1, j, 1, step) - at(i, 1, j, -1, step) - at(i, -1, j, 1, step) +
                                   at(i, -1, j, -1, step)) /
                                  (4 * step * step);
      }
    }
    return hess;
  };
  // One Richardson step cancels the h^2 term, which dominates near the boundary.
  return (4.0 * central(0.5 * h) - central(h)) / 3.0;
}

std::optional<Matrix> exhaustivePsdSearch(const std::vector<Matrix>& d, int samples) {
  const auto m = static_cast<Eigen::Index>(d.size());
  if (m == 0) return std::nullopt;
  if (m > 4) throw OracleError("exhaustivePsdSearch supports at most four elements");
  auto score = [&](const Vector& c, Matrix* out) {
    Matrix h = Matrix::Zero(d[0].rows(), d[0].cols());
    for (Eigen::Index k = 0; k < m; ++k) h += c(k) * d[static_cast<std::size_t>(k)];
    const double nrm = h.norm();
    if (nrm == 0.0) return -kInf;
    h /= nrm;
    if (out) *out = h;
    return eigenvalues(h)(0);
  };

  std::mt19937_64 rng(12345);
  std::normal_distribution<double> nd;
  Vector best = Vector::Zero(m);
  double bestScore = -kInf;
  auto consider = [&](const Vector& c) {
    const double s = score(c, nullptr);
    if (s > bestScore) {
      bestScore = s;
      best = c;
    }
  };
  if (m == 1) {
    consider(Vector::Constant(1, 1.0));
    consider(Vector::Constant(1, -1.0));
  } else if (m == 2) {
    for (int i = 0; i < samples; ++i) {
      const double th = 2.0 * M_PI * i / samples;
      Vector c(2);
      c << std::cos(th), std::sin(th);
      consider(c);
    }
  } else {
    for (int i = 0; i < samples; ++i) {
      Vector c(m);
      for (Eigen::Index k = 0; k < m; ++k) c(k) = nd(rng);
      consider(c.normalized());
    }
  }
  // Local polish by shrinking random perturbations.
  for (double step = 0.1; step > 1e-10; step *= 0.5) {
    for (int i = 0; i < 40; ++i) {
      Vector c = best;
      for (Eigen::Index k = 0; k < m; ++k) c(k) += step * nd(rng);
      consider(c.normalized());
    }
  }
  if (bestScore < -1e-8) return std::nullopt;
  Matrix witness;
  score(best, &witness);
  return witness;
}

}  // namespace oracle
