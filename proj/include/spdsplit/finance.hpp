#pragma once

#include "spdsplit/primal_solver.hpp"

#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace spdsplit {

enum class InfoMode { FullInfo, Markovian };

const char* infoModeName(InfoMode m);  // "full" / "markov"
std::optional<InfoMode> parseInfoMode(std::string_view name);

struct MarketSpec {
  int N = 1;
  double deltaT = 1.0;
  double alpha = 1.0;
  double hurst = 0.75;
  InfoMode mode = InfoMode::FullInfo;

  void validate() const;
};

struct MarketInstance {
  StructuredSpdMatrix sigma;   // covariance of the interleaved vector (X^1_1, X^1_2, ..., X^N_1, X^N_2)
  SubspaceBasis basis;
  std::vector<Index> permutation;  // block position -> interleaved position
  StructuredSpdMatrix sigma1;  // fBm increment covariance, Toeplitz
};

/// Toeplitz column c_d = 0.5 dt^{2H} ((d+1)^{2H} + |d-1|^{2H} - 2 d^{2H}).
StructuredSpdMatrix fbmIncrementCovariance(int n, double deltaT, double hurst);

/// Sigma = P^T [[a^2 S1 + dt I, dt I], [dt I, dt I]] P.
MarketInstance buildMarket(const MarketSpec& spec);
/// Strategy subspace alone, without the covariance.
SubspaceBasis strategyBasis(int n, InfoMode mode);

struct UtilityOptions {
  bool schur = true;  // block/Schur-complement path in permuted coordinates
  SolverOptions solver;
  std::optional<Vector> warmStart;
};

struct UtilityResult {
  double vStar = 0.0;
  double qHatLogDet = 0.0;
  double sigmaLogDet = 0.0;
  DecompositionResult decomposition;  // of Sigma^{-1}, in interleaved coordinates
};

UtilityResult utilityValue(const MarketSpec& spec, const UtilityOptions& opts = {});

struct SweepOptions {
  bool schur = true;
  bool warmStart = false;
  int jobs = 1;
  SolverOptions solver;
};

struct SweepRow {
  double hurst = 0.0;
  InfoMode mode = InfoMode::FullInfo;
  bool ok = false;
  double vStar = 0.0;
  int iterations = 0;
  double gradNorm = 0.0;
  std::string error;
};

/// One row per (H, mode), ordered by grid index then mode. Failed rows carry
/// the error message; the sweep continues.
std::vector<SweepRow> valueSweep(const MarketSpec& tmpl, const std::vector<double>& hurstGrid,
                                 const std::vector<InfoMode>& modes, const SweepOptions& opts = {});

/// CSV with header "hurst,mode,v_star,iterations,grad_norm"; failed rows are omitted.
std::string sweepCsv(const std::vector<SweepRow>& rows);

}  // namespace spdsplit
