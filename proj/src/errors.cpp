#include "spdsplit/errors.hpp"
#include "spdsplit/log.hpp"

#include <cstdlib>
#include <memory>
#include <string_view>

#include <spdlog/sinks/stdout_sinks.h>

namespace spdsplit {

const char* errorCodeName(ErrorCode code) {
  switch (code) {
    case ErrorCode::InvalidArgument: return "InvalidArgument";
    case ErrorCode::DimensionMismatch: return "DimensionMismatch";
    case ErrorCode::NotPositiveDefinite: return "NotPositiveDefinite";
    case ErrorCode::PatternOutsideBand: return "PatternOutsideBand";
    case ErrorCode::RankDeficientBasis: return "RankDeficientBasis";
    case ErrorCode::NotInvariantSubspace: return "NotInvariantSubspace";
    case ErrorCode::NotOrthogonal: return "NotOrthogonal";
    case ErrorCode::Infeasible: return "Infeasible";
    case ErrorCode::LineSearchFailure: return "LineSearchFailure";
    case ErrorCode::MaxIterations: return "MaxIterations";
    case ErrorCode::SuspectedInfeasibleSubspace: return "SuspectedInfeasibleSubspace";
    case ErrorCode::ProvenInfeasibleSubspace: return "ProvenInfeasibleSubspace";
    case ErrorCode::NoObviousDualStart: return "NoObviousDualStart";
    case ErrorCode::SingularJacobian: return "SingularJacobian";
    case ErrorCode::ParseError: return "ParseError";
    case ErrorCode::IoError: return "IoError";
  }
  return "Unknown";
}

namespace {

spdlog::level::level_enum levelFromEnv() {
  const char* env = std::getenv("SPDSPLIT_LOG");
  if (env == nullptr) return spdlog::level::err;
  std::string_view v(env);
  if (v == "debug") return spdlog::level::debug;
  if (v == "info") return spdlog::level::info;
  return spdlog::level::err;
}

}  // namespace

spdlog::logger& logger() {
  static std::shared_ptr<spdlog::logger> instance = [] {
    auto sink = std::make_shared<spdlog::sinks::stderr_sink_mt>();
    auto lg = std::make_shared<spdlog::logger>("spdsplit", sink);
    lg->set_pattern("[spdsplit %l] %v");
    lg->set_level(levelFromEnv());
    return lg;
  }();
  return *instance;
}

}  // namespace spdsplit
