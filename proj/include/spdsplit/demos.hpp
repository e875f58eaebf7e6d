#pragma once

#include "spdsplit/primal_solver.hpp"

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace spdsplit {

enum class DemoKind { SmallSpan, Dual, GroupInvariant, Banded };

const char* demoName(DemoKind k);  // "example1" .. "example4"
std::optional<DemoKind> parseDemo(std::string_view name);

struct DemoInstance {
  DemoKind kind = DemoKind::SmallSpan;
  StructuredSpdMatrix a;
  SubspaceBasis basis;        // the full S
  SubspaceBasis solveBasis;   // what the solver runs on (S^G for the group example, else S)
  std::optional<GroupAction> group;
  Method method = Method::ExactNewton;
  // group example: block layout and the active block pairs (p <= q)
  Index blockSize = 0;
  std::vector<std::pair<Index, Index>> activePairs;
};

/// Seeded scenario generators (std::mt19937_64):
///  example1  dense SPD A, five dense zero-diagonal directions, exact Newton
///  example2  dense SPD A, S = units off the tridiagonal band, dual Newton-CG
///  example3  A invariant under permutations inside each of five blocks, S the
///            zero-diagonal matrices on 13 of the 15 block pairs, solved on S^G
///  example4  banded A (b = 2), S = units at offsets 1 and 2, Newton-CG
/// n must be divisible by 5 for example3.
DemoInstance makeDemo(DemoKind kind, Index n, std::uint64_t seed = 1);

/// Inactive block pairs of the group example.
const std::vector<std::pair<Index, Index>>& demoInactivePairs();

}  // namespace spdsplit
