#pragma once

#include <array>
#include <cstddef>
#include <optional>

#include "blockquant/distributions.hpp"
#include "blockquant/likelihood.hpp"

namespace blockquant {

/// Published simulation results used by the `tables` command for side-by-side
/// comparison. Never consumed by the estimators.
struct ReferenceRow {
  std::size_t k;
  // Frechet(1) AELM, NORM; Burr(0.5,1) AELM, NORM; Burr(1,0.5) AELM, NORM.
  std::array<double, 6> values;
};

struct ReferenceTable {
  int number;      // 1..4
  int scheme;      // 1 or 2
  bool coverage;   // false: mean interval lengths
  std::array<ReferenceRow, 19> rows;
};

const std::array<ReferenceTable, 4>& reference_tables();

/// Reference entry for (scheme, coverage/length, model, method, k), if tabulated.
std::optional<double> reference_value(int scheme, bool coverage, const HeavyTailModel& model, CiMethod method,
                                      std::size_t k);

}  // namespace blockquant
