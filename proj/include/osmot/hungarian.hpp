#pragma once

#include <limits>
#include <vector>

#include "osmot/numerics.hpp"

namespace osmot {

using CostMatrix = Matrix<double>;

/// Entries holding this value are never assigned.
inline constexpr double kInfeasible = std::numeric_limits<double>::infinity();

struct Match {
  Index row = 0;
  Index col = 0;

  bool operator==(const Match&) const = default;
};

/// Optimal rectangular assignment. Among all matchings that use only
/// feasible entries it picks one of maximum cardinality, and among those
/// one of minimum total cost. Result is sorted by row. NaN entries are
/// rejected with InvalidInputError.
std::vector<Match> hungarian(const CostMatrix& costs);

/// Sum of costs over the matches, accumulated in row order.
double assignment_cost(const CostMatrix& costs, const std::vector<Match>& matches);

}  // namespace osmot
