#include "osmot/hungarian.hpp"

#include <algorithm>
#include <cmath>

namespace osmot {

namespace {

// Shortest-augmenting-path solver with row/column potentials for
// rows <= cols; every row ends up assigned. Returns the column per row.
std::vector<Index> solve_dense(const CostMatrix& a) {
  const Index n = a.rows();
  const Index m = a.cols();
  constexpr double inf = std::numeric_limits<double>::infinity();
  // 1-based arrays; column 0 is the virtual source.
  std::vector<double> u(n + 1, 0.0), v(m + 1, 0.0);
  std::vector<Index> owner(m + 1, 0), way(m + 1, 0);
  for (Index i = 1; i <= n; ++i) {
    owner[0] = i;
    Index j0 = 0;
    std::vector<double> minv(m + 1, inf);
    std::vector<char> used(m + 1, 0);
    do {
      used[j0] = 1;
      const Index i0 = owner[j0];
      double delta = inf;
      Index j1 = 0;
      for (Index j = 1; j <= m; ++j) {
        if (used[j]) continue;
        const double cur = a(i0 - 1, j - 1) - u[i0] - v[j];
        if (cur < minv[j]) {
          minv[j] = cur;
          way[j] = j0;
        }
        if (minv[j] < delta) {
          delta = minv[j];
          j1 = j;
        }
      }
      for (Index j = 0; j <= m; ++j) {
        if (used[j]) {
          u[owner[j]] += delta;
          v[j] -= delta;
        } else {
          minv[j] -= delta;
        }
      }
      j0 = j1;
    } while (owner[j0] != 0);
    do {
      const Index j1 = way[j0];
      owner[j0] = owner[j1];
      j0 = j1;
    } while (j0 != 0);
  }
  std::vector<Index> col_of_row(n, -1);
  for (Index j = 1; j <= m; ++j) {
    if (owner[j] != 0) col_of_row[owner[j] - 1] = j - 1;
  }
  return col_of_row;
}

}  // namespace

std::vector<Match> hungarian(const CostMatrix& costs) {
  if (costs.rows() == 0 || costs.cols() == 0) return {};
  if (costs.array().isNaN().any()) {
    throw InvalidInputError("hungarian: cost matrix contains NaN");
  }

  const bool transposed = costs.rows() > costs.cols();
  CostMatrix a = transposed ? CostMatrix(costs.transpose()) : costs;

  // Replace infeasible entries by a penalty large enough that trading one
  // infeasible pair for a feasible one always lowers the total.
  double bound = 0;
  bool any_feasible = false;
  for (Index i = 0; i < a.size(); ++i) {
    const double c = a.data()[i];
    if (std::isfinite(c)) {
      bound = std::max(bound, std::abs(c));
      any_feasible = true;
    } else if (c < 0) {
      throw InvalidInputError("hungarian: -inf cost");
    }
  }
  if (!any_feasible) return {};
  const double penalty = (2.0 * static_cast<double>(a.rows()) + 1.0) * (bound + 1.0);
  for (Index i = 0; i < a.size(); ++i) {
    if (!std::isfinite(a.data()[i])) a.data()[i] = penalty;
  }

  const std::vector<Index> col_of_row = solve_dense(a);
  std::vector<Match> out;
  for (Index r = 0; r < static_cast<Index>(col_of_row.size()); ++r) {
    const Index c = col_of_row[r];
    if (c < 0) continue;
    const Match m = transposed ? Match{c, r} : Match{r, c};
    if (std::isfinite(costs(m.row, m.col))) out.push_back(m);
  }
  std::sort(out.begin(), out.end(),
            [](const Match& x, const Match& y) { return x.row < y.row; });
  return out;
}

double assignment_cost(const CostMatrix& costs, const std::vector<Match>& matches) {
  std::vector<Match> sorted = matches;
  std::sort(sorted.begin(), sorted.end(),
            [](const Match& x, const Match& y) { return x.row < y.row; });
  double total = 0;
  for (const Match& m : sorted) total += costs(m.row, m.col);
  return total;
}

}  // namespace osmot
