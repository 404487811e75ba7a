#include "proptrack/assignment.hpp"

#include <algorithm>
#include <cmath>

namespace proptrack {
namespace {

// Square min-cost assignment via the potentials formulation of the Hungarian
// algorithm, O(n^3). `cost` is n x n with finite entries. Returns the column
// matched to each row plus the final dual potentials; at termination
// cost[i][j] - u[i] - v[j] >= 0 for all pairs and == 0 on matched pairs.
struct HungarianResult {
  std::vector<int> row_to_col;
  std::vector<double> u, v;
};

HungarianResult hungarian(const std::vector<std::vector<double>>& cost) {
  const int n = static_cast<int>(cost.size());
  const double inf = std::numeric_limits<double>::infinity();
  std::vector<double> u(n + 1, 0.0), v(n + 1, 0.0);
  std::vector<int> p(n + 1, 0), way(n + 1, 0);  // p[j]: row matched to column j (1-based)

  for (int i = 1; i <= n; ++i) {
    p[0] = i;
    int j0 = 0;
    std::vector<double> minv(n + 1, inf);
    std::vector<char> used(n + 1, 0);
    do {
      used[j0] = 1;
      const int i0 = p[j0];
      int j1 = -1;
      double delta = inf;
      for (int j = 1; j <= n; ++j) {
        if (used[j]) continue;
        const double cur = cost[i0 - 1][j - 1] - u[i0] - v[j];
        if (cur < minv[j]) {
          minv[j] = cur;
          way[j] = j0;
        }
        if (minv[j] < delta) {
          delta = minv[j];
          j1 = j;
        }
      }
      for (int j = 0; j <= n; ++j) {
        if (used[j]) {
          u[p[j]] += delta;
          v[j] -= delta;
        } else {
          minv[j] -= delta;
        }
      }
      j0 = j1;
    } while (p[j0] != 0);
    do {
      const int j1 = way[j0];
      p[j0] = p[j1];
      j0 = j1;
    } while (j0);
  }

  HungarianResult res;
  res.row_to_col.assign(n, -1);
  for (int j = 1; j <= n; ++j) res.row_to_col[p[j] - 1] = j - 1;
  res.u.assign(n, 0.0);
  res.v.assign(n, 0.0);
  for (int i = 1; i <= n; ++i) res.u[i - 1] = u[i];
  for (int j = 1; j <= n; ++j) res.v[j - 1] = v[j];
  return res;
}

// Kuhn augmenting search over the tight-edge adjacency, skipping columns in
// `locked` and rows below `first_free_row`.
bool augment(int row, const std::vector<std::vector<int>>& adj, std::vector<int>& match_col,
             std::vector<char>& visited, const std::vector<char>& locked, int first_free_row) {
  for (int c : adj[row]) {
    if (locked[c] || visited[c]) continue;
    visited[c] = 1;
    if (match_col[c] == -1 ||
        (match_col[c] >= first_free_row &&
         augment(match_col[c], adj, match_col, visited, locked, first_free_row))) {
      match_col[c] = row;
      return true;
    }
  }
  return false;
}

}  // namespace

std::vector<std::pair<int, int>> solve_assignment(const CostMatrix& costs) {
  const int rows = costs.rows();
  const int cols = costs.cols();
  if (rows == 0 || cols == 0) return {};

  // Pad to a square matrix; forbidden and dummy cells get a cost so large
  // that minimizing total cost first maximizes the number of real matches.
  const int n = std::max(rows, cols);
  double abs_sum = 0.0;
  for (int r = 0; r < rows; ++r)
    for (int c = 0; c < cols; ++c) {
      const double v = costs.at(r, c);
      if (std::isfinite(v)) abs_sum += std::abs(v);
    }
  const double big = 2.0 * std::max(1.0, abs_sum) + 1.0;

  std::vector<std::vector<double>> padded(n, std::vector<double>(n, big));
  for (int r = 0; r < rows; ++r)
    for (int c = 0; c < cols; ++c) {
      const double v = costs.at(r, c);
      if (std::isfinite(v)) padded[r][c] = v;
    }

  const HungarianResult hr = hungarian(padded);

  // Complementary slackness: a perfect matching of the padded matrix is
  // optimal exactly when all its edges are tight under the final duals. The
  // lexicographically smallest optimum is found by fixing each real row in
  // turn to its smallest tight column that still leaves the rest perfectly
  // matchable, preferring real columns (a match in the output) over padding.
  const double eps = 1e-10 * big;
  std::vector<std::vector<int>> tight(n);
  for (int r = 0; r < n; ++r)
    for (int c = 0; c < n; ++c)
      if (padded[r][c] - hr.u[r] - hr.v[c] <= eps) tight[r].push_back(c);

  std::vector<int> match_col(n, -1);
  for (int r = 0; r < n; ++r) match_col[hr.row_to_col[r]] = r;

  std::vector<char> locked(n, 0);
  std::vector<std::pair<int, int>> result;

  for (int r = 0; r < rows; ++r) {
    std::vector<int> candidates;
    for (int c : tight[r])
      if (!locked[c] && c < cols && padded[r][c] < big) candidates.push_back(c);
    for (int c : tight[r])
      if (!locked[c] && (c >= cols || padded[r][c] >= big)) candidates.push_back(c);

    const int current = [&] {
      for (int c = 0; c < n; ++c)
        if (match_col[c] == r) return c;
      return -1;
    }();

    for (int c : candidates) {
      if (c == current) break;  // keeping the current matching is feasible
      // Re-route the row displaced from column c, never touching fixed rows.
      const int displaced = match_col[c];
      match_col[current] = -1;
      match_col[c] = r;
      bool ok = true;
      if (displaced != -1) {
        std::vector<char> visited(n, 0);
        visited[c] = 1;
        ok = augment(displaced, tight, match_col, visited, locked, r + 1);
        if (!ok) {
          // Roll back.
          match_col[c] = displaced;
          match_col[current] = r;
        }
      }
      if (ok) break;
    }

    // Where the row ended up is final; freeze its column.
    for (int c = 0; c < n; ++c) {
      if (match_col[c] == r) {
        locked[c] = 1;
        if (c < cols && padded[r][c] < big) result.emplace_back(r, c);
        break;
      }
    }
  }

  return result;
}

}  // namespace proptrack
