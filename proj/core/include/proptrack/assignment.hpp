#pragma once

#include <limits>
#include <utility>
#include <vector>

namespace proptrack {

/// Rectangular cost matrix for minimization, with a FORBIDDEN sentinel
/// (+infinity) marking pairs that must never be selected.
class CostMatrix {
 public:
  CostMatrix() = default;
  CostMatrix(int rows, int cols, double fill = 0.0)
      : rows_(rows), cols_(cols), entries_(static_cast<std::size_t>(rows) * cols, fill) {}

  static constexpr double forbidden() { return std::numeric_limits<double>::infinity(); }

  double& at(int r, int c) { return entries_[static_cast<std::size_t>(r) * cols_ + c]; }
  double at(int r, int c) const { return entries_[static_cast<std::size_t>(r) * cols_ + c]; }

  int rows() const { return rows_; }
  int cols() const { return cols_; }

 private:
  int rows_ = 0;
  int cols_ = 0;
  std::vector<double> entries_;
};

/// Minimum-total-cost matching over the non-FORBIDDEN entries, of size
/// min(rows, cols) when the forbidden structure allows it and of maximum
/// possible size otherwise. Among equal-cost optima the lexicographically
/// smallest pair list (sorted by row) is returned, so results are
/// reproducible. Maximization problems are handled by negating at the call
/// site.
std::vector<std::pair<int, int>> solve_assignment(const CostMatrix& costs);

}  // namespace proptrack
