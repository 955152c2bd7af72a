#pragma once

#include <cmath>
#include <vector>

namespace mshjb::detail {

/// Solves (A + mu I) d = -g by Cholesky for a dense row-major symmetric A.
/// Returns false on a non-positive pivot. A is taken by value and clobbered.
inline bool cholesky_solve(std::vector<double> a, int m, double mu,
                           const std::vector<double>& g,
                           std::vector<double>& d) {
  auto at = [&](int i, int j) -> double& {
    return a[static_cast<std::size_t>(i) * m + static_cast<std::size_t>(j)];
  };
  for (int i = 0; i < m; ++i) at(i, i) += mu;
  for (int j = 0; j < m; ++j) {
    double diag = at(j, j);
    for (int k = 0; k < j; ++k) diag -= at(j, k) * at(j, k);
    if (!(diag > 0.0)) return false;
    diag = std::sqrt(diag);
    at(j, j) = diag;
    for (int i = j + 1; i < m; ++i) {
      double v = at(i, j);
      for (int k = 0; k < j; ++k) v -= at(i, k) * at(j, k);
      at(i, j) = v / diag;
    }
  }
  d.assign(static_cast<std::size_t>(m), 0.0);
  for (int i = 0; i < m; ++i) {
    double v = -g[static_cast<std::size_t>(i)];
    for (int k = 0; k < i; ++k) v -= at(i, k) * d[static_cast<std::size_t>(k)];
    d[static_cast<std::size_t>(i)] = v / at(i, i);
  }
  for (int i = m - 1; i >= 0; --i) {
    double v = d[static_cast<std::size_t>(i)];
    for (int k = i + 1; k < m; ++k) v -= at(k, i) * d[static_cast<std::size_t>(k)];
    d[static_cast<std::size_t>(i)] = v / at(i, i);
  }
  return true;
}

}  // namespace mshjb::detail
