#include "skm/lsap.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <stdexcept>

namespace skm {
namespace {

void validate(const CostMatrix& m) {
  if (m.k == 0) throw std::invalid_argument("lsap: empty matrix");
  if (m.entries.size() != m.k * m.k)
    throw std::invalid_argument("lsap: matrix is not square");
  for (const double v : m.entries)
    if (!std::isfinite(v)) throw std::invalid_argument("lsap: non-finite entry");
}

double cost_of(const CostMatrix& m, const std::vector<std::size_t>& sigma) {
  double total = 0.0;
  for (std::size_t i = 0; i < m.k; ++i) total += m.at(i, sigma[i]);
  return total;
}

// Alternating-path search over tight edges for the lexicographic pass.
bool augment(std::size_t row, const std::vector<std::vector<std::size_t>>& adj,
             const std::vector<bool>& col_blocked, std::vector<bool>& visited,
             std::vector<std::ptrdiff_t>& match_col,
             std::vector<std::size_t>& match_row) {
  for (const std::size_t j : adj[row]) {
    if (col_blocked[j] || visited[j]) continue;
    visited[j] = true;
    if (match_col[j] < 0 ||
        augment(static_cast<std::size_t>(match_col[j]), adj, col_blocked,
                visited, match_col, match_row)) {
      match_col[j] = static_cast<std::ptrdiff_t>(row);
      match_row[row] = j;
      return true;
    }
  }
  return false;
}

}  // namespace

AssignmentResult solve_lsap(const CostMatrix& m) {
  validate(m);
  const std::size_t k = m.k;
  const double inf = std::numeric_limits<double>::infinity();

  // Potentials + shortest augmenting paths, 1-based with sentinel column 0.
  std::vector<double> u(k + 1, 0.0), v(k + 1, 0.0);
  std::vector<std::size_t> p(k + 1, 0), way(k + 1, 0);
  for (std::size_t i = 1; i <= k; ++i) {
    p[0] = i;
    std::size_t j0 = 0;
    std::vector<double> minv(k + 1, inf);
    std::vector<bool> used(k + 1, false);
    do {
      used[j0] = true;
      const std::size_t i0 = p[j0];
      double delta = inf;
      std::size_t j1 = 0;
      for (std::size_t j = 1; j <= k; ++j) {
        if (used[j]) continue;
        const double cur = m.at(i0 - 1, j - 1) - u[i0] - v[j];
        if (cur < minv[j]) {
          minv[j] = cur;
          way[j] = j0;
        }
        if (minv[j] < delta) {
          delta = minv[j];
          j1 = j;
        }
      }
      for (std::size_t j = 0; j <= k; ++j) {
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
      const std::size_t j1 = way[j0];
      p[j0] = p[j1];
      j0 = j1;
    } while (j0 != 0);
  }

  std::vector<std::size_t> match_row(k, 0);
  std::vector<std::ptrdiff_t> match_col(k, -1);
  for (std::size_t j = 1; j <= k; ++j) {
    match_row[p[j] - 1] = j - 1;
    match_col[j - 1] = static_cast<std::ptrdiff_t>(p[j] - 1);
  }

  // Tight edges under the optimal potentials; every optimal assignment lives
  // inside this graph. Matched edges are included unconditionally to absorb
  // float drift in the potentials.
  std::vector<std::vector<std::size_t>> adj(k);
  bool any_tie = false;
  for (std::size_t i = 0; i < k; ++i) {
    for (std::size_t j = 0; j < k; ++j) {
      if (match_row[i] == j || u[i + 1] + v[j + 1] == m.at(i, j))
        adj[i].push_back(j);
    }
    if (adj[i].size() > 1) any_tie = true;
  }

  if (any_tie) {
    // Lexicographic pass: commit the smallest feasible column per row,
    // rerouting the displaced row through the tight graph.
    std::vector<bool> col_fixed(k, false);
    for (std::size_t i = 0; i < k; ++i) {
      bool committed = false;
      for (const std::size_t j : adj[i]) {
        if (col_fixed[j]) continue;
        if (match_row[i] == j) {
          committed = true;
        } else {
          const auto displaced = static_cast<std::size_t>(match_col[j]);
          const std::size_t j_old = match_row[i];
          match_col[j_old] = -1;
          match_row[i] = j;
          match_col[j] = static_cast<std::ptrdiff_t>(i);
          col_fixed[j] = true;  // block during the reroute search
          std::vector<bool> visited(k, false);
          if (augment(displaced, adj, col_fixed, visited, match_col, match_row)) {
            committed = true;
          } else {
            col_fixed[j] = false;
            match_col[j] = static_cast<std::ptrdiff_t>(displaced);
            match_row[i] = j_old;
            match_col[j_old] = static_cast<std::ptrdiff_t>(i);
          }
        }
        if (committed) {
          col_fixed[j] = true;
          break;
        }
      }
      if (!committed)
        throw std::logic_error("solve_lsap: lexicographic pass lost the matching");
    }
  }

  AssignmentResult res;
  res.sigma = std::move(match_row);
  res.total_cost = cost_of(m, res.sigma);
  return res;
}

AssignmentResult brute_force_lsap(const CostMatrix& m) {
  validate(m);
  if (m.k > 9)
    throw std::invalid_argument("brute_force_lsap: K too large (max 9)");
  std::vector<std::size_t> perm(m.k);
  std::iota(perm.begin(), perm.end(), 0);
  AssignmentResult best;
  best.sigma = perm;
  best.total_cost = cost_of(m, perm);
  while (std::next_permutation(perm.begin(), perm.end())) {
    const double c = cost_of(m, perm);
    if (c < best.total_cost) {
      best.total_cost = c;
      best.sigma = perm;
    }
  }
  return best;
}

}  // namespace skm
