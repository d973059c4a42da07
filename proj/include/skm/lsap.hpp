#ifndef SKM_LSAP_HPP
#define SKM_LSAP_HPP

#include <cstddef>
#include <vector>

namespace skm {

// Square cost matrix for the linear sum assignment problem.
struct CostMatrix {
  std::size_t k = 0;
  std::vector<double> entries;  // row-major k x k

  CostMatrix() = default;
  explicit CostMatrix(std::size_t k_) : k(k_), entries(k_ * k_, 0.0) {}

  double at(std::size_t i, std::size_t j) const { return entries[i * k + j]; }
  double& at(std::size_t i, std::size_t j) { return entries[i * k + j]; }
};

struct AssignmentResult {
  std::vector<std::size_t> sigma;  // row i -> column sigma[i]
  double total_cost = 0.0;
};

// Exact minimum-cost assignment via the potentials/augmenting-path variant of
// the Kuhn-Munkres algorithm, O(K^3). Among exactly-equal optima the
// lexicographically smallest sigma is returned (resolved on the tight-edge
// graph certified by the optimal potentials).
AssignmentResult solve_lsap(const CostMatrix& m);

// Exhaustive minimum over all K! permutations in lexicographic order; K <= 9.
AssignmentResult brute_force_lsap(const CostMatrix& m);

}  // namespace skm

#endif  // SKM_LSAP_HPP
