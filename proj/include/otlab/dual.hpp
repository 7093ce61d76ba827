#pragma once

#include <optional>
#include <vector>

#include "otlab/core.hpp"
#include "otlab/ctransform.hpp"
#include "otlab/primal.hpp"

namespace otlab {

namespace detail {

/// Propagates phi(i) + psi(j) = c(i,j) along the basis cells, one connected
/// component at a time. Each component is anchored at its first X point
/// (phi = 0), or at its first Y point (psi = 0) when it has no X point.
/// Returns the component id of every node (rows first, then columns).
template <Scalar T>
std::vector<std::size_t> propagate_on_forest(const std::vector<Cell>& basis,
                                             const CostMatrix<T>& cost,
                                             DualPotentials<T>& pot) {
  const std::size_t m = cost.rows();
  const std::size_t n = cost.cols();
  std::vector<std::vector<std::size_t>> adjacency(m + n);
  for (std::size_t k = 0; k < basis.size(); ++k) {
    const Cell c = basis[k];
    if (c.row >= m || c.col >= n) {
      throw Error(ErrorCode::DimensionMismatch, "basis cell outside the cost matrix");
    }
    if (cost(c.row, c.col).is_infinite()) {
      throw Error(ErrorCode::UnboundedCost, "basis cell has +inf cost");
    }
    adjacency[c.row].push_back(k);
    adjacency[m + c.col].push_back(k);
  }
  pot.phi.assign(m, T(0));
  pot.psi.assign(n, T(0));
  constexpr std::size_t unset = static_cast<std::size_t>(-1);
  std::vector<std::size_t> component(m + n, unset);
  std::vector<bool> used_edge(basis.size(), false);
  std::size_t next_component = 0;
  for (std::size_t root = 0; root < m + n; ++root) {
    if (component[root] != unset) continue;
    component[root] = next_component;
    std::vector<std::size_t> stack{root};
    while (!stack.empty()) {
      const std::size_t node = stack.back();
      stack.pop_back();
      for (std::size_t k : adjacency[node]) {
        if (used_edge[k]) continue;
        used_edge[k] = true;
        const Cell c = basis[k];
        const bool from_row = node < m;
        const std::size_t other = from_row ? m + c.col : c.row;
        if (component[other] != unset) {
          throw Error(ErrorCode::InfeasibleInput, "basis contains a cycle");
        }
        component[other] = next_component;
        if (from_row) {
          pot.psi[c.col] = cost.at(c.row, c.col) - pot.phi[c.row];
        } else {
          pot.phi[c.row] = cost.at(c.row, c.col) - pot.psi[c.col];
        }
        stack.push_back(other);
      }
    }
    ++next_component;
  }
  return component;
}

/// Shifts component k by (+a_k, -a_k) so that phi + psi <= c holds across
/// components. The constraints a_k - a_l <= min slack(k,l) form a system
/// of difference constraints, solved by Bellman-Ford from a virtual source.
template <Scalar T>
void align_components(const std::vector<std::size_t>& component, std::size_t count,
                      const CostMatrix<T>& cost, DualPotentials<T>& pot) {
  const std::size_t m = cost.rows();
  const std::size_t n = cost.cols();
  // bound[k][l]: tightest a_k - a_l <= bound for row-side k, column-side l.
  std::vector<std::vector<std::optional<T>>> bound(count, std::vector<std::optional<T>>(count));
  for (std::size_t i = 0; i < m; ++i)
    for (std::size_t j = 0; j < n; ++j) {
      const std::size_t k = component[i];
      const std::size_t l = component[m + j];
      if (k == l || cost(i, j).is_infinite()) continue;
      T slack = cost.at(i, j) - pot.phi[i] - pot.psi[j];
      if (!bound[k][l] || slack < *bound[k][l]) bound[k][l] = std::move(slack);
    }
  // Edge l -> k with weight bound[k][l]; distances give a_k.
  std::vector<T> offset(count, T(0));
  for (std::size_t round = 0; round <= count; ++round) {
    bool changed = false;
    for (std::size_t k = 0; k < count; ++k)
      for (std::size_t l = 0; l < count; ++l) {
        if (!bound[k][l]) continue;
        T candidate = offset[l] + *bound[k][l];
        if (candidate < offset[k]) {
          offset[k] = std::move(candidate);
          changed = true;
        }
      }
    if (!changed) break;
    if (round == count) {
      throw Error(ErrorCode::InfeasibleInput,
                  "basis components admit no jointly feasible potentials");
    }
  }
  for (std::size_t i = 0; i < m; ++i) pot.phi[i] += offset[component[i]];
  for (std::size_t j = 0; j < n; ++j) pot.psi[j] -= offset[component[m + j]];
}

}  // namespace detail

/// Potentials tight on every basic cell of an optimal spanning-tree basis.
/// Feasible and optimal because the simplex stopped with nonnegative
/// reduced costs.
template <Scalar T>
DualPotentials<T> extract_dual_from_basis(const OptimalPlanResult<T>& result,
                                          const CostMatrix<T>& cost) {
  DualPotentials<T> pot;
  const auto component = detail::propagate_on_forest(result.basis, cost, pot);
  const std::size_t count = *std::max_element(component.begin(), component.end()) + 1;
  if (count > 1) detail::align_components(component, count, cost, pot);
  return pot;
}

/// One step of the double-transform improvement: returns normalize_pair(phi).
/// The dual value never decreases.
template <Scalar T>
DualPotentials<T> improve_dual(const DualPotentials<T>& pot, const CostMatrix<T>& cost,
                               const T& tol = NumTraits<T>::default_tol()) {
  require_finite_cost(cost, "improve_dual");
  if (!is_dual_feasible(pot, cost, tol)) {
    throw Error(ErrorCode::InfeasibleInput, "potentials violate phi + psi <= c");
  }
  return normalize_pair(pot.phi, cost);
}

template <Scalar T>
struct PrimalDualSolution {
  OptimalPlanResult<T> primal;
  DualPotentials<T> dual;
};

/// Optimal plan plus optimal potentials of the form
/// (xi^{c cbar} + m, xi^c - m), where xi is the tree dual.
template <Scalar T>
PrimalDualSolution<T> solve_primal_dual(const ValidatedInstance<T>& instance,
                                        PrimalOptions<T> options = {}) {
  require_finite_cost(instance->cost, "solve_dual");
  auto primal = solve_primal(instance, std::move(options));
  auto tree_dual = extract_dual_from_basis(primal, instance->cost);
  auto dual = improve_dual(tree_dual, instance->cost,
                           T(default_concavity_tol(instance->cost)));
  return {std::move(primal), std::move(dual)};
}

template <Scalar T>
DualPotentials<T> solve_dual(const ValidatedInstance<T>& instance,
                             PrimalOptions<T> options = {}) {
  return solve_primal_dual(instance, std::move(options)).dual;
}

}  // namespace otlab
