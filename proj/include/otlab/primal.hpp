#pragma once

#include <algorithm>
#include <cstdint>
#include <deque>
#include <limits>
#include <vector>

#include "otlab/core.hpp"

namespace otlab {

template <Scalar T>
struct OptimalPlanResult {
  TransportPlan<T> plan;
  Extended<T> value;
  /// |X|+|Y|-1 cells forming a spanning tree of the bipartite graph; every
  /// positive-mass cell is in it, zero-mass basic cells complete the tree.
  std::vector<Cell> basis;
};

/// Greedy staircase fill. Always produces |X|+|Y|-1 basic cells forming a
/// spanning tree, some of which may carry zero mass.
template <Scalar T>
std::vector<std::pair<Cell, T>> northwest_corner_basis(const Marginal<T>& mu,
                                                       const Marginal<T>& nu) {
  const std::size_t m = mu.size();
  const std::size_t n = nu.size();
  std::vector<T> supply = mu.weights;
  std::vector<T> demand = nu.weights;
  std::vector<std::pair<Cell, T>> cells;
  cells.reserve(m + n - 1);
  std::size_t i = 0;
  std::size_t j = 0;
  while (true) {
    const bool row_done = supply[i] <= demand[j];
    T x = row_done ? supply[i] : demand[j];
    if (x < 0) x = T(0);
    supply[i] -= x;
    demand[j] -= x;
    cells.push_back({Cell{i, j}, std::move(x)});
    if (i == m - 1 && j == n - 1) break;
    if ((row_done && i < m - 1) || j == n - 1) {
      ++i;
    } else {
      ++j;
    }
  }
  return cells;
}

template <Scalar T>
TransportPlan<T> northwest_corner(const Marginal<T>& mu, const Marginal<T>& nu) {
  TransportPlan<T> plan{Matrix<T>(mu.size(), nu.size(), T(0))};
  for (auto& [cell, x] : northwest_corner_basis(mu, nu)) plan.mass(cell.row, cell.col) = x;
  return plan;
}

enum class PivotRule {
  /// Smallest-index entering and leaving cells throughout.
  Bland,
  /// Most negative reduced cost; falls back to Bland during long runs of
  /// degenerate pivots, which keeps the method finite.
  Hybrid,
};

template <Scalar T>
struct PrimalOptions {
  PivotRule rule = PivotRule::Hybrid;
  /// Reduced costs above -tol count as nonnegative. Unset: 0 in exact mode,
  /// 1e-10 * (1 + |c|) in float mode.
  std::optional<T> tol;
};

namespace detail {

/// Cost with a symbolic +inf part: (k, v) stands for k*M + v with M larger
/// than anything finite. Comparing lexicographically runs the simplex on the
/// +inf cells exactly without choosing a numeric M.
template <Scalar T>
struct LexCost {
  std::int64_t big = 0;
  T small = T(0);

  friend LexCost operator+(const LexCost& a, const LexCost& b) {
    return {a.big + b.big, T(a.small + b.small)};
  }
  friend LexCost operator-(const LexCost& a, const LexCost& b) {
    return {a.big - b.big, T(a.small - b.small)};
  }
};

template <Scalar T>
LexCost<T> lex_of(const Extended<T>& c) {
  return c.is_infinite() ? LexCost<T>{1, T(0)} : LexCost<T>{0, c.value()};
}

}  // namespace detail

/// Transportation simplex over the complete bipartite graph. Holds private
/// state for one solve; construct a new solver per problem.
template <Scalar T>
class TransportSimplex {
 public:
  TransportSimplex(const CostMatrix<T>& cost, const Marginal<T>& mu, const Marginal<T>& nu,
                   PrimalOptions<T> options = {})
      : cost_(cost), mu_(mu), nu_(nu), options_(std::move(options)),
        m_(mu.size()), n_(nu.size()) {
    if (cost.rows() != m_ || cost.cols() != n_) {
      throw Error(ErrorCode::DimensionMismatch, "cost shape differs from marginals");
    }
    if (m_ == 0 || n_ == 0) {
      throw Error(ErrorCode::DimensionMismatch, "empty marginal");
    }
    if (options_.tol) {
      tol_ = *options_.tol;
    } else if constexpr (NumTraits<T>::exact) {
      tol_ = T(0);
    } else {
      tol_ = 1e-10 * (1.0 + cost.sup_norm());
    }
  }

  OptimalPlanResult<T> solve() {
    initialize();
    bool bland_mode = options_.rule == PivotRule::Bland;
    std::size_t degenerate_streak = 0;
    const std::size_t streak_limit = m_ + n_;
    while (true) {
      compute_potentials();
      auto entering = select_entering(bland_mode);
      if (!entering) break;
      const bool degenerate = pivot(*entering, bland_mode);
      ++iterations_;
      if (options_.rule == PivotRule::Hybrid) {
        if (degenerate) {
          if (++degenerate_streak >= streak_limit) bland_mode = true;
        } else {
          degenerate_streak = 0;
          bland_mode = false;
        }
      }
    }
    return finish();
  }

  std::size_t iterations() const { return iterations_; }

 private:
  using Lex = detail::LexCost<T>;

  void initialize() {
    basis_.clear();
    flow_.clear();
    adjacency_.assign(m_ + n_, {});
    is_basic_.assign(m_ * n_, false);
    for (auto& [cell, x] : northwest_corner_basis(mu_, nu_)) add_basic(cell, std::move(x));
    u_.assign(m_, Lex{});
    v_.assign(n_, Lex{});
  }

  void add_basic(Cell cell, T x) {
    const std::size_t k = basis_.size();
    basis_.push_back(cell);
    flow_.push_back(std::move(x));
    adjacency_[cell.row].push_back(k);
    adjacency_[m_ + cell.col].push_back(k);
    is_basic_[cell.row * n_ + cell.col] = true;
  }

  static void erase_value(std::vector<std::size_t>& list, std::size_t k) {
    list.erase(std::find(list.begin(), list.end(), k));
  }

  /// Slot k takes a new cell; adjacency is rewired, index is reused.
  void replace_basic(std::size_t k, Cell cell, T x) {
    const Cell old = basis_[k];
    erase_value(adjacency_[old.row], k);
    erase_value(adjacency_[m_ + old.col], k);
    is_basic_[old.row * n_ + old.col] = false;
    basis_[k] = cell;
    flow_[k] = std::move(x);
    adjacency_[cell.row].push_back(k);
    adjacency_[m_ + cell.col].push_back(k);
    is_basic_[cell.row * n_ + cell.col] = true;
  }

  /// u(i) + v(j) = c(i,j) on basic cells, u(0) = 0.
  void compute_potentials() {
    std::vector<bool> seen(m_ + n_, false);
    std::vector<std::size_t> stack{0};
    seen[0] = true;
    u_[0] = Lex{};
    while (!stack.empty()) {
      const std::size_t node = stack.back();
      stack.pop_back();
      for (std::size_t k : adjacency_[node]) {
        const Cell c = basis_[k];
        const std::size_t other = node < m_ ? m_ + c.col : c.row;
        if (seen[other]) continue;
        seen[other] = true;
        const Lex cij = detail::lex_of(cost_(c.row, c.col));
        if (node < m_) {
          v_[c.col] = cij - u_[c.row];
        } else {
          u_[c.row] = cij - v_[c.col];
        }
        stack.push_back(other);
      }
    }
  }

  bool is_negative(const Lex& r) const {
    if (r.big != 0) return r.big < 0;
    return r.small < -tol_;
  }

  static bool lex_less(const Lex& a, const Lex& b) {
    if (a.big != b.big) return a.big < b.big;
    return a.small < b.small;
  }

  std::optional<Cell> select_entering(bool bland) const {
    std::optional<Cell> chosen;
    Lex best;
    for (std::size_t i = 0; i < m_; ++i) {
      for (std::size_t j = 0; j < n_; ++j) {
        if (is_basic_[i * n_ + j]) continue;
        const Lex reduced = detail::lex_of(cost_(i, j)) - u_[i] - v_[j];
        if (!is_negative(reduced)) continue;
        if (bland) return Cell{i, j};
        if (!chosen || lex_less(reduced, best)) {
          chosen = Cell{i, j};
          best = reduced;
        }
      }
    }
    return chosen;
  }

  /// Basis indices along the tree path from row node `i` to column node `j`.
  std::vector<std::size_t> tree_path(std::size_t row, std::size_t col) const {
    const std::size_t target = m_ + col;
    std::vector<std::size_t> via(m_ + n_, std::numeric_limits<std::size_t>::max());
    std::vector<bool> seen(m_ + n_, false);
    std::deque<std::size_t> queue{row};
    seen[row] = true;
    while (!queue.empty() && !seen[target]) {
      const std::size_t node = queue.front();
      queue.pop_front();
      for (std::size_t k : adjacency_[node]) {
        const Cell c = basis_[k];
        const std::size_t other = node < m_ ? m_ + c.col : c.row;
        if (seen[other]) continue;
        seen[other] = true;
        via[other] = k;
        queue.push_back(other);
      }
    }
    std::vector<std::size_t> path;  // from the column end back to the row
    for (std::size_t node = target; node != row;) {
      const std::size_t k = via[node];
      path.push_back(k);
      const Cell c = basis_[k];
      node = node < m_ ? m_ + c.col : c.row;
    }
    return path;
  }

  static std::size_t cell_index(Cell c, std::size_t n) { return c.row * n + c.col; }

  /// Returns true when the pivot moved zero mass.
  bool pivot(Cell entering, bool /*bland*/) {
    // path[0] touches the entering column; even positions lose mass.
    const auto path = tree_path(entering.row, entering.col);
    std::optional<std::size_t> leaving;
    for (std::size_t p = 0; p < path.size(); p += 2) {
      const std::size_t k = path[p];
      if (!leaving || flow_[k] < flow_[*leaving] ||
          (flow_[k] == flow_[*leaving] &&
           cell_index(basis_[k], n_) < cell_index(basis_[*leaving], n_))) {
        leaving = k;
      }
    }
    const T theta = flow_[*leaving];
    const bool degenerate = theta == 0;
    if (!degenerate) {
      for (std::size_t p = 0; p < path.size(); ++p) {
        if (p % 2 == 0) {
          flow_[path[p]] -= theta;
        } else {
          flow_[path[p]] += theta;
        }
      }
    }
    replace_basic(*leaving, entering, theta);
    return degenerate;
  }

  OptimalPlanResult<T> finish() const {
    OptimalPlanResult<T> result;
    result.plan.mass = Matrix<T>(m_, n_, T(0));
    for (std::size_t k = 0; k < basis_.size(); ++k) {
      const Cell c = basis_[k];
      if (cost_(c.row, c.col).is_infinite() && flow_[k] > NumTraits<T>::support_tol()) {
        throw Error(ErrorCode::InfeasibleFiniteCost,
                    "every feasible plan puts mass on a +inf cell");
      }
      result.plan.mass(c.row, c.col) = flow_[k];
    }
    result.basis = basis_;
    std::sort(result.basis.begin(), result.basis.end());
    result.value = plan_cost(result.plan, cost_);
    return result;
  }

  const CostMatrix<T>& cost_;
  const Marginal<T>& mu_;
  const Marginal<T>& nu_;
  PrimalOptions<T> options_;
  std::size_t m_;
  std::size_t n_;
  T tol_{0};

  std::vector<Cell> basis_;
  std::vector<T> flow_;
  std::vector<std::vector<std::size_t>> adjacency_;
  std::vector<bool> is_basic_;
  std::vector<Lex> u_;
  std::vector<Lex> v_;
  std::size_t iterations_ = 0;
};

/// Exact minimum of sum plan*cost over plans with marginals (mu, nu).
template <Scalar T>
OptimalPlanResult<T> solve_transport(const CostMatrix<T>& cost, const Marginal<T>& mu,
                                     const Marginal<T>& nu, PrimalOptions<T> options = {}) {
  TransportSimplex<T> solver(cost, mu, nu, std::move(options));
  return solver.solve();
}

template <Scalar T>
OptimalPlanResult<T> solve_primal(const ValidatedInstance<T>& instance,
                                  PrimalOptions<T> options = {}) {
  return solve_transport(instance->cost, instance->mu, instance->nu, std::move(options));
}

}  // namespace otlab
