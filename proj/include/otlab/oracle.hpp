#pragma once

#include <algorithm>
#include <cstdint>
#include <limits>
#include <numeric>
#include <optional>
#include <span>
#include <type_traits>
#include <vector>

#include "otlab/core.hpp"
#include "otlab/primal.hpp"

namespace otlab {

// Brute-force ground truth for small instances. Every vertex of the
// transportation polytope is the solution of the marginal equations on
// some spanning tree of K_{|X|,|Y|}; the oracle walks all spanning trees,
// keeps those whose tree solution is nonnegative and takes the cheapest.
//
// Trees are generated through their canonical leaf-removal order: the
// smallest-index leaf is removed first, as in a Pruefer decoding. Each tree
// has exactly one such order, so each tree is produced exactly once. A
// removed leaf's mass is fixed at removal time, which lets the walk drop a
// branch as soon as some remaining node would need negative mass.

inline constexpr std::uint64_t kDefaultOracleBudget = 100'000;

/// |X|^(|Y|-1) * |Y|^(|X|-1), saturating.
inline std::uint64_t spanning_tree_count(std::uint64_t m, std::uint64_t n) {
  if (m == 0 || n == 0) return 0;
  constexpr auto cap = std::numeric_limits<std::uint64_t>::max();
  unsigned __int128 count = 1;
  for (std::uint64_t k = 1; k < n; ++k) {
    count *= m;
    if (count > cap) return cap;
  }
  for (std::uint64_t k = 1; k < m; ++k) {
    count *= n;
    if (count > cap) return cap;
  }
  return static_cast<std::uint64_t>(count);
}

/// Canonical-order walker over the spanning trees of K_{m,n}. Nodes
/// 0..m-1 are X points, m..m+n-1 are Y points. `Mass` is the arithmetic
/// used for the tree solution.
template <typename Mass>
class SpanningTreeWalker {
 public:
  /// `mass` holds mu followed by nu. With `prune` off every spanning tree is
  /// visited, feasible or not.
  SpanningTreeWalker(std::size_t m, std::size_t n, std::vector<Mass> mass, bool prune,
                     Mass negative_tol = Mass(0))
      : m_(m), n_(n), rem_(std::move(mass)), prune_(prune), tol_(std::move(negative_tol)) {
    const std::size_t nodes = m + n;
    active_.assign(nodes, 1);
    need_.assign(nodes, 0);
    side_count_[0] = m;
    side_count_[1] = n;
    edges_.reserve(nodes);
    flows_.reserve(nodes);
  }

  /// visit(edges, flows) -> bool; returning false stops the walk.
  template <typename Visit>
  void run(Visit&& visit) {
    stopped_ = false;
    if (m_ == 0 || n_ == 0) return;
    active_total_ = m_ + n_;
    step(visit);
  }

  std::uint64_t nodes_expanded() const { return expanded_; }

 private:
  bool is_row(std::size_t node) const { return node < m_; }

  template <typename Visit>
  void step(Visit& visit) {
    if (stopped_) return;
    ++expanded_;
    const std::size_t nodes = m_ + n_;
    if (active_total_ == 2) {
      std::size_t r = nodes;
      std::size_t c = nodes;
      for (std::size_t k = 0; k < nodes; ++k) {
        if (!active_[k]) continue;
        (is_row(k) ? r : c) = k;
      }
      if (need_[r] || need_[c]) return;
      if (prune_ && rem_[r] < -tol_) return;
      edges_.push_back(Cell{r, c - m_});
      flows_.push_back(rem_[r]);
      if (!visit(std::span<const Cell>(edges_), std::span<const Mass>(flows_))) stopped_ = true;
      edges_.pop_back();
      flows_.pop_back();
      return;
    }
    std::size_t outstanding = 0;
    for (std::size_t k = 0; k < nodes; ++k) outstanding += active_[k] && need_[k];
    // Each remaining removal satisfies at most one pending requirement.
    if (outstanding > active_total_ - 2) return;

    std::vector<char> saved_need;
    for (std::size_t u = 0; u < nodes && !stopped_; ++u) {
      if (!active_[u] || need_[u]) continue;
      const int side = is_row(u) ? 0 : 1;
      if (side_count_[side] == 1) continue;
      const std::size_t lo = side == 0 ? m_ : 0;
      const std::size_t hi = side == 0 ? nodes : m_;
      for (std::size_t v = lo; v < hi && !stopped_; ++v) {
        if (!active_[v]) continue;
        Mass after = rem_[v] - rem_[u];
        if (prune_ && after < -tol_) continue;

        saved_need = need_;
        need_[v] = 0;
        for (std::size_t w = 0; w < u; ++w)
          if (active_[w] && w != v) need_[w] = 1;
        Mass before = rem_[v];
        rem_[v] = std::move(after);
        active_[u] = 0;
        --side_count_[side];
        --active_total_;
        edges_.push_back(side == 0 ? Cell{u, v - m_} : Cell{v, u - m_});
        flows_.push_back(rem_[u]);

        step(visit);

        edges_.pop_back();
        flows_.pop_back();
        ++active_total_;
        ++side_count_[side];
        active_[u] = 1;
        rem_[v] = std::move(before);
        need_.swap(saved_need);
      }
    }
  }

  std::size_t m_;
  std::size_t n_;
  std::vector<Mass> rem_;
  bool prune_;
  Mass tol_;
  std::vector<char> active_;
  std::vector<char> need_;
  std::size_t side_count_[2] = {0, 0};
  std::size_t active_total_ = 0;
  std::vector<Cell> edges_;
  std::vector<Mass> flows_;
  bool stopped_ = false;
  std::uint64_t expanded_ = 0;
};

struct OracleStats {
  std::uint64_t spanning_trees = 0;  // |X|^(|Y|-1) |Y|^(|X|-1)
  std::uint64_t feasible_trees = 0;  // trees whose solution is nonnegative
  std::uint64_t walk_nodes = 0;
};

template <Scalar T>
struct OracleOptions {
  std::uint64_t budget = kDefaultOracleBudget;  // max spanning trees
};

namespace detail {

inline void check_oracle_budget(std::size_t m, std::size_t n, std::uint64_t budget) {
  const auto trees = spanning_tree_count(m, n);
  if (trees > budget) {
    throw Error(ErrorCode::BudgetExceeded,
                std::to_string(m) + "x" + std::to_string(n) + " has " + std::to_string(trees) +
                    " spanning trees, budget is " + std::to_string(budget));
  }
}

/// Exact integer form of a rational instance: masses scaled by a common
/// denominator, costs by another, when both fit comfortably in 64 bits.
struct ScaledInstance {
  std::vector<std::int64_t> mass;  // mu then nu, times mass_scale
  std::vector<std::int64_t> cost;  // row-major, times cost_scale (0 for +inf)
  std::vector<char> infinite;
  mpz_class mass_scale;
  mpz_class cost_scale;
};

inline std::optional<ScaledInstance> scale_to_integers(const Instance<Rational>& inst) {
  ScaledInstance s;
  s.mass_scale = 1;
  for (const auto* marg : {&inst.mu, &inst.nu})
    for (const auto& w : marg->weights) mpz_lcm(s.mass_scale.get_mpz_t(), s.mass_scale.get_mpz_t(), w.get_den_mpz_t());
  s.cost_scale = 1;
  for (const auto& e : inst.cost.entries.data())
    if (e.is_finite())
      mpz_lcm(s.cost_scale.get_mpz_t(), s.cost_scale.get_mpz_t(), e.value().get_den_mpz_t());
  const mpz_class mass_limit = mpz_class(1) << 50;
  const mpz_class cost_limit = mpz_class(1) << 62;
  if (s.mass_scale >= mass_limit) return std::nullopt;
  for (const auto* marg : {&inst.mu, &inst.nu})
    for (const auto& w : marg->weights) {
      mpz_class v = w.get_num() * (s.mass_scale / w.get_den());
      s.mass.push_back(v.get_si());
    }
  for (const auto& e : inst.cost.entries.data()) {
    if (e.is_infinite()) {
      s.cost.push_back(0);
      s.infinite.push_back(1);
      continue;
    }
    mpz_class v = e.value().get_num() * (s.cost_scale / e.value().get_den());
    if (abs(v) >= cost_limit) return std::nullopt;
    s.cost.push_back(v.get_si());
    s.infinite.push_back(0);
  }
  return s;
}

/// Enumerates feasible trees of `inst` and hands each one, with its cost,
/// to `visit(edges, flows, cost)`. `cost` is nullopt for trees that put
/// mass on a +inf cell. Costs and flows are converted back to T.
template <Scalar T, typename Visit>
OracleStats walk_feasible_trees(const Instance<T>& inst, Visit&& visit) {
  const std::size_t m = inst.mu.size();
  const std::size_t n = inst.nu.size();
  OracleStats stats;
  stats.spanning_trees = spanning_tree_count(m, n);


  if constexpr (std::same_as<T, Rational>) {
    if (auto scaled = scale_to_integers(inst)) {
      std::vector<std::int64_t> mass = scaled->mass;
      SpanningTreeWalker<std::int64_t> walker(m, n, std::move(mass), true);
      const Rational denom(mpz_class(scaled->mass_scale * scaled->cost_scale));
      const Rational mass_denom(scaled->mass_scale);
      walker.run([&](std::span<const Cell> edges, std::span<const std::int64_t> flows) {
        ++stats.feasible_trees;
        __int128 total = 0;
        bool infinite = false;
        for (std::size_t k = 0; k < edges.size(); ++k) {
          if (flows[k] == 0) continue;
          const std::size_t idx = edges[k].row * n + edges[k].col;
          if (scaled->infinite[idx]) {
            infinite = true;
            break;
          }
          total += static_cast<__int128>(scaled->cost[idx]) * flows[k];
        }
        std::optional<__int128> key;
        if (!infinite) key = total;
        auto exact_cost = [&]() -> Rational {
          // Split the 128-bit total into two 64-bit halves for GMP.
          const bool negative = *key < 0;
          unsigned __int128 mag = negative ? -static_cast<unsigned __int128>(*key)
                                           : static_cast<unsigned __int128>(*key);
          mpz_class hi(static_cast<unsigned long>(mag >> 64));
          mpz_class lo(static_cast<unsigned long>(mag & 0xFFFFFFFFFFFFFFFFULL));
          mpz_class v = (hi << 64) + lo;
          if (negative) v = -v;
          Rational r(v);
          r /= denom;
          return r;
        };
        auto flow_of = [&](std::size_t k) { return Rational(Rational(flows[k]) / mass_denom); };
        return visit(edges, key, exact_cost, flow_of);
      });
      stats.walk_nodes = walker.nodes_expanded();
      return stats;
    }
  }

  std::vector<T> mass = inst.mu.weights;
  mass.insert(mass.end(), inst.nu.weights.begin(), inst.nu.weights.end());
  const T negative_tol = NumTraits<T>::exact ? T(0) : T(1e-12);
  SpanningTreeWalker<T> walker(m, n, std::move(mass), true, negative_tol);
  walker.run([&](std::span<const Cell> edges, std::span<const T> flows) {
    ++stats.feasible_trees;
    T total(0);
    bool infinite = false;
    for (std::size_t k = 0; k < edges.size(); ++k) {
      if (!(flows[k] > NumTraits<T>::support_tol())) continue;
      const auto& c = inst.cost(edges[k].row, edges[k].col);
      if (c.is_infinite()) {
        infinite = true;
        break;
      }
      total += c.value() * flows[k];
    }
    std::optional<T> key;
    if (!infinite) key = total;
    auto exact_cost = [&]() -> T { return *key; };
    auto flow_of = [&](std::size_t k) -> T {
      T f = flows[k];
      if constexpr (!NumTraits<T>::exact) f = std::max(f, 0.0);
      return f;
    };
    return visit(edges, key, exact_cost, flow_of);
  });
  stats.walk_nodes = walker.nodes_expanded();
  return stats;
}

}  // namespace detail

template <Scalar T>
struct OracleResult {
  OptimalPlanResult<T> optimum;
  OracleStats stats;
};

template <Scalar T>
OracleResult<T> oracle_primal_with_stats(const ValidatedInstance<T>& instance,
                                         const OracleOptions<T>& options = {}) {
  const auto& inst = instance.get();
  const std::size_t m = inst.mu.size();
  const std::size_t n = inst.nu.size();
  detail::check_oracle_budget(m, n, options.budget);

  std::optional<__int128> best_scaled;
  std::optional<T> best_key;
  std::optional<T> best_cost;
  std::vector<Cell> best_edges;
  std::vector<T> best_flows;
  bool any_feasible = false;
  auto stats = detail::walk_feasible_trees(
      inst, [&](std::span<const Cell> edges, const auto& key, auto&& exact_cost, auto&& flow_of) {
        any_feasible = true;
        if (!key) return true;
        // Strict improvement only: the first optimal tree in walk order wins.
        using Key = std::decay_t<decltype(*key)>;
        if constexpr (std::is_same_v<Key, __int128>) {
          if (best_scaled && !(*key < *best_scaled)) return true;
          best_scaled = *key;
        } else {
          if (best_key && !(*key < *best_key)) return true;
          best_key = *key;
        }
        best_cost = exact_cost();
        best_edges.assign(edges.begin(), edges.end());
        best_flows.clear();
        for (std::size_t k = 0; k < edges.size(); ++k) best_flows.push_back(flow_of(k));
        return true;
      });
  if (!best_cost) {
    throw Error(any_feasible ? ErrorCode::InfeasibleFiniteCost : ErrorCode::InvalidArgument,
                any_feasible ? "every vertex puts mass on a +inf cell"
                             : "no feasible spanning tree (marginals unbalanced?)");
  }
  OracleResult<T> result;
  result.stats = stats;
  result.optimum.plan.mass = Matrix<T>(m, n, T(0));
  for (std::size_t k = 0; k < best_edges.size(); ++k)
    result.optimum.plan.mass(best_edges[k].row, best_edges[k].col) = best_flows[k];
  result.optimum.basis = best_edges;
  std::sort(result.optimum.basis.begin(), result.optimum.basis.end());
  result.optimum.value = plan_cost(result.optimum.plan, inst.cost);
  return result;
}

template <Scalar T>
OptimalPlanResult<T> oracle_primal(const ValidatedInstance<T>& instance,
                                   const OracleOptions<T>& options = {}) {
  return oracle_primal_with_stats(instance, options).optimum;
}

/// Potentials from an optimal tree: phi(0) = 0 and phi + psi = c along the
/// tree. The first optimal tree (walk order) whose potentials are feasible
/// everywhere is used.
template <Scalar T>
DualPotentials<T> oracle_dual(const ValidatedInstance<T>& instance,
                              const OracleOptions<T>& options = {}) {
  const auto& inst = instance.get();
  require_finite_cost(inst.cost, "oracle_dual");
  const T optimum = oracle_primal(instance, options).value.value();
  const std::size_t m = inst.mu.size();
  const std::size_t n = inst.nu.size();
  T tol(0);
  if constexpr (!NumTraits<T>::exact) tol = 1e-9 * (1.0 + inst.cost.sup_norm());

  std::optional<DualPotentials<T>> found;
  detail::walk_feasible_trees(
      inst, [&](std::span<const Cell> edges, const auto& key, auto&& exact_cost, auto&&) {
        if (!key) return true;
        if (abs_value(T(exact_cost() - optimum)) > tol) return true;
        DualPotentials<T> pot{std::vector<T>(m, T(0)), std::vector<T>(n, T(0))};
        std::vector<char> row_set(m, 0);
        std::vector<char> col_set(n, 0);
        row_set[0] = 1;
        // Trees are connected: sweep until every node is assigned.
        for (std::size_t assigned = 1; assigned < m + n;) {
          for (const Cell e : edges) {
            if (row_set[e.row] && !col_set[e.col]) {
              pot.psi[e.col] = inst.cost.at(e.row, e.col) - pot.phi[e.row];
              col_set[e.col] = 1;
              ++assigned;
            } else if (!row_set[e.row] && col_set[e.col]) {
              pot.phi[e.row] = inst.cost.at(e.row, e.col) - pot.psi[e.col];
              row_set[e.row] = 1;
              ++assigned;
            }
          }
        }
        if (max_constraint_violation(pot, inst.cost) > tol) return true;
        found = std::move(pot);
        return false;
      });
  if (!found) {
    throw Error(ErrorCode::NoFeasibleTreeDual, "no optimal tree yields feasible potentials");
  }
  return *found;
}

}  // namespace otlab
