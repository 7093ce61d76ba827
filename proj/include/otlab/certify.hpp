#pragma once

#include <algorithm>
#include <cstdint>
#include <numeric>
#include <optional>
#include <vector>

#include "otlab/core.hpp"

namespace otlab {

inline constexpr std::uint64_t kDefaultEnumerationBudget = 10'000'000;

/// Cells carrying more than `support_tol` mass, row-major.
template <Scalar T>
std::vector<Cell> plan_support(const TransportPlan<T>& plan,
                               const T& support_tol = NumTraits<T>::support_tol()) {
  std::vector<Cell> cells;
  for (std::size_t i = 0; i < plan.rows(); ++i)
    for (std::size_t j = 0; j < plan.cols(); ++j)
      if (plan(i, j) > support_tol) cells.push_back({i, j});
  return cells;
}

template <Scalar T>
struct MarginalReport {
  T max_row_deviation{0};
  T max_col_deviation{0};
  bool negative_mass = false;
  bool pass = true;
};

template <Scalar T>
MarginalReport<T> check_marginals(const TransportPlan<T>& plan, const Marginal<T>& mu,
                                  const Marginal<T>& nu,
                                  const T& tol = NumTraits<T>::marginal_tol()) {
  if (plan.rows() != mu.size() || plan.cols() != nu.size()) {
    throw Error(ErrorCode::DimensionMismatch, "plan shape differs from marginals");
  }
  MarginalReport<T> report;
  std::vector<T> col_sums(plan.cols(), T(0));
  for (std::size_t i = 0; i < plan.rows(); ++i) {
    T row_sum(0);
    for (std::size_t j = 0; j < plan.cols(); ++j) {
      if (plan(i, j) < 0) report.negative_mass = true;
      row_sum += plan(i, j);
      col_sums[j] += plan(i, j);
    }
    T dev = abs_value(T(row_sum - mu[i]));
    if (dev > report.max_row_deviation) report.max_row_deviation = std::move(dev);
  }
  for (std::size_t j = 0; j < plan.cols(); ++j) {
    T dev = abs_value(T(col_sums[j] - nu[j]));
    if (dev > report.max_col_deviation) report.max_col_deviation = std::move(dev);
  }
  report.pass = !report.negative_mass && report.max_row_deviation <= tol &&
                report.max_col_deviation <= tol;
  return report;
}

/// plan_cost - dual_value for a feasible plan and feasible potentials.
template <Scalar T>
T duality_gap(const TransportPlan<T>& plan, const DualPotentials<T>& pot,
              const Instance<T>& instance,
              const T& feasibility_tol = NumTraits<T>::default_tol()) {
  if (!check_marginals(plan, instance.mu, instance.nu,
                       NumTraits<T>::exact ? T(0) : feasibility_tol).pass) {
    throw Error(ErrorCode::InfeasibleArguments, "plan marginals do not match (mu, nu)");
  }
  if (!is_dual_feasible(pot, instance.cost, feasibility_tol)) {
    throw Error(ErrorCode::InfeasibleArguments, "potentials violate phi + psi <= c");
  }
  const auto primal = plan_cost(plan, instance.cost);
  if (primal.is_infinite()) {
    throw Error(ErrorCode::InfeasibleArguments, "plan has infinite cost");
  }
  return primal.value() - dual_value(pot, instance.mu, instance.nu);
}

template <Scalar T>
struct SlacknessViolation {
  Cell cell;
  T mass;
  Extended<T> slack;
};

/// Support cells where phi(i) + psi(j) falls short of c(i,j) by more than tol.
template <Scalar T>
std::vector<SlacknessViolation<T>> check_slackness(
    const TransportPlan<T>& plan, const DualPotentials<T>& pot, const CostMatrix<T>& cost,
    const T& tol = NumTraits<T>::default_tol(),
    const T& support_tol = NumTraits<T>::support_tol()) {
  if (plan.rows() != cost.rows() || plan.cols() != cost.cols()) {
    throw Error(ErrorCode::DimensionMismatch, "plan shape differs from cost");
  }
  if (!is_dual_feasible(pot, cost, tol)) {
    throw Error(ErrorCode::InfeasiblePotentials, "potentials violate phi + psi <= c");
  }
  std::vector<SlacknessViolation<T>> out;
  for (const Cell c : plan_support(plan, support_tol)) {
    if (cost(c.row, c.col).is_infinite()) {
      out.push_back({c, plan(c.row, c.col), Extended<T>::infinity()});
      continue;
    }
    T slack = cost.at(c.row, c.col) - pot.phi[c.row] - pot.psi[c.col];
    if (slack > tol) out.push_back({c, plan(c.row, c.col), Extended<T>(std::move(slack))});
  }
  return out;
}

enum class LevelStatus { Pass, Fail, Skipped };

template <Scalar T>
struct CyclicViolation {
  /// Support cells in cycle order; cell q is re-targeted to the column of
  /// cell q+1 (cyclically).
  std::vector<Cell> cycle;
  Extended<T> current;
  Extended<T> permuted;
};

template <Scalar T>
struct CyclicLevel {
  std::size_t k = 0;
  LevelStatus status = LevelStatus::Pass;
  std::optional<CyclicViolation<T>> violation;
};

template <Scalar T>
struct CyclicReport {
  std::vector<CyclicLevel<T>> levels;
  std::uint64_t checks = 0;

  bool pass() const {
    return std::none_of(levels.begin(), levels.end(),
                        [](const auto& l) { return l.status == LevelStatus::Fail; });
  }
  std::optional<CyclicViolation<T>> first_violation() const {
    for (const auto& l : levels)
      if (l.violation) return l.violation;
    return std::nullopt;
  }
};

/// C(s, k) * (k-1)!, saturating at UINT64_MAX.
inline std::uint64_t cyclic_check_count(std::uint64_t s, std::uint64_t k) {
  if (k > s) return 0;
  constexpr auto cap = std::numeric_limits<std::uint64_t>::max();
  // C(s,k) * (k-1)! = s! / ((s-k)! * k)
  unsigned __int128 count = 1;
  for (std::uint64_t f = s - k + 1; f <= s; ++f) {
    count *= f;
    if (count > cap) return cap;
  }
  count /= k;
  return static_cast<std::uint64_t>(count);
}

namespace detail {

template <Scalar T>
std::optional<CyclicViolation<T>> scan_level(const std::vector<Cell>& support,
                                             const CostMatrix<T>& cost, std::size_t k,
                                             const T& tol, std::uint64_t& checks) {
  const std::size_t s = support.size();
  if (k > s) return std::nullopt;
  std::vector<std::size_t> pick(k);
  std::iota(pick.begin(), pick.end(), 0);
  std::vector<std::size_t> order(k);
  while (true) {
    // Cyclic orders of the chosen cells: first element fixed, rest permuted.
    std::iota(order.begin(), order.end(), 0);
    do {
      ++checks;
      Extended<T> current(T(0));
      Extended<T> permuted(T(0));
      for (std::size_t q = 0; q < k; ++q) {
        const Cell here = support[pick[order[q]]];
        const Cell next = support[pick[order[(q + 1) % k]]];
        current = current + cost(here.row, here.col);
        permuted = permuted + cost(here.row, next.col);
      }
      bool violated;
      if (current.is_infinite()) {
        violated = permuted.is_finite();
      } else {
        violated = permuted.is_finite() && current.value() > permuted.value() + tol;
      }
      if (violated) {
        CyclicViolation<T> v{{}, current, permuted};
        for (std::size_t q = 0; q < k; ++q) v.cycle.push_back(support[pick[order[q]]]);
        return v;
      }
    } while (std::next_permutation(order.begin() + 1, order.end()));

    // Next combination in lexicographic order.
    std::size_t pos = k;
    while (pos > 0 && pick[pos - 1] == s - k + pos - 1) --pos;
    if (pos == 0) return std::nullopt;
    ++pick[pos - 1];
    for (std::size_t q = pos; q < k; ++q) pick[q] = pick[q - 1] + 1;
  }
}

}  // namespace detail

/// For k = 2..k_max, every k-subset of support cells and every cyclic
/// re-targeting: sum c(x_q, y_q) <= sum c(x_q, y_next(q)) + tol. Throws
/// SupportTooLarge before enumerating when the total work exceeds `budget`.
template <Scalar T>
CyclicReport<T> check_cyclic_monotonicity(
    const TransportPlan<T>& plan, const CostMatrix<T>& cost, std::size_t k_max,
    const T& tol = NumTraits<T>::default_tol(),
    std::uint64_t budget = kDefaultEnumerationBudget,
    const T& support_tol = NumTraits<T>::support_tol()) {
  if (k_max < 2) throw Error(ErrorCode::InvalidArgument, "k_max must be at least 2");
  if (plan.rows() != cost.rows() || plan.cols() != cost.cols()) {
    throw Error(ErrorCode::DimensionMismatch, "plan shape differs from cost");
  }
  const auto support = plan_support(plan, support_tol);
  std::uint64_t planned = 0;
  for (std::size_t k = 2; k <= k_max; ++k) {
    const std::uint64_t level = cyclic_check_count(support.size(), k);
    if (level > budget - std::min(planned, budget)) {
      throw Error(ErrorCode::SupportTooLarge,
                  "cyclic enumeration up to k=" + std::to_string(k_max) + " over " +
                      std::to_string(support.size()) + " support cells exceeds budget " +
                      std::to_string(budget));
    }
    planned += level;
  }
  CyclicReport<T> report;
  for (std::size_t k = 2; k <= k_max; ++k) {
    CyclicLevel<T> level{k, LevelStatus::Pass, std::nullopt};
    level.violation = detail::scan_level(support, cost, k, tol, report.checks);
    if (level.violation) level.status = LevelStatus::Fail;
    report.levels.push_back(std::move(level));
  }
  return report;
}

template <Scalar T>
struct CertifyOptions {
  std::size_t k_max = 4;
  std::uint64_t budget = kDefaultEnumerationBudget;
  std::optional<T> gap_tol;        // default: 0 exact, 1e-9 * (1 + |c|) float
  std::optional<T> slackness_tol;  // same default
  std::optional<T> marginal_tol;   // default: 0 exact, 1e-12 float
  std::optional<T> support_tol;    // default: 0 exact, 1e-12 float
};

template <Scalar T>
struct Tolerances {
  T gap;
  T slackness;
  T marginal;
  T support;
};

template <Scalar T>
struct DualityCertificate {
  Mode mode = NumTraits<T>::mode;
  Tolerances<T> tolerances;
  std::size_t k_max = 0;
  /// Absent when the arguments are infeasible (gap undefined).
  std::optional<T> gap;
  Extended<T> primal_value;
  T dual_value{0};
  bool potentials_feasible = true;
  MarginalReport<T> marginals;
  std::vector<SlacknessViolation<T>> slackness;
  CyclicReport<T> cyclic;
  bool verdict = false;
};

/// Bundles every check on (plan, potentials). Levels of the cyclic check
/// that would exceed the enumeration budget are reported as skipped.
template <Scalar T>
DualityCertificate<T> certify(const Instance<T>& instance, const TransportPlan<T>& plan,
                              const DualPotentials<T>& pot, const CertifyOptions<T>& opt = {}) {
  DualityCertificate<T> cert;
  const T scale_tol = NumTraits<T>::exact ? T(0) : T(1e-9 * (1.0 + to_double(instance.cost.sup_norm())));
  cert.tolerances = Tolerances<T>{opt.gap_tol.value_or(scale_tol),
                                  opt.slackness_tol.value_or(scale_tol),
                                  opt.marginal_tol.value_or(NumTraits<T>::marginal_tol()),
                                  opt.support_tol.value_or(NumTraits<T>::support_tol())};
  const auto& tol = cert.tolerances;
  cert.k_max = opt.k_max;

  cert.marginals = check_marginals(plan, instance.mu, instance.nu, tol.marginal);
  cert.potentials_feasible = is_dual_feasible(pot, instance.cost, tol.slackness);
  cert.primal_value = plan_cost(plan, instance.cost);
  cert.dual_value = dual_value(pot, instance.mu, instance.nu);
  if (cert.marginals.pass && cert.potentials_feasible && cert.primal_value.is_finite()) {
    cert.gap = cert.primal_value.value() - cert.dual_value;
  }
  if (cert.potentials_feasible) {
    cert.slackness = check_slackness(plan, pot, instance.cost, tol.slackness, tol.support);
  }

  const auto support = plan_support(plan, tol.support);
  std::uint64_t remaining = opt.budget;
  for (std::size_t k = 2; k <= opt.k_max; ++k) {
    const std::uint64_t need = cyclic_check_count(support.size(), k);
    CyclicLevel<T> level{k, LevelStatus::Skipped, std::nullopt};
    if (need <= remaining) {
      remaining -= need;
      level.violation = detail::scan_level(support, instance.cost, k, tol.slackness,
                                           cert.cyclic.checks);
      level.status = level.violation ? LevelStatus::Fail : LevelStatus::Pass;
    }
    cert.cyclic.levels.push_back(std::move(level));
  }

  cert.verdict = cert.gap.has_value() && abs_value(*cert.gap) <= tol.gap &&
                 cert.marginals.pass && cert.potentials_feasible &&
                 cert.slackness.empty() && cert.cyclic.pass();
  return cert;
}

}  // namespace otlab
