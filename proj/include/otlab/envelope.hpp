#pragma once

#include <optional>
#include <vector>

#include "otlab/core.hpp"
#include "otlab/primal.hpp"

namespace otlab {

// Lipschitz regularization of a nonnegative cost:
//
//   c_n(i,j) = min_{k,l} { min(c(k,l), n) + n * (dX(i,k) + dY(j,l)) }
//
// c_n is n-Lipschitz for dX + dY, nondecreasing in n, and sits between 0
// and min(c, n).

namespace detail {

template <Scalar T>
void check_envelope_inputs(const CostMatrix<T>& cost, const Matrix<T>& dx,
                           const Matrix<T>& dy, const T& n) {
  if (dx.rows() != cost.rows() || dx.cols() != cost.rows() || dy.rows() != cost.cols() ||
      dy.cols() != cost.cols()) {
    throw Error(ErrorCode::DimensionMismatch, "metric sizes differ from the cost shape");
  }
  if (!(n > 0)) throw Error(ErrorCode::InvalidArgument, "envelope level must be positive");
  for (const auto& e : cost.entries.data()) {
    if (e.is_finite() && e.value() < 0) {
      throw Error(ErrorCode::NegativeCost, "envelope requires a nonnegative cost");
    }
  }
}

template <Scalar T>
T truncated(const Extended<T>& c, const T& n) {
  return (c.is_infinite() || c.value() > n) ? n : c.value();
}

}  // namespace detail

/// Direct evaluation over all (k,l) for every cell: O(|X|^2 |Y|^2).
template <Scalar T>
CostMatrix<T> lipschitz_envelope_direct(const CostMatrix<T>& cost, const Matrix<T>& dx,
                                        const Matrix<T>& dy, const T& n) {
  detail::check_envelope_inputs(cost, dx, dy, n);
  const std::size_t m = cost.rows();
  const std::size_t q = cost.cols();
  Matrix<Extended<T>> out(m, q);
  for (std::size_t i = 0; i < m; ++i)
    for (std::size_t j = 0; j < q; ++j) {
      std::optional<T> best;
      for (std::size_t k = 0; k < m; ++k)
        for (std::size_t l = 0; l < q; ++l) {
          T candidate = detail::truncated(cost(k, l), n) + n * (dx(i, k) + dy(j, l));
          if (!best || candidate < *best) best = std::move(candidate);
        }
      out(i, j) = Extended<T>(*best);
    }
  return CostMatrix<T>(std::move(out), true);
}

/// Same values as the direct form, as two one-axis inf-convolutions:
/// first over l for every (k, j), then over k.
template <Scalar T>
CostMatrix<T> lipschitz_envelope(const CostMatrix<T>& cost, const Matrix<T>& dx,
                                 const Matrix<T>& dy, const T& n) {
  detail::check_envelope_inputs(cost, dx, dy, n);
  const std::size_t m = cost.rows();
  const std::size_t q = cost.cols();
  Matrix<T> partial(m, q, T(0));
  for (std::size_t k = 0; k < m; ++k)
    for (std::size_t j = 0; j < q; ++j) {
      std::optional<T> best;
      for (std::size_t l = 0; l < q; ++l) {
        T candidate = detail::truncated(cost(k, l), n) + n * dy(j, l);
        if (!best || candidate < *best) best = std::move(candidate);
      }
      partial(k, j) = std::move(*best);
    }
  Matrix<Extended<T>> out(m, q);
  for (std::size_t i = 0; i < m; ++i)
    for (std::size_t j = 0; j < q; ++j) {
      std::optional<T> best;
      for (std::size_t k = 0; k < m; ++k) {
        T candidate = partial(k, j) + n * dx(i, k);
        if (!best || candidate < *best) best = std::move(candidate);
      }
      out(i, j) = Extended<T>(std::move(*best));
    }
  return CostMatrix<T>(std::move(out), true);
}

template <Scalar T>
void require_metrics(const Instance<T>& instance) {
  if (!instance.x.has_metric() || !instance.y.has_metric()) {
    throw Error(ErrorCode::MissingMetric, "the envelope needs metrics on both spaces");
  }
}

template <Scalar T>
CostMatrix<T> lipschitz_envelope(const Instance<T>& instance, const T& n) {
  require_metrics(instance);
  return lipschitz_envelope(instance.cost, *instance.x.metric, *instance.y.metric, n);
}

/// Smallest n with lipschitz_envelope(cost, n) == cost: the larger of
/// max c and the Lipschitz constant of c for dX + dY. Zero cost gives 0.
/// nullopt when two cells at distance 0 carry different costs, which no
/// finite level can reproduce.
template <Scalar T>
std::optional<T> saturation_index(const CostMatrix<T>& cost, const Matrix<T>& dx,
                                  const Matrix<T>& dy) {
  require_finite_cost(cost, "saturation_index");
  detail::check_envelope_inputs(cost, dx, dy, T(1));
  const std::size_t m = cost.rows();
  const std::size_t q = cost.cols();
  T level(0);
  for (const auto& e : cost.entries.data())
    if (e.value() > level) level = e.value();
  for (std::size_t i = 0; i < m; ++i)
    for (std::size_t j = 0; j < q; ++j)
      for (std::size_t k = 0; k < m; ++k)
        for (std::size_t l = 0; l < q; ++l) {
          const T rise = cost.at(i, j) - cost.at(k, l);
          if (!(rise > 0)) continue;
          const T distance = dx(i, k) + dy(j, l);
          if (!(distance > 0)) return std::nullopt;
          T breakpoint = rise / distance;
          if (breakpoint > level) level = std::move(breakpoint);
        }
  return level;
}

template <Scalar T>
std::optional<T> saturation_index(const Instance<T>& instance) {
  require_metrics(instance);
  return saturation_index(instance.cost, *instance.x.metric, *instance.y.metric);
}

template <Scalar T>
struct EnvelopeLevel {
  T n;
  CostMatrix<T> cost;
  T value;
};

template <Scalar T>
struct EnvelopeSchedule {
  std::vector<EnvelopeLevel<T>> levels;
  T limit_value;
  /// Smallest listed n whose value equals the limit.
  std::optional<T> saturation_level;
  /// v_1 <= v_2 <= ... <= limit held (within tolerance in float mode).
  bool monotone = true;
};

/// Solves the transport problem for every c_n in `levels` and for c itself.
template <Scalar T>
EnvelopeSchedule<T> envelope_schedule(const ValidatedInstance<T>& instance,
                                      const std::vector<T>& levels,
                                      PrimalOptions<T> options = {}) {
  require_metrics(instance.get());
  if (levels.empty()) throw Error(ErrorCode::InvalidArgument, "no envelope levels given");
  for (std::size_t k = 0; k < levels.size(); ++k) {
    if (!(levels[k] > 0) || (k > 0 && !(levels[k - 1] < levels[k]))) {
      throw Error(ErrorCode::InvalidArgument, "envelope levels must be positive and increasing");
    }
  }
  const auto limit = solve_primal(instance, options).value;
  if (limit.is_infinite()) {
    throw Error(ErrorCode::InfeasibleFiniteCost, "unregularized problem has infinite value");
  }
  T tol(0);
  if constexpr (!NumTraits<T>::exact) tol = 1e-9 * (1.0 + std::fabs(limit.value()));

  EnvelopeSchedule<T> schedule;
  schedule.limit_value = limit.value();
  for (const T& n : levels) {
    auto cost_n = lipschitz_envelope(instance.get(), n);
    T value = solve_transport(cost_n, instance->mu, instance->nu, options).value.value();
    if (!schedule.levels.empty() && value < schedule.levels.back().value - tol) {
      schedule.monotone = false;
    }
    if (value > schedule.limit_value + tol) schedule.monotone = false;
    if (!schedule.saturation_level && abs_value(T(value - schedule.limit_value)) <= tol) {
      schedule.saturation_level = n;
    }
    schedule.levels.push_back({n, std::move(cost_n), std::move(value)});
  }
  return schedule;
}

}  // namespace otlab
