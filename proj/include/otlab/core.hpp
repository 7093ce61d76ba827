#pragma once

#include <algorithm>
#include <optional>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "otlab/error.hpp"
#include "otlab/extended.hpp"
#include "otlab/matrix.hpp"
#include "otlab/scalar.hpp"

namespace otlab {

template <Scalar T>
struct FiniteSpace {
  std::vector<std::string> labels;
  std::optional<Matrix<T>> metric;

  std::size_t size() const { return labels.size(); }
  bool has_metric() const { return metric.has_value(); }
};

/// Labels "0".."n-1", no metric.
template <Scalar T>
FiniteSpace<T> indexed_space(std::size_t n) {
  FiniteSpace<T> space;
  for (std::size_t i = 0; i < n; ++i) space.labels.push_back(std::to_string(i));
  return space;
}

/// |X| x |Y| cost with entries in R u {+inf}. `bounded` is a declaration
/// by the producer of the instance; validation rejects a bounded cost that
/// carries an infinite entry.
template <Scalar T>
struct CostMatrix {
  Matrix<Extended<T>> entries;
  bool bounded = false;

  CostMatrix() = default;
  explicit CostMatrix(Matrix<Extended<T>> m, bool is_bounded = false)
      : entries(std::move(m)), bounded(is_bounded) {}
  CostMatrix(std::initializer_list<std::initializer_list<Extended<T>>> init)
      : entries(init) {}

  static CostMatrix from_finite(const Matrix<T>& m) {
    Matrix<Extended<T>> e(m.rows(), m.cols());
    for (std::size_t i = 0; i < m.rows(); ++i)
      for (std::size_t j = 0; j < m.cols(); ++j) e(i, j) = Extended<T>(m(i, j));
    return CostMatrix(std::move(e), true);
  }

  std::size_t rows() const { return entries.rows(); }
  std::size_t cols() const { return entries.cols(); }
  const Extended<T>& operator()(std::size_t i, std::size_t j) const {
    return entries(i, j);
  }

  /// True when every entry is finite, whatever the declared flag says.
  bool all_finite() const {
    return std::all_of(entries.data().begin(), entries.data().end(),
                       [](const Extended<T>& e) { return e.is_finite(); });
  }

  /// The finite value of (i,j); callers must have checked all_finite().
  const T& at(std::size_t i, std::size_t j) const { return entries(i, j).value(); }

  /// max |c(i,j)| over finite entries.
  T sup_norm() const {
    T best(0);
    for (const auto& e : entries.data()) {
      if (e.is_finite() && abs_value(e.value()) > best) best = abs_value(e.value());
    }
    return best;
  }
};

/// Throws UnboundedCost unless every entry is finite.
template <Scalar T>
void require_finite_cost(const CostMatrix<T>& cost, std::string_view what) {
  if (!cost.all_finite()) {
    throw Error(ErrorCode::UnboundedCost,
                std::string(what) + " requires a cost without +inf entries");
  }
}

template <Scalar T>
struct Marginal {
  std::vector<T> weights;

  std::size_t size() const { return weights.size(); }
  const T& operator[](std::size_t i) const { return weights[i]; }
};

template <Scalar T>
struct TransportPlan {
  Matrix<T> mass;

  std::size_t rows() const { return mass.rows(); }
  std::size_t cols() const { return mass.cols(); }
  const T& operator()(std::size_t i, std::size_t j) const { return mass(i, j); }
};

template <Scalar T>
struct DualPotentials {
  std::vector<T> phi;
  std::vector<T> psi;
};

template <Scalar T>
struct Instance {
  FiniteSpace<T> x;
  FiniteSpace<T> y;
  CostMatrix<T> cost;
  Marginal<T> mu;
  Marginal<T> nu;

  static constexpr Mode mode = NumTraits<T>::mode;
};

/// An instance whose invariants have been checked. Only validate_instance
/// can produce one.
template <Scalar T>
class ValidatedInstance {
 public:
  const Instance<T>& get() const { return instance_; }
  const Instance<T>* operator->() const { return &instance_; }

 private:
  template <Scalar U>
  friend ValidatedInstance<U> validate_instance(Instance<U> raw);
  explicit ValidatedInstance(Instance<T> inst) : instance_(std::move(inst)) {}

  Instance<T> instance_;
};

namespace detail {

template <Scalar T>
bool approx_leq(const T& a, const T& b, const T& tol) {
  return a <= b + tol;
}

template <Scalar T>
std::string label_or_index(const FiniteSpace<T>& s, std::size_t i) {
  return i < s.labels.size() ? s.labels[i] : std::to_string(i);
}

}  // namespace detail

template <Scalar T>
void validate_marginal(const Marginal<T>& m, std::size_t expected,
                       std::string_view name) {
  if (m.size() != expected) {
    throw Error(ErrorCode::DimensionMismatch,
                std::string(name) + " has " + std::to_string(m.size()) +
                    " weights, expected " + std::to_string(expected));
  }
  T total(0);
  for (std::size_t i = 0; i < m.size(); ++i) {
    if constexpr (!NumTraits<T>::exact) {
      if (!std::isfinite(m[i])) {
        throw Error(ErrorCode::InvalidArgument,
                    std::string(name) + " has a non-finite weight");
      }
    }
    if (m[i] < 0) {
      throw Error(ErrorCode::NegativeMass, std::string(name) + "[" +
                                               std::to_string(i) +
                                               "] = " + format_scalar(m[i]));
    }
    total += m[i];
  }
  if (abs_value(T(total - 1)) > NumTraits<T>::marginal_tol()) {
    throw Error(ErrorCode::MassNotOne,
                std::string(name) + " sums to " + format_scalar(total));
  }
}

/// Checks a metric (or pseudometric: distinct points at distance zero are
/// allowed) on n points. The tolerance only matters in float mode.
template <Scalar T>
void validate_metric(const Matrix<T>& d, std::size_t n, std::string_view name,
                     const T& tol = NumTraits<T>::default_tol()) {
  if (d.rows() != n || d.cols() != n) {
    throw Error(ErrorCode::DimensionMismatch,
                std::string(name) + " metric must be " + std::to_string(n) +
                    "x" + std::to_string(n));
  }
  for (std::size_t i = 0; i < n; ++i) {
    if (d(i, i) != 0) {
      throw Error(ErrorCode::MetricViolation, std::string(name) +
                                                  " metric has nonzero diagonal at " +
                                                  std::to_string(i));
    }
    for (std::size_t j = 0; j < n; ++j) {
      if (d(i, j) < 0) {
        throw Error(ErrorCode::MetricViolation,
                    std::string(name) + " metric is negative at (" +
                        std::to_string(i) + "," + std::to_string(j) + ")");
      }
      if (abs_value(T(d(i, j) - d(j, i))) > tol) {
        throw Error(ErrorCode::MetricViolation,
                    std::string(name) + " metric is not symmetric at (" +
                        std::to_string(i) + "," + std::to_string(j) + ")");
      }
    }
  }
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j)
      for (std::size_t k = 0; k < n; ++k) {
        if (!detail::approx_leq(d(i, k), T(d(i, j) + d(j, k)), tol)) {
          throw Error(ErrorCode::MetricViolation,
                      std::string(name) + " metric violates the triangle inequality on (" +
                          std::to_string(i) + "," + std::to_string(j) + "," +
                          std::to_string(k) + ")");
        }
      }
}

template <Scalar T>
void validate_space(const FiniteSpace<T>& s, std::string_view name) {
  if (s.labels.empty()) {
    throw Error(ErrorCode::DimensionMismatch, std::string(name) + " has no points");
  }
  std::set<std::string> seen;
  for (const auto& label : s.labels) {
    if (!seen.insert(label).second) {
      throw Error(ErrorCode::InvalidArgument,
                  std::string(name) + " has duplicate label '" + label + "'");
    }
  }
  if (s.metric) validate_metric(*s.metric, s.size(), name);
}

template <Scalar U>
ValidatedInstance<U> validate_instance(Instance<U> raw) {
  validate_space(raw.x, "X");
  validate_space(raw.y, "Y");
  if (raw.cost.rows() != raw.x.size() || raw.cost.cols() != raw.y.size()) {
    throw Error(ErrorCode::DimensionMismatch,
                "cost is " + std::to_string(raw.cost.rows()) + "x" +
                    std::to_string(raw.cost.cols()) + ", spaces are " +
                    std::to_string(raw.x.size()) + "x" + std::to_string(raw.y.size()));
  }
  if constexpr (!NumTraits<U>::exact) {
    for (const auto& e : raw.cost.entries.data()) {
      if (e.is_finite() && !std::isfinite(e.value())) {
        throw Error(ErrorCode::InvalidArgument, "cost has a NaN or infinite double entry");
      }
    }
  }
  if (raw.cost.bounded && !raw.cost.all_finite()) {
    throw Error(ErrorCode::InfiniteCostInBoundedMode,
                "cost is declared bounded but has +inf entries");
  }
  validate_marginal(raw.mu, raw.x.size(), "mu");
  validate_marginal(raw.nu, raw.y.size(), "nu");
  return ValidatedInstance<U>(std::move(raw));
}

/// sum_ij plan(i,j) * c(i,j), with 0 * inf = 0.
template <Scalar T>
Extended<T> plan_cost(const TransportPlan<T>& plan, const CostMatrix<T>& cost) {
  if (plan.rows() != cost.rows() || plan.cols() != cost.cols()) {
    throw Error(ErrorCode::DimensionMismatch, "plan and cost shapes differ");
  }
  T total(0);
  for (std::size_t i = 0; i < plan.rows(); ++i) {
    for (std::size_t j = 0; j < plan.cols(); ++j) {
      const auto term = weighted(plan(i, j), cost(i, j));
      if (term.is_infinite()) return Extended<T>::infinity();
      total += term.value();
    }
  }
  return Extended<T>(total);
}

template <Scalar T>
T dual_value(const DualPotentials<T>& pot, const Marginal<T>& mu,
             const Marginal<T>& nu) {
  if (pot.phi.size() != mu.size() || pot.psi.size() != nu.size()) {
    throw Error(ErrorCode::DimensionMismatch, "potentials and marginals differ in size");
  }
  T total(0);
  for (std::size_t i = 0; i < mu.size(); ++i) total += pot.phi[i] * mu[i];
  for (std::size_t j = 0; j < nu.size(); ++j) total += pot.psi[j] * nu[j];
  return total;
}

template <Scalar T>
TransportPlan<T> product_plan(const Marginal<T>& mu, const Marginal<T>& nu) {
  TransportPlan<T> plan{Matrix<T>(mu.size(), nu.size(), T(0))};
  for (std::size_t i = 0; i < mu.size(); ++i)
    for (std::size_t j = 0; j < nu.size(); ++j) plan.mass(i, j) = mu[i] * nu[j];
  return plan;
}

/// Largest phi[i] + psi[j] - c(i,j) over all cells (+inf cells never bind).
/// Nonpositive iff the pair is dual-feasible.
template <Scalar T>
T max_constraint_violation(const DualPotentials<T>& pot, const CostMatrix<T>& cost) {
  if (pot.phi.size() != cost.rows() || pot.psi.size() != cost.cols()) {
    throw Error(ErrorCode::DimensionMismatch, "potentials and cost differ in size");
  }
  std::optional<T> worst;
  for (std::size_t i = 0; i < cost.rows(); ++i)
    for (std::size_t j = 0; j < cost.cols(); ++j) {
      if (cost(i, j).is_infinite()) continue;
      T excess = pot.phi[i] + pot.psi[j] - cost.at(i, j);
      if (!worst || excess > *worst) worst = std::move(excess);
    }
  return worst.value_or(T(0));
}

template <Scalar T>
bool is_dual_feasible(const DualPotentials<T>& pot, const CostMatrix<T>& cost,
                      const T& tol = NumTraits<T>::default_tol()) {
  return max_constraint_violation(pot, cost) <= tol;
}

}  // namespace otlab
