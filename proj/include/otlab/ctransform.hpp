#pragma once

#include <optional>
#include <vector>

#include "otlab/core.hpp"

namespace otlab {

// c-transform calculus over a finite cost matrix.
//
//   phi^c(j)    = min_i { c(i,j) - phi(i) }     (a potential over Y)
//   psi^cbar(i) = min_j { c(i,j) - psi(j) }     (a potential over X)
//
// +inf entries never attain the minimum; a row or column that is entirely
// +inf has no real-valued transform and raises UnboundedTransform.

enum class Axis { OverX, OverY };

template <Scalar T>
struct PseudometricMatrix {
  Matrix<T> entries;
  Axis axis = Axis::OverY;

  std::size_t size() const { return entries.rows(); }
  const T& operator()(std::size_t a, std::size_t b) const { return entries(a, b); }
};

template <Scalar T>
struct TransformEntry {
  T value;
  std::size_t argmin = 0;  // smallest minimizing index
};

template <Scalar T>
std::vector<TransformEntry<T>> c_transform_with_witness(const std::vector<T>& phi,
                                                        const CostMatrix<T>& cost) {
  if (phi.size() != cost.rows()) {
    throw Error(ErrorCode::DimensionMismatch, "phi length differs from |X|");
  }
  std::vector<TransformEntry<T>> out;
  out.reserve(cost.cols());
  for (std::size_t j = 0; j < cost.cols(); ++j) {
    std::optional<TransformEntry<T>> best;
    for (std::size_t i = 0; i < cost.rows(); ++i) {
      if (cost(i, j).is_infinite()) continue;
      T candidate = cost.at(i, j) - phi[i];
      if (!best || candidate < best->value) best = TransformEntry<T>{std::move(candidate), i};
    }
    if (!best) {
      throw Error(ErrorCode::UnboundedTransform,
                  "column " + std::to_string(j) + " is entirely +inf");
    }
    out.push_back(std::move(*best));
  }
  return out;
}

template <Scalar T>
std::vector<TransformEntry<T>> cbar_transform_with_witness(const std::vector<T>& psi,
                                                           const CostMatrix<T>& cost) {
  if (psi.size() != cost.cols()) {
    throw Error(ErrorCode::DimensionMismatch, "psi length differs from |Y|");
  }
  std::vector<TransformEntry<T>> out;
  out.reserve(cost.rows());
  for (std::size_t i = 0; i < cost.rows(); ++i) {
    std::optional<TransformEntry<T>> best;
    for (std::size_t j = 0; j < cost.cols(); ++j) {
      if (cost(i, j).is_infinite()) continue;
      T candidate = cost.at(i, j) - psi[j];
      if (!best || candidate < best->value) best = TransformEntry<T>{std::move(candidate), j};
    }
    if (!best) {
      throw Error(ErrorCode::UnboundedTransform,
                  "row " + std::to_string(i) + " is entirely +inf");
    }
    out.push_back(std::move(*best));
  }
  return out;
}

namespace detail {
template <Scalar T>
std::vector<T> values_of(std::vector<TransformEntry<T>> entries) {
  std::vector<T> out;
  out.reserve(entries.size());
  for (auto& e : entries) out.push_back(std::move(e.value));
  return out;
}
}  // namespace detail

template <Scalar T>
std::vector<T> c_transform(const std::vector<T>& phi, const CostMatrix<T>& cost) {
  return detail::values_of(c_transform_with_witness(phi, cost));
}

template <Scalar T>
std::vector<T> cbar_transform(const std::vector<T>& psi, const CostMatrix<T>& cost) {
  return detail::values_of(cbar_transform_with_witness(psi, cost));
}

/// phi^{c cbar}
template <Scalar T>
std::vector<T> double_transform(const std::vector<T>& phi, const CostMatrix<T>& cost) {
  return cbar_transform(c_transform(phi, cost), cost);
}

/// (phi^{c cbar} + m, phi^c - m) with m = min_j phi^c(j). The psi part lands
/// in [0, 2|c|] and the phi part in [-3|c|, |c|].
template <Scalar T>
DualPotentials<T> normalize_pair(const std::vector<T>& phi, const CostMatrix<T>& cost) {
  require_finite_cost(cost, "normalize_pair");
  std::vector<T> psi = c_transform(phi, cost);
  std::vector<T> lifted = cbar_transform(psi, cost);
  T shift = *std::min_element(psi.begin(), psi.end());
  for (auto& v : lifted) v += shift;
  for (auto& v : psi) v -= shift;
  return {std::move(lifted), std::move(psi)};
}

/// OverY: d(j,j') = max_i |c(i,j) - c(i,j')|.
/// OverX: d(i,i') = max_j |c(i,j) - c(i',j)|.
template <Scalar T>
PseudometricMatrix<T> induced_pseudometric(const CostMatrix<T>& cost, Axis axis) {
  require_finite_cost(cost, "induced_pseudometric");
  const bool over_y = axis == Axis::OverY;
  const std::size_t n = over_y ? cost.cols() : cost.rows();
  const std::size_t other = over_y ? cost.rows() : cost.cols();
  PseudometricMatrix<T> d{Matrix<T>(n, n, T(0)), axis};
  for (std::size_t a = 0; a < n; ++a) {
    for (std::size_t b = a + 1; b < n; ++b) {
      T best(0);
      for (std::size_t k = 0; k < other; ++k) {
        const T& ca = over_y ? cost.at(k, a) : cost.at(a, k);
        const T& cb = over_y ? cost.at(k, b) : cost.at(b, k);
        T diff = abs_value(T(ca - cb));
        if (diff > best) best = std::move(diff);
      }
      d.entries(a, b) = best;
      d.entries(b, a) = best;
    }
  }
  return d;
}

/// Scale-aware default: 0 in exact mode, 1e-9 * (1 + |c|) in float mode.
template <Scalar T>
T default_concavity_tol(const CostMatrix<T>& cost) {
  if constexpr (NumTraits<T>::exact) {
    return T(0);
  } else {
    return 1e-9 * (1.0 + cost.sup_norm());
  }
}

namespace detail {
template <Scalar T>
T sup_distance(const std::vector<T>& a, const std::vector<T>& b) {
  T worst(0);
  for (std::size_t i = 0; i < a.size(); ++i) {
    T diff = abs_value(T(a[i] - b[i]));
    if (diff > worst) worst = std::move(diff);
  }
  return worst;
}
}  // namespace detail

/// phi is c-concave iff it is a fixed point of the double transform.
template <Scalar T>
bool is_c_concave(const std::vector<T>& phi, const CostMatrix<T>& cost, const T& tol) {
  require_finite_cost(cost, "is_c_concave");
  return detail::sup_distance(double_transform(phi, cost), phi) <= tol;
}

template <Scalar T>
bool is_c_concave(const std::vector<T>& phi, const CostMatrix<T>& cost) {
  return is_c_concave(phi, cost, default_concavity_tol(cost));
}

/// Mirror check for potentials over Y: psi == psi^{cbar c}.
template <Scalar T>
bool is_cbar_concave(const std::vector<T>& psi, const CostMatrix<T>& cost, const T& tol) {
  require_finite_cost(cost, "is_cbar_concave");
  return detail::sup_distance(c_transform(cbar_transform(psi, cost), cost), psi) <= tol;
}

template <Scalar T>
bool is_cbar_concave(const std::vector<T>& psi, const CostMatrix<T>& cost) {
  return is_cbar_concave(psi, cost, default_concavity_tol(cost));
}

}  // namespace otlab
