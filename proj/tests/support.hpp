#pragma once

// Test-only helpers: literal builders and a seeded random instance source.

#include <cstdint>
#include <random>
#include <string>
#include <vector>

#include "otlab/core.hpp"

namespace otlab::testing {

inline Rational Q(const char* text) { return parse_rational(text); }
inline Rational Q(long num, long den = 1) {
  Rational r(num, den);
  r.canonicalize();
  return r;
}

inline std::vector<Rational> Qs(std::initializer_list<const char*> items) {
  std::vector<Rational> out;
  for (const char* s : items) out.push_back(Q(s));
  return out;
}

template <Scalar T>
CostMatrix<T> finite_cost(const Matrix<T>& m) {
  return CostMatrix<T>::from_finite(m);
}

inline CostMatrix<Rational> cost_q(std::initializer_list<std::initializer_list<long>> rows) {
  Matrix<Extended<Rational>> m(rows.size(), rows.begin()->size());
  std::size_t i = 0;
  for (const auto& row : rows) {
    std::size_t j = 0;
    for (long v : row) m(i, j++) = Extended<Rational>(Rational(v));
    ++i;
  }
  return CostMatrix<Rational>(std::move(m), true);
}

template <Scalar T>
Instance<T> make_instance(CostMatrix<T> cost, std::vector<T> mu, std::vector<T> nu) {
  Instance<T> inst;
  inst.x = indexed_space<T>(mu.size());
  inst.y = indexed_space<T>(nu.size());
  inst.cost = std::move(cost);
  inst.mu.weights = std::move(mu);
  inst.nu.weights = std::move(nu);
  return inst;
}

/// mu = nu = [1/2, 1/2], c = [[0,2],[2,1]]: the running example.
inline Instance<Rational> diag_fixture() {
  return make_instance(cost_q({{0, 2}, {2, 1}}), Qs({"1/2", "1/2"}), Qs({"1/2", "1/2"}));
}

/// Seeded source of small rational instances. Marginals sometimes carry
/// zero-mass points and coincident partial sums so degenerate vertices show
/// up regularly.
class RandomInstances {
 public:
  explicit RandomInstances(std::uint64_t seed) : rng_(seed) {}

  std::int64_t between(std::int64_t lo, std::int64_t hi) {
    return lo + static_cast<std::int64_t>(rng_() % static_cast<std::uint64_t>(hi - lo + 1));
  }

  std::vector<Rational> marginal(std::size_t n) {
    std::vector<Rational> w;
    Rational total(0);
    const bool allow_zero = n > 1 && between(0, 3) == 0;
    const bool uniform = between(0, 4) == 0;
    for (std::size_t i = 0; i < n; ++i) {
      long v = uniform ? 1 : between(allow_zero ? 0 : 1, 6);
      w.emplace_back(v);
      total += w.back();
    }
    if (total == 0) {
      w[0] = 1;
      total = 1;
    }
    for (auto& x : w) x /= total;
    return w;
  }

  Rational cost_entry() { return Q(between(0, 24), between(1, 4)); }

  CostMatrix<Rational> cost(std::size_t m, std::size_t n) {
    Matrix<Extended<Rational>> c(m, n);
    for (std::size_t i = 0; i < m; ++i)
      for (std::size_t j = 0; j < n; ++j) c(i, j) = Extended<Rational>(cost_entry());
    return CostMatrix<Rational>(std::move(c), true);
  }

  std::vector<Rational> potential(std::size_t n) {
    std::vector<Rational> v;
    for (std::size_t i = 0; i < n; ++i) v.push_back(Q(between(-40, 40), between(1, 3)));
    return v;
  }

  /// Points on a line, possibly coincident-free, as a metric.
  Matrix<Rational> line_metric(std::size_t n) {
    std::vector<Rational> pts;
    Rational at(0);
    for (std::size_t i = 0; i < n; ++i) {
      at += Q(between(1, 6), between(1, 2));
      pts.push_back(at);
    }
    Matrix<Rational> d(n, n, Rational(0));
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = 0; j < n; ++j) d(i, j) = abs(pts[i] - pts[j]);
    return d;
  }

  Instance<Rational> instance(std::size_t m, std::size_t n, bool with_metrics = false) {
    auto inst = make_instance(cost(m, n), marginal(m), marginal(n));
    if (with_metrics) {
      inst.x.metric = line_metric(m);
      inst.y.metric = line_metric(n);
    }
    return inst;
  }

  Instance<Rational> instance_up_to(std::size_t max_side, bool with_metrics = false) {
    const auto m = static_cast<std::size_t>(between(1, static_cast<std::int64_t>(max_side)));
    const auto n = static_cast<std::size_t>(between(1, static_cast<std::int64_t>(max_side)));
    return instance(m, n, with_metrics);
  }

 private:
  std::mt19937_64 rng_;
};

}  // namespace otlab::testing
