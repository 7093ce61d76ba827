#include <doctest.h>

#include "otlab/ctransform.hpp"
#include "support.hpp"

using namespace otlab;
using namespace otlab::testing;

namespace {

using Vec = std::vector<Rational>;

Vec V(std::initializer_list<long> xs) {
  Vec v;
  for (long x : xs) v.emplace_back(x);
  return v;
}

// Independent reference: plain loops over a dense finite matrix.
Vec ref_c_transform(const Vec& phi, const CostMatrix<Rational>& c) {
  Vec out;
  for (std::size_t j = 0; j < c.cols(); ++j) {
    Rational best = c.at(0, j) - phi[0];
    for (std::size_t i = 1; i < c.rows(); ++i) best = std::min(best, Rational(c.at(i, j) - phi[i]));
    out.push_back(best);
  }
  return out;
}

}  // namespace

TEST_CASE("c_transform examples") {
  const auto c = cost_q({{0, 2}, {2, 1}});
  CHECK(c_transform(V({0, 0}), c) == V({0, 1}));
  CHECK(c_transform(V({0}), cost_q({{5, 7}})) == V({5, 7}));
}

TEST_CASE("cbar_transform examples") {
  CHECK(cbar_transform(V({0, 1}), cost_q({{0, 2}, {2, 1}})) == V({0, 0}));
  CHECK(cbar_transform(V({1}), cost_q({{4}, {6}})) == V({3, 5}));
}

TEST_CASE("transforms skip +inf cells and reject all-inf lines") {
  const auto inf = Extended<Rational>::infinity();
  CostMatrix<Rational> c{{Rational(0), inf}, {inf, inf}};
  c.bounded = false;
  CHECK(c_transform(V({0, 0}), CostMatrix<Rational>{{Rational(3), inf}, {Rational(1), Rational(4)}}) ==
        V({1, 4}));
  CHECK_THROWS_AS(c_transform(V({0, 0}), c), Error);
  try {
    cbar_transform(V({0, 0}), c);
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::UnboundedTransform);
  }
  CHECK_THROWS_AS(c_transform(V({0}), cost_q({{1}, {2}})), Error);
}

TEST_CASE("witness returns the smallest minimizing index") {
  const auto c = cost_q({{1, 0}, {1, 3}, {0, 3}});
  const auto w = c_transform_with_witness(V({0, 0, -1}), c);
  REQUIRE(w.size() == 2);
  CHECK(w[0].value == 1);
  CHECK(w[0].argmin == 0);
  CHECK(w[1].value == 0);
  CHECK(w[1].argmin == 0);
  const auto wb = cbar_transform_with_witness(V({0, 0}), cost_q({{2, 2}}));
  CHECK(wb[0].argmin == 0);
}

TEST_CASE("normalize_pair example and unbounded rejection") {
  const auto c = cost_q({{0, 2}, {2, 1}});
  const auto p = normalize_pair(V({0, 0}), c);
  CHECK(p.phi == V({0, 0}));
  CHECK(p.psi == V({0, 1}));

  CostMatrix<Rational> unbounded{{Rational(0), Extended<Rational>::infinity()}, {Rational(1), Rational(0)}};
  unbounded.bounded = false;
  try {
    normalize_pair(V({0, 0}), unbounded);
    FAIL("expected UnboundedCost");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::UnboundedCost);
  }
}

TEST_CASE("induced_pseudometric examples") {
  const auto c = cost_q({{0, 2}, {2, 1}});
  CHECK(induced_pseudometric(c, Axis::OverY)(0, 1) == 2);
  CHECK(induced_pseudometric(c, Axis::OverX)(0, 1) == 2);

  const Vec a = V({1, 4, -2});
  const Vec b = V({0, 3, 7, 2});
  Matrix<Extended<Rational>> sep(3, 4);
  for (std::size_t i = 0; i < 3; ++i)
    for (std::size_t j = 0; j < 4; ++j) sep(i, j) = Extended<Rational>(a[i] + b[j] + 5);
  const auto d = induced_pseudometric(CostMatrix<Rational>(sep, true), Axis::OverY);
  for (std::size_t j = 0; j < 4; ++j)
    for (std::size_t k = 0; k < 4; ++k) CHECK(d(j, k) == abs(b[j] - b[k]));

  const auto zero = induced_pseudometric(cost_q({{3, 3}, {3, 3}, {3, 3}}), Axis::OverX);
  for (std::size_t i = 0; i < 3; ++i)
    for (std::size_t k = 0; k < 3; ++k) CHECK(zero(i, k) == 0);
}

TEST_CASE("is_c_concave examples") {
  const auto c = cost_q({{0, 2}, {2, 1}});
  CHECK(is_c_concave(V({0, 0}), c));
  // Constant shifts of a c-concave potential stay c-concave.
  CHECK(is_c_concave(V({-10, -10}), c));
  CHECK(double_transform(V({-10, -10}), c) == V({-10, -10}));
  // phi(0) - phi(1) < -2 is lifted by the double transform.
  CHECK_FALSE(is_c_concave(V({-10, 0}), c));
  CHECK(double_transform(V({-10, 0}), c) == V({-2, 0}));
  CHECK(is_cbar_concave(c_transform(V({-10, 3}), c), c));
}

TEST_CASE("float concavity uses a scale-aware tolerance") {
  const auto c = CostMatrix<double>::from_finite(Matrix<double>{{0, 2}, {2, 1}});
  CHECK(default_concavity_tol(c) == doctest::Approx(3e-9));
  // Lifted by 1e-10, inside the default tolerance but not inside 0.
  const std::vector<double> near{-2.0 - 1e-10, 0.0};
  CHECK(is_c_concave(near, c));
  CHECK_FALSE(is_c_concave(near, c, 0.0));
  CHECK_FALSE(is_c_concave(std::vector<double>{-5.0, 0.0}, c));
  CHECK(default_concavity_tol(cost_q({{100}})) == 0);
}

TEST_CASE("property: transform calculus on random bounded costs") {
  RandomInstances gen(2024);
  for (int trial = 0; trial < 300; ++trial) {
    const auto m = static_cast<std::size_t>(gen.between(1, 5));
    const auto n = static_cast<std::size_t>(gen.between(1, 5));
    const auto c = gen.cost(m, n);
    const Vec phi = gen.potential(m);
    const Rational norm = c.sup_norm();

    const Vec phi_c = c_transform(phi, c);
    CHECK(phi_c == ref_c_transform(phi, c));
    const Vec phi_cc = cbar_transform(phi_c, c);
    const auto dy = induced_pseudometric(c, Axis::OverY);
    const auto dx = induced_pseudometric(c, Axis::OverX);

    for (std::size_t j = 0; j < n; ++j)
      for (std::size_t k = 0; k < n; ++k) CHECK(abs(phi_c[j] - phi_c[k]) <= dy(j, k));
    for (std::size_t i = 0; i < m; ++i)
      for (std::size_t k = 0; k < m; ++k) CHECK(abs(phi_cc[i] - phi_cc[k]) <= dx(i, k));

    for (std::size_t i = 0; i < m; ++i) CHECK(phi[i] <= phi_cc[i]);
    CHECK(is_dual_feasible(DualPotentials<Rational>{phi, phi_c}, c));
    CHECK(is_dual_feasible(DualPotentials<Rational>{phi_cc, phi_c}, c));
    CHECK(c_transform(phi_cc, c) == phi_c);
    CHECK(is_c_concave(phi_cc, c));

    // Any feasible psi sits below phi^c.
    Vec psi = phi_c;
    for (auto& v : psi) v -= Q(gen.between(0, 5), 2);
    CHECK(is_dual_feasible(DualPotentials<Rational>{phi, psi}, c));
    for (std::size_t j = 0; j < n; ++j) CHECK(psi[j] <= phi_c[j]);

    const auto p = normalize_pair(phi, c);
    CHECK(is_dual_feasible(p, c));
    for (const auto& v : p.psi) {
      CHECK(v >= 0);
      CHECK(v <= 2 * norm);
    }
    for (const auto& v : p.phi) {
      CHECK(v >= -3 * norm);
      CHECK(v <= norm);
    }

    Vec bigger = phi;
    for (auto& v : bigger) v += Q(gen.between(0, 6), 3);
    const Vec bigger_c = c_transform(bigger, c);
    for (std::size_t j = 0; j < n; ++j) CHECK(bigger_c[j] <= phi_c[j]);
  }
}

TEST_CASE("property: normalize_pair dominates (phi, phi^c) in value") {
  RandomInstances gen(77);
  for (int trial = 0; trial < 200; ++trial) {
    const auto inst = gen.instance_up_to(4);
    const Vec phi = gen.potential(inst.mu.size());
    const auto p = normalize_pair(phi, inst.cost);
    const DualPotentials<Rational> base{phi, c_transform(phi, inst.cost)};
    CHECK(dual_value(p, inst.mu, inst.nu) >= dual_value(base, inst.mu, inst.nu));
  }
}
