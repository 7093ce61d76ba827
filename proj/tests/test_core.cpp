#include <doctest.h>

#include "otlab/core.hpp"
#include "otlab/primal.hpp"
#include "support.hpp"

using namespace otlab;
using namespace otlab::testing;

namespace {

ErrorCode code_of(const std::function<void()>& f) {
  try {
    f();
  } catch (const Error& e) {
    return e.code();
  }
  FAIL("expected an otlab::Error");
  return ErrorCode::InvalidArgument;
}

}  // namespace

TEST_CASE("validate_instance accepts the 2x2 swap instance") {
  auto inst = make_instance(cost_q({{0, 1}, {1, 0}}), Qs({"1/2", "1/2"}), Qs({"1/2", "1/2"}));
  CHECK_NOTHROW(validate_instance(inst));
}

TEST_CASE("validate_instance error paths") {
  SUBCASE("mass not one") {
    auto inst = make_instance(cost_q({{0, 1}, {1, 0}}), Qs({"0.6", "0.6"}), Qs({"1/2", "1/2"}));
    CHECK(code_of([&] { validate_instance(inst); }) == ErrorCode::MassNotOne);
  }
  SUBCASE("float mass not one") {
    auto inst = make_instance(CostMatrix<double>::from_finite(Matrix<double>{{0, 1}, {1, 0}}),
                              std::vector<double>{0.6, 0.6}, std::vector<double>{0.5, 0.5});
    CHECK(code_of([&] { validate_instance(inst); }) == ErrorCode::MassNotOne);
  }
  SUBCASE("negative mass") {
    auto inst = make_instance(cost_q({{0, 1}, {1, 0}}), Qs({"3/2", "-1/2"}), Qs({"1/2", "1/2"}));
    CHECK(code_of([&] { validate_instance(inst); }) == ErrorCode::NegativeMass);
  }
  SUBCASE("dimension mismatch") {
    auto inst = make_instance(cost_q({{0, 1, 2}, {1, 0, 2}}), Qs({"1/2", "1/2"}), Qs({"1/2", "1/2"}));
    CHECK(code_of([&] { validate_instance(inst); }) == ErrorCode::DimensionMismatch);
  }
  SUBCASE("metric triangle violation names the triple") {
    auto inst = make_instance(cost_q({{0, 1, 2}, {1, 0, 2}, {2, 2, 0}}), Qs({"1/3", "1/3", "1/3"}),
                              Qs({"1/3", "1/3", "1/3"}));
    inst.x.metric = Matrix<Rational>{{0, 5, 10}, {5, 0, 1}, {10, 1, 0}};
    try {
      validate_instance(inst);
      FAIL("expected MetricViolation");
    } catch (const Error& e) {
      CHECK(e.code() == ErrorCode::MetricViolation);
      CHECK(std::string(e.what()).find("(0,1,2)") != std::string::npos);
    }
  }
  SUBCASE("infinite cost in bounded mode") {
    CostMatrix<Rational> c{{Rational(0), Extended<Rational>::infinity()}, {Rational(1), Rational(0)}};
    c.bounded = true;
    auto inst = make_instance(c, Qs({"1/2", "1/2"}), Qs({"1/2", "1/2"}));
    CHECK(code_of([&] { validate_instance(inst); }) == ErrorCode::InfiniteCostInBoundedMode);
    inst.cost.bounded = false;
    CHECK_NOTHROW(validate_instance(inst));
  }
  SUBCASE("duplicate labels") {
    auto inst = diag_fixture();
    inst.x.labels = {"a", "a"};
    CHECK(code_of([&] { validate_instance(inst); }) == ErrorCode::InvalidArgument);
  }
}

TEST_CASE("plan_cost") {
  TransportPlan<Rational> one{Matrix<Rational>{{1}}};
  CHECK(plan_cost(one, cost_q({{5}})) == Extended<Rational>(Rational(5)));

  TransportPlan<Rational> diag{Matrix<Rational>{{Q("1/2"), 0}, {0, Q("1/2")}}};
  CHECK(plan_cost(diag, cost_q({{0, 1}, {1, 0}})) == Extended<Rational>(Rational(0)));
  CHECK(plan_cost(diag, cost_q({{0, 2}, {2, 1}})) == Extended<Rational>(Q("1/2")));

  SUBCASE("0 * inf contributes nothing, positive mass on inf is inf") {
    CostMatrix<Rational> c{{Rational(0), Extended<Rational>::infinity()}, {Rational(3), Rational(0)}};
    CHECK(plan_cost(diag, c) == Extended<Rational>(Rational(0)));
    TransportPlan<Rational> anti{Matrix<Rational>{{0, Q("1/2")}, {Q("1/2"), 0}}};
    CHECK(plan_cost(anti, c).is_infinite());
  }
  SUBCASE("shape mismatch") {
    CHECK(code_of([&] { plan_cost(one, cost_q({{1, 2}})); }) == ErrorCode::DimensionMismatch);
  }
}

TEST_CASE("dual_value") {
  Marginal<Rational> half{Qs({"1/2", "1/2"})};
  CHECK(dual_value(DualPotentials<Rational>{{0, 0}, {0, 1}}, half, half) == Q("1/2"));
  CHECK(dual_value(DualPotentials<Rational>{{0, 0}, {0, 0}}, half, half) == 0);
  Marginal<Rational> skew{Qs({"1/5", "4/5"})};
  CHECK(dual_value(DualPotentials<Rational>{{1, 1}, {-1, -1}}, skew, half) == 0);
}

TEST_CASE("product_plan") {
  Marginal<Rational> mu{Qs({"1/2", "1/2"})};
  Marginal<Rational> nu{Qs({"3/10", "7/10"})};
  auto p = product_plan(mu, nu);
  CHECK(p.mass == Matrix<Rational>{{Q("3/20"), Q("7/20")}, {Q("3/20"), Q("7/20")}});
  CHECK(product_plan(Marginal<Rational>{{1}}, Marginal<Rational>{{1}}).mass == Matrix<Rational>{{1}});
}

TEST_CASE("property: weak duality, shift invariance, linearity, product feasibility") {
  RandomInstances gen(11);
  for (int trial = 0; trial < 200; ++trial) {
    const auto inst = gen.instance_up_to(5);
    const std::size_t m = inst.mu.size();
    const std::size_t n = inst.nu.size();

    const auto prod = product_plan(inst.mu, inst.nu);
    for (std::size_t i = 0; i < m; ++i) {
      Rational row(0);
      for (std::size_t j = 0; j < n; ++j) row += prod(i, j);
      CHECK(row == inst.mu[i]);
    }
    for (std::size_t j = 0; j < n; ++j) {
      Rational col(0);
      for (std::size_t i = 0; i < m; ++i) col += prod(i, j);
      CHECK(col == inst.nu[j]);
    }

    // Feasible potentials: phi = 0, psi = column minima.
    DualPotentials<Rational> pot{std::vector<Rational>(m, 0), std::vector<Rational>(n, 0)};
    for (std::size_t j = 0; j < n; ++j) {
      pot.psi[j] = inst.cost.at(0, j);
      for (std::size_t i = 1; i < m; ++i) pot.psi[j] = std::min(pot.psi[j], inst.cost.at(i, j));
    }
    REQUIRE(is_dual_feasible(pot, inst.cost));
    const auto nw = northwest_corner(inst.mu, inst.nu);
    const Rational dv = dual_value(pot, inst.mu, inst.nu);
    CHECK(dv <= plan_cost(prod, inst.cost).value());
    CHECK(dv <= plan_cost(nw, inst.cost).value());

    DualPotentials<Rational> shifted = pot;
    const Rational a = gen.cost_entry() - 3;
    for (auto& v : shifted.phi) v += a;
    for (auto& v : shifted.psi) v -= a;
    CHECK(dual_value(shifted, inst.mu, inst.nu) == dv);

    const Rational lambda = Q(gen.between(0, 10), 10);
    TransportPlan<Rational> mix{Matrix<Rational>(m, n, 0)};
    for (std::size_t i = 0; i < m; ++i)
      for (std::size_t j = 0; j < n; ++j)
        mix.mass(i, j) = lambda * prod(i, j) + (1 - lambda) * nw(i, j);
    CHECK(plan_cost(mix, inst.cost).value() ==
          lambda * plan_cost(prod, inst.cost).value() +
              (1 - lambda) * plan_cost(nw, inst.cost).value());
  }
}

TEST_CASE("parse_rational and formatting") {
  CHECK(parse_rational("3/4") == Q(3, 4));
  CHECK(parse_rational("6/8") == Q(3, 4));
  CHECK(parse_rational("0.25") == Q(1, 4));
  CHECK(parse_rational("-1.5e1") == Q(-15));
  CHECK(parse_rational("2e-2") == Q(1, 50));
  CHECK(parse_rational(" 7 ") == Q(7));
  CHECK(format_scalar(Rational(0)) == "0/1");
  CHECK(format_scalar(Q(-3, 6)) == "-1/2");
  CHECK_THROWS_AS(parse_rational("1/0"), Error);
  CHECK_THROWS_AS(parse_rational("abc"), Error);
  CHECK_THROWS_AS(parse_rational("1.2.3"), Error);
}
