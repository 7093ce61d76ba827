#include "otlab/fixtures.hpp"

namespace otlab {

std::vector<Rational> FixtureRng::probability_vector(std::size_t n) {
  std::vector<Rational> w;
  Rational total(0);
  for (std::size_t i = 0; i < n; ++i) {
    w.emplace_back(between(1, 9));
    total += w.back();
  }
  for (auto& x : w) x /= total;
  return w;
}

const std::vector<std::string>& fixture_names() {
  static const std::vector<std::string> names = {"indicator", "random-uniform", "separable",
                                                 "discrete-metric-spike"};
  return names;
}

namespace {

Matrix<Rational> line_metric(const std::vector<Rational>& points) {
  Matrix<Rational> d(points.size(), points.size(), Rational(0));
  for (std::size_t i = 0; i < points.size(); ++i)
    for (std::size_t j = 0; j < points.size(); ++j) d(i, j) = abs(points[i] - points[j]);
  return d;
}

Matrix<Rational> discrete_metric(std::size_t n) {
  Matrix<Rational> d(n, n, Rational(1));
  for (std::size_t i = 0; i < n; ++i) d(i, i) = 0;
  return d;
}

std::string point_label(const Rational& p) {
  return p.get_den() == 1 ? p.get_num().get_str() : format_scalar(p);
}

/// Distinct increasing positions: cumulative sums of steps in [1, 5].
std::vector<Rational> random_points(FixtureRng& rng, std::size_t n) {
  std::vector<Rational> pts;
  Rational at(0);
  for (std::size_t i = 0; i < n; ++i) {
    at += rng.between(1, 5);
    pts.push_back(at);
  }
  return pts;
}

FiniteSpace<Rational> named_space(const std::string& prefix, std::vector<Rational> points) {
  FiniteSpace<Rational> s;
  for (std::size_t i = 0; i < points.size(); ++i) s.labels.push_back(prefix + std::to_string(i));
  s.metric = line_metric(points);
  return s;
}

Rational quarter(FixtureRng& rng) {
  Rational q(rng.between(0, 40), 4);
  q.canonicalize();
  return q;
}

}  // namespace

Instance<Rational> generate_fixture(const FixtureRequest& request) {
  const std::size_t n = request.size;
  if (n == 0) throw Error(ErrorCode::InvalidArgument, "fixture size must be positive");
  FixtureRng rng(request.seed);
  Instance<Rational> inst;
  const auto& name = request.name;

  if (name == "indicator") {
    std::vector<Rational> points;
    for (std::size_t k = 0; k < n; ++k) {
      Rational p = Rational(static_cast<long>(2 * k) - static_cast<long>(n - 1), 2);
      p.canonicalize();
      points.push_back(p);
    }
    for (const auto& p : points) {
      inst.x.labels.push_back(point_label(p));
      inst.y.labels.push_back(point_label(p));
    }
    inst.x.metric = line_metric(points);
    inst.y.metric = line_metric(points);
    Matrix<Extended<Rational>> c(n, n);
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = 0; j < n; ++j)
        c(i, j) = Rational(int(points[i] >= 0) + int(points[j] >= 0));
    inst.cost = CostMatrix<Rational>(std::move(c), true);
    inst.mu.weights = rng.probability_vector(n);
    inst.nu.weights = rng.probability_vector(n);
  } else if (name == "random-uniform") {
    inst.x = named_space("x", random_points(rng, n));
    inst.y = named_space("y", random_points(rng, n));
    Matrix<Extended<Rational>> c(n, n);
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = 0; j < n; ++j) c(i, j) = quarter(rng);
    inst.cost = CostMatrix<Rational>(std::move(c), true);
    inst.mu.weights = rng.probability_vector(n);
    inst.nu.weights = rng.probability_vector(n);
  } else if (name == "separable") {
    inst.x = named_space("x", random_points(rng, n));
    inst.y = named_space("y", random_points(rng, n));
    std::vector<Rational> a;
    std::vector<Rational> b;
    for (std::size_t i = 0; i < n; ++i) a.push_back(quarter(rng));
    for (std::size_t j = 0; j < n; ++j) b.push_back(quarter(rng));
    Matrix<Extended<Rational>> c(n, n);
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = 0; j < n; ++j) c(i, j) = Rational(a[i] + b[j]);
    inst.cost = CostMatrix<Rational>(std::move(c), true);
    inst.mu.weights = rng.probability_vector(n);
    inst.nu.weights = rng.probability_vector(n);
  } else if (name == "discrete-metric-spike") {
    for (std::size_t i = 0; i < n; ++i) {
      inst.x.labels.push_back("x" + std::to_string(i));
      inst.y.labels.push_back("y" + std::to_string(i));
    }
    inst.x.metric = discrete_metric(n);
    inst.y.metric = discrete_metric(n);
    Matrix<Extended<Rational>> c(n, n);
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = 0; j < n; ++j) c(i, j) = Rational(i == j ? 0 : 10);
    inst.cost = CostMatrix<Rational>(std::move(c), true);
    inst.mu.weights.assign(n, Rational(1, n));
    inst.nu.weights.assign(n, Rational(1, n));
  } else {
    throw Error(ErrorCode::UnknownFixture, "unknown fixture '" + name + "'");
  }
  return inst;
}

json fixture_to_json(const FixtureRequest& request, Mode mode) {
  const auto inst = generate_fixture(request);
  json doc;
  doc["generator"] = {{"fixture", request.name},
                      {"size", request.size},
                      {"seed", request.seed},
                      {"rng", "mt19937_64"}};
  json body = instance_to_json(inst);
  body["mode"] = std::string(mode_name(mode));
  for (auto& [key, value] : body.items()) doc[key] = value;
  return doc;
}

}  // namespace otlab
