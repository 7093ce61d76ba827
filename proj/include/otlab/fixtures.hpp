#pragma once

#include <cstdint>
#include <random>
#include <string>
#include <vector>

#include "otlab/core.hpp"
#include "otlab/io.hpp"

namespace otlab {

/// Named, seeded instance generators:
///   indicator             cost 1[x >= 0] + 1[y >= 0] on `size` points
///                         symmetric about 0
///   random-uniform        costs k/4, k in [0, 40]; points on a line
///   separable             c(i,j) = a(i) + b(j)
///   discrete-metric-spike size x size, 0 on the diagonal and 10 elsewhere,
///                         discrete metrics, uniform marginals
/// All fixtures carry metrics on both spaces. The same (name, size, seed)
/// always yields the same instance.
struct FixtureRequest {
  std::string name;
  std::size_t size = 3;
  std::uint64_t seed = 0;
};

const std::vector<std::string>& fixture_names();

Instance<Rational> generate_fixture(const FixtureRequest& request);

/// Instance JSON plus a "generator" header recording the request.
json fixture_to_json(const FixtureRequest& request, Mode mode);

/// Deterministic bounded draws from a 64-bit Mersenne twister. Used instead
/// of <random> distributions, whose output differs across standard libraries.
class FixtureRng {
 public:
  explicit FixtureRng(std::uint64_t seed) : engine_(seed) {}

  /// Uniform integer in [lo, hi].
  std::int64_t between(std::int64_t lo, std::int64_t hi) {
    const auto span = static_cast<std::uint64_t>(hi - lo) + 1;
    return lo + static_cast<std::int64_t>(engine_() % span);
  }

  /// Strictly positive weights w_i / sum w, w_i in [1, 9].
  std::vector<Rational> probability_vector(std::size_t n);

 private:
  std::mt19937_64 engine_;
};

}  // namespace otlab
