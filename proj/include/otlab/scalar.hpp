#pragma once

#include <gmpxx.h>

#include <cmath>
#include <concepts>
#include <string>
#include <string_view>

namespace otlab {

using Rational = mpq_class;

/// The two arithmetic modes. Every algorithm is written once against this
/// concept; the rational instantiation is bit-exact, the double one is
/// tolerance-based.
template <typename T>
concept Scalar = std::same_as<T, Rational> || std::same_as<T, double>;

enum class Mode { Rational, Float };

template <Scalar T>
struct NumTraits;

template <>
struct NumTraits<Rational> {
  static constexpr bool exact = true;
  static constexpr Mode mode = Mode::Rational;
  static Rational default_tol() { return Rational(0); }
  static Rational support_tol() { return Rational(0); }
  static Rational marginal_tol() { return Rational(0); }
};

template <>
struct NumTraits<double> {
  static constexpr bool exact = false;
  static constexpr Mode mode = Mode::Float;
  static double default_tol() { return 1e-9; }
  static double support_tol() { return 1e-12; }
  static double marginal_tol() { return 1e-12; }
};

inline Rational abs_value(const Rational& x) { return abs(x); }
inline double abs_value(double x) { return std::fabs(x); }

inline double to_double(const Rational& x) { return x.get_d(); }
inline double to_double(double x) { return x; }

template <Scalar T>
T from_rational(const Rational& x) {
  if constexpr (std::same_as<T, Rational>) {
    return x;
  } else {
    return x.get_d();
  }
}

/// "p/q" for rationals (always with a denominator, so zero is "0/1");
/// shortest round-trip decimal for doubles.
std::string format_scalar(const Rational& x);
std::string format_scalar(double x);

/// Accepts "p/q", integers and finite decimals ("0.25", "-3e-2") exactly.
Rational parse_rational(std::string_view text);

std::string_view mode_name(Mode mode);

}  // namespace otlab
