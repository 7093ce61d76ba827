#include "otlab/scalar.hpp"

#include <cctype>
#include <charconv>
#include <cstdlib>

#include "otlab/error.hpp"

namespace otlab {

std::string_view to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::DimensionMismatch: return "DimensionMismatch";
    case ErrorCode::NegativeMass: return "NegativeMass";
    case ErrorCode::MassNotOne: return "MassNotOne";
    case ErrorCode::MetricViolation: return "MetricViolation";
    case ErrorCode::InfiniteCostInBoundedMode: return "InfiniteCostInBoundedMode";
    case ErrorCode::UnboundedCost: return "UnboundedCost";
    case ErrorCode::NegativeCost: return "NegativeCost";
    case ErrorCode::UnboundedTransform: return "UnboundedTransform";
    case ErrorCode::InfeasibleFiniteCost: return "InfeasibleFiniteCost";
    case ErrorCode::InfeasibleInput: return "InfeasibleInput";
    case ErrorCode::InfeasibleArguments: return "InfeasibleArguments";
    case ErrorCode::InfeasiblePotentials: return "InfeasiblePotentials";
    case ErrorCode::SupportTooLarge: return "SupportTooLarge";
    case ErrorCode::MissingMetric: return "MissingMetric";
    case ErrorCode::BudgetExceeded: return "BudgetExceeded";
    case ErrorCode::NoFeasibleTreeDual: return "NoFeasibleTreeDual";
    case ErrorCode::UnknownFixture: return "UnknownFixture";
    case ErrorCode::InvalidArgument: return "InvalidArgument";
    case ErrorCode::ParseError: return "ParseError";
  }
  return "Unknown";
}

std::string_view mode_name(Mode mode) {
  return mode == Mode::Rational ? "rational" : "float";
}

std::string format_scalar(const Rational& x) {
  return x.get_num().get_str() + "/" + x.get_den().get_str();
}

std::string format_scalar(double x) {
  char buf[64];
  auto [end, ec] = std::to_chars(buf, buf + sizeof buf, x);
  if (ec != std::errc()) return "nan";
  return std::string(buf, end);
}

namespace {

[[noreturn]] void bad_number(std::string_view text) {
  throw Error(ErrorCode::ParseError, "not a number: '" + std::string(text) + "'");
}

bool all_digits(std::string_view s) {
  if (s.empty()) return false;
  for (char c : s)
    if (!std::isdigit(static_cast<unsigned char>(c))) return false;
  return true;
}

mpz_class parse_integer(std::string_view text) {
  std::string_view body = text;
  if (!body.empty() && (body[0] == '-' || body[0] == '+')) body.remove_prefix(1);
  if (!all_digits(body)) bad_number(text);
  std::string s(text);
  if (s[0] == '+') s.erase(0, 1);
  return mpz_class(s, 10);
}

}  // namespace

Rational parse_rational(std::string_view text) {
  while (!text.empty() && std::isspace(static_cast<unsigned char>(text.front())))
    text.remove_prefix(1);
  while (!text.empty() && std::isspace(static_cast<unsigned char>(text.back())))
    text.remove_suffix(1);
  if (text.empty()) bad_number(text);

  if (auto slash = text.find('/'); slash != std::string_view::npos) {
    mpz_class num = parse_integer(text.substr(0, slash));
    std::string_view den_text = text.substr(slash + 1);
    if (!all_digits(den_text)) bad_number(text);
    mpz_class den(std::string(den_text), 10);
    if (den == 0) throw Error(ErrorCode::ParseError, "zero denominator in '" + std::string(text) + "'");
    Rational r(num, den);
    r.canonicalize();
    return r;
  }

  // Decimal with optional exponent, converted exactly.
  std::string_view mantissa = text;
  long exponent = 0;
  if (auto e = text.find_first_of("eE"); e != std::string_view::npos) {
    mantissa = text.substr(0, e);
    std::string_view exp_text = text.substr(e + 1);
    std::string_view digits = exp_text;
    if (!digits.empty() && (digits[0] == '-' || digits[0] == '+')) digits.remove_prefix(1);
    if (!all_digits(digits) || digits.size() > 6) bad_number(text);
    exponent = std::strtol(std::string(exp_text).c_str(), nullptr, 10);
  }
  bool negative = false;
  if (!mantissa.empty() && (mantissa[0] == '-' || mantissa[0] == '+')) {
    negative = mantissa[0] == '-';
    mantissa.remove_prefix(1);
  }
  std::string digits;
  if (auto dot = mantissa.find('.'); dot != std::string_view::npos) {
    std::string_view whole = mantissa.substr(0, dot);
    std::string_view frac = mantissa.substr(dot + 1);
    if ((whole.empty() && frac.empty()) || (!whole.empty() && !all_digits(whole)) ||
        (!frac.empty() && !all_digits(frac)))
      bad_number(text);
    digits = std::string(whole) + std::string(frac);
    exponent -= static_cast<long>(frac.size());
  } else {
    if (!all_digits(mantissa)) bad_number(text);
    digits = std::string(mantissa);
  }
  if (digits.empty()) bad_number(text);
  mpz_class value(digits, 10);
  mpz_class scale;
  mpz_ui_pow_ui(scale.get_mpz_t(), 10, static_cast<unsigned long>(exponent < 0 ? -exponent : exponent));
  Rational r = exponent < 0 ? Rational(value, scale) : Rational(value * scale);
  r.canonicalize();
  return negative ? Rational(-r) : r;
}

}  // namespace otlab
