#pragma once

#include <compare>
#include <string>

#include "otlab/scalar.hpp"

namespace otlab {

/// A real number or +inf. There is deliberately no -inf and no sentinel
/// encoding: the infinite state is a separate flag.
template <Scalar T>
class Extended {
 public:
  Extended() : value_(0) {}
  Extended(T value) : value_(std::move(value)) {}  // NOLINT: implicit by intent
  Extended(int value) : value_(value) {}           // NOLINT

  static Extended infinity() {
    Extended e;
    e.infinite_ = true;
    return e;
  }

  bool is_infinite() const { return infinite_; }
  bool is_finite() const { return !infinite_; }

  /// Only valid for finite values.
  const T& value() const { return value_; }

  friend bool operator==(const Extended& a, const Extended& b) {
    if (a.infinite_ || b.infinite_) return a.infinite_ == b.infinite_;
    return a.value_ == b.value_;
  }

  friend bool operator<(const Extended& a, const Extended& b) {
    if (a.infinite_) return false;
    if (b.infinite_) return true;
    return a.value_ < b.value_;
  }
  friend bool operator<=(const Extended& a, const Extended& b) { return !(b < a); }
  friend bool operator>(const Extended& a, const Extended& b) { return b < a; }
  friend bool operator>=(const Extended& a, const Extended& b) { return !(a < b); }

  friend Extended operator+(const Extended& a, const Extended& b) {
    if (a.infinite_ || b.infinite_) return infinity();
    return Extended(T(a.value_ + b.value_));
  }

 private:
  T value_;
  bool infinite_ = false;
};

/// mass * cost with the convention 0 * inf = 0.
template <Scalar T>
Extended<T> weighted(const T& mass, const Extended<T>& cost) {
  if (mass == 0) return Extended<T>(T(0));
  if (cost.is_infinite()) return Extended<T>::infinity();
  return Extended<T>(T(mass * cost.value()));
}

template <Scalar T>
std::string format_extended(const Extended<T>& x) {
  return x.is_infinite() ? std::string("inf") : format_scalar(x.value());
}

}  // namespace otlab
