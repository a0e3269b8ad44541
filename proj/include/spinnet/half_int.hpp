#pragma once

#include <compare>
#include <cstdlib>
#include <string>

namespace spinnet {

// Exact half-integer arithmetic on doubled values: HalfInt(3) is 3/2,
// HalfInt(2) is 1. Spin quantum numbers, magnetizations and imbalances are
// carried this way so parity and equality tests never touch floating point.
class HalfInt {
 public:
  constexpr HalfInt() = default;
  constexpr explicit HalfInt(int twice) : twice_(twice) {}

  static constexpr HalfInt whole(int n) { return HalfInt(2 * n); }

  constexpr int twice() const { return twice_; }
  constexpr double value() const { return 0.5 * static_cast<double>(twice_); }
  constexpr bool is_integer() const { return twice_ % 2 == 0; }

  // s(s+1), exact in double for any sane spin size
  constexpr double casimir() const {
    return 0.25 * static_cast<double>(twice_) * static_cast<double>(twice_ + 2);
  }

  constexpr HalfInt abs() const { return HalfInt(twice_ < 0 ? -twice_ : twice_); }

  constexpr HalfInt operator+(HalfInt o) const { return HalfInt(twice_ + o.twice_); }
  constexpr HalfInt operator-(HalfInt o) const { return HalfInt(twice_ - o.twice_); }
  constexpr HalfInt operator-() const { return HalfInt(-twice_); }
  constexpr HalfInt& operator+=(HalfInt o) {
    twice_ += o.twice_;
    return *this;
  }
  constexpr HalfInt& operator-=(HalfInt o) {
    twice_ -= o.twice_;
    return *this;
  }

  friend constexpr auto operator<=>(HalfInt a, HalfInt b) = default;

  // "3/2", "-1/2", "2", ...
  std::string str() const {
    if (twice_ % 2 == 0) return std::to_string(twice_ / 2);
    return std::to_string(twice_) + "/2";
  }

 private:
  int twice_ = 0;
};

}  // namespace spinnet
