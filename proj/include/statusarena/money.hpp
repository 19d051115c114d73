#pragma once

#include <cmath>
#include <compare>
#include <cstdint>
#include <string>

namespace statusarena {

/// Currency amount in integer cents. All ledger arithmetic is exact; only
/// multiplicative price rules round, and they round to the nearest cent.
class Money {
 public:
  constexpr Money() = default;

  static constexpr Money from_cents(std::int64_t cents) { return Money(cents); }
  static Money from_dollars(double dollars) {
    return Money(static_cast<std::int64_t>(std::llround(dollars * 100.0)));
  }

  constexpr std::int64_t cents() const { return cents_; }
  double dollars() const { return static_cast<double>(cents_) / 100.0; }

  /// this * factor, rounded to the nearest cent.
  Money scaled(double factor) const {
    return Money(static_cast<std::int64_t>(std::llround(static_cast<double>(cents_) * factor)));
  }

  /// Midpoint of two amounts, rounded toward the lower amount when the sum is odd.
  static constexpr Money midpoint(Money low, Money high) {
    const std::int64_t sum = low.cents_ + high.cents_;
    // floor division for non-negative operands
    return Money(sum >= 0 ? sum / 2 : -((-sum + 1) / 2));
  }

  constexpr Money& operator+=(Money rhs) {
    cents_ += rhs.cents_;
    return *this;
  }
  constexpr Money& operator-=(Money rhs) {
    cents_ -= rhs.cents_;
    return *this;
  }
  friend constexpr Money operator+(Money a, Money b) { return Money(a.cents_ + b.cents_); }
  friend constexpr Money operator-(Money a, Money b) { return Money(a.cents_ - b.cents_); }
  friend constexpr Money operator*(Money a, std::int64_t n) { return Money(a.cents_ * n); }
  friend constexpr auto operator<=>(Money, Money) = default;

  /// "1234.50"
  std::string str() const;

 private:
  constexpr explicit Money(std::int64_t cents) : cents_(cents) {}
  std::int64_t cents_ = 0;
};

}  // namespace statusarena
