#pragma once

#include <compare>
#include <cstdint>
#include <string>
#include <string_view>

namespace trustmw {

// Fixed-point trust score with four fractional digits. Repeated deductions
// are exact, so 100 deductions of 0.01 from 1 land on 0.
class Score {
 public:
  static constexpr std::int32_t kScale = 10000;

  constexpr Score() = default;
  static constexpr Score from_units(std::int32_t units) { return Score(units); }
  static constexpr Score zero() { return Score(0); }
  static constexpr Score one() { return Score(kScale); }
  // Parses a decimal such as "0.99" or "1"; throws Error(invalid_argument)
  // for more than four fractional digits or malformed text.
  static Score parse(std::string_view text);

  constexpr std::int32_t units() const noexcept { return units_; }
  double to_double() const noexcept { return static_cast<double>(units_) / kScale; }

  // Shortest decimal with at least one fractional digit: 1.0, 0.99, 0.0.
  std::string to_string() const;

  // Subtracts, clamping at zero.
  constexpr Score minus(Score deduction) const {
    return Score(units_ - deduction.units_ < 0 ? 0 : units_ - deduction.units_);
  }

  friend constexpr auto operator<=>(Score, Score) = default;

 private:
  constexpr explicit Score(std::int32_t units) : units_(units) {}
  std::int32_t units_ = 0;
};

}  // namespace trustmw
