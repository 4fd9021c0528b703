/**
 * @file exact_sum.hpp
 * @brief Order-independent exact summation of doubles.
 *
 * Every finite double is m * 2^e with |m| < 2^53 and e >= -1074, so it is an integer multiple of
 * 2^-1074. ExactSum keeps the running total as a fixed-point integer in 32-bit limbs (stored in
 * int64 to absorb carries lazily), which makes add() and merge() associative and commutative.
 * value() returns the correctly rounded (nearest, ties to even) double of the exact total for
 * results in the normal range.
 */
#pragma once

#include <array>
#include <cstdint>

namespace hazcell {

class ExactSum {
 public:
  ExactSum() = default;

  void add(double x) noexcept;
  void merge(const ExactSum& other) noexcept;

  double value() const noexcept;
  bool is_zero() const noexcept;

  friend bool operator==(const ExactSum& a, const ExactSum& b) noexcept;

 private:
  static constexpr int kBias = 1088;  // multiple of 32 above the subnormal exponent floor 1074
  static constexpr std::size_t kLimbs = 72;
  static constexpr std::uint32_t kMaxPending = 1u << 29;

  void normalize() noexcept;

  std::array<std::int64_t, kLimbs> limbs_{};
  std::uint32_t pending_{0};
};

}  // namespace hazcell
