#include "hazcell/exact_sum.hpp"

#include <bit>
#include <cmath>

namespace hazcell {

namespace {
using u128 = unsigned __int128;
constexpr std::int64_t kLimbMask = 0xffffffffLL;
}  // namespace

void ExactSum::add(double x) noexcept {
  if (x == 0.0 || !std::isfinite(x)) return;
  int exp = 0;
  const double frac = std::frexp(std::abs(x), &exp);
  auto mant = static_cast<std::uint64_t>(std::ldexp(frac, 53));
  int pos = exp - 53 + kBias;
  if (pos < 0) {
    mant >>= -pos;  // subnormal input: the dropped bits are zero
    pos = 0;
  }
  const auto limb = static_cast<std::size_t>(pos / 32);
  const u128 v = static_cast<u128>(mant) << (pos % 32);
  const auto c0 = static_cast<std::int64_t>(static_cast<std::uint64_t>(v) & 0xffffffffu);
  const auto c1 = static_cast<std::int64_t>(static_cast<std::uint64_t>(v >> 32) & 0xffffffffu);
  const auto c2 = static_cast<std::int64_t>(static_cast<std::uint64_t>(v >> 64));
  if (x > 0) {
    limbs_[limb] += c0;
    limbs_[limb + 1] += c1;
    limbs_[limb + 2] += c2;
  } else {
    limbs_[limb] -= c0;
    limbs_[limb + 1] -= c1;
    limbs_[limb + 2] -= c2;
  }
  if (++pending_ >= kMaxPending) normalize();
}

void ExactSum::merge(const ExactSum& other) noexcept {
  if (pending_ + other.pending_ + 1 >= kMaxPending) normalize();
  ExactSum rhs = other;
  if (pending_ + rhs.pending_ + 1 >= kMaxPending) rhs.normalize();
  for (std::size_t i = 0; i < kLimbs; ++i) limbs_[i] += rhs.limbs_[i];
  pending_ += rhs.pending_ + 1;
  if (pending_ >= kMaxPending) normalize();
}

void ExactSum::normalize() noexcept {
  for (std::size_t i = 0; i + 1 < kLimbs; ++i) {
    const std::int64_t carry = limbs_[i] >> 32;  // arithmetic shift: floor division
    limbs_[i] &= kLimbMask;
    limbs_[i + 1] += carry;
  }
  pending_ = 0;
}

bool ExactSum::is_zero() const noexcept {
  ExactSum c = *this;
  c.normalize();
  for (auto l : c.limbs_) {
    if (l != 0) return false;
  }
  return true;
}

bool operator==(const ExactSum& a, const ExactSum& b) noexcept {
  ExactSum x = a;
  ExactSum y = b;
  x.normalize();
  y.normalize();
  return x.limbs_ == y.limbs_;
}

double ExactSum::value() const noexcept {
  ExactSum c = *this;
  c.normalize();
  const bool negative = c.limbs_[kLimbs - 1] < 0;
  if (negative) {
    for (auto& l : c.limbs_) l = -l;
    c.normalize();
  }
  std::ptrdiff_t top = static_cast<std::ptrdiff_t>(kLimbs) - 1;
  while (top >= 0 && c.limbs_[static_cast<std::size_t>(top)] == 0) --top;
  if (top < 0) return 0.0;

  auto limb_at = [&](std::ptrdiff_t i) -> u128 {
    return i < 0 ? 0 : static_cast<u128>(static_cast<std::uint64_t>(c.limbs_[static_cast<std::size_t>(i)]));
  };
  const u128 acc = (limb_at(top) << 64) | (limb_at(top - 1) << 32) | limb_at(top - 2);
  bool sticky = false;
  for (std::ptrdiff_t i = top - 3; i >= 0; --i) sticky |= c.limbs_[static_cast<std::size_t>(i)] != 0;

  const auto hi = static_cast<std::uint64_t>(acc >> 64);
  const int bits = 64 + (64 - std::countl_zero(hi));  // hi != 0
  const int shift = bits - 53;
  auto mant = static_cast<std::uint64_t>(acc >> shift);
  const u128 rem = acc & ((static_cast<u128>(1) << shift) - 1);
  const u128 half = static_cast<u128>(1) << (shift - 1);
  if (rem > half || (rem == half && (sticky || (mant & 1u)))) ++mant;

  const auto lsb_exp = static_cast<int>(32 * (top - 2)) - kBias;
  const double mag = std::ldexp(static_cast<double>(mant), shift + lsb_exp);
  return negative ? -mag : mag;
}

}  // namespace hazcell
