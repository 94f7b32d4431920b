// Copyright 2026 The bootforge Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <compare>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace bootforge {

/// Arbitrary-precision non-negative integer.
///
/// Magnitude is stored as little-endian 64-bit limbs with no leading zero
/// limbs; zero is the empty limb vector. All arithmetic is value-semantic.
/// Subtraction that would go negative throws DomainError.
class BigUint {
 public:
  using Limb = std::uint64_t;

  BigUint() = default;
  BigUint(std::uint64_t value);  // NOLINT(google-explicit-constructor)

  static BigUint from_limbs(std::vector<Limb> limbs);
  static BigUint from_bytes_be(std::span<const std::uint8_t> bytes);
  /// Accepts upper or lower case, optional "0x" prefix. Empty -> nullopt.
  static std::optional<BigUint> from_hex(std::string_view hex);
  /// 2^bits.
  static BigUint power_of_two(std::size_t bits);

  /// Fixed-width big-endian encoding. Throws DomainError if the value
  /// does not fit in `width` bytes.
  std::vector<std::uint8_t> to_bytes_be(std::size_t width) const;
  /// Minimal-width big-endian encoding ("00" is never emitted; zero -> {}).
  std::vector<std::uint8_t> to_bytes_be() const;
  /// Lowercase hex without leading zeros; zero renders as "0".
  std::string to_hex() const;

  std::span<const Limb> limbs() const noexcept { return limbs_; }
  std::size_t limb_count() const noexcept { return limbs_.size(); }
  std::size_t bit_length() const noexcept;
  std::size_t byte_length() const noexcept { return (bit_length() + 7) / 8; }
  bool is_zero() const noexcept { return limbs_.empty(); }
  bool is_odd() const noexcept { return !limbs_.empty() && (limbs_[0] & 1U); }
  bool test_bit(std::size_t bit) const noexcept;
  /// Low 64 bits.
  std::uint64_t low_u64() const noexcept { return limbs_.empty() ? 0 : limbs_[0]; }

  friend bool operator==(const BigUint&, const BigUint&) = default;
  friend std::strong_ordering operator<=>(const BigUint& a, const BigUint& b);

  BigUint& operator+=(const BigUint& rhs);
  BigUint& operator-=(const BigUint& rhs);
  BigUint& operator*=(const BigUint& rhs);
  BigUint& operator/=(const BigUint& rhs);
  BigUint& operator%=(const BigUint& rhs);
  BigUint& operator<<=(std::size_t bits);
  BigUint& operator>>=(std::size_t bits);

  friend BigUint operator+(BigUint a, const BigUint& b) { return a += b; }
  friend BigUint operator-(BigUint a, const BigUint& b) { return a -= b; }
  friend BigUint operator*(const BigUint& a, const BigUint& b);
  friend BigUint operator/(const BigUint& a, const BigUint& b);
  friend BigUint operator%(const BigUint& a, const BigUint& b);
  friend BigUint operator<<(BigUint a, std::size_t bits) { return a <<= bits; }
  friend BigUint operator>>(BigUint a, std::size_t bits) { return a >>= bits; }

  struct DivMod;
  /// Knuth algorithm D. Throws DomainError on division by zero.
  static DivMod divmod(const BigUint& numerator, const BigUint& denominator);

  /// Remainder by a single limb.
  std::uint64_t mod_u64(std::uint64_t divisor) const;

 private:
  void trim() noexcept;

  std::vector<Limb> limbs_;
};

struct BigUint::DivMod {
  BigUint quotient;
  BigUint remainder;
};

BigUint gcd(BigUint a, BigUint b);

}  // namespace bootforge
