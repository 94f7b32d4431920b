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

#include "bootforge/bigint.hpp"

#include <algorithm>
#include <bit>
#include <utility>

#include "bootforge/error.hpp"

namespace bootforge {

namespace {

using u128 = unsigned __int128;

constexpr int hex_value(char c) {
  if (c >= '0' && c <= '9') return c - '0';
  if (c >= 'a' && c <= 'f') return c - 'a' + 10;
  if (c >= 'A' && c <= 'F') return c - 'A' + 10;
  return -1;
}

int compare_limbs(std::span<const std::uint64_t> a, std::span<const std::uint64_t> b) {
  if (a.size() != b.size()) return a.size() < b.size() ? -1 : 1;
  for (std::size_t i = a.size(); i-- > 0;) {
    if (a[i] != b[i]) return a[i] < b[i] ? -1 : 1;
  }
  return 0;
}

}  // namespace

BigUint::BigUint(std::uint64_t value) {
  if (value != 0) limbs_.push_back(value);
}

BigUint BigUint::from_limbs(std::vector<Limb> limbs) {
  BigUint out;
  out.limbs_ = std::move(limbs);
  out.trim();
  return out;
}

BigUint BigUint::from_bytes_be(std::span<const std::uint8_t> bytes) {
  BigUint out;
  out.limbs_.assign((bytes.size() + 7) / 8, 0);
  for (std::size_t i = 0; i < bytes.size(); ++i) {
    const std::size_t pos = bytes.size() - 1 - i;  // byte significance
    out.limbs_[pos / 8] |= static_cast<Limb>(bytes[i]) << (8 * (pos % 8));
  }
  out.trim();
  return out;
}

std::optional<BigUint> BigUint::from_hex(std::string_view hex) {
  if (hex.starts_with("0x") || hex.starts_with("0X")) hex.remove_prefix(2);
  if (hex.empty()) return std::nullopt;
  BigUint out;
  out.limbs_.assign((hex.size() + 15) / 16, 0);
  for (std::size_t i = 0; i < hex.size(); ++i) {
    const int v = hex_value(hex[i]);
    if (v < 0) return std::nullopt;
    const std::size_t nibble = hex.size() - 1 - i;
    out.limbs_[nibble / 16] |= static_cast<Limb>(v) << (4 * (nibble % 16));
  }
  out.trim();
  return out;
}

BigUint BigUint::power_of_two(std::size_t bits) {
  BigUint out;
  out.limbs_.assign(bits / 64 + 1, 0);
  out.limbs_.back() = Limb{1} << (bits % 64);
  return out;
}

std::vector<std::uint8_t> BigUint::to_bytes_be(std::size_t width) const {
  if (byte_length() > width) {
    throw DomainError("value does not fit in " + std::to_string(width) + " bytes");
  }
  std::vector<std::uint8_t> out(width, 0);
  for (std::size_t pos = 0; pos < limbs_.size() * 8 && pos < width; ++pos) {
    out[width - 1 - pos] = static_cast<std::uint8_t>(limbs_[pos / 8] >> (8 * (pos % 8)));
  }
  return out;
}

std::vector<std::uint8_t> BigUint::to_bytes_be() const { return to_bytes_be(byte_length()); }

std::string BigUint::to_hex() const {
  if (is_zero()) return "0";
  static constexpr char kDigits[] = "0123456789abcdef";
  std::string out;
  const std::size_t nibbles = (bit_length() + 3) / 4;
  out.reserve(nibbles);
  for (std::size_t n = nibbles; n-- > 0;) {
    out.push_back(kDigits[(limbs_[n / 16] >> (4 * (n % 16))) & 0xF]);
  }
  return out;
}

std::size_t BigUint::bit_length() const noexcept {
  if (limbs_.empty()) return 0;
  return limbs_.size() * 64 - static_cast<std::size_t>(std::countl_zero(limbs_.back()));
}

bool BigUint::test_bit(std::size_t bit) const noexcept {
  const std::size_t limb = bit / 64;
  return limb < limbs_.size() && ((limbs_[limb] >> (bit % 64)) & 1U);
}

std::strong_ordering operator<=>(const BigUint& a, const BigUint& b) {
  const int c = compare_limbs(a.limbs_, b.limbs_);
  return c < 0 ? std::strong_ordering::less
               : (c > 0 ? std::strong_ordering::greater : std::strong_ordering::equal);
}

BigUint& BigUint::operator+=(const BigUint& rhs) {
  if (rhs.limbs_.size() > limbs_.size()) limbs_.resize(rhs.limbs_.size(), 0);
  Limb carry = 0;
  for (std::size_t i = 0; i < limbs_.size(); ++i) {
    const u128 s = static_cast<u128>(limbs_[i]) + (i < rhs.limbs_.size() ? rhs.limbs_[i] : 0) + carry;
    limbs_[i] = static_cast<Limb>(s);
    carry = static_cast<Limb>(s >> 64);
    if (carry == 0 && i >= rhs.limbs_.size()) break;
  }
  if (carry != 0) limbs_.push_back(carry);
  return *this;
}

BigUint& BigUint::operator-=(const BigUint& rhs) {
  if (*this < rhs) throw DomainError("BigUint subtraction underflow");
  Limb borrow = 0;
  for (std::size_t i = 0; i < limbs_.size(); ++i) {
    const Limb r = i < rhs.limbs_.size() ? rhs.limbs_[i] : 0;
    if (r == 0 && borrow == 0 && i >= rhs.limbs_.size()) break;
    const Limb d1 = limbs_[i] - r;
    const Limb b1 = limbs_[i] < r;
    const Limb d2 = d1 - borrow;
    const Limb b2 = d1 < borrow;
    limbs_[i] = d2;
    borrow = b1 | b2;
  }
  trim();
  return *this;
}

BigUint operator*(const BigUint& a, const BigUint& b) {
  if (a.is_zero() || b.is_zero()) return {};
  std::vector<BigUint::Limb> out(a.limbs_.size() + b.limbs_.size(), 0);
  for (std::size_t i = 0; i < a.limbs_.size(); ++i) {
    BigUint::Limb carry = 0;
    const u128 ai = a.limbs_[i];
    for (std::size_t j = 0; j < b.limbs_.size(); ++j) {
      const u128 t = ai * b.limbs_[j] + out[i + j] + carry;
      out[i + j] = static_cast<BigUint::Limb>(t);
      carry = static_cast<BigUint::Limb>(t >> 64);
    }
    out[i + b.limbs_.size()] = carry;
  }
  return BigUint::from_limbs(std::move(out));
}

BigUint& BigUint::operator*=(const BigUint& rhs) { return *this = *this * rhs; }

BigUint::DivMod BigUint::divmod(const BigUint& numerator, const BigUint& denominator) {
  if (denominator.is_zero()) throw DomainError("division by zero");
  if (numerator < denominator) return {BigUint{}, numerator};

  const auto& v = denominator.limbs_;
  const auto& u = numerator.limbs_;
  if (v.size() == 1) {
    std::vector<Limb> q(u.size(), 0);
    u128 rem = 0;
    for (std::size_t i = u.size(); i-- > 0;) {
      const u128 cur = (rem << 64) | u[i];
      q[i] = static_cast<Limb>(cur / v[0]);
      rem = cur % v[0];
    }
    return {from_limbs(std::move(q)), BigUint(static_cast<Limb>(rem))};
  }

  const std::size_t n = v.size();
  const std::size_t m = u.size() - n;
  const int shift = std::countl_zero(v.back());

  std::vector<Limb> vn(n);
  for (std::size_t i = n - 1; i > 0; --i) {
    vn[i] = shift == 0 ? v[i] : (v[i] << shift) | (v[i - 1] >> (64 - shift));
  }
  vn[0] = v[0] << shift;

  std::vector<Limb> un(u.size() + 1);
  un[u.size()] = shift == 0 ? 0 : u.back() >> (64 - shift);
  for (std::size_t i = u.size() - 1; i > 0; --i) {
    un[i] = shift == 0 ? u[i] : (u[i] << shift) | (u[i - 1] >> (64 - shift));
  }
  un[0] = u[0] << shift;

  std::vector<Limb> q(m + 1, 0);
  constexpr u128 kBase = static_cast<u128>(1) << 64;
  for (std::size_t j = m + 1; j-- > 0;) {
    const u128 num = (static_cast<u128>(un[j + n]) << 64) | un[j + n - 1];
    u128 qhat = num / vn[n - 1];
    u128 rhat = num % vn[n - 1];
    while (qhat >= kBase ||
           qhat * vn[n - 2] > ((rhat << 64) | un[j + n - 2])) {
      --qhat;
      rhat += vn[n - 1];
      if (rhat >= kBase) break;
    }

    Limb borrow = 0;
    Limb carry = 0;
    for (std::size_t i = 0; i < n; ++i) {
      const u128 p = qhat * vn[i] + carry;
      carry = static_cast<Limb>(p >> 64);
      const Limb plo = static_cast<Limb>(p);
      const Limb t = un[i + j] - plo;
      const Limb b1 = un[i + j] < plo;
      un[i + j] = t - borrow;
      const Limb b2 = t < borrow;
      borrow = b1 + b2;
    }
    const u128 sub = static_cast<u128>(carry) + borrow;
    const bool negative = static_cast<u128>(un[j + n]) < sub;
    un[j + n] = static_cast<Limb>(un[j + n] - sub);

    q[j] = static_cast<Limb>(qhat);
    if (negative) {
      --q[j];
      Limb c = 0;
      for (std::size_t i = 0; i < n; ++i) {
        const u128 s = static_cast<u128>(un[i + j]) + vn[i] + c;
        un[i + j] = static_cast<Limb>(s);
        c = static_cast<Limb>(s >> 64);
      }
      un[j + n] += c;
    }
  }

  std::vector<Limb> r(n);
  for (std::size_t i = 0; i < n; ++i) {
    r[i] = shift == 0 ? un[i] : (un[i] >> shift) | (un[i + 1] << (64 - shift));
  }
  return {from_limbs(std::move(q)), from_limbs(std::move(r))};
}

BigUint operator/(const BigUint& a, const BigUint& b) { return BigUint::divmod(a, b).quotient; }
BigUint operator%(const BigUint& a, const BigUint& b) { return BigUint::divmod(a, b).remainder; }
BigUint& BigUint::operator/=(const BigUint& rhs) { return *this = *this / rhs; }
BigUint& BigUint::operator%=(const BigUint& rhs) { return *this = *this % rhs; }

BigUint& BigUint::operator<<=(std::size_t bits) {
  if (is_zero() || bits == 0) return *this;
  const std::size_t limb_shift = bits / 64;
  const unsigned bit_shift = bits % 64;
  std::vector<Limb> out(limbs_.size() + limb_shift + 1, 0);
  for (std::size_t i = 0; i < limbs_.size(); ++i) {
    out[i + limb_shift] |= limbs_[i] << bit_shift;
    if (bit_shift != 0) out[i + limb_shift + 1] |= limbs_[i] >> (64 - bit_shift);
  }
  limbs_ = std::move(out);
  trim();
  return *this;
}

BigUint& BigUint::operator>>=(std::size_t bits) {
  const std::size_t limb_shift = bits / 64;
  const unsigned bit_shift = bits % 64;
  if (limb_shift >= limbs_.size()) {
    limbs_.clear();
    return *this;
  }
  std::vector<Limb> out(limbs_.size() - limb_shift, 0);
  for (std::size_t i = 0; i < out.size(); ++i) {
    out[i] = limbs_[i + limb_shift] >> bit_shift;
    if (bit_shift != 0 && i + limb_shift + 1 < limbs_.size()) {
      out[i] |= limbs_[i + limb_shift + 1] << (64 - bit_shift);
    }
  }
  limbs_ = std::move(out);
  trim();
  return *this;
}

std::uint64_t BigUint::mod_u64(std::uint64_t divisor) const {
  if (divisor == 0) throw DomainError("division by zero");
  u128 rem = 0;
  for (std::size_t i = limbs_.size(); i-- > 0;) {
    rem = ((rem << 64) | limbs_[i]) % divisor;
  }
  return static_cast<std::uint64_t>(rem);
}

void BigUint::trim() noexcept {
  while (!limbs_.empty() && limbs_.back() == 0) limbs_.pop_back();
}

BigUint gcd(BigUint a, BigUint b) {
  while (!b.is_zero()) {
    BigUint r = a % b;
    a = std::move(b);
    b = std::move(r);
  }
  return a;
}

}  // namespace bootforge
