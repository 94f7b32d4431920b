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

#include "bootforge/seed.hpp"

#include <algorithm>

#include "bootforge/error.hpp"

namespace bootforge {

std::string to_hex(std::span<const std::uint8_t> bytes) {
  static constexpr char kDigits[] = "0123456789abcdef";
  std::string out;
  out.reserve(bytes.size() * 2);
  for (const std::uint8_t b : bytes) {
    out.push_back(kDigits[b >> 4]);
    out.push_back(kDigits[b & 0xF]);
  }
  return out;
}

std::optional<std::vector<std::uint8_t>> from_hex(std::string_view hex) {
  if (hex.size() % 2 != 0) return std::nullopt;
  auto nibble = [](char c) -> int {
    if (c >= '0' && c <= '9') return c - '0';
    if (c >= 'a' && c <= 'f') return c - 'a' + 10;
    if (c >= 'A' && c <= 'F') return c - 'A' + 10;
    return -1;
  };
  std::vector<std::uint8_t> out(hex.size() / 2);
  for (std::size_t i = 0; i < out.size(); ++i) {
    const int hi = nibble(hex[2 * i]);
    const int lo = nibble(hex[2 * i + 1]);
    if (hi < 0 || lo < 0) return std::nullopt;
    out[i] = static_cast<std::uint8_t>((hi << 4) | lo);
  }
  return out;
}

std::optional<Seed> Seed::from_hex(std::string_view hex) {
  if (hex.size() != 64) return std::nullopt;
  auto raw = bootforge::from_hex(hex);
  if (!raw) return std::nullopt;
  Seed seed;
  std::copy(raw->begin(), raw->end(), seed.bytes.begin());
  return seed;
}

std::string Seed::to_hex() const { return bootforge::to_hex(bytes); }

Seed Seed::derive(std::string_view label) const {
  Seed out;
  out.bytes = Sha256().update(bytes).update("derive:").update(label).finish();
  return out;
}

Seed Seed::derive(std::string_view label, std::uint64_t index) const {
  std::array<std::uint8_t, 8> idx{};
  for (int i = 0; i < 8; ++i) idx[i] = static_cast<std::uint8_t>(index >> (56 - 8 * i));
  Seed out;
  out.bytes = Sha256().update(bytes).update("derive:").update(label).update(":").update(idx).finish();
  return out;
}

void SeedStream::refill() {
  std::array<std::uint8_t, 8> ctr{};
  for (int i = 0; i < 8; ++i) ctr[i] = static_cast<std::uint8_t>(counter_ >> (56 - 8 * i));
  block_ = Sha256().update(seed_.bytes).update(ctr).finish();
  ++counter_;
  used_ = 0;
}

void SeedStream::fill(std::span<std::uint8_t> out) {
  std::size_t pos = 0;
  while (pos < out.size()) {
    if (used_ == block_.size()) refill();
    const std::size_t take = std::min(out.size() - pos, block_.size() - used_);
    std::copy_n(block_.begin() + static_cast<std::ptrdiff_t>(used_), take, out.begin() + static_cast<std::ptrdiff_t>(pos));
    used_ += take;
    pos += take;
  }
}

std::vector<std::uint8_t> SeedStream::bytes(std::size_t count) {
  std::vector<std::uint8_t> out(count);
  fill(out);
  return out;
}

std::uint64_t SeedStream::next_u64() {
  std::array<std::uint8_t, 8> raw{};
  fill(raw);
  std::uint64_t v = 0;
  for (const std::uint8_t b : raw) v = (v << 8) | b;
  return v;
}

std::uint8_t SeedStream::next_nonzero_byte() {
  std::uint8_t b = 0;
  while (b == 0) fill(std::span(&b, 1));
  return b;
}

BigUint SeedStream::uniform_below(const BigUint& bound) {
  if (bound.is_zero()) throw DomainError("uniform_below: empty range");
  const std::size_t bits = bound.bit_length();
  const std::size_t nbytes = (bits + 7) / 8;
  const unsigned excess = static_cast<unsigned>(nbytes * 8 - bits);
  std::vector<std::uint8_t> raw(nbytes);
  for (;;) {
    fill(raw);
    raw[0] &= static_cast<std::uint8_t>(0xFFU >> excess);
    BigUint v = BigUint::from_bytes_be(raw);
    if (v < bound) return v;
  }
}

BigUint SeedStream::uniform_range(const BigUint& low, const BigUint& high) {
  if (!(low < high)) throw DomainError("uniform_range: empty range");
  return low + uniform_below(high - low);
}

}  // namespace bootforge
