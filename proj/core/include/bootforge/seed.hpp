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

#include <array>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "bootforge/bigint.hpp"
#include "bootforge/sha256.hpp"

namespace bootforge {

/// 32-byte seed for every randomized operation.
struct Seed {
  std::array<std::uint8_t, 32> bytes{};

  /// Exactly 64 hex digits.
  static std::optional<Seed> from_hex(std::string_view hex);
  std::string to_hex() const;

  /// Independent sub-seed: SHA-256(bytes || "derive:" || label).
  Seed derive(std::string_view label) const;
  Seed derive(std::string_view label, std::uint64_t index) const;

  friend bool operator==(const Seed&, const Seed&) = default;
};

/// Counter-mode SHA-256 byte stream: block i = SHA-256(seed || counter_be64(i)).
///
/// Used wherever reproducibility across implementations matters (key
/// generation, padding filler, simulated ROM contents, search roots).
class SeedStream {
 public:
  explicit SeedStream(const Seed& seed) : seed_(seed) {}

  void fill(std::span<std::uint8_t> out);
  std::vector<std::uint8_t> bytes(std::size_t count);
  std::uint64_t next_u64();
  std::uint8_t next_nonzero_byte();

  /// Uniform in [0, bound) by rejection on bound.bit_length() bits.
  BigUint uniform_below(const BigUint& bound);
  /// Uniform in [low, high).
  BigUint uniform_range(const BigUint& low, const BigUint& high);

 private:
  void refill();

  Seed seed_;
  std::uint64_t counter_ = 0;
  Digest block_{};
  std::size_t used_ = block_.size();
};

std::string to_hex(std::span<const std::uint8_t> bytes);
/// Even-length hex, no prefix. nullopt on any bad digit.
std::optional<std::vector<std::uint8_t>> from_hex(std::string_view hex);

}  // namespace bootforge
