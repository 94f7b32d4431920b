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
#include <string>
#include <string_view>
#include <vector>

#include "bootforge/bigint.hpp"
#include "bootforge/seed.hpp"

namespace bootforge {

/// base^exp mod modulus by left-to-right square-and-multiply.
/// Throws DomainError when modulus <= 1.
BigUint mod_exp(const BigUint& base, const BigUint& exp, const BigUint& modulus);

/// Inverse of a modulo m, or nullopt when gcd(a, m) != 1.
std::optional<BigUint> mod_inverse(const BigUint& a, const BigUint& m);

/// Montgomery arithmetic for a fixed odd modulus (CIOS, 64-bit limbs).
///
/// Results are bit-identical to the plain BigUint path; it exists because the
/// signature search spends nearly all of its time in one modular
/// multiplication per step.
class Montgomery {
 public:
  static constexpr std::size_t kMaxLimbs = 64;

  explicit Montgomery(const BigUint& modulus);

  const BigUint& modulus() const noexcept { return modulus_; }
  std::size_t limbs() const noexcept { return n_.size(); }

  /// Fixed-width little-endian residue, `limbs()` long.
  using Residue = std::vector<std::uint64_t>;

  Residue residue(const BigUint& value) const;  // value mod n, plain form
  BigUint value(const Residue& r) const;

  Residue to_mont(const Residue& plain) const;    // x*R mod n
  Residue from_mont(const Residue& mont) const;   // x*R^-1 mod n
  /// out = a*b*R^-1 mod n. Thread-safe; `out` may alias an input.
  void mul(const Residue& a, const Residue& b, Residue& out) const;

  BigUint pow(const BigUint& base, const BigUint& exp) const;

 private:
  BigUint modulus_;
  std::vector<std::uint64_t> n_;
  std::uint64_t n0_inv_ = 0;  // -n^-1 mod 2^64
  Residue r2_;                 // R^2 mod n
};

/// Miller-Rabin with `rounds` bases drawn from `stream`, after trial division.
bool is_probable_prime(const BigUint& candidate, SeedStream& stream, int rounds = 40);

struct PublicKey {
  BigUint n;
  BigUint e;

  std::size_t block_length() const noexcept { return n.byte_length(); }
  friend bool operator==(const PublicKey&, const PublicKey&) = default;
};

struct RsaKeyPair {
  BigUint n;
  BigUint e;
  BigUint d;
  std::size_t bit_length = 0;

  std::size_t block_length() const noexcept { return bit_length / 8; }
  PublicKey public_key() const { return {n, e}; }
  friend bool operator==(const RsaKeyPair&, const RsaKeyPair&) = default;
};

enum class PublicExponent { F4, Three };

/// Deterministic RSA key generation from a seed.
///
/// Primes come from the counter-mode SHA-256 stream of `seed`; each prime has
/// its top two bits set so n has exactly `bit_length` bits. If one stream runs
/// out of candidates the search restarts from a derived sub-seed.
RsaKeyPair generate_keypair(std::size_t bit_length, const Seed& seed,
                            PublicExponent exponent = PublicExponent::F4);

BigUint raw_sign(const BigUint& message, const RsaKeyPair& key);
BigUint raw_verify(const BigUint& signature, const PublicKey& key);

// Key files: "n=<hex>\ne=<hex>\nd=<hex>\n", lowercase hex without padding.
std::string format_key_file(const RsaKeyPair& key);
std::string format_public_key_file(const PublicKey& key);
/// Returns the pair with d = 0 when the file has no "d=" line.
RsaKeyPair parse_key_file(std::string_view text);

enum class Console { Retail, Developer };
enum class SigType { NcsdHeader, NandBoot, NonNandBoot };

struct KeySlot {
  Console console = Console::Retail;
  SigType type = SigType::NandBoot;

  /// "retail.ncsd", "dev.nonnand", ...
  std::string label() const;
  static std::optional<KeySlot> from_label(std::string_view label);
  static std::array<KeySlot, 6> all();

  friend bool operator==(const KeySlot&, const KeySlot&) = default;
};

/// Six write-once public-key slots, one per (console, signature type).
class KeyRegistry {
 public:
  /// Throws DomainError if the slot is already populated.
  void install(KeySlot slot, PublicKey key);
  bool has(KeySlot slot) const noexcept;
  /// Throws DomainError for an empty slot.
  const PublicKey& at(KeySlot slot) const;
  bool complete() const noexcept;

  std::string to_text() const;
  static KeyRegistry parse(std::string_view text);

 private:
  static std::size_t index(KeySlot slot) noexcept;

  std::array<std::optional<PublicKey>, 6> slots_{};
};

}  // namespace bootforge
