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

#include "bootforge/modmath.hpp"

#include <sstream>
#include <utility>

#include "bootforge/error.hpp"

namespace bootforge {

namespace {

using u128 = unsigned __int128;

constexpr std::array<std::uint16_t, 54> kSmallPrimes = {
    3,   5,   7,   11,  13,  17,  19,  23,  29,  31,  37,  41,  43,  47,  53,  59,  61,  67,
    71,  73,  79,  83,  89,  97,  101, 103, 107, 109, 113, 127, 131, 137, 139, 149, 151, 157,
    163, 167, 173, 179, 181, 191, 193, 197, 199, 211, 223, 227, 229, 233, 239, 241, 251, 257};

}  // namespace

BigUint mod_exp(const BigUint& base, const BigUint& exp, const BigUint& modulus) {
  if (modulus <= BigUint(1)) throw DomainError("mod_exp: modulus must be > 1");
  const BigUint b = base % modulus;
  BigUint result(1);
  for (std::size_t i = exp.bit_length(); i-- > 0;) {
    result = (result * result) % modulus;
    if (exp.test_bit(i)) result = (result * b) % modulus;
  }
  return result;
}

std::optional<BigUint> mod_inverse(const BigUint& a, const BigUint& m) {
  if (m <= BigUint(1)) return std::nullopt;
  BigUint r0 = m;
  BigUint r1 = a % m;
  BigUint t0(0);
  BigUint t1(1);
  while (!r1.is_zero()) {
    auto [q, r] = BigUint::divmod(r0, r1);
    r0 = std::move(r1);
    r1 = std::move(r);
    const BigUint qt = (q * t1) % m;
    BigUint next = t0 >= qt ? t0 - qt : t0 + m - qt;
    t0 = std::move(t1);
    t1 = std::move(next);
  }
  if (r0 != BigUint(1)) return std::nullopt;
  return t0;
}

// ---------------------------------------------------------------------------
// Montgomery

Montgomery::Montgomery(const BigUint& modulus) : modulus_(modulus) {
  if (!modulus.is_odd() || modulus <= BigUint(1)) {
    throw DomainError("Montgomery: modulus must be odd and > 1");
  }
  n_.assign(modulus.limbs().begin(), modulus.limbs().end());
  std::uint64_t inv = 1;
  for (int i = 0; i < 6; ++i) inv *= 2 - n_[0] * inv;
  n0_inv_ = ~inv + 1;
  if (n_.size() > kMaxLimbs) throw DomainError("Montgomery: modulus wider than 4096 bits");
  r2_ = residue(BigUint::power_of_two(128 * n_.size()) % modulus_);
}

Montgomery::Residue Montgomery::residue(const BigUint& value) const {
  const BigUint reduced = value < modulus_ ? value : value % modulus_;
  Residue out(n_.size(), 0);
  const auto limbs = reduced.limbs();
  std::copy(limbs.begin(), limbs.end(), out.begin());
  return out;
}

BigUint Montgomery::value(const Residue& r) const { return BigUint::from_limbs(r); }

void Montgomery::mul(const Residue& a, const Residue& b, Residue& out) const {
  const std::size_t s = n_.size();
  std::array<std::uint64_t, kMaxLimbs + 2> t{};
  for (std::size_t i = 0; i < s; ++i) {
    std::uint64_t carry = 0;
    const u128 bi = b[i];
    for (std::size_t j = 0; j < s; ++j) {
      const u128 x = static_cast<u128>(a[j]) * bi + t[j] + carry;
      t[j] = static_cast<std::uint64_t>(x);
      carry = static_cast<std::uint64_t>(x >> 64);
    }
    u128 x = static_cast<u128>(t[s]) + carry;
    t[s] = static_cast<std::uint64_t>(x);
    t[s + 1] = static_cast<std::uint64_t>(x >> 64);

    const std::uint64_t m = t[0] * n0_inv_;
    x = static_cast<u128>(m) * n_[0] + t[0];
    carry = static_cast<std::uint64_t>(x >> 64);
    for (std::size_t j = 1; j < s; ++j) {
      x = static_cast<u128>(m) * n_[j] + t[j] + carry;
      t[j - 1] = static_cast<std::uint64_t>(x);
      carry = static_cast<std::uint64_t>(x >> 64);
    }
    x = static_cast<u128>(t[s]) + carry;
    t[s - 1] = static_cast<std::uint64_t>(x);
    t[s] = t[s + 1] + static_cast<std::uint64_t>(x >> 64);
  }

  bool subtract = t[s] != 0;
  if (!subtract) {
    subtract = true;  // t == n also reduces to zero
    for (std::size_t i = s; i-- > 0;) {
      if (t[i] != n_[i]) {
        subtract = t[i] > n_[i];
        break;
      }
    }
  }
  out.resize(s);
  if (subtract) {
    std::uint64_t borrow = 0;
    for (std::size_t i = 0; i < s; ++i) {
      const std::uint64_t d1 = t[i] - n_[i];
      const std::uint64_t b1 = t[i] < n_[i];
      out[i] = d1 - borrow;
      borrow = b1 | (d1 < borrow);
    }
  } else {
    std::copy_n(t.begin(), s, out.begin());
  }
}

Montgomery::Residue Montgomery::to_mont(const Residue& plain) const {
  Residue out;
  mul(plain, r2_, out);
  return out;
}

Montgomery::Residue Montgomery::from_mont(const Residue& mont) const {
  Residue one(n_.size(), 0);
  one[0] = 1;
  Residue out;
  mul(mont, one, out);
  return out;
}

BigUint Montgomery::pow(const BigUint& base, const BigUint& exp) const {
  Residue one(n_.size(), 0);
  one[0] = 1;
  Residue acc = to_mont(one);
  const Residue b = to_mont(residue(base));
  Residue tmp;
  for (std::size_t i = exp.bit_length(); i-- > 0;) {
    mul(acc, acc, tmp);
    std::swap(acc, tmp);
    if (exp.test_bit(i)) {
      mul(acc, b, tmp);
      std::swap(acc, tmp);
    }
  }
  return value(from_mont(acc));
}

// ---------------------------------------------------------------------------
// Primes and keys

bool is_probable_prime(const BigUint& candidate, SeedStream& stream, int rounds) {
  if (candidate < BigUint(2)) return false;
  if (candidate < BigUint(4)) return true;
  if (!candidate.is_odd()) return false;
  for (const std::uint16_t p : kSmallPrimes) {
    if (candidate == BigUint(p)) return true;
    if (candidate.mod_u64(p) == 0) return false;
  }

  const BigUint minus_one = candidate - BigUint(1);
  BigUint d = minus_one;
  std::size_t s = 0;
  while (!d.is_odd()) {
    d >>= 1;
    ++s;
  }
  const Montgomery mont(candidate);
  const BigUint two(2);
  for (int round = 0; round < rounds; ++round) {
    const BigUint a = stream.uniform_range(two, minus_one);  // [2, n-2]
    BigUint x = mont.pow(a, d);
    if (x == BigUint(1) || x == minus_one) continue;
    bool composite = true;
    for (std::size_t r = 1; r < s; ++r) {
      x = (x * x) % candidate;
      if (x == minus_one) {
        composite = false;
        break;
      }
    }
    if (composite) return false;
  }
  return true;
}

namespace {

std::optional<BigUint> find_prime(std::size_t bits, const BigUint& e, SeedStream& stream,
                                  const BigUint* distinct_from) {
  const std::size_t budget = 100 * bits + 1000;
  std::vector<std::uint8_t> raw((bits + 7) / 8);
  const unsigned excess = static_cast<unsigned>(raw.size() * 8 - bits);
  for (std::size_t attempt = 0; attempt < budget; ++attempt) {
    stream.fill(raw);
    raw[0] &= static_cast<std::uint8_t>(0xFFU >> excess);
    BigUint p = BigUint::from_bytes_be(raw);
    if (!p.test_bit(bits - 1)) p += BigUint::power_of_two(bits - 1);
    if (!p.test_bit(bits - 2)) p += BigUint::power_of_two(bits - 2);
    if (!p.is_odd()) p += BigUint(1);
    if (p.bit_length() != bits) continue;
    if (distinct_from != nullptr && p == *distinct_from) continue;
    if (gcd(p - BigUint(1), e) != BigUint(1)) continue;
    if (is_probable_prime(p, stream, 40)) return p;
  }
  return std::nullopt;
}

}  // namespace

RsaKeyPair generate_keypair(std::size_t bit_length, const Seed& seed, PublicExponent exponent) {
  if (bit_length < 64 || bit_length > 4096 || bit_length % 8 != 0) {
    throw DomainError("generate_keypair: bit_length must be a multiple of 8 in [64, 4096]");
  }
  const BigUint e(exponent == PublicExponent::F4 ? 65537 : 3);
  const std::size_t half = bit_length / 2;

  constexpr int kMaxRestarts = 8;
  for (int restart = 0; restart < kMaxRestarts; ++restart) {
    SeedStream stream(seed.derive("rsa-keygen", static_cast<std::uint64_t>(restart)));
    auto p = find_prime(half, e, stream, nullptr);
    if (!p) continue;
    auto q = find_prime(bit_length - half, e, stream, &*p);
    if (!q) continue;

    const BigUint n = *p * *q;
    if (n.bit_length() != bit_length) continue;
    const BigUint p1 = *p - BigUint(1);
    const BigUint q1 = *q - BigUint(1);
    const BigUint lambda = (p1 * q1) / gcd(p1, q1);
    auto d = mod_inverse(e, lambda);
    if (!d) continue;
    return RsaKeyPair{n, e, *d, bit_length};
  }
  throw InternalError("generate_keypair: prime search exhausted");
}

BigUint raw_sign(const BigUint& message, const RsaKeyPair& key) {
  if (key.d.is_zero()) throw DomainError("raw_sign: key has no private exponent");
  if (message >= key.n) throw DomainError("raw_sign: message must be < n");
  return mod_exp(message, key.d, key.n);
}

BigUint raw_verify(const BigUint& signature, const PublicKey& key) {
  if (signature >= key.n) throw DomainError("raw_verify: signature must be < n");
  return mod_exp(signature, key.e, key.n);
}

// ---------------------------------------------------------------------------
// Text formats

std::string format_key_file(const RsaKeyPair& key) {
  std::string out = "n=" + key.n.to_hex() + "\ne=" + key.e.to_hex() + "\n";
  if (!key.d.is_zero()) out += "d=" + key.d.to_hex() + "\n";
  return out;
}

std::string format_public_key_file(const PublicKey& key) {
  return "n=" + key.n.to_hex() + "\ne=" + key.e.to_hex() + "\n";
}

namespace {

template <typename Fn>
void for_each_line(std::string_view text, Fn&& fn) {
  std::size_t line_start = 0;
  while (line_start < text.size()) {
    std::size_t end = text.find('\n', line_start);
    if (end == std::string_view::npos) end = text.size();
    std::string_view line = text.substr(line_start, end - line_start);
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    if (!line.empty()) fn(line, line_start);
    line_start = end + 1;
  }
}

BigUint parse_hex_field(std::string_view value, std::size_t at) {
  auto v = BigUint::from_hex(value);
  if (!v) throw ParseError("invalid hex value", at);
  return *v;
}

}  // namespace

RsaKeyPair parse_key_file(std::string_view text) {
  std::optional<BigUint> n;
  std::optional<BigUint> e;
  BigUint d;
  for_each_line(text, [&](std::string_view line, std::size_t at) {
    const auto eq = line.find('=');
    if (eq == std::string_view::npos) throw ParseError("expected key=value", at);
    const std::string_view name = line.substr(0, eq);
    const std::size_t value_at = at + eq + 1;
    const BigUint value = parse_hex_field(line.substr(eq + 1), value_at);
    if (name == "n") {
      n = value;
    } else if (name == "e") {
      e = value;
    } else if (name == "d") {
      d = value;
    } else {
      throw ParseError("unknown key field '" + std::string(name) + "'", at);
    }
  });
  if (!n || !e) throw ParseError("key file needs n= and e=", text.size());
  RsaKeyPair key{*n, *e, d, n->byte_length() * 8};
  return key;
}

std::string KeySlot::label() const {
  std::string out = console == Console::Retail ? "retail." : "dev.";
  switch (type) {
    case SigType::NcsdHeader:
      return out + "ncsd";
    case SigType::NandBoot:
      return out + "nand";
    case SigType::NonNandBoot:
      return out + "nonnand";
  }
  return out;
}

std::optional<KeySlot> KeySlot::from_label(std::string_view label) {
  for (const KeySlot slot : all()) {
    if (slot.label() == label) return slot;
  }
  return std::nullopt;
}

std::array<KeySlot, 6> KeySlot::all() {
  return {KeySlot{Console::Retail, SigType::NcsdHeader},    KeySlot{Console::Retail, SigType::NandBoot},
          KeySlot{Console::Retail, SigType::NonNandBoot},   KeySlot{Console::Developer, SigType::NcsdHeader},
          KeySlot{Console::Developer, SigType::NandBoot},   KeySlot{Console::Developer, SigType::NonNandBoot}};
}

std::size_t KeyRegistry::index(KeySlot slot) noexcept {
  return (slot.console == Console::Retail ? 0 : 3) + static_cast<std::size_t>(slot.type);
}

void KeyRegistry::install(KeySlot slot, PublicKey key) {
  auto& entry = slots_[index(slot)];
  if (entry) throw DomainError("key slot " + slot.label() + " is already initialized");
  entry = std::move(key);
}

bool KeyRegistry::has(KeySlot slot) const noexcept { return slots_[index(slot)].has_value(); }

const PublicKey& KeyRegistry::at(KeySlot slot) const {
  const auto& entry = slots_[index(slot)];
  if (!entry) throw DomainError("key slot " + slot.label() + " is empty");
  return *entry;
}

bool KeyRegistry::complete() const noexcept {
  for (const auto& s : slots_) {
    if (!s) return false;
  }
  return true;
}

std::string KeyRegistry::to_text() const {
  std::ostringstream out;
  for (const KeySlot slot : KeySlot::all()) {
    if (!has(slot)) continue;
    const PublicKey& key = at(slot);
    out << slot.label() << '=' << key.n.to_hex() << ',' << key.e.to_hex() << '\n';
  }
  return out.str();
}

KeyRegistry KeyRegistry::parse(std::string_view text) {
  KeyRegistry registry;
  for_each_line(text, [&](std::string_view line, std::size_t at) {
    const auto eq = line.find('=');
    if (eq == std::string_view::npos) throw ParseError("expected slot=n,e", at);
    const auto slot = KeySlot::from_label(line.substr(0, eq));
    if (!slot) throw ParseError("unknown key slot '" + std::string(line.substr(0, eq)) + "'", at);
    const std::string_view value = line.substr(eq + 1);
    const auto comma = value.find(',');
    if (comma == std::string_view::npos) throw ParseError("expected n,e", at + eq + 1);
    PublicKey key{parse_hex_field(value.substr(0, comma), at + eq + 1),
                  parse_hex_field(value.substr(comma + 1), at + eq + 2 + comma)};
    if (registry.has(*slot)) throw ParseError("duplicate key slot " + slot->label(), at);
    registry.install(*slot, std::move(key));
  });
  return registry;
}

}  // namespace bootforge
