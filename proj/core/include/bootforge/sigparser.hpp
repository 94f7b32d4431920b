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

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "bootforge/bigint.hpp"
#include "bootforge/modmath.hpp"
#include "bootforge/seed.hpp"
#include "bootforge/sha256.hpp"

namespace bootforge::sig {

/// Bytes compared at the landing offset: one SHA-256 digest.
inline constexpr std::size_t kCompareLength = 0x20;

/// DER DigestInfo prefix for SHA-256 (AlgorithmIdentifier + OCTET STRING header).
inline constexpr std::uint8_t kSha256DigestInfo[19] = {0x30, 0x31, 0x30, 0x0d, 0x06, 0x09, 0x60,
                                                       0x86, 0x48, 0x01, 0x65, 0x03, 0x04, 0x02,
                                                       0x01, 0x05, 0x00, 0x04, 0x20};

/// Decoded RSA signature: the big-endian encoding of s^e mod n, exactly one
/// key block long.
class PlaintextBlock {
 public:
  explicit PlaintextBlock(std::vector<std::uint8_t> bytes);

  static PlaintextBlock from_value(const BigUint& value, std::size_t block_length);
  /// raw_verify(signature) encoded to the key's block length.
  static PlaintextBlock from_signature(const BigUint& signature, const PublicKey& key);

  BigUint to_value() const { return BigUint::from_bytes_be(bytes_); }
  std::span<const std::uint8_t> bytes() const noexcept { return bytes_; }
  std::size_t size() const noexcept { return bytes_.size(); }
  std::uint8_t operator[](std::size_t i) const { return bytes_[i]; }

  friend bool operator==(const PlaintextBlock&, const PlaintextBlock&) = default;

 private:
  std::vector<std::uint8_t> bytes_;
};

/// Set of landing offsets, relative to the block start, stored as sorted
/// half-open intervals.
class OffsetWindow {
 public:
  OffsetWindow() = default;

  /// [first, last] inclusive. Empty when last < first.
  static OffsetWindow range(std::ptrdiff_t first, std::ptrdiff_t last);
  /// The 128 offsets starting right after the block.
  static OffsetWindow after_block(std::size_t block_length) {
    const auto bl = static_cast<std::ptrdiff_t>(block_length);
    return range(bl, bl + 127);
  }

  OffsetWindow& add(std::ptrdiff_t first, std::ptrdiff_t last);
  bool contains(std::ptrdiff_t offset) const noexcept;
  bool empty() const noexcept { return intervals_.empty(); }
  std::size_t size() const noexcept;
  std::span<const std::pair<std::ptrdiff_t, std::ptrdiff_t>> intervals() const noexcept {
    return intervals_;
  }

 private:
  std::vector<std::pair<std::ptrdiff_t, std::ptrdiff_t>> intervals_;  // [lo, hi)
};

enum class ParserMode { Flawed, Strict };

/// Whether the flawed walk requires the two SEQUENCE tags (0x30) of the
/// DigestInfo structure. The final header's type byte is never checked.
enum class TagCheck { Unchecked, SequenceTags };

struct ParserConfig {
  ParserMode mode = ParserMode::Flawed;
  OffsetWindow target_window;
  std::size_t compare_length = kCompareLength;
  TagCheck tags = TagCheck::Unchecked;

  /// Flawed walk, type bytes unchecked, window = 128 offsets after the block.
  static ParserConfig flawed(std::size_t block_length);
  /// Flawed walk with SEQUENCE tags enforced. This is the predicate the
  /// shipped exploit plaintext satisfies and the one used for hit-rate
  /// extrapolation at RSA-2048 block size.
  static ParserConfig boot9_full(std::size_t block_length);
  static ParserConfig strict();
};

/// Stack bytes around the signature buffer, as seen by the parser.
///
/// Offsets are relative to the block start: [-pre_gap.size(), 0) is pre_gap,
/// [0, block_length) is the block, [block_length, block_length +
/// post_bytes.size()) is post_bytes. The parser stores the calculated hash
/// at calc_hash_offset before comparing. Anything outside is unmapped.
struct StackModel {
  std::vector<std::uint8_t> pre_gap;
  std::vector<std::uint8_t> post_bytes;
  std::ptrdiff_t calc_hash_offset = 0;

  /// 0x20 bytes of other stack data, the block, the calculated hash
  /// directly after the block, then 0x20 more bytes of other stack data.
  static StackModel boot9(std::size_t block_length, const Seed& fill_seed);
  /// Same shape with the hash stored at `calc_hash_offset` and
  /// `post_length` bytes modeled after the block.
  static StackModel with_hash_at(std::size_t block_length, std::ptrdiff_t calc_hash_offset,
                                 std::size_t post_length, const Seed& fill_seed);

  std::ptrdiff_t first_offset() const noexcept {
    return -static_cast<std::ptrdiff_t>(pre_gap.size());
  }
  std::ptrdiff_t end_offset(std::size_t block_length) const noexcept {
    return static_cast<std::ptrdiff_t>(block_length + post_bytes.size());
  }
};

enum class Verdict { Accept, Reject, OutOfBounds };

enum class RejectReason {
  BadBlockType,
  NoPaddingTerminator,
  BadAsn1,
  HashMismatch,
  PaddingNotFF,
  PaddingTooShort,
  TrailingGarbage,
};

struct ParseOutcome {
  Verdict verdict = Verdict::Reject;
  std::optional<RejectReason> reason;
  std::optional<std::ptrdiff_t> landing_offset;

  bool accepted() const noexcept { return verdict == Verdict::Accept; }

  static ParseOutcome accept(std::ptrdiff_t landing) { return {Verdict::Accept, std::nullopt, landing}; }
  static ParseOutcome reject(RejectReason why, std::optional<std::ptrdiff_t> landing = std::nullopt) {
    return {Verdict::Reject, why, landing};
  }
  static ParseOutcome out_of_bounds(std::ptrdiff_t landing) {
    return {Verdict::OutOfBounds, std::nullopt, landing};
  }

  friend bool operator==(const ParseOutcome&, const ParseOutcome&) = default;
};

std::string_view to_string(Verdict verdict);
std::string_view to_string(RejectReason reason);
std::string describe(const ParseOutcome& outcome);

/// Result of the structural part of the flawed walk (everything before
/// the stack is touched).
struct FlawedWalk {
  std::optional<RejectReason> failure;
  std::size_t terminator = 0;        // index of the 0x00 ending the padding
  std::ptrdiff_t final_header = 0;   // offset of the last TLV header
  std::ptrdiff_t landing = 0;        // final_header + 2
};

/// Steps 1-5 of the flawed parser: block type, padding scan, outer header,
/// inner header plus skip, final header. Never reads past the block except
/// to compute offsets.
FlawedWalk walk_flawed(std::span<const std::uint8_t> block, TagCheck tags = TagCheck::Unchecked);

/// Boot ROM style verifier: no bounds checks on ASN.1 lengths, block type 1
/// or 2, any nonzero padding of any length, compare 0x20 bytes wherever the
/// lengths point, reading the surrounding stack.
ParseOutcome flawed_parse(const PlaintextBlock& block, const Digest& calc_hash,
                          const StackModel& stack, TagCheck tags = TagCheck::Unchecked);

/// Fixed verifier: block type 1, >= 8 bytes of 0xFF padding, exact
/// SHA-256 DigestInfo, hash ending exactly at the block end.
ParseOutcome strict_parse(const PlaintextBlock& block, const Digest& calc_hash);

/// Dispatches on config.mode. Strict ignores the stack.
ParseOutcome parse(const PlaintextBlock& block, const Digest& calc_hash, const StackModel& stack,
                   const ParserConfig& config);

/// Stack-independent acceptance predicate used by the signature search:
/// the landing offset if the flawed walk completes and lands inside
/// config.target_window.
std::optional<std::ptrdiff_t> classify_plaintext(std::span<const std::uint8_t> block,
                                                 const ParserConfig& config);
inline std::optional<std::ptrdiff_t> classify_plaintext(const PlaintextBlock& block,
                                                        const ParserConfig& config) {
  return classify_plaintext(block.bytes(), config);
}

/// Honest PKCS#1 v1.5 plaintext: 00 01 FF.. 00 DigestInfo(SHA-256) hash.
PlaintextBlock honest_plaintext(std::size_t block_length, const Digest& hash);

/// Hex dump with one legend letter per byte:
///   F flag byte, P padding, T ASN.1 type field, L ASN.1 length field,
///   A added length, H embedded hash, . other.
std::string render_annotated(const PlaintextBlock& block, TagCheck tags = TagCheck::Unchecked);

}  // namespace bootforge::sig
