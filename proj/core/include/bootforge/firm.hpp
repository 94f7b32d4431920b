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
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "bootforge/bigint.hpp"
#include "bootforge/modmath.hpp"
#include "bootforge/sha256.hpp"
#include "bootforge/sigparser.hpp"

namespace bootforge::firm {

// Byte layout (all integers little-endian):
//   0x000 magic "FIRM"
//   0x004 boot priority
//   0x008 ARM11 entrypoint
//   0x00C ARM9 entrypoint
//   0x010 reserved[0x30]
//   0x040 section headers, 4 x 0x30:
//         +0x00 offset, +0x04 physical address, +0x08 size,
//         +0x0C copy method, +0x10 SHA-256[0x20]
//   0x100 RSA signature[0x100] over SHA-256 of bytes 0x000-0x0FF
//   0x200 payloads at their offsets
inline constexpr std::size_t kHeaderSize = 0x200;
inline constexpr std::size_t kSignedSize = 0x100;
inline constexpr std::size_t kSignatureOffset = 0x100;
inline constexpr std::size_t kSignatureSize = 0x100;
inline constexpr std::size_t kSectionTableOffset = 0x40;
inline constexpr std::size_t kSectionHeaderSize = 0x30;
inline constexpr std::size_t kSectionCount = 4;
inline constexpr std::size_t kReservedSize = 0x30;
inline constexpr std::size_t kPayloadAlignment = 0x200;
inline constexpr std::array<std::uint8_t, 4> kMagic = {'F', 'I', 'R', 'M'};

enum class CopyMethod : std::uint32_t { Ndma = 0, Xdma = 1, CpuMemcpy = 2 };

std::string_view to_string(CopyMethod method);

struct SectionHeader {
  std::uint32_t offset = 0;
  std::uint32_t phys_addr = 0;
  std::uint32_t size = 0;
  CopyMethod copy_method = CopyMethod::Ndma;
  Digest hash{};

  bool used() const noexcept { return size != 0; }
  friend bool operator==(const SectionHeader&, const SectionHeader&) = default;
};

struct FirmHeader {
  std::uint32_t boot_priority = 0;
  std::uint32_t arm11_entry = 0;
  std::uint32_t arm9_entry = 0;
  std::array<std::uint8_t, kReservedSize> reserved{};
  std::array<SectionHeader, kSectionCount> sections{};
  std::array<std::uint8_t, kSignatureSize> signature{};

  /// Serialized bytes 0x000-0x0FF: everything the signature covers.
  std::array<std::uint8_t, kSignedSize> signed_bytes() const;
  /// The "calculated hash": SHA-256 of signed_bytes().
  Digest hash() const;

  /// Signature field read as a big-endian integer of `block_length` bytes.
  BigUint signature_value(std::size_t block_length) const;
  void set_signature(const BigUint& value, std::size_t block_length);

  friend bool operator==(const FirmHeader&, const FirmHeader&) = default;
};

struct FirmImage {
  FirmHeader header;
  std::array<std::vector<std::uint8_t>, kSectionCount> payloads;

  friend bool operator==(const FirmImage&, const FirmImage&) = default;
};

struct SectionEntry {
  std::uint32_t phys_addr = 0;
  CopyMethod copy_method = CopyMethod::Ndma;
  std::vector<std::uint8_t> payload;
};

/// Lays out 1-4 sections from offset 0x200, each aligned to 0x200, and fills
/// in their hashes. The signature is left zeroed.
FirmImage build_firm(std::span<const SectionEntry> entries, std::uint32_t arm9_entry,
                     std::uint32_t arm11_entry, std::uint32_t boot_priority = 0);

std::vector<std::uint8_t> serialize(const FirmImage& image);
/// Throws ParseError with the byte position of the first problem.
FirmImage parse(std::span<const std::uint8_t> bytes);

/// Embeds raw_sign of the strict PKCS#1 v1.5 plaintext over header.hash().
FirmImage sign_firm(FirmImage image, const RsaKeyPair& key);
/// Embeds `signature` verbatim, whatever the header contains.
FirmImage fakesign_firm(FirmImage image, const BigUint& signature, std::size_t block_length);

struct SectionCheck {
  std::size_t index = 0;
  bool hash_matches = false;
};

struct Validation {
  sig::ParseOutcome signature;
  std::vector<SectionCheck> sections;  // used sections only
  std::optional<std::size_t> first_bad_section;

  bool accepted() const noexcept { return signature.accepted() && !first_bad_section; }
};

/// Header hash, signature parse with the selected parser, then every used
/// section's SHA-256. Section results are reported whatever the signature
/// verdict.
Validation validate_firm(const FirmImage& image, const PublicKey& key, const sig::ParserConfig& parser,
                         const sig::StackModel& stack);

/// At-rest image cipher. Images are stored in plaintext here; the only
/// implementation is the identity.
class ImageCipher {
 public:
  virtual ~ImageCipher() = default;
  virtual std::vector<std::uint8_t> decrypt(std::span<const std::uint8_t> stored) const = 0;
  virtual std::vector<std::uint8_t> encrypt(std::span<const std::uint8_t> plain) const = 0;
};

class NullCipher final : public ImageCipher {
 public:
  std::vector<std::uint8_t> decrypt(std::span<const std::uint8_t> stored) const override {
    return {stored.begin(), stored.end()};
  }
  std::vector<std::uint8_t> encrypt(std::span<const std::uint8_t> plain) const override {
    return {plain.begin(), plain.end()};
  }
};

/// Build inputs from the JSON sidecar:
/// {"sections": [{"phys_addr", "copy_method", "payload_file"}], "arm9_entry",
///  "arm11_entry", "boot_priority"}. Integers may be numbers or "0x" strings;
/// copy_method may be 0-2 or "ndma" / "xdma" / "memcpy". payload_file paths
/// are resolved against `base_dir`.
struct BuildDescriptor {
  std::vector<SectionEntry> sections;
  std::uint32_t arm9_entry = 0;
  std::uint32_t arm11_entry = 0;
  std::uint32_t boot_priority = 0;
};

BuildDescriptor parse_descriptor(std::string_view json_text, const std::filesystem::path& base_dir);
FirmImage build_firm(const BuildDescriptor& descriptor);

}  // namespace bootforge::firm
