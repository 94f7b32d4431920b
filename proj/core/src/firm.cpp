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

#include "bootforge/firm.hpp"

#include <algorithm>
#include <fstream>
#include <iterator>

#include "json.hpp"

#include "bootforge/error.hpp"

namespace bootforge::firm {

namespace {

void put_u32(std::span<std::uint8_t> out, std::size_t at, std::uint32_t v) {
  out[at] = static_cast<std::uint8_t>(v);
  out[at + 1] = static_cast<std::uint8_t>(v >> 8);
  out[at + 2] = static_cast<std::uint8_t>(v >> 16);
  out[at + 3] = static_cast<std::uint8_t>(v >> 24);
}

std::uint32_t get_u32(std::span<const std::uint8_t> in, std::size_t at) {
  return std::uint32_t{in[at]} | (std::uint32_t{in[at + 1]} << 8) | (std::uint32_t{in[at + 2]} << 16) |
         (std::uint32_t{in[at + 3]} << 24);
}

std::uint32_t align_up(std::uint64_t v, std::uint64_t a) {
  const std::uint64_t r = (v + a - 1) / a * a;
  if (r > 0xFFFFFFFFu) throw DomainError("build_firm: image exceeds 4 GiB");
  return static_cast<std::uint32_t>(r);
}

void write_header(const FirmHeader& h, std::span<std::uint8_t> out) {
  std::copy(kMagic.begin(), kMagic.end(), out.begin());
  put_u32(out, 0x004, h.boot_priority);
  put_u32(out, 0x008, h.arm11_entry);
  put_u32(out, 0x00C, h.arm9_entry);
  std::copy(h.reserved.begin(), h.reserved.end(), out.begin() + 0x010);
  for (std::size_t i = 0; i < kSectionCount; ++i) {
    const std::size_t base = kSectionTableOffset + i * kSectionHeaderSize;
    const SectionHeader& s = h.sections[i];
    put_u32(out, base + 0x00, s.offset);
    put_u32(out, base + 0x04, s.phys_addr);
    put_u32(out, base + 0x08, s.size);
    put_u32(out, base + 0x0C, static_cast<std::uint32_t>(s.copy_method));
    std::copy(s.hash.begin(), s.hash.end(), out.begin() + static_cast<std::ptrdiff_t>(base + 0x10));
  }
  if (out.size() >= kHeaderSize) {
    std::copy(h.signature.begin(), h.signature.end(), out.begin() + kSignatureOffset);
  }
}

}  // namespace

std::string_view to_string(CopyMethod method) {
  switch (method) {
    case CopyMethod::Ndma:
      return "ndma";
    case CopyMethod::Xdma:
      return "xdma";
    case CopyMethod::CpuMemcpy:
      return "memcpy";
  }
  return "?";
}

std::array<std::uint8_t, kSignedSize> FirmHeader::signed_bytes() const {
  std::array<std::uint8_t, kSignedSize> out{};
  write_header(*this, out);
  return out;
}

Digest FirmHeader::hash() const { return Sha256::hash(signed_bytes()); }

BigUint FirmHeader::signature_value(std::size_t block_length) const {
  if (block_length > kSignatureSize) throw DomainError("signature block longer than the 0x100-byte field");
  return BigUint::from_bytes_be(std::span(signature).first(block_length));
}

void FirmHeader::set_signature(const BigUint& value, std::size_t block_length) {
  if (block_length > kSignatureSize) throw DomainError("signature block longer than the 0x100-byte field");
  signature.fill(0);
  const auto bytes = value.to_bytes_be(block_length);
  std::copy(bytes.begin(), bytes.end(), signature.begin());
}

FirmImage build_firm(std::span<const SectionEntry> entries, std::uint32_t arm9_entry,
                     std::uint32_t arm11_entry, std::uint32_t boot_priority) {
  if (entries.empty()) throw DomainError("build_firm: at least one section required");
  if (entries.size() > kSectionCount) throw DomainError("build_firm: at most 4 sections");
  FirmImage image;
  image.header.boot_priority = boot_priority;
  image.header.arm9_entry = arm9_entry;
  image.header.arm11_entry = arm11_entry;
  std::uint64_t cursor = kHeaderSize;
  for (std::size_t i = 0; i < entries.size(); ++i) {
    const SectionEntry& e = entries[i];
    if (e.payload.empty()) throw DomainError("build_firm: section payloads must be non-empty");
    if (e.payload.size() > 0xFFFFFFFFu) throw DomainError("build_firm: section too large");
    SectionHeader& s = image.header.sections[i];
    s.offset = align_up(cursor, kPayloadAlignment);
    s.phys_addr = e.phys_addr;
    s.size = static_cast<std::uint32_t>(e.payload.size());
    s.copy_method = e.copy_method;
    s.hash = Sha256::hash(e.payload);
    image.payloads[i] = e.payload;
    cursor = std::uint64_t{s.offset} + s.size;
  }
  return image;
}

std::vector<std::uint8_t> serialize(const FirmImage& image) {
  std::size_t total = kHeaderSize;
  for (const SectionHeader& s : image.header.sections) {
    if (s.used()) total = std::max<std::size_t>(total, std::size_t{s.offset} + s.size);
  }
  std::vector<std::uint8_t> out(total, 0);
  write_header(image.header, out);
  for (std::size_t i = 0; i < kSectionCount; ++i) {
    const SectionHeader& s = image.header.sections[i];
    if (!s.used()) continue;
    if (image.payloads[i].size() != s.size) throw DomainError("serialize: payload size disagrees with header");
    std::copy(image.payloads[i].begin(), image.payloads[i].end(), out.begin() + s.offset);
  }
  return out;
}

FirmImage parse(std::span<const std::uint8_t> bytes) {
  if (bytes.size() < kMagic.size() || !std::equal(kMagic.begin(), kMagic.end(), bytes.begin())) {
    throw ParseError("bad FIRM magic", 0);
  }
  if (bytes.size() < kHeaderSize) throw ParseError("FIRM header truncated", bytes.size());

  FirmImage image;
  FirmHeader& h = image.header;
  h.boot_priority = get_u32(bytes, 0x004);
  h.arm11_entry = get_u32(bytes, 0x008);
  h.arm9_entry = get_u32(bytes, 0x00C);
  std::copy_n(bytes.begin() + 0x010, kReservedSize, h.reserved.begin());
  std::copy_n(bytes.begin() + kSignatureOffset, kSignatureSize, h.signature.begin());

  std::vector<std::pair<std::uint64_t, std::uint64_t>> extents;
  for (std::size_t i = 0; i < kSectionCount; ++i) {
    const std::size_t base = kSectionTableOffset + i * kSectionHeaderSize;
    SectionHeader& s = h.sections[i];
    s.offset = get_u32(bytes, base + 0x00);
    s.phys_addr = get_u32(bytes, base + 0x04);
    s.size = get_u32(bytes, base + 0x08);
    const std::uint32_t method = get_u32(bytes, base + 0x0C);
    if (method > static_cast<std::uint32_t>(CopyMethod::CpuMemcpy)) {
      throw ParseError("unknown copy method " + std::to_string(method), base + 0x0C);
    }
    s.copy_method = static_cast<CopyMethod>(method);
    std::copy_n(bytes.begin() + static_cast<std::ptrdiff_t>(base + 0x10), s.hash.size(), s.hash.begin());

    if (!s.used()) {
      const bool blank = s.offset == 0 && s.phys_addr == 0 && method == 0 &&
                         std::all_of(s.hash.begin(), s.hash.end(), [](std::uint8_t b) { return b == 0; });
      if (!blank) throw ParseError("unused section " + std::to_string(i) + " has nonzero fields", base);
      continue;
    }
    if (s.offset < kHeaderSize) throw ParseError("section " + std::to_string(i) + " overlaps the header", base);
    const std::uint64_t end = std::uint64_t{s.offset} + s.size;
    if (end > bytes.size()) {
      throw ParseError("section " + std::to_string(i) + " payload truncated", bytes.size());
    }
    for (const auto& [lo, hi] : extents) {
      if (s.offset < hi && lo < end) throw ParseError("section " + std::to_string(i) + " overlaps another", base);
    }
    extents.emplace_back(s.offset, end);
    image.payloads[i].assign(bytes.begin() + s.offset, bytes.begin() + static_cast<std::ptrdiff_t>(end));
  }
  return image;
}

FirmImage sign_firm(FirmImage image, const RsaKeyPair& key) {
  const std::size_t bl = key.block_length();
  const sig::PlaintextBlock plaintext = sig::honest_plaintext(bl, image.header.hash());
  image.header.set_signature(raw_sign(plaintext.to_value(), key), bl);
  return image;
}

FirmImage fakesign_firm(FirmImage image, const BigUint& signature, std::size_t block_length) {
  image.header.set_signature(signature, block_length);
  return image;
}

Validation validate_firm(const FirmImage& image, const PublicKey& key, const sig::ParserConfig& parser,
                         const sig::StackModel& stack) {
  Validation v;
  const std::size_t bl = key.block_length();
  const Digest calc_hash = image.header.hash();
  // The RSA unit reduces the operand, so an out-of-range signature is not an error.
  const BigUint decoded = mod_exp(image.header.signature_value(bl), key.e, key.n);
  const sig::PlaintextBlock plaintext = sig::PlaintextBlock::from_value(decoded, bl);
  v.signature = sig::parse(plaintext, calc_hash, stack, parser);

  for (std::size_t i = 0; i < kSectionCount; ++i) {
    const SectionHeader& s = image.header.sections[i];
    if (!s.used()) continue;
    const bool ok = image.payloads[i].size() == s.size && Sha256::hash(image.payloads[i]) == s.hash;
    v.sections.push_back({i, ok});
    if (!ok && !v.first_bad_section) v.first_bad_section = i;
  }
  return v;
}

// ---------------------------------------------------------------------------
// Descriptor

namespace {

std::uint32_t json_u32(const nlohmann::json& j, const char* field) {
  if (j.is_number_unsigned()) {
    const auto v = j.get<std::uint64_t>();
    if (v > 0xFFFFFFFFu) throw DomainError(std::string("descriptor: ") + field + " out of range");
    return static_cast<std::uint32_t>(v);
  }
  if (j.is_string()) {
    const std::string s = j.get<std::string>();
    auto v = BigUint::from_hex(s.starts_with("0x") || s.starts_with("0X") ? std::string_view(s) : std::string_view{});
    if (!v) {
      try {
        std::size_t used = 0;
        const unsigned long long dec = std::stoull(s, &used, 10);
        if (used == s.size() && dec <= 0xFFFFFFFFu) return static_cast<std::uint32_t>(dec);
      } catch (const std::exception&) {
      }
      throw DomainError(std::string("descriptor: bad integer for ") + field);
    }
    if (v->bit_length() > 32) throw DomainError(std::string("descriptor: ") + field + " out of range");
    return static_cast<std::uint32_t>(v->low_u64());
  }
  throw DomainError(std::string("descriptor: ") + field + " must be an integer");
}

CopyMethod json_copy_method(const nlohmann::json& j) {
  if (j.is_string()) {
    const std::string s = j.get<std::string>();
    if (s == "ndma") return CopyMethod::Ndma;
    if (s == "xdma") return CopyMethod::Xdma;
    if (s == "memcpy" || s == "cpu") return CopyMethod::CpuMemcpy;
  }
  const std::uint32_t v = json_u32(j, "copy_method");
  if (v > 2) throw DomainError("descriptor: copy_method must be 0, 1 or 2");
  return static_cast<CopyMethod>(v);
}

}  // namespace

BuildDescriptor parse_descriptor(std::string_view json_text, const std::filesystem::path& base_dir) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(json_text);
  } catch (const nlohmann::json::parse_error& e) {
    throw ParseError(std::string("descriptor JSON: ") + e.what(), e.byte);
  }
  BuildDescriptor d;
  if (!j.contains("sections") || !j["sections"].is_array()) throw DomainError("descriptor: missing sections array");
  for (const auto& s : j["sections"]) {
    SectionEntry e;
    e.phys_addr = json_u32(s.at("phys_addr"), "phys_addr");
    e.copy_method = s.contains("copy_method") ? json_copy_method(s["copy_method"]) : CopyMethod::Ndma;
    const std::filesystem::path file = base_dir / s.at("payload_file").get<std::string>();
    std::ifstream in(file, std::ios::binary);
    if (!in) throw DomainError("descriptor: cannot read " + file.string());
    e.payload.assign(std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>());
    d.sections.push_back(std::move(e));
  }
  d.arm9_entry = j.contains("arm9_entry") ? json_u32(j["arm9_entry"], "arm9_entry") : 0;
  d.arm11_entry = j.contains("arm11_entry") ? json_u32(j["arm11_entry"], "arm11_entry") : 0;
  d.boot_priority = j.contains("boot_priority") ? json_u32(j["boot_priority"], "boot_priority") : 0;
  return d;
}

FirmImage build_firm(const BuildDescriptor& descriptor) {
  return build_firm(descriptor.sections, descriptor.arm9_entry, descriptor.arm11_entry, descriptor.boot_priority);
}

}  // namespace bootforge::firm
