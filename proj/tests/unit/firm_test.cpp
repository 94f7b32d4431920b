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

#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>

#include "bootforge/error.hpp"
#include "bootforge/firm.hpp"
#include "support.hpp"

namespace bootforge::firm {
namespace {

using testing::nand_key;
using testing::seed_of;

std::vector<std::uint8_t> ramp(std::size_t n) {
  std::vector<std::uint8_t> v(n);
  for (std::size_t i = 0; i < n; ++i) v[i] = static_cast<std::uint8_t>(i);
  return v;
}

FirmImage golden_image() {
  const std::vector<SectionEntry> entries = {
      {0x08006000, CopyMethod::Ndma, {'b', 'o', 'o', 't', 'f', 'o', 'r', 'g', 'e'}},
      {0x1FF80000, CopyMethod::CpuMemcpy, ramp(0x201)},
  };
  return build_firm(entries, 0x08006000, 0x1FF80000);
}

void put32(std::vector<std::uint8_t>& b, std::size_t at, std::uint32_t v) {
  for (int i = 0; i < 4; ++i) b[at + i] = static_cast<std::uint8_t>(v >> (8 * i));
}

TEST(Layout, GoldenImage) {
  // Digests computed by an independent script from the documented layout.
  const FirmImage image = golden_image();
  const auto bytes = serialize(image);
  ASSERT_EQ(bytes.size(), 0x601u);
  EXPECT_EQ(to_hex(Sha256::hash(bytes)), "3af7bc52513d1a356aef1f6082f1f5f63f8c6d8060cc43a8565c7a9f9b5b8a40");
  EXPECT_EQ(to_hex(image.header.hash()), "2c7e8ccdacdcd632ce06466d3ff9ebda119e0e7e821e6b2da89961bb722400dd");
  EXPECT_EQ(to_hex(std::span(bytes).subspan(0x40, 0x10)), "00020000006000080900000000000000");
  EXPECT_EQ(image.header.sections[1].offset, 0x400u);
  EXPECT_FALSE(image.header.sections[2].used());
}

TEST(Layout, RoundTrip) {
  const FirmImage image = golden_image();
  EXPECT_EQ(parse(serialize(image)), image);
  SeedStream s(seed_of("firm-rt"));
  for (int i = 0; i < 50; ++i) {
    std::vector<SectionEntry> entries(1 + s.next_u64() % 4);
    for (auto& e : entries) {
      e.phys_addr = static_cast<std::uint32_t>(s.next_u64());
      e.copy_method = static_cast<CopyMethod>(s.next_u64() % 3);
      e.payload = s.bytes(1 + s.next_u64() % 0x900);
    }
    FirmImage img = build_firm(entries, 1, 2, 3);
    img.header.reserved[5] = 0x77;
    img = fakesign_firm(img, s.uniform_below(BigUint::power_of_two(2048)), 0x100);
    const auto bytes = serialize(img);
    EXPECT_EQ(parse(bytes), img);
    EXPECT_EQ(serialize(parse(bytes)), bytes);
  }
}

TEST(Layout, BuildRejectsBadInput) {
  EXPECT_THROW((void)build_firm(std::vector<SectionEntry>{}, 0, 0), DomainError);
  EXPECT_THROW((void)build_firm(std::vector<SectionEntry>(5, SectionEntry{0, CopyMethod::Ndma, {1}}), 0, 0),
               DomainError);
  EXPECT_THROW((void)build_firm(std::vector<SectionEntry>{{0, CopyMethod::Ndma, {}}}, 0, 0), DomainError);
}

std::size_t parse_error_at(const std::vector<std::uint8_t>& bytes) {
  try {
    (void)parse(bytes);
  } catch (const ParseError& e) {
    return e.position();
  }
  ADD_FAILURE() << "parse accepted malformed input";
  return SIZE_MAX;
}

TEST(Parse, Errors) {
  const auto good = serialize(golden_image());

  auto b = good;
  b[0] = 'X';
  EXPECT_EQ(parse_error_at(b), 0u);
  EXPECT_EQ(parse_error_at(std::vector<std::uint8_t>(good.begin(), good.begin() + 0x100)), 0x100u);

  b = good;
  put32(b, 0x40 + 0x0C, 3);
  EXPECT_EQ(parse_error_at(b), 0x4Cu);

  b = good;
  b[0xA0 + 0x04] = 1;  // unused section 2 with an address
  EXPECT_EQ(parse_error_at(b), 0xA0u);

  b = good;
  put32(b, 0x40, 0x100);
  EXPECT_EQ(parse_error_at(b), 0x40u);

  b = good;
  b.pop_back();
  EXPECT_EQ(parse_error_at(b), b.size());

  b = good;
  put32(b, 0x70, 0x200);  // section 1 moved on top of section 0
  EXPECT_EQ(parse_error_at(b), 0x70u);
}

TEST(Signing, HonestSignatureValidates) {
  const RsaKeyPair key = generate_keypair(2048, seed_of("firm-2048"));
  const FirmImage signed_image = sign_firm(golden_image(), key);
  const auto stack = sig::StackModel::boot9(0x100, seed_of("s"));
  const Validation strict = validate_firm(signed_image, key.public_key(), sig::ParserConfig::strict(), stack);
  EXPECT_TRUE(strict.accepted());
  EXPECT_EQ(strict.sections.size(), 2u);
  EXPECT_TRUE(validate_firm(signed_image, key.public_key(), sig::ParserConfig::flawed(0x100), stack).accepted());
  EXPECT_FALSE(validate_firm(golden_image(), key.public_key(), sig::ParserConfig::strict(), stack).accepted());
}

TEST(Signing, SmallKeyBlockSitsAtFieldStart) {
  const RsaKeyPair& key = nand_key();
  const FirmImage img = sign_firm(golden_image(), key);
  EXPECT_EQ(raw_verify(img.header.signature_value(64), key.public_key()),
            sig::honest_plaintext(64, img.header.hash()).to_value());
  for (std::size_t i = 64; i < kSignatureSize; ++i) EXPECT_EQ(img.header.signature[i], 0) << i;
  EXPECT_THROW((void)img.header.signature_value(0x101), DomainError);
}

TEST(Signing, HeaderBitFlipsBreakStrictValidation) {
  const RsaKeyPair& key = nand_key();
  const auto bytes = serialize(sign_firm(golden_image(), key));
  const auto stack = sig::StackModel::boot9(64, seed_of("s"));
  for (std::size_t byte : {0x04u, 0x08u, 0x0Cu, 0x10u, 0x3Fu, 0x44u, 0x48u, 0x50u, 0x6Fu, 0xFFu}) {
    auto b = bytes;
    b[byte] ^= 0x80;
    FirmImage img;
    try {
      img = parse(b);
    } catch (const ParseError&) {
      continue;
    }
    const Validation v = validate_firm(img, key.public_key(), sig::ParserConfig::strict(), stack);
    EXPECT_FALSE(v.accepted()) << byte;
  }
}

TEST(Signing, PayloadFlipNamesTheSection) {
  const RsaKeyPair& key = nand_key();
  FirmImage img = sign_firm(golden_image(), key);
  img.payloads[1][0x100] ^= 1;
  const Validation v =
      validate_firm(img, key.public_key(), sig::ParserConfig::strict(), sig::StackModel::boot9(64, seed_of("s")));
  EXPECT_TRUE(v.signature.accepted());
  EXPECT_EQ(v.first_bad_section, 1u);
  EXPECT_FALSE(v.accepted());
}

TEST(Signing, FakesignStoresVerbatim) {
  const FirmImage img = fakesign_firm(golden_image(), BigUint(0xABCD), 0x100);
  EXPECT_EQ(img.header.signature[0xFE], 0xAB);
  EXPECT_EQ(img.header.signature[0xFF], 0xCD);
  EXPECT_EQ(img.header.signature_value(0x100), BigUint(0xABCD));
}

TEST(Descriptor, ParsesAndBuilds) {
  const auto dir = std::filesystem::temp_directory_path() / "bootforge-firm-descriptor";
  std::filesystem::create_directories(dir);
  {
    std::ofstream(dir / "a.bin", std::ios::binary) << "bootforge";
    const auto r = ramp(0x201);
    std::ofstream(dir / "b.bin", std::ios::binary).write(reinterpret_cast<const char*>(r.data()), 0x201);
  }
  const std::string text = R"({"arm9_entry": "0x08006000", "arm11_entry": 536346624,
    "sections": [{"phys_addr": "0x08006000", "copy_method": "ndma", "payload_file": "a.bin"},
                 {"phys_addr": "0x1FF80000", "copy_method": 2, "payload_file": "b.bin"}]})";
  EXPECT_EQ(build_firm(parse_descriptor(text, dir)), golden_image());
  EXPECT_THROW((void)parse_descriptor("{", dir), ParseError);
  EXPECT_THROW((void)parse_descriptor(R"({"sections": [{"phys_addr": 0, "payload_file": "missing"}]})", dir),
               DomainError);
  EXPECT_THROW((void)parse_descriptor(R"({"sections": [{"phys_addr": 0, "copy_method": 7, "payload_file": "a.bin"}]})",
                                      dir),
               DomainError);
  std::filesystem::remove_all(dir);
}

TEST(Cipher, NullCipherIsIdentity) {
  const NullCipher cipher;
  const auto data = ramp(100);
  EXPECT_EQ(cipher.decrypt(cipher.encrypt(data)), data);
}

}  // namespace
}  // namespace bootforge::firm
