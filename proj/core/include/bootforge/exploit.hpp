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

#include <cstdint>
#include <span>
#include <string_view>
#include <vector>

#include "bootforge/firm.hpp"
#include "bootforge/seed.hpp"

namespace bootforge::bootsim {

/// Where the staged exploit image puts things.
namespace staging {
// Section 0: Boot11 hook and ARM11 stage 2, in ARM11 work RAM.
inline constexpr std::uint32_t kArm11Code = 0x1FF80000;
inline constexpr std::uint32_t kBoot11Hook = kArm11Code;
inline constexpr std::uint32_t kArm11Stage2 = kArm11Code + 0x100;
// Boot11 protected half is staged here before ARM9 picks it up.
inline constexpr std::uint32_t kBoot11Staging = 0x1FFC0000;

// Section 1: handler, vector, hook pointers, hooks, ARM9 stage 2, in a safe
// area of ARM9 memory.
inline constexpr std::uint32_t kArm9Code = 0x08080000;
inline constexpr std::uint32_t kAbortHandler = kArm9Code;
inline constexpr std::uint32_t kVectorData = kArm9Code + 0x100;
inline constexpr std::uint32_t kHookPointers = kArm9Code + 0x108;
inline constexpr std::uint32_t kBoot9Hook1 = kArm9Code + 0x200;
inline constexpr std::uint32_t kBoot9Hook2 = kArm9Code + 0x300;
inline constexpr std::uint32_t kArm9Stage2 = kArm9Code + 0x400;
inline constexpr std::uint32_t kNames = kArm9Code + 0x600;
inline constexpr std::uint32_t kBoot9DumpName = kNames;
inline constexpr std::uint32_t kBoot11DumpName = kNames + 0x40;
inline constexpr std::uint32_t kSecondFirmName = kNames + 0x80;

// Copies of the protected halves in ARM9 memory.
inline constexpr std::uint32_t kBoot9Copy = 0x080C0000;
inline constexpr std::uint32_t kBoot11Copy = 0x080C8000;

// Handshake words in AXI WRAM.
inline constexpr std::uint32_t kHook1Done = 0x1FFFE300;      // Boot9 hook 1 -> Boot11 hook
inline constexpr std::uint32_t kBoot11Staged = 0x1FFFE304;   // Boot11 hook -> Boot9 hook 2
inline constexpr std::uint32_t kBoot11Released = 0x1FFFE308; // Boot9 hook 2 -> Boot11 hook
inline constexpr std::uint32_t kChainArm9Entry = 0x1FFFE310;
inline constexpr std::uint32_t kChainArm11Entry = 0x1FFFE314;
inline constexpr std::uint32_t kChainReady = 0x1FFFE318;

inline constexpr std::string_view kBoot9DumpFile = "boot9_protected.bin";
inline constexpr std::string_view kBoot11DumpFile = "boot11_protected.bin";
inline constexpr std::string_view kSecondFirmFile = "second.firm";
}  // namespace staging

struct StagedImageOptions {
  /// Leave out section 1 (handler, vector and hooks).
  bool omit_handler_section = false;
};

/// The 4-section exploit image, unsigned:
///   0  Boot11 hook + ARM11 stage 2          -> ARM11 work RAM
///   1  abort handler, vector, Boot9 hooks,  -> ARM9 memory
///      ARM9 stage 2
///   2  NDMA request installing the vector    -> NDMA registers
///   3  filler                                -> address 0 (data abort)
firm::FirmImage build_staged_image(const StagedImageOptions& options = {});

/// An ordinary image: one section of seeded bytes in ARM9 memory, no code.
firm::FirmImage build_plain_image(const Seed& seed, std::uint32_t payload_size = 0x400);

/// Image with a single NDMA request copying the Boot9 protected half into
/// ARM9 memory, followed by an ordinary section.
firm::FirmImage build_ndma_dump_image(const Seed& seed);
inline constexpr std::uint32_t kNdmaDumpDestination = 0x08040000;

/// Flashcart image whose ARM9 entry installs `nand_image` to NAND and powers
/// off.
firm::FirmImage build_ntr_installer_image(std::span<const std::uint8_t> nand_image);

}  // namespace bootforge::bootsim
