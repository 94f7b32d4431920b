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

#include "bootforge/exploit.hpp"

#include <algorithm>

#include "bootforge/bootsim.hpp"
#include "bootforge/script.hpp"

namespace bootforge::bootsim {

namespace {

void place(std::vector<std::uint8_t>& buf, std::uint32_t offset, std::span<const std::uint8_t> bytes) {
  if (buf.size() < offset + bytes.size()) buf.resize(offset + bytes.size(), 0);
  std::copy(bytes.begin(), bytes.end(), buf.begin() + offset);
}

void place_name(std::vector<std::uint8_t>& buf, std::uint32_t offset, std::string_view name) {
  std::vector<std::uint8_t> bytes(name.begin(), name.end());
  bytes.push_back(0);
  place(buf, offset, bytes);
}

}  // namespace

firm::FirmImage build_staged_image(const StagedImageOptions& options) {
  using namespace staging;
  constexpr std::uint32_t kHalf = addr::kProtectedSize;

  // Section 0: ARM11 side.
  std::vector<std::uint8_t> arm11;
  place(arm11, kBoot11Hook - kArm11Code,
        ScriptBuilder(Processor::Arm11)
            .op(Opcode::Wait, kHook1Done, 1)
            .op(Opcode::Copy, addr::kBoot11Protected, kBoot11Staging, kHalf)
            .op(Opcode::Signal, kBoot11Staged, 1)
            .op(Opcode::Wait, kBoot11Released, 1)
            .op(Opcode::Jump, kArm11Stage2)
            .assemble());
  place(arm11, kArm11Stage2 - kArm11Code,
        ScriptBuilder(Processor::Arm11)
            .op(Opcode::Wait, kChainReady, 1)
            .op(Opcode::Entry, kChainArm11Entry)
            .assemble());

  // Section 1: ARM9 side.
  std::vector<std::uint8_t> arm9;
  place(arm9, kAbortHandler - kArm9Code,
        ScriptBuilder(Processor::Arm9)
            .op(Opcode::Copy, kHookPointers, addr::kBoot9Hooks, 8)
            .op(Opcode::SkipFault)
            .assemble());
  std::vector<std::uint8_t> vector;
  put_u32(vector, 0, addr::kBranchToHandler);
  put_u32(vector, 4, kAbortHandler);
  put_u32(vector, 8, kBoot9Hook1);
  put_u32(vector, 12, kBoot9Hook2);
  place(arm9, kVectorData - kArm9Code, vector);
  place(arm9, kBoot9Hook1 - kArm9Code,
        ScriptBuilder(Processor::Arm9)
            .op(Opcode::Write32, addr::kBoot11Hooks, kBoot11Hook)
            .op(Opcode::MpuSetup)
            .op(Opcode::Signal, kHook1Done, 1)
            .op(Opcode::Return)
            .assemble());
  place(arm9, kBoot9Hook2 - kArm9Code,
        ScriptBuilder(Processor::Arm9)
            .op(Opcode::Wait, kBoot11Staged, 1)
            .op(Opcode::Copy, kBoot11Staging, kBoot11Copy, kHalf)
            .op(Opcode::Signal, kBoot11Released, 1)
            .op(Opcode::Copy, addr::kBoot9Protected, kBoot9Copy, kHalf)
            .op(Opcode::Jump, kArm9Stage2)
            .assemble());
  place(arm9, kArm9Stage2 - kArm9Code,
        ScriptBuilder(Processor::Arm9)
            .op(Opcode::IfKeysHeld, keys::kDumpCombo, 4)
            .op(Opcode::Write32, addr::kLockRegister, 3)
            .op(Opcode::SdWrite, kBoot9Copy, kHalf, kBoot9DumpName)
            .op(Opcode::SdWrite, kBoot11Copy, kHalf, kBoot11DumpName)
            .op(Opcode::PowerOff)
            .op(Opcode::ChainloadSd, kSecondFirmName, kChainArm9Entry, kChainArm11Entry)
            .op(Opcode::Write32, addr::kLockRegister, 3)
            .op(Opcode::Signal, kChainReady, 1)
            .op(Opcode::Entry, kChainArm9Entry)
            .assemble());
  place_name(arm9, kBoot9DumpName - kArm9Code, kBoot9DumpFile);
  place_name(arm9, kBoot11DumpName - kArm9Code, kBoot11DumpFile);
  place_name(arm9, kSecondFirmName - kArm9Code, kSecondFirmFile);

  // Section 2: NDMA request writing the vector slot.
  const std::vector<std::uint8_t> ndma = NdmaRequest{kVectorData, addr::kDataAbortVector, 8}.encode();

  // Section 3: anything, loaded to NULL.
  const std::vector<std::uint8_t> filler(0x200, 0xFF);

  std::vector<firm::SectionEntry> entries;
  entries.push_back({kArm11Code, firm::CopyMethod::Ndma, arm11});
  if (!options.omit_handler_section) entries.push_back({kArm9Code, firm::CopyMethod::Ndma, arm9});
  entries.push_back({addr::kNdmaWindow, firm::CopyMethod::Ndma, ndma});
  entries.push_back({0x00000000, firm::CopyMethod::Ndma, filler});
  return firm::build_firm(entries, kArm9Stage2, kArm11Stage2);
}

firm::FirmImage build_plain_image(const Seed& seed, std::uint32_t payload_size) {
  SeedStream stream(seed.derive("plain-image"));
  std::vector<firm::SectionEntry> entries;
  entries.push_back({0x08010000, firm::CopyMethod::Ndma, stream.bytes(payload_size)});
  return firm::build_firm(entries, 0x08010000, addr::kArm11Wram + 0x40000);
}

firm::FirmImage build_ndma_dump_image(const Seed& seed) {
  SeedStream stream(seed.derive("ndma-dump-image"));
  std::vector<firm::SectionEntry> entries;
  entries.push_back({addr::kNdmaWindow, firm::CopyMethod::Ndma,
                     NdmaRequest{addr::kBoot9Protected, kNdmaDumpDestination, addr::kProtectedSize}.encode()});
  entries.push_back({0x08010000, firm::CopyMethod::Ndma, stream.bytes(0x400)});
  return firm::build_firm(entries, 0x08010000, addr::kArm11Wram + 0x40000);
}

firm::FirmImage build_ntr_installer_image(std::span<const std::uint8_t> nand_image) {
  constexpr std::uint32_t kBase = 0x08020000;
  constexpr std::uint32_t kPayload = kBase + 0x100;
  std::vector<std::uint8_t> section;
  place(section, 0,
        ScriptBuilder(Processor::Arm9)
            .op(Opcode::NandInstall, kPayload, static_cast<std::uint32_t>(nand_image.size()))
            .op(Opcode::PowerOff)
            .assemble());
  place(section, kPayload - kBase, nand_image);
  std::vector<firm::SectionEntry> entries;
  entries.push_back({kBase, firm::CopyMethod::Ndma, section});
  return firm::build_firm(entries, kBase, addr::kArm11Wram + 0x40000);
}

}  // namespace bootforge::bootsim
