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
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace bootforge::bootsim {

// Scripted processor code.
//
// A script is a 16-byte header {magic "SCPT", processor (9 or 11), op count,
// 0} followed by 16-byte ops {opcode, a, b, c}, all little-endian. The
// simulator runs one op per scheduler turn.
inline constexpr std::uint32_t kScriptMagic = 0x54504353;  // "SCPT"
inline constexpr std::size_t kScriptHeaderSize = 16;
inline constexpr std::size_t kScriptOpSize = 16;

enum class Opcode : std::uint32_t {
  Write32 = 1,      // [a] = b
  Copy = 2,         // copy c bytes from a to b
  MpuSetup = 3,     // logged, no effect
  Signal = 4,       // [a] = b, logged as a signal
  Wait = 5,         // spin until [a] == b
  SkipFault = 6,    // data-abort handler: resume after the faulting access
  Return = 7,       // back to the caller
  Jump = 8,         // run the script at a; the caller is abandoned
  IfKeysHeld = 9,   // unless every key in mask a is held, skip the next b ops
  SdWrite = 10,     // SD file named by the C string at c = b bytes from a
  PowerOff = 11,
  ChainloadSd = 12, // load the FIRM named at a from SD; [b] = arm9 entry, [c] = arm11 entry
  Entry = 13,       // jump to the entrypoint stored at [a]
  NandInstall = 14, // NAND firmware = b bytes from a
};

std::string_view to_string(Opcode op);

struct ScriptOp {
  Opcode opcode = Opcode::Return;
  std::uint32_t a = 0;
  std::uint32_t b = 0;
  std::uint32_t c = 0;
};

enum class Processor : std::uint32_t { Arm9 = 9, Arm11 = 11 };

/// Assembles a script for one processor.
class ScriptBuilder {
 public:
  explicit ScriptBuilder(Processor proc) : proc_(proc) {}

  ScriptBuilder& op(Opcode opcode, std::uint32_t a = 0, std::uint32_t b = 0, std::uint32_t c = 0) {
    ops_.push_back({opcode, a, b, c});
    return *this;
  }

  std::size_t size_bytes() const noexcept { return kScriptHeaderSize + ops_.size() * kScriptOpSize; }
  std::vector<std::uint8_t> assemble() const;

 private:
  Processor proc_;
  std::vector<ScriptOp> ops_;
};

// Hardware key bits, in the order of the console's key input register.
namespace keys {
inline constexpr std::uint32_t A = 1u << 0;
inline constexpr std::uint32_t B = 1u << 1;
inline constexpr std::uint32_t Select = 1u << 2;
inline constexpr std::uint32_t Start = 1u << 3;
inline constexpr std::uint32_t Right = 1u << 4;
inline constexpr std::uint32_t Left = 1u << 5;
inline constexpr std::uint32_t Up = 1u << 6;
inline constexpr std::uint32_t Down = 1u << 7;
inline constexpr std::uint32_t R = 1u << 8;
inline constexpr std::uint32_t L = 1u << 9;
inline constexpr std::uint32_t X = 1u << 10;
inline constexpr std::uint32_t Y = 1u << 11;

/// Boot ROM alternate source: DS cartridge.
inline constexpr std::uint32_t kNtrBoot = Start | Select | X;
/// Exploit stage 2: dump the protected ROM halves to SD.
inline constexpr std::uint32_t kDumpCombo = Start | A;

/// "start+select+x" style names, case-insensitive. Throws DomainError on an
/// unknown name.
std::uint32_t parse(std::string_view text);
std::string format(std::uint32_t mask);
}  // namespace keys

void put_u32(std::vector<std::uint8_t>& out, std::size_t at, std::uint32_t value);
std::uint32_t get_u32(std::span<const std::uint8_t> in, std::size_t at);

}  // namespace bootforge::bootsim
