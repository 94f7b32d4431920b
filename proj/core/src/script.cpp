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

#include "bootforge/script.hpp"

#include <algorithm>
#include <cctype>

#include "bootforge/error.hpp"

namespace bootforge::bootsim {

std::string_view to_string(Opcode op) {
  switch (op) {
    case Opcode::Write32: return "write32";
    case Opcode::Copy: return "copy";
    case Opcode::MpuSetup: return "mpu-setup";
    case Opcode::Signal: return "signal";
    case Opcode::Wait: return "wait";
    case Opcode::SkipFault: return "skip-fault";
    case Opcode::Return: return "return";
    case Opcode::Jump: return "jump";
    case Opcode::IfKeysHeld: return "if-keys-held";
    case Opcode::SdWrite: return "sd-write";
    case Opcode::PowerOff: return "power-off";
    case Opcode::ChainloadSd: return "chainload-sd";
    case Opcode::Entry: return "entry";
    case Opcode::NandInstall: return "nand-install";
  }
  return "?";
}

void put_u32(std::vector<std::uint8_t>& out, std::size_t at, std::uint32_t value) {
  if (out.size() < at + 4) out.resize(at + 4, 0);
  for (int i = 0; i < 4; ++i) out[at + i] = static_cast<std::uint8_t>(value >> (8 * i));
}

std::uint32_t get_u32(std::span<const std::uint8_t> in, std::size_t at) {
  return std::uint32_t{in[at]} | (std::uint32_t{in[at + 1]} << 8) | (std::uint32_t{in[at + 2]} << 16) |
         (std::uint32_t{in[at + 3]} << 24);
}

std::vector<std::uint8_t> ScriptBuilder::assemble() const {
  std::vector<std::uint8_t> out(size_bytes(), 0);
  put_u32(out, 0, kScriptMagic);
  put_u32(out, 4, static_cast<std::uint32_t>(proc_));
  put_u32(out, 8, static_cast<std::uint32_t>(ops_.size()));
  for (std::size_t i = 0; i < ops_.size(); ++i) {
    const std::size_t at = kScriptHeaderSize + i * kScriptOpSize;
    put_u32(out, at, static_cast<std::uint32_t>(ops_[i].opcode));
    put_u32(out, at + 4, ops_[i].a);
    put_u32(out, at + 8, ops_[i].b);
    put_u32(out, at + 12, ops_[i].c);
  }
  return out;
}

namespace keys {

namespace {
struct Name {
  std::string_view name;
  std::uint32_t bit;
};
constexpr Name kNames[] = {{"a", A},         {"b", B},     {"select", Select}, {"start", Start},
                           {"right", Right}, {"left", Left}, {"up", Up},       {"down", Down},
                           {"r", R},         {"l", L},     {"x", X},           {"y", Y}};
}  // namespace

std::uint32_t parse(std::string_view text) {
  std::uint32_t mask = 0;
  std::size_t start = 0;
  while (start <= text.size()) {
    std::size_t end = text.find_first_of("+,", start);
    if (end == std::string_view::npos) end = text.size();
    std::string token(text.substr(start, end - start));
    std::transform(token.begin(), token.end(), token.begin(),
                   [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
    if (!token.empty()) {
      const auto it = std::find_if(std::begin(kNames), std::end(kNames),
                                   [&](const Name& n) { return n.name == token; });
      if (it == std::end(kNames)) throw DomainError("unknown key name: " + token);
      mask |= it->bit;
    }
    start = end + 1;
  }
  return mask;
}

std::string format(std::uint32_t mask) {
  std::string out;
  for (const Name& n : kNames) {
    if ((mask & n.bit) == 0) continue;
    if (!out.empty()) out += '+';
    out += n.name;
  }
  return out;
}

}  // namespace keys

}  // namespace bootforge::bootsim
