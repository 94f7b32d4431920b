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
#include <string_view>

#include "bootforge/modmath.hpp"
#include "bootforge/seed.hpp"

namespace bootforge::testing {

inline Seed seed_of(std::string_view label) { return Seed{}.derive(label); }

/// Six 512-bit keys generated once per test binary.
struct KeySet {
  std::array<RsaKeyPair, 6> keys;
  KeyRegistry registry;

  const RsaKeyPair& at(KeySlot slot) const {
    const auto all = KeySlot::all();
    for (std::size_t i = 0; i < all.size(); ++i) {
      if (all[i] == slot) return keys[i];
    }
    return keys[0];
  }
};

inline const KeySet& keyset() {
  static const KeySet set = [] {
    KeySet s;
    const auto all = KeySlot::all();
    for (std::size_t i = 0; i < all.size(); ++i) {
      s.keys[i] = generate_keypair(512, seed_of("test-keys").derive(all[i].label()));
      s.registry.install(all[i], s.keys[i].public_key());
    }
    return s;
  }();
  return set;
}

inline const RsaKeyPair& nand_key() { return keyset().at({Console::Retail, SigType::NandBoot}); }
inline const RsaKeyPair& nonnand_key() { return keyset().at({Console::Retail, SigType::NonNandBoot}); }

}  // namespace bootforge::testing
