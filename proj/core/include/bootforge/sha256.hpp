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
#include <span>
#include <string_view>

namespace bootforge {

using Digest = std::array<std::uint8_t, 32>;

/// SHA-256 (FIPS 180-4), streaming.
class Sha256 {
 public:
  Sha256() noexcept { reset(); }

  void reset() noexcept;
  Sha256& update(std::span<const std::uint8_t> data) noexcept;
  Sha256& update(std::string_view text) noexcept;
  Digest finish() noexcept;

  static Digest hash(std::span<const std::uint8_t> data) noexcept {
    return Sha256().update(data).finish();
  }
  static Digest hash(std::string_view text) noexcept { return Sha256().update(text).finish(); }

 private:
  void compress(const std::uint8_t* block) noexcept;

  std::array<std::uint32_t, 8> state_{};
  std::array<std::uint8_t, 64> buffer_{};
  std::size_t buffered_ = 0;
  std::uint64_t total_bytes_ = 0;
};

}  // namespace bootforge
