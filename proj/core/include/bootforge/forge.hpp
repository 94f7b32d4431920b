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

#include <chrono>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <string>

#include "bootforge/bigint.hpp"
#include "bootforge/modmath.hpp"
#include "bootforge/seed.hpp"
#include "bootforge/sigparser.hpp"

namespace bootforge::forge {

struct ForgeResult {
  BigUint signature;
  sig::PlaintextBlock plaintext;
  std::ptrdiff_t landing_offset = 0;
  std::uint64_t attempts = 0;
  std::chrono::nanoseconds elapsed{0};
  /// Hit came from testing n - y rather than y.
  bool negated = false;
  Seed seed;
  /// Search hits only: the worker's root r and step count z, so that the
  /// tested value was y = r^(e*z) mod n.
  BigUint root;
  std::uint64_t steps = 0;
};

/// JSON record {signature, landing_offset, attempts, elapsed_ms, seed}.
std::string to_json(const ForgeResult& result);

/// Exploit plaintext in the shape of the known boot ROM exploit signature:
/// 00 02, nonzero filler padding, 00, 30 xx 30 LL, LL bytes of filler, with
/// the terminator 0x21 bytes before the block end and LL chosen so the walk
/// lands on `landing_offset`.
///
/// Valid landing offsets are [block_length, block_length + 127].
sig::PlaintextBlock craft_exploit_plaintext(std::size_t block_length, std::ptrdiff_t landing_offset,
                                            const Seed& filler_seed);

/// Signs a crafted plaintext with d. Test oracle for the search.
ForgeResult forge_with_private_key(const RsaKeyPair& key, std::ptrdiff_t landing_offset,
                                   const Seed& seed);

struct SearchProgress {
  std::uint64_t attempts = 0;
  double rate = 0;  // attempts per second
  double elapsed_seconds = 0;
};

struct SearchOptions {
  std::size_t workers = 1;
  Seed seed;
  std::uint64_t max_attempts = 0;
  /// When nonzero, every this many chain steps the worker recomputes
  /// r^(e*z) mod n with plain mod_exp and throws InternalError on mismatch.
  std::uint64_t chain_check_interval = 0;
  std::chrono::milliseconds progress_interval{1000};
  std::function<void(const SearchProgress&)> on_progress;
};

/// Multiplicative brute-force search without the private key.
///
/// Each worker draws a root 1 < r < n from its own sub-seed, sets
/// k = r^e mod n and walks y <- y*k mod n, testing y and then n - y against
/// classify_plaintext. A hit on y returns r^z; a hit on n - y returns
/// n - r^z. Every test counts as one attempt. Returns nullopt once
/// max_attempts tests have been spent across all workers.
std::optional<ForgeResult> brute_force_search(const PublicKey& key, const sig::ParserConfig& config,
                                              const SearchOptions& options);

struct HitEstimate {
  std::uint64_t samples = 0;
  std::uint64_t hits = 0;
  double p_hat = 0;
  double ci_low = 0;   // 95% Wilson score interval
  double ci_high = 0;
};

HitEstimate wilson_interval(std::uint64_t hits, std::uint64_t samples);

/// Monte-Carlo estimate of Pr[classify_plaintext succeeds] over uniformly
/// random blocks. Samples are drawn lazily (the flag bytes decide most
/// outcomes) which leaves the distribution unchanged. samples >= 10^5.
HitEstimate estimate_hit_probability(std::size_t block_length, const sig::ParserConfig& config,
                                     std::uint64_t samples, const Seed& seed);

/// Same estimate for an arbitrary predicate over full blocks.
HitEstimate estimate_hit_probability(std::size_t block_length,
                                     const std::function<bool(std::span<const std::uint8_t>)>& predicate,
                                     std::uint64_t samples, const Seed& seed);

/// Estimate over integers uniform in [0, n), encoded to n's block length:
/// the distribution the search actually tests.
HitEstimate estimate_hit_probability_below(const BigUint& n, const sig::ParserConfig& config,
                                           std::uint64_t samples, const Seed& seed);

}  // namespace bootforge::forge
