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

#include <cmath>

#include "bootforge/error.hpp"
#include "bootforge/forge.hpp"
#include "support.hpp"

namespace bootforge::forge {
namespace {

using testing::nand_key;
using testing::seed_of;

/// Every landing the walk can produce; about one block in 2^15 qualifies.
sig::ParserConfig wide_config(std::size_t bl) {
  sig::ParserConfig config = sig::ParserConfig::flawed(bl);
  config.target_window = sig::OffsetWindow::range(0, static_cast<std::ptrdiff_t>(2 * bl + 0x200));
  return config;
}

void expect_chain_identity(const ForgeResult& r, const RsaKeyPair& key) {
  const BigUint y = mod_exp(r.root, key.e * BigUint(r.steps), key.n);
  const BigUint plain = raw_verify(r.signature, key.public_key());
  EXPECT_EQ(plain, r.negated ? key.n - y : y);
  const BigUint base = mod_exp(r.root, BigUint(r.steps), key.n);
  EXPECT_EQ(r.signature, r.negated ? key.n - base : base);
  EXPECT_EQ(sig::PlaintextBlock::from_signature(r.signature, key.public_key()), r.plaintext);
}

TEST(Craft, ShippedLayoutAtFullBlock) {
  const sig::PlaintextBlock p = craft_exploit_plaintext(0x100, 0x100, seed_of("craft"));
  const auto b = p.bytes();
  EXPECT_EQ(b[0], 0x00);
  EXPECT_EQ(b[1], 0x02);
  for (std::size_t i = 2; i < 0xDF; ++i) EXPECT_NE(b[i], 0x00) << i;
  EXPECT_EQ(b[0xDF], 0x00);
  EXPECT_EQ(b[0xE0], 0x30);
  EXPECT_EQ(b[0xE2], 0x30);
  EXPECT_EQ(b[0xE3], 0x1A);
  const sig::FlawedWalk w = sig::walk_flawed(b, sig::TagCheck::SequenceTags);
  ASSERT_FALSE(w.failure);
  EXPECT_EQ(w.terminator, 0xDFu);
  EXPECT_EQ(w.landing, 0x100);
}

TEST(Craft, SeedChangesFillerOnly) {
  const auto a = craft_exploit_plaintext(0x100, 0x100, seed_of("a"));
  const auto b = craft_exploit_plaintext(0x100, 0x100, seed_of("b"));
  EXPECT_NE(a, b);
  EXPECT_EQ(a, craft_exploit_plaintext(0x100, 0x100, seed_of("a")));
  EXPECT_EQ(sig::walk_flawed(a.bytes()).landing, sig::walk_flawed(b.bytes()).landing);
}

TEST(Craft, EveryLandingInWindow) {
  for (std::size_t bl : {64u, 128u, 256u}) {
    const auto first = static_cast<std::ptrdiff_t>(bl);
    for (std::ptrdiff_t landing = first; landing < first + 128; ++landing) {
      const auto p = craft_exploit_plaintext(bl, landing, seed_of("w"));
      EXPECT_EQ(sig::classify_plaintext(p, sig::ParserConfig::boot9_full(bl)), landing);
    }
  }
  EXPECT_EQ(sig::classify_plaintext(craft_exploit_plaintext(64, 95, seed_of("x")), sig::ParserConfig::flawed(64)), 95);
}

TEST(Craft, RejectsBadOffsets) {
  EXPECT_THROW((void)craft_exploit_plaintext(0x100, 0xFF, seed_of("x")), DomainError);
  EXPECT_THROW((void)craft_exploit_plaintext(0x100, 0x180, seed_of("x")), DomainError);
  EXPECT_THROW((void)craft_exploit_plaintext(0x10, 0x10, seed_of("x")), DomainError);
}

TEST(Oracle, AcceptedByFlawedRejectedByStrict) {
  const RsaKeyPair& key = nand_key();
  const ForgeResult r = forge_with_private_key(key, 64, seed_of("oracle"));
  EXPECT_EQ(r.landing_offset, 64);
  EXPECT_EQ(r.attempts, 1u);
  const auto p = sig::PlaintextBlock::from_signature(r.signature, key.public_key());
  EXPECT_EQ(p, r.plaintext);
  const Digest h = Sha256::hash("anything");
  EXPECT_EQ(sig::flawed_parse(p, h, sig::StackModel::boot9(64, seed_of("s"))), sig::ParseOutcome::accept(64));
  EXPECT_EQ(sig::strict_parse(p, h), sig::ParseOutcome::reject(sig::RejectReason::BadBlockType));
  RsaKeyPair public_only = key;
  public_only.d = BigUint{};
  EXPECT_THROW((void)forge_with_private_key(public_only, 64, seed_of("oracle")), DomainError);
}

TEST(Oracle, JsonFields) {
  const ForgeResult r = forge_with_private_key(nand_key(), 70, seed_of("json"));
  const std::string j = to_json(r);
  for (const char* field : {"\"signature\"", "\"landing_offset\": 70", "\"attempts\": 1", "\"elapsed_ms\"",
                            "\"seed\"", "\"negated\": false"}) {
    EXPECT_NE(j.find(field), std::string::npos) << field;
  }
}

TEST(Search, SingleWorkerDeterministic) {
  const RsaKeyPair& key = nand_key();
  SearchOptions options;
  options.seed = seed_of("search");
  options.max_attempts = 5'000'000;
  options.chain_check_interval = 997;
  const auto a = brute_force_search(key.public_key(), wide_config(64), options);
  const auto b = brute_force_search(key.public_key(), wide_config(64), options);
  ASSERT_TRUE(a && b);
  EXPECT_EQ(a->signature, b->signature);
  EXPECT_EQ(a->attempts, b->attempts);
  EXPECT_EQ(a->steps, b->steps);
  expect_chain_identity(*a, key);
  EXPECT_TRUE(wide_config(64).target_window.contains(a->landing_offset));
}

TEST(Search, HitsVerifyWithTheDefaultPredicate) {
  // Real target window right after the block; roughly 2^-18 per test at 64 bytes.
  const RsaKeyPair& key = nand_key();
  SearchOptions options;
  options.seed = seed_of("default-window");
  options.max_attempts = 50'000'000;
  const auto r = brute_force_search(key.public_key(), sig::ParserConfig::flawed(64), options);
  ASSERT_TRUE(r);
  EXPECT_GE(r->landing_offset, 64);
  EXPECT_LT(r->landing_offset, 64 + 128);
  expect_chain_identity(*r, key);
  const sig::StackModel stack = sig::StackModel::with_hash_at(64, r->landing_offset, 0x100, seed_of("cover"));
  EXPECT_TRUE(sig::flawed_parse(r->plaintext, Sha256::hash("x"), stack).accepted());
}

TEST(Search, MultipleWorkers) {
  const RsaKeyPair& key = nand_key();
  SearchOptions options;
  options.workers = 3;
  options.seed = seed_of("multi");
  options.max_attempts = 5'000'000;
  const auto r = brute_force_search(key.public_key(), wide_config(64), options);
  ASSERT_TRUE(r);
  expect_chain_identity(*r, key);
  EXPECT_GE(r->attempts, r->steps);
}

TEST(Search, NegatedAndPlainHitsBothOccur) {
  const RsaKeyPair& key = nand_key();
  bool saw_negated = false, saw_plain = false;
  for (int i = 0; i < 16 && !(saw_negated && saw_plain); ++i) {
    SearchOptions options;
    options.seed = seed_of("negated").derive("run", static_cast<std::uint64_t>(i));
    options.max_attempts = 5'000'000;
    const auto r = brute_force_search(key.public_key(), wide_config(64), options);
    ASSERT_TRUE(r);
    expect_chain_identity(*r, key);
    (r->negated ? saw_negated : saw_plain) = true;
    // Attempts count both tests per step.
    EXPECT_EQ(r->attempts, 2 * r->steps - (r->negated ? 0 : 1));
  }
  EXPECT_TRUE(saw_negated);
  EXPECT_TRUE(saw_plain);
}

TEST(Search, ExhaustedBudgetReturnsNothing) {
  const RsaKeyPair& key = nand_key();
  sig::ParserConfig config = sig::ParserConfig::flawed(64);
  config.target_window = sig::OffsetWindow::range(64, 64);
  SearchOptions options;
  options.seed = seed_of("exhaust");
  options.max_attempts = 1000;
  EXPECT_FALSE(brute_force_search(key.public_key(), config, options));
  options.max_attempts = 0;
  EXPECT_FALSE(brute_force_search(key.public_key(), config, options));
}

TEST(Search, RejectsBadArguments) {
  const RsaKeyPair& key = nand_key();
  SearchOptions options;
  options.max_attempts = 10;
  EXPECT_THROW((void)brute_force_search(key.public_key(), sig::ParserConfig::strict(), options), DomainError);
  options.workers = 0;
  EXPECT_THROW((void)brute_force_search(key.public_key(), sig::ParserConfig::flawed(64), options), DomainError);
}

TEST(Search, ReportsProgress) {
  const RsaKeyPair& key = nand_key();
  sig::ParserConfig config = sig::ParserConfig::flawed(64);
  config.target_window = sig::OffsetWindow{};
  SearchOptions options;
  options.seed = seed_of("progress");
  options.max_attempts = 2'000'000;
  options.progress_interval = std::chrono::milliseconds(5);
  int calls = 0;
  options.on_progress = [&](const SearchProgress& p) {
    ++calls;
    EXPECT_LE(p.attempts, options.max_attempts);
  };
  EXPECT_FALSE(brute_force_search(key.public_key(), config, options));
  EXPECT_GT(calls, 0);
}

TEST(Wilson, KnownInterval) {
  const HitEstimate e = wilson_interval(10, 100);
  EXPECT_DOUBLE_EQ(e.p_hat, 0.1);
  EXPECT_NEAR(e.ci_low, 0.05523, 1e-4);
  EXPECT_NEAR(e.ci_high, 0.17437, 1e-4);
  const HitEstimate zero = wilson_interval(0, 1000);
  EXPECT_EQ(zero.p_hat, 0.0);
  EXPECT_NEAR(zero.ci_low, 0.0, 1e-12);
  EXPECT_GT(zero.ci_high, 0.0);
}

TEST(Estimate, FlagBytesAloneGiveTwoToMinusSixteen) {
  const auto flags = [](std::span<const std::uint8_t> b) { return b[0] == 0x00 && b[1] == 0x02; };
  const HitEstimate e = estimate_hit_probability(16, flags, 4'000'000, seed_of("flags"));
  const double expected = std::ldexp(1.0, -16);
  EXPECT_LE(e.ci_low, expected);
  EXPECT_GE(e.ci_high, expected);
}

TEST(Estimate, EmptyWindowAndSampleFloor) {
  sig::ParserConfig config = sig::ParserConfig::flawed(64);
  config.target_window = sig::OffsetWindow{};
  EXPECT_EQ(estimate_hit_probability(64, config, 100'000, seed_of("e")).hits, 0u);
  EXPECT_THROW((void)estimate_hit_probability(64, config, 1000, seed_of("e")), DomainError);
}

TEST(Estimate, LazyAndBelowModulusAgree) {
  // Uniform blocks vs uniform integers below n differ only by the 2^(8*bl)/n
  // scaling of the leading-zero probability.
  const RsaKeyPair& key = nand_key();
  const sig::ParserConfig config = wide_config(64);
  const std::uint64_t samples = 3'000'000;
  const HitEstimate blocks = estimate_hit_probability(64, config, samples, seed_of("lazy"));
  const HitEstimate below = estimate_hit_probability_below(key.n, config, samples, seed_of("below"));
  const auto full = [&](std::span<const std::uint8_t> b) { return sig::classify_plaintext(b, config).has_value(); };
  const HitEstimate eager = estimate_hit_probability(64, full, samples, seed_of("eager"));
  EXPECT_GT(blocks.hits, 0u);
  EXPECT_LE(blocks.ci_low, eager.ci_high);
  EXPECT_LE(eager.ci_low, blocks.ci_high);

  const double scale = std::ldexp(1.0, 512) / std::ldexp(std::stod("0x" + key.n.to_hex().substr(0, 14)), 512 - 56);
  EXPECT_LE(blocks.ci_low * scale, below.ci_high);
  EXPECT_LE(below.ci_low, blocks.ci_high * scale);
}

}  // namespace
}  // namespace bootforge::forge
