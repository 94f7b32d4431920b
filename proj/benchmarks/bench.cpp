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

#include <benchmark/benchmark.h>

#include <map>

#include "bootforge/forge.hpp"
#include "bootforge/modmath.hpp"
#include "bootforge/sigparser.hpp"

namespace {

using namespace bootforge;

const RsaKeyPair& key_of(std::size_t bits) {
  static std::map<std::size_t, RsaKeyPair> cache;
  auto it = cache.find(bits);
  if (it == cache.end()) it = cache.emplace(bits, generate_keypair(bits, Seed{}.derive("bench", bits))).first;
  return it->second;
}

void BM_PlainModMul(benchmark::State& state) {
  const RsaKeyPair& key = key_of(static_cast<std::size_t>(state.range(0)));
  SeedStream s(Seed{}.derive("plain"));
  BigUint y = s.uniform_below(key.n);
  const BigUint k = s.uniform_below(key.n);
  for (auto _ : state) {
    y = y * k % key.n;
    benchmark::DoNotOptimize(y);
  }
}
BENCHMARK(BM_PlainModMul)->Arg(512)->Arg(2048);

void BM_MontgomeryModMul(benchmark::State& state) {
  const RsaKeyPair& key = key_of(static_cast<std::size_t>(state.range(0)));
  const Montgomery mont(key.n);
  SeedStream s(Seed{}.derive("mont"));
  Montgomery::Residue y = mont.residue(s.uniform_below(key.n));
  const Montgomery::Residue k = mont.to_mont(mont.residue(s.uniform_below(key.n)));
  for (auto _ : state) {
    mont.mul(y, k, y);
    benchmark::DoNotOptimize(y.data());
  }
}
BENCHMARK(BM_MontgomeryModMul)->Arg(512)->Arg(2048);

void BM_ModExpPublic(benchmark::State& state) {
  const RsaKeyPair& key = key_of(static_cast<std::size_t>(state.range(0)));
  const BigUint x = SeedStream(Seed{}.derive("exp")).uniform_below(key.n);
  for (auto _ : state) benchmark::DoNotOptimize(raw_verify(x, key.public_key()));
}
BENCHMARK(BM_ModExpPublic)->Arg(512)->Arg(2048);

void BM_ClassifyRandom(benchmark::State& state) {
  const auto bl = static_cast<std::size_t>(state.range(0));
  const sig::ParserConfig config = sig::ParserConfig::flawed(bl);
  SeedStream s(Seed{}.derive("classify"));
  std::vector<std::vector<std::uint8_t>> blocks(256);
  for (auto& b : blocks) {
    b = s.bytes(bl);
    b[0] = 0x00;
    b[1] = 0x02;  // past the flag check so the padding scan runs
  }
  std::size_t i = 0;
  for (auto _ : state) benchmark::DoNotOptimize(sig::classify_plaintext(blocks[i++ & 255], config));
}
BENCHMARK(BM_ClassifyRandom)->Arg(64)->Arg(256);

void BM_Sha256(benchmark::State& state) {
  const std::vector<std::uint8_t> data(static_cast<std::size_t>(state.range(0)), 0x5A);
  for (auto _ : state) benchmark::DoNotOptimize(Sha256::hash(data));
  state.SetBytesProcessed(static_cast<std::int64_t>(state.iterations()) * state.range(0));
}
BENCHMARK(BM_Sha256)->Arg(0x100)->Arg(0x10000);

void BM_SearchAttempts(benchmark::State& state) {
  // Fixed budget with an empty window: pure chain throughput.
  const RsaKeyPair& key = key_of(512);
  sig::ParserConfig config = sig::ParserConfig::flawed(key.block_length());
  config.target_window = sig::OffsetWindow::range(0, 0);
  constexpr std::uint64_t kAttempts = 1'000'000;
  for (auto _ : state) {
    forge::SearchOptions options;
    options.seed = Seed{}.derive("bench-search");
    options.max_attempts = kAttempts;
    benchmark::DoNotOptimize(forge::brute_force_search(key.public_key(), config, options));
  }
  state.SetItemsProcessed(static_cast<std::int64_t>(state.iterations() * kAttempts));
}
BENCHMARK(BM_SearchAttempts)->Unit(benchmark::kMillisecond)->UseRealTime();

}  // namespace

BENCHMARK_MAIN();
