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

// One PASS/FAIL line per acceptance criterion. Tolerances are the constants
// below; the exit status is nonzero if any criterion fails.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <sstream>
#include <thread>
#include <string>
#include <vector>

#include "bootforge/bootsim.hpp"
#include "bootforge/exploit.hpp"
#include "bootforge/firm.hpp"
#include "bootforge/forge.hpp"
#include "bootforge/modmath.hpp"
#include "bootforge/sigparser.hpp"
#include "cli.hpp"
#include "json.hpp"

namespace {

using namespace bootforge;
namespace fs = std::filesystem;
using Clock = std::chrono::steady_clock;

// Pinned tolerances and budgets.
constexpr double kParserBudgetSeconds = 1.0;
constexpr int kSelfComparisonTrials = 100;
constexpr double kRelaxedLog2Low = -22.0;
constexpr double kRelaxedLog2High = -18.0;
constexpr std::uint64_t kRelaxedEstimateSamples = 100'000'000;
constexpr int kSearchRuns = 15;
constexpr double kMedianFactor = 4.0;
constexpr double kSearchBudgetSeconds = 600.0;
constexpr std::uint64_t kSearchAttemptCap = 200'000'000;
constexpr std::uint64_t kExtrapolationSamples = 100'000'000;
constexpr int kIdentityCases = 10'000;
constexpr int kNegatedHitsWanted = 8;
constexpr double kExploitBudgetSeconds = 5.0;
constexpr int kRoundTripImages = 1000;

const Seed kRoot = Seed{}.derive("acceptance");

double seconds_since(Clock::time_point start) {
  return std::chrono::duration<double>(Clock::now() - start).count();
}

struct Keys {
  std::array<RsaKeyPair, 6> pairs;
  KeyRegistry registry;

  const RsaKeyPair& at(KeySlot slot) const {
    const auto all = KeySlot::all();
    return pairs[static_cast<std::size_t>(std::find(all.begin(), all.end(), slot) - all.begin())];
  }
  const RsaKeyPair& nand() const { return at({Console::Retail, SigType::NandBoot}); }
  const RsaKeyPair& nonnand() const { return at({Console::Retail, SigType::NonNandBoot}); }
};

const Keys& keys512() {
  static const Keys k = [] {
    Keys out;
    const auto all = KeySlot::all();
    for (std::size_t i = 0; i < all.size(); ++i) {
      out.pairs[i] = generate_keypair(512, kRoot.derive("keys").derive(all[i].label()));
      out.registry.install(all[i], out.pairs[i].public_key());
    }
    return out;
  }();
  return k;
}

struct Result {
  bool pass = false;
  std::string detail;
};

std::string fmt(const char* format, auto... args) {
  char buf[512];
  std::snprintf(buf, sizeof buf, format, args...);
  return buf;
}

// The published 0x100-byte exploit plaintext.
sig::PlaintextBlock shipped_exploit_block() {
  static const char* kHex =
      "0002b31331c71041233 3a587890f9cf0"
      "b6a86e71c8a78f96b76082903b3e54ea9ab935978bbf2493bb829e9a5a6060b0"
      "c781188117 6bcf9fe8b1c5c5e0a95327db8b52ec178a884ad9cf28db8bbf2922"
      "c05fd034ac81bd231aeb0cbef6f7de6f3a30812b9f9a83bf33251891bfa18fa3"
      "8a64c6ff5f77dbe11c3780c23ea9f6d00f9c01d6fc8a878591d36c4f64aca6b8"
      "d11bbeb21476103c6e86ff2196d465ba4db78f81f1d3bcca186bddd56739a12d"
      "d36122f3f5b3dd518ddac4fa29395ea4cd9dfd80af8a399990f4fdd3cd6b07ec"
      "2122437ccfc3b62b1d1493a7dbb44200"
      "3062301a"
      "c0a5d87e1e31a4020f0beaec26994d2580324e60c6ceaba6539a"
      "c814";
  std::string hex;
  for (const char* p = kHex; *p; ++p) {
    if (*p != ' ') hex.push_back(*p);
  }
  return sig::PlaintextBlock(*from_hex(hex));
}

// 1 ------------------------------------------------------------------------
Result parser_differential() {
  const RsaKeyPair key2048 = generate_keypair(2048, kRoot.derive("rsa-2048"));
  const auto start = Clock::now();
  const sig::PlaintextBlock exploit = shipped_exploit_block();
  const Digest calc = Sha256::hash("firm header");
  const sig::StackModel stack = sig::StackModel::with_hash_at(0x100, 0x100, 0x40, kRoot.derive("stack"));
  const sig::ParseOutcome flawed = sig::flawed_parse(exploit, calc, stack);
  const sig::ParseOutcome strict = sig::strict_parse(exploit, calc);

  const firm::FirmImage honest = firm::sign_firm(firm::build_firm(
      std::vector<firm::SectionEntry>{{0x08006000, firm::CopyMethod::Ndma, std::vector<std::uint8_t>(0x400, 7)}},
      0x08006000, 0x1FF80000), key2048);
  const sig::PlaintextBlock honest_block =
      sig::PlaintextBlock::from_signature(honest.header.signature_value(0x100), key2048.public_key());
  const sig::ParseOutcome honest_flawed = sig::flawed_parse(honest_block, honest.header.hash(), stack);
  const sig::ParseOutcome honest_strict = sig::strict_parse(honest_block, honest.header.hash());
  const double elapsed = seconds_since(start);

  const bool pass = exploit.size() == 0x100 && flawed == sig::ParseOutcome::accept(0x100) &&
                    strict == sig::ParseOutcome::reject(sig::RejectReason::BadBlockType) &&
                    honest_flawed.accepted() && honest_strict.accepted() && elapsed < kParserBudgetSeconds;
  return {pass, fmt("exploit block: flawed=%s strict=%s; honest RSA-2048 header: flawed=%s strict=%s; %.3f s",
                    sig::describe(flawed).c_str(), sig::describe(strict).c_str(), sig::describe(honest_flawed).c_str(),
                    sig::describe(honest_strict).c_str(), elapsed)};
}

// 2 ------------------------------------------------------------------------
Result self_comparison() {
  const RsaKeyPair& key = keys512().nand();
  const std::size_t bl = key.block_length();
  const forge::ForgeResult forged =
      forge::forge_with_private_key(key, static_cast<std::ptrdiff_t>(bl), kRoot.derive("self-comparison"));
  const sig::PlaintextBlock block = sig::PlaintextBlock::from_signature(forged.signature, key.public_key());
  const sig::StackModel stack = sig::StackModel::boot9(bl, kRoot.derive("boot9-stack"));
  SeedStream stream(kRoot.derive("calc-hashes"));
  int accepted = 0;
  for (int i = 0; i < kSelfComparisonTrials; ++i) {
    Digest calc{};
    stream.fill(calc);
    accepted += sig::flawed_parse(block, calc, stack).accepted();
  }
  // Same signature on 100 different headers, through the full image check.
  int images_accepted = 0;
  for (int i = 0; i < kSelfComparisonTrials; ++i) {
    firm::FirmImage img = bootsim::build_plain_image(kRoot.derive("image", static_cast<std::uint64_t>(i)));
    img = firm::fakesign_firm(img, forged.signature, bl);
    images_accepted +=
        firm::validate_firm(img, key.public_key(), sig::ParserConfig::flawed(bl), stack).accepted();
  }
  const bool pass = accepted == kSelfComparisonTrials && images_accepted == kSelfComparisonTrials;
  return {pass, fmt("%d/%d random calc_hash values accepted, %d/%d distinct headers accepted", accepted,
                    kSelfComparisonTrials, images_accepted, kSelfComparisonTrials)};
}

// 3 and 6 -----------------------------------------------------------------
struct SearchRun {
  std::uint64_t attempts = 0;
  bool negated = false;
  forge::ForgeResult result;
};

sig::ParserConfig relaxed_predicate(std::size_t bl) {
  // Type bytes unchecked, landing anywhere in the 64 offsets after the block.
  sig::ParserConfig config = sig::ParserConfig::flawed(bl);
  config.target_window = sig::OffsetWindow::range(static_cast<std::ptrdiff_t>(bl), static_cast<std::ptrdiff_t>(bl) + 63);
  return config;
}

std::vector<SearchRun> g_search_runs;

Result desk_scale_search() {
  const RsaKeyPair& key = keys512().nand();
  const sig::ParserConfig config = relaxed_predicate(key.block_length());
  const forge::HitEstimate p = forge::estimate_hit_probability_below(key.n, config, kRelaxedEstimateSamples,
                                                                      kRoot.derive("relaxed-estimate"));
  if (p.hits == 0) return {false, "relaxed predicate produced no Monte-Carlo hits"};
  const double log2p = std::log2(p.p_hat);
  const bool p_ok = log2p >= kRelaxedLog2Low && log2p <= kRelaxedLog2High;

  const auto start = Clock::now();
  std::vector<double> attempts;
  int failures = 0;
  for (int i = 0; i < kSearchRuns; ++i) {
    forge::SearchOptions options;
    options.workers = std::max(1u, std::thread::hardware_concurrency());
    options.seed = kRoot.derive("search", static_cast<std::uint64_t>(i));
    options.max_attempts = kSearchAttemptCap;
    const auto r = forge::brute_force_search(key.public_key(), config, options);
    if (!r) {
      ++failures;
      continue;
    }
    // Every returned signature must satisfy the predicate it was searched for.
    const auto landing =
        sig::classify_plaintext(sig::PlaintextBlock::from_signature(r->signature, key.public_key()), config);
    if (!landing || *landing != r->landing_offset) ++failures;
    attempts.push_back(static_cast<double>(r->attempts));
    g_search_runs.push_back({r->attempts, r->negated, *r});
  }
  const double elapsed = seconds_since(start);
  std::sort(attempts.begin(), attempts.end());
  const double median = attempts.empty() ? 0.0 : attempts[attempts.size() / 2];
  const double expected = 1.0 / p.p_hat;
  const bool median_ok = median >= expected / kMedianFactor && median <= expected * kMedianFactor;
  const bool pass = p_ok && failures == 0 && static_cast<int>(attempts.size()) >= 10 && median_ok &&
                    elapsed < kSearchBudgetSeconds;
  return {pass, fmt("p_hat=2^%.2f (95%% CI 2^%.2f..2^%.2f, %llu hits/%llu); %zu/%d runs found; median attempts "
                    "%.0f vs 1/p_hat %.0f (ratio %.2f); %.1f s",
                    log2p, std::log2(p.ci_low), std::log2(p.ci_high), static_cast<unsigned long long>(p.hits),
                    static_cast<unsigned long long>(p.samples), attempts.size(), kSearchRuns, median, expected,
                    median / expected, elapsed)};
}

Result negation_consistency() {
  const RsaKeyPair& key = keys512().nand();
  std::vector<forge::ForgeResult> negated;
  for (const SearchRun& r : g_search_runs) {
    if (r.negated) negated.push_back(r.result);
  }
  // Top up with extra searches on a wider window until enough n - y hits exist.
  sig::ParserConfig wide = sig::ParserConfig::flawed(key.block_length());
  wide.target_window = sig::OffsetWindow::range(0, 0x400);
  for (std::uint64_t i = 0; static_cast<int>(negated.size()) < kNegatedHitsWanted && i < 200; ++i) {
    forge::SearchOptions options;
    options.seed = kRoot.derive("negation", i);
    options.max_attempts = 50'000'000;
    const auto r = forge::brute_force_search(key.public_key(), wide, options);
    if (r && r->negated) negated.push_back(*r);
  }
  int consistent = 0;
  for (const forge::ForgeResult& r : negated) {
    // y recomputed from the root and step count with the plain exponentiation path.
    const BigUint y = mod_exp(r.root, key.e * BigUint(r.steps), key.n);
    const bool verify_ok = raw_verify(r.signature, key.public_key()) == key.n - y;
    const bool sig_ok = r.signature == key.n - mod_exp(r.root, BigUint(r.steps), key.n);
    consistent += verify_ok && sig_ok;
  }
  const bool pass = static_cast<int>(negated.size()) >= kNegatedHitsWanted &&
                    consistent == static_cast<int>(negated.size());
  return {pass, fmt("%d/%zu negated hits satisfy raw_verify(s) == n - r^(e*z) mod n", consistent, negated.size())};
}

// 4 ------------------------------------------------------------------------
Result extrapolation() {
  const auto start = Clock::now();
  const forge::HitEstimate e = forge::estimate_hit_probability(0x100, sig::ParserConfig::boot9_full(0x100),
                                                               kExtrapolationSamples, kRoot.derive("extrapolation"));
  return {e.hits == 0, fmt("%llu hits in %llu samples at block 0x100 (95%% upper bound 2^%.1f); %.1f s",
                           static_cast<unsigned long long>(e.hits), static_cast<unsigned long long>(e.samples),
                           std::log2(e.ci_high), seconds_since(start))};
}

// 5 ------------------------------------------------------------------------
Result algebraic_identities() {
  const RsaKeyPair& key = keys512().nand();
  const PublicKey pub = key.public_key();
  SeedStream stream(kRoot.derive("identities"));
  int negation = 0, multiplicative = 0;
  for (int i = 0; i < kIdentityCases; ++i) {
    const BigUint s = stream.uniform_range(BigUint(1), key.n);
    negation += raw_verify(key.n - s, pub) == key.n - raw_verify(s, pub);
    const BigUint a = stream.uniform_below(key.n), b = stream.uniform_below(key.n);
    multiplicative += raw_verify(a * b % key.n, pub) == raw_verify(a, pub) * raw_verify(b, pub) % key.n;
  }
  return {negation == kIdentityCases && multiplicative == kIdentityCases,
          fmt("negation %d/%d, multiplicativity %d/%d at 512 bits", negation, kIdentityCases, multiplicative,
              kIdentityCases)};
}

// 7 ------------------------------------------------------------------------
std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

Result exploit_chain() {
  const fs::path dir = fs::temp_directory_path() / "bootforge-acceptance-exploit";
  fs::remove_all(dir);
  const std::string seed_hex = kRoot.derive("cli").to_hex();
  std::ostringstream out, err;
  const auto cli = [&](std::vector<std::string> args) {
    args.insert(args.begin(), {"--workdir", dir.string(), "--seed", seed_hex});
    return cli::run(args, out, err);
  };
  if (cli({"keygen"}) != cli::kOk) return {false, "keygen failed: " + err.str()};

  const auto start = Clock::now();
  const int rc = cli({"exploit", "--dump-keys"});
  const double elapsed = seconds_since(start);
  const Seed machine = kRoot.derive("cli").derive("machine");
  const std::string b9 = slurp(dir / "sd" / std::string(bootsim::staging::kBoot9DumpFile));
  const std::string b11 = slurp(dir / "sd" / std::string(bootsim::staging::kBoot11DumpFile));
  const auto want9 = bootsim::protected_rom_contents(machine, bootsim::ProtectedHalf::Boot9);
  const auto want11 = bootsim::protected_rom_contents(machine, bootsim::ProtectedHalf::Boot11);
  const bool dumps_ok = std::equal(b9.begin(), b9.end(), want9.begin(), want9.end(),
                                   [](char c, std::uint8_t u) { return static_cast<std::uint8_t>(c) == u; }) &&
                        std::equal(b11.begin(), b11.end(), want11.begin(), want11.end(),
                                   [](char c, std::uint8_t u) { return static_cast<std::uint8_t>(c) == u; });

  // Event order from the written log.
  std::istringstream log(slurp(dir / "exploit.events.txt"));
  std::string line;
  std::vector<unsigned long long> protected_reads;
  unsigned long long first_lock = ~0ull;
  while (std::getline(log, line)) {
    unsigned long long step = 0;
    if (std::sscanf(line.c_str(), "step=%llu", &step) != 1) continue;
    if (line.find("event=protected-read ") != std::string::npos) protected_reads.push_back(step);
    if (line.find("event=lock ") != std::string::npos) first_lock = std::min(first_lock, step);
  }
  const bool order_ok = protected_reads.size() == 2 &&
                        std::all_of(protected_reads.begin(), protected_reads.end(),
                                    [&](unsigned long long s) { return s < first_lock; });

  // Same image, hardened blacklist.
  const int hardened_rc = cli({"--policy", "hardened", "exploit", "--dump-keys"});
  const auto report = nlohmann::json::parse(slurp(dir / "exploit.json"));
  const auto& sections = report["sections_loaded"];
  const bool hardened_ok = hardened_rc == cli::kRejected && report["outcome"] == "failure" && !sections.empty() &&
                           sections.back()["index"] == 2 && sections.back()["phys_addr"] == bootsim::addr::kNdmaWindow &&
                           report["exfiltrated"]["boot9_protected"].is_null();
  fs::remove_all(dir);

  const bool pass = rc == cli::kOk && dumps_ok && order_ok && hardened_ok && elapsed < kExploitBudgetSeconds;
  return {pass, fmt("dump exit=%d, halves identical=%s, %zu protected reads before lock at step %llu=%s; hardened "
                    "exit=%d stopped at NDMA window=%s; %.2f s",
                    rc, dumps_ok ? "yes" : "no", protected_reads.size(), first_lock, order_ok ? "yes" : "no",
                    hardened_rc, hardened_ok ? "yes" : "no", elapsed)};
}

// 8 ------------------------------------------------------------------------
Result black_screen() {
  const Keys& k = keys512();
  const RsaKeyPair& key = k.nand();
  const std::size_t bl = key.block_length();
  const Seed machine = kRoot.derive("black-screen");
  const firm::FirmImage plain = bootsim::build_plain_image(kRoot.derive("plain"));

  // Crafted for a landing 0x60 past the block: beyond the modelled stack.
  sig::PlaintextBlock crafted = forge::craft_exploit_plaintext(bl, static_cast<std::ptrdiff_t>(bl) + 0x7F, machine);
  std::vector<std::uint8_t> bytes(crafted.bytes().begin(), crafted.bytes().end());
  bytes[bl - 0x21 + 4] = static_cast<std::uint8_t>(bytes[bl - 0x21 + 4] - 0x1F);
  const BigUint oob_sig = raw_sign(BigUint::from_bytes_be(bytes), key);
  const bootsim::BootReport oob = bootsim::run_boot(
      machine, {}, firm::serialize(firm::fakesign_firm(plain, oob_sig, bl)), k.registry, {});

  SeedStream stream(kRoot.derive("random-signature"));
  const BigUint random_sig = stream.uniform_below(key.n);
  const bootsim::BootReport bad = bootsim::run_boot(
      machine, {}, firm::serialize(firm::fakesign_firm(plain, random_sig, bl)), k.registry, {});

  const bool oob_ok = oob.outcome == bootsim::Outcome::Halt && oob.signature_verdict &&
                      oob.signature_verdict->verdict == sig::Verdict::OutOfBounds &&
                      oob.signature_verdict->landing_offset == static_cast<std::ptrdiff_t>(bl) + 0x60;
  const bool bad_ok = bad.outcome == bootsim::Outcome::Failure && bad.signature_verdict &&
                      bad.signature_verdict->verdict == sig::Verdict::Reject;
  return {oob_ok && bad_ok,
          fmt("landing block+0x60: %s / %s; random signature: %s / %s",
              std::string(bootsim::to_string(oob.outcome)).c_str(),
              oob.signature_verdict ? sig::describe(*oob.signature_verdict).c_str() : "-",
              std::string(bootsim::to_string(bad.outcome)).c_str(),
              bad.signature_verdict ? sig::describe(*bad.signature_verdict).c_str() : "-")};
}

// 9 ------------------------------------------------------------------------
Result ntr_path() {
  const Keys& k = keys512();
  const std::size_t bl = k.nand().block_length();
  const auto landing = static_cast<std::ptrdiff_t>(bl);
  const Seed machine = kRoot.derive("ntr-machine");
  const BigUint nand_sig = forge::forge_with_private_key(k.nand(), landing, kRoot.derive("ntr-nand")).signature;
  const BigUint cart_sig = forge::forge_with_private_key(k.nonnand(), landing, kRoot.derive("ntr-cart")).signature;
  const auto staged = firm::serialize(firm::fakesign_firm(bootsim::build_staged_image(), nand_sig, bl));
  const firm::FirmImage installer = bootsim::build_ntr_installer_image(staged);
  bootsim::Media media;
  media.sd[std::string(bootsim::staging::kSecondFirmFile)] =
      firm::serialize(firm::sign_firm(bootsim::build_plain_image(kRoot.derive("second")), k.nand()));

  const bootsim::NtrInstallRun good = bootsim::run_ntr_install_scenario(
      machine, firm::serialize(firm::fakesign_firm(installer, cart_sig, bl)), media, k.registry, {});
  const bool installed = good.media.nand.count(std::string(bootsim::Media::kNandFirm)) &&
                         good.media.nand.at(std::string(bootsim::Media::kNandFirm)) == staged;
  const bool good_ok = good.install_boot.boot_source == bootsim::BootSource::NtrCart &&
                       good.install_boot.outcome == bootsim::Outcome::PowerOff && installed && good.nand_boot &&
                       good.nand_boot->reached_entry;

  const bootsim::NtrInstallRun swapped = bootsim::run_ntr_install_scenario(
      machine, firm::serialize(firm::fakesign_firm(installer, nand_sig, bl)), media, k.registry, {});
  const bool swapped_ok = swapped.install_boot.outcome == bootsim::Outcome::Failure &&
                          swapped.install_boot.signature_verdict &&
                          swapped.install_boot.signature_verdict->verdict == sig::Verdict::Reject && !swapped.nand_boot;
  return {good_ok && swapped_ok,
          fmt("non-NAND forgery: install %s, NAND boot %s; NAND-slot signature on cartridge: %s (%s)",
              std::string(bootsim::to_string(good.install_boot.outcome)).c_str(),
              good.nand_boot ? std::string(bootsim::to_string(good.nand_boot->outcome)).c_str() : "-",
              std::string(bootsim::to_string(swapped.install_boot.outcome)).c_str(),
              swapped.install_boot.signature_verdict ? sig::describe(*swapped.install_boot.signature_verdict).c_str()
                                                     : "-")};
}

// 10 -----------------------------------------------------------------------
Result format_fidelity() {
  SeedStream s(kRoot.derive("round-trip"));
  int identical = 0;
  for (int i = 0; i < kRoundTripImages; ++i) {
    std::vector<firm::SectionEntry> entries(1 + s.next_u64() % 4);
    for (auto& e : entries) {
      e.phys_addr = static_cast<std::uint32_t>(s.next_u64());
      e.copy_method = static_cast<firm::CopyMethod>(s.next_u64() % 3);
      e.payload = s.bytes(1 + s.next_u64() % 0x1000);
    }
    const auto w = s.next_u64();
    firm::FirmImage img = firm::build_firm(entries, static_cast<std::uint32_t>(w), static_cast<std::uint32_t>(w >> 32),
                                           static_cast<std::uint32_t>(s.next_u64()));
    s.fill(img.header.reserved);
    s.fill(img.header.signature);
    const auto bytes = firm::serialize(img);
    const firm::FirmImage back = firm::parse(bytes);
    identical += back == img && firm::serialize(back) == bytes;
  }
  struct Kav {
    std::string message;
    const char* digest;
  };
  const Kav kavs[] = {
      {"", "e3b0c44298fc1c149afbf4c8996fb92427ae41e4649b934ca495991b7852b855"},
      {"abc", "ba7816bf8f01cfea414140de5dae2223b00361a396177a9cb410ff61f20015ad"},
      {"abcdbcdecdefdefgefghfghighijhijkijkljklmklmnlmnomnopnopq",
       "248d6a61d20638b8e5c026930c3e6039a33ce45964ff2167f6ecedd419db06c1"},
      {std::string(1'000'000, 'a'), "cdc76e5c9914fb9281a1c7e284d73e67f1809a48a497200e046d39ccc7112cd0"},
  };
  int kav_ok = 0;
  for (const Kav& v : kavs) kav_ok += to_hex(Sha256::hash(v.message)) == v.digest;
  const int kav_count = static_cast<int>(std::size(kavs));
  return {identical == kRoundTripImages && kav_ok == kav_count,
          fmt("%d/%d images round-trip bit-identical, %d/%d SHA-256 known answers", identical, kRoundTripImages,
              kav_ok, kav_count)};
}

}  // namespace

int main() {
  const std::function<Result()> criteria[] = {
      parser_differential, self_comparison, desk_scale_search, extrapolation,  algebraic_identities,
      negation_consistency, exploit_chain,  black_screen,      ntr_path,       format_fidelity,
  };
  int failed = 0;
  for (std::size_t i = 0; i < std::size(criteria); ++i) {
    Result r;
    try {
      r = criteria[i]();
    } catch (const std::exception& e) {
      r = {false, std::string("exception: ") + e.what()};
    }
    failed += !r.pass;
    std::printf("criterion %2zu: %s  %s\n", i + 1, r.pass ? "PASS" : "FAIL", r.detail.c_str());
    std::fflush(stdout);
  }
  std::printf("%d/%zu criteria passed\n", static_cast<int>(std::size(criteria)) - failed, std::size(criteria));
  return failed == 0 ? 0 : 1;
}
