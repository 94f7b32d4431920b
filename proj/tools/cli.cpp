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

#include "cli.hpp"

#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <iterator>
#include <optional>
#include <ostream>
#include <sstream>
#include <stdexcept>

#include "CLI11.hpp"
#include "bootforge/bootsim.hpp"
#include "bootforge/error.hpp"
#include "bootforge/exploit.hpp"
#include "bootforge/firm.hpp"
#include "bootforge/forge.hpp"
#include "bootforge/modmath.hpp"
#include "bootforge/sigparser.hpp"
#include "json.hpp"

namespace bootforge::cli {

namespace fs = std::filesystem;

namespace {

struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Resolved settings shared by every command.
struct WorkspaceConfig {
  fs::path workdir;
  fs::path key_dir;
  std::size_t block_length = 64;
  sig::ParserMode parser_mode = sig::ParserMode::Flawed;
  bootsim::BlacklistPolicy blacklist_policy = bootsim::BlacklistPolicy::Boot9DataOnly;
  std::optional<Seed> seed;

  const Seed& require_seed() const {
    if (!seed) throw UsageError("this command needs --seed <64 hex digits>");
    return *seed;
  }
};

// --- files ------------------------------------------------------------------

std::vector<std::uint8_t> read_bytes(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw UsageError("cannot read " + path.string());
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

std::string read_text(const fs::path& path) {
  const auto bytes = read_bytes(path);
  return {bytes.begin(), bytes.end()};
}

void write_bytes(const fs::path& path, std::span<const std::uint8_t> bytes) {
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  out.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
}

void write_text(const fs::path& path, std::string_view text) {
  write_bytes(path, std::span(reinterpret_cast<const std::uint8_t*>(text.data()), text.size()));
}

fs::path in_workdir(const WorkspaceConfig& ws, const std::string& path) {
  const fs::path p(path);
  return p.is_absolute() ? p : ws.workdir / p;
}

void write_media(const WorkspaceConfig& ws, const bootsim::Media& media) {
  for (const auto& [name, bytes] : media.sd) write_bytes(ws.workdir / "sd" / name, bytes);
  for (const auto& [name, bytes] : media.nand) write_bytes(ws.workdir / "nand" / name, bytes);
}

// --- keys and signatures ----------------------------------------------------

KeySlot parse_slot(const std::string& label) {
  const auto slot = KeySlot::from_label(label);
  if (!slot) throw UsageError("unknown key slot '" + label + "'");
  return *slot;
}

KeyRegistry load_registry(const WorkspaceConfig& ws) {
  return KeyRegistry::parse(read_text(ws.key_dir / "registry.txt"));
}

RsaKeyPair load_private_key(const WorkspaceConfig& ws, KeySlot slot) {
  RsaKeyPair key = parse_key_file(read_text(ws.key_dir / (slot.label() + ".key")));
  if (key.d.is_zero()) throw UsageError("key file for " + slot.label() + " has no private exponent");
  return key;
}

std::string signature_hex(const BigUint& sig, std::size_t block_length) {
  return to_hex(sig.to_bytes_be(block_length)) + "\n";
}

BigUint read_signature(const fs::path& path) {
  std::string text = read_text(path);
  std::erase_if(text, [](char c) { return std::isspace(static_cast<unsigned char>(c)) != 0; });
  const auto value = BigUint::from_hex(text);
  if (!value) throw UsageError("signature file " + path.string() + " is not hex");
  return *value;
}

sig::ParserConfig parser_for(const WorkspaceConfig& ws, std::size_t block_length) {
  return ws.parser_mode == sig::ParserMode::Strict ? sig::ParserConfig::strict()
                                                   : sig::ParserConfig::flawed(block_length);
}

/// "lo:hi" inclusive landing offsets; hex with 0x or decimal.
sig::OffsetWindow parse_window(const std::string& text) {
  const auto colon = text.find(':');
  if (colon == std::string::npos) throw UsageError("window must be <first>:<last>");
  const auto num = [](const std::string& s) -> std::ptrdiff_t {
    try {
      std::size_t used = 0;
      const long long v = std::stoll(s, &used, 0);
      if (used != s.size()) throw UsageError("bad offset '" + s + "'");
      return static_cast<std::ptrdiff_t>(v);
    } catch (const std::logic_error&) {
      throw UsageError("bad offset '" + s + "'");
    }
  };
  return sig::OffsetWindow::range(num(text.substr(0, colon)), num(text.substr(colon + 1)));
}

std::string describe_outcome(const sig::ParseOutcome& outcome) { return sig::describe(outcome); }

// --- boot reports ------------------------------------------------------------

void emit_report(const WorkspaceConfig& ws, const std::string& name, const bootsim::BootReport& report,
                 std::ostream& out) {
  write_text(ws.workdir / (name + ".json"), bootsim::to_json(report) + "\n");
  write_text(ws.workdir / (name + ".events.txt"), bootsim::format_event_log(report));
  out << name << ": outcome=" << bootsim::to_string(report.outcome) << " source=" << bootsim::to_string(report.boot_source)
      << " reached_entry=" << (report.reached_entry ? "true" : "false") << "\n  " << report.message << "\n";
}

bootsim::BootOptions boot_options(const WorkspaceConfig& ws) {
  bootsim::BootOptions opts;
  opts.parser_mode = ws.parser_mode;
  opts.policy = ws.blacklist_policy;
  return opts;
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"bootforge: boot ROM signature forgery and boot simulation toolkit", "bootforge"};
  app.require_subcommand(1);
  app.fallthrough();
  app.set_help_all_flag("--help-all", "Expand all help");

  std::string config_path, seed_hex, mode_text, policy_text, slot_text = "retail.nand", workdir_text, key_dir_text;
  std::size_t workers = 1;
  std::uint64_t max_attempts = 1ull << 40;
  std::size_t block_length_opt = 0;
  app.add_option("--config", config_path, "JSON workspace config");
  app.add_option("--seed", seed_hex, "32-byte seed, 64 hex digits");
  app.add_option("--workers", workers, "Search worker threads")->check(CLI::PositiveNumber);
  app.add_option("--max-attempts", max_attempts, "Search attempt budget");
  app.add_option("--mode", mode_text, "Signature parser")->check(CLI::IsMember({"flawed", "strict"}));
  app.add_option("--policy", policy_text, "Section blacklist")->check(CLI::IsMember({"boot9only", "hardened"}));
  app.add_option("--slot", slot_text, "Key slot, e.g. retail.nand");
  app.add_option("--workdir", workdir_text, "Artifact directory");
  app.add_option("--key-dir", key_dir_text, "Key directory (default <workdir>/keys)");
  app.add_option("--block-length", block_length_opt, "Block length in bytes for keyless commands");

  // keygen
  auto* keygen = app.add_subcommand("keygen", "Generate six key pairs and the key registry");
  std::size_t bits = 512;
  bool exponent3 = false;
  keygen->add_option("--bits", bits, "Modulus size")->check(CLI::Range(64, 4096));
  keygen->add_flag("--e3", exponent3, "Public exponent 3 instead of 65537");

  // craft
  auto* craft = app.add_subcommand("craft", "Craft an exploit plaintext and print it annotated");
  std::ptrdiff_t landing = -1;
  std::string out_path;
  craft->add_option("--landing", landing, "Landing offset (default: block length)");
  craft->add_option("--out", out_path, "Write the plaintext as hex");

  // forge
  auto* forge_cmd = app.add_subcommand("forge", "Brute-force search for an exploit signature");
  std::string window_text;
  bool tags = false;
  forge_cmd->add_option("--window", window_text, "Accepted landing offsets <first>:<last>");
  forge_cmd->add_flag("--tags", tags, "Require the SEQUENCE tags");
  forge_cmd->add_option("--out", out_path, "Signature output (default forge.sig)");

  // forge-oracle
  auto* oracle = app.add_subcommand("forge-oracle", "Exploit signature using the private key");
  oracle->add_option("--landing", landing, "Landing offset (default: block length)");
  oracle->add_option("--out", out_path, "Signature output (default forge.sig)");

  // estimate
  auto* estimate = app.add_subcommand("estimate", "Monte-Carlo hit probability with 95% interval");
  std::uint64_t samples = 1'000'000;
  estimate->add_option("--samples", samples, "Sample count (>= 100000)");
  estimate->add_option("--window", window_text, "Accepted landing offsets <first>:<last>");
  estimate->add_flag("--tags", tags, "Require the SEQUENCE tags");

  // build-firm
  auto* build = app.add_subcommand("build-firm", "Build a FIRM image from a JSON descriptor");
  std::string descriptor_path, in_path;
  build->add_option("descriptor", descriptor_path, "Descriptor JSON")->required();
  build->add_option("--out", out_path, "Output image")->required();

  // sign / fakesign / verify
  auto* sign = app.add_subcommand("sign", "Sign an image with the slot's private key");
  sign->add_option("image", in_path, "Input image")->required();
  sign->add_option("--out", out_path, "Output image")->required();
  auto* fakesign = app.add_subcommand("fakesign", "Embed a forged signature in an image");
  std::string signature_path;
  fakesign->add_option("image", in_path, "Input image")->required();
  fakesign->add_option("--signature", signature_path, "Signature hex file")->required();
  fakesign->add_option("--out", out_path, "Output image")->required();
  auto* verify = app.add_subcommand("verify", "Check an image's signature and section hashes");
  verify->add_option("image", in_path, "Image")->required();

  // boot
  auto* boot = app.add_subcommand("boot", "Boot an image on the simulator");
  std::string keys_text, cart_path;
  bool shell_closed = false, magnet = false;
  boot->add_option("image", in_path, "NAND image")->required();
  boot->add_option("--keys", keys_text, "Held keys, e.g. start+select+x");
  boot->add_flag("--shell-closed", shell_closed, "Shell closed");
  boot->add_flag("--magnet", magnet, "Magnet on the shell sensor");
  boot->add_option("--cart", cart_path, "NTR cartridge image");

  // exploit
  auto* exploit = app.add_subcommand("exploit", "Run the staged exploit image");
  bool dump_keys = false, omit_handler = false;
  std::string second_path;
  exploit->add_flag("--dump-keys", dump_keys, "Hold the dump key combination");
  exploit->add_option("--second", second_path, "Second image for SD (default: a generated plain image)");
  exploit->add_option("--signature", signature_path, "Forged signature (default: forge-oracle)");
  exploit->add_flag("--omit-handler", omit_handler, "Leave out section 1");

  // ntr-install
  auto* ntr = app.add_subcommand("ntr-install", "Install the staged image to NAND through the cartridge path");
  bool wrong_slot = false, no_cart = false;
  ntr->add_flag("--nand-signature", wrong_slot, "Sign the flashcart image with the NAND-boot forgery");
  ntr->add_flag("--no-cart", no_cart, "No cartridge inserted");

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e, out, err);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e, out, err);
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << "\n\n" << app.help();
    return kUsage;
  }

  try {
    // Workspace: config file first, then flags, then environment.
    WorkspaceConfig ws;
    nlohmann::json config = nlohmann::json::object();
    if (!config_path.empty()) {
      try {
        config = nlohmann::json::parse(read_text(config_path));
      } catch (const nlohmann::json::exception& e) {
        throw UsageError(std::string("config: ") + e.what());
      }
    }
    const auto setting = [&](const char* key, const std::string& flag) -> std::string {
      if (!flag.empty()) return flag;
      if (config.contains(key)) return config[key].get<std::string>();
      return {};
    };
    if (!workdir_text.empty()) {
      ws.workdir = workdir_text;
    } else if (const char* env = std::getenv("BOOTFORGE_WORKDIR"); env != nullptr && *env != '\0') {
      ws.workdir = env;
    } else if (config.contains("workdir")) {
      ws.workdir = config["workdir"].get<std::string>();
    } else {
      ws.workdir = ".";
    }
    const std::string key_dir = setting("key_dir", key_dir_text);
    ws.key_dir = key_dir.empty() ? ws.workdir / "keys" : in_workdir(ws, key_dir);
    if (const std::string s = setting("seed", seed_hex); !s.empty()) {
      ws.seed = Seed::from_hex(s);
      if (!ws.seed) throw UsageError("seed must be exactly 64 hex digits");
    }
    if (const std::string m = setting("parser_mode", mode_text); !m.empty()) {
      if (m != "flawed" && m != "strict") throw UsageError("parser_mode must be flawed or strict");
      ws.parser_mode = m == "strict" ? sig::ParserMode::Strict : sig::ParserMode::Flawed;
    }
    if (const std::string p = setting("blacklist_policy", policy_text); !p.empty()) {
      const auto policy = bootsim::policy_from_string(p);
      if (!policy) throw UsageError("blacklist_policy must be boot9only or hardened");
      ws.blacklist_policy = *policy;
    }
    if (block_length_opt != 0) {
      ws.block_length = block_length_opt;
    } else if (config.contains("block_length")) {
      ws.block_length = config["block_length"].get<std::size_t>();
    }
    const KeySlot slot = parse_slot(slot_text);

    if (keygen->parsed()) {
      const Seed& seed = ws.require_seed();
      if (bits % 8 != 0) throw UsageError("--bits must be a multiple of 8");
      KeyRegistry registry;
      for (const KeySlot s : KeySlot::all()) {
        const RsaKeyPair key = generate_keypair(bits, seed.derive("keygen:" + s.label()),
                                                exponent3 ? PublicExponent::Three : PublicExponent::F4);
        write_text(ws.key_dir / (s.label() + ".key"), format_key_file(key));
        registry.install(s, key.public_key());
        out << s.label() << ": n=" << key.n.to_hex().substr(0, 16) << "... (" << bits << " bits)\n";
      }
      write_text(ws.key_dir / "registry.txt", registry.to_text());
      out << "wrote " << (ws.key_dir / "registry.txt").string() << "\n";
      return kOk;
    }

    if (craft->parsed()) {
      const Seed& seed = ws.require_seed();
      const std::size_t bl = ws.block_length;
      const std::ptrdiff_t target = landing < 0 ? static_cast<std::ptrdiff_t>(bl) : landing;
      const sig::PlaintextBlock block = forge::craft_exploit_plaintext(bl, target, seed);
      out << sig::render_annotated(block, sig::TagCheck::SequenceTags);
      if (!out_path.empty()) write_text(in_workdir(ws, out_path), to_hex(block.bytes()) + "\n");
      return kOk;
    }

    if (forge_cmd->parsed() || oracle->parsed()) {
      const Seed& seed = ws.require_seed();
      std::optional<forge::ForgeResult> result;
      std::size_t bl = 0;
      if (oracle->parsed()) {
        const RsaKeyPair key = load_private_key(ws, slot);
        bl = key.block_length();
        result = forge::forge_with_private_key(key, landing < 0 ? static_cast<std::ptrdiff_t>(bl) : landing, seed);
      } else {
        const PublicKey key = load_registry(ws).at(slot);
        bl = key.block_length();
        sig::ParserConfig config = sig::ParserConfig::flawed(bl);
        if (!window_text.empty()) config.target_window = parse_window(window_text);
        if (tags) config.tags = sig::TagCheck::SequenceTags;
        forge::SearchOptions options;
        options.workers = workers;
        options.seed = seed;
        options.max_attempts = max_attempts;
        options.on_progress = [&out](const forge::SearchProgress& p) {
          out << "attempts=" << p.attempts << " rate=" << std::fixed << std::setprecision(0) << p.rate
              << " elapsed=" << std::setprecision(1) << p.elapsed_seconds << std::defaultfloat << std::endl;
        };
        result = forge::brute_force_search(key, config, options);
        if (!result) {
          out << "no signature found within " << max_attempts << " attempts\n";
          return kRejected;
        }
      }
      const fs::path sig_path = in_workdir(ws, out_path.empty() ? "forge.sig" : out_path);
      write_text(sig_path, signature_hex(result->signature, bl));
      fs::path json_path = sig_path;
      json_path.replace_extension(".json");
      write_text(json_path, forge::to_json(*result) + "\n");
      out << "landing_offset=0x" << std::hex << result->landing_offset << std::dec << " attempts=" << result->attempts
          << (result->negated ? " (negated)" : "") << "\nwrote " << sig_path.string() << "\n";
      return kOk;
    }

    if (estimate->parsed()) {
      const Seed& seed = ws.require_seed();
      if (samples < 100'000) throw UsageError("--samples must be at least 100000");
      sig::ParserConfig config = sig::ParserConfig::flawed(ws.block_length);
      if (!window_text.empty()) config.target_window = parse_window(window_text);
      if (tags) config.tags = sig::TagCheck::SequenceTags;
      const forge::HitEstimate e = forge::estimate_hit_probability(ws.block_length, config, samples, seed);
      nlohmann::ordered_json j;
      j["block_length"] = ws.block_length;
      j["samples"] = e.samples;
      j["hits"] = e.hits;
      j["p_hat"] = e.p_hat;
      j["ci95_low"] = e.ci_low;
      j["ci95_high"] = e.ci_high;
      j["log2_p_hat"] = e.hits > 0 ? nlohmann::ordered_json(std::log2(e.p_hat)) : nlohmann::ordered_json(nullptr);
      out << j.dump(2) << "\n";
      return kOk;
    }

    if (build->parsed()) {
      const fs::path descriptor = in_workdir(ws, descriptor_path);
      const firm::FirmImage image =
          firm::build_firm(firm::parse_descriptor(read_text(descriptor), descriptor.parent_path()));
      write_bytes(in_workdir(ws, out_path), firm::serialize(image));
      out << "wrote " << in_workdir(ws, out_path).string() << "\n";
      return kOk;
    }

    if (sign->parsed()) {
      const RsaKeyPair key = load_private_key(ws, slot);
      const firm::FirmImage image = firm::sign_firm(firm::parse(read_bytes(in_workdir(ws, in_path))), key);
      write_bytes(in_workdir(ws, out_path), firm::serialize(image));
      out << "signed with " << slot.label() << "\n";
      return kOk;
    }

    if (fakesign->parsed()) {
      const PublicKey key = load_registry(ws).at(slot);
      const firm::FirmImage image = firm::fakesign_firm(firm::parse(read_bytes(in_workdir(ws, in_path))),
                                                        read_signature(in_workdir(ws, signature_path)),
                                                        key.block_length());
      write_bytes(in_workdir(ws, out_path), firm::serialize(image));
      out << "fakesigned for " << slot.label() << "\n";
      return kOk;
    }

    if (verify->parsed()) {
      const PublicKey key = load_registry(ws).at(slot);
      const firm::FirmImage image = firm::parse(read_bytes(in_workdir(ws, in_path)));
      const std::size_t bl = key.block_length();
      const firm::Validation v =
          firm::validate_firm(image, key, parser_for(ws, bl), sig::StackModel::boot9(bl, Seed{}.derive("verify-stack")));
      out << "mode=" << (ws.parser_mode == sig::ParserMode::Strict ? "strict" : "flawed") << " slot=" << slot.label()
          << "\nsignature: " << describe_outcome(v.signature) << "\n";
      for (const firm::SectionCheck& s : v.sections) {
        out << "section " << s.index << ": " << (s.hash_matches ? "hash ok" : "hash MISMATCH") << "\n";
      }
      out << (v.accepted() ? "ACCEPT" : "REJECT") << "\n";
      return v.accepted() ? kOk : kRejected;
    }

    if (boot->parsed()) {
      const Seed& seed = ws.require_seed();
      bootsim::Inputs inputs;
      if (!keys_text.empty()) inputs.keys_held = bootsim::keys::parse(keys_text);
      inputs.shell_closed = shell_closed;
      inputs.magnet_applied = magnet;
      bootsim::Media media;
      media.nand[std::string(bootsim::Media::kNandFirm)] = read_bytes(in_workdir(ws, in_path));
      if (!cart_path.empty()) {
        media.ntr_cart = read_bytes(in_workdir(ws, cart_path));
        inputs.ntr_cart_present = true;
      }
      bootsim::Machine machine(seed.derive("machine"), inputs, std::move(media));
      const bootsim::BootReport report = machine.run_boot(load_registry(ws), boot_options(ws));
      write_media(ws, machine.media());
      emit_report(ws, "boot", report, out);
      return report.succeeded() ? kOk : kRejected;
    }

    if (exploit->parsed()) {
      const Seed& seed = ws.require_seed();
      const KeyRegistry registry = load_registry(ws);
      const KeySlot nand_slot{Console::Retail, SigType::NandBoot};
      const std::size_t bl = registry.at(nand_slot).block_length();
      const BigUint signature = signature_path.empty()
                                    ? forge::forge_with_private_key(load_private_key(ws, nand_slot),
                                                                    static_cast<std::ptrdiff_t>(bl),
                                                                    seed.derive("exploit-signature"))
                                          .signature
                                    : read_signature(in_workdir(ws, signature_path));
      bootsim::StagedImageOptions staged_options;
      staged_options.omit_handler_section = omit_handler;
      const auto staged = firm::serialize(firm::fakesign_firm(bootsim::build_staged_image(staged_options), signature, bl));
      const auto second = second_path.empty() ? firm::serialize(bootsim::build_plain_image(seed.derive("second")))
                                              : read_bytes(in_workdir(ws, second_path));
      write_bytes(ws.workdir / "staged.firm", staged);
      const bootsim::ExploitRun run =
          bootsim::run_exploit_chain(seed.derive("machine"), staged, second,
                                     dump_keys ? bootsim::keys::kDumpCombo : 0, registry, boot_options(ws));
      write_media(ws, run.media);
      emit_report(ws, "exploit", run.report, out);
      return run.report.succeeded() ? kOk : kRejected;
    }

    if (ntr->parsed()) {
      const Seed& seed = ws.require_seed();
      const KeyRegistry registry = load_registry(ws);
      const KeySlot nand_slot{Console::Retail, SigType::NandBoot};
      const KeySlot cart_slot{Console::Retail, SigType::NonNandBoot};
      const RsaKeyPair nand_key = load_private_key(ws, nand_slot);
      const std::size_t bl = nand_key.block_length();
      const BigUint nand_sig =
          forge::forge_with_private_key(nand_key, static_cast<std::ptrdiff_t>(bl), seed.derive("nand-signature"))
              .signature;
      const BigUint cart_sig =
          wrong_slot ? nand_sig
                     : forge::forge_with_private_key(load_private_key(ws, cart_slot),
                                                     static_cast<std::ptrdiff_t>(bl), seed.derive("cart-signature"))
                           .signature;
      const auto staged = firm::serialize(firm::fakesign_firm(bootsim::build_staged_image(), nand_sig, bl));
      const auto installer =
          firm::serialize(firm::fakesign_firm(bootsim::build_ntr_installer_image(staged), cart_sig, bl));
      write_bytes(ws.workdir / "flashcart.firm", installer);
      bootsim::Media media;
      media.sd[std::string(bootsim::staging::kSecondFirmFile)] =
          firm::serialize(bootsim::build_plain_image(seed.derive("second")));
      const bootsim::NtrInstallRun run = bootsim::run_ntr_install_scenario(
          seed.derive("machine"), installer, std::move(media), registry, boot_options(ws), !no_cart);
      write_media(ws, run.media);
      emit_report(ws, "ntr-install", run.install_boot, out);
      if (run.nand_boot) emit_report(ws, "nand-boot", *run.nand_boot, out);
      const bool ok = run.install_boot.succeeded() && run.nand_boot && run.nand_boot->reached_entry;
      return ok ? kOk : kRejected;
    }
  } catch (const UsageError& e) {
    err << "error: " << e.what() << "\n";
    return kUsage;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kRejected;
  }
  err << app.help();
  return kUsage;
}

}  // namespace bootforge::cli
