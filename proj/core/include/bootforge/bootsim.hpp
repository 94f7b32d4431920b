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
#include <map>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "bootforge/firm.hpp"
#include "bootforge/modmath.hpp"
#include "bootforge/script.hpp"
#include "bootforge/seed.hpp"
#include "bootforge/sigparser.hpp"

namespace bootforge::bootsim {

// ---------------------------------------------------------------------------
// Address map

enum class RegionKind { Fcram, IoRegisters, Arm9Mem, Dtcm, Itcm, Boot9Data, AxiWram, BootRom9, BootRom11, Arm11Wram };

std::string_view to_string(RegionKind kind);

struct Region {
  int id = 0;
  std::uint32_t base = 0;
  std::uint32_t size = 0;
  RegionKind kind = RegionKind::Fcram;

  std::uint64_t end() const noexcept { return std::uint64_t{base} + size; }
  bool contains(std::uint32_t addr) const noexcept { return addr >= base && addr < end(); }
  bool overlaps(std::uint32_t addr, std::uint32_t len) const noexcept {
    return len != 0 && addr < end() && base < std::uint64_t{addr} + len;
  }
};

namespace addr {
// Boot ROMs. The upper half of each is the protected half.
inline constexpr std::uint32_t kBoot9Rom = 0xFFFE0000;
inline constexpr std::uint32_t kBoot11Rom = 0xFFFD0000;
inline constexpr std::uint32_t kBootRomSize = 0x10000;
inline constexpr std::uint32_t kProtectedSize = 0x8000;
inline constexpr std::uint32_t kBoot9Protected = kBoot9Rom + 0x8000;
inline constexpr std::uint32_t kBoot11Protected = kBoot11Rom + 0x8000;

inline constexpr std::uint32_t kArm11Wram = 0x1FF80000;
inline constexpr std::uint32_t kArm11WramSize = 0x80000;

// Boot9 data region: exception vectors, then the Boot9 function pointer table.
// Each vector slot is 8 bytes: a branch instruction and the handler address.
inline constexpr std::uint32_t kBoot9Data = 0xFFFF0000;
inline constexpr std::uint32_t kDataAbortVector = kBoot9Data + 0x28;
inline constexpr std::uint32_t kDataAbortHandler = kDataAbortVector + 4;
inline constexpr std::uint32_t kBoot9Hooks = kBoot9Data + 0x100;  // two slots
inline constexpr std::uint32_t kLowVectors = 0x00000000;
inline constexpr std::uint32_t kVectorPageSize = 0x1000;

// AXI WRAM: Boot11 function pointer and the Boot9 -> Boot11 handshake.
inline constexpr std::uint32_t kBoot11Hooks = 0x1FFFE100;
inline constexpr std::uint32_t kFirmLoaded = 0x1FFFE200;  // Boot9: sections are in place
inline constexpr std::uint32_t kBoot9Locked = 0x1FFFE204;  // Boot9: protected half locked

// I/O.
inline constexpr std::uint32_t kLockRegister = 0x10000000;  // bit 0 Boot9, bit 1 Boot11
inline constexpr std::uint32_t kNdmaWindow = 0x10002000;
inline constexpr std::uint32_t kNdmaWindowSize = 0x100;
inline constexpr std::uint32_t kIoRegistersEnd = 0x18000000;

inline constexpr std::uint32_t kBranchToHandler = 0xE51FF004;  // ldr pc, [pc, #-4]
}  // namespace addr

/// The ARM9 protection-unit table plus the simulator's boot ROM and ARM11
/// work RAM regions.
class MemoryMap {
 public:
  static MemoryMap standard();

  std::span<const Region> regions() const noexcept { return regions_; }
  /// The eight ARM9 protection-unit rows, ids 0-7.
  std::vector<Region> arm9_regions() const;
  const Region* find(std::uint32_t addr) const noexcept;
  const Region& by_id(int id) const;
  bool mapped(std::uint32_t addr) const noexcept { return find(addr) != nullptr; }

 private:
  std::vector<Region> regions_;
};

enum class BlacklistPolicy { Boot9DataOnly, Hardened };

std::string_view to_string(BlacklistPolicy policy);
std::optional<BlacklistPolicy> policy_from_string(std::string_view text);

/// Section destination check. Boot9DataOnly forbids overlap with the Boot9
/// data region; Hardened also forbids I/O registers, both exception vector
/// pages and the boot ROMs.
bool check_blacklist(std::uint32_t dst, std::uint32_t size, BlacklistPolicy policy);

// ---------------------------------------------------------------------------
// Machine inputs and media

enum class BootSource { Nand, WifiSpi, NtrCart };

std::string_view to_string(BootSource source);

struct Inputs {
  std::uint32_t keys_held = 0;
  bool shell_closed = false;
  bool ntr_cart_present = false;
  bool magnet_applied = false;
  /// The only way to reach WifiSpi.
  std::optional<BootSource> source_override;
};

BootSource select_boot_source(const Inputs& inputs);

/// Flat-file stores. NAND firmware lives under kNandFirm.
struct Media {
  std::map<std::string, std::vector<std::uint8_t>> nand;
  std::map<std::string, std::vector<std::uint8_t>> sd;
  std::optional<std::vector<std::uint8_t>> ntr_cart;
  std::optional<std::vector<std::uint8_t>> wifi_flash;

  static constexpr std::string_view kNandFirm = "firm0";
};

struct LockRegister {
  bool boot9_locked = false;
  bool boot11_locked = false;
  bool fcram9_enabled = false;
  bool fcram11_enabled = false;

  friend bool operator==(const LockRegister&, const LockRegister&) = default;
};

enum class NdmaTrigger : std::uint32_t { Immediate = 0 };

/// One 16-byte record in the NDMA window: src, dst, length, trigger.
struct NdmaRequest {
  std::uint32_t src = 0;
  std::uint32_t dst = 0;
  std::uint32_t length = 0;
  NdmaTrigger trigger = NdmaTrigger::Immediate;

  std::vector<std::uint8_t> encode() const;
};

// ---------------------------------------------------------------------------
// Events and reports

enum class EventKind {
  KeyInit,
  BootSource,
  HeaderRead,
  SignatureAccept,
  SignatureReject,
  SignatureOutOfBounds,
  SectionHashMismatch,
  BlacklistViolation,
  SectionLoad,
  NdmaCopy,
  NdmaInvalid,
  Copy,
  ProtectedRead,
  LockViolation,
  DataAbort,
  AbortSkipped,
  UnhandledAbort,
  BadCode,
  HookCall,
  MpuSetup,
  Signal,
  WaitDone,
  Jump,
  Return,
  Write,
  Lock,
  LockWriteRepeat,
  SdWrite,
  Chainload,
  ChainloadFailed,
  NandInstall,
  Entry,
  PowerOff,
  Watchdog,
};

std::string_view to_string(EventKind kind);

struct Event {
  std::uint64_t step = 0;
  Processor proc = Processor::Arm9;
  EventKind kind = EventKind::KeyInit;
  std::uint32_t addr = 0;
  std::uint32_t len = 0;

  friend bool operator==(const Event&, const Event&) = default;
};

/// "step=<n> proc=<9|11> event=<kind> addr=0x<8 hex> len=0x<hex>"
std::string format_event(const Event& event);

enum class Outcome {
  Running,
  Entry,     // ARM9 reached its entrypoint and both processors finished
  PowerOff,  // a script powered the console off
  Failure,   // error screen: bad signature, bad section, blacklisted destination
  Halt,      // black screen: unhandled abort or out-of-bounds signature read
  Watchdog,  // step budget exhausted
};

std::string_view to_string(Outcome outcome);

enum class ProtectedHalf { Boot9, Boot11 };

struct Exfiltration {
  std::uint32_t dst = 0;
  std::uint32_t rom_offset = 0;  // offset within the protected half
  std::vector<std::uint8_t> bytes;
};

struct SectionLoadRecord {
  std::size_t index = 0;
  std::uint32_t phys_addr = 0;
  std::uint32_t size = 0;
  bool completed = false;
};

struct AbortRecord {
  std::uint32_t addr = 0;
  bool handled = false;
};

struct BootReport {
  BootSource boot_source = BootSource::Nand;
  KeySlot key_slot;
  std::optional<sig::ParseOutcome> signature_verdict;
  std::optional<std::size_t> bad_section;
  std::vector<SectionLoadRecord> sections_loaded;
  std::vector<AbortRecord> aborts;
  std::optional<Exfiltration> boot9_protected;
  std::optional<Exfiltration> boot11_protected;
  bool reached_entry = false;
  bool arm11_reached_entry = false;
  LockRegister locks_final;
  Outcome outcome = Outcome::Running;
  std::string message;
  std::uint64_t steps = 0;
  std::vector<Event> events;

  bool succeeded() const noexcept { return outcome == Outcome::Entry || outcome == Outcome::PowerOff; }
};

/// Stable field order. Exfiltrated bytes appear as length and SHA-256.
std::string to_json(const BootReport& report);
std::string format_event_log(const BootReport& report);

// ---------------------------------------------------------------------------
// Machine

struct BootOptions {
  sig::ParserMode parser_mode = sig::ParserMode::Flawed;
  sig::TagCheck tags = sig::TagCheck::Unchecked;
  BlacklistPolicy policy = BlacklistPolicy::Boot9DataOnly;
  Console console = Console::Retail;
  std::uint64_t step_budget = 1'000'000;
};

/// Thrown inside the simulator for an access the bus refuses.
struct DataAbort {
  std::uint32_t addr = 0;
};

/// Seeded contents of a protected ROM half, as installed at machine
/// construction.
std::vector<std::uint8_t> protected_rom_contents(const Seed& machine_seed, ProtectedHalf half);

/// One power-on of the console. Memory, locks and the event log belong to
/// a single boot; media persist and can be carried to the next machine.
class Machine {
 public:
  Machine(const Seed& seed, Inputs inputs, Media media = {});
  ~Machine();
  Machine(Machine&&) noexcept;
  Machine& operator=(Machine&&) noexcept;

  /// Full boot from the selected source. Runs once per machine.
  BootReport run_boot(const KeyRegistry& registry, const BootOptions& options);

  /// Places one section at its physical address the way the boot ROM's
  /// loader does: blacklist check, NDMA window decode, abort on unmapped
  /// destinations. Data aborts propagate as DataAbort; a blacklisted
  /// destination returns false. Appends events to the current log.
  bool load_section(const firm::SectionHeader& section, std::span<const std::uint8_t> payload,
                    BlacklistPolicy policy);

  const MemoryMap& memory_map() const noexcept;
  const LockRegister& locks() const noexcept;
  const std::vector<Event>& events() const noexcept;
  const Media& media() const noexcept;
  Media take_media();
  const Inputs& inputs() const noexcept;

  /// Raw memory access for tests and reports; no access checks.
  std::vector<std::uint8_t> peek(std::uint32_t addr, std::uint32_t len) const;
  void poke(std::uint32_t addr, std::span<const std::uint8_t> bytes);

  /// Stack the signature check runs on for a key of this block length.
  sig::StackModel boot9_stack(std::size_t block_length) const;

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

/// Boot `image` from NAND.
BootReport run_boot(const Seed& machine_seed, const Inputs& inputs, std::span<const std::uint8_t> image,
                    const KeyRegistry& registry, const BootOptions& options);

/// Boot a staged exploit image from NAND with `second_image` (if any) on SD
/// as "second.firm".
struct ExploitRun {
  BootReport report;
  Media media;
};
ExploitRun run_exploit_chain(const Seed& machine_seed, std::span<const std::uint8_t> staged_image,
                             const std::optional<std::vector<std::uint8_t>>& second_image,
                             std::uint32_t keys_held, const KeyRegistry& registry, const BootOptions& options);

/// Cartridge boot of `flashcart_image` followed by a NAND boot of whatever it
/// installed. The second boot runs on a fresh machine with the same seed and
/// the media left by the first, with no keys held and no cartridge.
struct NtrInstallRun {
  BootReport install_boot;
  std::optional<BootReport> nand_boot;
  Media media;
};
NtrInstallRun run_ntr_install_scenario(const Seed& machine_seed, std::span<const std::uint8_t> flashcart_image,
                                       Media media, const KeyRegistry& registry, const BootOptions& options,
                                       bool cart_present = true);

}  // namespace bootforge::bootsim
