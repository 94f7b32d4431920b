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

#include "bootforge/bootsim.hpp"

#include <algorithm>
#include <array>
#include <cstdio>
#include <unordered_map>

#include "bootforge/error.hpp"
#include "json.hpp"

namespace bootforge::bootsim {

// ---------------------------------------------------------------------------
// Names

std::string_view to_string(RegionKind kind) {
  switch (kind) {
    case RegionKind::Fcram: return "fcram";
    case RegionKind::IoRegisters: return "io-registers";
    case RegionKind::Arm9Mem: return "arm9-memory";
    case RegionKind::Dtcm: return "dtcm";
    case RegionKind::Itcm: return "itcm";
    case RegionKind::Boot9Data: return "boot9-data";
    case RegionKind::AxiWram: return "axi-wram";
    case RegionKind::BootRom9: return "boot9-rom";
    case RegionKind::BootRom11: return "boot11-rom";
    case RegionKind::Arm11Wram: return "arm11-wram";
  }
  return "?";
}

std::string_view to_string(BlacklistPolicy policy) {
  return policy == BlacklistPolicy::Boot9DataOnly ? "boot9only" : "hardened";
}

std::optional<BlacklistPolicy> policy_from_string(std::string_view text) {
  if (text == "boot9only") return BlacklistPolicy::Boot9DataOnly;
  if (text == "hardened") return BlacklistPolicy::Hardened;
  return std::nullopt;
}

std::string_view to_string(BootSource source) {
  switch (source) {
    case BootSource::Nand: return "nand";
    case BootSource::WifiSpi: return "wifi-spi";
    case BootSource::NtrCart: return "ntr-cart";
  }
  return "?";
}

std::string_view to_string(EventKind kind) {
  switch (kind) {
    case EventKind::KeyInit: return "key-init";
    case EventKind::BootSource: return "boot-source";
    case EventKind::HeaderRead: return "header-read";
    case EventKind::SignatureAccept: return "signature-accept";
    case EventKind::SignatureReject: return "signature-reject";
    case EventKind::SignatureOutOfBounds: return "signature-out-of-bounds";
    case EventKind::SectionHashMismatch: return "section-hash-mismatch";
    case EventKind::BlacklistViolation: return "blacklist-violation";
    case EventKind::SectionLoad: return "section-load";
    case EventKind::NdmaCopy: return "ndma-copy";
    case EventKind::NdmaInvalid: return "ndma-invalid";
    case EventKind::Copy: return "copy";
    case EventKind::ProtectedRead: return "protected-read";
    case EventKind::LockViolation: return "lock-violation";
    case EventKind::DataAbort: return "data-abort";
    case EventKind::AbortSkipped: return "abort-skipped";
    case EventKind::UnhandledAbort: return "unhandled-abort";
    case EventKind::BadCode: return "bad-code";
    case EventKind::HookCall: return "hook-call";
    case EventKind::MpuSetup: return "mpu-setup";
    case EventKind::Signal: return "signal";
    case EventKind::WaitDone: return "wait-done";
    case EventKind::Jump: return "jump";
    case EventKind::Return: return "return";
    case EventKind::Write: return "write";
    case EventKind::Lock: return "lock";
    case EventKind::LockWriteRepeat: return "lock-write-repeat";
    case EventKind::SdWrite: return "sd-write";
    case EventKind::Chainload: return "chainload";
    case EventKind::ChainloadFailed: return "chainload-failed";
    case EventKind::NandInstall: return "nand-install";
    case EventKind::Entry: return "entry";
    case EventKind::PowerOff: return "power-off";
    case EventKind::Watchdog: return "watchdog";
  }
  return "?";
}

std::string_view to_string(Outcome outcome) {
  switch (outcome) {
    case Outcome::Running: return "running";
    case Outcome::Entry: return "entry";
    case Outcome::PowerOff: return "power-off";
    case Outcome::Failure: return "failure";
    case Outcome::Halt: return "halt";
    case Outcome::Watchdog: return "watchdog";
  }
  return "?";
}

std::string format_event(const Event& event) {
  char buf[160];
  std::snprintf(buf, sizeof buf, "step=%llu proc=%u event=%s addr=0x%08x len=0x%x",
                static_cast<unsigned long long>(event.step), static_cast<unsigned>(event.proc),
                std::string(to_string(event.kind)).c_str(), event.addr, event.len);
  return buf;
}

// ---------------------------------------------------------------------------
// Memory map and blacklist

MemoryMap MemoryMap::standard() {
  MemoryMap map;
  map.regions_ = {
      {0, 0x20000000, 0x08000000, RegionKind::Fcram},
      {1, 0x10000000, 0x10000000, RegionKind::IoRegisters},
      {2, 0x08000000, 0x00100000, RegionKind::Arm9Mem},
      {3, 0x08000000, 0x00000400, RegionKind::Arm9Mem},
      {4, 0xFFF00000, 0x00004000, RegionKind::Dtcm},
      {5, 0x07FF8000, 0x00008000, RegionKind::Itcm},
      {6, 0xFFFF0000, 0x00010000, RegionKind::Boot9Data},
      {7, 0x1FFFE000, 0x00000800, RegionKind::AxiWram},
      {8, addr::kBoot9Rom, addr::kBootRomSize, RegionKind::BootRom9},
      {9, addr::kBoot11Rom, addr::kBootRomSize, RegionKind::BootRom11},
      {10, addr::kArm11Wram, addr::kArm11WramSize, RegionKind::Arm11Wram},
  };
  return map;
}

std::vector<Region> MemoryMap::arm9_regions() const {
  std::vector<Region> out;
  for (const Region& r : regions_) {
    if (r.id < 8) out.push_back(r);
  }
  return out;
}

const Region* MemoryMap::find(std::uint32_t addr) const noexcept {
  // The most specific region wins: boot ROMs and work RAM sit inside the
  // wide I/O row, and row 3 sits inside row 2.
  const Region* best = nullptr;
  for (const Region& r : regions_) {
    if (r.contains(addr) && (best == nullptr || r.size < best->size)) best = &r;
  }
  return best;
}

const Region& MemoryMap::by_id(int id) const {
  for (const Region& r : regions_) {
    if (r.id == id) return r;
  }
  throw DomainError("no region with id " + std::to_string(id));
}

bool check_blacklist(std::uint32_t dst, std::uint32_t size, BlacklistPolicy policy) {
  const Region boot9_data{6, addr::kBoot9Data, 0x10000, RegionKind::Boot9Data};
  if (boot9_data.overlaps(dst, size)) return false;
  if (policy == BlacklistPolicy::Boot9DataOnly) return true;

  const Region forbidden[] = {
      {1, 0x10000000, addr::kIoRegistersEnd - 0x10000000, RegionKind::IoRegisters},
      {0, addr::kLowVectors, addr::kVectorPageSize, RegionKind::Boot9Data},
      {0, addr::kBoot9Rom, addr::kBootRomSize, RegionKind::BootRom9},
      {0, addr::kBoot11Rom, addr::kBootRomSize, RegionKind::BootRom11},
  };
  return std::none_of(std::begin(forbidden), std::end(forbidden),
                      [&](const Region& r) { return r.overlaps(dst, size); });
}

BootSource select_boot_source(const Inputs& inputs) {
  if (inputs.source_override) return *inputs.source_override;
  const bool shell_closed = inputs.shell_closed || inputs.magnet_applied;
  if (shell_closed && (inputs.keys_held & keys::kNtrBoot) == keys::kNtrBoot && inputs.ntr_cart_present) {
    return BootSource::NtrCart;
  }
  return BootSource::Nand;
}

std::vector<std::uint8_t> NdmaRequest::encode() const {
  std::vector<std::uint8_t> out(16, 0);
  put_u32(out, 0, src);
  put_u32(out, 4, dst);
  put_u32(out, 8, length);
  put_u32(out, 12, static_cast<std::uint32_t>(trigger));
  return out;
}

std::vector<std::uint8_t> protected_rom_contents(const Seed& machine_seed, ProtectedHalf half) {
  SeedStream stream(machine_seed.derive(half == ProtectedHalf::Boot9 ? "boot9-protected" : "boot11-protected"));
  return stream.bytes(addr::kProtectedSize);
}

// ---------------------------------------------------------------------------
// Machine internals

namespace {

constexpr std::uint32_t kPageSize = 0x1000;
constexpr std::size_t kMaxNameLength = 64;

enum class Master { Arm9, Arm11, Ndma };

Processor owner(Master m) { return m == Master::Arm11 ? Processor::Arm11 : Processor::Arm9; }

enum class FrameKind { Hook, Handler, Entry, Stage };

struct Frame {
  std::uint32_t base = 0;
  std::uint32_t count = 0;
  std::uint32_t pc = 0;
  FrameKind kind = FrameKind::Stage;
};

enum class Arm9Stage { KeyInit, Source, Header, Sections, Hook0, PublishLoaded, Hook1, Lock, PublishLocked, Entry, Done };
enum class Arm11Stage { WaitLoaded, Hook, WaitLocked, Lock, Entry, Done };

struct Cpu {
  Processor id;
  std::vector<Frame> frames;
  bool done = false;
  bool reached_entry = false;
};

/// Stops the scheduler with a final outcome.
struct Stop {
  Outcome outcome;
  std::string message;
};

}  // namespace

struct Machine::Impl {
  Seed seed;
  Inputs inputs;
  Media media;
  MemoryMap map = MemoryMap::standard();
  std::unordered_map<std::uint32_t, std::unique_ptr<std::array<std::uint8_t, kPageSize>>> pages;
  LockRegister locks;
  std::vector<Event> events;
  std::uint64_t step = 0;
  bool booted = false;

  // Boot in progress.
  BootReport report;
  const BootOptions* options = nullptr;
  std::optional<firm::FirmImage> image;
  std::size_t next_section = 0;
  Arm9Stage stage9 = Arm9Stage::KeyInit;
  Arm11Stage stage11 = Arm11Stage::WaitLoaded;
  Cpu cpu9{Processor::Arm9, {}};
  Cpu cpu11{Processor::Arm11, {}};

  explicit Impl(const Seed& s, Inputs in, Media m) : seed(s), inputs(in), media(std::move(m)) {
    install_rom(addr::kBoot9Rom, "boot9-public", ProtectedHalf::Boot9);
    install_rom(addr::kBoot11Rom, "boot11-public", ProtectedHalf::Boot11);
  }

  void install_rom(std::uint32_t base, std::string_view public_label, ProtectedHalf half) {
    SeedStream stream(seed.derive(public_label));
    poke(base, stream.bytes(addr::kBootRomSize - addr::kProtectedSize));
    poke(base + addr::kProtectedSize, protected_rom_contents(seed, half));
  }

  void log(Processor proc, EventKind kind, std::uint32_t a = 0, std::uint32_t len = 0) {
    events.push_back({step, proc, kind, a, len});
  }

  // --- raw storage -------------------------------------------------------

  std::uint8_t* page_for(std::uint32_t a, bool create) {
    const std::uint32_t key = a / kPageSize;
    auto it = pages.find(key);
    if (it == pages.end()) {
      if (!create) return nullptr;
      it = pages.emplace(key, std::make_unique<std::array<std::uint8_t, kPageSize>>()).first;
      it->second->fill(0);
    }
    return it->second->data();
  }

  std::vector<std::uint8_t> peek(std::uint32_t a, std::uint32_t len) {
    std::vector<std::uint8_t> out(len, 0);
    for (std::uint32_t i = 0; i < len; ++i) {
      const std::uint32_t at = a + i;
      if (const std::uint8_t* p = page_for(at, false)) out[i] = p[at % kPageSize];
    }
    return out;
  }

  void poke(std::uint32_t a, std::span<const std::uint8_t> bytes) {
    for (std::size_t i = 0; i < bytes.size(); ++i) {
      const std::uint32_t at = a + static_cast<std::uint32_t>(i);
      page_for(at, true)[at % kPageSize] = bytes[i];
    }
  }

  // --- bus ---------------------------------------------------------------

  /// Walks [a, a + len) region by region; throws DataAbort at the first
  /// byte the master may not touch.
  void check_access(Master m, std::uint32_t a, std::uint32_t len, bool write) {
    const std::uint64_t end = std::uint64_t{a} + len;
    if (end > 0x100000000ull) throw DataAbort{a};
    std::uint64_t cur = a;
    while (cur < end) {
      const auto at = static_cast<std::uint32_t>(cur);
      const Region* r = map.find(at);
      if (r == nullptr) throw DataAbort{at};
      switch (r->kind) {
        case RegionKind::BootRom9:
          if (write || m == Master::Arm11) throw DataAbort{at};
          break;
        case RegionKind::BootRom11:
          if (write || m != Master::Arm11) throw DataAbort{at};
          break;
        case RegionKind::Fcram:
          if (!(owner(m) == Processor::Arm9 ? locks.fcram9_enabled : locks.fcram11_enabled)) throw DataAbort{at};
          break;
        default:
          break;
      }
      // Stop at the end of the innermost region or where a more specific
      // region begins inside it.
      std::uint64_t next = std::min<std::uint64_t>(end, r->end());
      for (const Region& other : map.regions()) {
        if (other.size < r->size && other.base > cur && other.base < next) next = other.base;
      }
      cur = next;
    }
  }

  static std::optional<std::pair<std::uint32_t, std::uint32_t>> overlap(std::uint32_t a, std::uint32_t len,
                                                                        std::uint32_t base, std::uint32_t size) {
    const std::uint64_t lo = std::max<std::uint64_t>(a, base);
    const std::uint64_t hi = std::min<std::uint64_t>(std::uint64_t{a} + len, std::uint64_t{base} + size);
    if (lo >= hi) return std::nullopt;
    return std::pair{static_cast<std::uint32_t>(lo), static_cast<std::uint32_t>(hi - lo)};
  }

  std::vector<std::uint8_t> read(Master m, std::uint32_t a, std::uint32_t len) {
    check_access(m, a, len, false);
    std::vector<std::uint8_t> out = peek(a, len);
    const Processor proc = owner(m);
    const std::pair<std::uint32_t, bool> halves[] = {{addr::kBoot9Protected, locks.boot9_locked},
                                                    {addr::kBoot11Protected, locks.boot11_locked}};
    for (const auto& [base, locked] : halves) {
      const auto ov = overlap(a, len, base, addr::kProtectedSize);
      if (!ov) continue;
      if (locked) {
        std::fill_n(out.begin() + (ov->first - a), ov->second, 0);
        log(proc, EventKind::LockViolation, ov->first, ov->second);
      } else {
        log(proc, EventKind::ProtectedRead, ov->first, ov->second);
      }
    }
    return out;
  }

  void write(Master m, std::uint32_t a, std::span<const std::uint8_t> bytes) {
    const auto len = static_cast<std::uint32_t>(bytes.size());
    check_access(m, a, len, true);
    poke(a, bytes);
    if (const auto ov = overlap(a, len, addr::kLockRegister, 1)) {
      apply_lock(owner(m), bytes[ov->first - a]);
    }
  }

  std::uint32_t read32(Master m, std::uint32_t a) { return get_u32(read(m, a, 4), 0); }

  void write32(Master m, std::uint32_t a, std::uint32_t value) {
    std::vector<std::uint8_t> buf;
    put_u32(buf, 0, value);
    write(m, a, buf);
  }

  void apply_lock(Processor proc, std::uint8_t bits) {
    if (bits & 1) {
      if (locks.boot9_locked) {
        log(proc, EventKind::LockWriteRepeat, addr::kLockRegister, 1);
      } else {
        locks.boot9_locked = true;
        locks.fcram9_enabled = true;
        log(proc, EventKind::Lock, addr::kBoot9Protected, addr::kProtectedSize);
      }
    }
    if (bits & 2) {
      if (locks.boot11_locked) {
        log(proc, EventKind::LockWriteRepeat, addr::kLockRegister, 2);
      } else {
        locks.boot11_locked = true;
        locks.fcram11_enabled = true;
        log(proc, EventKind::Lock, addr::kBoot11Protected, addr::kProtectedSize);
      }
    }
  }

  /// Unchecked copy as performed by a CPU or the NDMA engine. Records
  /// protected-half reads made before the lock as exfiltration.
  void copy(Master m, std::uint32_t src, std::uint32_t dst, std::uint32_t len) {
    const std::vector<std::uint8_t> data = read(m, src, len);
    write(m, dst, data);
    log(owner(m), m == Master::Ndma ? EventKind::NdmaCopy : EventKind::Copy, dst, len);
    const std::tuple<std::uint32_t, bool, std::optional<Exfiltration>*> halves[] = {
        {addr::kBoot9Protected, locks.boot9_locked, &report.boot9_protected},
        {addr::kBoot11Protected, locks.boot11_locked, &report.boot11_protected}};
    for (const auto& [base, locked, slot] : halves) {
      const auto ov = overlap(src, len, base, addr::kProtectedSize);
      if (!ov || locked) continue;
      *slot = Exfiltration{dst + (ov->first - src), ov->first - base, {}};
      (*slot)->bytes.resize(ov->second);
    }
  }

  // --- section loader ----------------------------------------------------

  bool load_section(const firm::SectionHeader& s, std::span<const std::uint8_t> payload, BlacklistPolicy policy) {
    if (!check_blacklist(s.phys_addr, s.size, policy)) {
      log(Processor::Arm9, EventKind::BlacklistViolation, s.phys_addr, s.size);
      return false;
    }
    write(Master::Arm9, s.phys_addr, payload.first(s.size));
    log(Processor::Arm9, EventKind::SectionLoad, s.phys_addr, s.size);
    const auto window = overlap(s.phys_addr, s.size, addr::kNdmaWindow, addr::kNdmaWindowSize);
    if (!window) return true;
    // Every whole record the section wrote into the window starts a transfer.
    const std::uint32_t first = window->first - s.phys_addr;
    for (std::uint32_t off = first; off + 16 <= first + window->second; off += 16) {
      NdmaRequest req{get_u32(payload, off), get_u32(payload, off + 4), get_u32(payload, off + 8),
                      static_cast<NdmaTrigger>(get_u32(payload, off + 12))};
      if (req.length == 0 || req.trigger != NdmaTrigger::Immediate) {
        log(Processor::Arm9, EventKind::NdmaInvalid, window->first + (off - first), 16);
        continue;
      }
      copy(Master::Ndma, req.src, req.dst, req.length);
    }
    return true;
  }

  // --- scripts -----------------------------------------------------------

  Master master_of(const Cpu& cpu) const { return cpu.id == Processor::Arm9 ? Master::Arm9 : Master::Arm11; }

  /// Script header at `a` for `cpu`, nullopt when `a` holds no script.
  std::optional<Frame> probe_script(const Cpu& cpu, std::uint32_t a, FrameKind kind) {
    std::vector<std::uint8_t> head;
    try {
      head = read(master_of(cpu), a, kScriptHeaderSize);
    } catch (const DataAbort&) {
      return std::nullopt;
    }
    if (get_u32(head, 0) != kScriptMagic) return std::nullopt;
    if (get_u32(head, 4) != static_cast<std::uint32_t>(cpu.id)) {
      log(cpu.id, EventKind::BadCode, a, kScriptHeaderSize);
      throw Stop{Outcome::Halt, "script at " + hex32(a) + " is for the other processor"};
    }
    return Frame{a, get_u32(head, 8), 0, kind};
  }

  static std::string hex32(std::uint32_t v) {
    char buf[16];
    std::snprintf(buf, sizeof buf, "0x%08x", v);
    return buf;
  }

  /// Calls through a function-pointer slot. A null slot means the stock
  /// routine, which has no visible effect here.
  void call_hook(Cpu& cpu, std::uint32_t slot) {
    const std::uint32_t target = read32(master_of(cpu), slot);
    if (target == 0) return;
    log(cpu.id, EventKind::HookCall, target, 0);
    auto frame = probe_script(cpu, target, FrameKind::Hook);
    if (!frame) {
      log(cpu.id, EventKind::BadCode, target, 0);
      throw Stop{Outcome::Halt, "hook pointer " + hex32(target) + " does not hold code"};
    }
    cpu.frames.push_back(*frame);
  }

  void enter(Cpu& cpu, std::uint32_t target) {
    log(cpu.id, EventKind::Entry, target, 0);
    cpu.frames.clear();
    if (cpu.id == Processor::Arm9) {
      stage9 = Arm9Stage::Done;
      report.reached_entry = true;
    } else {
      stage11 = Arm11Stage::Done;
      report.arm11_reached_entry = true;
    }
    cpu.reached_entry = true;
    if (auto frame = probe_script(cpu, target, FrameKind::Entry)) cpu.frames.push_back(*frame);
  }

  std::string read_name(const Cpu& cpu, std::uint32_t a) {
    std::string out;
    const auto raw = read(master_of(cpu), a, kMaxNameLength);
    for (std::uint8_t c : raw) {
      if (c == 0) return out;
      out.push_back(static_cast<char>(c));
    }
    throw Stop{Outcome::Halt, "unterminated file name at " + hex32(a)};
  }

  void step_script(Cpu& cpu) {
    Frame& f = cpu.frames.back();
    if (f.pc >= f.count) {
      finish_frame(cpu);
      return;
    }
    const std::uint32_t op_addr = f.base + static_cast<std::uint32_t>(kScriptHeaderSize + f.pc * kScriptOpSize);
    ++f.pc;
    const auto raw = read(master_of(cpu), op_addr, kScriptOpSize);
    const ScriptOp op{static_cast<Opcode>(get_u32(raw, 0)), get_u32(raw, 4), get_u32(raw, 8), get_u32(raw, 12)};
    const Master m = master_of(cpu);

    switch (op.opcode) {
      case Opcode::Write32:
        write32(m, op.a, op.b);
        log(cpu.id, EventKind::Write, op.a, 4);
        break;
      case Opcode::Copy:
        copy(m, op.a, op.b, op.c);
        break;
      case Opcode::MpuSetup:
        log(cpu.id, EventKind::MpuSetup);
        break;
      case Opcode::Signal:
        write32(m, op.a, op.b);
        log(cpu.id, EventKind::Signal, op.a, 4);
        break;
      case Opcode::Wait:
        if (get_u32(peek(op.a, 4), 0) != op.b || !map.mapped(op.a)) {
          --cpu.frames.back().pc;
        } else {
          read32(m, op.a);
          log(cpu.id, EventKind::WaitDone, op.a, 4);
        }
        break;
      case Opcode::SkipFault:
        if (f.kind != FrameKind::Handler) {
          log(cpu.id, EventKind::BadCode, op_addr, kScriptOpSize);
          throw Stop{Outcome::Halt, "skip-fault outside an abort handler"};
        }
        log(cpu.id, EventKind::AbortSkipped, op_addr, 0);
        cpu.frames.pop_back();
        break;
      case Opcode::Return:
        finish_frame(cpu);
        break;
      case Opcode::Jump: {
        log(cpu.id, EventKind::Jump, op.a, 0);
        cpu.frames.clear();
        abandon_stock(cpu);
        auto frame = probe_script(cpu, op.a, FrameKind::Stage);
        if (!frame) {
          log(cpu.id, EventKind::BadCode, op.a, 0);
          throw Stop{Outcome::Halt, "jump to " + hex32(op.a) + " which holds no code"};
        }
        cpu.frames.push_back(*frame);
        break;
      }
      case Opcode::IfKeysHeld:
        if ((inputs.keys_held & op.a) != op.a) f.pc = std::min(f.count, f.pc + op.b);
        break;
      case Opcode::SdWrite: {
        const std::string name = read_name(cpu, op.c);
        media.sd[name] = read(m, op.a, op.b);
        log(cpu.id, EventKind::SdWrite, op.a, op.b);
        break;
      }
      case Opcode::PowerOff:
        log(cpu.id, EventKind::PowerOff);
        throw Stop{Outcome::PowerOff, "powered off by " + std::string(cpu.id == Processor::Arm9 ? "ARM9" : "ARM11")};
      case Opcode::ChainloadSd:
        chainload(cpu, op);
        break;
      case Opcode::Entry:
        enter(cpu, read32(m, op.a));
        break;
      case Opcode::NandInstall:
        media.nand[std::string(Media::kNandFirm)] = read(m, op.a, op.b);
        log(cpu.id, EventKind::NandInstall, op.a, op.b);
        break;
      default:
        log(cpu.id, EventKind::BadCode, op_addr, kScriptOpSize);
        throw Stop{Outcome::Halt, "invalid opcode at " + hex32(op_addr)};
    }
  }

  void finish_frame(Cpu& cpu) {
    const Frame f = cpu.frames.back();
    cpu.frames.pop_back();
    if (f.kind == FrameKind::Handler) {
      // Returning re-executes the faulting access, which faults again.
      throw Stop{Outcome::Halt, "abort handler returned to the faulting access"};
    }
    log(cpu.id, EventKind::Return, f.base, 0);
  }

  void abandon_stock(Cpu& cpu) {
    if (cpu.id == Processor::Arm9) {
      stage9 = Arm9Stage::Done;
    } else {
      stage11 = Arm11Stage::Done;
    }
  }

  void chainload(Cpu& cpu, const ScriptOp& op) {
    const std::string name = read_name(cpu, op.a);
    const auto it = media.sd.find(name);
    if (it == media.sd.end()) {
      log(cpu.id, EventKind::ChainloadFailed, op.a, 0);
      throw Stop{Outcome::Failure, "chainload: " + name + " not found on SD"};
    }
    firm::FirmImage next;
    try {
      next = firm::parse(firm::NullCipher{}.decrypt(it->second));
    } catch (const ParseError& e) {
      log(cpu.id, EventKind::ChainloadFailed, op.a, 0);
      throw Stop{Outcome::Failure, std::string("chainload: ") + e.what()};
    }
    const Master m = master_of(cpu);
    for (std::size_t i = 0; i < firm::kSectionCount; ++i) {
      const firm::SectionHeader& s = next.header.sections[i];
      if (!s.used()) continue;
      write(m, s.phys_addr, next.payloads[i]);
      log(cpu.id, EventKind::SectionLoad, s.phys_addr, s.size);
    }
    write32(m, op.b, next.header.arm9_entry);
    write32(m, op.c, next.header.arm11_entry);
    log(cpu.id, EventKind::Chainload, next.header.arm9_entry, static_cast<std::uint32_t>(it->second.size()));
  }

  // --- stock boot ROM sequences -------------------------------------------

  void step_boot9(Cpu& cpu) {
    switch (stage9) {
      case Arm9Stage::KeyInit:
        // Keyslot setup has no observable effect beyond ordering.
        log(cpu.id, EventKind::KeyInit);
        stage9 = Arm9Stage::Source;
        break;
      case Arm9Stage::Source:
        report.boot_source = select_boot_source(inputs);
        report.key_slot = {options->console, report.boot_source == BootSource::Nand ? SigType::NandBoot
                                                                                      : SigType::NonNandBoot};
        log(cpu.id, EventKind::BootSource, static_cast<std::uint32_t>(report.boot_source));
        stage9 = Arm9Stage::Header;
        break;
      case Arm9Stage::Header:
        read_and_validate(cpu);
        stage9 = Arm9Stage::Sections;
        break;
      case Arm9Stage::Sections: {
        while (next_section < firm::kSectionCount && !image->header.sections[next_section].used()) ++next_section;
        if (next_section == firm::kSectionCount) {
          stage9 = Arm9Stage::Hook0;
          break;
        }
        const std::size_t i = next_section++;
        const firm::SectionHeader& s = image->header.sections[i];
        report.sections_loaded.push_back({i, s.phys_addr, s.size, false});
        if (!load_section(s, image->payloads[i], options->policy)) {
          throw Stop{Outcome::Failure, "section " + std::to_string(i) + " destination " + hex32(s.phys_addr) +
                                           " is blacklisted"};
        }
        report.sections_loaded.back().completed = true;
        break;
      }
      case Arm9Stage::Hook0:
        stage9 = Arm9Stage::PublishLoaded;
        call_hook(cpu, addr::kBoot9Hooks);
        break;
      case Arm9Stage::PublishLoaded:
        write32(Master::Arm9, addr::kFirmLoaded, 1);
        log(cpu.id, EventKind::Signal, addr::kFirmLoaded, 4);
        stage9 = Arm9Stage::Hook1;
        break;
      case Arm9Stage::Hook1:
        stage9 = Arm9Stage::Lock;
        call_hook(cpu, addr::kBoot9Hooks + 4);
        break;
      case Arm9Stage::Lock:
        write32(Master::Arm9, addr::kLockRegister, 1);
        stage9 = Arm9Stage::PublishLocked;
        break;
      case Arm9Stage::PublishLocked:
        write32(Master::Arm9, addr::kBoot9Locked, 1);
        log(cpu.id, EventKind::Signal, addr::kBoot9Locked, 4);
        stage9 = Arm9Stage::Entry;
        break;
      case Arm9Stage::Entry:
        enter(cpu, image->header.arm9_entry);
        break;
      case Arm9Stage::Done:
        break;
    }
  }

  void step_boot11(Cpu& cpu) {
    switch (stage11) {
      case Arm11Stage::WaitLoaded:
        if (get_u32(peek(addr::kFirmLoaded, 4), 0) != 0) {
          log(cpu.id, EventKind::WaitDone, addr::kFirmLoaded, 4);
          stage11 = Arm11Stage::Hook;
        }
        break;
      case Arm11Stage::Hook:
        stage11 = Arm11Stage::WaitLocked;
        call_hook(cpu, addr::kBoot11Hooks);
        break;
      case Arm11Stage::WaitLocked:
        if (get_u32(peek(addr::kBoot9Locked, 4), 0) != 0) {
          log(cpu.id, EventKind::WaitDone, addr::kBoot9Locked, 4);
          stage11 = Arm11Stage::Lock;
        }
        break;
      case Arm11Stage::Lock:
        write32(Master::Arm11, addr::kLockRegister, 2);
        stage11 = Arm11Stage::Entry;
        break;
      case Arm11Stage::Entry:
        enter(cpu, image->header.arm11_entry);
        break;
      case Arm11Stage::Done:
        break;
    }
  }

  void read_and_validate(Cpu& cpu) {
    const std::vector<std::uint8_t>* stored = nullptr;
    switch (report.boot_source) {
      case BootSource::Nand: {
        const auto it = media.nand.find(std::string(Media::kNandFirm));
        if (it != media.nand.end()) stored = &it->second;
        break;
      }
      case BootSource::NtrCart:
        if (media.ntr_cart) stored = &*media.ntr_cart;
        break;
      case BootSource::WifiSpi:
        if (media.wifi_flash) stored = &*media.wifi_flash;
        break;
    }
    if (stored == nullptr) {
      throw Stop{Outcome::Failure, "no firmware image on " + std::string(to_string(report.boot_source))};
    }
    log(cpu.id, EventKind::HeaderRead, 0, static_cast<std::uint32_t>(std::min<std::size_t>(stored->size(), firm::kHeaderSize)));
    try {
      image = firm::parse(firm::NullCipher{}.decrypt(*stored));
    } catch (const ParseError& e) {
      throw Stop{Outcome::Failure, std::string("firmware header: ") + e.what()};
    }

    const PublicKey& key = registry->at(report.key_slot);
    const std::size_t bl = key.block_length();
    sig::ParserConfig parser = options->parser_mode == sig::ParserMode::Strict ? sig::ParserConfig::strict()
                                                                               : sig::ParserConfig::flawed(bl);
    parser.tags = options->tags;
    const firm::Validation v = firm::validate_firm(*image, key, parser, boot9_stack(bl));
    report.signature_verdict = v.signature;
    const auto landing = static_cast<std::uint32_t>(v.signature.landing_offset.value_or(0));
    switch (v.signature.verdict) {
      case sig::Verdict::Accept:
        log(cpu.id, EventKind::SignatureAccept, landing, static_cast<std::uint32_t>(sig::kCompareLength));
        break;
      case sig::Verdict::Reject:
        log(cpu.id, EventKind::SignatureReject, landing, 0);
        throw Stop{Outcome::Failure, "signature rejected: " + sig::describe(v.signature)};
      case sig::Verdict::OutOfBounds:
        log(cpu.id, EventKind::SignatureOutOfBounds, landing, static_cast<std::uint32_t>(sig::kCompareLength));
        report.aborts.push_back({landing, false});
        throw Stop{Outcome::Halt, "signature check read outside the stack: " + sig::describe(v.signature)};
    }
    if (v.first_bad_section) {
      report.bad_section = v.first_bad_section;
      log(cpu.id, EventKind::SectionHashMismatch, static_cast<std::uint32_t>(*v.first_bad_section), 0);
      throw Stop{Outcome::Failure, "section " + std::to_string(*v.first_bad_section) + " hash mismatch"};
    }
  }

  sig::StackModel boot9_stack(std::size_t bl) const { return sig::StackModel::boot9(bl, seed.derive("boot9-stack")); }

  void on_abort(Cpu& cpu, std::uint32_t fault) {
    const bool in_handler = std::any_of(cpu.frames.begin(), cpu.frames.end(),
                                        [](const Frame& f) { return f.kind == FrameKind::Handler; });
    std::uint32_t handler = 0;
    if (cpu.id == Processor::Arm9 && !in_handler &&
        get_u32(peek(addr::kDataAbortVector, 4), 0) == addr::kBranchToHandler) {
      handler = get_u32(peek(addr::kDataAbortHandler, 4), 0);
    }
    std::optional<Frame> frame;
    if (handler != 0) frame = probe_script(cpu, handler, FrameKind::Handler);
    if (!frame) {
      report.aborts.push_back({fault, false});
      log(cpu.id, EventKind::UnhandledAbort, fault, 0);
      throw Stop{Outcome::Halt, "unhandled data abort at " + hex32(fault)};
    }
    report.aborts.push_back({fault, true});
    log(cpu.id, EventKind::DataAbort, fault, 0);
    cpu.frames.push_back(*frame);
  }

  void turn(Cpu& cpu) {
    try {
      if (!cpu.frames.empty()) {
        step_script(cpu);
      } else if (cpu.id == Processor::Arm9) {
        step_boot9(cpu);
      } else {
        step_boot11(cpu);
      }
    } catch (const DataAbort& abort) {
      on_abort(cpu, abort.addr);
    }
    if (cpu.frames.empty() &&
        (cpu.id == Processor::Arm9 ? stage9 == Arm9Stage::Done : stage11 == Arm11Stage::Done)) {
      cpu.done = true;
    }
  }

  const KeyRegistry* registry = nullptr;

  BootReport run(const KeyRegistry& reg, const BootOptions& opts) {
    if (booted) throw DomainError("machine already booted; construct a new one per power-on");
    booted = true;
    registry = &reg;
    options = &opts;
    report = BootReport{};
    report.boot_source = select_boot_source(inputs);

    bool arm9_turn = false;
    try {
      for (;;) {
        if (cpu9.done && cpu11.done) {
          if (!report.reached_entry) throw Stop{Outcome::Failure, "both processors stopped before entry"};
          throw Stop{Outcome::Entry, "both processors reached their entrypoints"};
        }
        if (step >= opts.step_budget) {
          log(Processor::Arm9, EventKind::Watchdog, 0, 0);
          throw Stop{Outcome::Watchdog, "step budget of " + std::to_string(opts.step_budget) + " exhausted"};
        }
        arm9_turn = !arm9_turn;
        Cpu& cpu = (arm9_turn && !cpu9.done) || cpu11.done ? cpu9 : cpu11;
        ++step;
        turn(cpu);
      }
    } catch (const Stop& stop) {
      report.outcome = stop.outcome;
      report.message = stop.message;
    }

    for (auto* slot : {&report.boot9_protected, &report.boot11_protected}) {
      if (*slot) (*slot)->bytes = peek((*slot)->dst, static_cast<std::uint32_t>((*slot)->bytes.size()));
    }
    report.locks_final = locks;
    report.steps = step;
    report.events = events;
    registry = nullptr;
    options = nullptr;
    return report;
  }
};

Machine::Machine(const Seed& seed, Inputs inputs, Media media)
    : impl_(std::make_unique<Impl>(seed, inputs, std::move(media))) {}
Machine::~Machine() = default;
Machine::Machine(Machine&&) noexcept = default;
Machine& Machine::operator=(Machine&&) noexcept = default;

BootReport Machine::run_boot(const KeyRegistry& registry, const BootOptions& options) {
  return impl_->run(registry, options);
}

bool Machine::load_section(const firm::SectionHeader& section, std::span<const std::uint8_t> payload,
                           BlacklistPolicy policy) {
  if (payload.size() < section.size) throw DomainError("load_section: payload shorter than section size");
  return impl_->load_section(section, payload, policy);
}

const MemoryMap& Machine::memory_map() const noexcept { return impl_->map; }
const LockRegister& Machine::locks() const noexcept { return impl_->locks; }
const std::vector<Event>& Machine::events() const noexcept { return impl_->events; }
const Media& Machine::media() const noexcept { return impl_->media; }
Media Machine::take_media() { return std::move(impl_->media); }
const Inputs& Machine::inputs() const noexcept { return impl_->inputs; }

std::vector<std::uint8_t> Machine::peek(std::uint32_t addr, std::uint32_t len) const {
  return impl_->peek(addr, len);
}
void Machine::poke(std::uint32_t addr, std::span<const std::uint8_t> bytes) { impl_->poke(addr, bytes); }

sig::StackModel Machine::boot9_stack(std::size_t block_length) const { return impl_->boot9_stack(block_length); }

// ---------------------------------------------------------------------------
// Scenarios

BootReport run_boot(const Seed& machine_seed, const Inputs& inputs, std::span<const std::uint8_t> image,
                    const KeyRegistry& registry, const BootOptions& options) {
  Media media;
  media.nand[std::string(Media::kNandFirm)].assign(image.begin(), image.end());
  Machine machine(machine_seed, inputs, std::move(media));
  return machine.run_boot(registry, options);
}

ExploitRun run_exploit_chain(const Seed& machine_seed, std::span<const std::uint8_t> staged_image,
                             const std::optional<std::vector<std::uint8_t>>& second_image,
                             std::uint32_t keys_held, const KeyRegistry& registry, const BootOptions& options) {
  Media media;
  media.nand[std::string(Media::kNandFirm)].assign(staged_image.begin(), staged_image.end());
  if (second_image) media.sd["second.firm"] = *second_image;
  Inputs inputs;
  inputs.keys_held = keys_held;
  Machine machine(machine_seed, inputs, std::move(media));
  ExploitRun run;
  run.report = machine.run_boot(registry, options);
  run.media = machine.take_media();
  return run;
}

NtrInstallRun run_ntr_install_scenario(const Seed& machine_seed, std::span<const std::uint8_t> flashcart_image,
                                       Media media, const KeyRegistry& registry, const BootOptions& options,
                                       bool cart_present) {
  media.ntr_cart.emplace(flashcart_image.begin(), flashcart_image.end());
  Inputs inputs;
  inputs.keys_held = keys::kNtrBoot;
  inputs.shell_closed = true;
  inputs.ntr_cart_present = cart_present;

  NtrInstallRun run;
  {
    Machine first(machine_seed, inputs, std::move(media));
    run.install_boot = first.run_boot(registry, options);
    run.media = first.take_media();
  }
  const bool installed = std::any_of(run.install_boot.events.begin(), run.install_boot.events.end(),
                                     [](const Event& e) { return e.kind == EventKind::NandInstall; });
  if (!installed) return run;

  run.media.ntr_cart.reset();
  Machine second(machine_seed, Inputs{}, std::move(run.media));
  run.nand_boot = second.run_boot(registry, options);
  run.media = second.take_media();
  return run;
}

// ---------------------------------------------------------------------------
// Reports

namespace {

nlohmann::ordered_json exfil_json(const std::optional<Exfiltration>& x) {
  if (!x) return nullptr;
  nlohmann::ordered_json j;
  j["dst"] = x->dst;
  j["rom_offset"] = x->rom_offset;
  j["length"] = x->bytes.size();
  j["sha256"] = to_hex(Sha256::hash(x->bytes));
  return j;
}

}  // namespace

std::string to_json(const BootReport& r) {
  nlohmann::ordered_json j;
  j["boot_source"] = to_string(r.boot_source);
  j["key_slot"] = r.key_slot.label();
  if (r.signature_verdict) {
    nlohmann::ordered_json s;
    s["verdict"] = sig::to_string(r.signature_verdict->verdict);
    s["reason"] = r.signature_verdict->reason ? nlohmann::ordered_json(sig::to_string(*r.signature_verdict->reason))
                                              : nlohmann::ordered_json(nullptr);
    s["landing_offset"] = r.signature_verdict->landing_offset
                              ? nlohmann::ordered_json(*r.signature_verdict->landing_offset)
                              : nlohmann::ordered_json(nullptr);
    j["signature_verdict"] = s;
  } else {
    j["signature_verdict"] = nullptr;
  }
  j["bad_section"] = r.bad_section ? nlohmann::ordered_json(*r.bad_section) : nlohmann::ordered_json(nullptr);
  auto sections = nlohmann::ordered_json::array();
  for (const auto& s : r.sections_loaded) {
    sections.push_back({{"index", s.index}, {"phys_addr", s.phys_addr}, {"size", s.size}, {"completed", s.completed}});
  }
  j["sections_loaded"] = sections;
  auto aborts = nlohmann::ordered_json::array();
  for (const auto& a : r.aborts) aborts.push_back({{"addr", a.addr}, {"handled", a.handled}});
  j["aborts"] = aborts;
  j["exfiltrated"] = {{"boot9_protected", exfil_json(r.boot9_protected)},
                      {"boot11_protected", exfil_json(r.boot11_protected)}};
  j["reached_entry"] = r.reached_entry;
  j["arm11_reached_entry"] = r.arm11_reached_entry;
  j["locks_final"] = {{"boot9_locked", r.locks_final.boot9_locked},
                      {"boot11_locked", r.locks_final.boot11_locked},
                      {"fcram9_enabled", r.locks_final.fcram9_enabled},
                      {"fcram11_enabled", r.locks_final.fcram11_enabled}};
  j["outcome"] = to_string(r.outcome);
  j["message"] = r.message;
  j["steps"] = r.steps;
  j["event_count"] = r.events.size();
  return j.dump(2);
}

std::string format_event_log(const BootReport& report) {
  std::string out;
  for (const Event& e : report.events) {
    out += format_event(e);
    out += '\n';
  }
  return out;
}

}  // namespace bootforge::bootsim
