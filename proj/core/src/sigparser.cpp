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

#include "bootforge/sigparser.hpp"

#include <algorithm>
#include <cstdio>
#include <sstream>

#include "bootforge/error.hpp"

namespace bootforge::sig {

namespace {

constexpr std::size_t kMinBlockLength = 8;
constexpr std::size_t kStackGap = 0x20;
constexpr std::size_t kMinStrictPadding = 8;

std::size_t find_terminator(std::span<const std::uint8_t> block) {
  for (std::size_t i = 2; i < block.size(); ++i) {
    if (block[i] == 0x00) return i;
  }
  return block.size();
}

// Byte at `offset` as the parser sees it: calculated hash overlaid on the
// stack/block image. nullopt when the offset is not modeled.
class StackView {
 public:
  StackView(std::span<const std::uint8_t> block, const StackModel& stack, const Digest& calc_hash)
      : block_(block), stack_(stack), hash_(calc_hash) {
    const std::ptrdiff_t lo = stack.first_offset();
    const std::ptrdiff_t hi = stack.end_offset(block.size());
    if (stack.calc_hash_offset < lo ||
        stack.calc_hash_offset + static_cast<std::ptrdiff_t>(kCompareLength) > hi) {
      throw DomainError("StackModel: calculated hash lies outside the modeled stack");
    }
  }

  bool mapped(std::ptrdiff_t offset, std::size_t length) const noexcept {
    return offset >= stack_.first_offset() &&
           offset + static_cast<std::ptrdiff_t>(length) <= stack_.end_offset(block_.size());
  }

  std::uint8_t at(std::ptrdiff_t offset) const {
    const std::ptrdiff_t rel = offset - stack_.calc_hash_offset;
    if (rel >= 0 && rel < static_cast<std::ptrdiff_t>(kCompareLength)) {
      return hash_[static_cast<std::size_t>(rel)];
    }
    if (offset < 0) {
      return stack_.pre_gap[stack_.pre_gap.size() - static_cast<std::size_t>(-offset)];
    }
    const auto u = static_cast<std::size_t>(offset);
    if (u < block_.size()) return block_[u];
    return stack_.post_bytes[u - block_.size()];
  }

 private:
  std::span<const std::uint8_t> block_;
  const StackModel& stack_;
  const Digest& hash_;
};

}  // namespace

// ---------------------------------------------------------------------------

PlaintextBlock::PlaintextBlock(std::vector<std::uint8_t> bytes) : bytes_(std::move(bytes)) {
  if (bytes_.size() < kMinBlockLength) {
    throw DomainError("PlaintextBlock: block shorter than " + std::to_string(kMinBlockLength) + " bytes");
  }
}

PlaintextBlock PlaintextBlock::from_value(const BigUint& value, std::size_t block_length) {
  return PlaintextBlock(value.to_bytes_be(block_length));
}

PlaintextBlock PlaintextBlock::from_signature(const BigUint& signature, const PublicKey& key) {
  return from_value(raw_verify(signature, key), key.block_length());
}

OffsetWindow OffsetWindow::range(std::ptrdiff_t first, std::ptrdiff_t last) {
  OffsetWindow w;
  w.add(first, last);
  return w;
}

OffsetWindow& OffsetWindow::add(std::ptrdiff_t first, std::ptrdiff_t last) {
  if (last < first) return *this;
  intervals_.emplace_back(first, last + 1);
  std::sort(intervals_.begin(), intervals_.end());
  std::vector<std::pair<std::ptrdiff_t, std::ptrdiff_t>> merged;
  for (const auto& iv : intervals_) {
    if (!merged.empty() && iv.first <= merged.back().second) {
      merged.back().second = std::max(merged.back().second, iv.second);
    } else {
      merged.push_back(iv);
    }
  }
  intervals_ = std::move(merged);
  return *this;
}

bool OffsetWindow::contains(std::ptrdiff_t offset) const noexcept {
  for (const auto& [lo, hi] : intervals_) {
    if (offset < lo) return false;
    if (offset < hi) return true;
  }
  return false;
}

std::size_t OffsetWindow::size() const noexcept {
  std::size_t total = 0;
  for (const auto& [lo, hi] : intervals_) total += static_cast<std::size_t>(hi - lo);
  return total;
}

ParserConfig ParserConfig::flawed(std::size_t block_length) {
  ParserConfig c;
  c.mode = ParserMode::Flawed;
  c.target_window = OffsetWindow::after_block(block_length);
  return c;
}

ParserConfig ParserConfig::boot9_full(std::size_t block_length) {
  ParserConfig c = flawed(block_length);
  c.tags = TagCheck::SequenceTags;
  return c;
}

ParserConfig ParserConfig::strict() {
  ParserConfig c;
  c.mode = ParserMode::Strict;
  return c;
}

StackModel StackModel::with_hash_at(std::size_t block_length, std::ptrdiff_t calc_hash_offset,
                                    std::size_t post_length, const Seed& fill_seed) {
  SeedStream stream(fill_seed.derive("stack"));
  StackModel s;
  s.pre_gap = stream.bytes(kStackGap);
  s.post_bytes = stream.bytes(post_length);
  s.calc_hash_offset = calc_hash_offset;
  if (calc_hash_offset < s.first_offset() ||
      calc_hash_offset + static_cast<std::ptrdiff_t>(kCompareLength) > s.end_offset(block_length)) {
    throw DomainError("StackModel: calculated hash lies outside the modeled stack");
  }
  return s;
}

StackModel StackModel::boot9(std::size_t block_length, const Seed& fill_seed) {
  return with_hash_at(block_length, static_cast<std::ptrdiff_t>(block_length),
                      kCompareLength + kStackGap, fill_seed);
}

std::string_view to_string(Verdict verdict) {
  switch (verdict) {
    case Verdict::Accept:
      return "accept";
    case Verdict::Reject:
      return "reject";
    case Verdict::OutOfBounds:
      return "out-of-bounds";
  }
  return "?";
}

std::string_view to_string(RejectReason reason) {
  switch (reason) {
    case RejectReason::BadBlockType:
      return "BadBlockType";
    case RejectReason::NoPaddingTerminator:
      return "NoPaddingTerminator";
    case RejectReason::BadAsn1:
      return "BadAsn1";
    case RejectReason::HashMismatch:
      return "HashMismatch";
    case RejectReason::PaddingNotFF:
      return "PaddingNotFF";
    case RejectReason::PaddingTooShort:
      return "PaddingTooShort";
    case RejectReason::TrailingGarbage:
      return "TrailingGarbage";
  }
  return "?";
}

std::string describe(const ParseOutcome& outcome) {
  std::string out(to_string(outcome.verdict));
  if (outcome.reason) out += "(" + std::string(to_string(*outcome.reason)) + ")";
  if (outcome.landing_offset) {
    char buf[32];
    const auto off = *outcome.landing_offset;
    std::snprintf(buf, sizeof buf, " landing=%s0x%tx", off < 0 ? "-" : "", off < 0 ? -off : off);
    out += buf;
  }
  return out;
}

// ---------------------------------------------------------------------------

FlawedWalk walk_flawed(std::span<const std::uint8_t> block, TagCheck tags) {
  FlawedWalk w;
  if (block.size() < 2 || block[0] != 0x00 || (block[1] != 0x01 && block[1] != 0x02)) {
    w.failure = RejectReason::BadBlockType;
    return w;
  }
  w.terminator = find_terminator(block);
  if (w.terminator == block.size()) {
    w.failure = RejectReason::NoPaddingTerminator;
    return w;
  }
  const std::size_t t = w.terminator;
  // Outer header (t+1, t+2) and inner header (t+3, t+4) are read from the
  // block; their lengths are never compared against anything.
  if (t + 4 >= block.size()) {
    w.failure = RejectReason::BadAsn1;
    return w;
  }
  if (tags == TagCheck::SequenceTags && (block[t + 1] != 0x30 || block[t + 3] != 0x30)) {
    w.failure = RejectReason::BadAsn1;
    return w;
  }
  const std::size_t inner_length = block[t + 4];
  w.final_header = static_cast<std::ptrdiff_t>(t + 5 + inner_length);
  w.landing = w.final_header + 2;
  return w;
}

ParseOutcome flawed_parse(const PlaintextBlock& block, const Digest& calc_hash,
                          const StackModel& stack, TagCheck tags) {
  const FlawedWalk w = walk_flawed(block.bytes(), tags);
  if (w.failure) return ParseOutcome::reject(*w.failure);

  const StackView view(block.bytes(), stack, calc_hash);
  // The final header is read (type and length both ignored) before the
  // compare; either read may fault.
  if (!view.mapped(w.final_header, 2) || !view.mapped(w.landing, kCompareLength)) {
    return ParseOutcome::out_of_bounds(w.landing);
  }
  for (std::size_t i = 0; i < kCompareLength; ++i) {
    if (view.at(w.landing + static_cast<std::ptrdiff_t>(i)) != calc_hash[i]) {
      return ParseOutcome::reject(RejectReason::HashMismatch, w.landing);
    }
  }
  return ParseOutcome::accept(w.landing);
}

ParseOutcome strict_parse(const PlaintextBlock& block, const Digest& calc_hash) {
  const auto b = block.bytes();
  const std::size_t bl = b.size();
  if (b[0] != 0x00 || b[1] != 0x01) return ParseOutcome::reject(RejectReason::BadBlockType);

  const std::size_t t = find_terminator(b);
  if (t == bl) return ParseOutcome::reject(RejectReason::NoPaddingTerminator);
  for (std::size_t i = 2; i < t; ++i) {
    if (b[i] != 0xFF) return ParseOutcome::reject(RejectReason::PaddingNotFF);
  }
  if (t - 2 < kMinStrictPadding) return ParseOutcome::reject(RejectReason::PaddingTooShort);

  // Outer SEQUENCE must span exactly the rest of the block.
  if (t + 2 >= bl || b[t + 1] != 0x30) return ParseOutcome::reject(RejectReason::BadAsn1);
  const std::size_t outer_length = b[t + 2];
  const std::size_t remaining = bl - (t + 3);
  if (outer_length < remaining) return ParseOutcome::reject(RejectReason::TrailingGarbage);
  if (outer_length > remaining) return ParseOutcome::reject(RejectReason::BadAsn1);

  // AlgorithmIdentifier, bounds-checked, then compared byte for byte.
  if (t + 4 >= bl || b[t + 3] != 0x30) return ParseOutcome::reject(RejectReason::BadAsn1);
  const std::size_t inner_length = b[t + 4];
  const std::size_t final_header = t + 5 + inner_length;
  if (final_header + 2 > bl) return ParseOutcome::reject(RejectReason::BadAsn1);
  if (!std::equal(b.begin() + static_cast<std::ptrdiff_t>(t + 1),
                  b.begin() + static_cast<std::ptrdiff_t>(final_header + 2),
                  std::begin(kSha256DigestInfo), std::end(kSha256DigestInfo))) {
    return ParseOutcome::reject(RejectReason::BadAsn1);
  }

  const std::size_t landing = final_header + 2;
  if (landing + kCompareLength < bl) return ParseOutcome::reject(RejectReason::TrailingGarbage);
  if (landing + kCompareLength > bl) return ParseOutcome::reject(RejectReason::BadAsn1);
  const auto where = static_cast<std::ptrdiff_t>(landing);
  if (!std::equal(calc_hash.begin(), calc_hash.end(), b.begin() + where)) {
    return ParseOutcome::reject(RejectReason::HashMismatch, where);
  }
  return ParseOutcome::accept(where);
}

ParseOutcome parse(const PlaintextBlock& block, const Digest& calc_hash, const StackModel& stack,
                   const ParserConfig& config) {
  if (config.mode == ParserMode::Strict) return strict_parse(block, calc_hash);
  return flawed_parse(block, calc_hash, stack, config.tags);
}

std::optional<std::ptrdiff_t> classify_plaintext(std::span<const std::uint8_t> block,
                                                 const ParserConfig& config) {
  if (config.target_window.empty()) return std::nullopt;
  const FlawedWalk w = walk_flawed(block, config.tags);
  if (w.failure || !config.target_window.contains(w.landing)) return std::nullopt;
  return w.landing;
}

PlaintextBlock honest_plaintext(std::size_t block_length, const Digest& hash) {
  const std::size_t tail = sizeof kSha256DigestInfo + hash.size();
  if (block_length < tail + 3 + kMinStrictPadding) {
    throw DomainError("honest_plaintext: block too short for a SHA-256 DigestInfo");
  }
  std::vector<std::uint8_t> out(block_length, 0xFF);
  out[0] = 0x00;
  out[1] = 0x01;
  const std::size_t t = block_length - tail - 1;
  out[t] = 0x00;
  std::copy(std::begin(kSha256DigestInfo), std::end(kSha256DigestInfo), out.begin() + static_cast<std::ptrdiff_t>(t + 1));
  std::copy(hash.begin(), hash.end(), out.end() - static_cast<std::ptrdiff_t>(hash.size()));
  return PlaintextBlock(std::move(out));
}

std::string render_annotated(const PlaintextBlock& block, TagCheck tags) {
  const auto b = block.bytes();
  std::string legend(b.size(), '.');
  const FlawedWalk w = walk_flawed(b, tags);
  if (b.size() >= 2 && b[0] == 0x00) {
    legend[0] = 'F';
    legend[1] = 'F';
  }
  if (!w.failure || w.failure != RejectReason::BadBlockType) {
    const std::size_t pad_end = std::min(w.terminator, b.size() - 1);
    for (std::size_t i = 2; i <= pad_end && w.terminator != 0; ++i) legend[i] = 'P';
  }
  auto mark = [&](std::ptrdiff_t at, char c) {
    if (at >= 0 && static_cast<std::size_t>(at) < b.size()) legend[static_cast<std::size_t>(at)] = c;
  };
  if (!w.failure) {
    const auto t = static_cast<std::ptrdiff_t>(w.terminator);
    mark(t + 1, 'T');
    mark(t + 2, 'L');
    mark(t + 3, 'T');
    mark(t + 4, 'L');
    for (std::ptrdiff_t i = t + 5; i < w.final_header; ++i) mark(i, 'A');
    mark(w.final_header, 'T');
    mark(w.final_header + 1, 'L');
    for (std::ptrdiff_t i = 0; i < static_cast<std::ptrdiff_t>(kCompareLength); ++i) mark(w.landing + i, 'H');
  }

  std::ostringstream out;
  char buf[32];
  for (std::size_t row = 0; row < b.size(); row += 16) {
    std::snprintf(buf, sizeof buf, "%06zx  ", row);
    out << buf;
    const std::size_t end = std::min(row + 16, b.size());
    for (std::size_t i = row; i < row + 16; ++i) {
      if (i < end) {
        std::snprintf(buf, sizeof buf, "%02x ", b[i]);
        out << buf;
      } else {
        out << "   ";
      }
    }
    out << ' ' << legend.substr(row, end - row) << '\n';
  }
  out << "legend: F flag byte  P padding  T ASN.1 type field  L ASN.1 length field"
         "  A added length  H embedded hash  . other\n";
  if (w.failure) {
    out << "walk: " << to_string(*w.failure) << '\n';
  } else {
    const std::ptrdiff_t past = w.landing - static_cast<std::ptrdiff_t>(b.size());
    std::snprintf(buf, sizeof buf, "0x%tx", w.landing);
    out << "landing offset " << buf;
    if (past >= 0) {
      std::snprintf(buf, sizeof buf, "0x%tx", past);
      out << " (block end + " << buf << "): compared against stack memory";
    } else {
      out << " (inside block)";
    }
    out << '\n';
  }
  return out.str();
}

}  // namespace bootforge::sig
