// Copyright 2026 The Offload Planner Authors.
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

// Offload patterns, host<->device transfer planning and directive emission.

#include <compare>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "offload/minic.hpp"

namespace offload::model {

using minic::NodeId;

// One bit per eligible loop, in loop-table order. A set bit sends that loop
// (and everything nested in it) to the device.
class OffloadPattern {
 public:
  OffloadPattern() = default;
  explicit OffloadPattern(std::vector<bool> bits) : bits_(std::move(bits)) {}
  static OffloadPattern zeros(std::size_t length) {
    return OffloadPattern(std::vector<bool>(length, false));
  }
  // Parses "0101". Throws std::invalid_argument on other characters.
  static OffloadPattern parse(std::string_view text);

  std::size_t size() const { return bits_.size(); }
  bool operator[](std::size_t i) const { return bits_[i]; }
  void set(std::size_t i, bool value) { bits_[i] = value; }
  const std::vector<bool>& bits() const { return bits_; }
  std::string to_string() const;

  bool operator==(const OffloadPattern&) const = default;
  auto operator<=>(const OffloadPattern& o) const { return bits_ <=> o.bits_; }

 private:
  std::vector<bool> bits_;
};

// Ids of the loops a pattern offloads. Throws LengthMismatch.
std::vector<NodeId> offloaded_loops(const OffloadPattern& pattern,
                                    const minic::LoopTable& loops);

struct PatternVerdict {
  bool valid = true;
  std::string reason;
  std::optional<std::pair<NodeId, NodeId>> conflict;  // (ancestor, nested)

  explicit operator bool() const { return valid; }
};

// Invalid iff an offloaded loop has an offloaded ancestor. Throws
// LengthMismatch when the pattern length differs from the gene length.
PatternVerdict validate_pattern(const OffloadPattern& pattern,
                                const minic::LoopTable& loops);

enum class Direction { HostToDevice, DeviceToHost };
enum class AnchorSide { Before, After };

struct Anchor {
  NodeId loop = 0;
  AnchorSide side = AnchorSide::Before;

  bool operator==(const Anchor&) const = default;
};

struct TransferOp {
  std::string variable;
  Direction direction = Direction::HostToDevice;
  Anchor anchor;
  NodeId region = 0;     // root loop of the offload region it serves
  bool hoisted = false;  // anchored outside an enclosing CPU loop
  std::uint64_t bytes = 0;

  bool operator==(const TransferOp&) const = default;
};

struct TransferPlan {
  std::vector<TransferOp> ops;

  bool operator==(const TransferPlan&) const = default;
};

struct PlanOptions {
  bool hoist = true;
};

// Plans copies for every offload region (an offloaded loop plus its
// subtree). Everything outside the region counts as CPU code:
//  - host->device for variables the region may read before writing them,
//    and for variables it writes only partially (arrays, conditional
//    scalars), since the copy back moves whole variables;
//  - device->host for every variable the region writes, because later CPU
//    code or the program's final output observes it;
//  - ops start at the region root and move outward one enclosing loop at a
//    time while that loop runs at least once and its CPU code neither writes
//    the variable (copy-in) nor reads or writes it (copy-out).
// Throws InvalidPattern for nested offloads and LengthMismatch.
TransferPlan plan_transfers(const minic::Ast& ast,
                            const minic::LoopTable& loops,
                            const OffloadPattern& pattern,
                            const PlanOptions& options = {});

// Transfers performed by one program run: each op fires once per entry
// into its anchor loop.
std::int64_t executed_transfer_count(const TransferPlan& plan,
                                     const minic::LoopTable& loops);

struct AnnotatedSource {
  std::string text;
};

// Inserts `#pragma acc kernels` before every offloaded loop and one
// `#pragma acc data copyin(...)` / `copyout(...)` line per anchor and
// direction. Directive lines start at column 0 so that strip_directives
// recovers the input byte for byte.
AnnotatedSource emit_annotated(const minic::Ast& ast,
                               const minic::LoopTable& loops,
                               const OffloadPattern& pattern,
                               const TransferPlan& plan);

std::string strip_directives(std::string_view text);

struct OffloadRun {
  minic::ProgramOutput output;
  std::int64_t transfers = 0;
  std::uint64_t bytes = 0;
};

// Runs the program with a separate device memory: offload regions execute
// against device memory, which is synchronized with the host only by the
// plan's transfers. Device memory starts as NaN.
OffloadRun execute_offloaded(const minic::Ast& ast,
                             const minic::LoopTable& loops,
                             const OffloadPattern& pattern,
                             const TransferPlan& plan,
                             std::uint64_t iteration_cap = 100'000'000);

}  // namespace offload::model
