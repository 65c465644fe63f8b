#pragma once

#include <array>
#include <cstdint>
#include <deque>
#include <set>
#include <vector>

#include "llama/types.hpp"
#include "llama/vm/trace.hpp"

namespace llama::feedback {

using SiteKey = std::pair<Address, uint32_t>;
using EdgeKey = std::tuple<Address, uint32_t, bool>;
using Selector = std::array<uint8_t, 4>;

// A read-after-write dependency established inside one sequence: some
// transaction writes (addr, slot) and a later one reads it back. The two
// selectors are part of the identity so distinct cross-function dependencies
// count separately.
struct RawKey {
  Address addr;
  u256 slot;
  Selector writer;
  Selector reader;

  auto tie() const { return std::tie(addr, slot, writer, reader); }
  bool operator<(const RawKey& o) const { return tie() < o.tie(); }
  bool operator==(const RawKey& o) const { return tie() == o.tie(); }
};

// Campaign-wide coverage; grows monotonically, merge is set union.
struct GlobalCoverage {
  std::set<SiteKey> instr_sites;
  std::set<EdgeKey> branch_edges;
  std::set<RawKey> raw_pairs;

  void merge(const GlobalCoverage& o);
  bool operator==(const GlobalCoverage&) const = default;
};

struct FitnessRecord {
  uint64_t delta_branch = 0;
  uint64_t delta_inst = 0;
  uint64_t delta_raw = 0;
  uint64_t fit = 0;  // always the sum of the three deltas

  bool operator==(const FitnessRecord&) const = default;
};

// RAW pairs of one executed sequence. Writes from transactions that ended in
// an exception are rolled back and establish nothing; reads never written
// inside the sequence are excluded.
std::set<RawKey> derive_raw_pairs(const std::vector<vm::ExecutionTrace>& traces,
                                  const std::vector<Selector>& tx_selectors);

// The three novelty signals of one seed against the campaign coverage.
// Does not mutate `global`.
FitnessRecord deltas(const std::vector<vm::ExecutionTrace>& traces,
                     const std::vector<Selector>& tx_selectors, const GlobalCoverage& global);

// Unions the traces' events into the global sets. Idempotent.
void commit(GlobalCoverage& global, const std::vector<vm::ExecutionTrace>& traces,
            const std::vector<Selector>& tx_selectors);

enum class StagnationTrigger { None, TriggerSymbolic, TriggerReinit };

// Fed the global branch-edge total once per generation. Fires TriggerSymbolic
// on <1% relative growth across a 5-generation window and TriggerReinit on
// zero absolute growth across a 10-generation window; reinit wins when both
// fire, and a fired window resets.
class StagnationDetector {
 public:
  StagnationTrigger check(uint64_t branch_total);

  static constexpr int kSymWindow = 5;
  static constexpr double kSymRelGrowth = 0.01;
  static constexpr int kReinitWindow = 10;

 private:
  std::deque<uint64_t> sym_;
  std::deque<uint64_t> reinit_;
};

}  // namespace llama::feedback
