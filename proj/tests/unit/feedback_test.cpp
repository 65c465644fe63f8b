#include "doctest.h"
#include "llama/feedback/coverage.hpp"
#include "llama/rng.hpp"
#include "oracle_checks.hpp"
#include "vm_micro.hpp"

using namespace llama;
using namespace llama::feedback;
using namespace llama::test;

namespace {

Selector sel(uint8_t n) { return {n, 0, 0, 0}; }

vm::ExecutionTrace trace_with(std::vector<uint32_t> site_pcs,
                              std::vector<std::pair<uint32_t, bool>> edges) {
  vm::ExecutionTrace t;
  for (auto pc : site_pcs) t.instr_sites.push_back({kContract, pc, 0x01});
  for (auto [pc, taken] : edges) t.branch_edges.push_back({kContract, pc, taken});
  return t;
}

}  // namespace

TEST_CASE("deltas sum per the fitness formula") {
  // 12 new sites, 3 new edges, plus 1 RAW pair -> fit 16
  vm::ExecutionTrace t1 = trace_with({0, 1, 2, 3, 4, 5, 6, 7, 8, 9, 10, 11},
                                     {{3, true}, {3, false}, {7, true}});
  t1.storage_writes.push_back({0, kContract, 5});
  vm::ExecutionTrace t2;
  t2.storage_reads.push_back({0, kContract, 5});

  GlobalCoverage fresh;
  auto rec = deltas({t1, t2}, {sel(1), sel(2)}, fresh);
  CHECK(rec.delta_inst == 12);
  CHECK(rec.delta_branch == 3);
  CHECK(rec.delta_raw == 1);
  CHECK(rec.fit == 16);

  // deltas must not touch the global
  CHECK(fresh == GlobalCoverage{});

  // after a commit, replaying the same seed scores zero
  commit(fresh, {t1, t2}, {sel(1), sel(2)});
  auto rec2 = deltas({t1, t2}, {sel(1), sel(2)}, fresh);
  CHECK(rec2.fit == 0);
}

TEST_CASE("raw pair rules") {
  // write in tx0, read in tx1 -> one pair
  vm::ExecutionTrace w, r;
  w.storage_writes.push_back({0, kContract, 0});
  r.storage_reads.push_back({0, kContract, 0});
  CHECK(derive_raw_pairs({w, r}, {sel(1), sel(2)}).size() == 1);

  // read before write establishes nothing
  CHECK(derive_raw_pairs({r, w}, {sel(2), sel(1)}).empty());

  // reverted writer establishes nothing
  vm::ExecutionTrace wrev = w;
  wrev.exception = vm::VmException::Revert;
  CHECK(derive_raw_pairs({wrev, r}, {sel(1), sel(2)}).empty());

  // reads of slots never written in-sequence are excluded
  vm::ExecutionTrace r9;
  r9.storage_reads.push_back({0, kContract, 9});
  CHECK(derive_raw_pairs({w, r9}, {sel(1), sel(2)}).empty());

  // selector-qualified identity: two writers with different selectors, same slot
  CHECK(derive_raw_pairs({w, w, r}, {sel(1), sel(3), sel(2)}).size() == 2);
}

TEST_CASE("delta_raw equals the all-pairs enumerator") {
  auto err = check_raw_bruteforce(120, 6, 0x4A50);
  CHECK_MESSAGE(!err, err.value_or(""));
}

TEST_CASE("commit is idempotent and order-independent") {
  vm::ExecutionTrace a = trace_with({1, 2}, {{2, true}});
  vm::ExecutionTrace b = trace_with({3}, {{2, false}});

  GlobalCoverage g1, g2;
  commit(g1, {a}, {sel(1)});
  commit(g1, {a}, {sel(1)});
  commit(g2, {a}, {sel(1)});
  CHECK(g1 == g2);

  GlobalCoverage ab, ba;
  commit(ab, {a}, {sel(1)});
  commit(ab, {b}, {sel(2)});
  commit(ba, {b}, {sel(2)});
  commit(ba, {a}, {sel(1)});
  CHECK(ab == ba);

  GlobalCoverage before = ab;
  commit(ab, {}, {});
  CHECK(ab == before);
}

TEST_CASE("merge is commutative and associative") {
  Rng rng(11);
  auto random_cov = [&] {
    GlobalCoverage g;
    for (int i = 0; i < 20; ++i) {
      g.instr_sites.insert({kContract, static_cast<uint32_t>(rng.below(40))});
      g.branch_edges.insert({kContract, static_cast<uint32_t>(rng.below(10)), rng.below(2) == 1});
    }
    return g;
  };
  for (int i = 0; i < 30; ++i) {
    GlobalCoverage a = random_cov(), b = random_cov(), c = random_cov();
    GlobalCoverage ab = a, ba = b;
    ab.merge(b);
    ba.merge(a);
    CHECK(ab == ba);
    GlobalCoverage abc1 = a, bc = b;
    bc.merge(c);
    abc1.merge(bc);
    GlobalCoverage abc2 = a;
    abc2.merge(b);
    abc2.merge(c);
    CHECK(abc1 == abc2);
  }
}

TEST_CASE("fit is antitone in the global sets") {
  Rng rng(12);
  for (int i = 0; i < 50; ++i) {
    vm::ExecutionTrace t = trace_with({static_cast<uint32_t>(rng.below(20)),
                                       static_cast<uint32_t>(rng.below(20)),
                                       static_cast<uint32_t>(rng.below(20))},
                                      {{static_cast<uint32_t>(rng.below(5)), true}});
    GlobalCoverage small, big;
    for (int k = 0; k < 5; ++k)
      small.instr_sites.insert({kContract, static_cast<uint32_t>(rng.below(20))});
    big = small;
    for (int k = 0; k < 10; ++k)
      big.instr_sites.insert({kContract, static_cast<uint32_t>(rng.below(20))});
    big.branch_edges.insert({kContract, 0, true});

    auto f_small = deltas({t}, {sel(1)}, small);
    auto f_big = deltas({t}, {sel(1)}, big);
    CHECK(f_big.fit <= f_small.fit);
  }
}

TEST_CASE("stagnation triggers") {
  SUBCASE("flat totals fire symbolic after five stagnant generations") {
    StagnationDetector d;
    // baseline + 4 flat generations: nothing yet
    for (int i = 0; i < 5; ++i) CHECK(d.check(100) == StagnationTrigger::None);
    // fifth flat generation: 0% < 1%
    CHECK(d.check(100) == StagnationTrigger::TriggerSymbolic);
  }
  SUBCASE("2% growth per generation never fires") {
    StagnationDetector d;
    uint64_t total = 1000;
    for (int i = 0; i < 30; ++i) {
      CHECK(d.check(total) == StagnationTrigger::None);
      total += total / 50;  // +2%
    }
  }
  SUBCASE("ten flat generations after a symbolic trigger fire reinit") {
    StagnationDetector d;
    std::vector<StagnationTrigger> fired;
    for (int i = 0; i < 11; ++i) fired.push_back(d.check(100));
    // gen 5 (index 5): symbolic; gen 10 (index 10): reinit
    CHECK(fired[5] == StagnationTrigger::TriggerSymbolic);
    CHECK(fired[10] == StagnationTrigger::TriggerReinit);
    for (int i : {0, 1, 2, 3, 4, 6, 7, 8, 9})
      CHECK(fired[i] == StagnationTrigger::None);
  }
  SUBCASE("windows reset after firing") {
    StagnationDetector d;
    for (int i = 0; i < 6; ++i) d.check(100);
    // after the symbolic fire the window restarts: five more flat gens to re-fire
    for (int i = 0; i < 4; ++i) CHECK(d.check(100) == StagnationTrigger::None);
    // the 11th flat call hits the reinit window first
    CHECK(d.check(100) == StagnationTrigger::TriggerReinit);
  }
}
