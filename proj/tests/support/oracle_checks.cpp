#include "oracle_checks.hpp"

#include <algorithm>
#include <cmath>
#include <map>

#include "llama/abi/abi.hpp"
#include "llama/evmasm.hpp"
#include "llama/rng.hpp"
#include "llama/vm/interpreter.hpp"
#include "vm_micro.hpp"

namespace llama::test {

using corpus::PreFuzzScore;
using corpus::ScoredSeed;
using corpus::Seed;
using corpus::TopKConfig;

std::optional<std::string> check_topk_bruteforce(int instances, uint64_t rng_seed) {
  Rng rng(rng_seed);
  for (int iter = 0; iter < instances; ++iter) {
    size_t n = 1 + rng.below(200);
    TopKConfig cfg;
    cfg.rho = 0.05 + rng.unit() * 0.9;
    cfg.k_max = 1 + rng.below(64);

    std::vector<ScoredSeed> scored(n);
    for (size_t i = 0; i < n; ++i) {
      scored[i].seed.txs.push_back({"f", {std::to_string(rng.below(1u << 30))}, 0, 0, {}});
      scored[i].seed.rehash();
      scored[i].score.coverage = rng.below(50);  // small range forces score ties
      scored[i].score.exception = static_cast<int>(rng.below(2));
      scored[i].score.lambda = 0.5;
      scored[i].score.score =
          static_cast<double>(scored[i].score.coverage) + 0.5 * scored[i].score.exception;
    }

    auto got = corpus::select_top_k(scored, cfg);

    // reference: full stable sort on (score desc, id asc), take K
    std::vector<std::pair<double, std::string>> ref;
    for (const auto& s : scored) ref.push_back({s.score.score, s.seed.id});
    std::sort(ref.begin(), ref.end(), [](const auto& a, const auto& b) {
      if (a.first != b.first) return a.first > b.first;
      return a.second < b.second;
    });
    uint64_t k = std::min<uint64_t>(
        cfg.k_max, static_cast<uint64_t>(std::ceil(cfg.rho * static_cast<double>(n))));
    if (k < 1) k = 1;
    size_t want = std::min<size_t>(k, n);

    if (got.size() != want)
      return "instance " + std::to_string(iter) + ": size " + std::to_string(got.size()) +
             " want " + std::to_string(want);
    for (size_t i = 0; i < want; ++i)
      if (got[i].id != ref[i].second)
        return "instance " + std::to_string(iter) + ": rank " + std::to_string(i) +
               " id mismatch";
  }
  return std::nullopt;
}

namespace {

struct ToyContract {
  bytes code;
  std::vector<abi::FunctionDescriptor> fds;
};

// Four entry points over a small slot space:
//   w(slot,val)    write
//   r(slot)        read
//   wr(slot)       read-then-write
//   wrev(slot,val) write then revert (must establish nothing)
ToyContract storage_toy() {
  ToyContract t;
  auto fd = [&](const std::string& name, int args) {
    abi::FunctionDescriptor f;
    f.name = name;
    for (int i = 0; i < args; ++i) f.inputs.push_back(abi::AbiType::uint_t());
    f.selector = abi::selector_for(f.signature());
    t.fds.push_back(f);
    return u256_from_be(f.selector.data(), 4);
  };
  u256 sel_w = fd("w", 2), sel_r = fd("r", 1), sel_wr = fd("wr", 1), sel_wrev = fd("wrev", 2);

  Asm a;
  a.push(0).op(vm::OP_CALLDATALOAD).push(224).op(vm::OP_SHR);
  a.op(vm::OP_DUP1).push(sel_w).op(vm::OP_EQ).jumpi_to("w");
  a.op(vm::OP_DUP1).push(sel_r).op(vm::OP_EQ).jumpi_to("r");
  a.op(vm::OP_DUP1).push(sel_wr).op(vm::OP_EQ).jumpi_to("wr");
  a.op(vm::OP_DUP1).push(sel_wrev).op(vm::OP_EQ).jumpi_to("wrev");
  a.push(0).push(0).op(vm::OP_REVERT);

  a.jumpdest("w")
      .push(36).op(vm::OP_CALLDATALOAD)   // val
      .push(4).op(vm::OP_CALLDATALOAD)    // slot
      .op(vm::OP_SSTORE)
      .op(vm::OP_STOP);
  a.jumpdest("r")
      .push(4).op(vm::OP_CALLDATALOAD)
      .op(vm::OP_SLOAD).op(vm::OP_POP)
      .op(vm::OP_STOP);
  a.jumpdest("wr")
      .push(4).op(vm::OP_CALLDATALOAD)
      .op(vm::OP_SLOAD).push(1).op(vm::OP_ADD)
      .push(4).op(vm::OP_CALLDATALOAD)
      .op(vm::OP_SSTORE)
      .op(vm::OP_STOP);
  a.jumpdest("wrev")
      .push(36).op(vm::OP_CALLDATALOAD)
      .push(4).op(vm::OP_CALLDATALOAD)
      .op(vm::OP_SSTORE)
      .push(0).push(0).op(vm::OP_REVERT);
  t.code = a.build();
  return t;
}

}  // namespace

std::optional<std::string> check_raw_bruteforce(int sequences, int max_len, uint64_t rng_seed) {
  ToyContract toy = storage_toy();
  Rng rng(rng_seed);

  for (int iter = 0; iter < sequences; ++iter) {
    size_t len = 1 + rng.below(max_len);
    std::vector<vm::ExecutionTrace> traces;
    std::vector<feedback::Selector> selectors;

    vm::WorldState st;
    st.get_or_create(kContract).code = vm::Bytecode::from(toy.code);
    st.get_or_create(kSender).balance = 1000000;

    for (size_t i = 0; i < len; ++i) {
      const auto& fd = toy.fds[rng.below(toy.fds.size())];
      std::vector<abi::AbiValue> args;
      for (size_t k = 0; k < fd.inputs.size(); ++k)
        args.push_back(abi::AbiValue::of(rng.below(4)));  // slots 0..3
      bytes calldata = abi::encode_call(fd, args);

      vm::Environment env;
      env.timestamp = 1600000000 + i;
      env.block_number = 1000 + i;
      env.gas_limit = 100000;
      env.caller = kSender;
      auto [trace, post] = vm::execute_transaction(st, kContract, calldata, env);
      st = post;
      traces.push_back(std::move(trace));
      selectors.push_back(fd.selector);
    }

    feedback::GlobalCoverage fresh;
    auto rec = feedback::deltas(traces, selectors, fresh);

    // all-pairs enumerator straight off the trace events
    std::set<feedback::RawKey> expect;
    for (size_t j = 0; j < traces.size(); ++j) {
      if (traces[j].exception != vm::VmException::None) continue;
      for (const auto& w : traces[j].storage_writes) {
        for (size_t k = j + 1; k < traces.size(); ++k) {
          for (const auto& r : traces[k].storage_reads) {
            if (w.addr == r.addr && w.slot == r.slot)
              expect.insert(feedback::RawKey{w.addr, w.slot, selectors[j], selectors[k]});
          }
        }
      }
    }

    if (rec.delta_raw != expect.size())
      return "sequence " + std::to_string(iter) + ": delta_raw " +
             std::to_string(rec.delta_raw) + " want " + std::to_string(expect.size());
    if (rec.fit != rec.delta_branch + rec.delta_inst + rec.delta_raw)
      return "fit is not the sum of deltas";
  }
  return std::nullopt;
}

}  // namespace llama::test
