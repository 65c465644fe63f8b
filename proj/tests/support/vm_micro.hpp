#pragma once

// Hand-derived opcode conformance cases, shared by the vm unit tests and the
// acceptance suite. Every expected value below was worked out on paper from
// stack semantics before the interpreter was written.

#include <functional>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "llama/evmasm.hpp"
#include "llama/keccak.hpp"
#include "llama/vm/interpreter.hpp"

namespace llama::test {

using namespace llama::vm;

inline Address taddr(uint8_t n) {
  Address a;
  a.raw[19] = n;
  return a;
}

inline const Address kContract = taddr(0xC0);
inline const Address kSender = taddr(0x01);
inline const Address kOther = taddr(0x02);

struct MicroRun {
  ExecutionTrace trace;
  WorldState pre;
  WorldState post;
};

struct MicroOpts {
  bytes calldata;
  u256 value = 0;
  uint64_t gas = 100000;
  u256 contract_balance = 0;
  std::map<u256, u256> pre_storage;
  std::map<Address, bytes> extra_code;
  Environment env_patch;  // timestamp/number/overrides merged over defaults
};

inline MicroRun run_code(const bytes& code, const MicroOpts& o = {}) {
  WorldState st;
  Account& c = st.get_or_create(kContract);
  c.code = Bytecode::from(code);
  c.balance = o.contract_balance;
  c.storage = o.pre_storage;
  st.get_or_create(kSender).balance = u256(1) << 96;
  st.get_or_create(kOther).balance = u256(1) << 96;
  for (const auto& [addr, extra] : o.extra_code)
    st.get_or_create(addr).code = Bytecode::from(extra);

  Environment env = o.env_patch;
  if (env.timestamp == 0) env.timestamp = 1600000000;
  if (env.block_number == 0) env.block_number = 1000;
  env.gas_limit = o.gas;
  env.caller = kSender;
  env.call_value = o.value;

  MicroRun r;
  r.pre = st;
  auto [trace, post] = execute_transaction(st, kContract, o.calldata, env);
  r.trace = std::move(trace);
  r.post = std::move(post);
  return r;
}

// code: push(args...) op, then store the top of stack to slot 0
inline bytes unop_code(uint8_t op, const u256& a) {
  return Asm{}.push(a).op(op).push(0).op(OP_SSTORE).op(OP_STOP).build();
}
inline bytes binop_code(uint8_t op, const u256& a, const u256& b) {
  // operands pushed in reverse so `a` ends up on top
  return Asm{}.push(b).push(a).op(op).push(0).op(OP_SSTORE).op(OP_STOP).build();
}

struct MicroCase {
  std::string name;
  std::function<std::optional<std::string>()> run;
};

inline std::optional<std::string> expect_slot0(const bytes& code, const u256& want,
                                               const MicroOpts& o = {}) {
  MicroRun r = run_code(code, o);
  if (r.trace.exception != VmException::None)
    return std::string("unexpected exception ") + exception_name(r.trace.exception);
  u256 got = r.post.storage_at(kContract, 0);
  if (got != want) return "slot0 = " + u256_to_hex(got) + ", want " + u256_to_hex(want);
  return std::nullopt;
}

inline std::optional<std::string> expect_exception(const bytes& code, VmException want,
                                                   const MicroOpts& o = {}) {
  MicroRun r = run_code(code, o);
  if (r.trace.exception != want)
    return std::string("exception = ") + exception_name(r.trace.exception) + ", want " +
           exception_name(want);
  if (!(r.post.accounts == r.pre.accounts))
    return std::string("state changed despite ") + exception_name(want);
  return std::nullopt;
}

std::vector<MicroCase> vm_micro_cases();

}  // namespace llama::test
