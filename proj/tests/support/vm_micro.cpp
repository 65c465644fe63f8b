#include "vm_micro.hpp"

namespace llama::test {

namespace {

const u256 kMax = u256_max();

std::optional<std::string> ok() { return std::nullopt; }

std::optional<std::string> fail(const std::string& why) { return why; }

// Exact instruction-site comparison for the hand-traced programs.
std::optional<std::string> expect_sites(const ExecutionTrace& t,
                                        const std::vector<std::pair<uint32_t, uint8_t>>& want) {
  if (t.instr_sites.size() != want.size())
    return fail("site count " + std::to_string(t.instr_sites.size()) + ", want " +
                std::to_string(want.size()));
  for (size_t i = 0; i < want.size(); ++i) {
    if (t.instr_sites[i].pc != want[i].first || t.instr_sites[i].opcode != want[i].second)
      return fail("site " + std::to_string(i) + " = (" + std::to_string(t.instr_sites[i].pc) +
                  "," + opcode_name(t.instr_sites[i].opcode) + ")");
  }
  return ok();
}

}  // namespace

std::vector<MicroCase> vm_micro_cases() {
  std::vector<MicroCase> cases;
  auto add = [&](std::string name, std::function<std::optional<std::string>()> f) {
    cases.push_back({std::move(name), std::move(f)});
  };

  // --- arithmetic, hand-derived ---
  add("add", [] { return expect_slot0(binop_code(OP_ADD, 3, 4), 7); });
  add("add_wrap", [] { return expect_slot0(binop_code(OP_ADD, kMax, 1), 0); });
  add("sub", [] { return expect_slot0(binop_code(OP_SUB, 10, 3), 7); });
  add("sub_wrap", [] { return expect_slot0(binop_code(OP_SUB, 0, 1), kMax); });
  add("mul", [] { return expect_slot0(binop_code(OP_MUL, 7, 6), 42); });
  add("mul_wrap", [] {
    return expect_slot0(binop_code(OP_MUL, u256(1) << 128, u256(1) << 128), 0);
  });
  add("div", [] { return expect_slot0(binop_code(OP_DIV, 42, 5), 8); });
  add("div_by_zero", [] { return expect_slot0(binop_code(OP_DIV, 42, 0), 0); });
  add("sdiv_neg", [] {
    // -8 / 2 = -4 in two's complement
    u256 neg8 = ~u256(8) + 1, neg4 = ~u256(4) + 1;
    return expect_slot0(binop_code(OP_SDIV, neg8, 2), neg4);
  });
  add("sdiv_by_zero", [] { return expect_slot0(binop_code(OP_SDIV, 42, 0), 0); });
  add("mod", [] { return expect_slot0(binop_code(OP_MOD, 10, 3), 1); });
  add("mod_by_zero", [] { return expect_slot0(binop_code(OP_MOD, 10, 0), 0); });
  add("exp", [] { return expect_slot0(binop_code(OP_EXP, 2, 10), 1024); });
  add("exp_wrap", [] { return expect_slot0(binop_code(OP_EXP, 2, 256), 0); });

  // --- comparison / bitwise ---
  add("lt", [] { return expect_slot0(binop_code(OP_LT, 1, 2), 1); });
  add("gt", [] { return expect_slot0(binop_code(OP_GT, 1, 2), 0); });
  add("slt_neg", [] { return expect_slot0(binop_code(OP_SLT, kMax /*-1*/, 0), 1); });
  add("sgt_neg", [] { return expect_slot0(binop_code(OP_SGT, 0, kMax /*-1*/), 1); });
  add("eq", [] { return expect_slot0(binop_code(OP_EQ, 5, 5), 1); });
  add("iszero", [] { return expect_slot0(unop_code(OP_ISZERO, 0), 1); });
  add("and_or_xor", [] {
    if (auto e = expect_slot0(binop_code(OP_AND, 0xF0, 0x0F), 0)) return e;
    if (auto e = expect_slot0(binop_code(OP_OR, 0xF0, 0x0F), 0xFF)) return e;
    return expect_slot0(binop_code(OP_XOR, 0xFF, 0x0F), 0xF0);
  });
  add("not", [] { return expect_slot0(unop_code(OP_NOT, 0), kMax); });
  add("byte", [] {
    if (auto e = expect_slot0(binop_code(OP_BYTE, 31, 0xff), 0xff)) return e;
    return expect_slot0(binop_code(OP_BYTE, 0, 0xff), 0);
  });
  add("shl_shr", [] {
    if (auto e = expect_slot0(binop_code(OP_SHL, 4, 1), 16)) return e;
    if (auto e = expect_slot0(binop_code(OP_SHR, 4, 16), 1)) return e;
    return expect_slot0(binop_code(OP_SHL, 256, 1), 0);
  });

  // --- keccak ---
  add("keccak_empty", [] {
    bytes code = Asm{}.push(0).push(0).op(OP_KECCAK256).push(0).op(OP_SSTORE).op(OP_STOP).build();
    return expect_slot0(code, u256_from_string(
        "0xc5d2460186f7233c927e7db2dcc703c0e500b653ca82273b7bfad8045d85a470"));
  });
  add("keccak_word", [] {
    // keccak over one zero word in memory must match the library hash
    bytes code =
        Asm{}.push(32).push(0).op(OP_KECCAK256).push(0).op(OP_SSTORE).op(OP_STOP).build();
    return expect_slot0(code, keccak256_u256(bytes(32, 0)));
  });

  // --- environment ---
  add("address_caller_origin", [] {
    bytes code = Asm{}
                     .op(OP_ADDRESS).push(0).op(OP_SSTORE)
                     .op(OP_CALLER).push(1).op(OP_SSTORE)
                     .op(OP_ORIGIN).push(2).op(OP_SSTORE)
                     .op(OP_STOP).build();
    MicroRun r = run_code(code);
    if (r.post.storage_at(kContract, 0) != address_to_u256(kContract)) return fail("ADDRESS");
    if (r.post.storage_at(kContract, 1) != address_to_u256(kSender)) return fail("CALLER");
    if (r.post.storage_at(kContract, 2) != address_to_u256(kSender)) return fail("ORIGIN");
    return ok();
  });
  add("callvalue", [] {
    bytes code = Asm{}.op(OP_CALLVALUE).push(0).op(OP_SSTORE).op(OP_STOP).build();
    MicroOpts o;
    o.value = 12345;
    return expect_slot0(code, 12345, o);
  });
  add("calldataload", [] {
    bytes code = Asm{}.push(0).op(OP_CALLDATALOAD).push(0).op(OP_SSTORE).op(OP_STOP).build();
    MicroOpts o;
    o.calldata = bytes(32, 0);
    o.calldata[31] = 9;
    return expect_slot0(code, 9, o);
  });
  add("calldataload_pastend_zero", [] {
    bytes code = Asm{}.push(64).op(OP_CALLDATALOAD).push(0).op(OP_SSTORE).op(OP_STOP).build();
    MicroOpts o;
    o.calldata = bytes(4, 0xff);
    return expect_slot0(code, 0, o);
  });
  add("calldatasize_copy", [] {
    // copy 4 calldata bytes to mem[0..4), load the word, store
    bytes code = Asm{}
                     .op(OP_CALLDATASIZE).push(1).op(OP_SSTORE)
                     .push(4).push(0).push(0).op(OP_CALLDATACOPY)
                     .push(0).op(OP_MLOAD).push(0).op(OP_SSTORE)
                     .op(OP_STOP).build();
    MicroOpts o;
    o.calldata = {0xde, 0xad, 0xbe, 0xef};
    MicroRun r = run_code(code, o);
    if (r.post.storage_at(kContract, 1) != 4) return fail("CALLDATASIZE");
    if (r.post.storage_at(kContract, 0) != u256_from_string("0xdeadbeef") << (28 * 8))
      return fail("CALLDATACOPY word");
    return ok();
  });
  add("balance_self", [] {
    bytes code =
        Asm{}.op(OP_ADDRESS).op(OP_BALANCE).push(0).op(OP_SSTORE).op(OP_STOP).build();
    MicroOpts o;
    o.contract_balance = 777;
    return expect_slot0(code, 777, o);
  });
  add("timestamp_number_gaslimit", [] {
    bytes code = Asm{}
                     .op(OP_TIMESTAMP).push(0).op(OP_SSTORE)
                     .op(OP_NUMBER).push(1).op(OP_SSTORE)
                     .op(OP_GASLIMIT).push(2).op(OP_SSTORE)
                     .op(OP_STOP).build();
    MicroRun r = run_code(code);
    if (r.post.storage_at(kContract, 0) != 1600000000) return fail("TIMESTAMP");
    if (r.post.storage_at(kContract, 1) != 1000) return fail("NUMBER");
    if (r.post.storage_at(kContract, 2) != 100000) return fail("GASLIMIT");
    return ok();
  });
  add("pc", [] {
    bytes code = Asm{}.op(OP_PC).push(0).op(OP_SSTORE).op(OP_STOP).build();
    return expect_slot0(code, 0);
  });
  add("gas_decreases", [] {
    // GAS after 1 op vs after 3 more ops: strictly smaller
    bytes code = Asm{}
                     .op(OP_GAS).push(0).op(OP_SSTORE)
                     .op(OP_GAS).push(1).op(OP_SSTORE)
                     .op(OP_STOP).build();
    MicroRun r = run_code(code);
    if (!(r.post.storage_at(kContract, 1) < r.post.storage_at(kContract, 0)))
      return fail("gas did not decrease");
    return ok();
  });

  // --- memory ---
  add("mstore_mload", [] {
    bytes code = Asm{}
                     .push(0xabcd).push(64).op(OP_MSTORE)
                     .push(64).op(OP_MLOAD).push(0).op(OP_SSTORE)
                     .op(OP_STOP).build();
    return expect_slot0(code, 0xabcd);
  });
  add("mstore8", [] {
    bytes code = Asm{}
                     .push(0xff).push(0).op(OP_MSTORE8)
                     .push(0).op(OP_MLOAD).push(0).op(OP_SSTORE)
                     .op(OP_STOP).build();
    return expect_slot0(code, u256(0xff) << 248);
  });
  add("memory_cap_oog", [] {
    bytes code = Asm{}.push(u256(1) << 30).op(OP_MLOAD).op(OP_STOP).build();
    return expect_exception(code, VmException::OutOfGas);
  });

  // --- storage ---
  add("sstore_spec_example", [] {
    // PUSH1 0x2A; PUSH1 0x00; SSTORE; STOP -> storage[0]=42, one write event
    bytes code = {0x60, 0x2A, 0x60, 0x00, 0x55, 0x00};
    MicroRun r = run_code(code);
    if (r.trace.exception != VmException::None) return fail("exception");
    if (r.post.storage_at(kContract, 0) != 42) return fail("slot0 != 42");
    if (r.trace.storage_writes.size() != 1) return fail("want exactly one write event");
    if (r.trace.storage_writes[0].addr != kContract || r.trace.storage_writes[0].slot != 0)
      return fail("write event fields");
    return expect_sites(r.trace, {{0, 0x60}, {2, 0x60}, {4, OP_SSTORE}, {5, OP_STOP}});
  });
  add("sload_preset", [] {
    bytes code = Asm{}.push(7).op(OP_SLOAD).push(0).op(OP_SSTORE).op(OP_STOP).build();
    MicroOpts o;
    o.pre_storage[7] = 99;
    return expect_slot0(code, 99, o);
  });

  // --- control flow ---
  add("stop_only", [] {
    // spec example: single STOP, one instruction site, state unchanged
    MicroRun r = run_code({0x00});
    if (r.trace.exception != VmException::None) return fail("exception");
    if (!(r.post.accounts == r.pre.accounts)) return fail("state changed");
    return expect_sites(r.trace, {{0, OP_STOP}});
  });
  add("jump", [] {
    bytes code = Asm{}
                     .jump_to("target")
                     .op(OP_INVALID)
                     .jumpdest("target")
                     .push(1).push(0).op(OP_SSTORE).op(OP_STOP)
                     .build();
    return expect_slot0(code, 1);
  });
  add("jumpi_taken_and_fallthrough", [] {
    bytes code = Asm{}
                     .push(1).jumpi_to("t")
                     .op(OP_INVALID)
                     .jumpdest("t")
                     .push(0).jumpi_to("t2")
                     .push(5).push(0).op(OP_SSTORE)
                     .op(OP_STOP)
                     .jumpdest("t2")
                     .op(OP_INVALID)
                     .build();
    MicroRun r = run_code(code);
    if (r.post.storage_at(kContract, 0) != 5) return fail("wrong path");
    if (r.trace.branch_edges.size() != 2) return fail("want 2 branch edges");
    if (!r.trace.branch_edges[0].taken || r.trace.branch_edges[1].taken)
      return fail("taken flags wrong");
    return ok();
  });
  add("jump_bad_dest", [] {
    bytes code = Asm{}.push(3).op(OP_JUMP).op(OP_STOP).build();
    return expect_exception(code, VmException::InvalidOp);
  });
  add("jump_into_push_immediate", [] {
    // 0x5b byte hidden inside a PUSH2 immediate is not a valid target
    bytes code = Asm{}.push(4).op(OP_JUMP).push_n(2, 0x5b5b).op(OP_STOP).build();
    return expect_exception(code, VmException::InvalidOp);
  });
  add("revert_rolls_back", [] {
    // spec example: storage write then PUSH1 0; PUSH1 0; REVERT -> pre-state
    bytes code = Asm{}
                     .push(42).push(0).op(OP_SSTORE)
                     .push(0).push(0).op(OP_REVERT)
                     .build();
    return expect_exception(code, VmException::Revert);
  });
  add("invalid_is_assertfail", [] {
    bytes code = Asm{}.push(1).push(0).op(OP_SSTORE).op(OP_INVALID).build();
    return expect_exception(code, VmException::AssertFail);
  });
  add("stack_underflow", [] {
    return expect_exception({OP_ADD}, VmException::StackErr);
  });
  add("stack_overflow", [] {
    Asm a;
    a.jumpdest("loop").push(1).jump_to("loop");
    return expect_exception(a.build(), VmException::StackErr);
  });
  add("implicit_stop_at_code_end", [] {
    bytes code = Asm{}.push(1).push(0).op(OP_SSTORE).build();  // no STOP
    return expect_slot0(code, 1);
  });

  // --- gas ---
  add("out_of_gas", [] {
    MicroOpts o;
    o.gas = 3;
    bytes code = Asm{}.push(1).push(2).op(OP_ADD).op(OP_POP).op(OP_STOP).build();
    MicroRun r = run_code(code, o);
    if (r.trace.exception != VmException::OutOfGas) return fail("want OutOfGas");
    if (r.trace.instr_sites.size() != 4) return fail("faulting op must be recorded");
    return ok();
  });
  add("gas_exact_boundary", [] {
    // PUSH1 PUSH1 ADD POP STOP = 5 ops at 1 gas each
    MicroOpts o;
    o.gas = 5;
    bytes code = Asm{}.push(1).push(2).op(OP_ADD).op(OP_POP).op(OP_STOP).build();
    MicroRun r = run_code(code, o);
    if (r.trace.exception != VmException::None) return fail("should fit exactly");
    if (r.trace.gas_used != 5) return fail("gas_used " + std::to_string(r.trace.gas_used));
    return ok();
  });
  add("gas_sstore_cost", [] {
    // PUSH1 PUSH1 SSTORE STOP = 1+1+100+1
    bytes code = {0x60, 0x01, 0x60, 0x00, 0x55, 0x00};
    MicroRun r = run_code(code);
    if (r.trace.gas_used != 103) return fail("gas_used " + std::to_string(r.trace.gas_used));
    return ok();
  });

  // --- calls ---
  add("call_codeless_transfers", [] {
    // CALL(gas, kOther, 5, 0,0, 0,0) from a funded contract
    bytes code = Asm{}
                     .push(0).push(0).push(0).push(0).push(5)
                     .push(address_to_u256(kOther)).push(1000).op(OP_CALL)
                     .push(0).op(OP_SSTORE).op(OP_STOP)
                     .build();
    MicroOpts o;
    o.contract_balance = 10;
    MicroRun r = run_code(code, o);
    if (r.post.storage_at(kContract, 0) != 1) return fail("status != 1");
    if (r.post.balance(kOther) != (u256(1) << 96) + 5) return fail("value not transferred");
    if (r.trace.external_calls.size() != 1 || !r.trace.external_calls[0].success)
      return fail("call event");
    if (r.trace.ether_transfers.empty()) return fail("no transfer event");
    return ok();
  });
  add("call_insufficient_balance", [] {
    bytes code = Asm{}
                     .push(0).push(0).push(0).push(0).push(5)
                     .push(address_to_u256(kOther)).push(1000).op(OP_CALL)
                     .push(0).op(OP_SSTORE).op(OP_STOP)
                     .build();
    MicroRun r = run_code(code);  // zero contract balance
    if (r.post.storage_at(kContract, 0) != 0) return fail("status != 0");
    return ok();
  });
  add("nested_call_stores", [] {
    bytes callee = Asm{}.push(11).push(3).op(OP_SSTORE).op(OP_STOP).build();
    bytes code = Asm{}
                     .push(0).push(0).push(0).push(0).push(0)
                     .push(address_to_u256(kOther)).push(10000).op(OP_CALL)
                     .push(0).op(OP_SSTORE).op(OP_STOP)
                     .build();
    MicroOpts o;
    o.extra_code[kOther] = callee;
    MicroRun r = run_code(code, o);
    if (r.post.storage_at(kOther, 3) != 11) return fail("callee storage");
    if (r.post.storage_at(kContract, 0) != 1) return fail("status");
    if (r.trace.max_call_depth != 2) return fail("depth");
    return ok();
  });
  add("nested_revert_rolls_back_callee_only", [] {
    bytes callee =
        Asm{}.push(11).push(3).op(OP_SSTORE).push(0).push(0).op(OP_REVERT).build();
    bytes code = Asm{}
                     .push(0).push(0).push(0).push(0).push(0)
                     .push(address_to_u256(kOther)).push(10000).op(OP_CALL)
                     .push(0).op(OP_SSTORE).op(OP_STOP)
                     .build();
    MicroOpts o;
    o.extra_code[kOther] = callee;
    MicroRun r = run_code(code, o);
    if (r.trace.exception != VmException::None) return fail("outer must succeed");
    if (r.post.storage_at(kOther, 3) != 0) return fail("callee write not rolled back");
    if (r.post.storage_at(kContract, 0) != 0) return fail("status must be 0");
    // the rolled-back write event must be gone, the failed call event kept
    if (!r.trace.storage_writes.empty() &&
        r.trace.storage_writes[0].addr == kOther)
      return fail("reverted write event survived");
    if (r.trace.external_calls.size() != 1 || r.trace.external_calls[0].success)
      return fail("call event");
    return ok();
  });
  add("call_depth_cap", [] {
    // unconditional self-call; the cap fails the 64th nested call, everything unwinds fine
    bytes code = Asm{}
                     .push(0).push(0).push(0).push(0).push(0)
                     .push(address_to_u256(kContract)).push(100000).op(OP_CALL)
                     .op(OP_POP).op(OP_STOP)
                     .build();
    MicroOpts o;
    o.gas = 100000;
    MicroRun r = run_code(code, o);
    if (r.trace.exception != VmException::None) return fail("should unwind cleanly");
    if (r.trace.max_call_depth != 64)
      return fail("max depth " + std::to_string(r.trace.max_call_depth));
    return ok();
  });
  add("delegatecall_uses_caller_storage", [] {
    bytes lib = Asm{}.push(77).push(9).op(OP_SSTORE).op(OP_STOP).build();
    bytes code = Asm{}
                     .push(0).push(0).push(0).push(0)
                     .push(address_to_u256(kOther)).push(10000).op(OP_DELEGATECALL)
                     .push(0).op(OP_SSTORE).op(OP_STOP)
                     .build();
    MicroOpts o;
    o.extra_code[kOther] = lib;
    MicroRun r = run_code(code, o);
    if (r.post.storage_at(kContract, 9) != 77) return fail("write must land in caller");
    if (r.post.storage_at(kOther, 9) != 0) return fail("callee storage must stay clean");
    return ok();
  });
  add("staticcall_blocks_writes", [] {
    bytes callee = Asm{}.push(1).push(0).op(OP_SSTORE).op(OP_STOP).build();
    bytes code = Asm{}
                     .push(0).push(0).push(0).push(0)
                     .push(address_to_u256(kOther)).push(10000).op(OP_STATICCALL)
                     .push(0).op(OP_SSTORE).op(OP_STOP)
                     .build();
    MicroOpts o;
    o.extra_code[kOther] = callee;
    MicroRun r = run_code(code, o);
    if (r.post.storage_at(kContract, 0) != 0) return fail("static write must fail the callee");
    if (r.post.storage_at(kOther, 0) != 0) return fail("write leaked");
    return ok();
  });
  add("return_data_flows_back", [] {
    bytes callee = Asm{}.push(0x31).push(0).op(OP_MSTORE).push(32).push(0).op(OP_RETURN).build();
    bytes code = Asm{}
                     .push(32).push(0).push(0).push(0)
                     .push(address_to_u256(kOther)).push(10000).op(OP_STATICCALL)
                     .op(OP_POP)
                     .op(OP_RETURNDATASIZE).push(1).op(OP_SSTORE)
                     .push(0).op(OP_MLOAD).push(0).op(OP_SSTORE)
                     .op(OP_STOP)
                     .build();
    MicroOpts o;
    o.extra_code[kOther] = callee;
    MicroRun r = run_code(code, o);
    if (r.post.storage_at(kContract, 1) != 32) return fail("RETURNDATASIZE");
    if (r.post.storage_at(kContract, 0) != 0x31) return fail("returned word");
    return ok();
  });
  add("selfdestruct_sweeps", [] {
    bytes code = Asm{}.push(address_to_u256(kOther)).op(OP_SELFDESTRUCT).build();
    MicroOpts o;
    o.contract_balance = 500;
    MicroRun r = run_code(code, o);
    if (r.trace.exception != VmException::None) return fail("exception");
    if (r.post.balance(kOther) != (u256(1) << 96) + 500) return fail("sweep");
    if (r.post.balance(kContract) != 0) return fail("balance left");
    if (r.trace.selfdestructs.size() != 1) return fail("event");
    return ok();
  });
  add("extcodesize_and_override", [] {
    bytes callee = Asm{}.op(OP_STOP).build();
    bytes code = Asm{}
                     .push(address_to_u256(kOther)).op(OP_EXTCODESIZE)
                     .push(0).op(OP_SSTORE).op(OP_STOP)
                     .build();
    MicroOpts o;
    o.extra_code[kOther] = callee;
    if (auto e = expect_slot0(code, 1, o)) return e;
    o.env_patch.ext_code_size_override[kOther] = 9999;
    return expect_slot0(code, 9999, o);
  });
  add("call_return_override_forces_failure", [] {
    bytes code = Asm{}
                     .push(0).push(0).push(0).push(0).push(0)
                     .push(address_to_u256(kOther)).push(1000).op(OP_CALL)
                     .push(0).op(OP_SSTORE).op(OP_STOP)
                     .build();
    MicroOpts o;
    o.env_patch.call_return_override = u256(0);
    MicroRun r = run_code(code, o);
    if (r.post.storage_at(kContract, 0) != 0) return fail("override not applied");
    if (r.trace.external_calls.empty() || r.trace.external_calls[0].success)
      return fail("event must report failure");
    return ok();
  });
  add("returndatasize_override", [] {
    bytes code =
        Asm{}.op(OP_RETURNDATASIZE).push(0).op(OP_SSTORE).op(OP_STOP).build();
    MicroOpts o;
    o.env_patch.return_data_size_override = u256(40);
    return expect_slot0(code, 40, o);
  });
  add("balance_override", [] {
    bytes code = Asm{}
                     .push(address_to_u256(kOther)).op(OP_BALANCE)
                     .push(0).op(OP_SSTORE).op(OP_STOP)
                     .build();
    MicroOpts o;
    o.env_patch.balance_overrides[kOther] = 4242;
    return expect_slot0(code, 4242, o);
  });
  add("value_transfer_tops_up_contract", [] {
    bytes code = Asm{}.op(OP_STOP).build();
    MicroOpts o;
    o.value = 123;
    MicroRun r = run_code(code, o);
    if (r.post.balance(kContract) != 123) return fail("contract balance");
    if (r.trace.ether_transfers.size() != 1) return fail("transfer event");
    return ok();
  });
  add("insufficient_tx_value_reverts", [] {
    bytes code = Asm{}.op(OP_STOP).build();
    MicroOpts o;
    o.value = u256(1) << 200;  // beyond the sender's funded balance
    MicroRun r = run_code(code, o);
    if (r.trace.exception != VmException::Revert) return fail("want Revert");
    if (!(r.post.accounts == r.pre.accounts)) return fail("state changed");
    return ok();
  });

  // --- determinism ---
  add("determinism_trace_hash", [] {
    bytes code = Asm{}
                     .push(3).push(4).op(OP_ADD).push(0).op(OP_SSTORE)
                     .push(0).op(OP_SLOAD).op(OP_POP).op(OP_STOP)
                     .build();
    MicroOpts o;
    o.calldata = {1, 2, 3};
    auto a = run_code(code, o);
    auto b = run_code(code, o);
    if (trace_hash(a.trace) != trace_hash(b.trace)) return fail("hash mismatch");
    return ok();
  });

  return cases;
}

}  // namespace llama::test
