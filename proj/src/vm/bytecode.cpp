#include <algorithm>

#include "llama/vm/interpreter.hpp"
#include "llama/vm/state.hpp"

namespace llama::vm {

Bytecode Bytecode::from(bytes code) {
  Bytecode b;
  b.code = std::move(code);
  // JUMPDEST bytes inside PUSH immediates are data, not targets.
  for (size_t pc = 0; pc < b.code.size();) {
    uint8_t op = b.code[pc];
    if (op == OP_JUMPDEST) b.jumpdests.insert(static_cast<uint32_t>(pc));
    pc += is_push(op) ? 1 + push_size(op) : 1;
  }
  return b;
}

bool Bytecode::valid_jumpdest(const u256& dest) const {
  if (dest > code.size()) return false;
  return jumpdests.count(static_cast<uint32_t>(to_u64(dest))) > 0;
}

uint64_t opcode_gas_cost(uint8_t op) {
  switch (op) {
    case OP_SLOAD:
      return 20;
    case OP_SSTORE:
      return 100;
    case OP_CALL:
    case OP_DELEGATECALL:
    case OP_STATICCALL:
      return 100;
    default:
      return 1;
  }
}

const char* exception_name(VmException e) {
  switch (e) {
    case VmException::None: return "None";
    case VmException::Revert: return "Revert";
    case VmException::InvalidOp: return "InvalidOp";
    case VmException::OutOfGas: return "OutOfGas";
    case VmException::AssertFail: return "AssertFail";
    case VmException::StackErr: return "StackErr";
  }
  return "?";
}

BehaviorMetrics behavior_metrics(const std::vector<ExecutionTrace>& traces) {
  BehaviorMetrics m;
  if (traces.empty()) return m;
  double depth_sum = 0;
  size_t with_calls = 0;
  for (const auto& t : traces) {
    depth_sum += t.max_call_depth;
    if (!t.external_calls.empty()) ++with_calls;
    bool committed = t.exception == VmException::None;
    if (committed) {
      m.ether_transfer_count += t.ether_transfers.size();
      if (!t.storage_writes.empty()) m.state_write_flag = 1;
    }
  }
  m.avg_call_depth = depth_sum / static_cast<double>(traces.size());
  m.external_call_ratio = static_cast<double>(with_calls) / static_cast<double>(traces.size());
  return m;
}

}  // namespace llama::vm
