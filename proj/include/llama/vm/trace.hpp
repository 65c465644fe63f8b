#pragma once

#include <cstdint>
#include <vector>

#include "llama/types.hpp"

namespace llama::vm {

enum class VmException : uint8_t { None, Revert, InvalidOp, OutOfGas, AssertFail, StackErr };

const char* exception_name(VmException e);

enum class CallKind : uint8_t { Call, DelegateCall, StaticCall };

struct InstrEvent {
  Address addr;
  uint32_t pc;
  uint8_t opcode;
};

struct BranchEvent {
  Address addr;
  uint32_t pc;
  bool taken;
};

struct StorageEvent {
  uint32_t order;
  Address addr;
  u256 slot;
};

struct CallEvent {
  uint32_t order;
  CallKind kind;
  Address target;
  u256 value;
  bool success;
  uint32_t pc;
  uint16_t depth;        // depth of the frame issuing the call; top-level frame is 1
  uint32_t status_mask;  // taint bit of the pushed status word; 0 for scripted entries
};

struct TransferEvent {
  uint32_t order;
  Address from;
  Address to;
  u256 amount;
  uint32_t pc;
};

struct SelfdestructEvent {
  uint32_t order;
  Address addr;
  Address beneficiary;
  uint32_t pc;
};

// Oracle side channels, recorded by the interpreter alongside the main events.
struct JumpiStatusUse {  // a JUMPI whose predicate carried call-status taint
  uint32_t order;
  uint32_t call_mask;
};
struct WrapSinkEvent {  // a wrapped arithmetic result reached SSTORE or CALL value
  uint32_t order;
  uint32_t wrap_pc;
};
struct BlockDataBranch {  // a JUMPI whose predicate derived from TIMESTAMP/NUMBER
  uint32_t order;
  uint32_t pc;
};
struct TaintedDelegate {  // a DELEGATECALL whose target word came from calldata
  uint32_t order;         // or from storage writable by an unprivileged sender
  uint32_t pc;
};

// Complete record of one transaction. State-effect events of reverted inner
// frames are truncated; instruction sites and branch edges always stay. On a
// top-level fault the trace is the prefix up to the fault.
struct ExecutionTrace {
  std::vector<InstrEvent> instr_sites;
  std::vector<BranchEvent> branch_edges;
  std::vector<StorageEvent> storage_writes;
  std::vector<StorageEvent> storage_reads;
  std::vector<CallEvent> external_calls;
  std::vector<TransferEvent> ether_transfers;
  std::vector<SelfdestructEvent> selfdestructs;
  VmException exception = VmException::None;
  uint32_t max_call_depth = 0;
  uint64_t gas_used = 0;

  std::vector<JumpiStatusUse> jumpi_status_uses;
  std::vector<WrapSinkEvent> wrap_sinks;
  std::vector<BlockDataBranch> blockdata_branches;
  std::vector<TaintedDelegate> tainted_delegatecalls;

  uint32_t next_order = 0;  // interpreter-internal event counter
};

struct BehaviorMetrics {
  double avg_call_depth = 0;    // d
  double external_call_ratio = 0;  // r in [0,1]
  uint64_t ether_transfer_count = 0;  // e
  int state_write_flag = 0;     // s, 1 iff any committed SSTORE
};

// Aggregates over the traces of one executed sequence (or one generation).
BehaviorMetrics behavior_metrics(const std::vector<ExecutionTrace>& traces);

}  // namespace llama::vm
