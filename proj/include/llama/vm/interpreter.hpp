#pragma once

#include <functional>
#include <optional>
#include <set>
#include <stdexcept>
#include <vector>

#include "llama/symexec/expr.hpp"
#include "llama/vm/state.hpp"
#include "llama/vm/trace.hpp"

namespace llama::vm {

// Opcode outside the documented subset: a corpus/bundle problem, not a
// contract bug, so it surfaces as a C++ error instead of a trace exception.
struct UnknownOpcodeError : std::runtime_error {
  uint8_t opcode;
  uint32_t pc;
  UnknownOpcodeError(uint8_t op, uint32_t at);
};

// Scripted counterparty bound to a codeless address. When the bound address
// receives a CALL it replays its scripted calls against the target contract
// (at most once per transaction) before reporting success.
struct ScriptedCounterparty {
  Address address;
  Address target;
  std::vector<std::pair<bytes, u256>> calls;  // (calldata, value)
};

// Declares which inputs of which transaction are symbolic and collects the
// path entries. Owned by symexec; the interpreter only appends.
struct SymbolicSession {
  struct TxSources {
    std::set<uint16_t> calldata_words;  // static argument word indices
    bool timestamp = false;
    bool block_number = false;
    bool call_value = false;
  };
  struct PathEntry {
    uint16_t tx;
    uint32_t pc;
    symexec::SymPtr predicate;  // Const node when the condition was concrete
    bool taken;
  };

  std::vector<TxSources> txs;
  symexec::ExprBudget budget{100000};
  std::vector<PathEntry> path;
  uint16_t current_tx = 0;
};

// Optional execution knobs shared by a whole sequence.
struct ExecParams {
  const ScriptedCounterparty* counterparty = nullptr;
  const std::set<Address>* privileged = nullptr;  // senders whose writes are trusted
  SymbolicSession* symbolic = nullptr;
  // (address, slot) pairs already written by unprivileged senders in earlier
  // transactions of the sequence; updated in place on committed transactions.
  std::set<std::pair<Address, u256>>* unpriv_written = nullptr;
};

// Executes one message call against a copy of `state`. On any trace
// exception the returned state equals the input state. Pure function of
// (state, to, calldata, env, params).
std::pair<ExecutionTrace, WorldState> execute_transaction(const WorldState& state,
                                                          const Address& to,
                                                          const bytes& calldata,
                                                          const Environment& env,
                                                          const ExecParams& params = {});

// Hashes the observable fields of a trace; two identical executions must agree.
u256 trace_hash(const ExecutionTrace& t);

uint64_t opcode_gas_cost(uint8_t op);

// Memory beyond this many bytes per frame raises OutOfGas. Keeps adversarial
// random bytecode from requesting unbounded allocations.
constexpr size_t kMemoryCapBytes = 1 << 20;
constexpr int kMaxCallDepth = 64;
constexpr size_t kMaxStack = 1024;

}  // namespace llama::vm
