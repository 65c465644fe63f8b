#pragma once

#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "llama/abi/abi.hpp"
#include "llama/corpus/seed.hpp"
#include "llama/feedback/coverage.hpp"
#include "llama/vm/interpreter.hpp"

namespace llama {

struct BundleError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// The configured account pool a campaign runs with. Transaction senders are
// indices into `accounts`; the owner is privileged for the oracles.
struct AccountSpec {
  Address address;
  u256 balance;
  std::string role;  // owner | normal | attacker
};

struct ChainConfig {
  std::vector<AccountSpec> accounts;
  Address contract;  // deploy address of the bundle contract
  uint64_t gas_limit_default = 100000;
  uint64_t timestamp_base = 1600000000;
  uint64_t block_base = 1000;

  static ChainConfig standard();
  const AccountSpec& sender(int index) const {
    return accounts[static_cast<size_t>(index) % accounts.size()];
  }
  std::vector<Address> attacker_addresses() const;
  Address owner_address() const;
};

// A contract bundle directory:
//   code.bin            hex-encoded runtime bytecode
//   abi.json            standard contract ABI
//   roles.json          optional: owner, attackers, contract_balance
//   attacker.json       optional: scripted counterparty calls
//   expected_bugs.json  optional: seeded bug classes, for the test corpus
struct Bundle {
  std::string name;
  vm::Bytecode code;
  std::vector<abi::FunctionDescriptor> fds;
  Address contract;
  Address owner;
  std::vector<Address> attackers;
  u256 contract_balance = 0;
  std::optional<vm::ScriptedCounterparty> counterparty;
  std::vector<std::string> expected_bugs;

  const abi::FunctionDescriptor* find_function(const std::string& name) const;
};

Bundle load_bundle(const std::string& dir, const ChainConfig& chain = ChainConfig::standard());

vm::WorldState genesis_state(const Bundle& bundle, const ChainConfig& chain);

// Builds the calldata for one transaction; throws BundleError on unknown
// functions or literals that no longer parse.
bytes encode_transaction(const Bundle& bundle, const corpus::Transaction& tx);

vm::Environment environment_for(const corpus::Transaction& tx, size_t tx_index,
                                const ChainConfig& chain);

struct SequenceResult {
  std::vector<vm::ExecutionTrace> traces;
  vm::WorldState pre_state;
  vm::WorldState post_state;
  std::vector<feedback::Selector> selectors;
};

// Uniform environment shifts used by the differential oracle witnesses.
struct EnvPerturb {
  int64_t timestamp_delta = 0;
  int64_t block_delta = 0;
};

// Executes a transaction sequence from the bundle's genesis state. Faulting
// transactions roll back only themselves.
SequenceResult run_sequence(const Bundle& bundle, const ChainConfig& chain,
                            const std::vector<corpus::Transaction>& txs,
                            const EnvPerturb& perturb = {},
                            vm::SymbolicSession* symbolic = nullptr);

}  // namespace llama
