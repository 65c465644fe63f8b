#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <set>

#include "llama/types.hpp"
#include "llama/vm/opcodes.hpp"

namespace llama::vm {

// Runtime bytecode plus the precomputed set of valid jump targets
// (JUMPDEST offsets that are not inside PUSH immediates).
struct Bytecode {
  bytes code;
  std::set<uint32_t> jumpdests;

  static Bytecode from(bytes code);
  bool valid_jumpdest(const u256& dest) const;
  bool empty() const { return code.empty(); }
  bool operator==(const Bytecode&) const = default;
};

struct Account {
  u256 balance;
  Bytecode code;
  std::map<u256, u256> storage;
  bool operator==(const Account&) const = default;
};

struct WorldState {
  std::map<Address, Account> accounts;

  Account& get_or_create(const Address& a) { return accounts[a]; }
  const Account* find(const Address& a) const {
    auto it = accounts.find(a);
    return it == accounts.end() ? nullptr : &it->second;
  }
  u256 balance(const Address& a) const {
    const Account* acc = find(a);
    return acc ? acc->balance : u256(0);
  }
  u256 storage_at(const Address& a, const u256& slot) const {
    const Account* acc = find(a);
    if (!acc) return 0;
    auto it = acc->storage.find(slot);
    return it == acc->storage.end() ? u256(0) : it->second;
  }
};

// Per-transaction execution environment. Every field here is a mutation
// surface for one of the environmental operators; absent overrides mean
// default model behavior.
struct Environment {
  uint64_t timestamp = 0;
  uint64_t block_number = 0;
  uint64_t gas_limit = 0;
  Address caller;
  u256 call_value = 0;
  std::map<Address, u256> balance_overrides;
  std::optional<u256> call_return_override;
  std::optional<u256> return_data_size_override;
  std::map<Address, u256> ext_code_size_override;
};

}  // namespace llama::vm
