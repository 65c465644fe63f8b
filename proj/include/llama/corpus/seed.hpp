#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "llama/feedback/coverage.hpp"
#include "llama/types.hpp"
#include "llama/vm/state.hpp"

namespace llama::corpus {

// Per-transaction environment deltas over the campaign defaults. Every field
// is the target of exactly one environmental mutation operator.
struct EnvDeltas {
  std::optional<uint64_t> timestamp;
  std::optional<uint64_t> block_number;
  std::optional<uint64_t> gas_limit;
  std::map<Address, u256> balance_overrides;
  std::optional<u256> call_return_override;
  std::optional<u256> return_data_size_override;
  std::map<Address, u256> ext_code_size_override;

  bool operator==(const EnvDeltas&) const = default;
};

struct Transaction {
  std::string function;
  std::vector<std::string> args;  // canonical literals, re-parsed at encode time
  int sender = 0;                 // index into the configured account set
  u256 value = 0;
  EnvDeltas env;

  bool operator==(const Transaction&) const = default;
};

enum class SeedOrigin : uint8_t { LLM, Stub, Mutation, Crossover, Symbolic };

const char* origin_name(SeedOrigin o);
SeedOrigin origin_from_name(const std::string& s);

struct Seed {
  std::vector<Transaction> txs;
  feedback::FitnessRecord fitness;
  SeedOrigin origin = SeedOrigin::Stub;
  std::string id;  // hex of keccak over the canonical tx serialization

  void rehash();
  bool operator==(const Seed& o) const { return id == o.id && txs == o.txs; }
};

// Canonical JSON forms; the id is a pure function of the `txs` serialization.
std::string seed_to_json(const Seed& s);
Seed seed_from_json(const std::string& text);  // throws CorruptCorpus

struct IoError : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct CorruptCorpus : std::runtime_error {
  using std::runtime_error::runtime_error;
};

}  // namespace llama::corpus
