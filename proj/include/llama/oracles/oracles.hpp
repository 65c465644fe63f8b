#pragma once

#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "llama/bundle.hpp"
#include "llama/corpus/seed.hpp"
#include "llama/vm/trace.hpp"

namespace llama::oracles {

enum class BugClass : uint8_t { AF, BD, IO, LE, FE, RE, TD, UE, US, UD };
constexpr int kBugClassCount = 10;

const char* bug_name(BugClass c);
std::optional<BugClass> bug_from_name(const std::string& s);

struct BugReport {
  BugClass cls;
  std::string seed_id;
  size_t tx_index;  // the trace holding the evidence
  uint32_t pc;      // evidence pc inside that trace
  std::string description;
};

// Re-executes a transaction sequence from genesis under an environment shift;
// the differential detectors (BD, TD) use this for their concrete witnesses.
using Replayer =
    std::function<SequenceResult(const std::vector<corpus::Transaction>&, const EnvPerturb&)>;

struct OracleInput {
  const corpus::Seed* seed = nullptr;
  const std::vector<vm::ExecutionTrace>* traces = nullptr;
  const vm::WorldState* pre_state = nullptr;
  const vm::WorldState* post_state = nullptr;
  const Bundle* bundle = nullptr;
  const ChainConfig* chain = nullptr;
  Replayer replay;
};

// Runs all ten detectors over one executed seed; reports are deduplicated by
// (class, pc) and ordered deterministically.
std::vector<BugReport> detect_all(const OracleInput& in);

}  // namespace llama::oracles
