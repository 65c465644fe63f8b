#pragma once

#include <functional>
#include <string>
#include <vector>

#include "llama/corpus/seed.hpp"
#include "llama/vm/trace.hpp"

namespace llama::corpus {

// Pre-fuzz score: unique coverage within the seed's own traces plus a small
// bonus when any transaction raised an exception.
struct PreFuzzScore {
  uint64_t coverage = 0;
  int exception = 0;  // 0/1
  double lambda = 0;
  double score = 0;   // coverage + lambda * exception, exactly
};

using SeedRunner = std::function<std::vector<vm::ExecutionTrace>(const Seed&)>;

PreFuzzScore score_from_traces(const std::vector<vm::ExecutionTrace>& traces, double lambda);
PreFuzzScore prefuzz_score(const Seed& seed, const SeedRunner& run, double lambda);

struct TopKConfig {
  double rho = 0.1;      // in (0,1)
  uint64_t k_max = 32;   // >= 1
};

struct ScoredSeed {
  Seed seed;
  PreFuzzScore score;
};

// K = min(k_max, ceil(rho*N)) highest-score seeds, ties broken by smaller id.
std::vector<Seed> select_top_k(const std::vector<ScoredSeed>& scored, const TopKConfig& cfg);

// Pool persistence: one JSON document per seed, file name = seed id.
void persist(const std::vector<Seed>& pool, const std::string& dir_path);
std::vector<Seed> load(const std::string& dir_path);

}  // namespace llama::corpus
