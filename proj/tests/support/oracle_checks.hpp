#pragma once

// Independent brute-force oracles for the scoring, selection, and RAW-delta
// paths, shared by the unit tests and the acceptance suite. These never call
// into the implementation they check beyond the function under test.

#include <optional>
#include <string>

#include "llama/corpus/pool.hpp"
#include "llama/feedback/coverage.hpp"

namespace llama::test {

// select_top_k vs a full-sort reference over random score multisets.
std::optional<std::string> check_topk_bruteforce(int instances, uint64_t rng_seed);

// feedback deltas' RAW count vs an all-pairs enumerator over random
// sequences (<= max_len txs) of a four-function storage toy contract.
std::optional<std::string> check_raw_bruteforce(int sequences, int max_len, uint64_t rng_seed);

}  // namespace llama::test
