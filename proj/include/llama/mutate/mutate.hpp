#pragma once

#include <array>
#include <stdexcept>
#include <vector>

#include "llama/abi/abi.hpp"
#include "llama/corpus/seed.hpp"
#include "llama/rng.hpp"
#include "llama/vm/trace.hpp"

namespace llama::mutate {

enum class OperatorId : uint8_t {
  Arguments,
  Account,
  TxAmount,
  GasLimit,
  Timestamp,
  BlockNumber,
  Balance,
  CallReturnValue,
  ReturnDataSize,
  ExtCodeSize,
};

constexpr int kOperatorCount = 10;
const char* operator_name(OperatorId op);

struct InapplicableOperator : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct MutationContext {
  const std::vector<abi::FunctionDescriptor>* fds = nullptr;
  std::vector<Address> accounts;  // configured sender/beneficiary pool
  Address contract;
  u256 value_max = u256(1) << 68;   // "max" entry of the amount palette
  uint64_t gas_default = 100000;
  uint64_t timestamp_default = 1600000000;
  uint64_t block_default = 1000;
};

// Perturbs exactly one field of exactly one (uniformly chosen) transaction.
// Throws InapplicableOperator when the seed offers no target for the operator
// (e.g. Arguments on a sequence of zero-arg calls); callers resample.
void apply(OperatorId op, corpus::Seed& seed, const MutationContext& ctx, Rng& rng);

// Evolved operator-selection state: per-operator accumulated credit and the
// sampling distribution. Probabilities are rebuilt each generation from the
// credit shares with Gaussian perturbation, clamped to [0.05, 0.95] before
// renormalization; credit decays afterwards so the scheduler stays adaptive.
class OperatorScheduler {
 public:
  explicit OperatorScheduler(double sigma = 0.05, double decay = 0.9);

  // |J| uniform in {1,2,3}; members drawn without replacement proportionally to p.
  std::vector<OperatorId> sample(Rng& rng) const;

  // Each member of J gains an equal share of the child's coverage gain.
  void credit(const std::vector<OperatorId>& J, uint64_t delta_branch, uint64_t delta_inst);

  void update_probabilities(Rng& rng);

  const std::array<double, kOperatorCount>& probabilities() const { return p_; }
  const std::array<double, kOperatorCount>& fits() const { return fit_; }
  double sigma() const { return sigma_; }
  double decay() const { return decay_; }

 private:
  std::array<double, kOperatorCount> fit_{};
  std::array<double, kOperatorCount> p_;
  double sigma_;
  double decay_;
};

// A read-after-write dependency at transaction-index granularity, used to
// constrain crossover cut points.
struct RawSpan {
  size_t writer;
  size_t reader;  // writer < reader
};

std::vector<RawSpan> raw_spans(const std::vector<vm::ExecutionTrace>& traces);

// Cut positions of a parent that split no span: c in [1, len] with no span
// writer < c <= reader. The full length is always legal (copy the whole
// parent); interior cuts recombine.
std::vector<size_t> legal_cuts(size_t len, const std::vector<RawSpan>& spans);

std::pair<corpus::Seed, corpus::Seed> crossover_with_cuts(const corpus::Seed& a, size_t cut_a,
                                                          const corpus::Seed& b, size_t cut_b,
                                                          size_t max_len);

// Single-point RAW-aware crossover. The cut in `a` is drawn uniformly from
// its legal set; the cut in `b` is the legal position closest to it, which
// keeps clones idempotent and segment sizes comparable.
std::pair<corpus::Seed, corpus::Seed> crossover_raw_aware(
    const corpus::Seed& a, const std::vector<RawSpan>& spans_a, const corpus::Seed& b,
    const std::vector<RawSpan>& spans_b, size_t max_len, Rng& rng);

}  // namespace llama::mutate
