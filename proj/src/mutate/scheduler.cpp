#include "llama/mutate/mutate.hpp"

namespace llama::mutate {

OperatorScheduler::OperatorScheduler(double sigma, double decay) : sigma_(sigma), decay_(decay) {
  p_.fill(1.0 / kOperatorCount);
}

std::vector<OperatorId> OperatorScheduler::sample(Rng& rng) const {
  size_t count = 1 + rng.below(3);
  std::array<double, kOperatorCount> weight = p_;
  std::vector<OperatorId> out;
  for (size_t pick = 0; pick < count; ++pick) {
    double total = 0;
    for (double w : weight) total += w;
    double r = rng.unit() * total;
    int chosen = kOperatorCount - 1;
    for (int j = 0; j < kOperatorCount; ++j) {
      if (r < weight[j]) {
        chosen = j;
        break;
      }
      r -= weight[j];
    }
    out.push_back(static_cast<OperatorId>(chosen));
    weight[chosen] = 0;  // without replacement
  }
  return out;
}

void OperatorScheduler::credit(const std::vector<OperatorId>& J, uint64_t delta_branch,
                               uint64_t delta_inst) {
  if (J.empty()) return;
  double share = static_cast<double>(delta_branch + delta_inst) / static_cast<double>(J.size());
  for (OperatorId j : J) fit_[static_cast<size_t>(j)] += share;
}

void OperatorScheduler::update_probabilities(Rng& rng) {
  double total = 0;
  for (double f : fit_) total += f;

  std::array<double, kOperatorCount> clamped;
  for (int j = 0; j < kOperatorCount; ++j) {
    double raw = total > 0 ? fit_[j] / total + rng.gaussian(sigma_) : 1.0 / kOperatorCount;
    clamped[j] = std::max(0.05, std::min(0.95, raw));
  }
  double norm = 0;
  for (double c : clamped) norm += c;
  for (int j = 0; j < kOperatorCount; ++j) p_[j] = clamped[j] / norm;
  for (double& f : fit_) f *= decay_;
}

}  // namespace llama::mutate
