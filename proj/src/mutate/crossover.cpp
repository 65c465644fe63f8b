#include <algorithm>
#include <set>

#include "llama/mutate/mutate.hpp"

namespace llama::mutate {

std::vector<RawSpan> raw_spans(const std::vector<vm::ExecutionTrace>& traces) {
  std::vector<RawSpan> out;
  for (size_t j = 0; j < traces.size(); ++j) {
    if (traces[j].exception != vm::VmException::None) continue;
    if (traces[j].storage_writes.empty()) continue;
    std::set<std::pair<Address, u256>> written;
    for (const auto& w : traces[j].storage_writes) written.insert({w.addr, w.slot});
    for (size_t k = j + 1; k < traces.size(); ++k) {
      bool hit = false;
      for (const auto& r : traces[k].storage_reads)
        if (written.count({r.addr, r.slot})) hit = true;
      if (hit) out.push_back({j, k});
    }
  }
  return out;
}

std::vector<size_t> legal_cuts(size_t len, const std::vector<RawSpan>& spans) {
  std::vector<size_t> out;
  for (size_t c = 1; c <= len; ++c) {
    bool splits = false;
    for (const auto& s : spans)
      if (s.writer < c && c <= s.reader) splits = true;
    if (!splits) out.push_back(c);
  }
  return out;
}

std::pair<corpus::Seed, corpus::Seed> crossover_with_cuts(const corpus::Seed& a, size_t cut_a,
                                                          const corpus::Seed& b, size_t cut_b,
                                                          size_t max_len) {
  auto splice = [max_len](const corpus::Seed& head, size_t cut_head, const corpus::Seed& tail,
                          size_t cut_tail) {
    corpus::Seed child;
    child.txs.assign(head.txs.begin(), head.txs.begin() + cut_head);
    child.txs.insert(child.txs.end(), tail.txs.begin() + cut_tail, tail.txs.end());
    if (child.txs.size() > max_len) child.txs.resize(max_len);
    if (child.txs.empty()) child.txs = head.txs;  // degenerate cuts keep the head parent
    child.origin = corpus::SeedOrigin::Crossover;
    child.rehash();
    return child;
  };
  return {splice(a, cut_a, b, cut_b), splice(b, cut_b, a, cut_a)};
}

std::pair<corpus::Seed, corpus::Seed> crossover_raw_aware(
    const corpus::Seed& a, const std::vector<RawSpan>& spans_a, const corpus::Seed& b,
    const std::vector<RawSpan>& spans_b, size_t max_len, Rng& rng) {
  std::vector<size_t> cuts_a = legal_cuts(a.txs.size(), spans_a);
  std::vector<size_t> cuts_b = legal_cuts(b.txs.size(), spans_b);

  size_t cut_a = cuts_a[rng.below(cuts_a.size())];
  // nearest legal position in b keeps clones idempotent and segments balanced
  size_t cut_b = cuts_b[0];
  size_t best = cut_b > cut_a ? cut_b - cut_a : cut_a - cut_b;
  for (size_t c : cuts_b) {
    size_t d = c > cut_a ? c - cut_a : cut_a - c;
    if (d < best) {
      best = d;
      cut_b = c;
    }
  }
  return crossover_with_cuts(a, cut_a, b, cut_b, max_len);
}

}  // namespace llama::mutate
