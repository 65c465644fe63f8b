#include "llama/feedback/coverage.hpp"

namespace llama::feedback {

void GlobalCoverage::merge(const GlobalCoverage& o) {
  instr_sites.insert(o.instr_sites.begin(), o.instr_sites.end());
  branch_edges.insert(o.branch_edges.begin(), o.branch_edges.end());
  raw_pairs.insert(o.raw_pairs.begin(), o.raw_pairs.end());
}

std::set<RawKey> derive_raw_pairs(const std::vector<vm::ExecutionTrace>& traces,
                                  const std::vector<Selector>& tx_selectors) {
  std::set<RawKey> out;
  size_t n = traces.size();
  for (size_t j = 0; j < n; ++j) {
    if (traces[j].exception != vm::VmException::None) continue;  // rolled back
    if (traces[j].storage_writes.empty()) continue;
    std::set<std::pair<Address, u256>> written;
    for (const auto& w : traces[j].storage_writes) written.insert({w.addr, w.slot});
    for (size_t k = j + 1; k < n; ++k) {
      for (const auto& r : traces[k].storage_reads) {
        if (written.count({r.addr, r.slot}))
          out.insert(RawKey{r.addr, r.slot, tx_selectors[j], tx_selectors[k]});
      }
    }
  }
  return out;
}

FitnessRecord deltas(const std::vector<vm::ExecutionTrace>& traces,
                     const std::vector<Selector>& tx_selectors, const GlobalCoverage& global) {
  FitnessRecord rec;
  std::set<SiteKey> seen_sites;
  std::set<EdgeKey> seen_edges;
  for (const auto& t : traces) {
    for (const auto& s : t.instr_sites) {
      SiteKey key{s.addr, s.pc};
      if (!global.instr_sites.count(key) && seen_sites.insert(key).second) ++rec.delta_inst;
    }
    for (const auto& e : t.branch_edges) {
      EdgeKey key{e.addr, e.pc, e.taken};
      if (!global.branch_edges.count(key) && seen_edges.insert(key).second) ++rec.delta_branch;
    }
  }
  for (const auto& p : derive_raw_pairs(traces, tx_selectors))
    if (!global.raw_pairs.count(p)) ++rec.delta_raw;
  rec.fit = rec.delta_branch + rec.delta_inst + rec.delta_raw;
  return rec;
}

void commit(GlobalCoverage& global, const std::vector<vm::ExecutionTrace>& traces,
            const std::vector<Selector>& tx_selectors) {
  for (const auto& t : traces) {
    for (const auto& s : t.instr_sites) global.instr_sites.insert({s.addr, s.pc});
    for (const auto& e : t.branch_edges) global.branch_edges.insert({e.addr, e.pc, e.taken});
  }
  auto pairs = derive_raw_pairs(traces, tx_selectors);
  global.raw_pairs.insert(pairs.begin(), pairs.end());
}

StagnationTrigger StagnationDetector::check(uint64_t branch_total) {
  sym_.push_back(branch_total);
  reinit_.push_back(branch_total);
  if (sym_.size() > kSymWindow + 1) sym_.pop_front();
  if (reinit_.size() > kReinitWindow + 1) reinit_.pop_front();

  if (reinit_.size() == kReinitWindow + 1 && reinit_.back() == reinit_.front()) {
    reinit_.clear();
    sym_.clear();
    return StagnationTrigger::TriggerReinit;
  }
  if (sym_.size() == kSymWindow + 1) {
    uint64_t first = sym_.front(), last = sym_.back();
    double base = first == 0 ? 1.0 : static_cast<double>(first);
    if (static_cast<double>(last - first) < kSymRelGrowth * base) {
      sym_.clear();
      return StagnationTrigger::TriggerSymbolic;
    }
  }
  return StagnationTrigger::None;
}

}  // namespace llama::feedback
