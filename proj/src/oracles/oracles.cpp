#include "llama/oracles/oracles.hpp"

#include <algorithm>
#include <map>
#include <set>

#include "llama/vm/opcodes.hpp"

namespace llama::oracles {

using vm::CallKind;
using vm::ExecutionTrace;
using vm::VmException;

const char* bug_name(BugClass c) {
  switch (c) {
    case BugClass::AF: return "AF";
    case BugClass::BD: return "BD";
    case BugClass::IO: return "IO";
    case BugClass::LE: return "LE";
    case BugClass::FE: return "FE";
    case BugClass::RE: return "RE";
    case BugClass::TD: return "TD";
    case BugClass::UE: return "UE";
    case BugClass::US: return "US";
    case BugClass::UD: return "UD";
  }
  return "?";
}

std::optional<BugClass> bug_from_name(const std::string& s) {
  static const std::map<std::string, BugClass> kNames = {
      {"AF", BugClass::AF}, {"BD", BugClass::BD}, {"IO", BugClass::IO}, {"LE", BugClass::LE},
      {"FE", BugClass::FE}, {"RE", BugClass::RE}, {"TD", BugClass::TD}, {"UE", BugClass::UE},
      {"US", BugClass::US}, {"UD", BugClass::UD}};
  auto it = kNames.find(s);
  if (it == kNames.end()) return std::nullopt;
  return it->second;
}

namespace {

bool committed(const ExecutionTrace& t) { return t.exception == VmException::None; }

struct Sink {
  std::vector<BugReport>& out;
  const std::string& seed_id;
  std::set<std::pair<BugClass, uint32_t>> seen;

  void report(BugClass cls, size_t tx, uint32_t pc, std::string what) {
    if (!seen.insert({cls, pc}).second) return;
    out.push_back({cls, seed_id, tx, pc, std::move(what)});
  }
};

// AF: an assertion failure reached after some earlier transaction persisted a
// state change or moved value.
void detect_af(const OracleInput& in, Sink& sink) {
  const auto& traces = *in.traces;
  bool prior_effect = false;
  for (size_t i = 0; i < traces.size(); ++i) {
    const auto& t = traces[i];
    if (t.exception == VmException::AssertFail && prior_effect && !t.instr_sites.empty()) {
      sink.report(BugClass::AF, i, t.instr_sites.back().pc,
                  "assertion failure after persisted state change");
    }
    if (committed(t) && (!t.storage_writes.empty() || !t.ether_transfers.empty()))
      prior_effect = true;
  }
}

// IO: a wrapped ADD/SUB/MUL result reached an SSTORE or a CALL value in a
// committed transaction; the evidence pc is the arithmetic instruction.
void detect_io(const OracleInput& in, Sink& sink) {
  const auto& traces = *in.traces;
  for (size_t i = 0; i < traces.size(); ++i) {
    if (!committed(traces[i])) continue;
    for (const auto& w : traces[i].wrap_sinks)
      sink.report(BugClass::IO, i, w.wrap_pc, "wrapped arithmetic affects contract state");
  }
}

// LE: ether flows from the contract to an attacker who never paid anything in
// during the sequence.
void detect_le(const OracleInput& in, Sink& sink) {
  const auto& traces = *in.traces;
  std::set<Address> attackers(in.bundle->attackers.begin(), in.bundle->attackers.end());

  std::map<Address, u256> paid_in;
  for (size_t i = 0; i < traces.size(); ++i) {
    if (!committed(traces[i])) continue;
    Address sender = in.chain->sender((*in.seed).txs[i].sender).address;
    if (attackers.count(sender)) paid_in[sender] += (*in.seed).txs[i].value;
  }
  for (size_t i = 0; i < traces.size(); ++i) {
    if (!committed(traces[i])) continue;
    for (const auto& tr : traces[i].ether_transfers) {
      if (tr.from != in.bundle->contract) continue;
      if (!attackers.count(tr.to)) continue;
      if (paid_in[tr.to] > 0) continue;
      sink.report(BugClass::LE, i, tr.pc, "ether sent to an attacker who never deposited");
    }
  }
}

// FE: the contract accepted value, still holds a balance, and its code has no
// value-sending opcode anywhere (CALL, DELEGATECALL, SELFDESTRUCT).
void detect_fe(const OracleInput& in, Sink& sink) {
  if (in.post_state->balance(in.bundle->contract) == 0) return;

  const auto& traces = *in.traces;
  std::optional<size_t> receiving_tx;
  for (size_t i = 0; i < traces.size(); ++i) {
    if (committed(traces[i]) && (*in.seed).txs[i].value > 0) {
      receiving_tx = i;
      break;
    }
  }
  if (!receiving_tx) return;

  const bytes& code = in.bundle->code.code;
  for (size_t pc = 0; pc < code.size();) {
    uint8_t op = code[pc];
    if (op == vm::OP_CALL || op == vm::OP_DELEGATECALL || op == vm::OP_SELFDESTRUCT) return;
    pc += vm::is_push(op) ? 1 + vm::push_size(op) : 1;
  }
  const auto& t = traces[*receiving_tx];
  uint32_t pc = t.instr_sites.empty() ? 0 : t.instr_sites.front().pc;
  sink.report(BugClass::FE, *receiving_tx, pc, "contract accepts ether but cannot send it");
}

// RE: a value-bearing call to the scripted counterparty re-entered the
// contract successfully while a slot read before the call was written only
// after it.
void detect_re(const OracleInput& in, Sink& sink) {
  if (!in.bundle->counterparty) return;
  Address stub = in.bundle->counterparty->address;
  Address contract = in.bundle->contract;

  const auto& traces = *in.traces;
  for (size_t i = 0; i < traces.size(); ++i) {
    const auto& t = traces[i];
    if (!committed(t)) continue;
    for (const auto& call : t.external_calls) {
      if (call.kind != CallKind::Call || call.target != stub || !call.success || call.value == 0)
        continue;
      // a successful re-entry deeper in the same transaction
      bool reentered = false;
      for (const auto& inner : t.external_calls)
        if (inner.order > call.order && inner.depth > call.depth && inner.target == contract &&
            inner.success)
          reentered = true;
      if (!reentered) continue;

      // slot read before the call, first written only after it
      for (const auto& read : t.storage_reads) {
        if (read.order >= call.order) continue;
        bool written_between = false, written_after = false;
        for (const auto& wr : t.storage_writes) {
          if (wr.addr != read.addr || wr.slot != read.slot) continue;
          if (wr.order > read.order && wr.order < call.order) written_between = true;
          if (wr.order > call.order) written_after = true;
        }
        if (!written_between && written_after) {
          sink.report(BugClass::RE, i, call.pc,
                      "state guarding a value transfer is updated only after the external call");
          break;
        }
      }
    }
  }
}

// UE: a reported call failure whose status never feeds a branch before the
// next state-affecting operation of the same committed transaction.
void detect_ue(const OracleInput& in, Sink& sink) {
  const auto& traces = *in.traces;
  for (size_t i = 0; i < traces.size(); ++i) {
    const auto& t = traces[i];
    if (!committed(t)) continue;
    for (const auto& call : t.external_calls) {
      if (call.success || call.status_mask == 0) continue;
      uint32_t checked_at = UINT32_MAX;
      for (const auto& use : t.jumpi_status_uses)
        if ((use.call_mask & call.status_mask) && use.order > call.order)
          checked_at = std::min(checked_at, use.order);

      uint32_t state_at = UINT32_MAX;
      for (const auto& w : t.storage_writes)
        if (w.order > call.order) state_at = std::min(state_at, w.order);
      for (const auto& c2 : t.external_calls)
        if (c2.order > call.order) state_at = std::min(state_at, c2.order);
      for (const auto& sd : t.selfdestructs)
        if (sd.order > call.order) state_at = std::min(state_at, sd.order);

      bool dropped = checked_at == UINT32_MAX ||
                     (state_at != UINT32_MAX && checked_at > state_at);
      if (dropped)
        sink.report(BugClass::UE, i, call.pc, "call failure is never checked");
    }
  }
}

// US: selfdestruct executed in a committed transaction sent by a non-owner.
void detect_us(const OracleInput& in, Sink& sink) {
  const auto& traces = *in.traces;
  for (size_t i = 0; i < traces.size(); ++i) {
    if (!committed(traces[i])) continue;
    Address sender = in.chain->sender((*in.seed).txs[i].sender).address;
    if (sender == in.bundle->owner) continue;
    for (const auto& sd : traces[i].selfdestructs)
      sink.report(BugClass::US, i, sd.pc, "selfdestruct reachable by an unprivileged sender");
  }
}

// UD: delegatecall whose target word was tainted by calldata or by storage an
// unprivileged sender wrote.
void detect_ud(const OracleInput& in, Sink& sink) {
  const auto& traces = *in.traces;
  for (size_t i = 0; i < traces.size(); ++i) {
    if (!committed(traces[i])) continue;
    for (const auto& d : traces[i].tainted_delegatecalls)
      sink.report(BugClass::UD, i, d.pc, "delegatecall target is attacker-controlled");
  }
}

std::multiset<std::tuple<Address, Address, std::string>> transfer_outcome(
    const std::vector<ExecutionTrace>& traces) {
  std::multiset<std::tuple<Address, Address, std::string>> out;
  for (const auto& t : traces) {
    if (!committed(t)) continue;
    for (const auto& tr : t.ether_transfers) out.insert({tr.from, tr.to, u256_to_dec(tr.amount)});
  }
  return out;
}

// BD: block data flowed into a branch and shifting the block environment
// provably changes the ether-transfer outcome.
void detect_bd(const OracleInput& in, Sink& sink) {
  const auto& traces = *in.traces;
  size_t witness_tx = SIZE_MAX;
  uint32_t witness_pc = 0;
  for (size_t i = 0; i < traces.size() && witness_tx == SIZE_MAX; ++i) {
    if (!traces[i].blockdata_branches.empty()) {
      witness_tx = i;
      witness_pc = traces[i].blockdata_branches.front().pc;
    }
  }
  if (witness_tx == SIZE_MAX || !in.replay) return;

  auto baseline = transfer_outcome(traces);
  static const EnvPerturb kPerturbs[] = {{1, 0}, {86400, 0}, {0, 1}, {0, 257}};
  for (const auto& p : kPerturbs) {
    auto shifted = in.replay((*in.seed).txs, p);
    if (transfer_outcome(shifted.traces) != baseline) {
      sink.report(BugClass::BD, witness_tx, witness_pc,
                  "transfer outcome depends on miner-controlled block data");
      return;
    }
  }
}

// TD: swapping two adjacent transactions from different senders changes some
// attacker's final balance.
void detect_td(const OracleInput& in, Sink& sink) {
  const auto& traces = *in.traces;
  bool any_transfer = false;
  for (const auto& t : traces)
    if (committed(t) && !t.ether_transfers.empty()) any_transfer = true;
  if (!any_transfer || !in.replay) return;

  const auto& txs = (*in.seed).txs;
  auto attacker_balances = [&](const vm::WorldState& st) {
    std::vector<u256> out;
    for (const auto& a : in.bundle->attackers) out.push_back(st.balance(a));
    return out;
  };
  auto baseline = attacker_balances(*in.post_state);

  for (size_t i = 0; i + 1 < txs.size(); ++i) {
    if (in.chain->sender(txs[i].sender).address == in.chain->sender(txs[i + 1].sender).address)
      continue;
    auto swapped = txs;
    std::swap(swapped[i], swapped[i + 1]);
    auto replayed = in.replay(swapped, {});
    if (attacker_balances(replayed.post_state) != baseline) {
      uint32_t pc = traces[i].instr_sites.empty() ? 0 : traces[i].instr_sites.front().pc;
      sink.report(BugClass::TD, i, pc, "attacker outcome depends on transaction order");
      return;
    }
  }
}

}  // namespace

std::vector<BugReport> detect_all(const OracleInput& in) {
  std::vector<BugReport> out;
  Sink sink{out, in.seed->id, {}};

  detect_af(in, sink);
  detect_bd(in, sink);
  detect_io(in, sink);
  detect_le(in, sink);
  detect_fe(in, sink);
  detect_re(in, sink);
  detect_td(in, sink);
  detect_ue(in, sink);
  detect_us(in, sink);
  detect_ud(in, sink);

  std::sort(out.begin(), out.end(), [](const BugReport& a, const BugReport& b) {
    if (a.cls != b.cls) return a.cls < b.cls;
    if (a.tx_index != b.tx_index) return a.tx_index < b.tx_index;
    return a.pc < b.pc;
  });
  return out;
}

}  // namespace llama::oracles
