#include "llama/vm/interpreter.hpp"

#include <algorithm>
#include <cassert>

#include "llama/keccak.hpp"

namespace llama::vm {

using symexec::SymOp;
using symexec::SymPtr;

UnknownOpcodeError::UnknownOpcodeError(uint8_t op, uint32_t at)
    : std::runtime_error("unknown opcode 0x" + to_hex(&op, 1) + " at pc " + std::to_string(at)),
      opcode(op),
      pc(at) {}

namespace {

constexpr uint16_t kTaintWrapped = 1;
constexpr uint16_t kTaintCalldata = 2;
constexpr uint16_t kTaintUnprivStorage = 4;
constexpr uint16_t kTaintBlockData = 8;

const u256 kSignBit = u256(1) << 255;

inline bool is_neg(const u256& x) { return (x & kSignBit) != 0; }
inline u256 twos_neg(const u256& x) { return ~x + 1; }

// Stack word: concrete value plus taint channels and, in concolic runs, the
// shadow expression. Memory does not carry taint; only word-aligned symbolic
// stores survive into the shadow map.
struct Word {
  u256 v;
  uint16_t taint = 0;
  uint32_t call_mask = 0;
  uint32_t wrap_pc = 0;
  SymPtr sym;
};

inline Word merge2(const Word& a, const Word& b, u256 v) {
  Word w;
  w.v = std::move(v);
  w.taint = a.taint | b.taint;
  w.call_mask = a.call_mask | b.call_mask;
  w.wrap_pc = a.wrap_pc ? a.wrap_pc : b.wrap_pc;
  return w;
}

inline Word merge1(const Word& a, u256 v) {
  Word w;
  w.v = std::move(v);
  w.taint = a.taint;
  w.call_mask = a.call_mask;
  w.wrap_pc = a.wrap_pc;
  return w;
}

struct Memory {
  bytes data;
  std::map<size_t, SymPtr> shadow;

  // Expands to cover [off, off+len), rounded up to 32 bytes. Returns false
  // when the region would cross the hard cap.
  bool touch(const u256& off, const u256& len) {
    if (len == 0) return true;
    if (off > kMemoryCapBytes || len > kMemoryCapBytes) return false;
    size_t end = to_u64(off) + to_u64(len);
    if (end > kMemoryCapBytes) return false;
    size_t rounded = (end + 31) & ~size_t(31);
    if (rounded > data.size()) data.resize(rounded, 0);
    return true;
  }

  void invalidate(size_t off, size_t len) {
    if (shadow.empty() || len == 0) return;
    size_t lo = off >= 31 ? off - 31 : 0;
    auto it = shadow.lower_bound(lo);
    while (it != shadow.end() && it->first < off + len) it = shadow.erase(it);
  }

  u256 load_word(size_t off) const { return u256_from_be(data.data() + off, 32); }

  void store_word(size_t off, const u256& v) {
    invalidate(off, 32);
    u256_to_be32(v, data.data() + off);
  }
};

struct Frame;

struct TxCtx {
  WorldState& world;
  const Environment& env;
  const ExecParams& params;
  ExecutionTrace& trace;
  uint64_t gas;
  bool script_used = false;
  uint32_t next_call_id = 0;
  // (address, slot) pairs written by an unprivileged sender inside this tx;
  // merged into the sequence-wide set only if the tx commits.
  std::vector<std::pair<Address, u256>> unpriv_log;
  bool sender_privileged = false;

  uint32_t order() { return trace.next_order++; }

  bool slot_unpriv(const Address& a, const u256& slot) const {
    auto key = std::make_pair(a, slot);
    if (params.unpriv_written && params.unpriv_written->count(key)) return true;
    return std::find(unpriv_log.begin(), unpriv_log.end(), key) != unpriv_log.end();
  }
};

struct Snapshot {
  WorldState world;
  size_t writes, reads, calls, transfers, selfdestructs, jumpi_uses, wrap_sinks, delegates;
  size_t unpriv;
  uint32_t next_order;
};

Snapshot take_snapshot(const TxCtx& ctx) {
  return Snapshot{ctx.world,
                  ctx.trace.storage_writes.size(),
                  ctx.trace.storage_reads.size(),
                  ctx.trace.external_calls.size(),
                  ctx.trace.ether_transfers.size(),
                  ctx.trace.selfdestructs.size(),
                  ctx.trace.jumpi_status_uses.size(),
                  ctx.trace.wrap_sinks.size(),
                  ctx.trace.tainted_delegatecalls.size(),
                  ctx.unpriv_log.size(),
                  ctx.trace.next_order};
}

// Rolls back state effects of a failed inner frame. Instruction sites and
// branch edges stay: they were executed and still count as coverage.
void restore_snapshot(TxCtx& ctx, Snapshot&& s) {
  ctx.world = std::move(s.world);
  ctx.trace.storage_writes.resize(s.writes);
  ctx.trace.storage_reads.resize(s.reads);
  ctx.trace.external_calls.resize(s.calls);
  ctx.trace.ether_transfers.resize(s.transfers);
  ctx.trace.selfdestructs.resize(s.selfdestructs);
  ctx.trace.jumpi_status_uses.resize(s.jumpi_uses);
  ctx.trace.wrap_sinks.resize(s.wrap_sinks);
  ctx.trace.tainted_delegatecalls.resize(s.delegates);
  ctx.unpriv_log.resize(s.unpriv);
  ctx.trace.next_order = s.next_order;
}

struct FrameResult {
  bool ok = false;
  VmException fault = VmException::None;
  bytes ret;
};

struct FrameInput {
  Address self;        // storage and balance context
  Address code_owner;  // coverage identity (differs from self under DELEGATECALL)
  const Bytecode* code;
  Address caller;
  u256 value;
  const bytes* calldata;
  bool is_static;
  int depth;
};

FrameResult run_frame(TxCtx& ctx, const FrameInput& in);

bool do_transfer(TxCtx& ctx, const Address& from, const Address& to, const u256& amount,
                 uint32_t pc) {
  if (amount == 0) return true;
  Account& src = ctx.world.get_or_create(from);
  if (src.balance < amount) return false;
  src.balance -= amount;
  ctx.world.get_or_create(to).balance += amount;
  ctx.trace.ether_transfers.push_back({ctx.order(), from, to, amount, pc});
  return true;
}

// Executes the counterparty script bound to a codeless address: each entry
// re-enters the target contract as the counterparty. Runs at most once per
// transaction so reentrancy loops stay bounded.
void run_counterparty_script(TxCtx& ctx, const ScriptedCounterparty& stub, uint32_t pc,
                             int depth) {
  ctx.script_used = true;
  const Account* target = ctx.world.find(stub.target);
  if (!target || target->code.empty()) return;
  Bytecode code = target->code;  // the frame must not alias mutable state
  for (const auto& [calldata, value] : stub.calls) {
    uint32_t order = ctx.order();
    bool success = false;
    Snapshot snap = take_snapshot(ctx);
    if (do_transfer(ctx, stub.address, stub.target, value, pc)) {
      FrameInput inner{stub.target, stub.target, &code,    stub.address,
                       value,       &calldata,   false,    depth + 1};
      FrameResult r = run_frame(ctx, inner);
      success = r.ok;
    }
    if (!success) restore_snapshot(ctx, std::move(snap));
    ctx.trace.external_calls.push_back(
        {order, CallKind::Call, stub.target, value, success, pc, static_cast<uint16_t>(depth), 0});
  }
}

symexec::ExprBudget* budget(TxCtx& ctx) {
  return ctx.params.symbolic ? &ctx.params.symbolic->budget : nullptr;
}

const SymbolicSession::TxSources* tx_sources(TxCtx& ctx) {
  auto* s = ctx.params.symbolic;
  if (!s) return nullptr;
  if (s->current_tx >= s->txs.size()) return nullptr;
  return &s->txs[s->current_tx];
}

SymPtr sym_binary(TxCtx& ctx, SymOp op, const Word& a, const Word& b) {
  auto* bud = budget(ctx);
  if (!bud || (!a.sym && !b.sym)) return nullptr;
  SymPtr ea = a.sym ? a.sym : bud->constant(a.v);
  SymPtr eb = b.sym ? b.sym : bud->constant(b.v);
  return bud->binary(op, ea, eb);
}

SymPtr sym_unary(TxCtx& ctx, SymOp op, const Word& a) {
  auto* bud = budget(ctx);
  if (!bud || !a.sym) return nullptr;
  return bud->unary(op, a.sym);
}

FrameResult run_frame(TxCtx& ctx, const FrameInput& in) {
  const bytes& code = in.code->code;
  std::vector<Word> stack;
  stack.reserve(64);
  Memory mem;
  bytes return_data;  // of the most recent inner call
  size_t pc = 0;

  ctx.trace.max_call_depth =
      std::max(ctx.trace.max_call_depth, static_cast<uint32_t>(in.depth));

  auto fault = [&](VmException e) {
    FrameResult r;
    r.ok = false;
    r.fault = e;
    return r;
  };
  auto need = [&](size_t n) { return stack.size() >= n; };
  auto pop = [&]() {
    Word w = std::move(stack.back());
    stack.pop_back();
    return w;
  };
  auto push = [&](Word w) {
    stack.push_back(std::move(w));
  };
  auto push_val = [&](u256 v) { stack.push_back(Word{std::move(v)}); };

  while (true) {
    if (pc >= code.size()) {
      // running off the end of code is an implicit STOP
      return FrameResult{true, VmException::None, {}};
    }
    uint8_t op = code[pc];
    if (!opcode_supported(op)) throw UnknownOpcodeError(op, static_cast<uint32_t>(pc));

    ctx.trace.instr_sites.push_back({in.code_owner, static_cast<uint32_t>(pc), op});

    uint64_t cost = opcode_gas_cost(op);
    if (ctx.gas < cost) return fault(VmException::OutOfGas);
    ctx.gas -= cost;

    if (is_push(op)) {
      int n = push_size(op);
      if (stack.size() >= kMaxStack) return fault(VmException::StackErr);
      u256 v = 0;
      for (int i = 0; i < n; ++i) {
        uint8_t byte = (pc + 1 + i < code.size()) ? code[pc + 1 + i] : 0;
        v = (v << 8) | byte;
      }
      push_val(v);
      pc += 1 + n;
      continue;
    }
    if (is_dup(op)) {
      size_t n = op - OP_DUP1 + 1;
      if (!need(n)) return fault(VmException::StackErr);
      if (stack.size() >= kMaxStack) return fault(VmException::StackErr);
      push(stack[stack.size() - n]);
      ++pc;
      continue;
    }
    if (is_swap(op)) {
      size_t n = op - OP_SWAP1 + 1;
      if (!need(n + 1)) return fault(VmException::StackErr);
      std::swap(stack[stack.size() - 1], stack[stack.size() - 1 - n]);
      ++pc;
      continue;
    }
    if (is_log(op)) {
      if (in.is_static) return fault(VmException::InvalidOp);
      size_t topics = op - OP_LOG0;
      if (!need(2 + topics)) return fault(VmException::StackErr);
      Word off = pop(), len = pop();
      for (size_t i = 0; i < topics; ++i) pop();
      if (!mem.touch(off.v, len.v)) return fault(VmException::OutOfGas);
      ++pc;
      continue;
    }

    switch (op) {
      case OP_STOP:
        return FrameResult{true, VmException::None, {}};

      case OP_ADD: {
        if (!need(2)) return fault(VmException::StackErr);
        Word a = pop(), b = pop();
        u256 r = a.v + b.v;
        Word w = merge2(a, b, r);
        if (r < a.v) {
          w.taint |= kTaintWrapped;
          if (!w.wrap_pc) w.wrap_pc = static_cast<uint32_t>(pc);
        }
        w.sym = sym_binary(ctx, SymOp::Add, a, b);
        push(std::move(w));
        ++pc;
        break;
      }
      case OP_SUB: {
        if (!need(2)) return fault(VmException::StackErr);
        Word a = pop(), b = pop();
        Word w = merge2(a, b, a.v - b.v);
        if (b.v > a.v) {
          w.taint |= kTaintWrapped;
          if (!w.wrap_pc) w.wrap_pc = static_cast<uint32_t>(pc);
        }
        w.sym = sym_binary(ctx, SymOp::Sub, a, b);
        push(std::move(w));
        ++pc;
        break;
      }
      case OP_MUL: {
        if (!need(2)) return fault(VmException::StackErr);
        Word a = pop(), b = pop();
        u256 r = a.v * b.v;
        Word w = merge2(a, b, r);
        if (a.v != 0 && r / a.v != b.v) {
          w.taint |= kTaintWrapped;
          if (!w.wrap_pc) w.wrap_pc = static_cast<uint32_t>(pc);
        }
        w.sym = sym_binary(ctx, SymOp::Mul, a, b);
        push(std::move(w));
        ++pc;
        break;
      }
      case OP_DIV: {
        if (!need(2)) return fault(VmException::StackErr);
        Word a = pop(), b = pop();
        Word w = merge2(a, b, b.v == 0 ? u256(0) : a.v / b.v);
        w.sym = sym_binary(ctx, SymOp::Div, a, b);
        push(std::move(w));
        ++pc;
        break;
      }
      case OP_SDIV: {
        if (!need(2)) return fault(VmException::StackErr);
        Word a = pop(), b = pop();
        u256 r = 0;
        if (b.v != 0) {
          u256 ua = is_neg(a.v) ? twos_neg(a.v) : a.v;
          u256 ub = is_neg(b.v) ? twos_neg(b.v) : b.v;
          u256 q = ua / ub;
          r = (is_neg(a.v) != is_neg(b.v)) ? twos_neg(q) : q;
        }
        push(merge2(a, b, r));
        ++pc;
        break;
      }
      case OP_MOD: {
        if (!need(2)) return fault(VmException::StackErr);
        Word a = pop(), b = pop();
        push(merge2(a, b, b.v == 0 ? u256(0) : a.v % b.v));
        ++pc;
        break;
      }
      case OP_EXP: {
        if (!need(2)) return fault(VmException::StackErr);
        Word a = pop(), b = pop();
        u256 base = a.v, exp = b.v, r = 1;
        while (exp != 0) {
          if ((exp & 1) != 0) r *= base;
          base *= base;
          exp >>= 1;
        }
        push(merge2(a, b, r));
        ++pc;
        break;
      }
      case OP_LT: {
        if (!need(2)) return fault(VmException::StackErr);
        Word a = pop(), b = pop();
        Word w = merge2(a, b, a.v < b.v ? 1 : 0);
        w.sym = sym_binary(ctx, SymOp::Lt, a, b);
        push(std::move(w));
        ++pc;
        break;
      }
      case OP_GT: {
        if (!need(2)) return fault(VmException::StackErr);
        Word a = pop(), b = pop();
        Word w = merge2(a, b, a.v > b.v ? 1 : 0);
        w.sym = sym_binary(ctx, SymOp::Gt, a, b);
        push(std::move(w));
        ++pc;
        break;
      }
      case OP_SLT: {
        if (!need(2)) return fault(VmException::StackErr);
        Word a = pop(), b = pop();
        push(merge2(a, b, (a.v ^ kSignBit) < (b.v ^ kSignBit) ? 1 : 0));
        ++pc;
        break;
      }
      case OP_SGT: {
        if (!need(2)) return fault(VmException::StackErr);
        Word a = pop(), b = pop();
        push(merge2(a, b, (a.v ^ kSignBit) > (b.v ^ kSignBit) ? 1 : 0));
        ++pc;
        break;
      }
      case OP_EQ: {
        if (!need(2)) return fault(VmException::StackErr);
        Word a = pop(), b = pop();
        Word w = merge2(a, b, a.v == b.v ? 1 : 0);
        w.sym = sym_binary(ctx, SymOp::Eq, a, b);
        push(std::move(w));
        ++pc;
        break;
      }
      case OP_ISZERO: {
        if (!need(1)) return fault(VmException::StackErr);
        Word a = pop();
        Word w = merge1(a, a.v == 0 ? 1 : 0);
        w.sym = sym_unary(ctx, SymOp::IsZero, a);
        push(std::move(w));
        ++pc;
        break;
      }
      case OP_AND: {
        if (!need(2)) return fault(VmException::StackErr);
        Word a = pop(), b = pop();
        Word w = merge2(a, b, a.v & b.v);
        w.sym = sym_binary(ctx, SymOp::And, a, b);
        push(std::move(w));
        ++pc;
        break;
      }
      case OP_OR: {
        if (!need(2)) return fault(VmException::StackErr);
        Word a = pop(), b = pop();
        Word w = merge2(a, b, a.v | b.v);
        w.sym = sym_binary(ctx, SymOp::Or, a, b);
        push(std::move(w));
        ++pc;
        break;
      }
      case OP_XOR: {
        if (!need(2)) return fault(VmException::StackErr);
        Word a = pop(), b = pop();
        Word w = merge2(a, b, a.v ^ b.v);
        w.sym = sym_binary(ctx, SymOp::Xor, a, b);
        push(std::move(w));
        ++pc;
        break;
      }
      case OP_NOT: {
        if (!need(1)) return fault(VmException::StackErr);
        Word a = pop();
        Word w = merge1(a, ~a.v);
        w.sym = sym_unary(ctx, SymOp::Not, a);
        push(std::move(w));
        ++pc;
        break;
      }
      case OP_BYTE: {
        if (!need(2)) return fault(VmException::StackErr);
        Word i = pop(), x = pop();
        u256 r = 0;
        if (i.v < 32) r = (x.v >> (8 * (31 - to_u64(i.v)))) & 0xff;
        push(merge2(i, x, r));
        ++pc;
        break;
      }
      case OP_SHL: {
        if (!need(2)) return fault(VmException::StackErr);
        Word shift = pop(), value = pop();
        u256 r = shift.v >= 256 ? u256(0) : value.v << to_u64(shift.v);
        Word w = merge2(shift, value, r);
        if (value.sym && shift.v < 256) {
          auto* bud = budget(ctx);
          if (bud) w.sym = bud->binary(SymOp::Shl, bud->constant(shift.v), value.sym);
        }
        push(std::move(w));
        ++pc;
        break;
      }
      case OP_SHR: {
        if (!need(2)) return fault(VmException::StackErr);
        Word shift = pop(), value = pop();
        u256 r = shift.v >= 256 ? u256(0) : value.v >> to_u64(shift.v);
        Word w = merge2(shift, value, r);
        if (value.sym && shift.v < 256) {
          auto* bud = budget(ctx);
          if (bud) w.sym = bud->binary(SymOp::Shr, bud->constant(shift.v), value.sym);
        }
        push(std::move(w));
        ++pc;
        break;
      }

      case OP_KECCAK256: {
        if (!need(2)) return fault(VmException::StackErr);
        Word off = pop(), len = pop();
        if (!mem.touch(off.v, len.v)) return fault(VmException::OutOfGas);
        size_t o = to_u64(off.v), n = to_u64(len.v);
        u256 h = keccak256_u256(bytes(mem.data.begin() + o, mem.data.begin() + o + n));
        Word w;
        w.v = h;
        // shadow words covering the whole input turn the hash into an opaque node
        auto* bud = budget(ctx);
        if (bud && n > 0 && n % 32 == 0) {
          std::vector<SymPtr> kids;
          bool all = true;
          for (size_t k = 0; k < n; k += 32) {
            auto it = mem.shadow.find(o + k);
            if (it == mem.shadow.end()) {
              all = false;
              break;
            }
            kids.push_back(it->second);
          }
          if (all && !kids.empty()) w.sym = bud->keccak(std::move(kids));
        }
        push(std::move(w));
        ++pc;
        break;
      }

      case OP_ADDRESS:
        if (stack.size() >= kMaxStack) return fault(VmException::StackErr);
        push_val(address_to_u256(in.self));
        ++pc;
        break;
      case OP_BALANCE: {
        if (!need(1)) return fault(VmException::StackErr);
        Word a = pop();
        push(merge1(a, ctx.world.balance(address_from_u256(a.v))));
        ++pc;
        break;
      }
      case OP_ORIGIN:
        if (stack.size() >= kMaxStack) return fault(VmException::StackErr);
        push_val(address_to_u256(ctx.env.caller));
        ++pc;
        break;
      case OP_CALLER:
        if (stack.size() >= kMaxStack) return fault(VmException::StackErr);
        push_val(address_to_u256(in.caller));
        ++pc;
        break;
      case OP_CALLVALUE: {
        if (stack.size() >= kMaxStack) return fault(VmException::StackErr);
        Word w;
        w.v = in.value;
        if (const auto* src = tx_sources(ctx); src && src->call_value && in.depth == 1) {
          auto* bud = budget(ctx);
          w.sym = bud->variable({ctx.params.symbolic->current_tx, symexec::VarKind::CallValue, 0});
        }
        push(std::move(w));
        ++pc;
        break;
      }
      case OP_CALLDATALOAD: {
        if (!need(1)) return fault(VmException::StackErr);
        Word off = pop();
        u256 v = 0;
        if (off.v <= in.calldata->size()) {
          size_t o = to_u64(off.v);
          uint8_t buf[32] = {};
          size_t n = std::min<size_t>(32, in.calldata->size() - o);
          std::copy(in.calldata->begin() + o, in.calldata->begin() + o + n, buf);
          v = u256_from_be(buf, 32);
        }
        Word w;
        w.v = v;
        w.taint = kTaintCalldata;
        if (const auto* src = tx_sources(ctx);
            src && in.depth == 1 && off.v >= 4 && (off.v - 4) % 32 == 0) {
          uint64_t idx = to_u64((off.v - 4) / 32);
          if (idx < 0x10000 && src->calldata_words.count(static_cast<uint16_t>(idx))) {
            auto* bud = budget(ctx);
            w.sym = bud->variable({ctx.params.symbolic->current_tx,
                                   symexec::VarKind::CalldataWord,
                                   static_cast<uint16_t>(idx)});
          }
        }
        push(std::move(w));
        ++pc;
        break;
      }
      case OP_CALLDATASIZE:
        if (stack.size() >= kMaxStack) return fault(VmException::StackErr);
        push_val(in.calldata->size());
        ++pc;
        break;
      case OP_CALLDATACOPY: {
        if (!need(3)) return fault(VmException::StackErr);
        Word dst = pop(), src = pop(), len = pop();
        if (!mem.touch(dst.v, len.v)) return fault(VmException::OutOfGas);
        size_t d = to_u64(dst.v), n = to_u64(len.v);
        mem.invalidate(d, n);
        for (size_t i = 0; i < n; ++i) {
          u256 so = src.v + i;
          mem.data[d + i] =
              (so >= src.v && so < in.calldata->size()) ? (*in.calldata)[to_u64(so)] : 0;
        }
        ++pc;
        break;
      }
      case OP_EXTCODESIZE: {
        if (!need(1)) return fault(VmException::StackErr);
        Word a = pop();
        Address addr = address_from_u256(a.v);
        u256 size;
        auto ov = ctx.env.ext_code_size_override.find(addr);
        if (ov != ctx.env.ext_code_size_override.end()) {
          size = ov->second;
        } else {
          const Account* acc = ctx.world.find(addr);
          size = acc ? acc->code.code.size() : 0;
        }
        push(merge1(a, size));
        ++pc;
        break;
      }
      case OP_RETURNDATASIZE: {
        if (stack.size() >= kMaxStack) return fault(VmException::StackErr);
        u256 size = ctx.env.return_data_size_override
                        ? *ctx.env.return_data_size_override
                        : u256(return_data.size());
        push_val(size);
        ++pc;
        break;
      }
      case OP_RETURNDATACOPY: {
        if (!need(3)) return fault(VmException::StackErr);
        Word dst = pop(), src = pop(), len = pop();
        u256 reported = ctx.env.return_data_size_override
                            ? *ctx.env.return_data_size_override
                            : u256(return_data.size());
        if (src.v + len.v > reported) return fault(VmException::InvalidOp);
        if (!mem.touch(dst.v, len.v)) return fault(VmException::OutOfGas);
        size_t d = to_u64(dst.v), n = to_u64(len.v);
        mem.invalidate(d, n);
        for (size_t i = 0; i < n; ++i) {
          u256 so = src.v + i;
          mem.data[d + i] = so < return_data.size() ? return_data[to_u64(so)] : 0;
        }
        ++pc;
        break;
      }
      case OP_TIMESTAMP: {
        if (stack.size() >= kMaxStack) return fault(VmException::StackErr);
        Word w;
        w.v = ctx.env.timestamp;
        w.taint = kTaintBlockData;
        if (const auto* src = tx_sources(ctx); src && src->timestamp) {
          auto* bud = budget(ctx);
          w.sym = bud->variable({ctx.params.symbolic->current_tx, symexec::VarKind::Timestamp, 0});
        }
        push(std::move(w));
        ++pc;
        break;
      }
      case OP_NUMBER: {
        if (stack.size() >= kMaxStack) return fault(VmException::StackErr);
        Word w;
        w.v = ctx.env.block_number;
        w.taint = kTaintBlockData;
        if (const auto* src = tx_sources(ctx); src && src->block_number) {
          auto* bud = budget(ctx);
          w.sym =
              bud->variable({ctx.params.symbolic->current_tx, symexec::VarKind::BlockNumber, 0});
        }
        push(std::move(w));
        ++pc;
        break;
      }
      case OP_GASLIMIT:
        if (stack.size() >= kMaxStack) return fault(VmException::StackErr);
        push_val(ctx.env.gas_limit);
        ++pc;
        break;
      case OP_GAS:
        if (stack.size() >= kMaxStack) return fault(VmException::StackErr);
        push_val(ctx.gas);
        ++pc;
        break;

      case OP_POP:
        if (!need(1)) return fault(VmException::StackErr);
        pop();
        ++pc;
        break;
      case OP_MLOAD: {
        if (!need(1)) return fault(VmException::StackErr);
        Word off = pop();
        if (!mem.touch(off.v, 32)) return fault(VmException::OutOfGas);
        size_t o = to_u64(off.v);
        Word w;
        w.v = mem.load_word(o);
        auto it = mem.shadow.find(o);
        if (it != mem.shadow.end()) w.sym = it->second;
        push(std::move(w));
        ++pc;
        break;
      }
      case OP_MSTORE: {
        if (!need(2)) return fault(VmException::StackErr);
        Word off = pop(), val = pop();
        if (!mem.touch(off.v, 32)) return fault(VmException::OutOfGas);
        size_t o = to_u64(off.v);
        mem.store_word(o, val.v);
        if (val.sym) mem.shadow[o] = val.sym;
        ++pc;
        break;
      }
      case OP_MSTORE8: {
        if (!need(2)) return fault(VmException::StackErr);
        Word off = pop(), val = pop();
        if (!mem.touch(off.v, 1)) return fault(VmException::OutOfGas);
        size_t o = to_u64(off.v);
        mem.invalidate(o, 1);
        mem.data[o] = static_cast<uint8_t>(val.v & 0xff);
        ++pc;
        break;
      }

      case OP_SLOAD: {
        if (!need(1)) return fault(VmException::StackErr);
        Word slot = pop();
        ctx.trace.storage_reads.push_back({ctx.order(), in.self, slot.v});
        Word w;
        w.v = ctx.world.storage_at(in.self, slot.v);
        if (ctx.slot_unpriv(in.self, slot.v)) w.taint |= kTaintUnprivStorage;
        push(std::move(w));
        ++pc;
        break;
      }
      case OP_SSTORE: {
        if (in.is_static) return fault(VmException::InvalidOp);
        if (!need(2)) return fault(VmException::StackErr);
        Word slot = pop(), val = pop();
        ctx.world.get_or_create(in.self).storage[slot.v] = val.v;
        ctx.trace.storage_writes.push_back({ctx.order(), in.self, slot.v});
        if (val.taint & kTaintWrapped)
          ctx.trace.wrap_sinks.push_back({ctx.trace.next_order, val.wrap_pc});
        if (!ctx.sender_privileged) {
          auto key = std::make_pair(in.self, slot.v);
          bool known = (ctx.params.unpriv_written && ctx.params.unpriv_written->count(key)) ||
                       std::find(ctx.unpriv_log.begin(), ctx.unpriv_log.end(), key) !=
                           ctx.unpriv_log.end();
          if (!known) ctx.unpriv_log.push_back(key);
        }
        ++pc;
        break;
      }

      case OP_JUMP: {
        if (!need(1)) return fault(VmException::StackErr);
        Word dest = pop();
        if (!in.code->valid_jumpdest(dest.v)) return fault(VmException::InvalidOp);
        pc = to_u64(dest.v);
        break;
      }
      case OP_JUMPI: {
        if (!need(2)) return fault(VmException::StackErr);
        Word dest = pop(), cond = pop();
        bool taken = cond.v != 0;
        ctx.trace.branch_edges.push_back({in.code_owner, static_cast<uint32_t>(pc), taken});
        if (cond.call_mask)
          ctx.trace.jumpi_status_uses.push_back({ctx.trace.next_order, cond.call_mask});
        if (cond.taint & kTaintBlockData)
          ctx.trace.blockdata_branches.push_back(
              {ctx.trace.next_order, static_cast<uint32_t>(pc)});
        if (auto* sym = ctx.params.symbolic) {
          SymPtr pred = cond.sym ? cond.sym : sym->budget.constant(cond.v);
          sym->path.push_back({sym->current_tx, static_cast<uint32_t>(pc), pred, taken});
        }
        if (taken) {
          if (!in.code->valid_jumpdest(dest.v)) return fault(VmException::InvalidOp);
          pc = to_u64(dest.v);
        } else {
          ++pc;
        }
        break;
      }
      case OP_PC:
        if (stack.size() >= kMaxStack) return fault(VmException::StackErr);
        push_val(pc);
        ++pc;
        break;
      case OP_JUMPDEST:
        ++pc;
        break;

      case OP_CALL:
      case OP_DELEGATECALL:
      case OP_STATICCALL: {
        size_t argc = (op == OP_CALL) ? 7 : 6;
        if (!need(argc)) return fault(VmException::StackErr);
        pop();  // gas argument ignored: one shared gas pool per transaction
        Word target_word = pop();
        Word value_word;
        if (op == OP_CALL) value_word = pop();
        Word in_off = pop(), in_len = pop(), out_off = pop(), out_len = pop();

        if (!mem.touch(in_off.v, in_len.v) || !mem.touch(out_off.v, out_len.v))
          return fault(VmException::OutOfGas);

        Address target = address_from_u256(target_word.v);
        u256 value = (op == OP_CALL) ? value_word.v : u256(0);
        if (op == OP_CALL && in.is_static && value != 0) return fault(VmException::InvalidOp);

        CallKind kind = op == OP_CALL              ? CallKind::Call
                        : op == OP_DELEGATECALL    ? CallKind::DelegateCall
                                                   : CallKind::StaticCall;
        if (op == OP_DELEGATECALL &&
            (target_word.taint & (kTaintCalldata | kTaintUnprivStorage))) {
          ctx.trace.tainted_delegatecalls.push_back(
              {ctx.trace.next_order, static_cast<uint32_t>(pc)});
        }

        uint32_t order = ctx.order();
        bool success = false;
        return_data.clear();

        if (in.depth >= kMaxCallDepth) {
          success = false;
        } else {
          Snapshot snap = take_snapshot(ctx);
          bool transferred =
              op != OP_CALL || do_transfer(ctx, in.self, target, value, static_cast<uint32_t>(pc));
          if (!transferred) {
            success = false;
          } else {
            const Account* callee = ctx.world.find(target);
            bool has_code = callee && !callee->code.empty();
            if (has_code) {
              Bytecode callee_code = callee->code;  // stable across state mutation
              bytes inner_calldata(mem.data.begin() + to_u64(in_off.v),
                                   mem.data.begin() + to_u64(in_off.v) + to_u64(in_len.v));
              FrameInput inner;
              if (op == OP_DELEGATECALL) {
                inner = {in.self,  target,          &callee_code, in.caller,
                         in.value, &inner_calldata, in.is_static, in.depth + 1};
              } else {
                inner = {target, target,          &callee_code,
                         in.self, value,           &inner_calldata,
                         op == OP_STATICCALL || in.is_static, in.depth + 1};
              }
              FrameResult r = run_frame(ctx, inner);
              if (r.ok) {
                success = true;
                return_data = std::move(r.ret);
              } else {
                restore_snapshot(ctx, std::move(snap));
                success = false;
              }
            } else {
              // codeless account: plain value sink, optionally a scripted counterparty
              success = true;
              if (op == OP_CALL && !in.is_static && ctx.params.counterparty &&
                  ctx.params.counterparty->address == target && !ctx.script_used) {
                run_counterparty_script(ctx, *ctx.params.counterparty,
                                        static_cast<uint32_t>(pc), in.depth + 1);
              }
            }
          }
        }

        if (success && value > 0 && (value_word.taint & kTaintWrapped))
          ctx.trace.wrap_sinks.push_back({ctx.trace.next_order, value_word.wrap_pc});

        u256 status = success ? 1 : 0;
        if (ctx.env.call_return_override) status = *ctx.env.call_return_override;
        bool reported = status != 0;
        uint32_t id = ctx.next_call_id++ % 32;
        uint32_t mask = 1u << id;
        ctx.trace.external_calls.push_back(
            {order, kind, target, value, reported, static_cast<uint32_t>(pc),
             static_cast<uint16_t>(in.depth), mask});

        // copy return data into the requested window
        size_t n = std::min<size_t>(to_u64(out_len.v), return_data.size());
        if (n > 0) {
          mem.invalidate(to_u64(out_off.v), n);
          std::copy(return_data.begin(), return_data.begin() + n,
                    mem.data.begin() + to_u64(out_off.v));
        }

        Word w;
        w.v = status;
        w.call_mask = mask;
        if (target_word.taint & (kTaintCalldata | kTaintUnprivStorage)) {
          w.taint |= target_word.taint & (kTaintCalldata | kTaintUnprivStorage);
        }
        push(std::move(w));
        ++pc;
        break;
      }

      case OP_RETURN:
      case OP_REVERT: {
        if (!need(2)) return fault(VmException::StackErr);
        Word off = pop(), len = pop();
        if (!mem.touch(off.v, len.v)) return fault(VmException::OutOfGas);
        bytes out(mem.data.begin() + to_u64(off.v),
                  mem.data.begin() + to_u64(off.v) + to_u64(len.v));
        if (op == OP_RETURN) return FrameResult{true, VmException::None, std::move(out)};
        return FrameResult{false, VmException::Revert, std::move(out)};
      }
      case OP_INVALID:
        return fault(VmException::AssertFail);
      case OP_SELFDESTRUCT: {
        if (in.is_static) return fault(VmException::InvalidOp);
        if (!need(1)) return fault(VmException::StackErr);
        Word ben = pop();
        Address beneficiary = address_from_u256(ben.v);
        Account& self_acc = ctx.world.get_or_create(in.self);
        u256 bal = self_acc.balance;
        uint32_t order = ctx.order();
        if (bal > 0 && beneficiary != in.self) {
          self_acc.balance = 0;
          ctx.world.get_or_create(beneficiary).balance += bal;
          ctx.trace.ether_transfers.push_back(
              {ctx.order(), in.self, beneficiary, bal, static_cast<uint32_t>(pc)});
        }
        ctx.trace.selfdestructs.push_back(
            {order, in.self, beneficiary, static_cast<uint32_t>(pc)});
        // code and storage vanish immediately; later calls see a plain account
        self_acc.code = Bytecode{};
        self_acc.storage.clear();
        return FrameResult{true, VmException::None, {}};
      }

      default:
        throw UnknownOpcodeError(op, static_cast<uint32_t>(pc));
    }
  }
}

}  // namespace

std::pair<ExecutionTrace, WorldState> execute_transaction(const WorldState& state,
                                                          const Address& to,
                                                          const bytes& calldata,
                                                          const Environment& env,
                                                          const ExecParams& params) {
  ExecutionTrace trace;
  WorldState work = state;
  for (const auto& [addr, bal] : env.balance_overrides) work.get_or_create(addr).balance = bal;

  TxCtx ctx{work, env, params, trace, env.gas_limit};
  ctx.sender_privileged = params.privileged && params.privileged->count(env.caller) > 0;

  // A transaction that cannot pay its own value fails up front, EVM-style.
  if (work.balance(env.caller) < env.call_value) {
    trace.exception = VmException::Revert;
    return {std::move(trace), state};
  }
  if (env.call_value > 0) {
    work.get_or_create(env.caller).balance -= env.call_value;
    work.get_or_create(to).balance += env.call_value;
    trace.ether_transfers.push_back({ctx.order(), env.caller, to, env.call_value, 0});
  }

  const Account* target = work.find(to);
  if (target && !target->code.empty()) {
    Bytecode code = target->code;
    FrameInput top{to, to, &code, env.caller, env.call_value, &calldata, false, 1};
    FrameResult r = run_frame(ctx, top);
    trace.gas_used = env.gas_limit - ctx.gas;
    if (!r.ok) {
      trace.exception = r.fault;
      return {std::move(trace), state};
    }
  } else {
    trace.max_call_depth = std::max<uint32_t>(trace.max_call_depth, 1);
  }

  if (params.unpriv_written)
    for (const auto& key : ctx.unpriv_log) params.unpriv_written->insert(key);
  return {std::move(trace), std::move(work)};
}

u256 trace_hash(const ExecutionTrace& t) {
  bytes buf;
  auto put32 = [&](uint32_t v) {
    for (int i = 0; i < 4; ++i) buf.push_back(static_cast<uint8_t>(v >> (8 * i)));
  };
  auto put_addr = [&](const Address& a) { buf.insert(buf.end(), a.raw.begin(), a.raw.end()); };
  auto put_u256 = [&](const u256& v) {
    auto b = u256_to_be32(v);
    buf.insert(buf.end(), b.begin(), b.end());
  };
  for (const auto& e : t.instr_sites) {
    put_addr(e.addr);
    put32(e.pc);
    buf.push_back(e.opcode);
  }
  for (const auto& e : t.branch_edges) {
    put_addr(e.addr);
    put32(e.pc);
    buf.push_back(e.taken ? 1 : 0);
  }
  for (const auto& e : t.storage_writes) {
    put32(e.order);
    put_addr(e.addr);
    put_u256(e.slot);
  }
  for (const auto& e : t.storage_reads) {
    put32(e.order);
    put_addr(e.addr);
    put_u256(e.slot);
  }
  for (const auto& e : t.external_calls) {
    put32(e.order);
    buf.push_back(static_cast<uint8_t>(e.kind));
    put_addr(e.target);
    put_u256(e.value);
    buf.push_back(e.success ? 1 : 0);
  }
  for (const auto& e : t.ether_transfers) {
    put32(e.order);
    put_addr(e.from);
    put_addr(e.to);
    put_u256(e.amount);
  }
  for (const auto& e : t.selfdestructs) {
    put32(e.order);
    put_addr(e.addr);
    put_addr(e.beneficiary);
  }
  buf.push_back(static_cast<uint8_t>(t.exception));
  put32(t.max_call_depth);
  put32(static_cast<uint32_t>(t.gas_used));
  put32(static_cast<uint32_t>(t.gas_used >> 32));
  return keccak256_u256(buf);
}

}  // namespace llama::vm
