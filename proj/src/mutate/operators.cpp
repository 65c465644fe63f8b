#include "llama/keccak.hpp"
#include "llama/mutate/mutate.hpp"

namespace llama::mutate {

const char* operator_name(OperatorId op) {
  switch (op) {
    case OperatorId::Arguments: return "arguments";
    case OperatorId::Account: return "account";
    case OperatorId::TxAmount: return "tx_amount";
    case OperatorId::GasLimit: return "gas_limit";
    case OperatorId::Timestamp: return "timestamp";
    case OperatorId::BlockNumber: return "block_number";
    case OperatorId::Balance: return "balance";
    case OperatorId::CallReturnValue: return "call_return_value";
    case OperatorId::ReturnDataSize: return "return_data_size";
    case OperatorId::ExtCodeSize: return "ext_code_size";
  }
  return "?";
}

namespace {

using abi::AbiType;
using abi::TypeKind;
using corpus::Transaction;

const abi::FunctionDescriptor* find_fd(const MutationContext& ctx, const std::string& name) {
  if (!ctx.fds) return nullptr;
  for (const auto& fd : *ctx.fds)
    if (fd.name == name) return &fd;
  return nullptr;
}

u256 width_mask(uint16_t bits) {
  return bits >= 256 ? u256_max() : (u256(1) << bits) - 1;
}

std::string mutate_int_literal(const AbiType& t, const std::string& lit, Rng& rng) {
  uint16_t bits = t.kind == TypeKind::Addr ? 160 : t.bits;
  u256 mask = width_mask(bits);
  u256 cur = 0;
  try {
    cur = abi::parse_literal(t, lit, true).num;
  } catch (const std::exception&) {
    cur = 0;
  }
  u256 next = cur;
  switch (rng.below(4)) {
    case 0:  // bitflip within the type width
      next = cur ^ (u256(1) << rng.below(bits));
      break;
    case 1:  // +/-1
      next = rng.below(2) ? cur + 1 : cur - 1;
      break;
    case 2: {  // boundary
      static const int kBoundaries = 4;
      switch (rng.below(kBoundaries)) {
        case 0: next = 0; break;
        case 1: next = 1; break;
        case 2: next = mask; break;
        case 3: next = keccak256_u256(bytes{static_cast<uint8_t>(bits)}); break;
      }
      break;
    }
    case 3:  // random
      next = rng.word();
      break;
  }
  next &= mask;
  if (t.kind == TypeKind::Int && bits < 256 && (next >> (bits - 1)) != 0)
    next |= ~mask;  // keep the canonical sign-extended pattern
  if (t.kind == TypeKind::Int) {
    // render negative patterns with a sign so literals stay readable
    if ((next >> 255) != 0) return "-" + u256_to_dec(~next + 1);
  }
  return u256_to_dec(next & (t.kind == TypeKind::Int ? u256_max() : mask));
}

std::string mutate_bytes_literal(const AbiType& t, const std::string& lit, Rng& rng) {
  bytes b;
  try {
    b = abi::parse_literal(t, lit, true).data;
  } catch (const std::exception&) {
  }
  switch (rng.below(3)) {
    case 0:  // flip one byte
      if (!b.empty()) {
        b[rng.below(b.size())] ^= static_cast<uint8_t>(1 + rng.below(255));
        break;
      }
      [[fallthrough]];
    case 1:  // append
      if (t.kind != TypeKind::FixedBytes || b.size() < t.nbytes)
        b.push_back(static_cast<uint8_t>(rng.below(256)));
      else if (!b.empty())
        b[rng.below(b.size())] ^= 0xff;
      break;
    case 2:  // shrink
      if (t.kind != TypeKind::FixedBytes && !b.empty()) b.pop_back();
      break;
  }
  if (t.kind == TypeKind::FixedBytes) b.resize(t.nbytes, 0);
  if (t.kind == TypeKind::String) {
    for (auto& c : b) c = static_cast<uint8_t>('a' + c % 26);
    return "\"" + std::string(b.begin(), b.end()) + "\"";
  }
  return "0x" + to_hex(b);
}

std::string mutate_literal(const AbiType& t, const std::string& lit, const MutationContext& ctx,
                           Rng& rng) {
  switch (t.kind) {
    case TypeKind::Uint:
    case TypeKind::Int:
      return mutate_int_literal(t, lit, rng);
    case TypeKind::Addr: {
      // swap among the configured accounts plus the contract and zero
      std::vector<Address> pool = ctx.accounts;
      pool.push_back(ctx.contract);
      pool.push_back(Address{});
      return to_hex(pool[rng.below(pool.size())]);
    }
    case TypeKind::Bool: {
      auto v = abi::parse_literal(t, lit, true);
      return v.num == 0 ? "true" : "false";
    }
    case TypeKind::FixedBytes:
    case TypeKind::Bytes:
    case TypeKind::String:
      return mutate_bytes_literal(t, lit, rng);
    case TypeKind::Array: {
      abi::AbiValue v;
      try {
        v = abi::parse_literal(t, lit, true);
      } catch (const std::exception&) {
      }
      if (v.elems.empty() || rng.below(3) == 0) {
        v.elems.push_back(abi::AbiValue::of(rng.below(2)));
      } else {
        size_t i = rng.below(v.elems.size());
        std::string elem_lit = abi::literal_of(*t.elem, v.elems[i]);
        v.elems[i] = abi::parse_literal(*t.elem, mutate_literal(*t.elem, elem_lit, ctx, rng), true);
      }
      return abi::literal_of(t, v);
    }
  }
  return lit;
}

u256 amount_palette(const u256& cur, const u256& max, Rng& rng) {
  switch (rng.below(5)) {
    case 0: return 0;
    case 1: return 1;
    case 2: return max;
    case 3: return cur * 2;
    default: return cur / 2;
  }
}

}  // namespace

void apply(OperatorId op, corpus::Seed& seed, const MutationContext& ctx, Rng& rng) {
  if (seed.txs.empty()) throw InapplicableOperator("empty seed");

  switch (op) {
    case OperatorId::Arguments: {
      std::vector<size_t> candidates;
      for (size_t i = 0; i < seed.txs.size(); ++i) {
        const auto* fd = find_fd(ctx, seed.txs[i].function);
        if (fd && !fd->inputs.empty()) candidates.push_back(i);
      }
      if (candidates.empty()) throw InapplicableOperator("no transaction takes arguments");
      Transaction& tx = seed.txs[candidates[rng.below(candidates.size())]];
      const auto* fd = find_fd(ctx, tx.function);
      tx.args.resize(fd->inputs.size());
      size_t arg = rng.below(fd->inputs.size());
      tx.args[arg] = mutate_literal(fd->inputs[arg], tx.args[arg], ctx, rng);
      break;
    }
    case OperatorId::Account: {
      if (ctx.accounts.size() < 2) throw InapplicableOperator("single-account pool");
      Transaction& tx = seed.txs[rng.below(seed.txs.size())];
      int next = static_cast<int>(rng.below(ctx.accounts.size() - 1));
      if (next >= tx.sender) ++next;  // pick a different sender
      tx.sender = next;
      break;
    }
    case OperatorId::TxAmount: {
      Transaction& tx = seed.txs[rng.below(seed.txs.size())];
      tx.value = amount_palette(tx.value, ctx.value_max, rng);
      break;
    }
    case OperatorId::GasLimit: {
      Transaction& tx = seed.txs[rng.below(seed.txs.size())];
      uint64_t cur = tx.env.gas_limit.value_or(ctx.gas_default);
      switch (rng.below(4)) {
        case 0: tx.env.gas_limit = cur / 2; break;
        case 1: tx.env.gas_limit = cur ? cur - 1 : 0; break;
        case 2: tx.env.gas_limit = 10; break;  // minimal: a handful of instructions
        case 3: tx.env.gas_limit = 1000000; break;
      }
      break;
    }
    case OperatorId::Timestamp: {
      Transaction& tx = seed.txs[rng.below(seed.txs.size())];
      uint64_t cur = tx.env.timestamp.value_or(ctx.timestamp_default);
      switch (rng.below(4)) {
        case 0: tx.env.timestamp = cur + 1; break;
        case 1: tx.env.timestamp = cur ? cur - 1 : 0; break;
        case 2: tx.env.timestamp = cur + 86400; break;
        case 3: tx.env.timestamp = 1 + rng.below(uint64_t(1) << 40); break;
      }
      break;
    }
    case OperatorId::BlockNumber: {
      Transaction& tx = seed.txs[rng.below(seed.txs.size())];
      uint64_t cur = tx.env.block_number.value_or(ctx.block_default);
      switch (rng.below(4)) {
        case 0: tx.env.block_number = cur + 1; break;
        case 1: tx.env.block_number = cur ? cur - 1 : 0; break;
        case 2: tx.env.block_number = cur + 1000; break;
        case 3: tx.env.block_number = 1 + rng.below(uint64_t(1) << 32); break;
      }
      break;
    }
    case OperatorId::Balance: {
      Transaction& tx = seed.txs[rng.below(seed.txs.size())];
      std::vector<Address> pool = ctx.accounts;
      pool.push_back(ctx.contract);
      Address target = pool[rng.below(pool.size())];
      u256 cur = tx.env.balance_overrides.count(target) ? tx.env.balance_overrides[target]
                                                        : ctx.value_max;
      tx.env.balance_overrides[target] = amount_palette(cur, ctx.value_max, rng);
      break;
    }
    case OperatorId::CallReturnValue: {
      Transaction& tx = seed.txs[rng.below(seed.txs.size())];
      switch (rng.below(3)) {
        case 0: tx.env.call_return_override = u256(0); break;
        case 1: tx.env.call_return_override = u256(1); break;
        case 2: tx.env.call_return_override = rng.word(); break;
      }
      break;
    }
    case OperatorId::ReturnDataSize: {
      Transaction& tx = seed.txs[rng.below(seed.txs.size())];
      switch (rng.below(3)) {
        case 0: tx.env.return_data_size_override = u256(0); break;
        case 1: tx.env.return_data_size_override = u256(1); break;
        case 2: tx.env.return_data_size_override = u256(rng.below(1024)); break;
      }
      break;
    }
    case OperatorId::ExtCodeSize: {
      Transaction& tx = seed.txs[rng.below(seed.txs.size())];
      std::vector<Address> pool = ctx.accounts;
      pool.push_back(ctx.contract);
      Address target = pool[rng.below(pool.size())];
      switch (rng.below(3)) {
        case 0: tx.env.ext_code_size_override[target] = 0; break;
        case 1: tx.env.ext_code_size_override[target] = 1; break;
        case 2: tx.env.ext_code_size_override[target] = rng.below(1 << 16); break;
      }
      break;
    }
  }
  seed.origin = corpus::SeedOrigin::Mutation;
  seed.rehash();
}

}  // namespace llama::mutate
