#pragma once

#include <cstdint>
#include <map>
#include <memory>
#include <set>
#include <string>
#include <vector>

#include "llama/types.hpp"

namespace llama::symexec {

enum class SymOp : uint8_t {
  Const,
  Var,
  Add,
  Sub,
  Mul,
  Div,
  And,
  Or,
  Xor,
  Not,
  Shl,
  Shr,
  Lt,
  Gt,
  Eq,
  IsZero,
  Keccak,  // opaque: never solved, only equality-propagated / evaluated concretely
};

enum class VarKind : uint8_t { CalldataWord, Timestamp, BlockNumber, CallValue };

struct VarId {
  uint16_t tx = 0;
  VarKind kind = VarKind::CalldataWord;
  uint16_t index = 0;  // static argument word index; unused for env vars

  bool operator<(const VarId& o) const {
    if (tx != o.tx) return tx < o.tx;
    if (kind != o.kind) return kind < o.kind;
    return index < o.index;
  }
  bool operator==(const VarId& o) const {
    return tx == o.tx && kind == o.kind && index == o.index;
  }
};

struct SymExpr;
using SymPtr = std::shared_ptr<const SymExpr>;

struct SymExpr {
  SymOp op;
  u256 cval;               // Const payload
  VarId var;               // Var payload
  SymPtr a, b;             // unary/binary children
  std::vector<SymPtr> kids;  // Keccak input words
};

// Expression factory with a node budget. All creation goes through one
// session so a single trace cannot blow up memory; once the budget trips
// every further make_* returns null and the collector reports the overrun.
class ExprBudget {
 public:
  explicit ExprBudget(size_t max_nodes) : max_nodes_(max_nodes) {}

  SymPtr constant(const u256& v);
  SymPtr variable(VarId id);
  SymPtr unary(SymOp op, SymPtr a);
  SymPtr binary(SymOp op, SymPtr a, SymPtr b);
  SymPtr keccak(std::vector<SymPtr> kids);

  bool exceeded() const { return exceeded_; }
  size_t nodes() const { return nodes_; }

 private:
  SymPtr account(SymPtr e);
  size_t max_nodes_;
  size_t nodes_ = 0;
  bool exceeded_ = false;
};

// Evaluates an expression under a concrete assignment; unassigned vars read 0.
// Keccak nodes evaluate with the real hash, which keeps trial-search sound.
u256 eval_expr(const SymExpr& e, const std::map<VarId, u256>& assignment);

void collect_vars(const SymExpr& e, std::set<VarId>& out);

std::string expr_to_string(const SymExpr& e);

}  // namespace llama::symexec
