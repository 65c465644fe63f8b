#include "llama/symexec/expr.hpp"

#include "llama/keccak.hpp"

namespace llama::symexec {

SymPtr ExprBudget::account(SymPtr e) {
  if (++nodes_ > max_nodes_) {
    exceeded_ = true;
    return nullptr;
  }
  return e;
}

SymPtr ExprBudget::constant(const u256& v) {
  if (exceeded_) return nullptr;
  auto e = std::make_shared<SymExpr>();
  e->op = SymOp::Const;
  e->cval = v;
  return account(e);
}

SymPtr ExprBudget::variable(VarId id) {
  if (exceeded_) return nullptr;
  auto e = std::make_shared<SymExpr>();
  e->op = SymOp::Var;
  e->var = id;
  return account(e);
}

SymPtr ExprBudget::unary(SymOp op, SymPtr a) {
  if (exceeded_ || !a) return nullptr;
  auto e = std::make_shared<SymExpr>();
  e->op = op;
  e->a = std::move(a);
  return account(e);
}

SymPtr ExprBudget::binary(SymOp op, SymPtr a, SymPtr b) {
  if (exceeded_ || !a || !b) return nullptr;
  auto e = std::make_shared<SymExpr>();
  e->op = op;
  e->a = std::move(a);
  e->b = std::move(b);
  return account(e);
}

SymPtr ExprBudget::keccak(std::vector<SymPtr> kids) {
  if (exceeded_) return nullptr;
  for (const auto& k : kids)
    if (!k) return nullptr;
  auto e = std::make_shared<SymExpr>();
  e->op = SymOp::Keccak;
  e->kids = std::move(kids);
  return account(e);
}

u256 eval_expr(const SymExpr& e, const std::map<VarId, u256>& assignment) {
  const u256 sign_bit = u256(1) << 255;
  (void)sign_bit;
  switch (e.op) {
    case SymOp::Const:
      return e.cval;
    case SymOp::Var: {
      auto it = assignment.find(e.var);
      return it == assignment.end() ? u256(0) : it->second;
    }
    case SymOp::Add:
      return eval_expr(*e.a, assignment) + eval_expr(*e.b, assignment);
    case SymOp::Sub:
      return eval_expr(*e.a, assignment) - eval_expr(*e.b, assignment);
    case SymOp::Mul:
      return eval_expr(*e.a, assignment) * eval_expr(*e.b, assignment);
    case SymOp::Div: {
      u256 d = eval_expr(*e.b, assignment);
      return d == 0 ? u256(0) : eval_expr(*e.a, assignment) / d;
    }
    case SymOp::And:
      return eval_expr(*e.a, assignment) & eval_expr(*e.b, assignment);
    case SymOp::Or:
      return eval_expr(*e.a, assignment) | eval_expr(*e.b, assignment);
    case SymOp::Xor:
      return eval_expr(*e.a, assignment) ^ eval_expr(*e.b, assignment);
    case SymOp::Not:
      return ~eval_expr(*e.a, assignment);
    case SymOp::Shl: {
      u256 s = eval_expr(*e.a, assignment);
      return s >= 256 ? u256(0) : eval_expr(*e.b, assignment) << to_u64(s);
    }
    case SymOp::Shr: {
      u256 s = eval_expr(*e.a, assignment);
      return s >= 256 ? u256(0) : eval_expr(*e.b, assignment) >> to_u64(s);
    }
    case SymOp::Lt:
      return eval_expr(*e.a, assignment) < eval_expr(*e.b, assignment) ? 1 : 0;
    case SymOp::Gt:
      return eval_expr(*e.a, assignment) > eval_expr(*e.b, assignment) ? 1 : 0;
    case SymOp::Eq:
      return eval_expr(*e.a, assignment) == eval_expr(*e.b, assignment) ? 1 : 0;
    case SymOp::IsZero:
      return eval_expr(*e.a, assignment) == 0 ? 1 : 0;
    case SymOp::Keccak: {
      bytes input;
      input.reserve(e.kids.size() * 32);
      for (const auto& k : e.kids) {
        auto w = u256_to_be32(eval_expr(*k, assignment));
        input.insert(input.end(), w.begin(), w.end());
      }
      return keccak256_u256(input);
    }
  }
  return 0;
}

void collect_vars(const SymExpr& e, std::set<VarId>& out) {
  switch (e.op) {
    case SymOp::Var:
      out.insert(e.var);
      return;
    case SymOp::Const:
      return;
    case SymOp::Keccak:
      for (const auto& k : e.kids) collect_vars(*k, out);
      return;
    default:
      if (e.a) collect_vars(*e.a, out);
      if (e.b) collect_vars(*e.b, out);
      return;
  }
}

static const char* op_token(SymOp op) {
  switch (op) {
    case SymOp::Add: return "add";
    case SymOp::Sub: return "sub";
    case SymOp::Mul: return "mul";
    case SymOp::Div: return "div";
    case SymOp::And: return "and";
    case SymOp::Or: return "or";
    case SymOp::Xor: return "xor";
    case SymOp::Not: return "not";
    case SymOp::Shl: return "shl";
    case SymOp::Shr: return "shr";
    case SymOp::Lt: return "lt";
    case SymOp::Gt: return "gt";
    case SymOp::Eq: return "eq";
    case SymOp::IsZero: return "iszero";
    case SymOp::Keccak: return "keccak";
    default: return "?";
  }
}

std::string expr_to_string(const SymExpr& e) {
  switch (e.op) {
    case SymOp::Const:
      return u256_to_hex(e.cval);
    case SymOp::Var: {
      std::string k;
      switch (e.var.kind) {
        case VarKind::CalldataWord: k = "arg"; break;
        case VarKind::Timestamp: k = "timestamp"; break;
        case VarKind::BlockNumber: k = "blocknum"; break;
        case VarKind::CallValue: k = "callvalue"; break;
      }
      return "tx" + std::to_string(e.var.tx) + "." + k +
             (e.var.kind == VarKind::CalldataWord ? std::to_string(e.var.index) : "");
    }
    case SymOp::Keccak: {
      std::string s = "keccak(";
      for (size_t i = 0; i < e.kids.size(); ++i) {
        if (i) s += ",";
        s += expr_to_string(*e.kids[i]);
      }
      return s + ")";
    }
    default: {
      std::string s = std::string(op_token(e.op)) + "(" + expr_to_string(*e.a);
      if (e.b) s += "," + expr_to_string(*e.b);
      return s + ")";
    }
  }
}

}  // namespace llama::symexec
