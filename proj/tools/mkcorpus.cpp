// Generates the bundled contract corpus: one bundle directory per contract,
// each with hex bytecode, its ABI, role metadata, and (for the seeded-bug
// corpus) the expected oracle classes. Usage: mkcorpus <output-dir>

#include <filesystem>
#include <fstream>
#include <iostream>

#include "json.hpp"
#include "llama/abi/abi.hpp"
#include "llama/bundle.hpp"
#include "llama/evmasm.hpp"

using namespace llama;
using namespace llama::vm;
using nlohmann::json;

namespace {

struct FnDef {
  std::string name;
  std::vector<std::string> inputs;
  std::string mutability;  // view | nonpayable | payable
  std::function<void(Asm&)> body;
};

u256 selector_of(const FnDef& fn) {
  std::string sig = fn.name + "(";
  for (size_t i = 0; i < fn.inputs.size(); ++i) {
    if (i) sig += ",";
    sig += fn.inputs[i];
  }
  sig += ")";
  auto sel = abi::selector_for(sig);
  return u256_from_be(sel.data(), 4);
}

// Selector dispatcher with solc-style calldata guards: nonpayable functions
// reject value, the fallback reverts.
bytes build_contract(const std::vector<FnDef>& fns) {
  Asm a;
  a.push(0).op(OP_CALLDATALOAD).push(224).op(OP_SHR);
  for (const auto& fn : fns)
    a.op(OP_DUP1).push_n(4, selector_of(fn)).op(OP_EQ).jumpi_to("fn_" + fn.name);
  a.push(0).push(0).op(OP_REVERT);

  for (const auto& fn : fns) {
    a.jumpdest("fn_" + fn.name).op(OP_POP);
    if (fn.mutability != "payable") {
      a.op(OP_CALLVALUE).op(OP_ISZERO).jumpi_to("ok_" + fn.name);
      a.push(0).push(0).op(OP_REVERT);
      a.jumpdest("ok_" + fn.name);
    }
    fn.body(a);
  }
  return a.build();
}

std::string abi_json(const std::vector<FnDef>& fns) {
  json arr = json::array();
  for (const auto& fn : fns) {
    json inputs = json::array();
    for (const auto& t : fn.inputs) inputs.push_back({{"type", t}});
    arr.push_back({{"type", "function"},
                   {"name", fn.name},
                   {"inputs", inputs},
                   {"stateMutability", fn.mutability}});
  }
  return arr.dump(2);
}

// common body fragments ------------------------------------------------------

void emit_arg(Asm& a, int index) { a.push(4 + 32 * index).op(OP_CALLDATALOAD); }

void emit_require(Asm& a, const std::string& tag) {
  // consumes a condition from the stack, reverts when it is zero
  a.jumpi_to("req_" + tag);
  a.push(0).push(0).op(OP_REVERT);
  a.jumpdest("req_" + tag);
}

// keccak(caller || base) -> per-caller mapping slot on the stack
void emit_caller_slot(Asm& a, uint8_t base) {
  a.op(OP_CALLER).push(0).op(OP_MSTORE);
  a.push(base).push(32).op(OP_MSTORE);
  a.push(64).push(0).op(OP_KECCAK256);
}

// call the caller with the value on top of the stack, require success; the
// value is consumed
void emit_pay_caller(Asm& a, const std::string& tag) {
  // stack: [amount]
  a.push(0).push(0).push(0).push(0);      // out_len out_off in_len in_off
  a.op(OP_DUP1 + 4);                      // DUP5: amount
  a.op(OP_CALLER).push(50000);            // to, gas
  a.op(OP_CALL);
  emit_require(a, tag);
  a.op(OP_POP);  // drop the original amount copy
}

void emit_return_slot(Asm& a, uint8_t slot) {
  a.push(slot).op(OP_SLOAD).push(0).op(OP_MSTORE).push(32).push(0).op(OP_RETURN);
}

// the contracts -------------------------------------------------------------

// AF: a failed assertion reachable after an earlier transaction persisted state.
std::vector<FnDef> af_vault() {
  return {
      {"prime", {"uint256"}, "nonpayable",
       [](Asm& a) {
         emit_arg(a, 0);
         a.push(1).op(OP_SSTORE).op(OP_STOP);
       }},
      {"poke", {"uint256"}, "nonpayable",
       [](Asm& a) {
         emit_arg(a, 0);
         a.push(1).op(OP_EQ).jumpi_to("boom");
         a.op(OP_STOP);
         a.jumpdest("boom").op(OP_INVALID);
       }},
  };
}

// BD: a timestamp-parity branch guards a payout.
std::vector<FnDef> bd_payout() {
  return {
      {"claim", {}, "payable",
       [](Asm& a) {
         a.op(OP_CALLVALUE);
         emit_require(a, "paid");  // must pay in at least 1 wei
         a.push(2).op(OP_TIMESTAMP).op(OP_MOD).op(OP_ISZERO).jumpi_to("pay");
         a.op(OP_STOP);
         a.jumpdest("pay");
         a.push(2);
         emit_pay_caller(a, "sent");
         a.op(OP_STOP);
       }},
  };
}

// IO: unchecked cumulative addition stored back to a slot.
std::vector<FnDef> io_counter() {
  return {
      {"add", {"uint256"}, "nonpayable",
       [](Asm& a) {
         emit_arg(a, 0);
         a.push(0).op(OP_SLOAD).op(OP_ADD);
         a.push(0).op(OP_SSTORE).op(OP_STOP);
       }},
      {"get", {}, "view", [](Asm& a) { emit_return_slot(a, 0); }},
  };
}

// LE: pays the caller from contract funds with no deposit requirement.
std::vector<FnDef> le_gift() {
  return {
      {"withdraw", {}, "nonpayable",
       [](Asm& a) {
         a.push(3);
         emit_pay_caller(a, "sent");
         a.op(OP_STOP);
       }},
  };
}

// FE: accepts value, no value-sending opcode anywhere.
std::vector<FnDef> fe_sink() {
  return {
      {"deposit", {}, "payable", [](Asm& a) { a.op(OP_STOP); }},
      {"peek", {}, "view", [](Asm& a) { emit_return_slot(a, 0); }},
  };
}

// RE: per-caller bank that zeroes the balance only after the payout call.
std::vector<FnDef> re_bank() {
  return {
      {"deposit", {}, "payable",
       [](Asm& a) {
         emit_caller_slot(a, 0);
         a.op(OP_DUP1).op(OP_SLOAD).op(OP_CALLVALUE).op(OP_ADD);
         a.op(OP_SWAP1).op(OP_SSTORE).op(OP_STOP);
       }},
      {"withdraw", {}, "nonpayable",
       [](Asm& a) {
         emit_caller_slot(a, 0);
         a.op(OP_DUP1).op(OP_SLOAD);  // [slot, amt]
         a.op(OP_DUP1).op(OP_ISZERO).jumpi_to("empty");
         // pay first, zero afterwards: the reentrancy window
         a.op(OP_DUP1);
         emit_pay_caller(a, "sent");
         a.op(OP_POP);                       // drop amt
         a.push(0).op(OP_SWAP1).op(OP_SSTORE);  // slot := 0
         a.op(OP_STOP);
         a.jumpdest("empty").op(OP_STOP);
       }},
  };
}

// TD: first claimer wins; any later sender triggers the payout.
std::vector<FnDef> td_race() {
  return {
      {"claim", {}, "payable",
       [](Asm& a) {
         a.op(OP_CALLVALUE);
         emit_require(a, "paid");  // must pay in at least 1 wei
         a.push(0).op(OP_SLOAD).op(OP_ISZERO).jumpi_to("take");
         a.op(OP_STOP);
         a.jumpdest("take");
         a.op(OP_CALLER).push(0).op(OP_SSTORE).op(OP_STOP);
       }},
      {"reward", {}, "nonpayable",
       [](Asm& a) {
         a.push(0).op(OP_SLOAD);
         a.op(OP_DUP1).op(OP_ISZERO).jumpi_to("nobody");
         // pay 2 wei to the stored claimer
         a.push(0).push(0).push(0).push(0).push(2);
         a.op(OP_DUP1 + 5);  // DUP6: claimer address
         a.push(50000).op(OP_CALL);
         emit_require(a, "sent");
         a.op(OP_POP).op(OP_STOP);
         a.jumpdest("nobody").op(OP_POP).op(OP_STOP);
       }},
  };
}

// UE: notifies a peer and ignores the reported status entirely.
std::vector<FnDef> ue_notify(const Address& peer) {
  return {
      {"ping", {}, "nonpayable",
       [peer](Asm& a) {
         a.push(0).push(0).push(0).push(0).push(0);
         a.push(address_to_u256(peer)).push(50000).op(OP_CALL);
         a.op(OP_POP);  // status dropped
         a.push(0).op(OP_SLOAD).push(1).op(OP_ADD).push(0).op(OP_SSTORE);
         a.op(OP_STOP);
       }},
  };
}

// US: anyone can destroy the contract.
std::vector<FnDef> us_door() {
  return {
      {"bye", {}, "nonpayable",
       [](Asm& a) { a.op(OP_CALLER).op(OP_SELFDESTRUCT); }},
      {"note", {"uint256"}, "nonpayable",
       [](Asm& a) {
         emit_arg(a, 0);
         a.push(2).op(OP_SSTORE).op(OP_STOP);
       }},
  };
}

// UD: delegatecalls straight into a caller-supplied address.
std::vector<FnDef> ud_proxy() {
  return {
      {"exec", {"address"}, "nonpayable",
       [](Asm& a) {
         a.push(0).push(0).push(0).push(0);
         emit_arg(a, 0);
         a.push(50000).op(OP_DELEGATECALL);
         emit_require(a, "ok");
         a.op(OP_STOP);
       }},
  };
}

// benign: guarded token with per-caller balances.
std::vector<FnDef> benign_token() {
  return {
      {"mint", {"uint256"}, "nonpayable",
       [](Asm& a) {
         // total' = total + amount, guarded against wrap
         emit_arg(a, 0);
         a.push(0).op(OP_SLOAD);      // [amt, total]
         a.op((OP_DUP1 + 1)).op((OP_DUP1 + 1)).op(OP_ADD);  // [amt, total, sum]
         a.op(OP_DUP1).op((OP_DUP1 + 2)).op(OP_GT).op(OP_ISZERO);  // total <= sum
         emit_require(a, "nowrap");
         a.push(0).op(OP_SSTORE);  // total := sum
         a.op(OP_POP);
         // balance[caller] += amount
         emit_caller_slot(a, 1);
         a.op(OP_DUP1).op(OP_SLOAD);
         emit_arg(a, 0);
         a.op(OP_ADD).op(OP_SWAP1).op(OP_SSTORE);
         a.op(OP_STOP);
       }},
      {"transfer", {"address", "uint256"}, "nonpayable",
       [](Asm& a) {
         emit_caller_slot(a, 1);
         a.op(OP_DUP1).op(OP_SLOAD);  // [slot, bal]
         emit_arg(a, 1);              // [slot, bal, amt]
         a.op(OP_DUP1).op((OP_DUP1 + 2)).op(OP_LT).op(OP_ISZERO);  // bal >= amt
         emit_require(a, "funds");
         // balance[caller] = bal - amt
         a.op(OP_DUP1).op(OP_DUP1 + 2).op(OP_SUB);  // [slot, bal, amt, bal-amt]
         a.op(OP_DUP1 + 3).op(OP_SSTORE);           // store at slot
         // balance[to] += amt
         emit_arg(a, 0);
         a.push(0).op(OP_MSTORE);
         a.push(1).push(32).op(OP_MSTORE);
         a.push(64).push(0).op(OP_KECCAK256);   // [slot, bal, amt, to_slot]
         a.op(OP_DUP1).op(OP_SLOAD);            // [.., to_slot, to_bal]
         a.op(OP_DUP1 + 2).op(OP_ADD);          // DUP3: amt -> to_bal+amt
         a.op(OP_SWAP1).op(OP_SSTORE);
         a.op(OP_POP).op(OP_POP).op(OP_POP).op(OP_STOP);
       }},
      {"balanceOf", {"address"}, "view",
       [](Asm& a) {
         emit_arg(a, 0);
         a.push(0).op(OP_MSTORE);
         a.push(1).push(32).op(OP_MSTORE);
         a.push(64).push(0).op(OP_KECCAK256);
         a.op(OP_SLOAD).push(0).op(OP_MSTORE).push(32).push(0).op(OP_RETURN);
       }},
  };
}

// benign: checks-effects-interactions bank.
std::vector<FnDef> benign_bank() {
  return {
      {"deposit", {}, "payable",
       [](Asm& a) {
         emit_caller_slot(a, 0);
         a.op(OP_DUP1).op(OP_SLOAD).op(OP_CALLVALUE).op(OP_ADD);
         a.op(OP_SWAP1).op(OP_SSTORE).op(OP_STOP);
       }},
      {"withdraw", {}, "nonpayable",
       [](Asm& a) {
         emit_caller_slot(a, 0);
         a.op(OP_DUP1).op(OP_SLOAD);  // [slot, amt]
         a.op(OP_DUP1).op(OP_ISZERO).jumpi_to("empty");
         // zero first, then pay
         a.push(0).op(OP_DUP1 + 2).op(OP_SSTORE);  // DUP3 slot, store 0
         emit_pay_caller(a, "sent");
         a.op(OP_POP).op(OP_STOP);
         a.jumpdest("empty").op(OP_STOP);
       }},
  };
}

// benign: bounded counter.
std::vector<FnDef> benign_counter() {
  return {
      {"inc", {}, "nonpayable",
       [](Asm& a) {
         a.push(0).op(OP_SLOAD).push(1).op(OP_ADD).push(0).op(OP_SSTORE).op(OP_STOP);
       }},
      {"dec", {}, "nonpayable",
       [](Asm& a) {
         a.push(0).op(OP_SLOAD);
         a.op(OP_DUP1);
         emit_require(a, "pos");  // v != 0
         a.push(1).op(OP_SWAP1).op(OP_SUB).push(0).op(OP_SSTORE).op(OP_STOP);
       }},
      {"get", {}, "view", [](Asm& a) { emit_return_slot(a, 0); }},
  };
}

// benign: owner-gated treasury.
std::vector<FnDef> benign_owner(const Address& owner) {
  auto only_owner = [owner](Asm& a, const std::string& tag) {
    a.op(OP_CALLER).push(address_to_u256(owner)).op(OP_EQ);
    emit_require(a, tag);
  };
  return {
      {"fund", {}, "payable", [](Asm& a) { a.op(OP_STOP); }},
      {"withdraw", {}, "nonpayable",
       [only_owner](Asm& a) {
         only_owner(a, "auth_w");
         a.push(1);
         emit_pay_caller(a, "sent");
         a.op(OP_STOP);
       }},
      {"shutdown", {}, "nonpayable",
       [only_owner, owner](Asm& a) {
         only_owner(a, "auth_s");
         a.push(address_to_u256(owner)).op(OP_SELFDESTRUCT);
       }},
  };
}

// benign: pure echo.
std::vector<FnDef> benign_echo() {
  return {
      {"id", {"uint256"}, "view",
       [](Asm& a) {
         emit_arg(a, 0);
         a.push(0).op(OP_MSTORE).push(32).push(0).op(OP_RETURN);
       }},
      {"zero", {}, "view",
       [](Asm& a) { a.push(0).push(0).op(OP_MSTORE).push(32).push(0).op(OP_RETURN); }},
  };
}

// benign: overflow-guarded accumulator (the wrap happens, the guard reverts).
std::vector<FnDef> benign_guard() {
  return {
      {"safe_add", {"uint256"}, "nonpayable",
       [](Asm& a) {
         emit_arg(a, 0);
         a.push(0).op(OP_SLOAD);             // [x, v]
         a.op(OP_DUP1).op((OP_DUP1 + 2)).op(OP_ADD);  // [x, v, s=v+x]
         a.op(OP_DUP1).op((OP_DUP1 + 2)).op(OP_GT).op(OP_ISZERO);  // v <= s
         emit_require(a, "nowrap");
         a.push(0).op(OP_SSTORE).op(OP_POP).op(OP_STOP);
       }},
      {"total", {}, "view", [](Asm& a) { emit_return_slot(a, 0); }},
  };
}

// benign coverage target: a branch guarded by a 16-byte constant that random
// and boundary mutation cannot hit; the concolic path must solve it.
const char* kMagicConstant = "0xa3f941c755d28e06bb1496c80d73e5f1";

std::vector<FnDef> magic_gate() {
  return {
      {"open", {"uint256"}, "nonpayable",
       [](Asm& a) {
         emit_arg(a, 0);
         a.push(u256_from_string(kMagicConstant)).op(OP_EQ).jumpi_to("unlock");
         a.op(OP_STOP);
         a.jumpdest("unlock");
         a.push(1).push(5).op(OP_SSTORE).op(OP_STOP);
       }},
      {"probe", {}, "view", [](Asm& a) { emit_return_slot(a, 5); }},
  };
}

// bundle writing -------------------------------------------------------------

struct BundleSpec {
  std::string name;
  std::vector<FnDef> fns;
  std::vector<std::string> expected;
  u256 contract_balance = 0;
  bool attacker_script = false;
};

void write_bundle(const std::filesystem::path& root, const BundleSpec& spec,
                  const ChainConfig& chain) {
  namespace fs = std::filesystem;
  fs::path dir = root / spec.name;
  fs::create_directories(dir);

  bytes code = build_contract(spec.fns);
  std::ofstream(dir / "code.bin") << to_hex(code) << "\n";
  std::ofstream(dir / "abi.json") << abi_json(spec.fns) << "\n";

  json roles;
  roles["owner"] = to_hex(chain.owner_address());
  json attackers = json::array();
  for (const auto& a : chain.attacker_addresses()) attackers.push_back(to_hex(a));
  roles["attackers"] = attackers;
  roles["contract_balance"] = u256_to_dec(spec.contract_balance);
  std::ofstream(dir / "roles.json") << roles.dump(2) << "\n";

  json expected = json::array();
  for (const auto& cls : spec.expected) expected.push_back(cls);
  std::ofstream(dir / "expected_bugs.json") << expected.dump() << "\n";

  if (spec.attacker_script) {
    json script;
    script["address"] = to_hex(chain.attacker_addresses().at(0));
    script["calls"] = json::array({{{"function", "withdraw"}, {"value", "0"}}});
    std::ofstream(dir / "attacker.json") << script.dump(2) << "\n";
  }
}

}  // namespace

int main(int argc, char** argv) {
  if (argc != 2) {
    std::cerr << "usage: mkcorpus <output-dir>\n";
    return 2;
  }
  ChainConfig chain = ChainConfig::standard();
  u256 gwei = 1000000000;
  u256 ether = u256("1000000000000000000");

  std::vector<BundleSpec> bundles = {
      {"af_vault", af_vault(), {"AF"}},
      {"bd_payout", bd_payout(), {"BD"}, gwei},
      {"io_counter", io_counter(), {"IO"}},
      {"le_gift", le_gift(), {"LE"}, gwei},
      {"fe_sink", fe_sink(), {"FE"}},
      {"re_bank", re_bank(), {"RE"}, ether * 10, true},
      {"td_race", td_race(), {"TD"}, gwei},
      {"ue_notify", ue_notify(chain.accounts[1].address), {"UE"}},
      {"us_door", us_door(), {"US"}},
      {"ud_proxy", ud_proxy(), {"UD"}},
      {"benign_token", benign_token(), {}},
      {"benign_bank", benign_bank(), {}},
      {"benign_counter", benign_counter(), {}},
      {"benign_owner", benign_owner(chain.owner_address()), {}, gwei},
      {"benign_echo", benign_echo(), {}},
      {"benign_guard", benign_guard(), {}},
      {"magic_gate", magic_gate(), {}},
  };

  std::filesystem::path out(argv[1]);
  for (const auto& spec : bundles) {
    write_bundle(out, spec, chain);
    std::cout << spec.name << ": " << build_contract(spec.fns).size() << " bytes\n";
  }
  return 0;
}
