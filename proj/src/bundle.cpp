#include "llama/bundle.hpp"

#include <cctype>
#include <filesystem>
#include <fstream>
#include <set>

#include "json.hpp"

namespace llama {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

Address pool_address(uint8_t n) {
  Address a;
  a.raw[18] = 0x10;
  a.raw[19] = n;
  return a;
}

std::string read_file(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  if (!in) throw BundleError("cannot read " + p.string());
  return std::string((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
}

std::string strip_ws(std::string s) {
  std::erase_if(s, [](unsigned char c) { return std::isspace(c); });
  return s;
}

}  // namespace

ChainConfig ChainConfig::standard() {
  ChainConfig c;
  u256 funding = u256(1) << 70;  // ~1.18e21 wei, rich enough for any palette value
  c.accounts = {
      {pool_address(1), funding, "owner"},
      {pool_address(2), funding, "normal"},
      {pool_address(3), funding, "attacker"},
  };
  c.contract.raw[18] = 0xc0;
  c.contract.raw[19] = 0xde;
  return c;
}

std::vector<Address> ChainConfig::attacker_addresses() const {
  std::vector<Address> out;
  for (const auto& a : accounts)
    if (a.role == "attacker") out.push_back(a.address);
  return out;
}

Address ChainConfig::owner_address() const {
  for (const auto& a : accounts)
    if (a.role == "owner") return a.address;
  return accounts.empty() ? Address{} : accounts[0].address;
}

const abi::FunctionDescriptor* Bundle::find_function(const std::string& fn) const {
  for (const auto& fd : fds)
    if (fd.name == fn) return &fd;
  return nullptr;
}

Bundle load_bundle(const std::string& dir, const ChainConfig& chain) {
  fs::path root(dir);
  if (!fs::is_directory(root)) throw BundleError("no such bundle directory: " + dir);

  Bundle b;
  b.name = root.filename().string();
  b.contract = chain.contract;
  b.owner = chain.owner_address();
  b.attackers = chain.attacker_addresses();

  try {
    b.code = vm::Bytecode::from(from_hex(strip_ws(read_file(root / "code.bin"))));
  } catch (const std::invalid_argument& e) {
    throw BundleError(b.name + "/code.bin: " + e.what());
  }
  if (b.code.empty()) throw BundleError(b.name + ": empty bytecode");

  try {
    b.fds = abi::parse_abi(read_file(root / "abi.json"));
  } catch (const abi::MalformedAbi& e) {
    throw BundleError(b.name + "/abi.json: " + e.what());
  }

  if (fs::exists(root / "roles.json")) {
    auto doc = json::parse(read_file(root / "roles.json"), nullptr, false);
    if (doc.is_discarded()) throw BundleError(b.name + "/roles.json: bad JSON");
    if (doc.contains("owner")) b.owner = address_from_hex(doc["owner"].get<std::string>());
    if (doc.contains("attackers")) {
      b.attackers.clear();
      for (const auto& a : doc["attackers"])
        b.attackers.push_back(address_from_hex(a.get<std::string>()));
    }
    if (doc.contains("contract_balance"))
      b.contract_balance = u256_from_string(doc["contract_balance"].get<std::string>());
  }

  if (fs::exists(root / "attacker.json")) {
    auto doc = json::parse(read_file(root / "attacker.json"), nullptr, false);
    if (doc.is_discarded()) throw BundleError(b.name + "/attacker.json: bad JSON");
    vm::ScriptedCounterparty stub;
    stub.address = doc.contains("address")
                       ? address_from_hex(doc["address"].get<std::string>())
                       : (b.attackers.empty() ? Address{} : b.attackers[0]);
    stub.target = b.contract;
    for (const auto& call : doc.at("calls")) {
      std::string fn = call.at("function").get<std::string>();
      const auto* fd = b.find_function(fn);
      if (!fd) throw BundleError(b.name + "/attacker.json: unknown function " + fn);
      std::vector<abi::AbiValue> args;
      if (call.contains("args")) {
        size_t i = 0;
        for (const auto& lit : call["args"])
          args.push_back(abi::parse_literal(fd->inputs.at(i++), lit.get<std::string>(), true));
      }
      u256 value = call.contains("value") ? u256_from_string(call["value"].get<std::string>())
                                          : u256(0);
      stub.calls.emplace_back(abi::encode_call(*fd, args), value);
    }
    b.counterparty = std::move(stub);
  }

  if (fs::exists(root / "expected_bugs.json")) {
    auto doc = json::parse(read_file(root / "expected_bugs.json"), nullptr, false);
    if (doc.is_discarded()) throw BundleError(b.name + "/expected_bugs.json: bad JSON");
    for (const auto& cls : doc) b.expected_bugs.push_back(cls.get<std::string>());
  }
  return b;
}

vm::WorldState genesis_state(const Bundle& bundle, const ChainConfig& chain) {
  vm::WorldState st;
  for (const auto& acct : chain.accounts) st.get_or_create(acct.address).balance = acct.balance;
  vm::Account& c = st.get_or_create(bundle.contract);
  c.code = bundle.code;
  c.balance = bundle.contract_balance;
  return st;
}

bytes encode_transaction(const Bundle& bundle, const corpus::Transaction& tx) {
  const auto* fd = bundle.find_function(tx.function);
  if (!fd) throw BundleError("unknown function in seed: " + tx.function);
  if (tx.args.size() != fd->inputs.size())
    throw BundleError("arity drift in seed for " + tx.function);
  std::vector<abi::AbiValue> args;
  for (size_t i = 0; i < tx.args.size(); ++i) {
    try {
      args.push_back(abi::parse_literal(fd->inputs[i], tx.args[i], true));
    } catch (const std::exception& e) {
      throw BundleError("bad literal in seed: " + std::string(e.what()));
    }
  }
  return abi::encode_call(*fd, args);
}

vm::Environment environment_for(const corpus::Transaction& tx, size_t tx_index,
                                const ChainConfig& chain) {
  vm::Environment env;
  env.timestamp = tx.env.timestamp.value_or(chain.timestamp_base + tx_index);
  env.block_number = tx.env.block_number.value_or(chain.block_base + tx_index);
  env.gas_limit = tx.env.gas_limit.value_or(chain.gas_limit_default);
  env.caller = chain.sender(tx.sender).address;
  env.call_value = tx.value;
  env.balance_overrides = tx.env.balance_overrides;
  env.call_return_override = tx.env.call_return_override;
  env.return_data_size_override = tx.env.return_data_size_override;
  env.ext_code_size_override = tx.env.ext_code_size_override;
  return env;
}

SequenceResult run_sequence(const Bundle& bundle, const ChainConfig& chain,
                            const std::vector<corpus::Transaction>& txs,
                            const EnvPerturb& perturb, vm::SymbolicSession* symbolic) {
  SequenceResult result;
  result.pre_state = genesis_state(bundle, chain);

  std::set<Address> privileged{bundle.owner};
  std::set<std::pair<Address, u256>> unpriv_written;

  vm::ExecParams params;
  params.counterparty = bundle.counterparty ? &*bundle.counterparty : nullptr;
  params.privileged = &privileged;
  params.unpriv_written = &unpriv_written;
  params.symbolic = symbolic;

  vm::WorldState state = result.pre_state;
  for (size_t i = 0; i < txs.size(); ++i) {
    bytes calldata = encode_transaction(bundle, txs[i]);
    vm::Environment env = environment_for(txs[i], i, chain);
    auto shift = [](uint64_t base, int64_t delta) {
      if (delta >= 0) return base + static_cast<uint64_t>(delta);
      uint64_t d = static_cast<uint64_t>(-delta);
      return base > d ? base - d : 0;
    };
    env.timestamp = shift(env.timestamp, perturb.timestamp_delta);
    env.block_number = shift(env.block_number, perturb.block_delta);

    if (symbolic) symbolic->current_tx = static_cast<uint16_t>(i);
    auto [trace, post] = vm::execute_transaction(state, bundle.contract, calldata, env, params);
    state = std::move(post);
    result.traces.push_back(std::move(trace));
    result.selectors.push_back(bundle.find_function(txs[i].function)->selector);
  }
  result.post_state = std::move(state);
  return result;
}

}  // namespace llama
