#include "llama/corpus/seed.hpp"

#include "json.hpp"
#include "llama/keccak.hpp"

namespace llama::corpus {

using nlohmann::json;

const char* origin_name(SeedOrigin o) {
  switch (o) {
    case SeedOrigin::LLM: return "llm";
    case SeedOrigin::Stub: return "stub";
    case SeedOrigin::Mutation: return "mutation";
    case SeedOrigin::Crossover: return "crossover";
    case SeedOrigin::Symbolic: return "symbolic";
  }
  return "?";
}

SeedOrigin origin_from_name(const std::string& s) {
  if (s == "llm") return SeedOrigin::LLM;
  if (s == "stub") return SeedOrigin::Stub;
  if (s == "mutation") return SeedOrigin::Mutation;
  if (s == "crossover") return SeedOrigin::Crossover;
  if (s == "symbolic") return SeedOrigin::Symbolic;
  throw CorruptCorpus("unknown seed origin: " + s);
}

namespace {

json deltas_to_json(const EnvDeltas& e) {
  json j = json::object();
  if (e.timestamp) j["timestamp"] = *e.timestamp;
  if (e.block_number) j["block_number"] = *e.block_number;
  if (e.gas_limit) j["gas_limit"] = *e.gas_limit;
  if (!e.balance_overrides.empty()) {
    json m = json::object();
    for (const auto& [a, v] : e.balance_overrides) m[to_hex(a)] = u256_to_dec(v);
    j["balance_overrides"] = m;
  }
  if (e.call_return_override) j["call_return_override"] = u256_to_dec(*e.call_return_override);
  if (e.return_data_size_override)
    j["return_data_size_override"] = u256_to_dec(*e.return_data_size_override);
  if (!e.ext_code_size_override.empty()) {
    json m = json::object();
    for (const auto& [a, v] : e.ext_code_size_override) m[to_hex(a)] = u256_to_dec(v);
    j["ext_code_size_override"] = m;
  }
  return j;
}

EnvDeltas deltas_from_json(const json& j) {
  EnvDeltas e;
  if (j.contains("timestamp")) e.timestamp = j["timestamp"].get<uint64_t>();
  if (j.contains("block_number")) e.block_number = j["block_number"].get<uint64_t>();
  if (j.contains("gas_limit")) e.gas_limit = j["gas_limit"].get<uint64_t>();
  if (j.contains("balance_overrides"))
    for (const auto& [k, v] : j["balance_overrides"].items())
      e.balance_overrides[address_from_hex(k)] = u256_from_string(v.get<std::string>());
  if (j.contains("call_return_override"))
    e.call_return_override = u256_from_string(j["call_return_override"].get<std::string>());
  if (j.contains("return_data_size_override"))
    e.return_data_size_override =
        u256_from_string(j["return_data_size_override"].get<std::string>());
  if (j.contains("ext_code_size_override"))
    for (const auto& [k, v] : j["ext_code_size_override"].items())
      e.ext_code_size_override[address_from_hex(k)] = u256_from_string(v.get<std::string>());
  return e;
}

json txs_to_json(const std::vector<Transaction>& txs) {
  json arr = json::array();
  for (const auto& tx : txs) {
    json t;
    t["function"] = tx.function;
    t["args"] = tx.args;
    t["sender"] = tx.sender;
    t["value"] = u256_to_dec(tx.value);
    t["env"] = deltas_to_json(tx.env);
    arr.push_back(std::move(t));
  }
  return arr;
}

}  // namespace

void Seed::rehash() {
  // nlohmann objects keep keys sorted, so dump() is canonical
  std::string canonical = txs_to_json(txs).dump();
  auto h = keccak256(canonical);
  id = to_hex(h.data(), h.size());
}

std::string seed_to_json(const Seed& s) {
  json j;
  j["id"] = s.id;
  j["origin"] = origin_name(s.origin);
  j["txs"] = txs_to_json(s.txs);
  j["fitness"] = {{"delta_branch", s.fitness.delta_branch},
                  {"delta_inst", s.fitness.delta_inst},
                  {"delta_raw", s.fitness.delta_raw},
                  {"fit", s.fitness.fit}};
  return j.dump(2);
}

Seed seed_from_json(const std::string& text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::exception& e) {
    throw CorruptCorpus(std::string("bad seed JSON: ") + e.what());
  }
  Seed s;
  try {
    s.origin = origin_from_name(j.at("origin").get<std::string>());
    for (const auto& t : j.at("txs")) {
      Transaction tx;
      tx.function = t.at("function").get<std::string>();
      for (const auto& a : t.at("args")) tx.args.push_back(a.get<std::string>());
      tx.sender = t.at("sender").get<int>();
      tx.value = u256_from_string(t.at("value").get<std::string>());
      if (t.contains("env")) tx.env = deltas_from_json(t["env"]);
      s.txs.push_back(std::move(tx));
    }
    if (j.contains("fitness")) {
      s.fitness.delta_branch = j["fitness"].value("delta_branch", 0);
      s.fitness.delta_inst = j["fitness"].value("delta_inst", 0);
      s.fitness.delta_raw = j["fitness"].value("delta_raw", 0);
      s.fitness.fit = j["fitness"].value("fit", 0);
    }
  } catch (const json::exception& e) {
    throw CorruptCorpus(std::string("bad seed fields: ") + e.what());
  }
  s.rehash();
  if (j.contains("id") && j["id"].get<std::string>() != s.id)
    throw CorruptCorpus("seed id mismatch (content hash " + s.id + ")");
  if (s.txs.empty()) throw CorruptCorpus("seed without transactions");
  return s;
}

}  // namespace llama::corpus
