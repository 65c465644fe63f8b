#include <cstdlib>
#include <sstream>

#include "llama/keccak.hpp"
#include "llama/llmgen/llmgen.hpp"
#include "llama/rng.hpp"

#define CPPHTTPLIB_NO_EXCEPTIONS
#include "httplib.h"
#include "json.hpp"

namespace llama::llmgen {

using abi::FunctionDescriptor;
using abi::RawCall;

namespace {

std::string grab_line(const std::string& text, const std::string& key) {
  size_t pos = text.find(key);
  if (pos == std::string::npos) return "";
  size_t start = pos + key.size();
  size_t end = text.find('\n', start);
  std::string v = text.substr(start, end == std::string::npos ? end : end - start);
  while (!v.empty() && (v.back() == '\r' || v.back() == ' ')) v.pop_back();
  while (!v.empty() && v.front() == ' ') v.erase(v.begin());
  return v;
}

// Boundary argument palette per type; the "magic" entry is a keccak-derived
// constant so it never collides with hand-picked contract constants by luck.
std::string boundary_literal(const abi::AbiType& t, Rng& rng, size_t accounts, bool extreme) {
  using abi::TypeKind;
  switch (t.kind) {
    case TypeKind::Uint:
    case TypeKind::Int: {
      u256 mask = t.bits >= 256 ? u256_max() : (u256(1) << t.bits) - 1;
      u256 magic = keccak256_u256(bytes{'m', 'a', 'g', static_cast<uint8_t>(t.bits)}) & mask;
      u256 half = t.bits >= 2 ? (u256(1) << (t.bits - 1)) - 1 : u256(1);
      std::vector<u256> palette = {0, 1, half, mask, magic};
      u256 v = extreme ? palette[3 + rng.below(2)] : palette[rng.below(palette.size())];
      if (t.kind == TypeKind::Int && t.bits < 256 && (v >> (t.bits - 1)) != 0)
        return "-" + u256_to_dec((~v + 1) & mask);
      return u256_to_dec(v);
    }
    case TypeKind::Addr: {
      // account pool indices map to the configured addresses at validation time;
      // emit raw addresses with the low byte set like the default pool
      Address a;
      a.raw[18] = 0x10;
      a.raw[19] = static_cast<uint8_t>(1 + rng.below(accounts ? accounts : 1));
      return to_hex(a);
    }
    case TypeKind::Bool:
      return rng.below(2) ? "true" : "false";
    case TypeKind::FixedBytes: {
      bytes b(t.nbytes, 0);
      if (rng.below(2)) b.back() = 0x01;
      return "0x" + to_hex(b);
    }
    case TypeKind::Bytes:
      return rng.below(2) ? "0x" : "0x00";
    case TypeKind::String:
      return "\"x\"";
    case TypeKind::Array: {
      if (rng.below(2)) return "[]";
      return "[" + boundary_literal(*t.elem, rng, accounts, extreme) + "]";
    }
  }
  return "0";
}

}  // namespace

StubBackend::StubBackend(std::vector<FunctionDescriptor> fds, uint64_t seed, size_t account_count)
    : fds_(std::move(fds)), seed_(seed), accounts_(account_count ? account_count : 1) {}

std::string StubBackend::complete(const std::string& prompt, unsigned, double) {
  Rng rng(seed_ ^ fnv1a64(prompt));
  std::string task = grab_line(prompt, "TASK:");
  std::ostringstream out;

  if (task == "summarize-functions") {
    for (const auto& fd : fds_) {
      if (fd.mutability == abi::Mutability::View)
        out << "read-only function " << fd.signature() << "\n";
      else if (fd.payable())
        out << "payable state-modifying function " << fd.signature() << "\n";
      else
        out << "state-modifying function " << fd.signature() << "\n";
    }
    return out.str();
  }

  size_t count = 4;
  if (std::string c = grab_line(prompt, "COUNT:"); !c.empty()) count = std::stoul(c);
  std::string hint = grab_line(prompt, "HINT:");
  bool want_state_write = hint.find("modifies contract state") != std::string::npos ||
                          hint.find("privileged") != std::string::npos;
  bool want_value = hint.find("transfers Ether") != std::string::npos ||
                    hint.find("re-enters") != std::string::npos;
  bool want_chain = hint.find("dependent calls") != std::string::npos ||
                    hint.find("re-enters") != std::string::npos;
  bool extreme_args = hint.find("extreme numeric") != std::string::npos;

  if (task == "propose-edge-case-variants") {
    // replace every argument of the surviving sequences with extreme entries
    auto blocks = parse_sequences(prompt.substr(prompt.find("SEQUENCES:")));
    for (auto& block : blocks) {
      for (auto& call : block) {
        const FunctionDescriptor* fd = nullptr;
        for (const auto& f : fds_)
          if (f.name == call.function) fd = &f;
        if (!fd) continue;
        for (size_t i = 0; i < call.args.size() && i < fd->inputs.size(); ++i)
          call.args[i] = boundary_literal(fd->inputs[i], rng, accounts_, true);
        if (fd->payable() && rng.below(2)) call.value = u256("1000000000000000000");
        out << format_call_line(call) << "\n";
      }
      out << "\n";
    }
    return out.str();
  }

  // propose-call-sequences (layer 2)
  if (fds_.empty()) return "";
  size_t cursor = rng.below(fds_.size());
  for (size_t s = 0; s < count; ++s) {
    size_t len = 1 + rng.below(4);
    if (want_chain && len < 2) len = 2;
    bool satisfied_state = false, satisfied_value = false;
    for (size_t i = 0; i < len; ++i) {
      const FunctionDescriptor* fd = &fds_[cursor % fds_.size()];
      ++cursor;  // round-robin over the ABI
      if (want_state_write && i + 1 == len && !satisfied_state) {
        for (const auto& f : fds_)
          if (f.state_modifying()) fd = &f;
      }
      if (want_value && i + 1 == len && !satisfied_value) {
        for (const auto& f : fds_)
          if (f.payable()) fd = &f;
      }
      if (fd->state_modifying()) satisfied_state = true;
      RawCall call;
      call.function = fd->name;
      for (const auto& input : fd->inputs)
        call.args.push_back(boundary_literal(input, rng, accounts_, extreme_args));
      if (fd->payable()) {
        static const char* kValues[] = {"0", "1", "1000000000000000000"};
        call.value = u256_from_string(kValues[want_value ? 2 : rng.below(3)]);
        if (call.value > 0) satisfied_value = true;
      }
      call.sender = static_cast<int>(rng.below(accounts_));
      out << format_call_line(call) << "\n";
    }
    out << "\n";
  }
  return out.str();
}

RemoteConfig remote_config_from_env() {
  RemoteConfig cfg;
  if (const char* e = std::getenv("LLAMA_LLM_ENDPOINT")) cfg.endpoint = e;
  if (const char* t = std::getenv("LLAMA_LLM_TOKEN")) cfg.token = t;
  return cfg;
}

RemoteBackend::RemoteBackend(RemoteConfig cfg) : cfg_(std::move(cfg)) {}

std::string RemoteBackend::complete(const std::string& prompt, unsigned max_tokens,
                                    double temperature) {
  if (cfg_.endpoint.empty()) throw BackendUnavailable("no endpoint configured");

  std::string base = cfg_.endpoint;
  std::string path = "/";
  size_t scheme = base.find("://");
  size_t slash = base.find('/', scheme == std::string::npos ? 0 : scheme + 3);
  if (slash != std::string::npos) {
    path = base.substr(slash);
    base = base.substr(0, slash);
  }

  nlohmann::json body = {
      {"prompt", prompt}, {"max_tokens", max_tokens}, {"temperature", temperature}};
  std::string payload = body.dump();

  httplib::Client client(base);
  client.set_connection_timeout(cfg_.timeout_secs, 0);
  client.set_read_timeout(cfg_.timeout_secs, 0);
  httplib::Headers headers;
  if (!cfg_.token.empty()) headers.emplace("Authorization", "Bearer " + cfg_.token);

  std::string last_error;
  for (int attempt = 0; attempt < 2; ++attempt) {  // one retry
    auto res = client.Post(path, headers, payload, "application/json");
    if (!res) {
      last_error = "transport error";
      continue;
    }
    if (res->status != 200) {
      last_error = "http status " + std::to_string(res->status);
      continue;
    }
    auto doc = nlohmann::json::parse(res->body, nullptr, false);
    if (doc.is_discarded() || !doc.contains("text")) {
      last_error = "bad response body";
      continue;
    }
    return doc["text"].get<std::string>();
  }
  throw BackendUnavailable(cfg_.endpoint + ": " + last_error);
}

}  // namespace llama::llmgen
