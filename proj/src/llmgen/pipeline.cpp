#include <algorithm>
#include <set>
#include <sstream>

#include "llama/llmgen/llmgen.hpp"

namespace llama::llmgen {

using abi::RawCall;

std::string format_call_line(const RawCall& call) {
  std::string line = call.function + "(";
  for (size_t i = 0; i < call.args.size(); ++i) {
    if (i) line += ",";
    line += call.args[i];
  }
  line += ") value=" + u256_to_dec(call.value) + " from=" + std::to_string(call.sender);
  return line;
}

namespace {

std::string trim(const std::string& s) {
  size_t a = s.find_first_not_of(" \t\r");
  if (a == std::string::npos) return "";
  size_t b = s.find_last_not_of(" \t\r");
  return s.substr(a, b - a + 1);
}

std::vector<std::string> split_top_level(const std::string& s) {
  std::vector<std::string> out;
  int depth = 0;
  bool quote = false;
  std::string cur;
  for (char c : s) {
    if (c == '"') quote = !quote;
    if (!quote) {
      if (c == '[' || c == '(') ++depth;
      if (c == ']' || c == ')') --depth;
      if (c == ',' && depth == 0) {
        out.push_back(trim(cur));
        cur.clear();
        continue;
      }
    }
    cur.push_back(c);
  }
  cur = trim(cur);
  if (!cur.empty() || !out.empty()) out.push_back(cur);
  return out;
}

}  // namespace

std::optional<RawCall> parse_call_line(const std::string& raw_line) {
  std::string line = trim(raw_line);
  if (line.empty()) return std::nullopt;

  size_t open = line.find('(');
  if (open == std::string::npos || open == 0) return std::nullopt;
  // match the parenthesis that closes the argument list
  int depth = 0;
  size_t close = std::string::npos;
  for (size_t i = open; i < line.size(); ++i) {
    if (line[i] == '(') ++depth;
    if (line[i] == ')' && --depth == 0) {
      close = i;
      break;
    }
  }
  if (close == std::string::npos) return std::nullopt;

  RawCall call;
  call.function = trim(line.substr(0, open));
  if (call.function.find(' ') != std::string::npos) return std::nullopt;
  std::string args = trim(line.substr(open + 1, close - open - 1));
  if (!args.empty()) call.args = split_top_level(args);

  std::istringstream rest(line.substr(close + 1));
  std::string token;
  while (rest >> token) {
    try {
      if (token.starts_with("value=")) {
        call.value = u256_from_string(token.substr(6));
      } else if (token.starts_with("from=")) {
        call.sender = std::stoi(token.substr(5));
        if (call.sender < 0) return std::nullopt;
      } else {
        return std::nullopt;  // junk trailer
      }
    } catch (const std::exception&) {
      return std::nullopt;
    }
  }
  return call;
}

std::vector<std::vector<RawCall>> parse_sequences(const std::string& text) {
  std::vector<std::vector<RawCall>> out;
  std::vector<RawCall> block;
  std::istringstream in(text);
  std::string line;
  auto flush = [&] {
    if (!block.empty()) out.push_back(std::move(block));
    block.clear();
  };
  while (std::getline(in, line)) {
    if (trim(line).empty()) {
      flush();
      continue;
    }
    if (auto call = parse_call_line(line)) block.push_back(std::move(*call));
  }
  flush();
  return out;
}

std::vector<std::string> abstract_functions(const std::vector<abi::FunctionDescriptor>& fds,
                                            LlmBackend& backend) {
  std::string prompt = "TASK: summarize-functions\nCONTRACT FUNCTIONS:\n";
  for (const auto& fd : fds) prompt += fd.signature() + "\n";
  std::string text = backend.complete(prompt, 512, 0.2);

  std::vector<std::string> out;
  std::istringstream in(text);
  std::string line;
  while (std::getline(in, line))
    if (!trim(line).empty()) out.push_back(trim(line));
  return out;
}

static std::vector<std::vector<RawCall>> infer_sequences_salted(
    const std::vector<std::string>& summaries, LlmBackend& backend, size_t count,
    const std::optional<PromptHint>& hint, int salt) {
  if (summaries.empty()) throw UnparseableOutput("no function summaries to prompt with");
  std::string prompt = "TASK: propose-call-sequences\nCOUNT: " + std::to_string(count) + "\n";
  prompt +=
      "FORMAT: one call per line `name(arg1,arg2,...) value=<wei> from=<account-index>`, "
      "blank line between sequences\n";
  if (salt > 0) prompt += "SALT: " + std::to_string(salt) + "\n";
  prompt += "FUNCTION SUMMARIES:\n";
  for (const auto& s : summaries) prompt += s + "\n";
  if (hint) prompt += "HINT: " + hint->text + "\n";  // layer-5 injection, verbatim

  auto sequences = parse_sequences(backend.complete(prompt, 1024, 0.7));
  if (sequences.empty()) throw UnparseableOutput("backend produced no parseable sequence");
  return sequences;
}

std::vector<std::vector<RawCall>> infer_sequences(const std::vector<std::string>& summaries,
                                                  LlmBackend& backend, size_t count,
                                                  const std::optional<PromptHint>& hint) {
  return infer_sequences_salted(summaries, backend, count, hint, 0);
}

namespace {

std::optional<corpus::Seed> verify_sequence(const std::vector<abi::FunctionDescriptor>& fds,
                                            const std::vector<RawCall>& calls, bool from_stub) {
  corpus::Seed seed;
  for (const auto& raw : calls) {
    auto result = abi::validate_call(fds, raw);
    if (!std::holds_alternative<abi::ValidatedCall>(result)) continue;  // discarded
    const auto& ok = std::get<abi::ValidatedCall>(result);
    corpus::Transaction tx;
    tx.function = ok.fd.name;
    for (size_t i = 0; i < ok.args.size(); ++i)
      tx.args.push_back(abi::literal_of(ok.fd.inputs[i], ok.args[i]));
    tx.sender = ok.sender;
    tx.value = ok.value;
    seed.txs.push_back(std::move(tx));
  }
  if (seed.txs.empty()) return std::nullopt;
  seed.origin = from_stub ? corpus::SeedOrigin::Stub : corpus::SeedOrigin::LLM;
  seed.rehash();
  return seed;
}

std::string sequences_block(const std::vector<corpus::Seed>& seeds) {
  std::string out;
  for (const auto& s : seeds) {
    for (const auto& tx : s.txs) {
      RawCall call{tx.function, tx.args, tx.value, tx.sender};
      out += format_call_line(call) + "\n";
    }
    out += "\n";
  }
  return out;
}

}  // namespace

std::vector<corpus::Seed> generate_seeds(const std::vector<abi::FunctionDescriptor>& fds,
                                         LlmBackend& backend, const GenerateOptions& opts) {
  if (opts.count == 0) return {};

  LlmBackend* active = &backend;
  std::vector<corpus::Seed> out;
  std::set<std::string> seen;

  for (int round = 0; round < 6 && out.size() < opts.count; ++round) {
    std::vector<std::vector<RawCall>> sequences;
    try {
      auto summaries = abstract_functions(fds, *active);
      sequences = infer_sequences_salted(summaries, *active, opts.count, opts.hint, round);
    } catch (const BackendUnavailable&) {
      if (active != opts.stub_fallback && opts.stub_fallback) {
        active = opts.stub_fallback;  // a campaign never blocks on a remote service
        continue;
      }
      throw;
    } catch (const UnparseableOutput&) {
      if (fds.empty()) throw;
      if (active != opts.stub_fallback && opts.stub_fallback) {
        active = opts.stub_fallback;
        continue;
      }
      throw;
    }

    // layer 3: format verification
    std::vector<corpus::Seed> verified;
    for (const auto& seq : sequences)
      if (auto seed = verify_sequence(fds, seq, active->is_stub())) verified.push_back(*seed);

    // layer 4: one semantic-optimization round over the survivors
    if (!verified.empty()) {
      std::string prompt = "TASK: propose-edge-case-variants\nCOUNT: " +
                           std::to_string(verified.size()) + "\nSURVIVING SEQUENCES:\n" +
                           sequences_block(verified);
      try {
        auto variants = parse_sequences(active->complete(prompt, 1024, 0.9));
        for (const auto& seq : variants)
          if (auto seed = verify_sequence(fds, seq, active->is_stub()))
            verified.push_back(*seed);
      } catch (const BackendUnavailable&) {
        // the base sequences stand on their own
      }
    }

    for (auto& seed : verified) {
      if (out.size() >= opts.count) break;
      if (seen.insert(seed.id).second) out.push_back(std::move(seed));
    }
  }
  return out;
}

const std::vector<PromptHint>& HintInjector::pool() {
  static const std::vector<PromptHint> kPool = {
      {"Generate a transaction that modifies contract state", HintTrigger::StateWrite},
      {"Generate calls from different accounts that attempt privileged operations",
       HintTrigger::StateWrite},
      {"Generate calls with extreme numeric arguments near type boundaries",
       HintTrigger::StateWrite},
      {"Generate a sequence of dependent calls where later calls read state written by earlier "
       "ones",
       HintTrigger::Depth},
      {"Generate a sequence where an external call re-enters the contract through its "
       "counterparty",
       HintTrigger::Depth},
      {"Generate a transaction sequence that transfers Ether out of the contract",
       HintTrigger::CallRatio},
  };
  return kPool;
}

std::optional<PromptHint> HintInjector::inject(const vm::BehaviorMetrics& m) {
  HintTrigger fired;
  size_t* cursor = nullptr;
  if (m.avg_call_depth < kShallowDepth) {
    fired = HintTrigger::Depth;
    cursor = &cursor_depth_;
  } else if (m.state_write_flag == 0) {
    fired = HintTrigger::StateWrite;
    cursor = &cursor_state_;
  } else if (m.external_call_ratio < kNearZeroRatio) {
    fired = HintTrigger::CallRatio;
    cursor = &cursor_ratio_;
  } else {
    return std::nullopt;
  }

  std::vector<const PromptHint*> matching;
  for (const auto& h : pool())
    if (h.trigger == fired) matching.push_back(&h);
  const PromptHint* chosen = matching[*cursor % matching.size()];
  ++*cursor;
  return *chosen;
}

}  // namespace llama::llmgen
