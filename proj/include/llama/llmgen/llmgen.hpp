#pragma once

#include <memory>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "llama/abi/abi.hpp"
#include "llama/corpus/seed.hpp"
#include "llama/vm/trace.hpp"

namespace llama::llmgen {

struct BackendUnavailable : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct UnparseableOutput : std::runtime_error {
  using std::runtime_error::runtime_error;
};

class LlmBackend {
 public:
  virtual ~LlmBackend() = default;
  virtual std::string complete(const std::string& prompt, unsigned max_tokens,
                               double temperature) = 0;
  virtual bool is_stub() const { return false; }
};

// Deterministic ABI-driven stand-in for a text model. Output is a pure
// function of (prompt, seed): every completion derives its stream from the
// prompt hash, so identical campaigns replay identically.
class StubBackend : public LlmBackend {
 public:
  StubBackend(std::vector<abi::FunctionDescriptor> fds, uint64_t seed, size_t account_count);
  std::string complete(const std::string& prompt, unsigned max_tokens,
                       double temperature) override;
  bool is_stub() const override { return true; }

 private:
  std::vector<abi::FunctionDescriptor> fds_;
  uint64_t seed_;
  size_t accounts_;
};

struct RemoteConfig {
  std::string endpoint;  // http(s)://host[:port][/path]
  std::string token;
  int timeout_secs = 30;
  unsigned max_tokens = 1024;
  double temperature = 0.7;
};

// Reads LLAMA_LLM_ENDPOINT / LLAMA_LLM_TOKEN; empty endpoint means unconfigured.
RemoteConfig remote_config_from_env();

// JSON-over-HTTP backend: POST {"prompt","max_tokens","temperature"},
// response {"text"}. One retry, then BackendUnavailable.
class RemoteBackend : public LlmBackend {
 public:
  explicit RemoteBackend(RemoteConfig cfg);
  std::string complete(const std::string& prompt, unsigned max_tokens,
                       double temperature) override;

 private:
  RemoteConfig cfg_;
};

enum class HintTrigger : uint8_t { Depth, StateWrite, CallRatio };

struct PromptHint {
  std::string text;     // drawn from the fixed pool
  HintTrigger trigger;  // which behavioral condition fired
};

// Behavior-guided prompt injection. Fires when the last iteration looked
// shallow: avg call depth < 2, no persistent state write, or an external-call
// ratio under 5%. Hints rotate round-robin within the class matching the
// fired condition.
class HintInjector {
 public:
  std::optional<PromptHint> inject(const vm::BehaviorMetrics& m);

  static const std::vector<PromptHint>& pool();
  static constexpr double kShallowDepth = 2.0;
  static constexpr double kNearZeroRatio = 0.05;

 private:
  size_t cursor_depth_ = 0;
  size_t cursor_state_ = 0;
  size_t cursor_ratio_ = 0;
};

// One call per line: name(arg1,arg2,...) value=<wei> from=<account-index>.
// Sequences are blank-line separated blocks. Unparseable lines are dropped.
std::optional<abi::RawCall> parse_call_line(const std::string& line);
std::vector<std::vector<abi::RawCall>> parse_sequences(const std::string& text);
std::string format_call_line(const abi::RawCall& call);

// Layer 1: one summary string per function.
std::vector<std::string> abstract_functions(const std::vector<abi::FunctionDescriptor>& fds,
                                            LlmBackend& backend);

// Layer 2 (+5): raw call sequences in the line grammar; the hint text, when
// present, is appended verbatim to the prompt.
std::vector<std::vector<abi::RawCall>> infer_sequences(const std::vector<std::string>& summaries,
                                                       LlmBackend& backend, size_t count,
                                                       const std::optional<PromptHint>& hint);

struct GenerateOptions {
  size_t count = 8;
  std::optional<PromptHint> hint;
  // fallback stub, used after the primary backend fails its retry
  LlmBackend* stub_fallback = nullptr;
};

// Layers 1-4 composed: abstraction, sequence inference, format verification
// against the ABI, and one semantic-optimization round asking for edge-case
// variants of the survivors. Every returned seed encodes cleanly.
std::vector<corpus::Seed> generate_seeds(const std::vector<abi::FunctionDescriptor>& fds,
                                         LlmBackend& backend, const GenerateOptions& opts);

}  // namespace llama::llmgen
