#pragma once

#include <map>
#include <string>
#include <vector>

#include "llama/types.hpp"
#include "llama/vm/opcodes.hpp"

namespace llama {

// Small label-resolving assembler for building handwritten contracts.
// Labels are resolved to PUSH2 immediates on build().
class Asm {
 public:
  Asm& op(uint8_t opcode) {
    code_.push_back(opcode);
    return *this;
  }

  // Fixed-width push.
  Asm& push_n(int width, const u256& v) {
    code_.push_back(static_cast<uint8_t>(vm::OP_PUSH1 + width - 1));
    for (int i = width - 1; i >= 0; --i)
      code_.push_back(static_cast<uint8_t>((v >> (8 * i)) & 0xff));
    return *this;
  }

  // Minimal-width push.
  Asm& push(const u256& v) {
    int width = 1;
    u256 x = v >> 8;
    while (x != 0) {
      ++width;
      x >>= 8;
    }
    return push_n(width, v);
  }

  Asm& label(const std::string& name) {
    labels_[name] = code_.size();
    return *this;
  }

  Asm& jumpdest(const std::string& name) {
    label(name);
    return op(vm::OP_JUMPDEST);
  }

  Asm& push_label(const std::string& name) {
    code_.push_back(vm::OP_PUSH1 + 1);  // PUSH2
    fixups_.emplace_back(code_.size(), name);
    code_.push_back(0);
    code_.push_back(0);
    return *this;
  }

  Asm& jump_to(const std::string& name) { return push_label(name).op(vm::OP_JUMP); }
  Asm& jumpi_to(const std::string& name) { return push_label(name).op(vm::OP_JUMPI); }

  bytes build() const;

 private:
  bytes code_;
  std::map<std::string, size_t> labels_;
  std::vector<std::pair<size_t, std::string>> fixups_;
};

}  // namespace llama
