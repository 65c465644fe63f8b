#include "llama/evmasm.hpp"

#include <stdexcept>

namespace llama {

bytes Asm::build() const {
  bytes out = code_;
  for (const auto& [pos, name] : fixups_) {
    auto it = labels_.find(name);
    if (it == labels_.end()) throw std::runtime_error("unresolved label: " + name);
    size_t target = it->second;
    if (target > 0xffff) throw std::runtime_error("label out of PUSH2 range: " + name);
    out[pos] = static_cast<uint8_t>(target >> 8);
    out[pos + 1] = static_cast<uint8_t>(target & 0xff);
  }
  return out;
}

}  // namespace llama
