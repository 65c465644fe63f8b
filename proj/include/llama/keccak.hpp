#pragma once

#include <array>
#include <cstddef>
#include <cstdint>

#include "llama/types.hpp"

namespace llama {

// Keccak-256 with the original 0x01 padding (the contract-world variant,
// not NIST SHA3). Selectors and storage-slot hashing both go through here.
std::array<uint8_t, 32> keccak256(const uint8_t* data, size_t len);
std::array<uint8_t, 32> keccak256(const bytes& data);
std::array<uint8_t, 32> keccak256(const std::string& data);

u256 keccak256_u256(const bytes& data);

}  // namespace llama
