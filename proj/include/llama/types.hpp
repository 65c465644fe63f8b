#pragma once

#include <array>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

#include <boost/multiprecision/cpp_int.hpp>

namespace llama {

using bytes = std::vector<uint8_t>;
using u256 = boost::multiprecision::uint256_t;

// 20-byte account identifier, big-endian on the wire.
struct Address {
  std::array<uint8_t, 20> raw{};

  bool operator==(const Address& o) const { return raw == o.raw; }
  bool operator!=(const Address& o) const { return raw != o.raw; }
  bool operator<(const Address& o) const { return raw < o.raw; }
  bool is_zero() const {
    for (auto b : raw)
      if (b) return false;
    return true;
  }
};

u256 u256_from_be(const uint8_t* data, size_t len);
void u256_to_be32(const u256& v, uint8_t out[32]);
bytes u256_to_be32(const u256& v);

Address address_from_u256(const u256& v);
u256 address_to_u256(const Address& a);

std::string to_hex(const uint8_t* data, size_t len);
std::string to_hex(const bytes& b);
std::string to_hex(const Address& a);  // 0x-prefixed, 40 nibbles
bytes from_hex(const std::string& s);  // accepts optional 0x prefix, throws std::invalid_argument
Address address_from_hex(const std::string& s);

std::string u256_to_dec(const u256& v);
std::string u256_to_hex(const u256& v);  // 0x-prefixed, minimal
// Parses decimal or 0x-hex, throws std::invalid_argument on junk.
u256 u256_from_string(const std::string& s);

inline u256 u256_max() { return ~u256(0); }

// Truncates to the low 64 bits (callers guard the range themselves).
inline uint64_t to_u64(const u256& v) { return static_cast<uint64_t>(v & u256(~uint64_t(0))); }

}  // namespace llama
