#include "llama/types.hpp"

#include <boost/multiprecision/cpp_int.hpp>

namespace llama {

u256 u256_from_be(const uint8_t* data, size_t len) {
  u256 v = 0;
  for (size_t i = 0; i < len && i < 32; ++i) v = (v << 8) | data[i];
  return v;
}

void u256_to_be32(const u256& v, uint8_t out[32]) {
  u256 x = v;
  for (int i = 31; i >= 0; --i) {
    out[i] = static_cast<uint8_t>(x & 0xff);
    x >>= 8;
  }
}

bytes u256_to_be32(const u256& v) {
  bytes out(32);
  u256_to_be32(v, out.data());
  return out;
}

Address address_from_u256(const u256& v) {
  uint8_t word[32];
  u256_to_be32(v, word);
  Address a;
  std::copy(word + 12, word + 32, a.raw.begin());
  return a;
}

u256 address_to_u256(const Address& a) { return u256_from_be(a.raw.data(), a.raw.size()); }

static const char* kHexDigits = "0123456789abcdef";

std::string to_hex(const uint8_t* data, size_t len) {
  std::string s;
  s.reserve(len * 2);
  for (size_t i = 0; i < len; ++i) {
    s.push_back(kHexDigits[data[i] >> 4]);
    s.push_back(kHexDigits[data[i] & 0xf]);
  }
  return s;
}

std::string to_hex(const bytes& b) { return to_hex(b.data(), b.size()); }

std::string to_hex(const Address& a) { return "0x" + to_hex(a.raw.data(), a.raw.size()); }

static int nibble(char c) {
  if (c >= '0' && c <= '9') return c - '0';
  if (c >= 'a' && c <= 'f') return c - 'a' + 10;
  if (c >= 'A' && c <= 'F') return c - 'A' + 10;
  return -1;
}

bytes from_hex(const std::string& s) {
  size_t begin = 0;
  if (s.size() >= 2 && s[0] == '0' && (s[1] == 'x' || s[1] == 'X')) begin = 2;
  if ((s.size() - begin) % 2 != 0) throw std::invalid_argument("odd-length hex string");
  bytes out;
  out.reserve((s.size() - begin) / 2);
  for (size_t i = begin; i < s.size(); i += 2) {
    int hi = nibble(s[i]), lo = nibble(s[i + 1]);
    if (hi < 0 || lo < 0) throw std::invalid_argument("bad hex digit in: " + s);
    out.push_back(static_cast<uint8_t>(hi << 4 | lo));
  }
  return out;
}

Address address_from_hex(const std::string& s) {
  bytes b = from_hex(s);
  if (b.size() > 20) throw std::invalid_argument("address too long: " + s);
  Address a;
  std::copy(b.begin(), b.end(), a.raw.begin() + (20 - b.size()));
  return a;
}

std::string u256_to_dec(const u256& v) { return v.str(); }

std::string u256_to_hex(const u256& v) {
  if (v == 0) return "0x0";
  std::string digits;
  u256 x = v;
  while (x != 0) {
    digits.push_back(kHexDigits[static_cast<unsigned>(x & 0xf)]);
    x >>= 4;
  }
  return "0x" + std::string(digits.rbegin(), digits.rend());
}

u256 u256_from_string(const std::string& s) {
  if (s.empty()) throw std::invalid_argument("empty number");
  try {
    if (s.size() >= 2 && s[0] == '0' && (s[1] == 'x' || s[1] == 'X')) {
      u256 v = 0;
      if (s.size() == 2 || s.size() > 2 + 64) throw std::invalid_argument("bad hex number: " + s);
      for (size_t i = 2; i < s.size(); ++i) {
        int n = nibble(s[i]);
        if (n < 0) throw std::invalid_argument("bad hex number: " + s);
        v = (v << 4) | n;
      }
      return v;
    }
    return u256(s);  // boost parses decimal, throws on junk
  } catch (const std::exception&) {
    throw std::invalid_argument("bad number: " + s);
  }
}

}  // namespace llama
