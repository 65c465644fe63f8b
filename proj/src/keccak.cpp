#include "llama/keccak.hpp"

#include <cstring>

namespace llama {

namespace {

constexpr uint64_t kRoundConstants[24] = {
    0x0000000000000001ULL, 0x0000000000008082ULL, 0x800000000000808aULL, 0x8000000080008000ULL,
    0x000000000000808bULL, 0x0000000080000001ULL, 0x8000000080008081ULL, 0x8000000000008009ULL,
    0x000000000000008aULL, 0x0000000000000088ULL, 0x0000000080008009ULL, 0x000000008000000aULL,
    0x000000008000808bULL, 0x800000000000008bULL, 0x8000000000008089ULL, 0x8000000000008003ULL,
    0x8000000000008002ULL, 0x8000000000000080ULL, 0x000000000000800aULL, 0x800000008000000aULL,
    0x8000000080008081ULL, 0x8000000000008080ULL, 0x0000000080000001ULL, 0x8000000080008008ULL};

constexpr int kRotations[24] = {1,  3,  6,  10, 15, 21, 28, 36, 45, 55, 2,  14,
                                27, 41, 56, 8,  25, 43, 62, 18, 39, 61, 20, 44};

constexpr int kPiLane[24] = {10, 7,  11, 17, 18, 3, 5,  16, 8,  21, 24, 4,
                             15, 23, 19, 13, 12, 2, 20, 14, 22, 9,  6,  1};

inline uint64_t rotl64(uint64_t x, int n) { return (x << n) | (x >> (64 - n)); }

void keccak_f1600(uint64_t st[25]) {
  for (int round = 0; round < 24; ++round) {
    // theta
    uint64_t bc[5];
    for (int i = 0; i < 5; ++i)
      bc[i] = st[i] ^ st[i + 5] ^ st[i + 10] ^ st[i + 15] ^ st[i + 20];
    for (int i = 0; i < 5; ++i) {
      uint64_t t = bc[(i + 4) % 5] ^ rotl64(bc[(i + 1) % 5], 1);
      for (int j = 0; j < 25; j += 5) st[j + i] ^= t;
    }
    // rho + pi
    uint64_t t = st[1];
    for (int i = 0; i < 24; ++i) {
      int j = kPiLane[i];
      uint64_t tmp = st[j];
      st[j] = rotl64(t, kRotations[i]);
      t = tmp;
    }
    // chi
    for (int j = 0; j < 25; j += 5) {
      uint64_t row[5];
      for (int i = 0; i < 5; ++i) row[i] = st[j + i];
      for (int i = 0; i < 5; ++i) st[j + i] = row[i] ^ (~row[(i + 1) % 5] & row[(i + 2) % 5]);
    }
    // iota
    st[0] ^= kRoundConstants[round];
  }
}

}  // namespace

std::array<uint8_t, 32> keccak256(const uint8_t* data, size_t len) {
  constexpr size_t rate = 136;  // 1088-bit rate for 256-bit output
  uint64_t st[25] = {};
  uint8_t block[rate];

  while (len >= rate) {
    for (size_t i = 0; i < rate / 8; ++i) {
      uint64_t lane;
      std::memcpy(&lane, data + i * 8, 8);
      st[i] ^= lane;  // little-endian host assumed (x86/arm)
    }
    keccak_f1600(st);
    data += rate;
    len -= rate;
  }

  std::memset(block, 0, rate);
  if (len) std::memcpy(block, data, len);
  block[len] = 0x01;
  block[rate - 1] |= 0x80;
  for (size_t i = 0; i < rate / 8; ++i) {
    uint64_t lane;
    std::memcpy(&lane, block + i * 8, 8);
    st[i] ^= lane;
  }
  keccak_f1600(st);

  std::array<uint8_t, 32> out;
  std::memcpy(out.data(), st, 32);
  return out;
}

std::array<uint8_t, 32> keccak256(const bytes& data) { return keccak256(data.data(), data.size()); }

std::array<uint8_t, 32> keccak256(const std::string& data) {
  return keccak256(reinterpret_cast<const uint8_t*>(data.data()), data.size());
}

u256 keccak256_u256(const bytes& data) {
  auto h = keccak256(data);
  return u256_from_be(h.data(), h.size());
}

}  // namespace llama
