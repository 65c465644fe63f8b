#pragma once

#include <array>
#include <memory>
#include <stdexcept>
#include <string>
#include <variant>
#include <vector>

#include "llama/types.hpp"

namespace llama::abi {

struct MalformedAbi : std::runtime_error {
  explicit MalformedAbi(const std::string& what) : std::runtime_error("malformed ABI: " + what) {}
};
struct AbiError : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct ArityMismatch : AbiError {
  using AbiError::AbiError;
};
struct TypeMismatch : AbiError {
  using AbiError::AbiError;
};
struct ValueOutOfRange : AbiError {
  using AbiError::AbiError;
};
struct UnknownFunction : AbiError {
  using AbiError::AbiError;
};

enum class TypeKind : uint8_t { Uint, Int, Addr, Bool, FixedBytes, Bytes, String, Array };

// Supported type grammar: uintN/intN (N in 8..256 step 8), address, bool,
// bytesN, bytes, string, and one level of T[] over static element types.
struct AbiType {
  TypeKind kind = TypeKind::Uint;
  uint16_t bits = 256;   // uint/int width
  uint16_t nbytes = 0;   // bytesN width
  std::shared_ptr<AbiType> elem;  // array element

  static AbiType parse(const std::string& s);
  std::string canonical() const;
  bool is_dynamic() const;

  static AbiType uint_t(uint16_t bits = 256);
  static AbiType address_t();
  static AbiType bool_t();
};

// One decoded argument. Numeric kinds (uint/int/address/bool) live in `num`
// (ints as their 256-bit two's-complement pattern), byte kinds in `data`,
// arrays in `elems`.
struct AbiValue {
  u256 num;
  bytes data;
  std::vector<AbiValue> elems;

  bool operator==(const AbiValue&) const = default;

  static AbiValue of(u256 v) {
    AbiValue a;
    a.num = std::move(v);
    return a;
  }
  static AbiValue of_bytes(bytes b) {
    AbiValue a;
    a.data = std::move(b);
    return a;
  }
};

enum class Mutability : uint8_t { View, NonPayable, Payable };

struct FunctionDescriptor {
  std::string name;
  std::array<uint8_t, 4> selector{};
  std::vector<AbiType> inputs;
  Mutability mutability = Mutability::NonPayable;

  bool payable() const { return mutability == Mutability::Payable; }
  bool state_modifying() const { return mutability != Mutability::View; }
  std::string signature() const;
};

std::array<uint8_t, 4> selector_for(const std::string& signature);

// Standard contract-ABI JSON; entries of type "function" only.
std::vector<FunctionDescriptor> parse_abi(const std::string& json_text);

// selector || head/tail encoding. Throws ArityMismatch/TypeMismatch/ValueOutOfRange.
bytes encode_call(const FunctionDescriptor& fd, const std::vector<AbiValue>& args);

// Inverse of encode_call on the argument part (selector verified first).
std::vector<AbiValue> decode_call(const FunctionDescriptor& fd, const bytes& calldata);

// Argument literals: decimal / 0x-hex numbers, true/false, quoted strings,
// 0x-hex byte strings, [a,b,c] arrays. With coerce=true integers reduce
// modulo the type range and long addresses keep their low 20 bytes.
AbiValue parse_literal(const AbiType& type, const std::string& literal, bool coerce);
std::string literal_of(const AbiType& type, const AbiValue& v);

// Raw call proposed by a text backend, before format verification.
struct RawCall {
  std::string function;
  std::vector<std::string> args;
  u256 value = 0;
  int sender = 0;
};

struct ValidatedCall {
  FunctionDescriptor fd;
  std::vector<AbiValue> args;
  u256 value = 0;
  int sender = 0;
};

struct CallDefect {
  std::string code;  // UnknownFunction | ArityMismatch | TypeMismatch
  std::string detail;
};

// Format verification: canonicalizes a raw call against the ABI, coercing
// out-of-range values, or explains why it must be dropped.
std::variant<ValidatedCall, std::vector<CallDefect>> validate_call(
    const std::vector<FunctionDescriptor>& fds, const RawCall& raw);

// Head word index of each static argument (all head slots are single words
// in this type grammar, so argument i owns head word i).
std::vector<uint16_t> static_word_indices(const FunctionDescriptor& fd);

}  // namespace llama::abi
