#pragma once

#include <cstdint>
#include <string>

namespace llama::vm {

// Supported opcode subset. Anything outside this table raises UnknownOpcodeError,
// which flags a bad bundle rather than a contract fault.
enum Opcode : uint8_t {
  OP_STOP = 0x00,
  OP_ADD = 0x01,
  OP_MUL = 0x02,
  OP_SUB = 0x03,
  OP_DIV = 0x04,
  OP_SDIV = 0x05,
  OP_MOD = 0x06,
  OP_EXP = 0x0a,
  OP_LT = 0x10,
  OP_GT = 0x11,
  OP_SLT = 0x12,
  OP_SGT = 0x13,
  OP_EQ = 0x14,
  OP_ISZERO = 0x15,
  OP_AND = 0x16,
  OP_OR = 0x17,
  OP_XOR = 0x18,
  OP_NOT = 0x19,
  OP_BYTE = 0x1a,
  OP_SHL = 0x1b,
  OP_SHR = 0x1c,
  OP_KECCAK256 = 0x20,
  OP_ADDRESS = 0x30,
  OP_BALANCE = 0x31,
  OP_ORIGIN = 0x32,
  OP_CALLER = 0x33,
  OP_CALLVALUE = 0x34,
  OP_CALLDATALOAD = 0x35,
  OP_CALLDATASIZE = 0x36,
  OP_CALLDATACOPY = 0x37,
  OP_EXTCODESIZE = 0x3b,
  OP_RETURNDATASIZE = 0x3d,
  OP_RETURNDATACOPY = 0x3e,
  OP_TIMESTAMP = 0x42,
  OP_NUMBER = 0x43,
  OP_GASLIMIT = 0x45,
  OP_POP = 0x50,
  OP_MLOAD = 0x51,
  OP_MSTORE = 0x52,
  OP_MSTORE8 = 0x53,
  OP_SLOAD = 0x54,
  OP_SSTORE = 0x55,
  OP_JUMP = 0x56,
  OP_JUMPI = 0x57,
  OP_PC = 0x58,
  OP_GAS = 0x5a,
  OP_JUMPDEST = 0x5b,
  OP_PUSH1 = 0x60,  // ..OP_PUSH32 = 0x7f
  OP_PUSH32 = 0x7f,
  OP_DUP1 = 0x80,  // ..OP_DUP16 = 0x8f
  OP_DUP16 = 0x8f,
  OP_SWAP1 = 0x90,  // ..OP_SWAP16 = 0x9f
  OP_SWAP16 = 0x9f,
  OP_LOG0 = 0xa0,  // ..OP_LOG4 = 0xa4
  OP_LOG4 = 0xa4,
  OP_CALL = 0xf1,
  OP_RETURN = 0xf3,
  OP_DELEGATECALL = 0xf4,
  OP_STATICCALL = 0xfa,
  OP_REVERT = 0xfd,
  OP_INVALID = 0xfe,
  OP_SELFDESTRUCT = 0xff,
};

bool opcode_supported(uint8_t op);
const char* opcode_name(uint8_t op);

inline bool is_push(uint8_t op) { return op >= OP_PUSH1 && op <= OP_PUSH32; }
inline int push_size(uint8_t op) { return op - OP_PUSH1 + 1; }
inline bool is_dup(uint8_t op) { return op >= OP_DUP1 && op <= OP_DUP16; }
inline bool is_swap(uint8_t op) { return op >= OP_SWAP1 && op <= OP_SWAP16; }
inline bool is_log(uint8_t op) { return op >= OP_LOG0 && op <= OP_LOG4; }

}  // namespace llama::vm
