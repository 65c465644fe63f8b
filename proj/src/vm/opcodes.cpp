#include "llama/vm/opcodes.hpp"

namespace llama::vm {

bool opcode_supported(uint8_t op) {
  if (is_push(op) || is_dup(op) || is_swap(op) || is_log(op)) return true;
  switch (op) {
    case OP_STOP:
    case OP_ADD:
    case OP_MUL:
    case OP_SUB:
    case OP_DIV:
    case OP_SDIV:
    case OP_MOD:
    case OP_EXP:
    case OP_LT:
    case OP_GT:
    case OP_SLT:
    case OP_SGT:
    case OP_EQ:
    case OP_ISZERO:
    case OP_AND:
    case OP_OR:
    case OP_XOR:
    case OP_NOT:
    case OP_BYTE:
    case OP_SHL:
    case OP_SHR:
    case OP_KECCAK256:
    case OP_ADDRESS:
    case OP_BALANCE:
    case OP_ORIGIN:
    case OP_CALLER:
    case OP_CALLVALUE:
    case OP_CALLDATALOAD:
    case OP_CALLDATASIZE:
    case OP_CALLDATACOPY:
    case OP_EXTCODESIZE:
    case OP_RETURNDATASIZE:
    case OP_RETURNDATACOPY:
    case OP_TIMESTAMP:
    case OP_NUMBER:
    case OP_GASLIMIT:
    case OP_POP:
    case OP_MLOAD:
    case OP_MSTORE:
    case OP_MSTORE8:
    case OP_SLOAD:
    case OP_SSTORE:
    case OP_JUMP:
    case OP_JUMPI:
    case OP_PC:
    case OP_GAS:
    case OP_JUMPDEST:
    case OP_CALL:
    case OP_RETURN:
    case OP_DELEGATECALL:
    case OP_STATICCALL:
    case OP_REVERT:
    case OP_INVALID:
    case OP_SELFDESTRUCT:
      return true;
    default:
      return false;
  }
}

const char* opcode_name(uint8_t op) {
  if (is_push(op)) return "PUSH";
  if (is_dup(op)) return "DUP";
  if (is_swap(op)) return "SWAP";
  if (is_log(op)) return "LOG";
  switch (op) {
    case OP_STOP: return "STOP";
    case OP_ADD: return "ADD";
    case OP_MUL: return "MUL";
    case OP_SUB: return "SUB";
    case OP_DIV: return "DIV";
    case OP_SDIV: return "SDIV";
    case OP_MOD: return "MOD";
    case OP_EXP: return "EXP";
    case OP_LT: return "LT";
    case OP_GT: return "GT";
    case OP_SLT: return "SLT";
    case OP_SGT: return "SGT";
    case OP_EQ: return "EQ";
    case OP_ISZERO: return "ISZERO";
    case OP_AND: return "AND";
    case OP_OR: return "OR";
    case OP_XOR: return "XOR";
    case OP_NOT: return "NOT";
    case OP_BYTE: return "BYTE";
    case OP_SHL: return "SHL";
    case OP_SHR: return "SHR";
    case OP_KECCAK256: return "KECCAK256";
    case OP_ADDRESS: return "ADDRESS";
    case OP_BALANCE: return "BALANCE";
    case OP_ORIGIN: return "ORIGIN";
    case OP_CALLER: return "CALLER";
    case OP_CALLVALUE: return "CALLVALUE";
    case OP_CALLDATALOAD: return "CALLDATALOAD";
    case OP_CALLDATASIZE: return "CALLDATASIZE";
    case OP_CALLDATACOPY: return "CALLDATACOPY";
    case OP_EXTCODESIZE: return "EXTCODESIZE";
    case OP_RETURNDATASIZE: return "RETURNDATASIZE";
    case OP_RETURNDATACOPY: return "RETURNDATACOPY";
    case OP_TIMESTAMP: return "TIMESTAMP";
    case OP_NUMBER: return "NUMBER";
    case OP_GASLIMIT: return "GASLIMIT";
    case OP_POP: return "POP";
    case OP_MLOAD: return "MLOAD";
    case OP_MSTORE: return "MSTORE";
    case OP_MSTORE8: return "MSTORE8";
    case OP_SLOAD: return "SLOAD";
    case OP_SSTORE: return "SSTORE";
    case OP_JUMP: return "JUMP";
    case OP_JUMPI: return "JUMPI";
    case OP_PC: return "PC";
    case OP_GAS: return "GAS";
    case OP_JUMPDEST: return "JUMPDEST";
    case OP_CALL: return "CALL";
    case OP_RETURN: return "RETURN";
    case OP_DELEGATECALL: return "DELEGATECALL";
    case OP_STATICCALL: return "STATICCALL";
    case OP_REVERT: return "REVERT";
    case OP_INVALID: return "INVALID";
    case OP_SELFDESTRUCT: return "SELFDESTRUCT";
    default: return "UNKNOWN";
  }
}

}  // namespace llama::vm
