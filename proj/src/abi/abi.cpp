#include "llama/abi/abi.hpp"

#include <algorithm>

#include "json.hpp"
#include "llama/keccak.hpp"

namespace llama::abi {

using nlohmann::json;

AbiType AbiType::uint_t(uint16_t bits) {
  AbiType t;
  t.kind = TypeKind::Uint;
  t.bits = bits;
  return t;
}
AbiType AbiType::address_t() {
  AbiType t;
  t.kind = TypeKind::Addr;
  return t;
}
AbiType AbiType::bool_t() {
  AbiType t;
  t.kind = TypeKind::Bool;
  return t;
}

static uint16_t parse_width(const std::string& s, size_t from) {
  if (from >= s.size()) return 256;
  int v = 0;
  for (size_t i = from; i < s.size(); ++i) {
    if (!isdigit(static_cast<unsigned char>(s[i]))) throw MalformedAbi("bad type: " + s);
    v = v * 10 + (s[i] - '0');
    if (v > 256) throw MalformedAbi("bad width: " + s);
  }
  if (v == 0 || v % 8 != 0) throw MalformedAbi("bad width: " + s);
  return static_cast<uint16_t>(v);
}

AbiType AbiType::parse(const std::string& s) {
  if (s.size() > 2 && s.ends_with("[]")) {
    AbiType t;
    t.kind = TypeKind::Array;
    t.elem = std::make_shared<AbiType>(parse(s.substr(0, s.size() - 2)));
    if (t.elem->is_dynamic() || t.elem->kind == TypeKind::Array)
      throw MalformedAbi("nested dynamic array: " + s);
    return t;
  }
  AbiType t;
  if (s == "address") {
    t.kind = TypeKind::Addr;
  } else if (s == "bool") {
    t.kind = TypeKind::Bool;
  } else if (s == "bytes") {
    t.kind = TypeKind::Bytes;
  } else if (s == "string") {
    t.kind = TypeKind::String;
  } else if (s.starts_with("uint")) {
    t.kind = TypeKind::Uint;
    t.bits = parse_width(s, 4);
  } else if (s.starts_with("int")) {
    t.kind = TypeKind::Int;
    t.bits = parse_width(s, 3);
  } else if (s.starts_with("bytes")) {
    t.kind = TypeKind::FixedBytes;
    int v = 0;
    for (size_t i = 5; i < s.size(); ++i) {
      if (!isdigit(static_cast<unsigned char>(s[i]))) throw MalformedAbi("bad bytesN: " + s);
      v = v * 10 + (s[i] - '0');
    }
    if (v < 1 || v > 32) throw MalformedAbi("bad bytesN: " + s);
    t.nbytes = static_cast<uint16_t>(v);
  } else {
    throw MalformedAbi("unknown type: " + s);
  }
  return t;
}

std::string AbiType::canonical() const {
  switch (kind) {
    case TypeKind::Uint: return "uint" + std::to_string(bits);
    case TypeKind::Int: return "int" + std::to_string(bits);
    case TypeKind::Addr: return "address";
    case TypeKind::Bool: return "bool";
    case TypeKind::FixedBytes: return "bytes" + std::to_string(nbytes);
    case TypeKind::Bytes: return "bytes";
    case TypeKind::String: return "string";
    case TypeKind::Array: return elem->canonical() + "[]";
  }
  return "?";
}

bool AbiType::is_dynamic() const {
  return kind == TypeKind::Bytes || kind == TypeKind::String || kind == TypeKind::Array;
}

std::string FunctionDescriptor::signature() const {
  std::string s = name + "(";
  for (size_t i = 0; i < inputs.size(); ++i) {
    if (i) s += ",";
    s += inputs[i].canonical();
  }
  return s + ")";
}

std::array<uint8_t, 4> selector_for(const std::string& signature) {
  auto h = keccak256(signature);
  return {h[0], h[1], h[2], h[3]};
}

std::vector<FunctionDescriptor> parse_abi(const std::string& json_text) {
  json doc;
  try {
    doc = json::parse(json_text);
  } catch (const json::exception& e) {
    throw MalformedAbi(e.what());
  }
  if (!doc.is_array()) throw MalformedAbi("top-level value must be an array");

  std::vector<FunctionDescriptor> out;
  for (const auto& entry : doc) {
    if (!entry.is_object()) throw MalformedAbi("entry is not an object");
    std::string type = entry.value("type", "function");
    if (type != "function") continue;  // events, constructors, fallbacks
    FunctionDescriptor fd;
    if (!entry.contains("name") || !entry["name"].is_string())
      throw MalformedAbi("function without a name");
    fd.name = entry["name"].get<std::string>();
    if (entry.contains("inputs")) {
      if (!entry["inputs"].is_array()) throw MalformedAbi("inputs must be an array");
      for (const auto& input : entry["inputs"]) {
        if (!input.contains("type")) throw MalformedAbi("input without a type");
        fd.inputs.push_back(AbiType::parse(input["type"].get<std::string>()));
      }
    }
    if (entry.contains("stateMutability")) {
      std::string m = entry["stateMutability"].get<std::string>();
      if (m == "payable")
        fd.mutability = Mutability::Payable;
      else if (m == "view" || m == "pure")
        fd.mutability = Mutability::View;
      else if (m == "nonpayable")
        fd.mutability = Mutability::NonPayable;
      else
        throw MalformedAbi("unknown stateMutability: " + m);
    } else if (entry.value("payable", false)) {
      fd.mutability = Mutability::Payable;
    } else if (entry.value("constant", false)) {
      fd.mutability = Mutability::View;
    }
    fd.selector = selector_for(fd.signature());
    out.push_back(std::move(fd));
  }
  return out;
}

namespace {

u256 uint_max_for(uint16_t bits) {
  return bits >= 256 ? u256_max() : (u256(1) << bits) - 1;
}

void check_static_range(const AbiType& t, const AbiValue& v) {
  switch (t.kind) {
    case TypeKind::Uint:
      if (v.num > uint_max_for(t.bits)) throw ValueOutOfRange("uint" + std::to_string(t.bits));
      break;
    case TypeKind::Int: {
      if (t.bits == 256) break;
      // valid patterns are sign-extended: top 256-bits+1 all equal to sign bit
      u256 shifted = v.num >> (t.bits - 1);
      if (shifted != 0 && shifted != (u256_max() >> (t.bits - 1)))
        throw ValueOutOfRange("int" + std::to_string(t.bits));
      break;
    }
    case TypeKind::Addr:
      if (v.num > uint_max_for(160)) throw ValueOutOfRange("address");
      break;
    case TypeKind::Bool:
      if (v.num > 1) throw ValueOutOfRange("bool");
      break;
    case TypeKind::FixedBytes:
      if (v.data.size() != t.nbytes) throw TypeMismatch("bytes" + std::to_string(t.nbytes));
      break;
    default:
      break;
  }
}

void encode_static(const AbiType& t, const AbiValue& v, bytes& out) {
  check_static_range(t, v);
  if (t.kind == TypeKind::FixedBytes) {
    // left-aligned
    out.insert(out.end(), v.data.begin(), v.data.end());
    out.resize(out.size() + (32 - v.data.size()), 0);
    return;
  }
  auto w = u256_to_be32(v.num);
  out.insert(out.end(), w.begin(), w.end());
}

bytes pad32(const bytes& b) {
  bytes out = b;
  out.resize((b.size() + 31) / 32 * 32, 0);
  return out;
}

bytes encode_tail(const AbiType& t, const AbiValue& v) {
  bytes out;
  if (t.kind == TypeKind::Bytes || t.kind == TypeKind::String) {
    auto len = u256_to_be32(v.data.size());
    out.insert(out.end(), len.begin(), len.end());
    bytes padded = pad32(v.data);
    out.insert(out.end(), padded.begin(), padded.end());
    return out;
  }
  // array of static elements
  auto len = u256_to_be32(v.elems.size());
  out.insert(out.end(), len.begin(), len.end());
  for (const auto& e : v.elems) encode_static(*t.elem, e, out);
  return out;
}

u256 word_at(const bytes& b, size_t off) {
  if (off + 32 > b.size()) throw TypeMismatch("truncated word");
  return u256_from_be(b.data() + off, 32);
}

AbiValue decode_static(const AbiType& t, const bytes& args, size_t off) {
  AbiValue v;
  if (t.kind == TypeKind::FixedBytes) {
    if (off + 32 > args.size()) throw TypeMismatch("truncated word");
    v.data.assign(args.begin() + off, args.begin() + off + t.nbytes);
    return v;
  }
  v.num = word_at(args, off);
  check_static_range(t, v);
  return v;
}

}  // namespace

bytes encode_call(const FunctionDescriptor& fd, const std::vector<AbiValue>& args) {
  if (args.size() != fd.inputs.size())
    throw ArityMismatch(fd.name + ": got " + std::to_string(args.size()) + " args, want " +
                        std::to_string(fd.inputs.size()));
  bytes head;
  bytes tail;
  size_t head_size = 32 * fd.inputs.size();
  for (size_t i = 0; i < fd.inputs.size(); ++i) {
    const AbiType& t = fd.inputs[i];
    if (t.is_dynamic()) {
      auto off = u256_to_be32(head_size + tail.size());
      head.insert(head.end(), off.begin(), off.end());
      bytes enc = encode_tail(t, args[i]);
      tail.insert(tail.end(), enc.begin(), enc.end());
    } else {
      encode_static(t, args[i], head);
    }
  }
  bytes out(fd.selector.begin(), fd.selector.end());
  out.insert(out.end(), head.begin(), head.end());
  out.insert(out.end(), tail.begin(), tail.end());
  return out;
}

std::vector<AbiValue> decode_call(const FunctionDescriptor& fd, const bytes& calldata) {
  if (calldata.size() < 4 || !std::equal(fd.selector.begin(), fd.selector.end(), calldata.begin()))
    throw TypeMismatch("selector mismatch for " + fd.name);
  bytes args(calldata.begin() + 4, calldata.end());
  std::vector<AbiValue> out;
  for (size_t i = 0; i < fd.inputs.size(); ++i) {
    const AbiType& t = fd.inputs[i];
    size_t head_off = 32 * i;
    if (!t.is_dynamic()) {
      out.push_back(decode_static(t, args, head_off));
      continue;
    }
    u256 off_word = word_at(args, head_off);
    if (off_word > args.size()) throw TypeMismatch("offset out of bounds");
    size_t off = to_u64(off_word);
    u256 len_word = word_at(args, off);
    if (len_word > args.size()) throw TypeMismatch("length out of bounds");
    size_t len = to_u64(len_word);
    AbiValue v;
    if (t.kind == TypeKind::Bytes || t.kind == TypeKind::String) {
      if (off + 32 + len > args.size()) throw TypeMismatch("payload out of bounds");
      v.data.assign(args.begin() + off + 32, args.begin() + off + 32 + len);
    } else {
      for (size_t k = 0; k < len; ++k)
        v.elems.push_back(decode_static(*t.elem, args, off + 32 + 32 * k));
    }
    out.push_back(std::move(v));
  }
  return out;
}

namespace {

std::string trim(const std::string& s) {
  size_t a = s.find_first_not_of(" \t\r\n");
  if (a == std::string::npos) return "";
  size_t b = s.find_last_not_of(" \t\r\n");
  return s.substr(a, b - a + 1);
}

u256 sign_extend(const u256& v, uint16_t bits) {
  if (bits >= 256) return v;
  u256 masked = v & uint_max_for(bits);
  if ((masked >> (bits - 1)) != 0) return masked | ~uint_max_for(bits);
  return masked;
}

// splits "a,b,[c,d]" at top-level commas
std::vector<std::string> split_args(const std::string& s) {
  std::vector<std::string> out;
  int depth = 0;
  bool in_quote = false;
  std::string cur;
  for (char c : s) {
    if (c == '"' ) in_quote = !in_quote;
    if (!in_quote) {
      if (c == '[' || c == '(') ++depth;
      if (c == ']' || c == ')') --depth;
      if (c == ',' && depth == 0) {
        out.push_back(trim(cur));
        cur.clear();
        continue;
      }
    }
    cur.push_back(c);
  }
  if (!trim(cur).empty() || !out.empty()) out.push_back(trim(cur));
  return out;
}

}  // namespace

AbiValue parse_literal(const AbiType& t, const std::string& raw, bool coerce) {
  std::string lit = trim(raw);
  switch (t.kind) {
    case TypeKind::Uint: {
      u256 v = u256_from_string(lit);
      u256 max = uint_max_for(t.bits);
      if (v > max) {
        if (!coerce) throw ValueOutOfRange(t.canonical() + " = " + lit);
        v &= max;  // reduced modulo the type range
      }
      return AbiValue::of(v);
    }
    case TypeKind::Int: {
      bool neg = !lit.empty() && lit[0] == '-';
      u256 mag = u256_from_string(neg ? lit.substr(1) : lit);
      u256 pattern = neg ? (~mag + 1) : mag;
      u256 extended = sign_extend(pattern, t.bits);
      if (!coerce) {
        AbiValue v = AbiValue::of(pattern);
        check_static_range(t, v);
        return v;
      }
      return AbiValue::of(extended);
    }
    case TypeKind::Addr: {
      if (!lit.starts_with("0x")) throw TypeMismatch("address literal: " + lit);
      bytes b = from_hex(lit);
      if (b.size() > 20) {
        if (!coerce) throw ValueOutOfRange("address literal: " + lit);
        b.erase(b.begin(), b.end() - 20);  // keep low 20 bytes
      }
      // short literals zero-pad on the left
      return AbiValue::of(u256_from_be(b.data(), b.size()));
    }
    case TypeKind::Bool: {
      if (lit == "true" || lit == "1") return AbiValue::of(1);
      if (lit == "false" || lit == "0") return AbiValue::of(0);
      throw TypeMismatch("bool literal: " + lit);
    }
    case TypeKind::FixedBytes: {
      bytes b = lit.starts_with("0x") ? from_hex(lit) : bytes(lit.begin(), lit.end());
      if (b.size() > t.nbytes) {
        if (!coerce) throw ValueOutOfRange(t.canonical());
        b.resize(t.nbytes);
      }
      b.resize(t.nbytes, 0);
      return AbiValue::of_bytes(std::move(b));
    }
    case TypeKind::Bytes: {
      if (!lit.starts_with("0x")) throw TypeMismatch("bytes literal: " + lit);
      return AbiValue::of_bytes(from_hex(lit));
    }
    case TypeKind::String: {
      if (lit.size() >= 2 && lit.front() == '"' && lit.back() == '"')
        lit = lit.substr(1, lit.size() - 2);
      return AbiValue::of_bytes(bytes(lit.begin(), lit.end()));
    }
    case TypeKind::Array: {
      if (lit.size() < 2 || lit.front() != '[' || lit.back() != ']')
        throw TypeMismatch("array literal: " + lit);
      AbiValue v;
      std::string inner = trim(lit.substr(1, lit.size() - 2));
      if (!inner.empty())
        for (const auto& part : split_args(inner))
          v.elems.push_back(parse_literal(*t.elem, part, coerce));
      return v;
    }
  }
  throw TypeMismatch("unhandled type");
}

std::string literal_of(const AbiType& t, const AbiValue& v) {
  switch (t.kind) {
    case TypeKind::Uint:
    case TypeKind::Int:
    case TypeKind::Bool:
      return u256_to_dec(v.num);
    case TypeKind::Addr:
      return to_hex(address_from_u256(v.num));
    case TypeKind::FixedBytes:
    case TypeKind::Bytes:
      return "0x" + to_hex(v.data);
    case TypeKind::String:
      return "\"" + std::string(v.data.begin(), v.data.end()) + "\"";
    case TypeKind::Array: {
      std::string s = "[";
      for (size_t i = 0; i < v.elems.size(); ++i) {
        if (i) s += ",";
        s += literal_of(*t.elem, v.elems[i]);
      }
      return s + "]";
    }
  }
  return "";
}

std::variant<ValidatedCall, std::vector<CallDefect>> validate_call(
    const std::vector<FunctionDescriptor>& fds, const RawCall& raw) {
  std::vector<CallDefect> defects;
  const FunctionDescriptor* fd = nullptr;
  for (const auto& f : fds)
    if (f.name == raw.function) fd = &f;
  if (!fd) {
    defects.push_back({"UnknownFunction", raw.function});
    return defects;
  }
  if (raw.args.size() != fd->inputs.size()) {
    defects.push_back({"ArityMismatch", raw.function + ": got " +
                                            std::to_string(raw.args.size()) + ", want " +
                                            std::to_string(fd->inputs.size())});
    return defects;
  }
  ValidatedCall call;
  call.fd = *fd;
  call.value = raw.value;
  call.sender = raw.sender;
  for (size_t i = 0; i < raw.args.size(); ++i) {
    try {
      call.args.push_back(parse_literal(fd->inputs[i], raw.args[i], /*coerce=*/true));
    } catch (const std::exception& e) {
      defects.push_back({"TypeMismatch", e.what()});
    }
  }
  if (!defects.empty()) return defects;
  return call;
}

std::vector<uint16_t> static_word_indices(const FunctionDescriptor& fd) {
  std::vector<uint16_t> out;
  for (size_t i = 0; i < fd.inputs.size(); ++i)
    if (!fd.inputs[i].is_dynamic()) out.push_back(static_cast<uint16_t>(i));
  return out;
}

}  // namespace llama::abi
