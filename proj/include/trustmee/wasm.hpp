// Copyright 2026 The TrustMee Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.
//
// Self-contained WebAssembly core-module engine (MVP + sign-extension ops)
// used to sandbox verification components. Decoding flattens each function
// into a branch-resolved instruction array; execution is a metered switch
// interpreter over 64-bit value slots. Static stack-height validation during
// flattening plus runtime memory/frame bounds checks keep hostile modules
// contained; type confusion inside a module can only corrupt that module's
// own computation.

#ifndef TRUSTMEE_WASM_HPP_
#define TRUSTMEE_WASM_HPP_

#include <bit>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <cstring>
#include <functional>
#include <limits>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "trustmee/bytes.hpp"
#include "trustmee/error.hpp"

namespace trustmee::wasm {

inline constexpr uint8_t kTypeI32 = 0x7f;
inline constexpr uint8_t kTypeI64 = 0x7e;
inline constexpr uint8_t kTypeF32 = 0x7d;
inline constexpr uint8_t kTypeF64 = 0x7c;

struct FuncType {
  std::vector<uint8_t> params;
  std::vector<uint8_t> results;
  bool operator==(const FuncType&) const = default;
};

// Flattened instruction. Wire opcodes are reused where semantics carry over;
// branch-like ops hold resolved targets:
//   br/br_if:  a = target ip, x = carried arity, b = truncate-to height
//   kJump/kJumpIfZero: a = target ip
//   call: a = defined-function index; kCallHost: a = import index
//   br_table: a = first entry in FuncBody::brtable, x = case count
struct Instr {
  uint16_t op = 0;
  uint16_t x = 0;
  uint32_t a = 0;
  uint64_t b = 0;
};

inline constexpr uint16_t kOpJump = 0x200;
inline constexpr uint16_t kOpJumpIfZero = 0x201;
inline constexpr uint16_t kOpCallHost = 0x202;
inline constexpr uint16_t kOpReturn = 0x203;

struct BrCase {
  uint32_t target = 0;
  uint32_t trunc = 0;
  uint16_t arity = 0;
};

struct FuncBody {
  uint32_t type_idx = 0;
  uint32_t num_locals = 0;  // params + declared locals, in slots
  uint32_t max_stack = 0;   // operand slots above the locals
  std::vector<Instr> code;
  std::vector<BrCase> brtable;
};

struct ImportFunc {
  std::string module;
  std::string name;
  uint32_t type_idx = 0;
};

struct Export {
  std::string name;
  uint8_t kind = 0;
  uint32_t index = 0;
};

struct GlobalDef {
  uint8_t type = kTypeI32;
  bool mut = false;
  uint64_t init = 0;
};

struct DataSeg {
  uint32_t offset = 0;
  Bytes bytes;
};

struct ElemSeg {
  uint32_t offset = 0;
  std::vector<uint32_t> funcs;
};

struct Module {
  std::vector<FuncType> types;
  std::vector<ImportFunc> imports;
  std::vector<FuncBody> funcs;  // defined functions; global index = imports.size() + i
  bool has_memory = false;
  uint32_t mem_initial_pages = 0;
  uint32_t mem_max_pages = 65536;
  uint32_t table_size = 0;
  std::vector<ElemSeg> elems;
  std::vector<GlobalDef> globals;
  std::vector<Export> exports;
  std::vector<DataSeg> datas;
  std::optional<uint32_t> start;

  const Export* find_export(std::string_view name, uint8_t kind) const {
    for (const auto& e : exports) {
      if (e.kind == kind && e.name == name) return &e;
    }
    return nullptr;
  }
  const FuncType& type_of(uint32_t global_fn_idx) const {
    if (global_fn_idx < imports.size()) return types[imports[global_fn_idx].type_idx];
    return types[funcs[global_fn_idx - imports.size()].type_idx];
  }
};

namespace detail {

class ByteReader {
 public:
  ByteReader(std::span<const uint8_t> data) : data_(data) {}

  bool done() const { return pos_ == data_.size(); }
  size_t pos() const { return pos_; }
  size_t remaining() const { return data_.size() - pos_; }

  uint8_t u8() {
    if (pos_ >= data_.size()) fail(Errc::kInvalidBytecode, "truncated module");
    return data_[pos_++];
  }

  uint32_t leb_u32() { return static_cast<uint32_t>(leb_unsigned(32)); }
  uint64_t leb_u64() { return leb_unsigned(64); }
  int32_t leb_s32() { return static_cast<int32_t>(leb_signed(32)); }
  int64_t leb_s64() { return leb_signed(64); }
  int64_t leb_s33() { return leb_signed(33); }

  std::span<const uint8_t> chunk(size_t n) {
    if (n > remaining()) fail(Errc::kInvalidBytecode, "truncated chunk");
    auto out = data_.subspan(pos_, n);
    pos_ += n;
    return out;
  }

  std::string name() {
    uint32_t n = leb_u32();
    auto c = chunk(n);
    return std::string(c.begin(), c.end());
  }

  uint32_t fixed_u32() {
    auto c = chunk(4);
    return static_cast<uint32_t>(c[0]) | static_cast<uint32_t>(c[1]) << 8 |
           static_cast<uint32_t>(c[2]) << 16 | static_cast<uint32_t>(c[3]) << 24;
  }
  uint64_t fixed_u64() {
    uint64_t lo = fixed_u32();
    uint64_t hi = fixed_u32();
    return hi << 32 | lo;
  }

 private:
  uint64_t leb_unsigned(int bits) {
    uint64_t result = 0;
    int shift = 0;
    while (true) {
      uint8_t byte = u8();
      result |= static_cast<uint64_t>(byte & 0x7f) << shift;
      if ((byte & 0x80) == 0) {
        if (shift + 7 > bits && (byte >> (bits - shift)) != 0) {
          fail(Errc::kInvalidBytecode, "LEB overflows range");
        }
        return result;
      }
      shift += 7;
      if (shift + 7 > bits + 6) fail(Errc::kInvalidBytecode, "LEB too long");
    }
  }

  int64_t leb_signed(int bits) {
    int64_t result = 0;
    int shift = 0;
    uint8_t byte;
    do {
      byte = u8();
      result |= static_cast<int64_t>(static_cast<uint64_t>(byte & 0x7f) << shift);
      shift += 7;
      if (shift >= bits + 7) fail(Errc::kInvalidBytecode, "LEB too long");
    } while (byte & 0x80);
    if (shift < 64 && (byte & 0x40)) result |= -(static_cast<int64_t>(1) << shift);
    return result;
  }

  std::span<const uint8_t> data_;
  size_t pos_ = 0;
};

// Per-opcode operand-stack effect (pops, pushes) for everything except the
// control and call families, which are handled explicitly.
inline bool simple_stack_effect(uint16_t op, int* pops, int* pushes) {
  if (op == 0x1a) { *pops = 1; *pushes = 0; return true; }          // drop
  if (op == 0x1b) { *pops = 3; *pushes = 1; return true; }          // select
  if (op >= 0x20 && op <= 0x24) {
    switch (op) {
      case 0x20: *pops = 0; *pushes = 1; return true;               // local.get
      case 0x21: *pops = 1; *pushes = 0; return true;               // local.set
      case 0x22: *pops = 1; *pushes = 1; return true;               // local.tee
      case 0x23: *pops = 0; *pushes = 1; return true;               // global.get
      case 0x24: *pops = 1; *pushes = 0; return true;               // global.set
    }
  }
  if (op >= 0x28 && op <= 0x35) { *pops = 1; *pushes = 1; return true; }  // loads
  if (op >= 0x36 && op <= 0x3e) { *pops = 2; *pushes = 0; return true; }  // stores
  if (op == 0x3f) { *pops = 0; *pushes = 1; return true; }          // memory.size
  if (op == 0x40) { *pops = 1; *pushes = 1; return true; }          // memory.grow
  if (op >= 0x41 && op <= 0x44) { *pops = 0; *pushes = 1; return true; }  // const
  if (op == 0x45 || op == 0x50) { *pops = 1; *pushes = 1; return true; }  // eqz
  if (op >= 0x46 && op <= 0x4f) { *pops = 2; *pushes = 1; return true; }  // i32 cmp
  if (op >= 0x51 && op <= 0x5a) { *pops = 2; *pushes = 1; return true; }  // i64 cmp
  if (op >= 0x5b && op <= 0x66) { *pops = 2; *pushes = 1; return true; }  // f cmp
  if (op >= 0x67 && op <= 0x69) { *pops = 1; *pushes = 1; return true; }  // i32 unary
  if (op >= 0x6a && op <= 0x78) { *pops = 2; *pushes = 1; return true; }  // i32 binary
  if (op >= 0x79 && op <= 0x7b) { *pops = 1; *pushes = 1; return true; }  // i64 unary
  if (op >= 0x7c && op <= 0x8a) { *pops = 2; *pushes = 1; return true; }  // i64 binary
  if (op >= 0x8b && op <= 0x91) { *pops = 1; *pushes = 1; return true; }  // f32 unary
  if (op >= 0x92 && op <= 0x98) { *pops = 2; *pushes = 1; return true; }  // f32 binary
  if (op >= 0x99 && op <= 0x9f) { *pops = 1; *pushes = 1; return true; }  // f64 unary
  if (op >= 0xa0 && op <= 0xa6) { *pops = 2; *pushes = 1; return true; }  // f64 binary
  if (op >= 0xa7 && op <= 0xc4) { *pops = 1; *pushes = 1; return true; }  // conversions
  return false;
}

}  // namespace detail

struct DecodeLimits {
  size_t max_module_bytes = 64ull << 20;
  uint32_t max_functions = 65536;
  uint32_t max_locals = 65536;
  uint32_t max_stack_slots = 1u << 16;
  uint32_t max_table = 1u << 16;
  uint32_t max_globals = 4096;
};

namespace detail {

class ModuleDecoder {
 public:
  ModuleDecoder(std::span<const uint8_t> bytes, const DecodeLimits& limits)
      : r_(bytes), limits_(limits), size_(bytes.size()) {}

  Module run() {
    if (size_ > limits_.max_module_bytes) fail(Errc::kOversizedInput, "module too large");
    if (r_.remaining() < 8) fail(Errc::kInvalidBytecode, "missing header");
    if (r_.fixed_u32() != 0x6d736100) fail(Errc::kInvalidBytecode, "bad magic");
    if (r_.fixed_u32() != 1) fail(Errc::kInvalidBytecode, "unsupported version");

    int last_section = 0;
    while (!r_.done()) {
      uint8_t id = r_.u8();
      uint32_t len = r_.leb_u32();
      auto payload = r_.chunk(len);
      if (id == 0) continue;  // custom sections are skipped here
      if (id > 11) fail(Errc::kInvalidBytecode, "unknown section id");
      if (id <= last_section) fail(Errc::kInvalidBytecode, "section out of order");
      last_section = id;
      ByteReader s(payload);
      switch (id) {
        case 1: decode_types(s); break;
        case 2: decode_imports(s); break;
        case 3: decode_funcs(s); break;
        case 4: decode_table(s); break;
        case 5: decode_memory(s); break;
        case 6: decode_globals(s); break;
        case 7: decode_exports(s); break;
        case 8: m_.start = s.leb_u32(); break;
        case 9: decode_elems(s); break;
        case 10: decode_code(s); break;
        case 11: decode_data(s); break;
      }
      if (!s.done()) fail(Errc::kInvalidBytecode, "trailing bytes in section");
    }
    if (code_bodies_ != m_.funcs.size()) {
      fail(Errc::kInvalidBytecode, "function/code section mismatch");
    }
    if (m_.start.has_value()) {
      check_fn_index(*m_.start);
      const FuncType& t = m_.type_of(*m_.start);
      if (!t.params.empty() || !t.results.empty()) {
        fail(Errc::kInvalidBytecode, "start function must be nullary");
      }
    }
    for (const auto& e : m_.exports) {
      if (e.kind == 0) check_fn_index(e.index);
    }
    return std::move(m_);
  }

 private:
  void check_fn_index(uint32_t idx) {
    if (idx >= m_.imports.size() + m_.funcs.size()) {
      fail(Errc::kInvalidBytecode, "function index out of range");
    }
  }

  uint8_t valtype(ByteReader& s) {
    uint8_t t = s.u8();
    if (t != kTypeI32 && t != kTypeI64 && t != kTypeF32 && t != kTypeF64) {
      fail(Errc::kInvalidBytecode, "unsupported value type");
    }
    return t;
  }

  void decode_types(ByteReader& s) {
    uint32_t n = s.leb_u32();
    if (n > 4096) fail(Errc::kInvalidBytecode, "too many types");
    for (uint32_t i = 0; i < n; ++i) {
      if (s.u8() != 0x60) fail(Errc::kInvalidBytecode, "expected func type");
      FuncType t;
      uint32_t np = s.leb_u32();
      if (np > 64) fail(Errc::kInvalidBytecode, "too many params");
      for (uint32_t j = 0; j < np; ++j) t.params.push_back(valtype(s));
      uint32_t nr = s.leb_u32();
      if (nr > 1) fail(Errc::kInvalidBytecode, "multi-value results unsupported");
      for (uint32_t j = 0; j < nr; ++j) t.results.push_back(valtype(s));
      m_.types.push_back(std::move(t));
    }
  }

  void decode_imports(ByteReader& s) {
    uint32_t n = s.leb_u32();
    if (n > 256) fail(Errc::kInvalidBytecode, "too many imports");
    for (uint32_t i = 0; i < n; ++i) {
      ImportFunc imp;
      imp.module = s.name();
      imp.name = s.name();
      uint8_t kind = s.u8();
      if (kind != 0) fail(Errc::kInvalidBytecode, "only function imports supported");
      imp.type_idx = s.leb_u32();
      if (imp.type_idx >= m_.types.size()) fail(Errc::kInvalidBytecode, "import type oob");
      m_.imports.push_back(std::move(imp));
    }
  }

  void decode_funcs(ByteReader& s) {
    uint32_t n = s.leb_u32();
    if (n > limits_.max_functions) fail(Errc::kInvalidBytecode, "too many functions");
    for (uint32_t i = 0; i < n; ++i) {
      FuncBody f;
      f.type_idx = s.leb_u32();
      if (f.type_idx >= m_.types.size()) fail(Errc::kInvalidBytecode, "function type oob");
      m_.funcs.push_back(std::move(f));
    }
  }

  void decode_table(ByteReader& s) {
    uint32_t n = s.leb_u32();
    if (n > 1) fail(Errc::kInvalidBytecode, "at most one table");
    for (uint32_t i = 0; i < n; ++i) {
      if (s.u8() != 0x70) fail(Errc::kInvalidBytecode, "only funcref tables");
      uint8_t has_max = s.u8();
      uint32_t min = s.leb_u32();
      uint32_t max = has_max ? s.leb_u32() : min;
      (void)max;
      if (min > limits_.max_table) fail(Errc::kInvalidBytecode, "table too large");
      m_.table_size = min;
    }
  }

  void decode_memory(ByteReader& s) {
    uint32_t n = s.leb_u32();
    if (n > 1) fail(Errc::kInvalidBytecode, "at most one memory");
    for (uint32_t i = 0; i < n; ++i) {
      uint8_t has_max = s.u8();
      if (has_max > 1) fail(Errc::kInvalidBytecode, "bad memory limits flag");
      m_.has_memory = true;
      m_.mem_initial_pages = s.leb_u32();
      m_.mem_max_pages = has_max ? s.leb_u32() : 65536;
      if (m_.mem_initial_pages > 65536 || m_.mem_max_pages > 65536 ||
          m_.mem_initial_pages > m_.mem_max_pages) {
        fail(Errc::kInvalidBytecode, "bad memory limits");
      }
    }
  }

  void decode_globals(ByteReader& s) {
    uint32_t n = s.leb_u32();
    if (n > limits_.max_globals) fail(Errc::kInvalidBytecode, "too many globals");
    for (uint32_t i = 0; i < n; ++i) {
      GlobalDef g;
      g.type = valtype(s);
      uint8_t mut = s.u8();
      if (mut > 1) fail(Errc::kInvalidBytecode, "bad mutability");
      g.mut = mut == 1;
      uint8_t op = s.u8();
      switch (op) {
        case 0x41: g.init = static_cast<uint64_t>(static_cast<uint32_t>(s.leb_s32())); break;
        case 0x42: g.init = static_cast<uint64_t>(s.leb_s64()); break;
        case 0x43: g.init = s.fixed_u32(); break;
        case 0x44: g.init = s.fixed_u64(); break;
        default: fail(Errc::kInvalidBytecode, "unsupported global init");
      }
      if (s.u8() != 0x0b) fail(Errc::kInvalidBytecode, "global init must end");
      m_.globals.push_back(g);
    }
  }

  void decode_exports(ByteReader& s) {
    uint32_t n = s.leb_u32();
    if (n > 1024) fail(Errc::kInvalidBytecode, "too many exports");
    for (uint32_t i = 0; i < n; ++i) {
      Export e;
      e.name = s.name();
      e.kind = s.u8();
      if (e.kind > 3) fail(Errc::kInvalidBytecode, "bad export kind");
      e.index = s.leb_u32();
      m_.exports.push_back(std::move(e));
    }
  }

  void decode_elems(ByteReader& s) {
    uint32_t n = s.leb_u32();
    if (n > 64) fail(Errc::kInvalidBytecode, "too many element segments");
    for (uint32_t i = 0; i < n; ++i) {
      uint32_t flags = s.leb_u32();
      if (flags != 0) fail(Errc::kInvalidBytecode, "only active elem segments");
      ElemSeg seg;
      if (s.u8() != 0x41) fail(Errc::kInvalidBytecode, "elem offset must be i32.const");
      seg.offset = static_cast<uint32_t>(s.leb_s32());
      if (s.u8() != 0x0b) fail(Errc::kInvalidBytecode, "elem offset must end");
      uint32_t count = s.leb_u32();
      if (count > limits_.max_table) fail(Errc::kInvalidBytecode, "elem segment too large");
      for (uint32_t j = 0; j < count; ++j) {
        uint32_t fn = s.leb_u32();
        check_fn_index(fn);
        seg.funcs.push_back(fn);
      }
      m_.elems.push_back(std::move(seg));
    }
  }

  void decode_data(ByteReader& s) {
    uint32_t n = s.leb_u32();
    if (n > 1024) fail(Errc::kInvalidBytecode, "too many data segments");
    for (uint32_t i = 0; i < n; ++i) {
      uint32_t flags = s.leb_u32();
      if (flags != 0) fail(Errc::kInvalidBytecode, "only active data segments");
      DataSeg seg;
      if (s.u8() != 0x41) fail(Errc::kInvalidBytecode, "data offset must be i32.const");
      seg.offset = static_cast<uint32_t>(s.leb_s32());
      if (s.u8() != 0x0b) fail(Errc::kInvalidBytecode, "data offset must end");
      uint32_t len = s.leb_u32();
      auto c = s.chunk(len);
      seg.bytes.assign(c.begin(), c.end());
      m_.datas.push_back(std::move(seg));
    }
  }

  void decode_code(ByteReader& s);

  ByteReader r_;
  const DecodeLimits& limits_;
  size_t size_;
  Module m_;
  size_t code_bodies_ = 0;
};

// Flattens one function body, resolving branch targets and validating stack
// heights along reachable paths.
class FunctionCompiler {
 public:
  FunctionCompiler(Module& m, FuncBody& f, ByteReader& s, const DecodeLimits& limits)
      : m_(m), f_(f), s_(s), limits_(limits) {}

  void run() {
    const FuncType& ft = m_.types[f_.type_idx];
    uint32_t nparams = static_cast<uint32_t>(ft.params.size());
    uint64_t nlocals = nparams;
    uint32_t decl_groups = s_.leb_u32();
    if (decl_groups > 512) fail(Errc::kInvalidBytecode, "too many local groups");
    for (uint32_t i = 0; i < decl_groups; ++i) {
      uint32_t count = s_.leb_u32();
      uint8_t t = s_.u8();
      if (t != kTypeI32 && t != kTypeI64 && t != kTypeF32 && t != kTypeF64) {
        fail(Errc::kInvalidBytecode, "bad local type");
      }
      nlocals += count;
      if (nlocals > limits_.max_locals) fail(Errc::kInvalidBytecode, "too many locals");
    }
    f_.num_locals = static_cast<uint32_t>(nlocals);

    // Implicit function block.
    blocks_.push_back(Block{BlockKind::kFunc, static_cast<uint16_t>(ft.results.size())});
    while (!blocks_.empty()) {
      step();
    }
    if (!s_.done()) fail(Errc::kInvalidBytecode, "trailing bytes in body");
    f_.max_stack = max_h_ + 1;
  }

 private:
  enum class BlockKind : uint8_t { kFunc, kBlock, kLoop, kIf };

  struct Block {
    BlockKind kind;
    uint16_t arity = 0;      // result arity (br carry for block/if/func; 0 for loop)
    uint32_t entry_height = 0;
    uint32_t loop_start = 0;
    std::vector<uint32_t> fixups;       // instr indices patching .a to end
    std::vector<uint32_t> case_fixups;  // brtable entries patching target
    bool has_else = false;
    bool has_if_fixup = false;
    uint32_t if_fixup = 0;  // kJumpIfZero at the `if`, patched to else/end
  };

  uint32_t emit(uint16_t op, uint16_t x = 0, uint32_t a = 0, uint64_t b = 0) {
    f_.code.push_back(Instr{op, x, a, b});
    return static_cast<uint32_t>(f_.code.size() - 1);
  }

  uint32_t here() const { return static_cast<uint32_t>(f_.code.size()); }

  void adjust_height(int pops, int pushes) {
    if (unreachable_) return;
    if (static_cast<int64_t>(h_) < pops) {
      fail(Errc::kInvalidBytecode, "operand stack underflow");
    }
    h_ = h_ - static_cast<uint32_t>(pops) + static_cast<uint32_t>(pushes);
    if (h_ > limits_.max_stack_slots) fail(Errc::kInvalidBytecode, "operand stack too deep");
    if (h_ > max_h_) max_h_ = h_;
  }

  uint16_t block_arity(int64_t bt) {
    if (bt == -64) return 0;  // 0x40 empty
    if (bt == -1 || bt == -2 || bt == -3 || bt == -4) return 1;  // -0x01..-0x04 value types
    fail(Errc::kInvalidBytecode, "type-index block types unsupported");
  }

  Block& target(uint32_t depth) {
    if (depth >= blocks_.size()) fail(Errc::kInvalidBytecode, "branch depth out of range");
    return blocks_[blocks_.size() - 1 - depth];
  }

  // Branch carry: loops receive no values, other targets receive their arity.
  void branch_params(const Block& blk, uint16_t* arity, uint32_t* trunc) {
    *arity = blk.kind == BlockKind::kLoop ? 0 : blk.arity;
    *trunc = blk.entry_height;
    if (!unreachable_ && h_ < blk.entry_height + *arity) {
      fail(Errc::kInvalidBytecode, "branch lacks operands");
    }
  }

  void register_branch_target(Block& blk, uint32_t instr_idx, bool is_case, uint32_t case_idx) {
    if (blk.kind == BlockKind::kLoop) {
      if (is_case) {
        f_.brtable[case_idx].target = blk.loop_start;
      } else {
        f_.code[instr_idx].a = blk.loop_start;
      }
    } else {
      if (is_case) {
        blk.case_fixups.push_back(case_idx);
      } else {
        blk.fixups.push_back(instr_idx);
      }
    }
  }

  void step();
  void live_else();
  void live_end();

  Module& m_;
  FuncBody& f_;
  ByteReader& s_;
  const DecodeLimits& limits_;
  std::vector<Block> blocks_;
  uint32_t h_ = 0;
  uint32_t max_h_ = 0;
  uint32_t dead_depth_ = 0;
  bool unreachable_ = false;
};

}  // namespace detail

Module decode_module(std::span<const uint8_t> bytes, const DecodeLimits& limits = {});

// ---------------------------------------------------------------------------
// Execution
// ---------------------------------------------------------------------------

class Instance;

using HostFn = std::function<void(Instance&, const uint64_t* args, uint64_t* result)>;

struct HostImport {
  std::string name;
  FuncType type;
  HostFn fn;
};

struct InstanceLimits {
  uint64_t max_memory_bytes = 64ull << 20;
  int64_t fuel = 100'000'000;
  std::chrono::steady_clock::time_point deadline =
      std::chrono::steady_clock::time_point::max();
  uint32_t max_frames = 4096;
  uint32_t max_value_slots = 1u << 20;
};

class Instance {
 public:
  Instance(std::shared_ptr<const Module> module, std::vector<HostImport> host_imports,
           const InstanceLimits& limits)
      : mod_(std::move(module)), limits_(limits) {
    // Resolve imports strictly: every module import must match a registered
    // host function by module/name/type.
    for (const auto& imp : mod_->imports) {
      if (imp.module != "trustmee-host") {
        fail(Errc::kInvalidBytecode, "unknown import module: " + imp.module);
      }
      const HostImport* found = nullptr;
      for (const auto& h : host_imports) {
        if (h.name == imp.name) {
          found = &h;
          break;
        }
      }
      if (!found) fail(Errc::kInvalidBytecode, "unknown import: " + imp.name);
      if (!(found->type == mod_->types[imp.type_idx])) {
        fail(Errc::kInvalidBytecode, "import type mismatch: " + imp.name);
      }
      bound_.push_back(found->fn);
    }
    host_imports_ = std::move(host_imports);

    if (mod_->has_memory) {
      uint64_t want = static_cast<uint64_t>(mod_->mem_initial_pages) << 16;
      if (want > limits_.max_memory_bytes) {
        fail(Errc::kMemoryExceeded, "initial memory exceeds policy cap");
      }
      mem_.resize(want);
      max_pages_ = static_cast<uint32_t>(
          std::min<uint64_t>(mod_->mem_max_pages, limits_.max_memory_bytes >> 16));
    }
    for (const auto& g : mod_->globals) globals_.push_back(g.init);
    table_.assign(mod_->table_size, UINT32_MAX);
    for (const auto& seg : mod_->elems) {
      uint64_t end = static_cast<uint64_t>(seg.offset) + seg.funcs.size();
      if (end > table_.size()) fail(Errc::kInvalidBytecode, "elem segment out of range");
      for (size_t i = 0; i < seg.funcs.size(); ++i) table_[seg.offset + i] = seg.funcs[i];
    }
    for (const auto& seg : mod_->datas) {
      uint64_t end = static_cast<uint64_t>(seg.offset) + seg.bytes.size();
      if (end > mem_.size()) fail(Errc::kInvalidBytecode, "data segment out of range");
      std::memcpy(mem_.data() + seg.offset, seg.bytes.data(), seg.bytes.size());
    }
    stack_.resize(limits_.max_value_slots);
    fuel_ = limits_.fuel;

    if (mod_->start.has_value()) {
      invoke(*mod_->start, nullptr, 0, nullptr);
    }
  }

  // Calls an exported function. args/results are raw 64-bit slots.
  uint64_t call(std::string_view name, std::span<const uint64_t> args) {
    const Export* e = mod_->find_export(name, 0);
    if (!e) fail(Errc::kMissingExport, std::string(name));
    const FuncType& t = mod_->type_of(e->index);
    if (t.params.size() != args.size()) fail(Errc::kTrap, "argument count mismatch");
    uint64_t result = 0;
    invoke(e->index, args.data(), args.size(), t.results.empty() ? nullptr : &result);
    return result;
  }

  bool has_export(std::string_view name) const { return mod_->find_export(name, 0); }

  const Module& module() const { return *mod_; }

  uint8_t* mem_data() { return mem_.data(); }
  size_t mem_size() const { return mem_.size(); }

  Bytes mem_read(uint64_t off, uint64_t len) const {
    if (off + len > mem_.size() || off + len < off) fail(Errc::kTrap, "host read out of bounds");
    return Bytes(mem_.begin() + static_cast<ptrdiff_t>(off),
                 mem_.begin() + static_cast<ptrdiff_t>(off + len));
  }
  void mem_write(uint64_t off, std::span<const uint8_t> data) {
    if (off + data.size() > mem_.size() || off + data.size() < off) {
      fail(Errc::kTrap, "host write out of bounds");
    }
    std::memcpy(mem_.data() + off, data.data(), data.size());
  }

  int64_t fuel_remaining() const { return fuel_; }
  uint64_t fuel_consumed() const { return static_cast<uint64_t>(limits_.fuel - fuel_); }

  void check_deadline() const {
    if (std::chrono::steady_clock::now() > limits_.deadline) {
      fail(Errc::kFuelExhausted, "wall clock limit exceeded");
    }
  }

 private:
  struct Frame {
    const FuncBody* fn;
    uint32_t ip;
    uint32_t base;       // first local slot
    uint32_t opnd_base;  // first operand slot
  };

  void invoke(uint32_t global_fn_idx, const uint64_t* args, size_t nargs, uint64_t* result);
  void run(size_t frame_floor);
  size_t push_frame(const FuncBody& f, size_t sp);

  [[noreturn]] void trap(const char* what) const { fail(Errc::kTrap, what); }

  uint32_t mem_pages() const { return static_cast<uint32_t>(mem_.size() >> 16); }

  int32_t grow_memory(uint32_t delta_pages) {
    uint32_t old_pages = mem_pages();
    uint64_t want = static_cast<uint64_t>(old_pages) + delta_pages;
    if (want > max_pages_) return -1;
    mem_.resize(want << 16, 0);
    return static_cast<int32_t>(old_pages);
  }

  template <typename T>
  T mem_load(uint64_t addr, uint64_t offset) const {
    uint64_t ea = addr + offset;
    if (ea + sizeof(T) > mem_.size() || ea + sizeof(T) < ea) trap("memory access out of bounds");
    T v;
    std::memcpy(&v, mem_.data() + ea, sizeof(T));
    return v;
  }
  template <typename T>
  void mem_store(uint64_t addr, uint64_t offset, T v) {
    uint64_t ea = addr + offset;
    if (ea + sizeof(T) > mem_.size() || ea + sizeof(T) < ea) trap("memory access out of bounds");
    std::memcpy(mem_.data() + ea, &v, sizeof(T));
  }

  std::shared_ptr<const Module> mod_;
  InstanceLimits limits_;
  std::vector<HostImport> host_imports_;
  std::vector<HostFn> bound_;
  std::vector<uint8_t> mem_;
  uint32_t max_pages_ = 0;
  std::vector<uint64_t> globals_;
  std::vector<uint32_t> table_;
  std::vector<uint64_t> stack_;
  std::vector<Frame> frames_;
  size_t sp_ = 0;
  int64_t fuel_ = 0;
  uint64_t icount_ = 0;
};

}  // namespace trustmee::wasm

#include "trustmee/wasm_impl.hpp"

#endif  // TRUSTMEE_WASM_HPP_
