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

#ifndef TRUSTMEE_WASM_IMPL_HPP_
#define TRUSTMEE_WASM_IMPL_HPP_

namespace trustmee::wasm {

namespace detail {

inline void ModuleDecoder::decode_code(ByteReader& s) {
  uint32_t n = s.leb_u32();
  if (n != m_.funcs.size()) fail(Errc::kInvalidBytecode, "code/function count mismatch");
  for (uint32_t i = 0; i < n; ++i) {
    uint32_t body_size = s.leb_u32();
    auto payload = s.chunk(body_size);
    ByteReader body(payload);
    FunctionCompiler(m_, m_.funcs[i], body, limits_).run();
    ++code_bodies_;
  }
}

inline void FunctionCompiler::step() {
  uint16_t op = s_.u8();

  // Dead code after an unconditional transfer: parse immediates for
  // structural validity, emit nothing, keep block nesting balanced.
  if (unreachable_) {
    switch (op) {
      case 0x02:
      case 0x03: {
        block_arity(s_.leb_s33());
        ++dead_depth_;
        return;
      }
      case 0x04: {
        block_arity(s_.leb_s33());
        ++dead_depth_;
        return;
      }
      case 0x05:
        if (dead_depth_ == 0) live_else();
        return;
      case 0x0b:
        if (dead_depth_ > 0) {
          --dead_depth_;
        } else {
          live_end();
        }
        return;
      case 0x0c:
      case 0x0d: {
        uint32_t depth = s_.leb_u32();
        if (depth >= dead_depth_ + blocks_.size()) {
          fail(Errc::kInvalidBytecode, "branch depth out of range");
        }
        return;
      }
      case 0x0e: {
        uint32_t count = s_.leb_u32();
        if (count > 65536) fail(Errc::kInvalidBytecode, "branch table too large");
        for (uint32_t i = 0; i <= count; ++i) {
          uint32_t depth = s_.leb_u32();
          if (depth >= dead_depth_ + blocks_.size()) {
            fail(Errc::kInvalidBytecode, "branch depth out of range");
          }
        }
        return;
      }
      case 0x0f:
      case 0x00:
      case 0x01:
      case 0x1a:
      case 0x1b:
        return;
      case 0x3f:
      case 0x40:
        s_.leb_u32();
        return;
      case 0x10: {
        uint32_t idx = s_.leb_u32();
        if (idx >= m_.imports.size() + m_.funcs.size()) {
          fail(Errc::kInvalidBytecode, "call index out of range");
        }
        return;
      }
      case 0x11: {
        uint32_t tidx = s_.leb_u32();
        if (tidx >= m_.types.size()) fail(Errc::kInvalidBytecode, "call type out of range");
        if (s_.u8() != 0) fail(Errc::kInvalidBytecode, "table index must be zero");
        return;
      }
      case 0x20:
      case 0x21:
      case 0x22: {
        uint32_t idx = s_.leb_u32();
        if (idx >= f_.num_locals) fail(Errc::kInvalidBytecode, "local index out of range");
        return;
      }
      case 0x23:
      case 0x24: {
        uint32_t idx = s_.leb_u32();
        if (idx >= m_.globals.size()) fail(Errc::kInvalidBytecode, "global index out of range");
        return;
      }
      case 0x41: s_.leb_s32(); return;
      case 0x42: s_.leb_s64(); return;
      case 0x43: s_.fixed_u32(); return;
      case 0x44: s_.fixed_u64(); return;
      default:
        if (op >= 0x28 && op <= 0x3e) {
          s_.leb_u32();
          s_.leb_u32();
          return;
        }
        if (op >= 0x45 && op <= 0xc4) return;
        fail(Errc::kInvalidBytecode, "unknown opcode in dead code");
    }
  }

  int pops = 0;
  int pushes = 0;
  if (simple_stack_effect(op, &pops, &pushes)) {
    Instr ins{op, 0, 0, 0};
    switch (op) {
      case 0x20:
      case 0x21:
      case 0x22: {
        ins.a = s_.leb_u32();
        if (ins.a >= f_.num_locals) fail(Errc::kInvalidBytecode, "local index out of range");
        break;
      }
      case 0x23:
      case 0x24: {
        ins.a = s_.leb_u32();
        if (ins.a >= m_.globals.size()) fail(Errc::kInvalidBytecode, "global index out of range");
        if (op == 0x24 && !m_.globals[ins.a].mut) {
          fail(Errc::kInvalidBytecode, "assignment to immutable global");
        }
        break;
      }
      case 0x41: ins.b = static_cast<uint64_t>(static_cast<uint32_t>(s_.leb_s32())); break;
      case 0x42: ins.b = static_cast<uint64_t>(s_.leb_s64()); break;
      case 0x43: ins.b = s_.fixed_u32(); break;
      case 0x44: ins.b = s_.fixed_u64(); break;
      default:
        if (op >= 0x28 && op <= 0x3e) {
          s_.leb_u32();  // alignment hint, ignored
          ins.b = s_.leb_u32();
          if (!m_.has_memory) fail(Errc::kInvalidBytecode, "memory op without memory");
        }
        if (op == 0x3f || op == 0x40) {
          if (s_.leb_u32() != 0) fail(Errc::kInvalidBytecode, "memory index must be zero");
          if (!m_.has_memory) fail(Errc::kInvalidBytecode, "memory op without memory");
        }
        break;
    }
    adjust_height(pops, pushes);
    f_.code.push_back(ins);
    return;
  }

  switch (op) {
    case 0x00:  // unreachable
      emit(0x00);
      unreachable_ = true;
      return;
    case 0x01:  // nop
      return;
    case 0x02: {  // block
      uint16_t ar = block_arity(s_.leb_s33());
      blocks_.push_back(Block{BlockKind::kBlock, ar, h_});
      return;
    }
    case 0x03: {  // loop
      uint16_t ar = block_arity(s_.leb_s33());
      Block b{BlockKind::kLoop, ar, h_};
      b.loop_start = here();
      blocks_.push_back(std::move(b));
      return;
    }
    case 0x04: {  // if
      uint16_t ar = block_arity(s_.leb_s33());
      adjust_height(1, 0);
      Block b{BlockKind::kIf, ar, h_};
      b.has_if_fixup = true;
      b.if_fixup = emit(kOpJumpIfZero);
      blocks_.push_back(std::move(b));
      return;
    }
    case 0x05:
      live_else();
      return;
    case 0x0b:
      live_end();
      return;
    case 0x0c: {  // br
      uint32_t depth = s_.leb_u32();
      Block& blk = target(depth);
      uint16_t arity;
      uint32_t trunc;
      branch_params(blk, &arity, &trunc);
      uint32_t idx = emit(0x0c, arity, 0, trunc);
      register_branch_target(blk, idx, false, 0);
      unreachable_ = true;
      return;
    }
    case 0x0d: {  // br_if
      uint32_t depth = s_.leb_u32();
      adjust_height(1, 0);
      Block& blk = target(depth);
      uint16_t arity;
      uint32_t trunc;
      branch_params(blk, &arity, &trunc);
      uint32_t idx = emit(0x0d, arity, 0, trunc);
      register_branch_target(blk, idx, false, 0);
      return;
    }
    case 0x0e: {  // br_table
      uint32_t count = s_.leb_u32();
      if (count > 65536) fail(Errc::kInvalidBytecode, "branch table too large");
      adjust_height(1, 0);
      uint32_t first_case = static_cast<uint32_t>(f_.brtable.size());
      int common_arity = -1;
      for (uint32_t i = 0; i <= count; ++i) {
        uint32_t depth = s_.leb_u32();
        Block& blk = target(depth);
        uint16_t arity;
        uint32_t trunc;
        branch_params(blk, &arity, &trunc);
        if (common_arity < 0) common_arity = arity;
        if (common_arity != arity) {
          fail(Errc::kInvalidBytecode, "branch table arity mismatch");
        }
        f_.brtable.push_back(BrCase{0, trunc, arity});
        register_branch_target(blk, 0, true, first_case + i);
      }
      emit(0x0e, static_cast<uint16_t>(count), first_case);
      unreachable_ = true;
      return;
    }
    case 0x0f: {  // return
      uint16_t arity = static_cast<uint16_t>(m_.types[f_.type_idx].results.size());
      if (h_ < arity) fail(Errc::kInvalidBytecode, "return lacks operands");
      emit(kOpReturn, arity);
      unreachable_ = true;
      return;
    }
    case 0x10: {  // call
      uint32_t idx = s_.leb_u32();
      if (idx >= m_.imports.size() + m_.funcs.size()) {
        fail(Errc::kInvalidBytecode, "call index out of range");
      }
      const FuncType& t = m_.type_of(idx);
      adjust_height(static_cast<int>(t.params.size()), static_cast<int>(t.results.size()));
      if (idx < m_.imports.size()) {
        emit(kOpCallHost, static_cast<uint16_t>(t.params.size()), idx);
      } else {
        emit(0x10, 0, idx - static_cast<uint32_t>(m_.imports.size()));
      }
      return;
    }
    case 0x11: {  // call_indirect
      uint32_t tidx = s_.leb_u32();
      if (tidx >= m_.types.size()) fail(Errc::kInvalidBytecode, "call type out of range");
      if (s_.u8() != 0) fail(Errc::kInvalidBytecode, "table index must be zero");
      const FuncType& t = m_.types[tidx];
      adjust_height(static_cast<int>(t.params.size()) + 1,
                    static_cast<int>(t.results.size()));
      emit(0x11, static_cast<uint16_t>(t.params.size()), tidx);
      return;
    }
    default:
      fail(Errc::kInvalidBytecode, "unknown opcode");
  }
}

inline void FunctionCompiler::live_else() {
  if (blocks_.empty() || blocks_.back().kind != BlockKind::kIf || blocks_.back().has_else) {
    fail(Errc::kInvalidBytecode, "else outside if");
  }
  Block& b = blocks_.back();
  if (!unreachable_) {
    if (h_ != b.entry_height + b.arity) {
      fail(Errc::kInvalidBytecode, "then branch height mismatch");
    }
    uint32_t j = emit(kOpJump);
    b.fixups.push_back(j);
  }
  f_.code[b.if_fixup].a = here();
  b.has_if_fixup = false;
  b.has_else = true;
  h_ = b.entry_height;
  unreachable_ = false;
}

inline void FunctionCompiler::live_end() {
  if (blocks_.empty()) fail(Errc::kInvalidBytecode, "unbalanced end");
  Block b = std::move(blocks_.back());
  blocks_.pop_back();
  if (!unreachable_ && h_ != b.entry_height + b.arity) {
    fail(Errc::kInvalidBytecode, "block height mismatch");
  }
  if (b.kind == BlockKind::kIf && !b.has_else && b.arity != 0) {
    fail(Errc::kInvalidBytecode, "if with result requires else");
  }
  if (b.kind == BlockKind::kFunc) {
    for (uint32_t idx : b.fixups) f_.code[idx].a = here();
    for (uint32_t ci : b.case_fixups) f_.brtable[ci].target = here();
    emit(kOpReturn, b.arity);
    h_ = b.entry_height + b.arity;
    unreachable_ = false;
    return;
  }
  for (uint32_t idx : b.fixups) f_.code[idx].a = here();
  for (uint32_t ci : b.case_fixups) f_.brtable[ci].target = here();
  if (b.has_if_fixup) f_.code[b.if_fixup].a = here();
  h_ = b.entry_height + b.arity;
  unreachable_ = false;
}

}  // namespace detail

inline Module decode_module(std::span<const uint8_t> bytes, const DecodeLimits& limits) {
  detail::ModuleDecoder dec(bytes, limits);
  return dec.run();
}

// ---------------------------------------------------------------------------
// Interpreter
// ---------------------------------------------------------------------------

namespace detail {

template <typename F>
inline F wasm_fmin(F a, F b) {
  if (std::isnan(a) || std::isnan(b)) return std::numeric_limits<F>::quiet_NaN();
  if (a == b) return std::signbit(a) ? a : b;  // min(-0, +0) = -0
  return a < b ? a : b;
}

template <typename F>
inline F wasm_fmax(F a, F b) {
  if (std::isnan(a) || std::isnan(b)) return std::numeric_limits<F>::quiet_NaN();
  if (a == b) return std::signbit(a) ? b : a;
  return a > b ? a : b;
}

template <typename To, typename From>
inline To trunc_checked(From v) {
  if (std::isnan(v)) fail(Errc::kTrap, "invalid float-to-int conversion");
  constexpr bool is_signed = std::numeric_limits<To>::is_signed;
  // Bounds chosen so that every in-range float truncates to a representable
  // integer; the upper bound is exactly representable in both float widths.
  double lo = is_signed ? -std::ldexp(1.0, std::numeric_limits<To>::digits) : -1.0;
  double hi = std::ldexp(1.0, is_signed ? std::numeric_limits<To>::digits
                                        : std::numeric_limits<To>::digits);
  double d = static_cast<double>(v);
  if (is_signed) {
    if (!(d >= lo && d < hi)) {
      if (d == lo) return std::numeric_limits<To>::min();
      fail(Errc::kTrap, "float-to-int overflow");
    }
  } else {
    if (!(d > lo && d < hi)) fail(Errc::kTrap, "float-to-int overflow");
  }
  return static_cast<To>(std::trunc(d));
}

}  // namespace detail

inline size_t Instance::push_frame(const FuncBody& f, size_t sp) {
  const FuncType& t = mod_->types[f.type_idx];
  size_t nparams = t.params.size();
  size_t base = sp - nparams;
  uint64_t need = base + f.num_locals + static_cast<uint64_t>(f.max_stack);
  if (need > stack_.size()) fail(Errc::kTrap, "value stack overflow");
  if (frames_.size() >= limits_.max_frames) fail(Errc::kTrap, "call depth exceeded");
  for (size_t i = nparams; i < f.num_locals; ++i) stack_[base + i] = 0;
  frames_.push_back(Frame{&f, 0, static_cast<uint32_t>(base),
                          static_cast<uint32_t>(base + f.num_locals)});
  return base + f.num_locals;
}

inline void Instance::invoke(uint32_t global_fn_idx, const uint64_t* args, size_t nargs,
                             uint64_t* result) {
  if (global_fn_idx < mod_->imports.size()) {
    uint64_t res = 0;
    bound_[global_fn_idx](*this, args, &res);
    if (result) *result = res;
    return;
  }
  const FuncBody& f = mod_->funcs[global_fn_idx - mod_->imports.size()];
  const FuncType& t = mod_->types[f.type_idx];
  if (t.params.size() != nargs) fail(Errc::kTrap, "argument count mismatch");
  size_t floor = frames_.size();
  size_t sp = sp_;
  if (sp + nargs + f.num_locals + f.max_stack > stack_.size()) {
    fail(Errc::kTrap, "value stack overflow");
  }
  for (size_t i = 0; i < nargs; ++i) stack_[sp++] = args[i];
  size_t base = sp - nargs;
  sp_ = push_frame(f, sp);
  run(floor);
  // After the final return, results sit at the old stack top.
  if (!t.results.empty() && result) *result = stack_[base];
  sp_ = base;
}

inline void Instance::run(size_t frame_floor) {
  Frame* fr = &frames_.back();
  const Instr* code = fr->fn->code.data();
  uint32_t ip = fr->ip;
  uint64_t* st = stack_.data();
  size_t sp = sp_;

  auto as_f32 = [](uint64_t v) { return std::bit_cast<float>(static_cast<uint32_t>(v)); };
  auto as_f64 = [](uint64_t v) { return std::bit_cast<double>(v); };
  auto from_f32 = [](float f) {
    return static_cast<uint64_t>(std::bit_cast<uint32_t>(f));
  };
  auto from_f64 = [](double f) { return std::bit_cast<uint64_t>(f); };

  while (true) {
    if (__builtin_expect(--fuel_ < 0, 0)) {
      fuel_ = 0;
      fail(Errc::kFuelExhausted, "computation budget exhausted");
    }
    if (__builtin_expect((++icount_ & 0x3fffff) == 0, 0)) check_deadline();
    const Instr& I = code[ip++];
    switch (I.op) {
      case 0x00:
        trap("unreachable executed");
      // --- control -----------------------------------------------------
      case kOpJump:
        ip = I.a;
        break;
      case kOpJumpIfZero: {
        uint64_t c = st[--sp];
        if (static_cast<uint32_t>(c) == 0) ip = I.a;
        break;
      }
      case 0x0c: {  // br
        size_t dst = fr->opnd_base + I.b;
        if (I.x) st[dst] = st[sp - 1];
        sp = dst + I.x;
        ip = I.a;
        break;
      }
      case 0x0d: {  // br_if
        uint64_t c = st[--sp];
        if (static_cast<uint32_t>(c) != 0) {
          size_t dst = fr->opnd_base + I.b;
          if (I.x) st[dst] = st[sp - 1];
          sp = dst + I.x;
          ip = I.a;
        }
        break;
      }
      case 0x0e: {  // br_table
        uint32_t idx = static_cast<uint32_t>(st[--sp]);
        const BrCase& c =
            fr->fn->brtable[I.a + (idx < I.x ? idx : I.x)];
        size_t dst = fr->opnd_base + c.trunc;
        if (c.arity) st[dst] = st[sp - 1];
        sp = dst + c.arity;
        ip = c.target;
        break;
      }
      case kOpReturn: {
        size_t base = fr->base;
        if (I.x) st[base] = st[sp - 1];
        sp = base + I.x;
        frames_.pop_back();
        if (frames_.size() == frame_floor) {
          sp_ = sp;
          return;
        }
        fr = &frames_.back();
        code = fr->fn->code.data();
        ip = fr->ip;
        break;
      }
      case 0x10: {  // call defined
        fr->ip = ip;
        sp_ = sp;
        sp = push_frame(mod_->funcs[I.a], sp);
        fr = &frames_.back();
        code = fr->fn->code.data();
        ip = 0;
        break;
      }
      case kOpCallHost: {
        size_t n = I.x;
        uint64_t res = 0;
        sp_ = sp;
        bound_[I.a](*this, &st[sp - n], &res);
        check_deadline();
        st = stack_.data();  // host calls cannot resize the stack, but be safe
        sp -= n;
        if (!mod_->types[mod_->imports[I.a].type_idx].results.empty()) st[sp++] = res;
        break;
      }
      case 0x11: {  // call_indirect
        uint32_t elem = static_cast<uint32_t>(st[--sp]);
        if (elem >= table_.size()) trap("indirect call out of table bounds");
        uint32_t gidx = table_[elem];
        if (gidx == UINT32_MAX) trap("uninitialized table element");
        if (!(mod_->type_of(gidx) == mod_->types[I.a])) {
          trap("indirect call type mismatch");
        }
        if (gidx < mod_->imports.size()) {
          size_t n = mod_->types[mod_->imports[gidx].type_idx].params.size();
          uint64_t res = 0;
          sp_ = sp;
          bound_[gidx](*this, &st[sp - n], &res);
          check_deadline();
          sp -= n;
          if (!mod_->types[mod_->imports[gidx].type_idx].results.empty()) st[sp++] = res;
        } else {
          fr->ip = ip;
          sp_ = sp;
          sp = push_frame(mod_->funcs[gidx - mod_->imports.size()], sp);
          fr = &frames_.back();
          code = fr->fn->code.data();
          ip = 0;
        }
        break;
      }
      // --- parametric / variable ----------------------------------------
      case 0x1a:
        --sp;
        break;
      case 0x1b: {  // select
        uint64_t c = st[--sp];
        uint64_t b = st[--sp];
        uint64_t a = st[--sp];
        st[sp++] = static_cast<uint32_t>(c) ? a : b;
        break;
      }
      case 0x20:
        st[sp++] = st[fr->base + I.a];
        break;
      case 0x21:
        st[fr->base + I.a] = st[--sp];
        break;
      case 0x22:
        st[fr->base + I.a] = st[sp - 1];
        break;
      case 0x23:
        st[sp++] = globals_[I.a];
        break;
      case 0x24:
        globals_[I.a] = st[--sp];
        break;
      // --- memory --------------------------------------------------------
      case 0x28:
        st[sp - 1] = mem_load<uint32_t>(st[sp - 1], I.b);
        break;
      case 0x29:
        st[sp - 1] = mem_load<uint64_t>(st[sp - 1], I.b);
        break;
      case 0x2a:
        st[sp - 1] = mem_load<uint32_t>(st[sp - 1], I.b);
        break;
      case 0x2b:
        st[sp - 1] = mem_load<uint64_t>(st[sp - 1], I.b);
        break;
      case 0x2c:
        st[sp - 1] = static_cast<uint64_t>(static_cast<uint32_t>(
            static_cast<int32_t>(static_cast<int8_t>(mem_load<uint8_t>(st[sp - 1], I.b)))));
        break;
      case 0x2d:
        st[sp - 1] = mem_load<uint8_t>(st[sp - 1], I.b);
        break;
      case 0x2e:
        st[sp - 1] = static_cast<uint64_t>(static_cast<uint32_t>(
            static_cast<int32_t>(static_cast<int16_t>(mem_load<uint16_t>(st[sp - 1], I.b)))));
        break;
      case 0x2f:
        st[sp - 1] = mem_load<uint16_t>(st[sp - 1], I.b);
        break;
      case 0x30:
        st[sp - 1] = static_cast<uint64_t>(
            static_cast<int64_t>(static_cast<int8_t>(mem_load<uint8_t>(st[sp - 1], I.b))));
        break;
      case 0x31:
        st[sp - 1] = mem_load<uint8_t>(st[sp - 1], I.b);
        break;
      case 0x32:
        st[sp - 1] = static_cast<uint64_t>(
            static_cast<int64_t>(static_cast<int16_t>(mem_load<uint16_t>(st[sp - 1], I.b))));
        break;
      case 0x33:
        st[sp - 1] = mem_load<uint16_t>(st[sp - 1], I.b);
        break;
      case 0x34:
        st[sp - 1] = static_cast<uint64_t>(
            static_cast<int64_t>(static_cast<int32_t>(mem_load<uint32_t>(st[sp - 1], I.b))));
        break;
      case 0x35:
        st[sp - 1] = mem_load<uint32_t>(st[sp - 1], I.b);
        break;
      case 0x36: {
        uint64_t v = st[--sp];
        mem_store<uint32_t>(st[--sp], I.b, static_cast<uint32_t>(v));
        break;
      }
      case 0x37: {
        uint64_t v = st[--sp];
        mem_store<uint64_t>(st[--sp], I.b, v);
        break;
      }
      case 0x38: {
        uint64_t v = st[--sp];
        mem_store<uint32_t>(st[--sp], I.b, static_cast<uint32_t>(v));
        break;
      }
      case 0x39: {
        uint64_t v = st[--sp];
        mem_store<uint64_t>(st[--sp], I.b, v);
        break;
      }
      case 0x3a: {
        uint64_t v = st[--sp];
        mem_store<uint8_t>(st[--sp], I.b, static_cast<uint8_t>(v));
        break;
      }
      case 0x3b: {
        uint64_t v = st[--sp];
        mem_store<uint16_t>(st[--sp], I.b, static_cast<uint16_t>(v));
        break;
      }
      case 0x3c: {
        uint64_t v = st[--sp];
        mem_store<uint8_t>(st[--sp], I.b, static_cast<uint8_t>(v));
        break;
      }
      case 0x3d: {
        uint64_t v = st[--sp];
        mem_store<uint16_t>(st[--sp], I.b, static_cast<uint16_t>(v));
        break;
      }
      case 0x3e: {
        uint64_t v = st[--sp];
        mem_store<uint32_t>(st[--sp], I.b, static_cast<uint32_t>(v));
        break;
      }
      case 0x3f:
        st[sp++] = mem_pages();
        break;
      case 0x40:
        st[sp - 1] = static_cast<uint64_t>(
            static_cast<uint32_t>(grow_memory(static_cast<uint32_t>(st[sp - 1]))));
        break;
      // --- constants -------------------------------------------------------
      case 0x41:
      case 0x42:
      case 0x43:
      case 0x44:
        st[sp++] = I.b;
        break;
      // --- i32 comparisons ---------------------------------------------------
      case 0x45:
        st[sp - 1] = static_cast<uint32_t>(st[sp - 1]) == 0;
        break;
      case 0x46: {
        uint32_t b = static_cast<uint32_t>(st[--sp]);
        st[sp - 1] = static_cast<uint32_t>(st[sp - 1]) == b;
        break;
      }
      case 0x47: {
        uint32_t b = static_cast<uint32_t>(st[--sp]);
        st[sp - 1] = static_cast<uint32_t>(st[sp - 1]) != b;
        break;
      }
      case 0x48: {
        int32_t b = static_cast<int32_t>(st[--sp]);
        st[sp - 1] = static_cast<int32_t>(st[sp - 1]) < b;
        break;
      }
      case 0x49: {
        uint32_t b = static_cast<uint32_t>(st[--sp]);
        st[sp - 1] = static_cast<uint32_t>(st[sp - 1]) < b;
        break;
      }
      case 0x4a: {
        int32_t b = static_cast<int32_t>(st[--sp]);
        st[sp - 1] = static_cast<int32_t>(st[sp - 1]) > b;
        break;
      }
      case 0x4b: {
        uint32_t b = static_cast<uint32_t>(st[--sp]);
        st[sp - 1] = static_cast<uint32_t>(st[sp - 1]) > b;
        break;
      }
      case 0x4c: {
        int32_t b = static_cast<int32_t>(st[--sp]);
        st[sp - 1] = static_cast<int32_t>(st[sp - 1]) <= b;
        break;
      }
      case 0x4d: {
        uint32_t b = static_cast<uint32_t>(st[--sp]);
        st[sp - 1] = static_cast<uint32_t>(st[sp - 1]) <= b;
        break;
      }
      case 0x4e: {
        int32_t b = static_cast<int32_t>(st[--sp]);
        st[sp - 1] = static_cast<int32_t>(st[sp - 1]) >= b;
        break;
      }
      case 0x4f: {
        uint32_t b = static_cast<uint32_t>(st[--sp]);
        st[sp - 1] = static_cast<uint32_t>(st[sp - 1]) >= b;
        break;
      }
      // --- i64 comparisons ---------------------------------------------------
      case 0x50:
        st[sp - 1] = st[sp - 1] == 0;
        break;
      case 0x51: {
        uint64_t b = st[--sp];
        st[sp - 1] = st[sp - 1] == b;
        break;
      }
      case 0x52: {
        uint64_t b = st[--sp];
        st[sp - 1] = st[sp - 1] != b;
        break;
      }
      case 0x53: {
        int64_t b = static_cast<int64_t>(st[--sp]);
        st[sp - 1] = static_cast<int64_t>(st[sp - 1]) < b;
        break;
      }
      case 0x54: {
        uint64_t b = st[--sp];
        st[sp - 1] = st[sp - 1] < b;
        break;
      }
      case 0x55: {
        int64_t b = static_cast<int64_t>(st[--sp]);
        st[sp - 1] = static_cast<int64_t>(st[sp - 1]) > b;
        break;
      }
      case 0x56: {
        uint64_t b = st[--sp];
        st[sp - 1] = st[sp - 1] > b;
        break;
      }
      case 0x57: {
        int64_t b = static_cast<int64_t>(st[--sp]);
        st[sp - 1] = static_cast<int64_t>(st[sp - 1]) <= b;
        break;
      }
      case 0x58: {
        uint64_t b = st[--sp];
        st[sp - 1] = st[sp - 1] <= b;
        break;
      }
      case 0x59: {
        int64_t b = static_cast<int64_t>(st[--sp]);
        st[sp - 1] = static_cast<int64_t>(st[sp - 1]) >= b;
        break;
      }
      case 0x5a: {
        uint64_t b = st[--sp];
        st[sp - 1] = st[sp - 1] >= b;
        break;
      }
      // --- float comparisons --------------------------------------------------
      case 0x5b: {
        float b = as_f32(st[--sp]);
        st[sp - 1] = as_f32(st[sp - 1]) == b;
        break;
      }
      case 0x5c: {
        float b = as_f32(st[--sp]);
        st[sp - 1] = as_f32(st[sp - 1]) != b;
        break;
      }
      case 0x5d: {
        float b = as_f32(st[--sp]);
        st[sp - 1] = as_f32(st[sp - 1]) < b;
        break;
      }
      case 0x5e: {
        float b = as_f32(st[--sp]);
        st[sp - 1] = as_f32(st[sp - 1]) > b;
        break;
      }
      case 0x5f: {
        float b = as_f32(st[--sp]);
        st[sp - 1] = as_f32(st[sp - 1]) <= b;
        break;
      }
      case 0x60: {
        float b = as_f32(st[--sp]);
        st[sp - 1] = as_f32(st[sp - 1]) >= b;
        break;
      }
      case 0x61: {
        double b = as_f64(st[--sp]);
        st[sp - 1] = as_f64(st[sp - 1]) == b;
        break;
      }
      case 0x62: {
        double b = as_f64(st[--sp]);
        st[sp - 1] = as_f64(st[sp - 1]) != b;
        break;
      }
      case 0x63: {
        double b = as_f64(st[--sp]);
        st[sp - 1] = as_f64(st[sp - 1]) < b;
        break;
      }
      case 0x64: {
        double b = as_f64(st[--sp]);
        st[sp - 1] = as_f64(st[sp - 1]) > b;
        break;
      }
      case 0x65: {
        double b = as_f64(st[--sp]);
        st[sp - 1] = as_f64(st[sp - 1]) <= b;
        break;
      }
      case 0x66: {
        double b = as_f64(st[--sp]);
        st[sp - 1] = as_f64(st[sp - 1]) >= b;
        break;
      }
      // --- i32 arithmetic -------------------------------------------------------
      case 0x67:
        st[sp - 1] = static_cast<uint32_t>(
            std::countl_zero(static_cast<uint32_t>(st[sp - 1])));
        break;
      case 0x68:
        st[sp - 1] = static_cast<uint32_t>(
            std::countr_zero(static_cast<uint32_t>(st[sp - 1])));
        break;
      case 0x69:
        st[sp - 1] = static_cast<uint32_t>(std::popcount(static_cast<uint32_t>(st[sp - 1])));
        break;
      case 0x6a: {
        uint32_t b = static_cast<uint32_t>(st[--sp]);
        st[sp - 1] = static_cast<uint32_t>(st[sp - 1]) + b;
        break;
      }
      case 0x6b: {
        uint32_t b = static_cast<uint32_t>(st[--sp]);
        st[sp - 1] = static_cast<uint32_t>(st[sp - 1]) - b;
        break;
      }
      case 0x6c: {
        uint32_t b = static_cast<uint32_t>(st[--sp]);
        st[sp - 1] = static_cast<uint32_t>(st[sp - 1]) * b;
        break;
      }
      case 0x6d: {
        int32_t b = static_cast<int32_t>(st[--sp]);
        int32_t a = static_cast<int32_t>(st[sp - 1]);
        if (b == 0) trap("integer division by zero");
        if (a == INT32_MIN && b == -1) trap("integer overflow");
        st[sp - 1] = static_cast<uint32_t>(a / b);
        break;
      }
      case 0x6e: {
        uint32_t b = static_cast<uint32_t>(st[--sp]);
        if (b == 0) trap("integer division by zero");
        st[sp - 1] = static_cast<uint32_t>(st[sp - 1]) / b;
        break;
      }
      case 0x6f: {
        int32_t b = static_cast<int32_t>(st[--sp]);
        int32_t a = static_cast<int32_t>(st[sp - 1]);
        if (b == 0) trap("integer division by zero");
        st[sp - 1] = static_cast<uint32_t>(
            (a == INT32_MIN && b == -1) ? 0 : a % b);
        break;
      }
      case 0x70: {
        uint32_t b = static_cast<uint32_t>(st[--sp]);
        if (b == 0) trap("integer division by zero");
        st[sp - 1] = static_cast<uint32_t>(st[sp - 1]) % b;
        break;
      }
      case 0x71: {
        uint32_t b = static_cast<uint32_t>(st[--sp]);
        st[sp - 1] = static_cast<uint32_t>(st[sp - 1]) & b;
        break;
      }
      case 0x72: {
        uint32_t b = static_cast<uint32_t>(st[--sp]);
        st[sp - 1] = static_cast<uint32_t>(st[sp - 1]) | b;
        break;
      }
      case 0x73: {
        uint32_t b = static_cast<uint32_t>(st[--sp]);
        st[sp - 1] = static_cast<uint32_t>(st[sp - 1]) ^ b;
        break;
      }
      case 0x74: {
        uint32_t b = static_cast<uint32_t>(st[--sp]);
        st[sp - 1] = static_cast<uint32_t>(st[sp - 1]) << (b & 31);
        break;
      }
      case 0x75: {
        uint32_t b = static_cast<uint32_t>(st[--sp]);
        st[sp - 1] =
            static_cast<uint32_t>(static_cast<int32_t>(st[sp - 1]) >> (b & 31));
        break;
      }
      case 0x76: {
        uint32_t b = static_cast<uint32_t>(st[--sp]);
        st[sp - 1] = static_cast<uint32_t>(st[sp - 1]) >> (b & 31);
        break;
      }
      case 0x77: {
        uint32_t b = static_cast<uint32_t>(st[--sp]);
        st[sp - 1] = std::rotl(static_cast<uint32_t>(st[sp - 1]), static_cast<int>(b & 31));
        break;
      }
      case 0x78: {
        uint32_t b = static_cast<uint32_t>(st[--sp]);
        st[sp - 1] = std::rotr(static_cast<uint32_t>(st[sp - 1]), static_cast<int>(b & 31));
        break;
      }
      // --- i64 arithmetic -------------------------------------------------------
      case 0x79:
        st[sp - 1] = static_cast<uint64_t>(std::countl_zero(st[sp - 1]));
        break;
      case 0x7a:
        st[sp - 1] = static_cast<uint64_t>(std::countr_zero(st[sp - 1]));
        break;
      case 0x7b:
        st[sp - 1] = static_cast<uint64_t>(std::popcount(st[sp - 1]));
        break;
      case 0x7c: {
        uint64_t b = st[--sp];
        st[sp - 1] += b;
        break;
      }
      case 0x7d: {
        uint64_t b = st[--sp];
        st[sp - 1] -= b;
        break;
      }
      case 0x7e: {
        uint64_t b = st[--sp];
        st[sp - 1] *= b;
        break;
      }
      case 0x7f: {
        int64_t b = static_cast<int64_t>(st[--sp]);
        int64_t a = static_cast<int64_t>(st[sp - 1]);
        if (b == 0) trap("integer division by zero");
        if (a == INT64_MIN && b == -1) trap("integer overflow");
        st[sp - 1] = static_cast<uint64_t>(a / b);
        break;
      }
      case 0x80: {
        uint64_t b = st[--sp];
        if (b == 0) trap("integer division by zero");
        st[sp - 1] /= b;
        break;
      }
      case 0x81: {
        int64_t b = static_cast<int64_t>(st[--sp]);
        int64_t a = static_cast<int64_t>(st[sp - 1]);
        if (b == 0) trap("integer division by zero");
        st[sp - 1] = static_cast<uint64_t>((a == INT64_MIN && b == -1) ? 0 : a % b);
        break;
      }
      case 0x82: {
        uint64_t b = st[--sp];
        if (b == 0) trap("integer division by zero");
        st[sp - 1] %= b;
        break;
      }
      case 0x83: {
        uint64_t b = st[--sp];
        st[sp - 1] &= b;
        break;
      }
      case 0x84: {
        uint64_t b = st[--sp];
        st[sp - 1] |= b;
        break;
      }
      case 0x85: {
        uint64_t b = st[--sp];
        st[sp - 1] ^= b;
        break;
      }
      case 0x86: {
        uint64_t b = st[--sp];
        st[sp - 1] <<= (b & 63);
        break;
      }
      case 0x87: {
        uint64_t b = st[--sp];
        st[sp - 1] = static_cast<uint64_t>(static_cast<int64_t>(st[sp - 1]) >> (b & 63));
        break;
      }
      case 0x88: {
        uint64_t b = st[--sp];
        st[sp - 1] >>= (b & 63);
        break;
      }
      case 0x89: {
        uint64_t b = st[--sp];
        st[sp - 1] = std::rotl(st[sp - 1], static_cast<int>(b & 63));
        break;
      }
      case 0x8a: {
        uint64_t b = st[--sp];
        st[sp - 1] = std::rotr(st[sp - 1], static_cast<int>(b & 63));
        break;
      }
      // --- f32 arithmetic -------------------------------------------------------
      case 0x8b:
        st[sp - 1] = from_f32(std::fabs(as_f32(st[sp - 1])));
        break;
      case 0x8c:
        st[sp - 1] = from_f32(-as_f32(st[sp - 1]));
        break;
      case 0x8d:
        st[sp - 1] = from_f32(std::ceil(as_f32(st[sp - 1])));
        break;
      case 0x8e:
        st[sp - 1] = from_f32(std::floor(as_f32(st[sp - 1])));
        break;
      case 0x8f:
        st[sp - 1] = from_f32(std::trunc(as_f32(st[sp - 1])));
        break;
      case 0x90:
        st[sp - 1] = from_f32(std::nearbyint(as_f32(st[sp - 1])));
        break;
      case 0x91:
        st[sp - 1] = from_f32(std::sqrt(as_f32(st[sp - 1])));
        break;
      case 0x92: {
        float b = as_f32(st[--sp]);
        st[sp - 1] = from_f32(as_f32(st[sp - 1]) + b);
        break;
      }
      case 0x93: {
        float b = as_f32(st[--sp]);
        st[sp - 1] = from_f32(as_f32(st[sp - 1]) - b);
        break;
      }
      case 0x94: {
        float b = as_f32(st[--sp]);
        st[sp - 1] = from_f32(as_f32(st[sp - 1]) * b);
        break;
      }
      case 0x95: {
        float b = as_f32(st[--sp]);
        st[sp - 1] = from_f32(as_f32(st[sp - 1]) / b);
        break;
      }
      case 0x96: {
        float b = as_f32(st[--sp]);
        st[sp - 1] = from_f32(detail::wasm_fmin(as_f32(st[sp - 1]), b));
        break;
      }
      case 0x97: {
        float b = as_f32(st[--sp]);
        st[sp - 1] = from_f32(detail::wasm_fmax(as_f32(st[sp - 1]), b));
        break;
      }
      case 0x98: {
        float b = as_f32(st[--sp]);
        st[sp - 1] = from_f32(std::copysign(as_f32(st[sp - 1]), b));
        break;
      }
      // --- f64 arithmetic -------------------------------------------------------
      case 0x99:
        st[sp - 1] = from_f64(std::fabs(as_f64(st[sp - 1])));
        break;
      case 0x9a:
        st[sp - 1] = from_f64(-as_f64(st[sp - 1]));
        break;
      case 0x9b:
        st[sp - 1] = from_f64(std::ceil(as_f64(st[sp - 1])));
        break;
      case 0x9c:
        st[sp - 1] = from_f64(std::floor(as_f64(st[sp - 1])));
        break;
      case 0x9d:
        st[sp - 1] = from_f64(std::trunc(as_f64(st[sp - 1])));
        break;
      case 0x9e:
        st[sp - 1] = from_f64(std::nearbyint(as_f64(st[sp - 1])));
        break;
      case 0x9f:
        st[sp - 1] = from_f64(std::sqrt(as_f64(st[sp - 1])));
        break;
      case 0xa0: {
        double b = as_f64(st[--sp]);
        st[sp - 1] = from_f64(as_f64(st[sp - 1]) + b);
        break;
      }
      case 0xa1: {
        double b = as_f64(st[--sp]);
        st[sp - 1] = from_f64(as_f64(st[sp - 1]) - b);
        break;
      }
      case 0xa2: {
        double b = as_f64(st[--sp]);
        st[sp - 1] = from_f64(as_f64(st[sp - 1]) * b);
        break;
      }
      case 0xa3: {
        double b = as_f64(st[--sp]);
        st[sp - 1] = from_f64(as_f64(st[sp - 1]) / b);
        break;
      }
      case 0xa4: {
        double b = as_f64(st[--sp]);
        st[sp - 1] = from_f64(detail::wasm_fmin(as_f64(st[sp - 1]), b));
        break;
      }
      case 0xa5: {
        double b = as_f64(st[--sp]);
        st[sp - 1] = from_f64(detail::wasm_fmax(as_f64(st[sp - 1]), b));
        break;
      }
      case 0xa6: {
        double b = as_f64(st[--sp]);
        st[sp - 1] = from_f64(std::copysign(as_f64(st[sp - 1]), b));
        break;
      }
      // --- conversions -----------------------------------------------------------
      case 0xa7:
        st[sp - 1] = static_cast<uint32_t>(st[sp - 1]);
        break;
      case 0xa8:
        st[sp - 1] = static_cast<uint64_t>(static_cast<uint32_t>(
            detail::trunc_checked<int32_t>(as_f32(st[sp - 1]))));
        break;
      case 0xa9:
        st[sp - 1] = detail::trunc_checked<uint32_t>(as_f32(st[sp - 1]));
        break;
      case 0xaa:
        st[sp - 1] = static_cast<uint64_t>(static_cast<uint32_t>(
            detail::trunc_checked<int32_t>(as_f64(st[sp - 1]))));
        break;
      case 0xab:
        st[sp - 1] = detail::trunc_checked<uint32_t>(as_f64(st[sp - 1]));
        break;
      case 0xac:
        st[sp - 1] = static_cast<uint64_t>(
            static_cast<int64_t>(static_cast<int32_t>(st[sp - 1])));
        break;
      case 0xad:
        st[sp - 1] = static_cast<uint32_t>(st[sp - 1]);
        break;
      case 0xae:
        st[sp - 1] =
            static_cast<uint64_t>(detail::trunc_checked<int64_t>(as_f32(st[sp - 1])));
        break;
      case 0xaf:
        st[sp - 1] = detail::trunc_checked<uint64_t>(as_f32(st[sp - 1]));
        break;
      case 0xb0:
        st[sp - 1] =
            static_cast<uint64_t>(detail::trunc_checked<int64_t>(as_f64(st[sp - 1])));
        break;
      case 0xb1:
        st[sp - 1] = detail::trunc_checked<uint64_t>(as_f64(st[sp - 1]));
        break;
      case 0xb2:
        st[sp - 1] = from_f32(static_cast<float>(static_cast<int32_t>(st[sp - 1])));
        break;
      case 0xb3:
        st[sp - 1] = from_f32(static_cast<float>(static_cast<uint32_t>(st[sp - 1])));
        break;
      case 0xb4:
        st[sp - 1] = from_f32(static_cast<float>(static_cast<int64_t>(st[sp - 1])));
        break;
      case 0xb5:
        st[sp - 1] = from_f32(static_cast<float>(st[sp - 1]));
        break;
      case 0xb6:
        st[sp - 1] = from_f32(static_cast<float>(as_f64(st[sp - 1])));
        break;
      case 0xb7:
        st[sp - 1] = from_f64(static_cast<double>(static_cast<int32_t>(st[sp - 1])));
        break;
      case 0xb8:
        st[sp - 1] = from_f64(static_cast<double>(static_cast<uint32_t>(st[sp - 1])));
        break;
      case 0xb9:
        st[sp - 1] = from_f64(static_cast<double>(static_cast<int64_t>(st[sp - 1])));
        break;
      case 0xba:
        st[sp - 1] = from_f64(static_cast<double>(st[sp - 1]));
        break;
      case 0xbb:
        st[sp - 1] = from_f64(static_cast<double>(as_f32(st[sp - 1])));
        break;
      case 0xbc:
      case 0xbd:
      case 0xbe:
      case 0xbf:
        break;  // reinterpret: bit patterns already live in the slot
      // --- sign extension ---------------------------------------------------------
      case 0xc0:
        st[sp - 1] = static_cast<uint64_t>(static_cast<uint32_t>(
            static_cast<int32_t>(static_cast<int8_t>(st[sp - 1]))));
        break;
      case 0xc1:
        st[sp - 1] = static_cast<uint64_t>(static_cast<uint32_t>(
            static_cast<int32_t>(static_cast<int16_t>(st[sp - 1]))));
        break;
      case 0xc2:
        st[sp - 1] =
            static_cast<uint64_t>(static_cast<int64_t>(static_cast<int8_t>(st[sp - 1])));
        break;
      case 0xc3:
        st[sp - 1] =
            static_cast<uint64_t>(static_cast<int64_t>(static_cast<int16_t>(st[sp - 1])));
        break;
      case 0xc4:
        st[sp - 1] =
            static_cast<uint64_t>(static_cast<int64_t>(static_cast<int32_t>(st[sp - 1])));
        break;
      default:
        trap("unimplemented opcode");
    }
  }
}

}  // namespace trustmee::wasm

#endif  // TRUSTMEE_WASM_IMPL_HPP_
