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

#include "trustmee/wasm.hpp"

#include <gtest/gtest.h>

#include <random>

#include "trustmee/bytes.hpp"
#include "trustmee/cbor.hpp"

namespace trustmee {
namespace {

using wasm::FuncType;
using wasm::HostImport;
using wasm::Instance;
using wasm::InstanceLimits;
using wasm::kTypeI32;
using wasm::kTypeI64;

Bytes component_bytes(const std::string& name) {
  return read_file(std::string(TRUSTMEE_COMPONENTS_DIR) + "/" + name + ".wasm");
}

// --- tiny module builder for handwritten cases -------------------------------

void leb(Bytes& b, uint64_t v) {
  do {
    uint8_t byte = v & 0x7f;
    v >>= 7;
    if (v) byte |= 0x80;
    b.push_back(byte);
  } while (v);
}

void sleb(Bytes& b, int64_t v) {
  bool more = true;
  while (more) {
    uint8_t byte = v & 0x7f;
    v >>= 7;
    if ((v == 0 && !(byte & 0x40)) || (v == -1 && (byte & 0x40))) more = false;
    if (more) byte |= 0x80;
    b.push_back(byte);
  }
}

void append(Bytes& b, const Bytes& other) { b.insert(b.end(), other.begin(), other.end()); }

Bytes section(uint8_t id, const Bytes& payload) {
  Bytes out{id};
  leb(out, payload.size());
  append(out, payload);
  return out;
}

Bytes name_bytes(std::string_view s) {
  Bytes out;
  leb(out, s.size());
  out.insert(out.end(), s.begin(), s.end());
  return out;
}

struct ModuleBuilder {
  Bytes types, funcs, exports, code, tables, elems, globals, memory;
  uint32_t ntypes = 0, nfuncs = 0, nexports = 0, ncode = 0, nglobals = 0, nelems = 0;

  void add_type(const std::vector<uint8_t>& params, const std::vector<uint8_t>& results) {
    types.push_back(0x60);
    leb(types, params.size());
    for (uint8_t p : params) types.push_back(p);
    leb(types, results.size());
    for (uint8_t r : results) types.push_back(r);
    ++ntypes;
  }
  void add_func(uint32_t type_idx, const Bytes& body_code) {
    leb(funcs, type_idx);
    ++nfuncs;
    Bytes body;
    leb(body, 0);  // no extra locals
    append(body, body_code);
    Bytes entry;
    leb(entry, body.size());
    append(entry, body);
    append(code, entry);
    ++ncode;
  }
  void add_func_with_locals(uint32_t type_idx, uint32_t nlocals, const Bytes& body_code) {
    leb(funcs, type_idx);
    ++nfuncs;
    Bytes body;
    leb(body, 1);
    leb(body, nlocals);
    body.push_back(kTypeI32);
    append(body, body_code);
    Bytes entry;
    leb(entry, body.size());
    append(entry, body);
    append(code, entry);
    ++ncode;
  }
  void export_func(std::string_view name, uint32_t idx) {
    append(exports, name_bytes(name));
    exports.push_back(0);
    leb(exports, idx);
    ++nexports;
  }

  Bytes build() {
    Bytes out = from_hex("0061736d01000000");
    if (ntypes) {
      Bytes p;
      leb(p, ntypes);
      append(p, types);
      append(out, section(1, p));
    }
    if (nfuncs) {
      Bytes p;
      leb(p, nfuncs);
      append(p, funcs);
      append(out, section(3, p));
    }
    if (!tables.empty()) append(out, section(4, tables));
    if (!memory.empty()) append(out, section(5, memory));
    if (nglobals) {
      Bytes p;
      leb(p, nglobals);
      append(p, globals);
      append(out, section(6, p));
    }
    if (nexports) {
      Bytes p;
      leb(p, nexports);
      append(p, exports);
      append(out, section(7, p));
    }
    if (nelems) {
      Bytes p;
      leb(p, nelems);
      append(p, elems);
      append(out, section(9, p));
    }
    if (ncode) {
      Bytes p;
      leb(p, ncode);
      append(p, code);
      append(out, section(10, p));
    }
    return out;
  }
};

Instance make_instance(const Bytes& bytes, InstanceLimits limits = {},
                       std::vector<HostImport> imports = {}) {
  auto mod = std::make_shared<wasm::Module>(wasm::decode_module(bytes));
  return Instance(std::move(mod), std::move(imports), limits);
}

std::vector<HostImport> stub_imports() {
  std::vector<HostImport> out;
  auto add = [&out](std::string name, std::vector<uint8_t> params, std::vector<uint8_t> results,
                    wasm::HostFn fn) {
    out.push_back(HostImport{std::move(name), FuncType{std::move(params), std::move(results)},
                             std::move(fn)});
  };
  add("http_get", {kTypeI32, kTypeI32, kTypeI32, kTypeI32}, {kTypeI32},
      [](Instance&, const uint64_t*, uint64_t* r) { *r = static_cast<uint64_t>(-1); });
  add("cache_read", {kTypeI32, kTypeI32, kTypeI32, kTypeI32}, {kTypeI32},
      [](Instance&, const uint64_t*, uint64_t* r) { *r = static_cast<uint64_t>(-4); });
  add("cache_write", {kTypeI32, kTypeI32, kTypeI32, kTypeI32}, {kTypeI32},
      [](Instance&, const uint64_t*, uint64_t* r) { *r = 0; });
  add("verify_p256", {kTypeI32, kTypeI32, kTypeI32, kTypeI32}, {kTypeI32},
      [](Instance&, const uint64_t*, uint64_t* r) { *r = 0; });
  add("now", {}, {kTypeI64}, [](Instance&, const uint64_t*, uint64_t* r) { *r = 0; });
  add("log", {kTypeI32, kTypeI32}, {}, [](Instance&, const uint64_t*, uint64_t*) {});
  return out;
}

TEST(WasmTest, AddFunction) {
  ModuleBuilder mb;
  mb.add_type({kTypeI32, kTypeI32}, {kTypeI32});
  Bytes body = from_hex("2000" "2001" "6a" "0b");  // local.get 0; local.get 1; i32.add; end
  mb.add_func(0, body);
  mb.export_func("add", 0);
  Instance inst = make_instance(mb.build());
  uint64_t args[] = {7, 35};
  EXPECT_EQ(inst.call("add", args), 42u);
  uint64_t wrap[] = {0xffffffffu, 1};
  EXPECT_EQ(inst.call("add", wrap), 0u);  // i32 wraparound stays in 32 bits
}

TEST(WasmTest, DivisionTraps) {
  ModuleBuilder mb;
  mb.add_type({kTypeI32, kTypeI32}, {kTypeI32});
  mb.add_func(0, from_hex("2000" "2001" "6d" "0b"));  // i32.div_s
  mb.export_func("div", 0);
  Instance inst = make_instance(mb.build());
  uint64_t ok[] = {12, 4};
  EXPECT_EQ(inst.call("div", ok), 3u);
  uint64_t zero[] = {1, 0};
  EXPECT_THROW({ (void)inst.call("div", std::span<const uint64_t>(zero, 2)); }, Error);
  uint64_t ovf[] = {0x80000000u, 0xffffffffu};
  EXPECT_THROW({ (void)inst.call("div", std::span<const uint64_t>(ovf, 2)); }, Error);
}

TEST(WasmTest, RecursionAndIfElse) {
  ModuleBuilder mb;
  mb.add_type({kTypeI32}, {kTypeI32});
  // fac(n): if (n < 2) return 1; else return n * fac(n-1)
  Bytes body = from_hex("2000" "4102" "48" "047f" "4101" "05" "2000" "2000" "4101" "6b" "1000" "6c" "0b" "0b");
  mb.add_func(0, body);
  mb.export_func("fac", 0);
  Instance inst = make_instance(mb.build());
  uint64_t five[] = {5};
  EXPECT_EQ(inst.call("fac", five), 120u);
  uint64_t zero[] = {0};
  EXPECT_EQ(inst.call("fac", zero), 1u);
  uint64_t ten[] = {10};
  EXPECT_EQ(inst.call("fac", ten), 3628800u);
}

TEST(WasmTest, LoopWithBranch) {
  // sum(n) = 0+1+..+(n-1) via loop / br_if
  ModuleBuilder mb;
  mb.add_type({kTypeI32}, {kTypeI32});
  // locals: 1 extra (acc at idx 1), i reused from param? use param as counter.
  // acc=0; loop { if n==0 break; n--; acc+=n; br loop }
  Bytes body = from_hex(
      "0240"              // block
      "0340"              // loop
      "2000" "45" "0d01"  // local.get 0; i32.eqz; br_if 1 (exit block)
      "2000" "4101" "6b" "2100"  // n = n - 1
      "2001" "2000" "6a" "2101"  // acc += n
      "0c00"              // br 0 (continue loop)
      "0b" "0b"
      "2001" "0b");       // local.get acc; end
  mb.add_func_with_locals(0, 1, body);
  mb.export_func("sum", 0);
  Instance inst = make_instance(mb.build());
  uint64_t n[] = {100};
  EXPECT_EQ(inst.call("sum", n), 4950u);
}

TEST(WasmTest, BrTableSelectsCase) {
  ModuleBuilder mb;
  mb.add_type({kTypeI32}, {kTypeI32});
  // switch(n): case0 -> 10, case1 -> 20, default -> 30; br_table [C,B] A
  Bytes body = from_hex(
      "0240" "0240" "0240" "2000" "0e02000102" "0b" "410a0f" "0b" "41140f" "0b"
      "411e0f" "0b");
  mb.add_func(0, body);
  mb.export_func("pick", 0);
  Instance inst = make_instance(mb.build());
  uint64_t v0[] = {0}, v1[] = {1}, v9[] = {9};
  EXPECT_EQ(inst.call("pick", v0), 10u);
  EXPECT_EQ(inst.call("pick", v1), 20u);
  EXPECT_EQ(inst.call("pick", v9), 30u);
}

TEST(WasmTest, BlockResultCarriedByBranch) {
  ModuleBuilder mb;
  mb.add_type({kTypeI32}, {kTypeI32});
  // block (result i32): push 5; br 0 carrying it; unreachable; end → 5 + n
  Bytes body = from_hex("027f" "4105" "0c00" "0b" "2000" "6a" "0b");
  mb.add_func(0, body);
  mb.export_func("carry", 0);
  Instance inst = make_instance(mb.build());
  uint64_t n[] = {3};
  EXPECT_EQ(inst.call("carry", n), 8u);
}

TEST(WasmTest, CallIndirectWithTypeCheck) {
  ModuleBuilder mb;
  mb.add_type({kTypeI32, kTypeI32}, {kTypeI32});  // type 0
  mb.add_type({}, {kTypeI32});                    // type 1
  mb.add_func(0, from_hex("2000" "2001" "6a" "0b"));  // add (fn 0)
  mb.add_func(1, from_hex("412a" "0b"));              // fortytwo (fn 1)
  // caller(a,b) = call_indirect type0 via table[a?]  — use table slot from arg 0
  mb.add_func(0, from_hex("2000" "2001" "4100" "110000" "0b"));
  // fix: args then table index constant 0
  mb.export_func("call0", 2);
  // table with 2 entries [fn0, fn1]
  mb.tables = from_hex("01" "70" "00" "02");
  Bytes elems;
  leb(elems, 0);  // flags
  append(elems, from_hex("41000b"));  // offset 0
  leb(elems, 2);
  leb(elems, 0);
  leb(elems, 1);
  mb.elems = elems;
  mb.nelems = 1;
  Instance inst = make_instance(mb.build());
  uint64_t args[] = {30, 12};
  EXPECT_EQ(inst.call("call0", args), 42u);
}

TEST(WasmTest, CallIndirectTypeMismatchTraps) {
  ModuleBuilder mb;
  mb.add_type({kTypeI32, kTypeI32}, {kTypeI32});
  mb.add_type({}, {kTypeI32});
  mb.add_func(1, from_hex("412a" "0b"));  // fn 0 has type 1
  // caller invokes table[0] expecting type 0 → mismatch
  mb.add_func(0, from_hex("2000" "2001" "4100" "110000" "0b"));
  mb.export_func("bad", 1);
  mb.tables = from_hex("01" "70" "00" "01");
  Bytes elems;
  leb(elems, 0);
  append(elems, from_hex("41000b"));
  leb(elems, 1);
  leb(elems, 0);
  mb.elems = elems;
  mb.nelems = 1;
  Instance inst = make_instance(mb.build());
  uint64_t args[] = {1, 2};
  try {
    (void)inst.call("bad", args);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), Errc::kTrap);
  }
}

TEST(WasmTest, MemoryLoadStoreAndGrow) {
  ModuleBuilder mb;
  mb.add_type({kTypeI32, kTypeI32}, {kTypeI32});
  mb.add_type({}, {kTypeI32});
  mb.memory = from_hex("01" "00" "01");  // 1 memory, min 1 page, no max
  // poke(addr, v) -> load back
  mb.add_func(0, from_hex("2000" "2001" "360200" "2000" "280200" "0b"));
  mb.export_func("poke", 0);
  mb.add_func(1, from_hex("4101" "4000" "0b"));  // grow by 1 → old pages
  mb.export_func("grow", 1);
  Instance inst = make_instance(mb.build());
  uint64_t args[] = {256, 0xdeadbeefu};
  EXPECT_EQ(inst.call("poke", args), 0xdeadbeefu);
  // OOB access traps
  uint64_t oob[] = {65536, 1};
  EXPECT_THROW({ (void)inst.call("poke", std::span<const uint64_t>(oob, 2)); }, Error);
  EXPECT_EQ(inst.call("grow", {}), 1u);
  // After grow the previous OOB address is valid.
  EXPECT_EQ(inst.call("poke", oob), 1u);
}

TEST(WasmTest, MemoryGrowRespectsPolicyCap) {
  ModuleBuilder mb;
  mb.add_type({}, {kTypeI32});
  mb.memory = from_hex("01" "00" "01");
  mb.add_func(0, from_hex("4110" "4000" "0b"));  // grow by 16
  mb.export_func("grow16", 0);
  InstanceLimits limits;
  limits.max_memory_bytes = 4 * 65536;  // 4 pages
  Instance inst = make_instance(mb.build(), limits);
  EXPECT_EQ(inst.call("grow16", {}), 0xffffffffu);  // -1: refused
}

TEST(WasmTest, InitialMemoryBeyondCapIsRejected) {
  ModuleBuilder mb;
  mb.add_type({}, {kTypeI32});
  mb.memory = from_hex("01" "00" "10");  // 16 pages initial
  mb.add_func(0, from_hex("4100" "0b"));
  mb.export_func("f", 0);
  InstanceLimits limits;
  limits.max_memory_bytes = 65536;
  try {
    make_instance(mb.build(), limits);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), Errc::kMemoryExceeded);
  }
}

TEST(WasmTest, GlobalsReadWrite) {
  ModuleBuilder mb;
  mb.add_type({kTypeI32}, {kTypeI32});
  mb.globals = from_hex("7f01" "41000b");  // mutable i32, init 0
  mb.nglobals = 1;
  mb.add_func(0, from_hex("2300" "2000" "6a" "2400" "2300" "0b"));  // g += n; return g
  mb.export_func("bump", 0);
  Instance inst = make_instance(mb.build());
  uint64_t five[] = {5};
  EXPECT_EQ(inst.call("bump", five), 5u);
  EXPECT_EQ(inst.call("bump", five), 10u);
}

TEST(WasmTest, FuelExhaustionIsDeterministic) {
  Bytes wasm_bytes = component_bytes("calib_loop");
  auto mod = std::make_shared<wasm::Module>(wasm::decode_module(wasm_bytes));

  InstanceLimits limits;
  limits.fuel = 1'000'000;
  uint64_t consumed1, consumed2;
  {
    Instance inst(mod, stub_imports(), limits);
    uint64_t args[] = {10000};
    (void)inst.call("x_spin", args);
    consumed1 = inst.fuel_consumed();
  }
  {
    Instance inst(mod, stub_imports(), limits);
    uint64_t args[] = {10000};
    (void)inst.call("x_spin", args);
    consumed2 = inst.fuel_consumed();
  }
  EXPECT_EQ(consumed1, consumed2);

  // Fuel grows linearly with iterations (within small constant overhead).
  Instance a(mod, stub_imports(), limits);
  uint64_t n1[] = {1000};
  (void)a.call("x_spin", n1);
  uint64_t f1 = a.fuel_consumed();
  Instance b(mod, stub_imports(), limits);
  uint64_t n2[] = {2000};
  (void)b.call("x_spin", n2);
  uint64_t f2 = b.fuel_consumed();
  EXPECT_NEAR(static_cast<double>(f2) / static_cast<double>(f1), 2.0, 0.1);

  // Tiny budget aborts with the typed error.
  InstanceLimits tiny;
  tiny.fuel = 100;
  Instance c(mod, stub_imports(), tiny);
  uint64_t big[] = {1000000};
  try {
    (void)c.call("x_spin", big);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), Errc::kFuelExhausted);
  }
}

TEST(WasmTest, CompiledComponentEvaluateRoundTrip) {
  Bytes wasm_bytes = component_bytes("calib_loop");
  auto mod = std::make_shared<wasm::Module>(wasm::decode_module(wasm_bytes));
  Instance inst(mod, stub_imports(), {});

  cbor::Value input = cbor::Value::map();
  input.put("ev", cbor::Value::bytes(Bytes{1, 2, 3}));
  input.put("end", cbor::Value::array());
  input.put("erd", cbor::Value::bytes(Bytes{}));
  Bytes in = cbor::encode(input);

  uint64_t alloc_args[] = {in.size()};
  uint64_t off = inst.call("tm_alloc", alloc_args);
  ASSERT_NE(off, 0u);
  inst.mem_write(off, in);
  uint64_t eval_args[] = {off, in.size()};
  uint64_t packed = inst.call("tm_evaluate", eval_args);
  uint32_t out_off = static_cast<uint32_t>(packed >> 32);
  uint32_t out_len = static_cast<uint32_t>(packed);
  ASSERT_GT(out_len, 0u);
  cbor::Value out = cbor::decode(inst.mem_read(out_off, out_len));
  ASSERT_TRUE(out.get("ok")->as_bool());
  EXPECT_EQ(out.get("claims")->get("iters")->as_uns(), in.size());
}

TEST(WasmTest, InfiniteLoopFixtureExhaustsFuel) {
  Bytes wasm_bytes = component_bytes("infinite_loop");
  auto mod = std::make_shared<wasm::Module>(wasm::decode_module(wasm_bytes));
  InstanceLimits limits;
  limits.fuel = 5'000'000;
  Instance inst(mod, stub_imports(), limits);
  uint64_t args[] = {0, 0};
  try {
    (void)inst.call("tm_evaluate", args);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), Errc::kFuelExhausted);
  }
}

TEST(WasmTest, MissingExportAndUnknownImport) {
  ModuleBuilder mb;
  mb.add_type({}, {kTypeI32});
  mb.add_func(0, from_hex("4100" "0b"));
  mb.export_func("f", 0);
  Instance inst = make_instance(mb.build());
  EXPECT_THROW({ (void)inst.call("nope", {}); }, Error);

  // Module importing something the host does not provide.
  Bytes mod = from_hex("0061736d01000000");
  Bytes types = from_hex("01" "60" "00" "00");
  append(mod, section(1, types));
  Bytes imports;
  leb(imports, 1);
  append(imports, name_bytes("trustmee-host"));
  append(imports, name_bytes("bogus"));
  imports.push_back(0);
  leb(imports, 0);
  append(mod, section(2, imports));
  try {
    make_instance(mod, {}, stub_imports());
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), Errc::kInvalidBytecode);
  }
}

TEST(WasmTest, DecoderRejectsGarbage) {
  EXPECT_THROW(wasm::decode_module(Bytes{}), Error);
  EXPECT_THROW(wasm::decode_module(from_hex("00112233")), Error);
  EXPECT_THROW(wasm::decode_module(from_hex("0061736d02000000")), Error);
  Bytes good = component_bytes("calib_loop");
  Bytes truncated(good.begin(), good.begin() + static_cast<ptrdiff_t>(good.size() / 2));
  EXPECT_THROW(wasm::decode_module(truncated), Error);
}

TEST(WasmTest, DecoderAndEngineSurviveMutatedModules) {
  Bytes good = component_bytes("calib_loop");
  std::mt19937_64 rng(99);
  int ran = 0;
  for (int i = 0; i < 3000; ++i) {
    Bytes mutated = good;
    size_t flips = 1 + rng() % 8;
    for (size_t f = 0; f < flips; ++f) {
      mutated[rng() % mutated.size()] = static_cast<uint8_t>(rng());
    }
    try {
      auto mod = std::make_shared<wasm::Module>(wasm::decode_module(mutated));
      InstanceLimits limits;
      limits.fuel = 200'000;
      Instance inst(mod, stub_imports(), limits);
      if (inst.has_export("x_spin")) {
        uint64_t args[] = {17};
        (void)inst.call("x_spin", args);
        ++ran;
      }
    } catch (const Error&) {
    }
  }
  EXPECT_GE(ran, 0);
}

}  // namespace
}  // namespace trustmee
