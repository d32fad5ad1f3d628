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

#include "trustmee/sandbox.hpp"

#include <gtest/gtest.h>

#include <atomic>
#include <filesystem>
#include <random>
#include <thread>

namespace trustmee {
namespace {

using identity::ExecutionPolicy;
using sandbox::EvaluateInput;
using sandbox::EvaluateOutput;
using sandbox::Sandbox;
using sandbox::SandboxConfig;

Bytes component_bytes(const std::string& name) {
  return read_file(std::string(TRUSTMEE_COMPONENTS_DIR) + "/" + name + ".wasm");
}

std::filesystem::path fresh_dir(const std::string& tag) {
  auto p = std::filesystem::temp_directory_path() /
           ("trustmee-test-" + tag + "-" + std::to_string(::getpid()) + "-" +
            std::to_string(std::chrono::steady_clock::now().time_since_epoch().count()));
  std::filesystem::create_directories(p);
  return p;
}

struct SandboxFixture {
  std::shared_ptr<metrics::Registry> registry = std::make_shared<metrics::Registry>();
  SandboxConfig config;
  std::unique_ptr<Sandbox> box;

  SandboxFixture() {
    config.scratch_root = fresh_dir("scratch");
    box = std::make_unique<Sandbox>(config, registry);
  }
  ~SandboxFixture() {
    std::error_code ec;
    std::filesystem::remove_all(config.scratch_root, ec);
  }
};

EvaluateInput simple_input(Bytes ev = {1, 2, 3}) {
  EvaluateInput in;
  in.tee_evidence = std::move(ev);
  in.expected_report_data = {9, 9};
  return in;
}

TEST(SandboxTest, CompileAndEvaluateFixture) {
  SandboxFixture fx;
  auto comp = fx.box->compile(component_bytes("calib_loop"));
  sandbox::EvaluateStats stats;
  EvaluateOutput out = fx.box->evaluate(*comp, simple_input(), ExecutionPolicy{}, &stats);
  ASSERT_TRUE(out.succeeded());
  EXPECT_TRUE(out.claims->get("iters") != nullptr);
  EXPECT_GT(stats.fuel_consumed, 0u);
}

TEST(SandboxTest, MissingEvaluateExportRejected) {
  // Strip to an arbitrary non-component module: hand-assemble a module with
  // only tm_alloc. Reuse calib_loop bytes but rename the evaluate export.
  Bytes bytes = component_bytes("calib_loop");
  std::string needle = "tm_evaluate";
  auto it = std::search(bytes.begin(), bytes.end(), needle.begin(), needle.end());
  ASSERT_NE(it, bytes.end());
  *it = 'x';
  SandboxFixture fx;
  try {
    fx.box->compile(bytes);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), Errc::kMissingExport);
  }
}

TEST(SandboxTest, GarbageBytesRejected) {
  SandboxFixture fx;
  try {
    fx.box->compile(to_bytes("not a component"));
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), Errc::kInvalidBytecode);
  }
  // A failed compile must not poison the cache keyed by that hash.
  EXPECT_THROW(fx.box->compile(to_bytes("not a component")), Error);
}

TEST(SandboxTest, SecondCompileServedFromCache) {
  SandboxFixture fx;
  Bytes bytes = component_bytes("calib_loop");
  auto a = fx.box->compile(bytes);
  auto b = fx.box->compile(bytes);
  EXPECT_EQ(a.get(), b.get());
  EXPECT_EQ(fx.registry->get("sandbox.compile.count"), 1u);
  EXPECT_EQ(fx.registry->get("sandbox.compile.cache_hit"), 1u);

  // Signed variant of the same logic shares the cache entry.
  auto kp = crypto::ed25519_keygen();
  Bytes signed_bytes = identity::sign_component(bytes, kp.sk, 1u << 30);
  auto c = fx.box->compile(signed_bytes);
  EXPECT_EQ(a.get(), c.get());
  EXPECT_EQ(fx.registry->get("sandbox.compile.count"), 1u);

  fx.box->clear_compiled_cache();
  auto d = fx.box->compile(bytes);
  EXPECT_NE(a.get(), d.get());
  EXPECT_EQ(fx.registry->get("sandbox.compile.count"), 2u);
}

TEST(SandboxTest, ConcurrentCompileIsSingleFlight) {
  SandboxFixture fx;
  Bytes bytes = component_bytes("mocktee_a");
  std::atomic<int> ready{0};
  std::vector<std::thread> threads;
  std::vector<std::shared_ptr<const sandbox::CompiledComponent>> results(8);
  for (int i = 0; i < 8; ++i) {
    threads.emplace_back([&, i] {
      ready.fetch_add(1);
      while (ready.load() < 8) std::this_thread::yield();
      results[i] = fx.box->compile(bytes);
    });
  }
  for (auto& t : threads) t.join();
  for (int i = 1; i < 8; ++i) EXPECT_EQ(results[0].get(), results[i].get());
  EXPECT_EQ(fx.registry->get("sandbox.compile.count"), 1u);
}

TEST(SandboxTest, InfiniteLoopExhaustsFuelWithinWallClock) {
  SandboxFixture fx;
  auto comp = fx.box->compile(component_bytes("infinite_loop"));
  ExecutionPolicy policy;  // default budget, 2000 ms wall clock
  auto start = std::chrono::steady_clock::now();
  try {
    fx.box->evaluate(*comp, simple_input(), policy);
    FAIL() << "expected abort";
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), Errc::kFuelExhausted);
  }
  auto elapsed = std::chrono::duration_cast<std::chrono::milliseconds>(
      std::chrono::steady_clock::now() - start);
  EXPECT_LT(elapsed.count(), policy.wall_clock_limit_ms);
}

TEST(SandboxTest, MemoryHogIsTerminated) {
  SandboxFixture fx;
  auto comp = fx.box->compile(component_bytes("memory_hog"));
  ExecutionPolicy policy;
  policy.max_memory_bytes = 8ull << 20;
  auto start = std::chrono::steady_clock::now();
  try {
    fx.box->evaluate(*comp, simple_input(), policy);
    FAIL() << "expected abort";
  } catch (const Error& e) {
    EXPECT_TRUE(e.code() == Errc::kFuelExhausted || e.code() == Errc::kTrap ||
                e.code() == Errc::kMemoryExceeded)
        << errc_name(e.code());
  }
  auto elapsed = std::chrono::duration_cast<std::chrono::milliseconds>(
      std::chrono::steady_clock::now() - start);
  EXPECT_LT(elapsed.count(), policy.wall_clock_limit_ms);
}

TEST(SandboxTest, NetworkDeniedUnderDefaultPolicy) {
  SandboxFixture fx;
  auto comp = fx.box->compile(component_bytes("network_caller"));
  EvaluateInput in = simple_input(to_bytes("http://127.0.0.1:1/x"));
  EvaluateOutput out = fx.box->evaluate(*comp, in, ExecutionPolicy{});
  ASSERT_TRUE(out.succeeded());
  EXPECT_FALSE(out.claims->get("fetched")->as_bool());
  EXPECT_EQ(out.claims->get("err")->as_uns(), 1u);  // NetworkDenied
  EXPECT_EQ(fx.registry->get("sandbox.http.denied"), 1u);
  EXPECT_EQ(fx.registry->get("sandbox.http.allowed"), 0u);
}

TEST(SandboxTest, NetworkAllowedFetchesFromLocalServer) {
  httplib::Server server;
  std::atomic<int> hits{0};
  server.Get("/hello", [&](const httplib::Request&, httplib::Response& res) {
    hits.fetch_add(1);
    res.set_content("hi there", "text/plain");
  });
  int port = server.bind_to_any_port("127.0.0.1");
  std::thread server_thread([&] { server.listen_after_bind(); });
  server.wait_until_ready();

  SandboxFixture fx;
  auto comp = fx.box->compile(component_bytes("network_caller"));
  ExecutionPolicy policy;
  policy.network_allowed = true;
  std::string url = "http://127.0.0.1:" + std::to_string(port) + "/hello";
  EvaluateOutput out = fx.box->evaluate(*comp, simple_input(to_bytes(url)), policy);
  ASSERT_TRUE(out.succeeded());
  EXPECT_TRUE(out.claims->get("fetched")->as_bool());
  EXPECT_EQ(out.claims->get("body_len")->as_uns(), 8u);
  EXPECT_EQ(hits.load(), 1);

  // Unsupported scheme fails inside the component, not the host.
  EvaluateOutput bad =
      fx.box->evaluate(*comp, simple_input(to_bytes("ftp://127.0.0.1/x")), policy);
  ASSERT_TRUE(bad.succeeded());
  EXPECT_FALSE(bad.claims->get("fetched")->as_bool());
  EXPECT_EQ(bad.claims->get("err")->as_uns(), 2u);  // FetchFailed

  server.stop();
  server_thread.join();
}

Bytes probe_evidence(uint8_t op, const std::string& key = "", const Bytes& value = {}) {
  Bytes ev{op};
  if (op == 1 || op == 2) {
    ev.push_back(static_cast<uint8_t>(key.size()));
    ev.insert(ev.end(), key.begin(), key.end());
    ev.insert(ev.end(), value.begin(), value.end());
  }
  return ev;
}

TEST(SandboxTest, ScratchCacheWriteReadAcrossInstances) {
  SandboxFixture fx;
  auto comp = fx.box->compile(component_bytes("cache_probe"));
  ExecutionPolicy policy;

  Bytes payload = {0xca, 0xfe, 0xba, 0xbe};
  EvaluateOutput w =
      fx.box->evaluate(*comp, simple_input(probe_evidence(1, "slot", payload)), policy);
  ASSERT_TRUE(w.succeeded());
  EXPECT_EQ(w.claims->get("rc")->as_uns(), 0u);

  // A fresh instance of the same component sees the value.
  EvaluateOutput r = fx.box->evaluate(*comp, simple_input(probe_evidence(2, "slot")), policy);
  ASSERT_TRUE(r.succeeded());
  EXPECT_EQ(r.claims->get("rc")->as_uns(), payload.size());
  EXPECT_EQ(r.claims->get("value")->as_bytes(), payload);
}

TEST(SandboxTest, PathEscapeRejected) {
  SandboxFixture fx;
  auto comp = fx.box->compile(component_bytes("cache_probe"));
  EvaluateOutput out =
      fx.box->evaluate(*comp, simple_input(probe_evidence(3)), ExecutionPolicy{});
  ASSERT_TRUE(out.succeeded());
  EXPECT_EQ(out.claims->get("rc")->as_uns(), 1005u);  // PathEscape
  // Nothing escaped outside the scratch root.
  EXPECT_FALSE(std::filesystem::exists(fx.config.scratch_root.parent_path() / "escape"));
}

TEST(SandboxTest, ScratchIsolatedBetweenComponentHashes) {
  SandboxFixture fx;
  Bytes probe = component_bytes("cache_probe");
  auto comp_a = fx.box->compile(probe);
  // Same logic, different measurement: an extra custom section changes the hash.
  Bytes probe_b = probe;
  Bytes pad = {0x00, 0x05, 0x03, 'p', 'a', 'd', 0xee};
  probe_b.insert(probe_b.end(), pad.begin(), pad.end());
  auto comp_b = fx.box->compile(probe_b);
  ASSERT_NE(comp_a->hash, comp_b->hash);

  ExecutionPolicy policy;
  Bytes secret = {0x42};
  EvaluateOutput w =
      fx.box->evaluate(*comp_a, simple_input(probe_evidence(1, "k", secret)), policy);
  ASSERT_TRUE(w.succeeded());
  ASSERT_EQ(w.claims->get("rc")->as_uns(), 0u);

  EvaluateOutput r = fx.box->evaluate(*comp_b, simple_input(probe_evidence(2, "k")), policy);
  ASSERT_TRUE(r.succeeded());
  EXPECT_EQ(r.claims->get("rc")->as_uns(), 1004u);  // NotFound: no cross-hash reads
}

TEST(SandboxTest, OutOfBoundsAccessTrapsHostUnaffected) {
  SandboxFixture fx;
  auto comp = fx.box->compile(component_bytes("cache_probe"));
  try {
    fx.box->evaluate(*comp, simple_input(probe_evidence(4)), ExecutionPolicy{});
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), Errc::kTrap);
  }
  // The sandbox remains usable afterwards.
  EvaluateOutput ok = fx.box->evaluate(*comp, simple_input(probe_evidence(2, "x")),
                                       ExecutionPolicy{});
  EXPECT_TRUE(ok.succeeded());
}

TEST(SandboxTest, OversizedClaimsRejectedAsInternal) {
  SandboxFixture fx;
  auto comp = fx.box->compile(component_bytes("claims_bomb"));
  ExecutionPolicy policy;
  policy.fuel_budget = 400'000'000;
  EvaluateOutput out = fx.box->evaluate(*comp, simple_input(), policy);
  ASSERT_FALSE(out.succeeded());
  EXPECT_EQ(out.failure_code, "Internal");
  EXPECT_EQ(fx.registry->get("sandbox.output.size_rejected"), 1u);
}

TEST(SandboxTest, TooDeepClaimsRejectedAsInternal) {
  SandboxFixture fx;
  auto comp = fx.box->compile(component_bytes("cache_probe"));
  EvaluateOutput out =
      fx.box->evaluate(*comp, simple_input(probe_evidence(5)), ExecutionPolicy{});
  ASSERT_FALSE(out.succeeded());
  EXPECT_EQ(out.failure_code, "Internal");
  EXPECT_EQ(fx.registry->get("sandbox.output.depth_rejected"), 1u);
}

TEST(SandboxTest, StatelessBetweenRequestsWithClearedScratch) {
  SandboxFixture fx;
  auto comp = fx.box->compile(component_bytes("calib_loop"));
  EvaluateInput in = simple_input({5, 6, 7, 8});
  EvaluateOutput a = fx.box->evaluate(*comp, in, ExecutionPolicy{});
  fx.box->clear_scratch();
  EvaluateOutput b = fx.box->evaluate(*comp, in, ExecutionPolicy{});
  ASSERT_TRUE(a.succeeded());
  ASSERT_TRUE(b.succeeded());
  EXPECT_EQ(*a.claims, *b.claims);
}

// Differential check of the native-speed P-256 host import against the
// in-sandbox implementation, with the host OpenSSL backend as the reference.
TEST(SandboxTest, P256HostImportAgreesWithInSandboxImplementation) {
  auto mod = std::make_shared<wasm::Module>(
      wasm::decode_module(component_bytes("p256_diff")));

  // The diff component needs the verify_p256 import; give it the same host
  // binding the sandbox uses by setting up a real evaluation context.
  SandboxFixture fx;
  auto comp = fx.box->compile(component_bytes("p256_diff"));

  // Drive the exports directly through a dedicated instance.
  std::vector<wasm::HostImport> imports;
  imports.push_back(wasm::HostImport{
      "verify_p256",
      wasm::FuncType{{wasm::kTypeI32, wasm::kTypeI32, wasm::kTypeI32, wasm::kTypeI32},
                     {wasm::kTypeI32}},
      [](wasm::Instance& inst, const uint64_t* args, uint64_t* r) {
        try {
          Bytes msg = inst.mem_read(static_cast<uint32_t>(args[0]),
                                    static_cast<uint32_t>(args[1]));
          Bytes sig = inst.mem_read(static_cast<uint32_t>(args[2]), 64);
          Bytes pub = inst.mem_read(static_cast<uint32_t>(args[3]), 65);
          *r = crypto::p256_verify(msg, sig, pub) ? 1 : 0;
        } catch (const Error& e) {
          if (e.code() == Errc::kMalformedKey) {
            *r = static_cast<uint64_t>(static_cast<uint32_t>(-7));
          } else {
            throw;
          }
        }
      }});
  wasm::InstanceLimits limits;
  limits.fuel = INT64_MAX / 2;
  wasm::Instance inst(comp->module, imports, limits);

  std::mt19937_64 rng(2026);
  auto kp = crypto::p256_keygen();
  int valid_cases = 0;
  for (int i = 0; i < 1000; ++i) {
    Bytes msg = crypto::random_bytes(1 + rng() % 96);
    auto sig_arr = crypto::p256_sign(msg, kp);
    Bytes sig(sig_arr.begin(), sig_arr.end());
    Bytes pub(kp.pub.begin(), kp.pub.end());

    // Mix of valid and mutated triples.
    int mode = static_cast<int>(rng() % 4);
    if (mode == 1) {
      sig[rng() % sig.size()] ^= static_cast<uint8_t>(1 + rng() % 255);
    } else if (mode == 2) {
      msg[rng() % msg.size()] ^= static_cast<uint8_t>(1 + rng() % 255);
    } else if (mode == 3) {
      pub[1 + rng() % 64] ^= static_cast<uint8_t>(1 + rng() % 255);
    }

    int expected;
    try {
      expected = crypto::p256_verify(msg, sig, pub) ? 1 : 0;
    } catch (const Error&) {
      expected = -7;
    }
    if (expected == 1) ++valid_cases;

    uint64_t alloc_args[] = {msg.size() + 64 + 65};
    uint64_t base = inst.call("tm_alloc", alloc_args);
    ASSERT_NE(base, 0u);
    inst.mem_write(base, msg);
    inst.mem_write(base + msg.size(), sig);
    inst.mem_write(base + msg.size() + 64, pub);

    uint64_t args[] = {base, msg.size(), base + msg.size(), base + msg.size() + 64};
    int in_sandbox = static_cast<int>(static_cast<int32_t>(inst.call("x_p256_verify", args)));
    int via_host = static_cast<int>(static_cast<int32_t>(inst.call("x_p256_verify_host", args)));
    ASSERT_EQ(in_sandbox, expected) << "in-sandbox disagrees at case " << i;
    ASSERT_EQ(via_host, expected) << "host import disagrees at case " << i;
  }
  EXPECT_GT(valid_cases, 100);
}

}  // namespace
}  // namespace trustmee
