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

#include "trustmee/resolver.hpp"

#include <gtest/gtest.h>

#include <atomic>
#include <filesystem>
#include <thread>

namespace trustmee {
namespace {

using resolver::ComponentRef;
using resolver::parse_ref;
using resolver::Resolver;
using resolver::ResolverConfig;
using resolver::Source;

Bytes component_bytes(const std::string& name) {
  return read_file(std::string(TRUSTMEE_COMPONENTS_DIR) + "/" + name + ".wasm");
}

std::string hash_ref_for(const Bytes& bytes) {
  return "sha256:" + to_hex(crypto::sha256(identity::strip_signature(bytes)));
}

std::filesystem::path fresh_dir(const std::string& tag) {
  auto p = std::filesystem::temp_directory_path() /
           ("trustmee-rt-" + tag + "-" +
            std::to_string(std::chrono::steady_clock::now().time_since_epoch().count()));
  std::filesystem::create_directories(p);
  return p;
}

// In-test registry with hit counting and tamper switches.
class TestRegistry {
 public:
  TestRegistry() {
    server_.Get(R"(/v1/components/(.+)/(.+))",
                [this](const httplib::Request& req, httplib::Response& res) {
                  hits_.fetch_add(1);
                  std::string key = req.matches[1].str() + ":" + req.matches[2].str();
                  auto it = blobs_.find(key);
                  if (it == blobs_.end()) {
                    res.status = 404;
                    return;
                  }
                  Bytes body = it->second;
                  if (tamper_) body[body.size() / 2] ^= 0xff;
                  res.set_content(std::string(body.begin(), body.end()),
                                  "application/octet-stream");
                });
    port_ = server_.bind_to_any_port("127.0.0.1");
    thread_ = std::thread([this] { server_.listen_after_bind(); });
    server_.wait_until_ready();
  }
  ~TestRegistry() {
    server_.stop();
    thread_.join();
  }

  void put(const std::string& name, const std::string& tag, Bytes blob) {
    blobs_[name + ":" + tag] = std::move(blob);
  }
  void put_by_hash(const Bytes& blob) {
    blobs_["sha256:" + to_hex(crypto::sha256(identity::strip_signature(blob)))] = blob;
  }
  std::string host_port() const { return "127.0.0.1:" + std::to_string(port_); }
  int hits() const { return hits_.load(); }
  void set_tamper(bool t) { tamper_ = t; }

 private:
  httplib::Server server_;
  std::thread thread_;
  int port_ = 0;
  std::map<std::string, Bytes> blobs_;
  std::atomic<int> hits_{0};
  bool tamper_ = false;
};

TEST(ResolverTest, ParseRefGrammar) {
  ComponentRef h = parse_ref("sha256:" + std::string(64, 'a'));
  EXPECT_EQ(h.kind, ComponentRef::Kind::kHash);
  ComponentRef r = parse_ref("reg://example.test:5000/vendor/tee-a:v1.2");
  EXPECT_EQ(r.kind, ComponentRef::Kind::kRegistry);
  EXPECT_EQ(r.host_port, "example.test:5000");
  EXPECT_EQ(r.name, "vendor/tee-a");
  EXPECT_EQ(r.tag, "v1.2");

  EXPECT_THROW(parse_ref("sha256:tooshort"), Error);
  EXPECT_THROW(parse_ref("sha256:" + std::string(64, 'z')), Error);
  EXPECT_THROW(parse_ref("reg://host/noTag"), Error);
  EXPECT_THROW(parse_ref("reg://host/UPPER:v1"), Error);
  EXPECT_THROW(parse_ref("oci://host/x:y"), Error);
  EXPECT_THROW(parse_ref(""), Error);
}

TEST(ResolverTest, StapledThenCacheOrder) {
  auto registry = std::make_shared<metrics::Registry>();
  ResolverConfig cfg;
  cfg.cache_dir = fresh_dir("cache");
  Resolver r(cfg, registry);

  Bytes comp = component_bytes("calib_loop");
  ComponentRef ref = parse_ref(hash_ref_for(comp));

  auto first = r.resolve(ref, comp);
  EXPECT_EQ(first.source, Source::kStapled);
  EXPECT_EQ(first.bytes, comp);

  // Identical request now hits the cache even with the staple still present.
  auto second = r.resolve(ref, comp);
  EXPECT_EQ(second.source, Source::kCache);
  EXPECT_EQ(registry->get("resolver.source.stapled"), 1u);
  EXPECT_EQ(registry->get("resolver.source.cache"), 1u);
  std::filesystem::remove_all(cfg.cache_dir);
}

TEST(ResolverTest, StapledDigestMismatchRejected) {
  Resolver r(ResolverConfig{});
  Bytes comp = component_bytes("calib_loop");
  ComponentRef ref = parse_ref("sha256:" + std::string(64, '0'));
  try {
    r.resolve(ref, comp);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), Errc::kDigestMismatch);
  }
}

TEST(ResolverTest, RegistryFetchThenCache) {
  TestRegistry reg;
  Bytes comp = component_bytes("network_caller");
  reg.put("vendor/net", "v1", comp);

  auto metrics_reg = std::make_shared<metrics::Registry>();
  ResolverConfig cfg;
  cfg.cache_dir = fresh_dir("cache2");
  Resolver r(cfg, metrics_reg);

  ComponentRef ref = parse_ref("reg://" + reg.host_port() + "/vendor/net:v1");
  auto first = r.resolve(ref, std::nullopt);
  EXPECT_EQ(first.source, Source::kRegistry);
  EXPECT_EQ(first.bytes, comp);
  EXPECT_EQ(reg.hits(), 1);

  auto second = r.resolve(ref, std::nullopt);
  EXPECT_EQ(second.source, Source::kCache);
  EXPECT_EQ(reg.hits(), 1);  // zero additional network calls

  // Same blob via its hash ref is also cached now.
  auto third = r.resolve(parse_ref(hash_ref_for(comp)), std::nullopt);
  EXPECT_EQ(third.source, Source::kCache);
  std::filesystem::remove_all(cfg.cache_dir);
}

TEST(ResolverTest, DiskCacheSurvivesMemoryClear) {
  TestRegistry reg;
  Bytes comp = component_bytes("calib_loop");
  reg.put("vendor/calib", "v1", comp);

  ResolverConfig cfg;
  cfg.cache_dir = fresh_dir("cache3");
  Resolver r(cfg);
  ComponentRef href = parse_ref(hash_ref_for(comp));
  ComponentRef rref = parse_ref("reg://" + reg.host_port() + "/vendor/calib:v1");

  EXPECT_EQ(r.resolve(rref, std::nullopt).source, Source::kRegistry);
  r.clear_memory_cache();
  // Hash-form lookups find the blob on disk without a network call.
  EXPECT_EQ(r.resolve(href, std::nullopt).source, Source::kCache);
  EXPECT_EQ(reg.hits(), 1);

  // A second resolver over the same directory also sees it.
  Resolver r2(cfg);
  EXPECT_EQ(r2.resolve(href, std::nullopt).source, Source::kCache);
  std::filesystem::remove_all(cfg.cache_dir);
}

TEST(ResolverTest, HashFormFetchesFromDefaultRegistryAndChecksDigest) {
  TestRegistry reg;
  Bytes comp = component_bytes("impersonator");
  reg.put_by_hash(comp);

  ResolverConfig cfg;
  cfg.default_registry = reg.host_port();
  Resolver r(cfg);
  ComponentRef ref = parse_ref(hash_ref_for(comp));
  auto res = r.resolve(ref, std::nullopt);
  EXPECT_EQ(res.source, Source::kRegistry);
  EXPECT_EQ(res.bytes, comp);

  // Tampered registry bytes must be caught by the digest rule.
  reg.set_tamper(true);
  r.clear_memory_cache();
  r.clear_disk_cache();
  try {
    r.resolve(ref, std::nullopt);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), Errc::kDigestMismatch);
  }
}

TEST(ResolverTest, NotFoundAndFetchFailures) {
  Resolver no_registry{ResolverConfig{}};
  ComponentRef ref = parse_ref("sha256:" + std::string(64, 'b'));
  try {
    no_registry.resolve(ref, std::nullopt);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), Errc::kNotFound);
  }

  TestRegistry reg;
  Resolver r(ResolverConfig{});
  ComponentRef missing = parse_ref("reg://" + reg.host_port() + "/vendor/ghost:v9");
  try {
    r.resolve(missing, std::nullopt);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), Errc::kFetchFailed);
    EXPECT_NE(e.detail().find("404"), std::string::npos);
  }

  ResolverConfig unreachable_cfg;
  unreachable_cfg.fetch_timeout_ms = 200;
  Resolver r2(unreachable_cfg);
  ComponentRef dead = parse_ref("reg://127.0.0.1:1/vendor/x:y");
  EXPECT_THROW(r2.resolve(dead, std::nullopt), Error);
}

TEST(ResolverTest, OversizedResponseRejected) {
  TestRegistry reg;
  Bytes huge(3 << 20, 0xaa);
  reg.put("vendor/huge", "v1", huge);
  ResolverConfig cfg;
  cfg.max_component_bytes = 1 << 20;
  Resolver r(cfg);
  ComponentRef ref = parse_ref("reg://" + reg.host_port() + "/vendor/huge:v1");
  try {
    r.resolve(ref, std::nullopt);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), Errc::kResponseTooLarge);
  }
}

TEST(ResolverTest, LruEvictsByTotalBytes) {
  ResolverConfig cfg;
  cfg.memory_cache_cap_bytes = 2100;
  Resolver r(cfg);
  std::vector<Bytes> blobs;
  std::vector<ComponentRef> refs;
  for (int i = 0; i < 3; ++i) {
    Bytes blob(1000, static_cast<uint8_t>(i + 1));
    refs.push_back(parse_ref(hash_ref_for(blob)));
    blobs.push_back(std::move(blob));
    r.resolve(refs.back(), blobs.back());
  }
  // Third insert pushed the first blob out (2 x 1000 fits, 3 does not).
  EXPECT_LE(r.memory_cache_bytes(), 2100u);
  auto again = r.resolve(refs[0], blobs[0]);
  EXPECT_EQ(again.source, Source::kStapled);  // was evicted, re-resolves
  auto recent = r.resolve(refs[2], std::nullopt);
  EXPECT_EQ(recent.source, Source::kCache);
}

TEST(ResolverTest, ConcurrentRegistryFetchIsSingleFlight) {
  TestRegistry reg;
  Bytes comp = component_bytes("mocktee_b");
  reg.put("vendor/b", "v1", comp);

  ResolverConfig cfg;
  Resolver r(cfg);
  // Bypass the cache to exercise fetch coalescing directly.
  ComponentRef ref = parse_ref("reg://" + reg.host_port() + "/vendor/b:v1");
  std::atomic<int> ready{0};
  std::vector<std::thread> threads;
  std::vector<Bytes> results(6);
  for (int i = 0; i < 6; ++i) {
    threads.emplace_back([&, i] {
      ready.fetch_add(1);
      while (ready.load() < 6) std::this_thread::yield();
      results[i] = r.registry_fetch(ref);
    });
  }
  for (auto& t : threads) t.join();
  for (const auto& b : results) EXPECT_EQ(b, comp);
  EXPECT_LE(reg.hits(), 2);  // coalesced; at most a rare double fetch at the boundary
}

}  // namespace
}  // namespace trustmee
