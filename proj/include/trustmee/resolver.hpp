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
// Component resolution in strict order: local cache, bytes stapled to the
// request, then an untrusted registry. Later paths populate the cache, so a
// repeated reference is always served from it. Registry bytes are never
// trusted here; trust decisions happen downstream via measurement and
// appraisal.

#ifndef TRUSTMEE_RESOLVER_HPP_
#define TRUSTMEE_RESOLVER_HPP_

#include <array>
#include <cstdint>
#include <filesystem>
#include <future>
#include <list>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <unordered_map>

#define CPPHTTPLIB_NO_EXCEPTIONS 1
#include <httplib.h>

#include "trustmee/bytes.hpp"
#include "trustmee/crypto.hpp"
#include "trustmee/error.hpp"
#include "trustmee/identity.hpp"
#include "trustmee/metrics.hpp"

namespace trustmee::resolver {

struct ComponentRef {
  enum class Kind { kHash, kRegistry };
  Kind kind = Kind::kHash;
  std::array<uint8_t, 32> digest{};  // hash form
  std::string host_port;             // registry form
  std::string name;
  std::string tag;
  std::string raw;
};

namespace detail {

inline bool valid_name_char(char c) {
  return (c >= 'a' && c <= 'z') || (c >= '0' && c <= '9') || c == '.' || c == '_' ||
         c == '-' || c == '/';
}

}  // namespace detail

// Grammar: "sha256:<64 hex>" or "reg://<host[:port]>/<name>:<tag>".
inline ComponentRef parse_ref(std::string_view text) {
  ComponentRef ref;
  ref.raw = std::string(text);
  if (text.starts_with("sha256:")) {
    std::string_view hex = text.substr(7);
    if (hex.size() != 64) fail(Errc::kMalformed, "hash ref requires 64 hex digits");
    Bytes digest = from_hex(hex);
    std::copy(digest.begin(), digest.end(), ref.digest.begin());
    ref.kind = ComponentRef::Kind::kHash;
    return ref;
  }
  if (text.starts_with("reg://")) {
    std::string_view rest = text.substr(6);
    size_t slash = rest.find('/');
    if (slash == std::string_view::npos || slash == 0) {
      fail(Errc::kMalformed, "registry ref requires a host");
    }
    ref.host_port = std::string(rest.substr(0, slash));
    std::string_view name_tag = rest.substr(slash + 1);
    size_t colon = name_tag.rfind(':');
    if (colon == std::string_view::npos || colon == 0 || colon + 1 == name_tag.size()) {
      fail(Errc::kMalformed, "registry ref requires name:tag");
    }
    ref.name = std::string(name_tag.substr(0, colon));
    ref.tag = std::string(name_tag.substr(colon + 1));
    for (char c : ref.name) {
      if (!detail::valid_name_char(c)) fail(Errc::kMalformed, "invalid name character");
    }
    for (char c : ref.tag) {
      if (!detail::valid_name_char(c) || c == '/') fail(Errc::kMalformed, "invalid tag character");
    }
    ref.kind = ComponentRef::Kind::kRegistry;
    return ref;
  }
  fail(Errc::kMalformed, "component id must be sha256:... or reg://...");
}

enum class Source { kCache, kStapled, kRegistry };

inline const char* source_name(Source s) {
  switch (s) {
    case Source::kCache: return "cache";
    case Source::kStapled: return "stapled";
    case Source::kRegistry: return "registry";
  }
  return "?";
}

struct Resolution {
  Bytes bytes;
  Source source = Source::kCache;
  std::array<uint8_t, 32> hash{};  // measurement hash of the resolved bytes
};

struct ResolverConfig {
  std::filesystem::path cache_dir;
  uint64_t memory_cache_cap_bytes = 1ull << 30;
  size_t max_component_bytes = 64ull << 20;
  std::string default_registry;  // host:port consulted for hash-form refs
  uint32_t fetch_timeout_ms = 10'000;
};

class Resolver {
 public:
  explicit Resolver(ResolverConfig config,
                    std::shared_ptr<metrics::Registry> registry = nullptr)
      : config_(std::move(config)), metrics_(std::move(registry)) {
    if (!config_.cache_dir.empty()) std::filesystem::create_directories(config_.cache_dir);
  }

  Resolution resolve(const ComponentRef& ref, const std::optional<Bytes>& stapled) {
    // 1. cache
    if (auto hit = lookup_cached(ref)) {
      count("resolver.source.cache");
      return *hit;
    }
    // 2. stapled bytes
    if (stapled.has_value()) {
      std::array<uint8_t, 32> hash = measurement_hash(*stapled);
      if (ref.kind == ComponentRef::Kind::kHash && hash != ref.digest) {
        fail(Errc::kDigestMismatch, "stapled component does not match requested digest");
      }
      insert(ref, hash, *stapled);
      count("resolver.source.stapled");
      return Resolution{*stapled, Source::kStapled, hash};
    }
    // 3. registry
    Bytes fetched = registry_fetch(ref);
    std::array<uint8_t, 32> hash = measurement_hash(fetched);
    if (ref.kind == ComponentRef::Kind::kHash && hash != ref.digest) {
      fail(Errc::kDigestMismatch, "registry bytes do not match requested digest");
    }
    insert(ref, hash, fetched);
    count("resolver.source.registry");
    return Resolution{std::move(fetched), Source::kRegistry, hash};
  }

  // Fetches component bytes from the registry without consulting the cache.
  Bytes registry_fetch(const ComponentRef& ref) {
    std::string host;
    std::string path;
    if (ref.kind == ComponentRef::Kind::kRegistry) {
      host = ref.host_port;
      path = "/v1/components/" + ref.name + "/" + ref.tag;
    } else {
      if (config_.default_registry.empty()) {
        fail(Errc::kNotFound, "component not cached, not stapled, and no registry configured");
      }
      host = config_.default_registry;
      path = "/v1/components/sha256/" + to_hex(ref.digest);
    }

    // Single-flight per ref.
    std::shared_future<Bytes> fut;
    bool leader = false;
    std::promise<Bytes> promise;
    std::string key = host + path;
    {
      std::lock_guard lock(fetch_mu_);
      auto it = inflight_.find(key);
      if (it != inflight_.end()) {
        fut = it->second;
      } else {
        leader = true;
        fut = promise.get_future().share();
        inflight_.emplace(key, fut);
      }
    }
    if (!leader) {
      Bytes got = fut.get();
      if (got.empty()) fail(Errc::kFetchFailed, "concurrent fetch failed");
      return got;
    }

    Bytes body;
    std::string error_detail;
    try {
      body = do_fetch(host, path, &error_detail);
    } catch (...) {
      {
        std::lock_guard lock(fetch_mu_);
        inflight_.erase(key);
      }
      promise.set_value({});
      throw;
    }
    {
      std::lock_guard lock(fetch_mu_);
      inflight_.erase(key);
    }
    promise.set_value(body);
    return body;
  }

  void clear_memory_cache() {
    std::lock_guard lock(mu_);
    lru_.clear();
    by_hash_.clear();
    ref_index_.clear();
    total_bytes_ = 0;
  }

  void clear_disk_cache() {
    if (config_.cache_dir.empty()) return;
    std::error_code ec;
    for (auto& entry : std::filesystem::directory_iterator(config_.cache_dir, ec)) {
      std::filesystem::remove(entry.path(), ec);
    }
  }

  uint64_t memory_cache_bytes() const {
    std::lock_guard lock(mu_);
    return total_bytes_;
  }

 private:
  using LruList = std::list<std::pair<std::array<uint8_t, 32>, Bytes>>;

  static std::array<uint8_t, 32> measurement_hash(std::span<const uint8_t> bytes) {
    return crypto::sha256(identity::strip_signature(bytes));
  }

  void count(std::string_view name) {
    if (metrics_) metrics_->inc(name);
  }

  std::optional<Resolution> lookup_cached(const ComponentRef& ref) {
    std::array<uint8_t, 32> hash{};
    if (ref.kind == ComponentRef::Kind::kHash) {
      hash = ref.digest;
    } else {
      std::lock_guard lock(mu_);
      auto it = ref_index_.find(ref.raw);
      if (it == ref_index_.end()) return std::nullopt;
      hash = it->second;
    }
    {
      std::lock_guard lock(mu_);
      auto it = by_hash_.find(hash);
      if (it != by_hash_.end()) {
        lru_.splice(lru_.begin(), lru_, it->second);
        return Resolution{it->second->second, Source::kCache, hash};
      }
    }
    // Disk layer.
    if (!config_.cache_dir.empty()) {
      std::filesystem::path p = config_.cache_dir / (to_hex(hash) + ".bin");
      std::error_code ec;
      if (std::filesystem::is_regular_file(p, ec)) {
        Bytes bytes = read_file(p);
        if (measurement_hash(bytes) == hash) {
          insert_memory(hash, bytes);
          return Resolution{std::move(bytes), Source::kCache, hash};
        }
        std::filesystem::remove(p, ec);  // corrupted entry
      }
    }
    return std::nullopt;
  }

  void insert(const ComponentRef& ref, const std::array<uint8_t, 32>& hash, const Bytes& bytes) {
    insert_memory(hash, bytes);
    if (ref.kind == ComponentRef::Kind::kRegistry) {
      std::lock_guard lock(mu_);
      ref_index_[ref.raw] = hash;
    }
    if (!config_.cache_dir.empty()) {
      write_file(config_.cache_dir / (to_hex(hash) + ".bin"), bytes);
    }
  }

  void insert_memory(const std::array<uint8_t, 32>& hash, const Bytes& bytes) {
    std::lock_guard lock(mu_);
    if (by_hash_.count(hash)) return;  // idempotent by hash key
    lru_.emplace_front(hash, bytes);
    by_hash_[hash] = lru_.begin();
    total_bytes_ += bytes.size();
    while (total_bytes_ > config_.memory_cache_cap_bytes && !lru_.empty()) {
      auto& back = lru_.back();
      total_bytes_ -= back.second.size();
      by_hash_.erase(back.first);
      lru_.pop_back();
    }
  }

  Bytes do_fetch(const std::string& host, const std::string& path, std::string* error_detail) {
    httplib::Client client(("http://" + host).c_str());
    client.set_connection_timeout(0, static_cast<long>(config_.fetch_timeout_ms) * 1000);
    client.set_read_timeout(0, static_cast<long>(config_.fetch_timeout_ms) * 1000);

    size_t limit = config_.max_component_bytes;
    std::string body;
    bool too_large = false;
    auto res = client.Get(
        path.c_str(), [&](const char* data, size_t len) {
          if (body.size() + len > limit) {
            too_large = true;
            return false;
          }
          body.append(data, len);
          return true;
        });
    if (too_large) fail(Errc::kResponseTooLarge, "component exceeds fetch size limit");
    if (!res) fail(Errc::kFetchFailed, "registry unreachable: " + host);
    if (res->status != 200) {
      if (error_detail) *error_detail = "status " + std::to_string(res->status);
      fail(Errc::kFetchFailed, "registry returned status " + std::to_string(res->status) +
                                   " for " + path);
    }
    if (body.empty()) fail(Errc::kFetchFailed, "registry returned empty body");
    return Bytes(body.begin(), body.end());
  }

  ResolverConfig config_;
  std::shared_ptr<metrics::Registry> metrics_;
  mutable std::mutex mu_;
  LruList lru_;
  std::map<std::array<uint8_t, 32>, LruList::iterator> by_hash_;
  std::unordered_map<std::string, std::array<uint8_t, 32>> ref_index_;
  uint64_t total_bytes_ = 0;

  std::mutex fetch_mu_;
  std::unordered_map<std::string, std::shared_future<Bytes>> inflight_;
};

}  // namespace trustmee::resolver

#endif  // TRUSTMEE_RESOLVER_HPP_
