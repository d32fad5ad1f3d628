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
// Sandbox host: compiles verification components (single-flight, cached by
// measurement hash), instantiates them per evaluation under an execution
// policy, and exposes the capability-gated host imports (network fetch,
// per-component scratch cache, native P-256, wall clock).

#ifndef TRUSTMEE_SANDBOX_HPP_
#define TRUSTMEE_SANDBOX_HPP_

#include <chrono>
#include <cstdint>
#include <filesystem>
#include <functional>
#include <future>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <span>
#include <string>
#include <vector>

#define CPPHTTPLIB_NO_EXCEPTIONS 1
#include <httplib.h>

#include "trustmee/bytes.hpp"
#include "trustmee/cbor.hpp"
#include "trustmee/crypto.hpp"
#include "trustmee/error.hpp"
#include "trustmee/identity.hpp"
#include "trustmee/metrics.hpp"
#include "trustmee/wasm.hpp"

namespace trustmee::sandbox {

struct SandboxConfig {
  std::filesystem::path scratch_root;
  uint64_t scratch_quota_bytes = 16ull << 20;
  size_t max_output_bytes = 1u << 20;
  size_t max_output_depth = 8;
  size_t http_response_limit = 4u << 20;
  std::function<uint64_t()> now = [] {
    return static_cast<uint64_t>(
        std::chrono::duration_cast<std::chrono::seconds>(
            std::chrono::system_clock::now().time_since_epoch())
            .count());
  };
};

struct CompiledComponent {
  std::array<uint8_t, 32> hash{};
  std::shared_ptr<const wasm::Module> module;
  std::chrono::steady_clock::time_point compiled_at;
};

struct EvaluateInput {
  Bytes tee_evidence;
  std::vector<Bytes> endorsements;
  Bytes expected_report_data;
};

// Component-reported result. Host-level faults (fuel, memory, traps, invalid
// bytecode) are raised as Error instead.
struct EvaluateOutput {
  std::optional<cbor::Value> claims;
  std::string failure_code;
  std::string failure_detail;

  bool succeeded() const { return claims.has_value(); }
};

struct EvaluateStats {
  uint64_t fuel_consumed = 0;
  uint64_t micros = 0;
};

namespace detail {

inline bool valid_cache_key(std::string_view key) {
  if (key.empty() || key.size() > 256) return false;
  if (key.front() == '/' || key.back() == '/') return false;
  size_t seg_len = 0;
  for (size_t i = 0; i <= key.size(); ++i) {
    if (i == key.size() || key[i] == '/') {
      if (seg_len == 0) return false;
      seg_len = 0;
      continue;
    }
    char c = key[i];
    bool ok = (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') || (c >= '0' && c <= '9') ||
              c == '.' || c == '_' || c == '-';
    if (!ok) return false;
    ++seg_len;
    if (c == '.' && i + 1 <= key.size()) {
      // ".." segments are traversal; single dots inside names are fine.
    }
  }
  // Reject any segment that is only dots.
  size_t start = 0;
  for (size_t i = 0; i <= key.size(); ++i) {
    if (i == key.size() || key[i] == '/') {
      std::string_view seg = key.substr(start, i - start);
      bool all_dots = !seg.empty();
      for (char c : seg) {
        if (c != '.') all_dots = false;
      }
      if (all_dots) return false;
      start = i + 1;
    }
  }
  return true;
}

inline uint64_t dir_size_bytes(const std::filesystem::path& dir) {
  std::error_code ec;
  uint64_t total = 0;
  if (!std::filesystem::exists(dir, ec)) return 0;
  for (auto it = std::filesystem::recursive_directory_iterator(dir, ec);
       it != std::filesystem::recursive_directory_iterator(); it.increment(ec)) {
    if (ec) break;
    if (it->is_regular_file(ec)) total += it->file_size(ec);
  }
  return total;
}

struct UrlParts {
  std::string scheme;
  std::string host_port;
  std::string path;
};

inline std::optional<UrlParts> parse_url(std::string_view url) {
  UrlParts out;
  size_t scheme_end = url.find("://");
  if (scheme_end == std::string_view::npos) return std::nullopt;
  out.scheme = std::string(url.substr(0, scheme_end));
  std::string_view rest = url.substr(scheme_end + 3);
  size_t slash = rest.find('/');
  if (slash == std::string_view::npos) {
    out.host_port = std::string(rest);
    out.path = "/";
  } else {
    out.host_port = std::string(rest.substr(0, slash));
    out.path = std::string(rest.substr(slash));
  }
  if (out.host_port.empty()) return std::nullopt;
  return out;
}

}  // namespace detail

class Sandbox {
 public:
  explicit Sandbox(SandboxConfig config,
                   std::shared_ptr<metrics::Registry> registry = nullptr)
      : config_(std::move(config)), metrics_(std::move(registry)) {
    if (config_.scratch_root.empty()) {
      config_.scratch_root = std::filesystem::temp_directory_path() / "trustmee-scratch";
    }
    std::filesystem::create_directories(config_.scratch_root);
  }

  const SandboxConfig& config() const { return config_; }

  // Compiles (or returns the cached compilation of) the component. Callers
  // pass the raw, signature-bearing bytes; the cache key is the measurement
  // hash so signed and unsigned builds of the same logic share one entry.
  std::shared_ptr<const CompiledComponent> compile(std::span<const uint8_t> component_bytes) {
    Bytes stripped = identity::strip_signature(component_bytes);
    std::array<uint8_t, 32> hash = crypto::sha256(stripped);
    Bytes key(hash.begin(), hash.end());

    std::shared_future<std::shared_ptr<const CompiledComponent>> fut;
    bool leader = false;
    std::promise<std::shared_ptr<const CompiledComponent>> promise;
    {
      std::lock_guard lock(mu_);
      auto it = cache_.find(key);
      if (it != cache_.end()) {
        fut = it->second;
      } else {
        leader = true;
        fut = promise.get_future().share();
        cache_.emplace(key, fut);
      }
    }
    if (!leader) {
      count("sandbox.compile.cache_hit");
      auto result = fut.get();
      if (!result) fail(Errc::kInvalidBytecode, "component failed to compile");
      return result;
    }

    count("sandbox.compile.count");
    try {
      auto comp = std::make_shared<CompiledComponent>();
      comp->hash = hash;
      comp->module = std::make_shared<const wasm::Module>(wasm::decode_module(stripped));
      comp->compiled_at = std::chrono::steady_clock::now();
      check_abi(*comp->module);
      promise.set_value(comp);
      return comp;
    } catch (...) {
      // Do not cache failures: a later fetch of correct bytes for the same
      // ref must be able to succeed.
      {
        std::lock_guard lock(mu_);
        cache_.erase(key);
      }
      promise.set_value(nullptr);
      throw;
    }
  }

  std::optional<std::shared_ptr<const CompiledComponent>> cached(
      std::span<const uint8_t> hash) const {
    Bytes key(hash.begin(), hash.end());
    std::lock_guard lock(mu_);
    auto it = cache_.find(key);
    if (it == cache_.end()) return std::nullopt;
    auto fut = it->second;
    if (fut.wait_for(std::chrono::seconds(0)) != std::future_status::ready) return std::nullopt;
    auto val = fut.get();
    if (!val) return std::nullopt;
    return val;
  }

  void clear_compiled_cache() {
    std::lock_guard lock(mu_);
    cache_.clear();
  }

  void clear_scratch() {
    std::error_code ec;
    std::filesystem::remove_all(config_.scratch_root, ec);
    std::filesystem::create_directories(config_.scratch_root, ec);
  }

  // Runs one evaluation in a fresh instance under the given policy.
  EvaluateOutput evaluate(const CompiledComponent& comp, const EvaluateInput& input,
                          const identity::ExecutionPolicy& policy,
                          EvaluateStats* stats = nullptr) {
    cbor::Value in = cbor::Value::map();
    in.put("ev", cbor::Value::bytes(input.tee_evidence));
    cbor::Value endorsements = cbor::Value::array();
    for (const auto& e : input.endorsements) endorsements.push(cbor::Value::bytes(e));
    in.put("end", std::move(endorsements));
    in.put("erd", cbor::Value::bytes(input.expected_report_data));
    Bytes in_bytes = cbor::encode(in);

    wasm::InstanceLimits limits;
    limits.max_memory_bytes = policy.max_memory_bytes;
    limits.fuel = static_cast<int64_t>(
        std::min<uint64_t>(policy.fuel_budget, static_cast<uint64_t>(INT64_MAX)));
    auto deadline =
        std::chrono::steady_clock::now() + std::chrono::milliseconds(policy.wall_clock_limit_ms);
    limits.deadline = deadline;

    CallContext ctx;
    ctx.policy = &policy;
    ctx.scratch_dir = config_.scratch_root / to_hex(comp.hash);
    ctx.deadline = deadline;

    auto start = std::chrono::steady_clock::now();
    wasm::Instance inst(comp.module, host_imports(ctx), limits);
    uint64_t alloc_args[] = {in_bytes.size()};
    uint64_t in_off = inst.call("tm_alloc", alloc_args);
    if (in_off == 0) fail(Errc::kTrap, "component allocator returned null");
    inst.mem_write(in_off, in_bytes);
    uint64_t eval_args[] = {in_off, in_bytes.size()};
    uint64_t packed = inst.call("tm_evaluate", eval_args);
    if (stats) {
      stats->fuel_consumed = inst.fuel_consumed();
      stats->micros = static_cast<uint64_t>(std::chrono::duration_cast<std::chrono::microseconds>(
                                                std::chrono::steady_clock::now() - start)
                                                .count());
    }

    uint32_t out_off = static_cast<uint32_t>(packed >> 32);
    uint32_t out_len = static_cast<uint32_t>(packed);
    if (out_len == 0) return internal_failure("component produced no output");
    if (out_len > config_.max_output_bytes) {
      count("sandbox.output.size_rejected");
      return internal_failure("output exceeds size bound");
    }
    Bytes out_bytes;
    try {
      out_bytes = inst.mem_read(out_off, out_len);
    } catch (const Error&) {
      return internal_failure("output span out of bounds");
    }
    return parse_output(out_bytes);
  }

  uint64_t count_of(std::string_view name) const {
    return metrics_ ? metrics_->get(name) : 0;
  }

 private:
  struct CallContext {
    const identity::ExecutionPolicy* policy = nullptr;
    std::filesystem::path scratch_dir;
    std::chrono::steady_clock::time_point deadline;
  };

  void count(std::string_view name) {
    if (metrics_) metrics_->inc(name);
  }

  static void check_abi(const wasm::Module& m) {
    const wasm::Export* alloc = m.find_export("tm_alloc", 0);
    const wasm::Export* eval = m.find_export("tm_evaluate", 0);
    if (!alloc || !eval) {
      fail(Errc::kMissingExport, "component must export tm_alloc and tm_evaluate");
    }
    const wasm::FuncType& at = m.type_of(alloc->index);
    const wasm::FuncType& et = m.type_of(eval->index);
    wasm::FuncType want_alloc{{wasm::kTypeI32}, {wasm::kTypeI32}};
    wasm::FuncType want_eval{{wasm::kTypeI32, wasm::kTypeI32}, {wasm::kTypeI64}};
    if (!(at == want_alloc) || !(et == want_eval)) {
      fail(Errc::kMissingExport, "component ABI signature mismatch");
    }
    if (!m.find_export("memory", 2)) {
      fail(Errc::kMissingExport, "component must export its memory");
    }
  }

  EvaluateOutput internal_failure(std::string detail) {
    EvaluateOutput out;
    out.failure_code = "Internal";
    out.failure_detail = std::move(detail);
    return out;
  }

  EvaluateOutput parse_output(const Bytes& raw) {
    cbor::Value v;
    try {
      v = cbor::decode(raw);
    } catch (const Error& e) {
      return internal_failure("output not decodable: " + e.detail());
    }
    if (!v.is_map()) return internal_failure("output must be a map");
    const cbor::Value* ok = v.get("ok");
    if (!ok || !ok->is_bool()) return internal_failure("output missing ok flag");
    if (ok->as_bool()) {
      const cbor::Value* claims = v.get("claims");
      if (!claims || !claims->is_map()) return internal_failure("success output requires claims map");
      if (claims->depth() > config_.max_output_depth) {
        count("sandbox.output.depth_rejected");
        return internal_failure("claims exceed depth bound");
      }
      EvaluateOutput out;
      out.claims = *claims;
      return out;
    }
    EvaluateOutput out;
    const cbor::Value* code = v.get("code");
    const cbor::Value* detail = v.get("detail");
    std::string code_text = code && code->is_text() ? code->as_text() : "";
    if (code_text != "InvalidEvidence" && code_text != "EndorsementRejected" &&
        code_text != "FreshnessMismatch" && code_text != "Internal") {
      code_text = "Internal";
    }
    out.failure_code = code_text;
    out.failure_detail = detail && detail->is_text() ? detail->as_text() : "";
    return out;
  }

  std::vector<wasm::HostImport> host_imports(CallContext ctx) {
    using wasm::FuncType;
    using wasm::HostImport;
    using wasm::Instance;
    constexpr uint8_t i32 = wasm::kTypeI32;
    constexpr uint8_t i64t = wasm::kTypeI64;
    std::vector<HostImport> out;
    auto shared_ctx = std::make_shared<CallContext>(std::move(ctx));

    out.push_back(HostImport{
        "now", FuncType{{}, {i64t}}, [this](Instance&, const uint64_t*, uint64_t* r) {
          *r = config_.now();
        }});

    out.push_back(HostImport{
        "log", FuncType{{i32, i32}, {}},
        [](Instance& inst, const uint64_t* args, uint64_t*) {
          static const bool enabled = std::getenv("TRUSTMEE_COMPONENT_LOG") != nullptr;
          if (!enabled) return;
          uint32_t off = static_cast<uint32_t>(args[0]);
          uint32_t len = std::min<uint32_t>(static_cast<uint32_t>(args[1]), 4096);
          try {
            Bytes msg = inst.mem_read(off, len);
            std::fwrite(msg.data(), 1, msg.size(), stderr);
            std::fputc('\n', stderr);
          } catch (const Error&) {
          }
        }});

    out.push_back(HostImport{
        "verify_p256", FuncType{{i32, i32, i32, i32}, {i32}},
        [](Instance& inst, const uint64_t* args, uint64_t* r) {
          *r = static_cast<uint64_t>(static_cast<uint32_t>(-8));
          try {
            Bytes msg = inst.mem_read(static_cast<uint32_t>(args[0]),
                                      std::min<uint64_t>(args[1] & 0xffffffff, 1u << 20));
            Bytes sig = inst.mem_read(static_cast<uint32_t>(args[2]), 64);
            Bytes pub = inst.mem_read(static_cast<uint32_t>(args[3]), 65);
            bool valid = crypto::p256_verify(msg, sig, pub);
            *r = valid ? 1 : 0;
          } catch (const Error& e) {
            if (e.code() == Errc::kMalformedKey) {
              *r = static_cast<uint64_t>(static_cast<uint32_t>(-7));
            } else if (e.code() == Errc::kTrap) {
              throw;  // out-of-bounds host read is a component fault
            }
          }
        }});

    out.push_back(HostImport{
        "http_get", FuncType{{i32, i32, i32, i32}, {i32}},
        [this, shared_ctx](Instance& inst, const uint64_t* args, uint64_t* r) {
          *r = static_cast<uint64_t>(static_cast<uint32_t>(-2));
          if (!shared_ctx->policy->network_allowed) {
            count("sandbox.http.denied");
            *r = static_cast<uint64_t>(static_cast<uint32_t>(-1));
            return;
          }
          uint32_t url_len = static_cast<uint32_t>(args[1]);
          if (url_len > 4096) return;
          Bytes url_bytes = inst.mem_read(static_cast<uint32_t>(args[0]), url_len);
          std::string url(url_bytes.begin(), url_bytes.end());
          auto parts = detail::parse_url(url);
          if (!parts || (parts->scheme != "http" && parts->scheme != "https")) return;
          if (parts->scheme == "https") return;  // no TLS in this deployment profile
          count("sandbox.http.allowed");

          httplib::Client client(("http://" + parts->host_port).c_str());
          auto remaining = std::chrono::duration_cast<std::chrono::milliseconds>(
              shared_ctx->deadline - std::chrono::steady_clock::now());
          long timeout_ms = std::clamp<long>(remaining.count(), 1, 30'000);
          client.set_connection_timeout(0, timeout_ms * 1000);
          client.set_read_timeout(0, timeout_ms * 1000);
          auto res = client.Get(parts->path.c_str());
          if (!res || res->status != 200) return;
          uint32_t dst_cap = static_cast<uint32_t>(args[3]);
          if (res->body.size() > config_.http_response_limit || res->body.size() > dst_cap) {
            *r = static_cast<uint64_t>(static_cast<uint32_t>(-3));
            return;
          }
          inst.mem_write(static_cast<uint32_t>(args[2]),
                         std::span<const uint8_t>(
                             reinterpret_cast<const uint8_t*>(res->body.data()),
                             res->body.size()));
          *r = res->body.size();
        }});

    out.push_back(HostImport{
        "cache_read", FuncType{{i32, i32, i32, i32}, {i32}},
        [shared_ctx](Instance& inst, const uint64_t* args, uint64_t* r) {
          *r = static_cast<uint64_t>(static_cast<uint32_t>(-4));
          uint32_t key_len = static_cast<uint32_t>(args[1]);
          if (key_len > 512) {
            *r = static_cast<uint64_t>(static_cast<uint32_t>(-5));
            return;
          }
          Bytes key_bytes = inst.mem_read(static_cast<uint32_t>(args[0]), key_len);
          std::string key(key_bytes.begin(), key_bytes.end());
          if (!detail::valid_cache_key(key)) {
            *r = static_cast<uint64_t>(static_cast<uint32_t>(-5));
            return;
          }
          std::filesystem::path p = shared_ctx->scratch_dir / key;
          std::error_code ec;
          if (!std::filesystem::is_regular_file(p, ec)) return;
          Bytes data;
          try {
            data = read_file(p);
          } catch (const Error&) {
            return;
          }
          uint32_t dst_cap = static_cast<uint32_t>(args[3]);
          if (data.size() > dst_cap) {
            *r = static_cast<uint64_t>(static_cast<uint32_t>(-3));
            return;
          }
          inst.mem_write(static_cast<uint32_t>(args[2]), data);
          *r = data.size();
        }});

    out.push_back(HostImport{
        "cache_write", FuncType{{i32, i32, i32, i32}, {i32}},
        [this, shared_ctx](Instance& inst, const uint64_t* args, uint64_t* r) {
          *r = static_cast<uint64_t>(static_cast<uint32_t>(-8));
          uint32_t key_len = static_cast<uint32_t>(args[1]);
          if (key_len > 512) {
            *r = static_cast<uint64_t>(static_cast<uint32_t>(-5));
            return;
          }
          Bytes key_bytes = inst.mem_read(static_cast<uint32_t>(args[0]), key_len);
          std::string key(key_bytes.begin(), key_bytes.end());
          if (!detail::valid_cache_key(key)) {
            *r = static_cast<uint64_t>(static_cast<uint32_t>(-5));
            return;
          }
          uint32_t val_len = static_cast<uint32_t>(args[3]);
          uint64_t used = detail::dir_size_bytes(shared_ctx->scratch_dir);
          if (used + val_len > config_.scratch_quota_bytes) {
            *r = static_cast<uint64_t>(static_cast<uint32_t>(-6));
            return;
          }
          Bytes val = inst.mem_read(static_cast<uint32_t>(args[2]), val_len);
          try {
            write_file(shared_ctx->scratch_dir / key, val);
          } catch (const Error&) {
            return;
          }
          *r = 0;
        }});

    return out;
  }

  SandboxConfig config_;
  std::shared_ptr<metrics::Registry> metrics_;
  mutable std::mutex mu_;
  std::map<Bytes, std::shared_future<std::shared_ptr<const CompiledComponent>>> cache_;
};

}  // namespace trustmee::sandbox

#endif  // TRUSTMEE_SANDBOX_HPP_
