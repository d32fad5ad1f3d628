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
// Component identity: measurement over signature-stripped bytes, the
// embedded signature envelope, and the signer-to-execution-policy trust
// store.
//
// The envelope lives in a wasm custom section named "trustmee-sig" holding a
// CBOR map {"pk": bstr32, "exp": uint, "sig": bstr64}; sig is Ed25519 over
//   "trustmee-component-v1" || expiry (8-byte BE) || SHA-256(stripped bytes).
// Signed and unsigned distributions of the same logic therefore share one
// measurement.

#ifndef TRUSTMEE_IDENTITY_HPP_
#define TRUSTMEE_IDENTITY_HPP_

#include <array>
#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "trustmee/bytes.hpp"
#include "trustmee/cbor.hpp"
#include "trustmee/crypto.hpp"
#include "trustmee/error.hpp"

namespace trustmee::identity {

inline constexpr std::string_view kSignatureSectionName = "trustmee-sig";
inline constexpr std::string_view kSignatureDomainTag = "trustmee-component-v1";

struct ExecutionPolicy {
  uint64_t fuel_budget = 100'000'000;
  bool network_allowed = false;
  uint64_t max_memory_bytes = 64ull << 20;
  uint32_t wall_clock_limit_ms = 2000;

  bool operator==(const ExecutionPolicy&) const = default;
};

struct TrustStore {
  // Keyed by the 32-byte Ed25519 signer public key.
  std::map<Bytes, ExecutionPolicy> entries;
  ExecutionPolicy default_policy;
};

inline void validate(const TrustStore& store) {
  if (store.default_policy.network_allowed) {
    fail(Errc::kValidationFailed, "default policy must not allow network access");
  }
  if (store.default_policy.fuel_budget == 0) {
    fail(Errc::kValidationFailed, "default policy requires a finite, nonzero fuel budget");
  }
  for (const auto& [pk, policy] : store.entries) {
    if (pk.size() != 32) fail(Errc::kValidationFailed, "trust store keys must be 32 bytes");
    if (policy.fuel_budget == 0) fail(Errc::kValidationFailed, "policy fuel budget is zero");
  }
}

struct ComponentIdentity {
  std::array<uint8_t, 32> hash{};
  std::optional<std::array<uint8_t, 32>> signer;

  std::string hash_hex() const { return to_hex(hash); }
};

struct MeasureResult {
  ComponentIdentity identity;
  ExecutionPolicy policy;
};

namespace detail {

struct Section {
  size_t begin = 0;  // offset of the section id byte
  size_t end = 0;    // one past the section payload
  uint8_t id = 0;
  std::string custom_name;       // only for id 0
  size_t content_begin = 0;      // custom content after the name
};

inline uint64_t read_leb(std::span<const uint8_t> b, size_t* pos, size_t end) {
  uint64_t v = 0;
  int shift = 0;
  while (true) {
    if (*pos >= end) fail(Errc::kMalformedContainer, "truncated varint");
    uint8_t byte = b[(*pos)++];
    v |= static_cast<uint64_t>(byte & 0x7f) << shift;
    if ((byte & 0x80) == 0) return v;
    shift += 7;
    if (shift > 35) fail(Errc::kMalformedContainer, "varint too long");
  }
}

inline bool has_wasm_magic(std::span<const uint8_t> b) {
  return b.size() >= 8 && b[0] == 0x00 && b[1] == 0x61 && b[2] == 0x73 && b[3] == 0x6d;
}

// Walks the section framing without decoding section contents.
inline std::vector<Section> scan_sections(std::span<const uint8_t> b) {
  std::vector<Section> out;
  size_t pos = 8;
  while (pos < b.size()) {
    Section s;
    s.begin = pos;
    if (pos >= b.size()) fail(Errc::kMalformedContainer, "truncated section id");
    s.id = b[pos++];
    uint64_t len = read_leb(b, &pos, b.size());
    if (len > b.size() - pos) fail(Errc::kMalformedContainer, "section overruns input");
    size_t payload_begin = pos;
    s.end = pos + len;
    if (s.id == 0) {
      size_t npos = payload_begin;
      uint64_t name_len = read_leb(b, &npos, s.end);
      if (name_len > s.end - npos) fail(Errc::kMalformedContainer, "custom name overruns");
      s.custom_name.assign(b.begin() + static_cast<ptrdiff_t>(npos),
                           b.begin() + static_cast<ptrdiff_t>(npos + name_len));
      s.content_begin = npos + name_len;
    }
    pos = s.end;
    out.push_back(std::move(s));
  }
  return out;
}

}  // namespace detail

// Removes every "trustmee-sig" custom section. Bytes without wasm framing
// are returned unchanged (no section can be present); bytes with wasm magic
// but broken section framing are rejected.
inline Bytes strip_signature(std::span<const uint8_t> component_bytes) {
  if (!detail::has_wasm_magic(component_bytes)) {
    return Bytes(component_bytes.begin(), component_bytes.end());
  }
  auto sections = detail::scan_sections(component_bytes);
  Bytes out(component_bytes.begin(), component_bytes.begin() + 8);
  for (const auto& s : sections) {
    if (s.id == 0 && s.custom_name == kSignatureSectionName) continue;
    out.insert(out.end(), component_bytes.begin() + static_cast<ptrdiff_t>(s.begin),
               component_bytes.begin() + static_cast<ptrdiff_t>(s.end));
  }
  return out;
}

struct SignatureEnvelope {
  std::array<uint8_t, 32> signer_public_key{};
  uint64_t expiry = 0;
  std::array<uint8_t, 64> signature{};
};

inline Bytes encode_envelope(const SignatureEnvelope& env) {
  cbor::Value m = cbor::Value::map();
  m.put("pk", cbor::Value::bytes(std::span<const uint8_t>(env.signer_public_key)));
  m.put("exp", cbor::Value::uns(env.expiry));
  m.put("sig", cbor::Value::bytes(std::span<const uint8_t>(env.signature)));
  return cbor::encode(m);
}

inline std::optional<SignatureEnvelope> decode_envelope(std::span<const uint8_t> raw) {
  try {
    cbor::Value m = cbor::decode(raw);
    if (!m.is_map() || m.size() != 3) return std::nullopt;
    const cbor::Value* pk = m.get("pk");
    const cbor::Value* exp = m.get("exp");
    const cbor::Value* sig = m.get("sig");
    if (!pk || !exp || !sig) return std::nullopt;
    if (pk->as_bytes().size() != 32 || sig->as_bytes().size() != 64) return std::nullopt;
    SignatureEnvelope env;
    std::copy(pk->as_bytes().begin(), pk->as_bytes().end(), env.signer_public_key.begin());
    env.expiry = exp->as_uns();
    std::copy(sig->as_bytes().begin(), sig->as_bytes().end(), env.signature.begin());
    return env;
  } catch (const Error&) {
    return std::nullopt;
  }
}

inline Bytes signature_message(uint64_t expiry, std::span<const uint8_t> stripped_hash) {
  Bytes msg(kSignatureDomainTag.begin(), kSignatureDomainTag.end());
  for (int i = 7; i >= 0; --i) msg.push_back(static_cast<uint8_t>(expiry >> (8 * i)));
  msg.insert(msg.end(), stripped_hash.begin(), stripped_hash.end());
  return msg;
}

// Replaces any existing envelope, appending a fresh "trustmee-sig" section.
inline Bytes sign_component(std::span<const uint8_t> component_bytes,
                            std::span<const uint8_t> signing_key, uint64_t expiry) {
  Bytes stripped = strip_signature(component_bytes);
  auto digest = crypto::sha256(stripped);

  SignatureEnvelope env;
  auto kp_pk = std::span<const uint8_t>(signing_key).subspan(32, 32);
  std::copy(kp_pk.begin(), kp_pk.end(), env.signer_public_key.begin());
  env.expiry = expiry;
  env.signature = crypto::ed25519_sign(signature_message(expiry, digest), signing_key);

  Bytes content = encode_envelope(env);
  Bytes section_payload;
  // name
  section_payload.push_back(static_cast<uint8_t>(kSignatureSectionName.size()));
  section_payload.insert(section_payload.end(), kSignatureSectionName.begin(),
                         kSignatureSectionName.end());
  section_payload.insert(section_payload.end(), content.begin(), content.end());

  Bytes out = std::move(stripped);
  out.push_back(0);  // custom section id
  // leb128 payload size
  uint64_t len = section_payload.size();
  do {
    uint8_t byte = len & 0x7f;
    len >>= 7;
    if (len) byte |= 0x80;
    out.push_back(byte);
  } while (len);
  out.insert(out.end(), section_payload.begin(), section_payload.end());
  return out;
}

// Measures a component and resolves its execution policy. Never throws for
// malformed or unsigned inputs: those degrade to an unsigned identity under
// the default policy, and the later compile step reports container errors.
inline MeasureResult measure_and_identify(std::span<const uint8_t> component_bytes,
                                          const TrustStore& store, uint64_t now) {
  MeasureResult out;
  Bytes stripped;
  std::vector<std::span<const uint8_t>> envelopes;
  bool container_ok = true;
  try {
    if (detail::has_wasm_magic(component_bytes)) {
      auto sections = detail::scan_sections(component_bytes);
      stripped.assign(component_bytes.begin(), component_bytes.begin() + 8);
      for (const auto& s : sections) {
        if (s.id == 0 && s.custom_name == kSignatureSectionName) {
          envelopes.push_back(component_bytes.subspan(s.content_begin, s.end - s.content_begin));
        } else {
          stripped.insert(stripped.end(),
                          component_bytes.begin() + static_cast<ptrdiff_t>(s.begin),
                          component_bytes.begin() + static_cast<ptrdiff_t>(s.end));
        }
      }
    } else {
      stripped.assign(component_bytes.begin(), component_bytes.end());
    }
  } catch (const Error&) {
    container_ok = false;
    stripped.assign(component_bytes.begin(), component_bytes.end());
  }
  (void)container_ok;

  out.identity.hash = crypto::sha256(stripped);
  out.policy = store.default_policy;

  // First envelope that verifies and is unexpired wins; its signer must then
  // be present in the trust store for a non-default policy.
  for (auto raw : envelopes) {
    auto env = decode_envelope(raw);
    if (!env.has_value()) continue;
    if (now > env->expiry) continue;
    Bytes msg = signature_message(env->expiry, out.identity.hash);
    if (!crypto::ed25519_verify(msg, env->signature, env->signer_public_key)) continue;
    Bytes signer(env->signer_public_key.begin(), env->signer_public_key.end());
    auto it = store.entries.find(signer);
    if (it != store.entries.end()) {
      out.identity.signer = env->signer_public_key;
      out.policy = it->second;
    }
    break;
  }
  return out;
}

// --- trust store config file -------------------------------------------------

inline ExecutionPolicy policy_from_json(const nlohmann::json& j) {
  ExecutionPolicy p;
  if (j.contains("fuel_budget")) p.fuel_budget = j.at("fuel_budget").get<uint64_t>();
  if (j.contains("network_allowed")) p.network_allowed = j.at("network_allowed").get<bool>();
  if (j.contains("max_memory_bytes")) {
    p.max_memory_bytes = j.at("max_memory_bytes").get<uint64_t>();
  }
  if (j.contains("wall_clock_limit_ms")) {
    p.wall_clock_limit_ms = j.at("wall_clock_limit_ms").get<uint32_t>();
  }
  return p;
}

inline nlohmann::json policy_to_json(const ExecutionPolicy& p) {
  return {{"fuel_budget", p.fuel_budget},
          {"network_allowed", p.network_allowed},
          {"max_memory_bytes", p.max_memory_bytes},
          {"wall_clock_limit_ms", p.wall_clock_limit_ms}};
}

inline TrustStore parse_trust_store(std::string_view text) {
  nlohmann::json j = nlohmann::json::parse(text, nullptr, false);
  if (j.is_discarded() || !j.is_object()) {
    fail(Errc::kValidationFailed, "trust store config is not a JSON object");
  }
  TrustStore store;
  if (j.contains("default_policy")) store.default_policy = policy_from_json(j["default_policy"]);
  if (j.contains("entries")) {
    for (const auto& [key, val] : j["entries"].items()) {
      Bytes pk = from_hex(key);
      store.entries[pk] = policy_from_json(val);
    }
  }
  validate(store);
  return store;
}

inline std::string trust_store_to_json(const TrustStore& store) {
  nlohmann::json j;
  j["default_policy"] = policy_to_json(store.default_policy);
  j["entries"] = nlohmann::json::object();
  for (const auto& [pk, policy] : store.entries) {
    j["entries"][to_hex(pk)] = policy_to_json(policy);
  }
  return j.dump(2);
}

inline TrustStore load_trust_store(const std::filesystem::path& path) {
  Bytes raw = read_file(path);
  return parse_trust_store(std::string_view(reinterpret_cast<const char*>(raw.data()),
                                            raw.size()));
}

}  // namespace trustmee::identity

#endif  // TRUSTMEE_IDENTITY_HPP_
