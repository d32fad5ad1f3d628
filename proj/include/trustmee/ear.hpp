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
// Attestation results: the appraised claim set plus trustworthiness vector,
// serialized as canonical CBOR and signed by the verifier key with a domain
// separation tag. Includes the relying-party verification helper.

#ifndef TRUSTMEE_EAR_HPP_
#define TRUSTMEE_EAR_HPP_

#include <array>
#include <cstdint>
#include <set>
#include <string>
#include <vector>

#include "trustmee/appraisal.hpp"
#include "trustmee/bytes.hpp"
#include "trustmee/cbor.hpp"
#include "trustmee/crypto.hpp"
#include "trustmee/error.hpp"

namespace trustmee::ear {

inline constexpr std::string_view kResultDomainTag = "trustmee-ear-v1";

struct AttestationResult {
  uint64_t issued_at = 0;
  std::string verifier_id;
  std::string policy_id;
  Bytes nonce_echo;  // the request's expected_report_data
  appraisal::Claims claims;
  appraisal::TrustVector trust_vector;
  std::vector<appraisal::RuleOutcome> rule_outcomes;
};

struct SignedResult {
  Bytes payload;
  std::array<uint8_t, 64> signature{};
  std::array<uint8_t, 32> verifier_public_key{};
};

inline cbor::Value trust_vector_to_cbor(const appraisal::TrustVector& tv) {
  cbor::Value m = cbor::Value::map();
  m.put("instance_identity", cbor::Value::uns(tv.instance_identity));
  m.put("executables", cbor::Value::uns(tv.executables));
  m.put("hardware", cbor::Value::uns(tv.hardware));
  m.put("configuration", cbor::Value::uns(tv.configuration));
  m.put("overall", cbor::Value::uns(tv.overall()));
  return m;
}

inline appraisal::TrustVector trust_vector_from_cbor(const cbor::Value& m) {
  appraisal::TrustVector tv;
  if (!m.is_map()) fail(Errc::kMalformed, "trust vector must be a map");
  auto tier = [&](const char* key) -> uint8_t {
    const cbor::Value* v = m.get(key);
    if (!v) fail(Errc::kMalformed, std::string("trust vector missing ") + key);
    return static_cast<uint8_t>(v->as_uns());
  };
  tv.instance_identity = tier("instance_identity");
  tv.executables = tier("executables");
  tv.hardware = tier("hardware");
  tv.configuration = tier("configuration");
  return tv;
}

inline Bytes encode_payload(const AttestationResult& r) {
  cbor::Value m = cbor::Value::map();
  m.put("iat", cbor::Value::uns(r.issued_at));
  m.put("verifier_id", cbor::Value::text(r.verifier_id));
  m.put("policy_id", cbor::Value::text(r.policy_id));
  m.put("nonce", cbor::Value::bytes(r.nonce_echo));
  m.put("claims", r.claims);
  m.put("tv", trust_vector_to_cbor(r.trust_vector));
  cbor::Value outcomes = cbor::Value::array();
  for (const auto& o : r.rule_outcomes) {
    cbor::Value e = cbor::Value::map();
    e.put("path", cbor::Value::text(o.rule.path));
    e.put("op", cbor::Value::text(appraisal::op_name(o.rule.op)));
    e.put("ref", cbor::Value::text(o.rule.reference_key));
    e.put("category", cbor::Value::text(appraisal::category_name(o.rule.category)));
    e.put("passed", cbor::Value::boolean(o.passed));
    e.put("reason", cbor::Value::text(o.reason));
    outcomes.push(std::move(e));
  }
  m.put("outcomes", std::move(outcomes));
  return cbor::encode(m);
}

inline AttestationResult decode_payload(std::span<const uint8_t> raw) {
  cbor::Value m = cbor::decode(raw);
  if (!m.is_map()) fail(Errc::kMalformed, "result payload must be a map");
  AttestationResult r;
  const cbor::Value* iat = m.get("iat");
  const cbor::Value* vid = m.get("verifier_id");
  const cbor::Value* pid = m.get("policy_id");
  const cbor::Value* nonce = m.get("nonce");
  const cbor::Value* claims = m.get("claims");
  const cbor::Value* tv = m.get("tv");
  const cbor::Value* outcomes = m.get("outcomes");
  if (!iat || !vid || !pid || !nonce || !claims || !tv || !outcomes) {
    fail(Errc::kMalformed, "result payload missing fields");
  }
  r.issued_at = iat->as_uns();
  r.verifier_id = vid->as_text();
  r.policy_id = pid->as_text();
  r.nonce_echo = nonce->as_bytes();
  r.claims = *claims;
  r.trust_vector = trust_vector_from_cbor(*tv);
  for (const auto& e : outcomes->items()) {
    appraisal::RuleOutcome o;
    if (!e.is_map()) fail(Errc::kMalformed, "outcome must be a map");
    const cbor::Value* path = e.get("path");
    const cbor::Value* op = e.get("op");
    const cbor::Value* ref = e.get("ref");
    const cbor::Value* category = e.get("category");
    const cbor::Value* passed = e.get("passed");
    const cbor::Value* reason = e.get("reason");
    if (!path || !op || !ref || !category || !passed || !reason) {
      fail(Errc::kMalformed, "outcome missing fields");
    }
    o.rule.path = path->as_text();
    o.rule.op = appraisal::op_from_name(op->as_text());
    o.rule.reference_key = ref->as_text();
    o.rule.category = appraisal::category_from_name(category->as_text());
    o.passed = passed->as_bool();
    o.reason = reason->as_text();
    o.index = r.rule_outcomes.size();
    r.rule_outcomes.push_back(std::move(o));
  }
  return r;
}

inline Bytes result_signature_message(std::span<const uint8_t> payload) {
  Bytes msg(kResultDomainTag.begin(), kResultDomainTag.end());
  msg.insert(msg.end(), payload.begin(), payload.end());
  return msg;
}

inline SignedResult emit(const AttestationResult& result, std::span<const uint8_t> signing_key) {
  if (signing_key.size() != 64) fail(Errc::kMalformedKey, "signing key must be 64 bytes");
  SignedResult sr;
  sr.payload = encode_payload(result);
  sr.signature = crypto::ed25519_sign(result_signature_message(sr.payload), signing_key);
  auto pk = signing_key.subspan(32, 32);
  std::copy(pk.begin(), pk.end(), sr.verifier_public_key.begin());
  return sr;
}

inline Bytes encode_signed(const SignedResult& sr) {
  cbor::Value m = cbor::Value::map();
  m.put("payload", cbor::Value::bytes(sr.payload));
  m.put("sig", cbor::Value::bytes(std::span<const uint8_t>(sr.signature)));
  m.put("vk", cbor::Value::bytes(std::span<const uint8_t>(sr.verifier_public_key)));
  return cbor::encode(m);
}

inline SignedResult decode_signed(std::span<const uint8_t> raw) {
  cbor::Value m;
  try {
    m = cbor::decode(raw);
  } catch (const Error& e) {
    fail(Errc::kMalformed, e.detail());
  }
  if (!m.is_map()) fail(Errc::kMalformed, "signed result must be a map");
  const cbor::Value* payload = m.get("payload");
  const cbor::Value* sig = m.get("sig");
  const cbor::Value* vk = m.get("vk");
  if (!payload || !sig || !vk) fail(Errc::kMalformed, "signed result missing fields");
  SignedResult sr;
  try {
    sr.payload = payload->as_bytes();
    if (sig->as_bytes().size() != 64 || vk->as_bytes().size() != 32) {
      fail(Errc::kMalformed, "bad signature or key length");
    }
    std::copy(sig->as_bytes().begin(), sig->as_bytes().end(), sr.signature.begin());
    std::copy(vk->as_bytes().begin(), vk->as_bytes().end(), sr.verifier_public_key.begin());
  } catch (const Error& e) {
    fail(Errc::kMalformed, e.detail());
  }
  return sr;
}

// Relying-party helper: decodes and returns the result iff the signature
// verifies under a trusted verifier key.
inline AttestationResult verify_result(const SignedResult& sr,
                                       const std::set<Bytes>& trusted_verifier_keys) {
  Bytes vk(sr.verifier_public_key.begin(), sr.verifier_public_key.end());
  if (trusted_verifier_keys.find(vk) == trusted_verifier_keys.end()) {
    fail(Errc::kUntrustedVerifier, "verifier key not trusted");
  }
  if (!crypto::ed25519_verify(result_signature_message(sr.payload), sr.signature,
                              sr.verifier_public_key)) {
    fail(Errc::kBadSignature, "result signature invalid");
  }
  return decode_payload(sr.payload);
}

inline AttestationResult verify_result(std::span<const uint8_t> raw,
                                       const std::set<Bytes>& trusted_verifier_keys) {
  return verify_result(decode_signed(raw), trusted_verifier_keys);
}

}  // namespace trustmee::ear

#endif  // TRUSTMEE_EAR_HPP_
